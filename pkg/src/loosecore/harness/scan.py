"""Scan of beta - gamma over d, bracketing every sign change."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..analytic import DEFAULT_TOL, d_star, derived_params
from ..errors import InvalidParams


@dataclass
class Crossing:
    lo: float
    hi: float

    @property
    def d(self) -> float:
        return 0.5 * (self.lo + self.hi)


@dataclass
class ScanTable:
    r: int
    d: np.ndarray
    beta: np.ndarray
    gamma: np.ndarray
    crossings: list[Crossing] = field(default_factory=list)

    @property
    def diff(self) -> np.ndarray:
        return self.beta - self.gamma

    @property
    def signs(self) -> np.ndarray:
        return np.sign(self.diff).astype(int)

    def sign_pattern(self) -> str:
        """Run-length summary such as ``"- +"`` of the non-zero signs."""
        runs: list[str] = []
        for s in self.signs:
            if s == 0:
                continue
            c = "+" if s > 0 else "-"
            if not runs or runs[-1] != c:
                runs.append(c)
        return " ".join(runs)

    def to_dict(self) -> dict:
        return {
            "r": self.r,
            "d_star": d_star(self.r),
            "sign_pattern": self.sign_pattern(),
            "crossings": [{"lo": c.lo, "hi": c.hi, "d": c.d} for c in self.crossings],
            "rows": [
                {"d": float(d), "beta": float(b), "gamma": float(g), "beta_minus_gamma": float(b - g)}
                for d, b, g in zip(self.d, self.beta, self.gamma)
            ],
        }


def default_grid(r: int, d_max: float = 10.0, step: float = 0.01) -> np.ndarray:
    start = d_star(r) + step
    count = int(np.floor((d_max - start) / step + 1e-9)) + 1
    return start + step * np.arange(count)


def _diff(r: int, d: float, tol: float) -> float:
    p = derived_params(r, d, tol)
    return p.beta - p.gamma


def crossing_scan(
    r: int, d_grid=None, tol: float = DEFAULT_TOL, xtol: float = 1e-8
) -> ScanTable:
    """Evaluate beta - gamma on ``d_grid`` and bisect each sign change to ``xtol``."""
    grid = default_grid(r) if d_grid is None else np.asarray(d_grid, dtype=float)
    if grid.size == 0 or not np.all(np.isfinite(grid)):
        raise InvalidParams("grid must be a non-empty finite set of d values")
    if np.any(grid <= d_star(r)):
        raise InvalidParams(f"grid must lie above d* = {d_star(r)}")
    grid = np.sort(grid)
    params = [derived_params(r, float(d), tol) for d in grid]
    table = ScanTable(
        r,
        grid,
        np.array([p.beta for p in params]),
        np.array([p.gamma for p in params]),
    )
    nonzero = [i for i, s in enumerate(table.signs) if s != 0]
    for i, j in zip(nonzero, nonzero[1:]):
        if table.signs[i] == table.signs[j]:
            continue
        lo, hi = float(grid[i]), float(grid[j])
        s_lo = table.signs[i]
        while hi - lo > xtol:
            mid = 0.5 * (lo + hi)
            s = np.sign(_diff(r, mid, tol))
            if s == 0:
                lo = hi = mid
                break
            if s == s_lo:
                lo = mid
            else:
                hi = mid
        table.crossings.append(Crossing(lo, hi))
    return table
