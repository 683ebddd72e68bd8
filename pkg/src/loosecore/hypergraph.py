"""r-uniform hypergraphs and the binomial random hypergraph H^r(n, p).

Vertices are the integers ``0 .. n-1``. Edges are stored as the rows of an
``(m, r)`` integer array, each row sorted ascending, no two rows equal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from pathlib import Path

import numpy as np

from .errors import (
    EdgeOutOfRange,
    EmptyEdgeSet,
    InvalidParams,
    ProbabilityOverflow,
    VertexOutOfRange,
)

# C(n, r) at or below this is small enough to enumerate every r-set.
_ENUMERATE_LIMIT = 200_000


class Hypergraph:
    """A simple r-uniform hypergraph on vertex set ``range(n)``.

    Instances are treated as immutable; ``edges`` is a read-only array.
    """

    def __init__(self, n: int, r: int, edges=()):
        if r < 2:
            raise InvalidParams(f"uniformity r must be >= 2, got {r}")
        if n < 0:
            raise InvalidParams(f"vertex count must be >= 0, got {n}")
        arr = np.asarray(edges, dtype=np.int64)
        if arr.size == 0:
            arr = np.empty((0, r), dtype=np.int64)
        if arr.ndim != 2 or arr.shape[1] != r:
            raise InvalidParams(f"edges must have shape (m, {r}), got {arr.shape}")
        arr = np.sort(arr, axis=1)
        if arr.size:
            if arr.min() < 0 or arr.max() >= n:
                raise VertexOutOfRange(f"edge vertex outside [0, {n})")
            if np.any(np.diff(arr, axis=1) == 0):
                raise InvalidParams("an edge repeats a vertex")
            if len(np.unique(arr, axis=0)) != len(arr):
                raise InvalidParams("duplicate edge: hypergraph must be simple")
        arr.setflags(write=False)
        self.n = int(n)
        self.r = int(r)
        self.edges = arr

    @property
    def m(self) -> int:
        return len(self.edges)

    def __len__(self) -> int:
        return self.m

    def __repr__(self) -> str:
        return f"Hypergraph(n={self.n}, r={self.r}, m={self.m})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, Hypergraph):
            return NotImplemented
        return (
            self.n == other.n
            and self.r == other.r
            and self.edge_set() == other.edge_set()
        )

    def edge_set(self) -> frozenset:
        return frozenset(map(tuple, self.edges.tolist()))

    @cached_property
    def degrees(self) -> np.ndarray:
        deg = np.bincount(self.edges.ravel(), minlength=self.n)
        deg.setflags(write=False)
        return deg

    def degree(self, v: int) -> int:
        if not 0 <= v < self.n:
            raise VertexOutOfRange(f"vertex {v} not in [0, {self.n})")
        return int(self.degrees[v])

    @cached_property
    def connection_numbers(self) -> np.ndarray:
        if self.m == 0:
            return np.empty(0, dtype=np.int64)
        return (self.degrees[self.edges] >= 2).sum(axis=1)

    def connection_number(self, e: int) -> int:
        if not 0 <= e < self.m:
            raise EdgeOutOfRange(f"edge index {e} not in [0, {self.m})")
        return int(self.connection_numbers[e])

    def kappa_min(self) -> int:
        if self.m == 0:
            raise EmptyEdgeSet("kappa is undefined for a hypergraph with no edges")
        return int(self.connection_numbers.min())

    def support(self) -> np.ndarray:
        """Vertices lying in at least one edge."""
        return np.flatnonzero(self.degrees)

    def subhypergraph(self, keep) -> Hypergraph:
        """Keep the edges selected by a boolean mask or index array."""
        return Hypergraph(self.n, self.r, self.edges[keep])

    def to_text(self) -> str:
        lines = [f"{self.r} {self.n} {self.m}"]
        lines.extend(" ".join(map(str, row)) for row in self.edges.tolist())
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> Hypergraph:
        rows = [ln.split() for ln in text.splitlines() if ln.strip()]
        if not rows or len(rows[0]) != 3:
            raise InvalidParams("missing 'r n m' header line")
        r, n, m = map(int, rows[0])
        body = rows[1:]
        if len(body) != m:
            raise InvalidParams(f"header declares {m} edges, found {len(body)}")
        if any(len(row) != r for row in body):
            raise InvalidParams(f"every edge line must list exactly {r} vertices")
        edges = np.array([[int(x) for x in row] for row in body], dtype=np.int64)
        return cls(n, r, edges.reshape(m, r))

    def save(self, path) -> None:
        Path(path).write_text(self.to_text())

    @classmethod
    def load(cls, path) -> Hypergraph:
        return cls.from_text(Path(path).read_text())


def degree(H: Hypergraph, v: int) -> int:
    return H.degree(v)


def connection_number(H: Hypergraph, e: int) -> int:
    return H.connection_number(e)


def kappa_min(H: Hypergraph) -> int:
    return H.kappa_min()


def loose_cycle(length: int, r: int, n: int | None = None) -> Hypergraph:
    """Loose cycle on vertices ``0 .. length*(r-1)-1``.

    Edge i is ``{i(r-1), ..., i(r-1)+r-1}`` taken modulo the cycle's vertex
    count, so consecutive edges share exactly one vertex.
    """
    if length < 2:
        raise InvalidParams("a loose cycle needs length >= 2")
    if r == 2 and length < 3:
        raise InvalidParams("a graph cycle needs length >= 3")
    size = length * (r - 1)
    n = size if n is None else n
    if n < size:
        raise InvalidParams(f"need n >= {size} for this cycle")
    edges = [[(i * (r - 1) + k) % size for k in range(r)] for i in range(length)]
    return Hypergraph(n, r, edges)


def loose_path(length: int, r: int, n: int | None = None) -> Hypergraph:
    size = length * (r - 1) + 1
    n = size if n is None else n
    if n < size:
        raise InvalidParams(f"need n >= {size} for this path")
    edges = [[i * (r - 1) + k for k in range(r)] for i in range(length)]
    return Hypergraph(n, r, edges)


def union(*graphs: Hypergraph) -> Hypergraph:
    """Edge union of hypergraphs on a common vertex range (duplicates merged)."""
    n = max(g.n for g in graphs)
    r = graphs[0].r
    rows = sorted(set().union(*(g.edge_set() for g in graphs)))
    return Hypergraph(n, r, rows)


# ---------------------------------------------------------------- sampling


def _check_rn(r: int, n: int) -> None:
    if r < 2:
        raise InvalidParams(f"r must be >= 2, got {r}")
    if n < r:
        raise InvalidParams(f"need n >= r, got n={n}, r={r}")


def edge_probability(r: int, n: int, d: float) -> float:
    """Edge probability ``d / C(n-1, r-1)`` giving expected degree about d."""
    _check_rn(r, n)
    if not d > 0:
        raise InvalidParams(f"degree parameter d must be > 0, got {d}")
    denom = math.comb(n - 1, r - 1)
    if denom < 2**63:
        p = d / denom
    else:
        log_denom = math.lgamma(n) - math.lgamma(r) - math.lgamma(n - r + 1)
        p = math.exp(math.log(d) - log_denom)
    if p > 1:
        raise ProbabilityOverflow(
            f"d / C({n - 1}, {r - 1}) = {p} exceeds 1; lower d or raise n"
        )
    return p


@dataclass(frozen=True)
class ModelParams:
    r: int
    n: int
    d: float
    p: float
    seed: int = 0

    def __post_init__(self):
        _check_rn(self.r, self.n)
        if not 0 <= self.p <= 1:
            raise InvalidParams(f"p must lie in [0, 1], got {self.p}")
        if self.d < 0:
            raise InvalidParams(f"d must be >= 0, got {self.d}")

    @classmethod
    def from_degree(cls, r: int, n: int, d: float, seed: int = 0) -> ModelParams:
        return cls(r, n, d, edge_probability(r, n, d), seed)

    @classmethod
    def from_probability(cls, r: int, n: int, p: float, seed: int = 0) -> ModelParams:
        _check_rn(r, n)
        if not 0 <= p <= 1:
            raise InvalidParams(f"p must lie in [0, 1], got {p}")
        return cls(r, n, p * math.comb(n - 1, r - 1), p, seed)


def binomial_inverse_cdf(u: float, trials: int, p: float) -> int:
    """Return the smallest k with P(Bi(trials, p) <= k) >= u.

    The pmf is evaluated in log space on a window of +-(12 sd + 25) around the
    mode; mass outside the window is below 1e-30.  ``trials`` may be an
    arbitrarily large Python int (scipy's binom.ppf returns 0 once trials
    reaches about 1e22, e.g. r = 4 at n = 10^6).
    """
    if p <= 0 or trials == 0:
        return 0
    if p >= 1:
        return trials
    mean = trials * p
    sd = math.sqrt(mean * (1 - p))
    mode = min(trials, int((trials + 1) * p))
    lo = max(0, mode - int(12 * sd) - 25)
    hi = min(trials, mode + int(12 * sd) + 25)
    ks = np.arange(lo, hi + 1, dtype=np.float64)
    nf = float(trials)
    log_odds = math.log(p) - math.log1p(-p)
    # log pmf(k) - log pmf(mode), summed from the log ratios pmf(k+1)/pmf(k)
    step = np.log(nf - ks[:-1]) - np.log(ks[:-1] + 1) + log_odds
    logw = np.concatenate([[0.0], np.cumsum(step)])
    logw -= logw[mode - lo]
    cdf = np.cumsum(np.exp(logw))
    idx = int(np.searchsorted(cdf, u * cdf[-1], side="left"))
    return lo + min(idx, len(ks) - 1)


def _encode(rows: np.ndarray, n: int):
    if n ** rows.shape[1] < 2**63:
        weights = n ** np.arange(rows.shape[1] - 1, -1, -1, dtype=np.int64)
        return rows @ weights
    return np.array([hash(t) for t in map(tuple, rows.tolist())], dtype=np.int64)


def _sample_by_rejection(n: int, r: int, m: int, rng: np.random.Generator) -> np.ndarray:
    chosen: list[np.ndarray] = []
    seen = np.empty(0, dtype=np.int64)
    have = 0
    while have < m:
        batch = max(64, int(1.2 * (m - have)) + 16)
        rows = np.sort(rng.integers(0, n, size=(batch, r)), axis=1)
        rows = rows[np.all(np.diff(rows, axis=1) > 0, axis=1)]
        keys = _encode(rows, n)
        fresh = ~np.isin(keys, seen)
        rows, keys = rows[fresh], keys[fresh]
        _, first = np.unique(keys, return_index=True)
        first.sort()
        first = first[: m - have]
        chosen.append(rows[first])
        seen = np.concatenate([seen, keys[first]])
        have += len(first)
    return np.concatenate(chosen) if chosen else np.empty((0, r), dtype=np.int64)


def sample_hypergraph(params: ModelParams) -> Hypergraph:
    """Draw H^r(n, p): m ~ Bi(C(n, r), p), then m distinct uniform r-sets."""
    r, n, p = params.r, params.n, params.p
    rng = np.random.default_rng(params.seed)
    total = math.comb(n, r)
    m = binomial_inverse_cdf(float(rng.random()), total, p)
    if m == 0:
        return Hypergraph(n, r)
    if total <= _ENUMERATE_LIMIT:
        every = np.array(list(combinations(range(n), r)), dtype=np.int64)
        rows = every[rng.choice(total, size=m, replace=False)]
    else:
        rows = _sample_by_rejection(n, r, m, rng)
    order = np.lexsort(rows.T[::-1])
    return Hypergraph(n, r, rows[order])
