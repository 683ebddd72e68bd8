"""Empirical degree histograms and total-variation distance."""

from __future__ import annotations

import numpy as np

from ..errors import SupportMismatch


def tv_distance(p, q) -> float:
    """Unhalved L1 distance ``sum_m |p(m) - q(m)|``; lies in ``[0, 2]``."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise SupportMismatch(f"supports differ: {p.shape} vs {q.shape}")
    return float(np.abs(p - q).sum())


def folded_histogram(values, max_degree: int, total: int | None = None) -> np.ndarray:
    """Proportions at ``0 .. J`` plus one bucket for everything above ``J``.

    ``total`` defaults to ``len(values)``; an empty sample gives a point mass
    at 0.
    """
    values = np.asarray(values, dtype=np.int64)
    total = len(values) if total is None else total
    out = np.zeros(max_degree + 2)
    if total == 0:
        out[0] = 1.0
        return out
    counts = np.bincount(np.minimum(values, max_degree + 1), minlength=max_degree + 2)
    return counts / total
