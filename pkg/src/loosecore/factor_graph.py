"""Bipartite factor graph of a hypergraph and rooted BFS neighbourhoods.

Node ids share one range: variable nodes are ``0 .. n-1`` and factor node
``a`` (the a-th edge) has id ``n + a``.  Incidences are numbered
``a * r + k`` for the k-th slot of factor ``a``; the peeling code keeps one
flag per incidence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParams, NodeOutOfRange
from .hypergraph import Hypergraph


class FactorGraph:
    """Factor graph with ``n`` variable nodes and one factor per row of ``factors``.

    Rows may contain repeated variables or repeat each other; such graphs are
    not r-plain (see :func:`is_r_plain`) but peeling still treats every slot
    as one incidence.
    """

    def __init__(self, variable_count: int, factors, r: int | None = None):
        arr = np.asarray(factors, dtype=np.int64)
        if arr.size == 0:
            if r is None:
                raise InvalidParams("r is required for a factor graph without factors")
            arr = np.empty((0, r), dtype=np.int64)
        if arr.ndim != 2:
            raise InvalidParams("factors must be a 2-d array of variable ids")
        if r is not None and arr.shape[1] != r:
            raise InvalidParams(f"every factor needs exactly {r} slots")
        if arr.size and (arr.min() < 0 or arr.max() >= variable_count):
            raise NodeOutOfRange("factor references a variable outside [0, n)")
        arr = arr.copy()
        arr.setflags(write=False)
        self.n = int(variable_count)
        self.r = int(arr.shape[1])
        self.factors = arr
        self.m = len(arr)

        self.inc_var = arr.ravel()
        self.inc_fac = np.repeat(np.arange(self.m, dtype=np.int64), self.r)
        order = np.argsort(self.inc_var, kind="stable")
        counts = np.bincount(self.inc_var, minlength=self.n)
        self.var_ptr = np.concatenate([[0], np.cumsum(counts)])
        # incidence ids around each variable, grouped by variable
        self.var_inc = order
        self.var_degree = counts

    @property
    def variable_count(self) -> int:
        return self.n

    @property
    def factor_count(self) -> int:
        return self.m

    @property
    def node_count(self) -> int:
        return self.n + self.m

    def __repr__(self) -> str:
        return f"FactorGraph(n={self.n}, m={self.m}, r={self.r})"

    def is_factor(self, node: int) -> bool:
        return node >= self.n

    def node_type(self, node: int) -> str:
        return "factor" if node >= self.n else "variable"

    def _check(self, node: int) -> None:
        if not 0 <= node < self.node_count:
            raise NodeOutOfRange(f"node {node} not in [0, {self.node_count})")

    def neighbors(self, node: int) -> list[int]:
        self._check(node)
        if node < self.n:
            inc = self.var_inc[self.var_ptr[node] : self.var_ptr[node + 1]]
            return (self.inc_fac[inc] + self.n).tolist()
        return self.factors[node - self.n].tolist()

    def degrees(self) -> np.ndarray:
        return np.concatenate([self.var_degree, np.full(self.m, self.r, dtype=np.int64)])

    def to_hypergraph(self) -> Hypergraph:
        return Hypergraph(self.n, self.r, self.factors)


def build_factor_graph(H: Hypergraph) -> FactorGraph:
    return FactorGraph(H.n, H.edges, r=H.r)


@dataclass(frozen=True)
class PlainReport:
    ok: bool
    kind: str | None = None  # "double-edge" or "r-duplicate"
    witness: tuple = ()

    def __bool__(self) -> bool:
        return self.ok


def is_r_plain(G: FactorGraph) -> PlainReport:
    """Check for double edges and for pairs of factors with equal neighbourhoods."""
    if G.m == 0:
        return PlainReport(True)
    rows = np.sort(G.factors, axis=1)
    repeats = np.flatnonzero(np.any(np.diff(rows, axis=1) == 0, axis=1))
    if len(repeats):
        a = int(repeats[0])
        row = rows[a]
        k = int(np.flatnonzero(np.diff(row) == 0)[0])
        return PlainReport(False, "double-edge", (int(row[k]), G.n + a))
    seen: dict[tuple, int] = {}
    for a, row in enumerate(map(tuple, rows.tolist())):
        if row in seen:
            return PlainReport(False, "r-duplicate", (G.n + seen[row], G.n + a))
        seen[row] = a
    return PlainReport(True)


@dataclass
class LayeredNeighborhood:
    """Ball of radius ``depth`` around ``root`` split into distance layers.

    ``children[u]`` lists every neighbour of ``u`` in the next layer (more than
    one parent is possible when the ball has cycles); ``parent`` records the
    BFS-tree parent only.
    """

    root: int
    depth: int
    layers: list[list[int]]
    parent: dict[int, int]
    children: dict[int, list[int]] = field(repr=False)
    is_tree: bool
    truncated: bool
    layer_types: list[str] = field(default_factory=list)

    def ball(self) -> set[int]:
        return {u for layer in self.layers for u in layer}


def default_node_cap(n: int) -> int:
    return max(1, math.ceil(math.log(max(n, 2)) ** 2))


def bfs_layers(
    G: FactorGraph, w: int, depth: int, node_cap: int | None = None
) -> LayeredNeighborhood:
    """Distance layers ``D_0(w) .. D_depth(w)``.

    Exploration stops with ``truncated=True`` as soon as the ball would hold
    more than ``node_cap`` nodes (default ``ceil((log n)^2)``).  ``is_tree``
    says whether the induced subgraph on the explored ball is acyclic, with
    parallel incidences counted as a 2-cycle.
    """
    G._check(w)
    if depth < 1:
        raise InvalidParams("depth must be >= 1")
    cap = default_node_cap(G.n) if node_cap is None else node_cap
    if cap < 1:
        raise InvalidParams("node_cap must be >= 1")

    dist = {w: 0}
    parent: dict[int, int] = {}
    children: dict[int, list[int]] = {w: []}
    layers = [[w]]
    truncated = False
    for t in range(1, depth + 1):
        nxt: list[int] = []
        for u in layers[-1]:
            for x in G.neighbors(u):
                if x not in dist:
                    if len(dist) >= cap:
                        truncated = True
                        break
                    dist[x] = t
                    parent[x] = u
                    children[x] = []
                    nxt.append(x)
                if dist[x] == t:
                    children[u].append(x)
            if truncated:
                break
        if nxt:
            layers.append(nxt)
        if truncated or not nxt:
            break
    while len(layers) < depth + 1:
        layers.append([])

    # acyclic and connected  <=>  |E(ball)| == |ball| - 1
    ball_edges = 0
    for u in dist:
        ball_edges += sum(1 for x in G.neighbors(u) if x in dist)
    is_tree = ball_edges // 2 == len(dist) - 1

    kinds = ["factor", "variable"] if G.is_factor(w) else ["variable", "factor"]
    layer_types = [kinds[i % 2] for i in range(depth + 1)]
    return LayeredNeighborhood(
        root=w,
        depth=depth,
        layers=layers,
        parent=parent,
        children=children,
        is_tree=is_tree,
        truncated=truncated,
        layer_types=layer_types,
    )
