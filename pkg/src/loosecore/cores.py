"""Peeling, reduced/padded/loose cores and the CoreConstruct procedure."""

from __future__ import annotations

import csv
from collections import deque
from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np

from .errors import InvalidParams, MismatchedInput, TruncatedNeighborhood
from .factor_graph import FactorGraph, LayeredNeighborhood, bfs_layers
from .hypergraph import Hypergraph


@dataclass(frozen=True)
class PeelState:
    """Snapshot ``G_round`` of the synchronous peeling process.

    ``degrees`` has one entry per node (variables first, then factors);
    ``alive`` has one flag per incidence; ``disabled_round[u]`` is the round
    in which ``u`` had degree one and lost its edges (0 if never).
    """

    graph: FactorGraph
    degrees: np.ndarray
    alive: np.ndarray
    disabled_round: np.ndarray
    round: int = 0
    fixpoint: bool = False

    @classmethod
    def initial(cls, G: FactorGraph) -> PeelState:
        return cls(
            graph=G,
            degrees=G.degrees(),
            alive=np.ones(G.m * G.r, dtype=bool),
            disabled_round=np.zeros(G.node_count, dtype=np.int64),
        )


def peel_round(state: PeelState) -> PeelState:
    """One synchronous round: every node of degree exactly one loses its edges.

    The degree-one set is fixed before any edge is removed, so both ends of an
    isolated incidence are disabled in the same round.
    """
    G = state.graph
    ones = state.degrees == 1
    rnd = state.round + 1
    if not ones.any():
        return replace(state, round=rnd, fixpoint=True)
    kill = state.alive & (ones[G.inc_var] | ones[G.n + G.inc_fac])
    alive = state.alive & ~kill
    lost = np.concatenate(
        [
            np.bincount(G.inc_var[kill], minlength=G.n),
            np.bincount(G.inc_fac[kill], minlength=G.m),
        ]
    )
    disabled = state.disabled_round.copy()
    disabled[ones] = rnd
    return PeelState(G, state.degrees - lost, alive, disabled, rnd, False)


@dataclass
class CoreResult:
    """Degrees in the reduced core and, once padded, in the padded core.

    ``degrees`` covers every node of the factor graph; isolated nodes are kept
    with degree 0.  ``rounds`` is the first ``i`` with ``G_i`` equal to the
    reduced core (0 when nothing peels).  ``disabled_round`` is only filled by
    the synchronous peeler.
    """

    n: int
    m: int
    degrees: np.ndarray
    rounds: int | None = None
    disabled_round: np.ndarray | None = None
    padded_degrees: np.ndarray | None = None

    @property
    def node_count(self) -> int:
        return self.n + self.m

    @property
    def variable_degrees(self) -> np.ndarray:
        return self.degrees[: self.n]

    @property
    def factor_degrees(self) -> np.ndarray:
        return self.degrees[self.n :]

    @property
    def padded_variable_degrees(self) -> np.ndarray:
        if self.padded_degrees is None:
            raise ValueError("padded core not computed; call padded_core_from_reduced")
        return self.padded_degrees[: self.n]

    @property
    def padded_factor_degrees(self) -> np.ndarray:
        if self.padded_degrees is None:
            raise ValueError("padded core not computed; call padded_core_from_reduced")
        return self.padded_degrees[self.n :]

    def core_factors(self) -> np.ndarray:
        """Indices (0-based, into the factor list) of non-isolated factors."""
        return np.flatnonzero(self.factor_degrees > 0)

    def nonisolated_counts(self) -> tuple[int, int]:
        return int(np.count_nonzero(self.variable_degrees)), int(
            np.count_nonzero(self.factor_degrees)
        )


def _peel_synchronous(G: FactorGraph, max_rounds: int | None = None) -> PeelState:
    state = PeelState.initial(G)
    while not state.fixpoint and (max_rounds is None or state.round < max_rounds):
        state = peel_round(state)
    return state


def _peel_queue(G: FactorGraph) -> np.ndarray:
    deg = G.degrees().tolist()
    alive = np.ones(G.m * G.r, dtype=bool)
    n, r = G.n, G.r
    inc_var = G.inc_var.tolist()
    var_ptr = G.var_ptr.tolist()
    var_inc = G.var_inc.tolist()
    queue = deque(u for u, k in enumerate(deg) if k == 1)
    while queue:
        u = queue.popleft()
        if deg[u] != 1:
            continue
        if u < n:
            incs = var_inc[var_ptr[u] : var_ptr[u + 1]]
        else:
            a = u - n
            incs = range(a * r, a * r + r)
        for e in incs:
            if not alive[e]:
                continue
            alive[e] = False
            other = n + e // r if u < n else inc_var[e]
            deg[u] -= 1
            deg[other] -= 1
            if deg[other] == 1:
                queue.append(other)
    return np.array(deg, dtype=np.int64)


def reduced_core(G: FactorGraph, mode: str = "synchronous") -> CoreResult:
    """Maximal subgraph without degree-one nodes, keeping every node.

    ``mode="synchronous"`` runs :func:`peel_round` to the fixpoint and keeps the
    round labels; ``mode="queue"`` is a worklist peeler that only reports the
    final degrees.
    """
    if mode == "synchronous":
        state = _peel_synchronous(G)
        # the last round is the one that detected the fixpoint
        return CoreResult(
            G.n, G.m, state.degrees, rounds=state.round - 1, disabled_round=state.disabled_round
        )
    if mode == "queue":
        return CoreResult(G.n, G.m, _peel_queue(G))
    raise InvalidParams(f"unknown peeling mode {mode!r}")


def peeled_degrees(G: FactorGraph, rounds: int) -> np.ndarray:
    """Node degrees in ``G_rounds``."""
    if rounds < 0:
        raise InvalidParams("round index must be >= 0")
    return _peel_synchronous(G, max_rounds=rounds).degrees


def degree_histograms(G: FactorGraph, degrees: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Proportions of variable and factor nodes at each degree.

    With no factor nodes the factor histogram is taken to be a point mass at 0.
    """
    var = np.bincount(degrees[: G.n], minlength=1) / max(G.n, 1)
    if G.m == 0:
        fac = np.array([1.0])
    else:
        fac = np.bincount(degrees[G.n :], minlength=G.r + 1) / G.m
    return var, fac


def degrees_after_round(G: FactorGraph, rounds: int) -> tuple[np.ndarray, np.ndarray]:
    return degree_histograms(G, peeled_degrees(G, rounds))


def padded_core_from_reduced(G: FactorGraph, R: CoreResult) -> CoreResult:
    """Add back every original edge of each factor that survives in ``R``."""
    if R.n != G.n or R.m != G.m:
        raise MismatchedInput(
            f"core has (n={R.n}, m={R.m}) but graph has (n={G.n}, m={G.m})"
        )
    keep = R.factor_degrees > 0
    var_deg = np.bincount(G.factors[keep].ravel(), minlength=G.n)
    fac_deg = np.where(keep, G.r, 0)
    return replace(R, padded_degrees=np.concatenate([var_deg, fac_deg]).astype(np.int64))


def loose_core_from_padded(G: FactorGraph, P: CoreResult) -> Hypergraph:
    """Hypergraph whose edges are the non-isolated factors of the padded core."""
    if P.padded_degrees is None:
        P = padded_core_from_reduced(G, P)
    return Hypergraph(G.n, G.r, G.factors[P.padded_factor_degrees > 0])


def loose_core_direct(H: Hypergraph, mode: str = "batch") -> Hypergraph:
    """Delete edges with connection number below 2 until none is left.

    The result keeps the vertex range ``0 .. n-1`` so labels stay comparable;
    its vertex set in the hypergraph sense is ``result.support()``.  With
    ``mode="single"`` one offending edge (the lowest index) goes per pass.
    """
    if mode not in ("batch", "single"):
        raise InvalidParams(f"unknown deletion mode {mode!r}")
    edges = H.edges
    alive = np.ones(H.m, dtype=bool)
    while alive.any():
        deg = np.bincount(edges[alive].ravel(), minlength=H.n)
        kappa = (deg[edges] >= 2).sum(axis=1)
        bad = alive & (kappa < 2)
        if not bad.any():
            break
        if mode == "single":
            first = np.flatnonzero(bad)[0]
            bad = np.zeros_like(bad)
            bad[first] = True
        alive &= ~bad
    return H.subhypergraph(alive)


class CoreConstructResult(NamedTuple):
    d_star: int
    d_tilde: int
    surviving: list[list[int]]


def core_construct(rounds: int, nbhd: LayeredNeighborhood) -> CoreConstructResult:
    """Bottom-up deletion of childless nodes in a depth ``rounds + 1`` ball.

    ``surviving[i]`` is ``D*_i``; ``d_star`` is the number of surviving
    children of the root and ``d_tilde`` is the same with 1 mapped to 0.
    """
    if nbhd.truncated:
        raise TruncatedNeighborhood("neighbourhood exploration was truncated")
    if rounds < 0 or nbhd.depth < rounds + 1:
        raise InvalidParams(f"need a neighbourhood of depth >= {rounds + 1}")
    layers = nbhd.layers[: rounds + 2]
    surviving: list[list[int]] = [[] for _ in layers]
    surviving[-1] = list(layers[-1])
    for i in range(1, rounds + 1):
        level = rounds - i + 1
        below = set(surviving[level + 1])
        surviving[level] = [
            v for v in layers[level] if any(c in below for c in nbhd.children.get(v, ()))
        ]
    surviving[0] = list(layers[0])
    d_star = len(surviving[1]) if rounds >= 1 else len(layers[1])
    return CoreConstructResult(d_star, 0 if d_star == 1 else d_star, surviving)


@dataclass(frozen=True)
class ConstructCheck:
    node: int
    rounds: int
    applicable: bool
    peeled_degree: int
    d_star: int | None = None
    holds: bool | None = None


def verify_core_construct(
    G: FactorGraph, w: int, rounds: int, degrees_at_round: np.ndarray | None = None
) -> ConstructCheck:
    """Compare the degree of ``w`` in ``G_rounds`` with CoreConstruct's output.

    On an acyclic ball of radius ``rounds + 1`` the two agree, except that a
    CoreConstruct value of 1 only bounds the peeled degree from above.  Pass
    ``degrees_at_round`` to reuse one peeling run across many roots.
    """
    if rounds < 1:
        raise InvalidParams("rounds must be >= 1")
    if degrees_at_round is None:
        degrees_at_round = peeled_degrees(G, rounds)
    peeled = int(degrees_at_round[w])
    nbhd = bfs_layers(G, w, rounds + 1, node_cap=G.node_count)
    if not nbhd.is_tree:
        return ConstructCheck(w, rounds, False, peeled)
    d_star = core_construct(rounds, nbhd).d_star
    holds = peeled <= 1 if d_star == 1 else peeled == d_star
    return ConstructCheck(w, rounds, True, peeled, d_star, holds)


def write_round_labels(G: FactorGraph, R: CoreResult, path) -> None:
    """CSV with header ``node_id,node_type,round_disabled``."""
    if R.disabled_round is None:
        raise ValueError("round labels need the synchronous peeler")
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["node_id", "node_type", "round_disabled"])
        for u, rnd in enumerate(R.disabled_round.tolist()):
            out.writerow([u, G.node_type(u), rnd])
