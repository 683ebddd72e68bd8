"""Exact longest loose path/cycle search on small instances, and the core bound.

The searches are exponential and meant as oracles for hypergraphs with at
most a couple of dozen edges.
"""

from __future__ import annotations

from ..cores import CoreResult
from ..errors import InstanceTooLarge, MismatchedInput
from ..factor_graph import FactorGraph
from ..hypergraph import Hypergraph

DEFAULT_EDGE_CAP = 18


def certificate_bound(G: FactorGraph, R: CoreResult) -> int:
    """Upper bound on the longest loose cycle read off the reduced core.

    A loose cycle of length L is a 2L-cycle in the factor graph, so it uses
    L variable and L factor nodes that all survive peeling.
    """
    if R.n != G.n or R.m != G.m:
        raise MismatchedInput(
            f"core has (n={R.n}, m={R.m}) but graph has (n={G.n}, m={G.m})"
        )
    variables, factors = R.nonisolated_counts()
    return min(variables, factors)


def _prepare(H: Hypergraph, cap: int):
    if H.m > cap:
        raise InstanceTooLarge(f"{H.m} edges exceeds the search cap of {cap}")
    edges = [frozenset(e) for e in H.edges.tolist()]
    incident: dict[int, list[int]] = {}
    for i, e in enumerate(edges):
        for v in e:
            incident.setdefault(v, []).append(i)
    return edges, incident


def brute_force_longest_path(H: Hypergraph, cap: int = DEFAULT_EDGE_CAP) -> int:
    """Maximum number of edges in a loose path; 0 for an edgeless hypergraph."""
    edges, incident = _prepare(H, cap)
    m = len(edges)
    if m == 0:
        return 0
    best = 1

    def extend(tip: int, used: frozenset, length: int, used_edges: int) -> None:
        nonlocal best
        if length > best:
            best = length
        if best == m:
            return
        for j in incident.get(tip, ()):
            if used_edges >> j & 1:
                continue
            e = edges[j]
            if len(e & used) != 1:
                continue
            for nxt in e - {tip}:
                extend(nxt, used | e, length + 1, used_edges | 1 << j)
                if best == m:
                    return

    for i, e in enumerate(edges):
        for tip in e:
            extend(tip, e, 1, 1 << i)
            if best == m:
                return best
    return best


def brute_force_longest_cycle(H: Hypergraph, cap: int = DEFAULT_EDGE_CAP) -> int:
    """Maximum length (>= 2) of a loose cycle; 0 if there is none.

    Each cycle is generated once per rotation class by making its
    lowest-indexed edge the first one and, for length >= 3, fixing the
    orientation so the second edge has a lower index than the last.
    """
    edges, incident = _prepare(H, cap)
    best = 0

    def extend(start, first, second, tip, used, length, used_edges):
        nonlocal best
        for j in incident.get(tip, ()):
            if j <= first or used_edges >> j & 1:
                continue
            e = edges[j]
            shared = e & used
            # closing edge: meets the path exactly in its two ends
            if start in e and shared == {tip, start}:
                if length + 1 > best and (length == 1 or second < j):
                    best = length + 1
                continue
            if len(shared) != 1:
                continue
            for nxt in e - {tip}:
                extend(
                    start,
                    first,
                    j if length == 1 else second,
                    nxt,
                    used | e,
                    length + 1,
                    used_edges | 1 << j,
                )

    for i, e in enumerate(edges):
        for start in e:
            for tip in e - {start}:
                extend(start, i, -1, tip, e, 1, 1 << i)
    return best
