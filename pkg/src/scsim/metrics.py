"""Per-firm performance metrics computed on one network snapshot.

Two built-ins: collaborator count (distinct partners, either direction)
and PageRank over the directed supplier->customer graph. The registry is
open so sessions can select metrics by name.
"""

from __future__ import annotations

import logging
from typing import AbstractSet, Callable, Iterable, Mapping

import numpy as np

from .errors import EmptyNodeSet, UnknownMetric
from .model import CompanyId, Edge, partners_in

log = logging.getLogger(__name__)

PerformanceMap = dict[CompanyId, float]

PAGERANK_DAMPING = 0.85
PAGERANK_TOL = 1e-9
PAGERANK_MAX_ITER = 200


def collaborator_count(edges: Iterable[Edge], company_id: CompanyId) -> int:
    """Distinct partners of ``company_id`` counting both directions."""
    return len(partners_in(edges, company_id))


def collaborator_counts(edges: AbstractSet[Edge], nodes: Iterable[CompanyId]) -> PerformanceMap:
    nodes = sorted(nodes)
    if not nodes:
        raise EmptyNodeSet("no nodes")
    edges = set(edges)
    return {cid: float(collaborator_count(edges, cid)) for cid in nodes}


def pagerank(
    edges: AbstractSet[Edge],
    nodes: Iterable[CompanyId],
    damping: float = PAGERANK_DAMPING,
    tol: float = PAGERANK_TOL,
    max_iter: int = PAGERANK_MAX_ITER,
) -> PerformanceMap:
    """Power-iteration PageRank on the supplier->customer digraph.

    Rank flows along edges (a supplier endorses its customers). Dangling
    nodes spread their mass uniformly. Converges when the L1 change drops
    below ``tol``; hitting ``max_iter`` first is logged, not fatal.
    Scores are normalized to sum to 1.
    """
    nodes = sorted(nodes)
    if not nodes:
        raise EmptyNodeSet("no nodes")
    if not 0.0 < damping < 1.0:
        raise ValueError(f"damping must be in (0, 1), got {damping}")
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    if max_iter < 1:
        raise ValueError(f"max_iter must be at least 1, got {max_iter}")

    n = len(nodes)
    index = {cid: i for i, cid in enumerate(nodes)}
    out: list[list[int]] = [[] for _ in range(n)]
    for s, c in edges:
        if s in index and c in index and s != c:
            out[index[s]].append(index[c])

    x = np.full(n, 1.0 / n)
    base = (1.0 - damping) / n
    for _ in range(max_iter):
        nxt = np.full(n, base)
        dangling = 0.0
        for i, targets in enumerate(out):
            if targets:
                share = damping * x[i] / len(targets)
                for j in targets:
                    nxt[j] += share
            else:
                dangling += x[i]
        nxt += damping * dangling / n
        delta = float(np.abs(nxt - x).sum())
        x = nxt
        if delta < tol:
            break
    else:
        log.warning("pagerank did not converge in %d iterations (delta=%.3e)", max_iter, delta)
    x = x / x.sum()
    return {cid: float(x[index[cid]]) for cid in nodes}


METRICS: dict[str, Callable[[AbstractSet[Edge], Iterable[CompanyId]], PerformanceMap]] = {
    "collaborator_count": collaborator_counts,
    "pagerank": pagerank,
}


def performance(
    edges: AbstractSet[Edge], nodes: Iterable[CompanyId], kind: str
) -> PerformanceMap:
    try:
        fn = METRICS[kind]
    except KeyError:
        raise UnknownMetric(f"{kind!r}; known: {sorted(METRICS)}") from None
    return fn(edges, nodes)


def performance_at(timeline, kind: str, t: int) -> PerformanceMap:
    """Performance of every firm at one timeline step."""
    return performance(timeline.edges_at(t), timeline.dataset.company_ids, kind)
