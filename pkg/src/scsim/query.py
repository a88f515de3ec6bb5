"""Candidate search: filter by industry, score by weighted features.

Scores are weighted sums of min-max normalized feature values, where the
normalization pool is exactly the set of firms matching the query (after
exclusions). A feature that is constant across the pool normalizes to
0.5 for everyone so it neither helps nor hurts.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import AbstractSet, Iterable, Mapping

from .errors import NonFiniteValue, UnknownFeature
from .model import CompanyId, Edge, FeatureVector, partners_in

log = logging.getLogger(__name__)

DEFAULT_K = 5


@dataclass(frozen=True)
class QueryConstraint:
    """What to search for: industries (empty = any) and feature weights.

    Weights may be negative: a negative weight penalizes large values of
    that feature. Only the listed features enter the score.
    """

    industry_set: tuple[str, ...] = ()
    weighted_scores: tuple[tuple[str, float], ...] = ()


@dataclass(frozen=True)
class Candidate:
    company_id: CompanyId
    score: float


def exclusion_set(edges: Iterable[Edge], company_id: CompanyId) -> frozenset[CompanyId]:
    """The querying firm plus its current partners on either side."""
    return partners_in(edges, company_id) | {company_id}


def query_candidates(
    features: Mapping[CompanyId, FeatureVector],
    industries: Mapping[CompanyId, str],
    feature_names: AbstractSet[str] | Iterable[str],
    constraint: QueryConstraint,
    exclude: AbstractSet[CompanyId] = frozenset(),
    k: int = DEFAULT_K,
) -> list[Candidate]:
    """Top-k firms by constraint score, ties broken by ascending id.

    An empty pool (every firm excluded or filtered out) returns an empty
    list; it is logged, not raised, so a turn is never aborted by an
    over-constrained query.
    """
    if k < 1:
        raise ValueError(f"k must be at least 1, got {k}")
    known = set(feature_names)
    for name, weight in constraint.weighted_scores:
        if name not in known:
            raise UnknownFeature(f"{name!r}; known: {sorted(known)}")
        if not math.isfinite(weight):
            raise NonFiniteValue(f"weight for {name!r} is {weight}")

    wanted = set(constraint.industry_set)
    pool = [
        cid
        for cid in sorted(features)
        if cid not in exclude and (not wanted or industries.get(cid) in wanted)
    ]
    if not pool:
        log.info("query produced an empty pool (industries=%s)", constraint.industry_set)
        return []

    # min-max normalize per feature over this pool only
    normalized: dict[str, dict[CompanyId, float]] = {}
    for name, _ in constraint.weighted_scores:
        values = {cid: float(features[cid][name]) for cid in pool}
        lo, hi = min(values.values()), max(values.values())
        if hi == lo:
            normalized[name] = {cid: 0.5 for cid in pool}
        else:
            normalized[name] = {cid: (v - lo) / (hi - lo) for cid, v in values.items()}

    scores = {
        cid: sum(weight * normalized[name][cid] for name, weight in constraint.weighted_scores)
        for cid in pool
    }
    ranked = sorted(pool, key=lambda cid: (-scores[cid], cid))
    return [Candidate(cid, scores[cid]) for cid in ranked[:k]]


def query_candidates_at(
    timeline,
    t: int,
    constraint: QueryConstraint,
    exclude: AbstractSet[CompanyId] = frozenset(),
    k: int = DEFAULT_K,
) -> list[Candidate]:
    features = timeline.features_at(t)
    industries = {cid: timeline.dataset.companies[cid].industry for cid in features}
    return query_candidates(
        features, industries, timeline.dataset.feature_names, constraint, exclude, k
    )
