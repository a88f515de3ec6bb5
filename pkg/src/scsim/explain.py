"""Per-firm performance models and Shapley-style attributions.

A focal firm's feature space is its own feature values plus its degree
counts plus one binary presence flag per firm that ever neighbors it
across the timeline. The fitted model maps those to a performance
metric; attributions explain one timestamp's prediction against the
training-mean baseline.

For additive models (linear, lasso) the Shapley value has the closed
form phi_i = coef_i * (x_i - mean_i). Other models get a
permutation-sampling estimate with a fixed seed. Either way the
attributions satisfy efficiency: base + sum(phi) equals the prediction.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import DimensionMismatch, TooFewSamples
from .metrics import performance
from .model import CompanyId, customers_in, suppliers_in
from .regression import ADDITIVE_KINDS, loo_lambda, make_model

log = logging.getLogger(__name__)

SHAPLEY_SAMPLES = 2048
SHAPLEY_SEED = 20240

PARTNER_PREFIX = "partner:"


@dataclass(frozen=True)
class ExplainFeatureSpace:
    """Column layout of one firm's design matrix."""

    focal_id: CompanyId
    own_features: tuple[str, ...]
    partner_ids: tuple[CompanyId, ...]

    @property
    def names(self) -> tuple[str, ...]:
        return (
            self.own_features
            + ("supplier_count", "customer_count")
            + tuple(PARTNER_PREFIX + cid for cid in self.partner_ids)
        )

    def partner_feature(self, company_id: CompanyId) -> str:
        return PARTNER_PREFIX + company_id

    def row(self, features: Mapping[str, float], edges) -> np.ndarray:
        suppliers = suppliers_in(edges, self.focal_id)
        customers = customers_in(edges, self.focal_id)
        partners = suppliers | customers
        values = [float(features[name]) for name in self.own_features]
        values.append(float(len(suppliers)))
        values.append(float(len(customers)))
        values.extend(1.0 if cid in partners else 0.0 for cid in self.partner_ids)
        return np.array(values)


def build_design_matrix(
    timeline,
    focal_id: CompanyId,
    timestamps: Sequence[int] | None = None,
    metric: str = "pagerank",
) -> tuple[np.ndarray, np.ndarray, ExplainFeatureSpace]:
    """One row per timestamp; target is the focal firm's metric value."""
    timeline.dataset.company(focal_id)
    if timestamps is None:
        timestamps = range(timeline.n_timestamps)
    timestamps = list(timestamps)
    if len(timestamps) < 3:
        raise TooFewSamples(f"need at least 3 timestamps, got {len(timestamps)}")

    ever_partners: set[CompanyId] = set()
    for t in timestamps:
        edges = timeline.edges_at(t)
        ever_partners |= suppliers_in(edges, focal_id) | customers_in(edges, focal_id)
    space = ExplainFeatureSpace(
        focal_id=focal_id,
        own_features=timeline.dataset.feature_names,
        partner_ids=tuple(sorted(ever_partners)),
    )

    rows, targets = [], []
    all_ids = timeline.dataset.company_ids
    for t in timestamps:
        edges = timeline.edges_at(t)
        rows.append(space.row(timeline.features_at(t)[focal_id], edges))
        targets.append(performance(edges, all_ids, metric)[focal_id])
    return np.stack(rows), np.array(targets), space


@dataclass
class Predictor:
    """A fitted explain model plus everything attribution needs."""

    kind: str
    model: object
    space: ExplainFeatureSpace
    feature_means: np.ndarray
    metric: str
    lam: float | None = None

    @property
    def additive(self) -> bool:
        return self.kind in ADDITIVE_KINDS

    def predict_row(self, x: np.ndarray) -> float:
        return float(self.model.predict(np.asarray(x, dtype=float).reshape(1, -1))[0])


def fit_explainer(
    X,
    y,
    space: ExplainFeatureSpace,
    kind: str = "lasso",
    lam: float | None = None,
    seed: int | None = None,
    metric: str = "pagerank",
) -> Predictor:
    """Fit one firm's performance model.

    For the lasso, ``lam=None`` selects lambda by leave-one-out error
    over the default grid.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float).ravel()
    if X.shape[0] < 3:
        raise TooFewSamples(f"need at least 3 rows, got {X.shape[0]}")
    if X.shape[1] != len(space.names):
        raise DimensionMismatch(f"X has {X.shape[1]} columns, space has {len(space.names)}")
    if kind == "lasso" and lam is None:
        lam = loo_lambda(X, y)
    model = make_model(kind, lam=lam, seed=seed).fit(X, y)
    return Predictor(
        kind=kind,
        model=model,
        space=space,
        feature_means=X.mean(axis=0),
        metric=metric,
        lam=lam,
    )


def fit_firm_explainer(
    timeline,
    focal_id: CompanyId,
    kind: str = "lasso",
    lam: float | None = None,
    seed: int | None = None,
    metric: str = "pagerank",
    timestamps: Sequence[int] | None = None,
) -> Predictor:
    X, y, space = build_design_matrix(timeline, focal_id, timestamps, metric)
    return fit_explainer(X, y, space, kind=kind, lam=lam, seed=seed, metric=metric)


@dataclass(frozen=True)
class Attribution:
    base_value: float
    phi: Mapping[str, float]
    prediction: float

    def of(self, name: str) -> float:
        return self.phi.get(name, 0.0)


def shapley(
    predictor: Predictor,
    x: np.ndarray,
    baseline: np.ndarray | None = None,
    m: int = SHAPLEY_SAMPLES,
    seed: int = SHAPLEY_SEED,
) -> Attribution:
    """Shapley attribution of ``predictor`` at row ``x`` vs ``baseline``.

    Baseline defaults to training column means. Additive models use the
    exact closed form; others average marginal contributions over ``m``
    feature permutations drawn with a fixed seed, which keeps efficiency
    exact because each permutation telescopes from f(baseline) to f(x).
    """
    x = np.asarray(x, dtype=float).ravel()
    names = predictor.space.names
    if len(x) != len(names):
        raise DimensionMismatch(f"x has {len(x)} entries, space has {len(names)}")
    if baseline is None:
        baseline = predictor.feature_means
    baseline = np.asarray(baseline, dtype=float).ravel()
    if len(baseline) != len(names):
        raise DimensionMismatch(f"baseline has {len(baseline)} entries, space has {len(names)}")

    prediction = predictor.predict_row(x)
    base_value = predictor.predict_row(baseline)

    if predictor.additive:
        coef = np.asarray(predictor.model.coef_, dtype=float)
        phi = coef * (x - baseline)
        return Attribution(base_value, dict(zip(names, map(float, phi))), prediction)

    n = len(names)
    rng = np.random.default_rng(seed)
    totals = np.zeros(n)
    for _ in range(m):
        order = rng.permutation(n)
        current = baseline.copy()
        prev = base_value
        # walk the permutation, flipping one coordinate to x at a time
        batch = np.empty((n, n))
        for step, j in enumerate(order):
            current[j] = x[j]
            batch[step] = current
        values = predictor.model.predict(batch)
        for step, j in enumerate(order):
            totals[j] += float(values[step]) - prev
            prev = float(values[step])
    phi = totals / m
    return Attribution(base_value, dict(zip(names, map(float, phi))), prediction)


def influence_ratio(
    attribution: Attribution,
    space: ExplainFeatureSpace,
    suppliers: Sequence[CompanyId],
    customers: Sequence[CompanyId],
) -> float:
    """Customer share of absolute partner attributions, in [0, 1].

    0 means fully supplier-driven, 1 fully customer-driven, 0.5 when
    there is no partner signal at all.
    """
    s = sum(abs(attribution.of(space.partner_feature(cid))) for cid in suppliers)
    c = sum(abs(attribution.of(space.partner_feature(cid))) for cid in customers)
    if s + c == 0.0:
        return 0.5
    return c / (s + c)


@dataclass(frozen=True)
class SoilSummary:
    """Aggregated influence of a focal firm on one partner group."""

    side: str  # "supplier" or "customer"
    industry: str
    members: tuple[CompanyId, ...]
    group_mean_performance: float
    focal_contribution: float
    magnitude: float  # |contribution| / max over the focal firm's groups


def group_soil(
    timeline,
    predictors: Mapping[CompanyId, Predictor],
    focal_id: CompanyId,
    side: str,
    industry: str,
    members: Sequence[CompanyId],
    t: int,
    metric: str = "pagerank",
    scale: float | None = None,
) -> SoilSummary:
    """Soil for one partner group: how much the focal firm moves its members.

    The contribution is the mean, over members with a fitted predictor,
    of the focal firm's presence-feature attribution inside the member's
    own model at ``t``. Members without a predictor are skipped and
    logged; a focal firm absent from every member's feature space
    contributes 0. ``scale`` is the max |contribution| across all of the
    focal firm's groups at ``t`` (used to normalize ``magnitude``).
    """
    edges = timeline.edges_at(t)
    perf = performance(edges, timeline.dataset.company_ids, metric)
    contributions = []
    for member in members:
        predictor = predictors.get(member)
        if predictor is None:
            log.info("no predictor for %s; skipped in soil of %s", member, focal_id)
            continue
        feature = predictor.space.partner_feature(focal_id)
        if feature not in predictor.space.names:
            contributions.append(0.0)
            continue
        x = predictor.space.row(timeline.features_at(t)[member], edges)
        contributions.append(shapley(predictor, x).of(feature))
    contribution = float(np.mean(contributions)) if contributions else 0.0
    if scale is None:
        scale = abs(contribution)
    magnitude = 0.0 if scale == 0.0 else min(abs(contribution) / scale, 1.0)
    return SoilSummary(
        side=side,
        industry=industry,
        members=tuple(members),
        group_mean_performance=float(np.mean([perf[m] for m in members])) if members else 0.0,
        focal_contribution=contribution,
        magnitude=magnitude,
    )


def group_soils(
    timeline,
    predictors: Mapping[CompanyId, Predictor],
    focal_id: CompanyId,
    t: int,
    metric: str = "pagerank",
) -> dict[tuple[str, str], SoilSummary]:
    """Soil for every (side, industry) partner group of ``focal_id`` at ``t``.

    Magnitudes are normalized across the returned groups so the largest
    |contribution| maps to 1.
    """
    edges = timeline.edges_at(t)
    groups: dict[tuple[str, str], list[CompanyId]] = {}
    for side, ids in (
        ("supplier", suppliers_in(edges, focal_id)),
        ("customer", customers_in(edges, focal_id)),
    ):
        for cid in sorted(ids):
            industry = timeline.dataset.companies[cid].industry
            groups.setdefault((side, industry), []).append(cid)

    raw = {
        key: group_soil(timeline, predictors, focal_id, key[0], key[1], members, t, metric, scale=1.0)
        for key, members in groups.items()
    }
    scale = max((abs(s.focal_contribution) for s in raw.values()), default=0.0)
    return {
        key: SoilSummary(
            side=s.side,
            industry=s.industry,
            members=s.members,
            group_mean_performance=s.group_mean_performance,
            focal_contribution=s.focal_contribution,
            magnitude=0.0 if scale == 0.0 else min(abs(s.focal_contribution) / scale, 1.0),
        )
        for key, s in raw.items()
    }
