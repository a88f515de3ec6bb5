"""Server-side geometry for the overview map and the orchard panels.

Everything here is pure data for a renderer: a joint 2D projection of
every (firm, timestamp) pair for the overview, and per-focal-firm berry
panels with supplier groups left and customer groups right. No client
is expected to recompute any of these numbers.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import InvalidConfig
from .explain import Predictor, group_soils, influence_ratio, shapley
from .metrics import performance
from .model import CompanyId, Timeline, customers_in, suppliers_in

log = logging.getLogger(__name__)

LAYOUT_VERSION = "layout/v1"


def embedding_rows(timeline: Timeline) -> tuple[np.ndarray, list[tuple[CompanyId, int]]]:
    """One row per (firm, timestamp): own features, mean supplier and
    mean customer features, and log-scaled partner counts."""
    dataset = timeline.dataset
    ids = list(dataset.company_ids)
    feats = dataset.feature_names
    keys: list[tuple[CompanyId, int]] = []
    rows: list[list[float]] = []
    for t in range(len(timeline.edges_by_t)):
        edges = timeline.edges_at(t)
        features = timeline.features_at(t)
        for cid in ids:
            own = [features[cid][f] for f in feats]
            sup = sorted(suppliers_in(edges, cid))
            cus = sorted(customers_in(edges, cid))
            sup_mean = (
                [float(np.mean([features[s][f] for s in sup])) for f in feats]
                if sup
                else [0.0] * len(feats)
            )
            cus_mean = (
                [float(np.mean([features[c][f] for c in cus])) for f in feats]
                if cus
                else [0.0] * len(feats)
            )
            rows.append(
                own + sup_mean + cus_mean + [math.log1p(len(sup)), math.log1p(len(cus))]
            )
            keys.append((cid, t))
    return np.asarray(rows, dtype=float), keys


def principal_projection(X: np.ndarray) -> tuple[np.ndarray, bool]:
    """Standardize, drop constant columns, and project onto the top two
    principal components with a fixed sign convention.

    Each component is flipped so its largest-magnitude loading is
    positive, which pins the otherwise arbitrary eigenvector signs.
    Returns (coords, degenerate); degenerate inputs (all rows equal)
    give all-zero coordinates.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] < 2:
        raise InvalidConfig("need at least two rows to embed")
    mu = X.mean(axis=0)
    sd = X.std(axis=0)
    keep = sd > 1e-12
    if not keep.any():
        return np.zeros((X.shape[0], 2)), True
    Z = (X[:, keep] - mu[keep]) / sd[keep]
    cov = Z.T @ Z / Z.shape[0]
    eigvals, eigvecs = np.linalg.eigh(cov)
    order = np.argsort(eigvals)[::-1][:2]
    W = eigvecs[:, order]
    for j in range(W.shape[1]):
        i = int(np.argmax(np.abs(W[:, j])))
        if W[i, j] < 0:
            W[:, j] = -W[:, j]
    coords = Z @ W
    if coords.shape[1] < 2:
        coords = np.hstack([coords, np.zeros((coords.shape[0], 1))])
    return coords, False


@dataclass(frozen=True)
class GlobalEmbedding:
    coords: Mapping[tuple[CompanyId, int], tuple[float, float]]
    labels: tuple[str, ...]
    degenerate: bool = False

    def to_doc(self) -> dict:
        panels = []
        for t, label in enumerate(self.labels):
            pts = {
                cid: xy for (cid, pt), xy in self.coords.items() if pt == t
            }
            xs = [xy[0] for xy in pts.values()]
            ys = [xy[1] for xy in pts.values()]

            def norm(v: float, lo: float, hi: float) -> float:
                return 0.5 if hi <= lo else (v - lo) / (hi - lo)

            panels.append(
                {
                    "t": t,
                    "label": label,
                    "points": [
                        {
                            "companyId": cid,
                            "x": norm(x, min(xs), max(xs)),
                            "y": norm(y, min(ys), max(ys)),
                        }
                        for cid, (x, y) in sorted(pts.items())
                    ],
                }
            )
        return {"version": LAYOUT_VERSION, "degenerate": self.degenerate, "panels": panels}


def global_embedding(timeline: Timeline) -> GlobalEmbedding:
    X, keys = embedding_rows(timeline)
    coords, degenerate = principal_projection(X)
    if degenerate:
        log.warning("embedding input is degenerate; all coordinates zeroed")
    return GlobalEmbedding(
        coords={key: (float(x), float(y)) for key, (x, y) in zip(keys, coords)},
        labels=timeline.labels,
        degenerate=degenerate,
    )


@dataclass(frozen=True)
class Berry:
    company_id: CompanyId
    vertical: float  # performance, min-max normalized per timestamp
    horizontal: float  # signed attribution offset in [-1, 1]; +1 = nearest
    lifecycle: str
    missing_attribution: bool = False

    def to_doc(self) -> dict:
        return {
            "companyId": self.company_id,
            "vertical": self.vertical,
            "horizontal": self.horizontal,
            "lifecycle": self.lifecycle,
            "missingAttribution": self.missing_attribution,
        }


@dataclass(frozen=True)
class BerryGroup:
    side: str
    industry: str
    berries: tuple[Berry, ...]
    soil_mean_performance: float
    soil_contribution: float
    soil_magnitude: float

    def to_doc(self) -> dict:
        return {
            "side": self.side,
            "industry": self.industry,
            "berries": [b.to_doc() for b in self.berries],
            "soil": {
                "meanPerformance": self.soil_mean_performance,
                "focalContribution": self.soil_contribution,
                "magnitude": self.soil_magnitude,
            },
        }


@dataclass(frozen=True)
class FocalPanel:
    company_id: CompanyId
    t: int
    label: str
    performance_radius: float
    feature_arcs: Mapping[str, float]
    x_position: float
    supplier_groups: tuple[BerryGroup, ...]
    customer_groups: tuple[BerryGroup, ...]
    missing_attribution: bool = False

    def to_doc(self) -> dict:
        return {
            "companyId": self.company_id,
            "t": self.t,
            "label": self.label,
            "focal": {
                "performanceRadius": self.performance_radius,
                "featureArcs": dict(self.feature_arcs),
                "xPosition": self.x_position,
            },
            "supplierGroups": [g.to_doc() for g in self.supplier_groups],
            "customerGroups": [g.to_doc() for g in self.customer_groups],
            "missingAttribution": self.missing_attribution,
        }


@dataclass(frozen=True)
class FocusLayout:
    panels: tuple[FocalPanel, ...]
    shared_supplier_links: tuple[tuple[int, CompanyId, CompanyId, CompanyId], ...]

    def to_doc(self) -> dict:
        return {
            "version": LAYOUT_VERSION,
            "panels": [p.to_doc() for p in self.panels],
            "sharedSupplierLinks": [
                {"t": t, "focalA": a, "focalB": b, "supplierId": s}
                for t, a, b, s in self.shared_supplier_links
            ],
        }


def _normalize_performance(perf: Mapping[CompanyId, float]) -> dict[CompanyId, float]:
    values = list(perf.values())
    lo, hi = min(values), max(values)
    if hi <= lo:
        return dict.fromkeys(perf, 0.5)
    return {cid: (v - lo) / (hi - lo) for cid, v in perf.items()}


def _side_offsets(
    partner_ids: Sequence[CompanyId], attribution, space
) -> dict[CompanyId, float]:
    """Signed berry offsets, scaled so the largest |phi| on the side is 1."""
    phis = {
        cid: attribution.of(space.partner_feature(cid)) for cid in partner_ids
    }
    scale = max((abs(v) for v in phis.values()), default=0.0)
    if scale == 0.0:
        return dict.fromkeys(partner_ids, 0.0)
    return {cid: v / scale for cid, v in phis.items()}


def focus_layout(
    timeline: Timeline,
    focal_ids: Sequence[CompanyId],
    predictors: Mapping[CompanyId, Predictor],
    t_range: Sequence[int] | None = None,
    metric: str = "pagerank",
) -> FocusLayout:
    """Berry-orchard geometry for the given focal firms.

    ``predictors`` holds one fitted per-firm performance model per
    company id; a focal firm without one gets its berries parked at
    offset 0 and the panel flagged. Berry verticals and the focal
    radius share one per-timestamp normalization of the performance
    metric over all firms.
    """
    dataset = timeline.dataset
    for cid in focal_ids:
        dataset.company(cid)
    if t_range is None:
        t_range = range(len(timeline.edges_by_t))
    panels: list[FocalPanel] = []
    links: list[tuple[int, CompanyId, CompanyId, CompanyId]] = []

    for t in t_range:
        edges = timeline.edges_at(t)
        features = timeline.features_at(t)
        norm_perf = _normalize_performance(
            performance(edges, dataset.company_ids, metric)
        )
        for focal in focal_ids:
            suppliers = sorted(suppliers_in(edges, focal))
            customers = sorted(customers_in(edges, focal))
            predictor = predictors.get(focal)
            if predictor is None:
                log.warning("no predictor for focal %s at t=%d", focal, t)
                attribution = None
                x_position = 0.5 if suppliers and customers else (0.0 if suppliers else 1.0 if customers else 0.5)
            else:
                x = predictor.space.row(features[focal], edges)
                attribution = shapley(predictor, x)
                x_position = influence_ratio(
                    attribution, predictor.space, suppliers, customers
                )

            soils = group_soils(timeline, predictors, focal, t, metric)

            def side_groups(side: str, partner_ids: list[CompanyId]) -> tuple[BerryGroup, ...]:
                if attribution is not None:
                    offsets = _side_offsets(partner_ids, attribution, predictor.space)
                else:
                    offsets = dict.fromkeys(partner_ids, 0.0)
                grouped: dict[str, list[CompanyId]] = {}
                for cid in partner_ids:
                    grouped.setdefault(dataset.companies[cid].industry, []).append(cid)
                out = []
                for industry in sorted(grouped):
                    members = grouped[industry]
                    soil = soils.get((side, industry))
                    berries = tuple(
                        Berry(
                            company_id=cid,
                            vertical=norm_perf[cid],
                            horizontal=offsets[cid],
                            lifecycle=timeline.lifecycle(
                                (cid, focal) if side == "supplier" else (focal, cid), t
                            ).value,
                            missing_attribution=attribution is None,
                        )
                        for cid in members
                    )
                    out.append(
                        BerryGroup(
                            side=side,
                            industry=industry,
                            berries=berries,
                            soil_mean_performance=soil.group_mean_performance if soil else 0.0,
                            soil_contribution=soil.focal_contribution if soil else 0.0,
                            soil_magnitude=soil.magnitude if soil else 0.0,
                        )
                    )
                return tuple(out)

            panels.append(
                FocalPanel(
                    company_id=focal,
                    t=t,
                    label=timeline.labels[t],
                    performance_radius=norm_perf[focal],
                    feature_arcs={
                        f: features[focal][f] / 100.0 for f in dataset.feature_names
                    },
                    x_position=x_position,
                    supplier_groups=side_groups("supplier", suppliers),
                    customer_groups=side_groups("customer", customers),
                    missing_attribution=attribution is None,
                )
            )
        for i, a in enumerate(focal_ids):
            for b in focal_ids[i + 1 :]:
                shared = suppliers_in(edges, a) & suppliers_in(edges, b)
                links.extend((t, a, b, s) for s in sorted(shared))

    return FocusLayout(panels=tuple(panels), shared_supplier_links=tuple(links))
