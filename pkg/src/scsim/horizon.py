"""Autoregressive extension of feature series beyond observed history.

Each (firm, feature) series is modeled independently: sliding windows of
the last ``w`` values predict the next one, and multi-step forecasts
iterate by appending predictions. Outputs are clamped to the feature
scale so simulated firms stay on 0-100.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import NonFiniteValue, SeriesTooShort
from .regression import make_model

log = logging.getLogger(__name__)

DEFAULT_WINDOW = 4
CLAMP = (0.0, 100.0)


@dataclass(frozen=True)
class ExtenderModel:
    kind: str
    w: int
    model: object  # fitted estimator with .predict


def fit_extender(
    series: Sequence[float],
    kind: str = "linear",
    w: int = DEFAULT_WINDOW,
    lam: float | None = None,
    seed: int | None = None,
) -> ExtenderModel:
    """Fit a one-step-ahead model on sliding windows of length ``w``.

    Needs at least ``w + 1`` points (one complete window plus target).
    """
    if w < 1:
        raise ValueError(f"w must be at least 1, got {w}")
    values = np.asarray(list(series), dtype=float)
    if not np.all(np.isfinite(values)):
        raise NonFiniteValue("series contains NaN or infinity")
    n = len(values)
    if n < w + 1:
        raise SeriesTooShort(f"need at least {w + 1} points for w={w}, got {n}")
    X = np.stack([values[i : i + w] for i in range(n - w)])
    y = values[w:]
    model = make_model(kind, lam=lam, seed=seed).fit(X, y)
    return ExtenderModel(kind=kind, w=w, model=model)


def extend(
    extender: ExtenderModel,
    series: Sequence[float],
    clamp: tuple[float, float] = CLAMP,
) -> float:
    """One-step prediction from the series tail, clamped to ``clamp``."""
    values = np.asarray(list(series), dtype=float)
    if not np.all(np.isfinite(values)):
        raise NonFiniteValue("series contains NaN or infinity")
    if len(values) < extender.w:
        raise SeriesTooShort(f"need at least {extender.w} points, got {len(values)}")
    window = values[-extender.w :].reshape(1, -1)
    pred = float(extender.model.predict(window)[0])
    lo, hi = clamp
    return min(max(pred, lo), hi)


def extend_multi(
    extender: ExtenderModel,
    series: Sequence[float],
    steps: int,
    clamp: tuple[float, float] = CLAMP,
) -> list[float]:
    """Iterate ``extend`` ``steps`` times, feeding predictions back in."""
    if steps < 0:
        raise ValueError(f"steps must be non-negative, got {steps}")
    values = list(series)
    out = []
    for _ in range(steps):
        nxt = extend(extender, values, clamp)
        out.append(nxt)
        values.append(nxt)
    return out


@dataclass(frozen=True)
class BoxStats:
    """Five-number summary with linear-interpolation quartiles."""

    minimum: float
    q1: float
    median: float
    q3: float
    maximum: float

    @classmethod
    def of(cls, samples: Sequence[float]) -> "BoxStats":
        qs = np.percentile(np.asarray(samples, dtype=float), [0, 25, 50, 75, 100], method="linear")
        return cls(*(float(v) for v in qs))

    def to_dict(self) -> dict:
        return {
            "min": self.minimum,
            "q1": self.q1,
            "median": self.median,
            "q3": self.q3,
            "max": self.maximum,
        }


@dataclass
class SelectionReport:
    """Rolling-origin comparison of extender kinds.

    ``errors[kind]`` collects absolute one-step errors over every
    (firm, feature, fold) cell; ``runtimes[kind]`` the fit+predict wall
    seconds; ``skipped`` lists cells whose training slice was too short.
    """

    kinds: tuple[str, ...]
    folds: int
    errors: dict[str, list[float]] = field(default_factory=dict)
    runtimes: dict[str, list[float]] = field(default_factory=dict)
    skipped: list[tuple[str, str, int, str]] = field(default_factory=list)

    def box_stats(self) -> dict[str, dict[str, BoxStats]]:
        out = {}
        for kind in self.kinds:
            if self.errors.get(kind):
                out[kind] = {
                    "error": BoxStats.of(self.errors[kind]),
                    "runtime": BoxStats.of(self.runtimes[kind]),
                }
        return out

    def to_doc(self) -> dict:
        return {
            "kinds": list(self.kinds),
            "folds": self.folds,
            "n_samples": {k: len(v) for k, v in self.errors.items()},
            "box": {
                kind: {name: stats.to_dict() for name, stats in per.items()}
                for kind, per in self.box_stats().items()
            },
            "skipped": [list(item) for item in self.skipped],
        }


def model_selection_report(
    timeline,
    kinds: Sequence[str] = ("linear", "lasso"),
    folds: int = 4,
    w: int = DEFAULT_WINDOW,
    lam: float | None = None,
    seed: int | None = None,
) -> SelectionReport:
    """Rolling-origin evaluation: fold j holds out the j-th point from the end.

    The window adapts to short training slices (w_eff = min(w, len-1))
    so every fold yields a sample whenever the slice has two points.
    """
    if folds < 1:
        raise ValueError(f"folds must be at least 1, got {folds}")
    report = SelectionReport(kinds=tuple(kinds), folds=folds)
    for kind in kinds:
        report.errors[kind] = []
        report.runtimes[kind] = []
    dataset = timeline.dataset
    for cid in dataset.company_ids:
        for feature in dataset.feature_names:
            series = timeline.feature_series(cid, feature)
            n = len(series)
            for j in range(1, folds + 1):
                train, target = series[: n - j], series[n - j]
                w_eff = min(w, len(train) - 1)
                if w_eff < 1:
                    report.skipped.append((cid, feature, j, "series too short"))
                    continue
                for kind in kinds:
                    start = time.perf_counter()
                    extender = fit_extender(train, kind=kind, w=w_eff, lam=lam, seed=seed)
                    pred = extend(extender, train)
                    report.runtimes[kind].append(time.perf_counter() - start)
                    report.errors[kind].append(abs(pred - target))
    return report
