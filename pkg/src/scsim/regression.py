"""Small regression estimators shared by the horizon and explain models.

Linear and Lasso are implemented here (numpy only) so that lambda = 0
reduces the lasso exactly to least squares and so KKT conditions can be
checked against the coordinate-descent solution. Tree ensembles are
optional registry entries backed by scikit-learn.

The lasso objective is (1 / 2n) * ||y - b0 - X b||^2 + lam * ||b||_1
with an unpenalized intercept.
"""

from __future__ import annotations

import logging
from typing import Any, Callable

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin

from .errors import DimensionMismatch, NonFiniteValue, UnknownModel

log = logging.getLogger(__name__)

LASSO_TOL = 1e-8
LASSO_MAX_SWEEPS = 10_000
RIDGE_JITTER = 1e-8

LAMBDA_GRID = (0.001, 0.01, 0.1, 1.0)


def _as_matrix(X, y=None):
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    if X.ndim != 2:
        raise DimensionMismatch(f"X must be 2-D, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise NonFiniteValue("X contains NaN or infinity")
    if y is None:
        return X
    y = np.asarray(y, dtype=float).ravel()
    if len(y) != X.shape[0]:
        raise DimensionMismatch(f"X has {X.shape[0]} rows but y has {len(y)}")
    if not np.all(np.isfinite(y)):
        raise NonFiniteValue("y contains NaN or infinity")
    return X, y


class LinearModel(RegressorMixin, BaseEstimator):
    """Least-squares regression with intercept.

    Rank-deficient designs fall back to a tiny ridge penalty
    (``RIDGE_JITTER``) instead of failing; the fallback is logged and
    recorded on ``singular_fallback_``.
    """

    def fit(self, X, y):
        X, y = _as_matrix(X, y)
        x_mean = X.mean(axis=0)
        y_mean = float(y.mean())
        Xc = X - x_mean
        yc = y - y_mean

        coef, _, rank, _ = np.linalg.lstsq(Xc, yc, rcond=None)
        self.singular_fallback_ = rank < X.shape[1]
        if self.singular_fallback_:
            log.info("singular design (rank %d < %d); ridge jitter applied", rank, X.shape[1])
            gram = Xc.T @ Xc + RIDGE_JITTER * np.eye(X.shape[1])
            coef = np.linalg.solve(gram, Xc.T @ yc)

        self.coef_ = coef
        self.intercept_ = y_mean - float(x_mean @ coef)
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X):
        X = _as_matrix(X)
        if X.shape[1] != self.n_features_in_:
            raise DimensionMismatch(f"expected {self.n_features_in_} features, got {X.shape[1]}")
        return X @ self.coef_ + self.intercept_


def soft_threshold(value: float, threshold: float) -> float:
    if value > threshold:
        return value - threshold
    if value < -threshold:
        return value + threshold
    return 0.0


class LassoModel(RegressorMixin, BaseEstimator):
    """L1-penalized regression fit by cyclic coordinate descent.

    Stops when the largest coefficient change in a full sweep is below
    ``tol`` or after ``max_sweeps`` sweeps (logged). ``lam=0`` recovers
    least squares on well-conditioned designs.
    """

    def __init__(self, lam: float = 0.01, tol: float = LASSO_TOL, max_sweeps: int = LASSO_MAX_SWEEPS):
        self.lam = lam
        self.tol = tol
        self.max_sweeps = max_sweeps

    def fit(self, X, y):
        if self.lam < 0:
            raise ValueError(f"lam must be non-negative, got {self.lam}")
        X, y = _as_matrix(X, y)
        n, p = X.shape
        x_mean = X.mean(axis=0)
        y_mean = float(y.mean())
        Xc = X - x_mean
        yc = y - y_mean

        z = (Xc * Xc).mean(axis=0)  # per-coordinate curvature
        beta = np.zeros(p)
        residual = yc.copy()
        self.converged_ = False
        for sweep in range(self.max_sweeps):
            max_delta = 0.0
            for j in range(p):
                if z[j] == 0.0:
                    continue
                rho = float(Xc[:, j] @ residual) / n + z[j] * beta[j]
                new = soft_threshold(rho, self.lam) / z[j]
                delta = new - beta[j]
                if delta != 0.0:
                    residual -= Xc[:, j] * delta
                    beta[j] = new
                    max_delta = max(max_delta, abs(delta))
            if max_delta < self.tol:
                self.converged_ = True
                break
        if not self.converged_:
            log.warning("lasso did not converge in %d sweeps", self.max_sweeps)
        self.n_sweeps_ = sweep + 1
        self.coef_ = beta
        self.intercept_ = y_mean - float(x_mean @ beta)
        self.n_features_in_ = p
        return self

    def predict(self, X):
        X = _as_matrix(X)
        if X.shape[1] != self.n_features_in_:
            raise DimensionMismatch(f"expected {self.n_features_in_} features, got {X.shape[1]}")
        return X @ self.coef_ + self.intercept_


def _make_random_forest(seed: int | None, **kw):
    from sklearn.ensemble import RandomForestRegressor

    kw.setdefault("n_estimators", 100)
    return RandomForestRegressor(random_state=0 if seed is None else seed, **kw)


def _make_gradient_boosting(seed: int | None, **kw):
    from sklearn.ensemble import GradientBoostingRegressor

    return GradientBoostingRegressor(random_state=0 if seed is None else seed, **kw)


# kind -> factory(lam, seed, **kw). Additive kinds admit the exact
# per-coefficient attribution path; the rest go through sampling.
MODEL_KINDS: dict[str, Callable[..., Any]] = {
    "linear": lambda lam=None, seed=None, **kw: LinearModel(**kw),
    "lasso": lambda lam=None, seed=None, **kw: LassoModel(lam=0.01 if lam is None else lam, **kw),
    "random_forest": lambda lam=None, seed=None, **kw: _make_random_forest(seed, **kw),
    "gradient_boosting": lambda lam=None, seed=None, **kw: _make_gradient_boosting(seed, **kw),
}

ADDITIVE_KINDS = frozenset({"linear", "lasso"})


def make_model(kind: str, lam: float | None = None, seed: int | None = None, **kw):
    try:
        factory = MODEL_KINDS[kind]
    except KeyError:
        raise UnknownModel(f"{kind!r}; known: {sorted(MODEL_KINDS)}") from None
    return factory(lam=lam, seed=seed, **kw)


def register_model(kind: str, factory: Callable[..., Any], additive: bool = False) -> None:
    global ADDITIVE_KINDS
    MODEL_KINDS[kind] = factory
    if additive:
        ADDITIVE_KINDS = ADDITIVE_KINDS | {kind}


def loo_lambda(X, y, grid: tuple[float, ...] = LAMBDA_GRID) -> float:
    """Pick a lasso lambda by leave-one-out error over ``grid``.

    Ties go to the larger lambda (sparser model).
    """
    X, y = _as_matrix(X, y)
    n = X.shape[0]
    if n < 3:
        raise DimensionMismatch(f"need at least 3 samples for leave-one-out, got {n}")
    best_lam, best_err = None, None
    for lam in sorted(grid, reverse=True):
        errs = []
        for i in range(n):
            mask = np.arange(n) != i
            model = LassoModel(lam=lam).fit(X[mask], y[mask])
            pred = float(model.predict(X[i : i + 1])[0])
            errs.append((pred - y[i]) ** 2)
        err = float(np.mean(errs))
        if best_err is None or err < best_err:
            best_lam, best_err = lam, err
    return best_lam
