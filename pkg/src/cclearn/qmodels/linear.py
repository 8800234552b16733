"""Linear quantile regression, its support-vector variant, and the mixed
superquantile combination.

Quantile fits go through the exact LP reformulation (residuals split into
positive/negative parts) solved by the in-repo simplex; point fits use
ordinary least squares via the normal equations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..data import Dataset
from ..milp import MilpModel, MilpError
from ..milp.simplex import solve_lp
from .stats import EstimationTask, mean_pinball, quadrature_scheme


class FitError(Exception):
    """Training could not produce a usable model."""


@dataclass
class LinearQuantileModel:
    """Affine estimator: prediction = intercept + coefficients @ x."""

    intercept: float
    coefficients: np.ndarray
    task: EstimationTask
    train_loss: float = math.nan
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        self.coefficients = np.asarray(self.coefficients, dtype=float)

    @property
    def n_features(self) -> int:
        return self.coefficients.shape[0]

    def predict(self, x):
        x = np.asarray(x, dtype=float)
        if x.ndim == 1:
            if x.shape[0] != self.n_features:
                raise ValueError(f"expected {self.n_features} features, got {x.shape[0]}")
            return float(self.intercept + self.coefficients @ x)
        if x.shape[1] != self.n_features:
            raise ValueError(f"expected {self.n_features} features, got {x.shape[1]}")
        return self.intercept + x @ self.coefficients


def _design_rank(X: np.ndarray) -> int:
    design = np.column_stack([np.ones(X.shape[0]), X])
    return int(np.linalg.matrix_rank(design))


def _pinball_lp(X: np.ndarray, y: np.ndarray, alpha: float):
    """Exact pinball-loss minimization via LP; returns (intercept, coefs, loss)."""
    n, d = X.shape
    model = MilpModel()
    model.add_variable("b0", "continuous", -math.inf, math.inf)
    for j in range(d):
        model.add_variable(f"b{j + 1}", "continuous", -math.inf, math.inf)
    for i in range(n):
        model.add_variable(f"p{i}", "continuous", 0.0, math.inf)
        model.add_variable(f"n{i}", "continuous", 0.0, math.inf)
    for i in range(n):
        coefs = {"b0": 1.0, f"p{i}": 1.0, f"n{i}": -1.0}
        for j in range(d):
            if X[i, j] != 0.0:
                coefs[f"b{j + 1}"] = X[i, j]
        model.add_constraint(coefs, "=", float(y[i]), f"fit{i}")
    obj = {}
    for i in range(n):
        obj[f"p{i}"] = alpha / n
        obj[f"n{i}"] = (1.0 - alpha) / n
    model.set_objective("min", obj)
    result = solve_lp(model)
    if result.status != "optimal":
        raise MilpError(f"pinball LP unexpectedly {result.status}")
    beta = np.array([result.assignment[f"b{j + 1}"] for j in range(d)])
    return float(result.assignment["b0"]), beta, float(result.objective)


def fit_linear(train: Dataset, task: EstimationTask, config: dict | None = None) -> LinearQuantileModel:
    """Train an affine estimator for the task.

    Quantile mode minimizes the mean pinball loss exactly (LP); point mode
    solves the normal equations. A rank-deficient design is fatal for point
    mode and recorded in ``diagnostics`` for quantile mode (the LP optimum
    is still exact, just not unique).
    """
    X, y = train.features, train.target
    n, d = X.shape
    if task.methodology == "superquantile":
        raise FitError("fit_linear handles point/quantile tasks; "
                       "use mixed_linear_superquantile for superquantile estimation")
    rank = _design_rank(X)
    deficient = rank < d + 1
    if task.methodology == "point":
        if deficient:
            raise FitError(f"design matrix is rank-deficient (rank {rank} < {d + 1})")
        design = np.column_stack([np.ones(n), X])
        beta = np.linalg.solve(design.T @ design, design.T @ y)
        pred = design @ beta
        loss = float(np.mean(np.abs(y - pred)))
        return LinearQuantileModel(float(beta[0]), beta[1:], task, train_loss=loss,
                                   diagnostics={"rank": rank, "metric": "mae"})
    b0, beta, loss = _pinball_lp(X, y, task.alpha)
    return LinearQuantileModel(b0, beta, task, train_loss=loss,
                               diagnostics={"rank": rank, "rank_deficient": deficient,
                                            "metric": "mean_pinball"})


def fit_svqr(train: Dataset, task: EstimationTask, epsilon: float,
             config: dict | None = None) -> LinearQuantileModel:
    """Linear support-vector quantile regression.

    Residuals within ``epsilon`` of zero are free; beyond that the pinball
    loss applies to the excess. ``config['penalty']`` adds an L2 coefficient
    penalty (intercept excluded). With penalty 0 the problem is an exact LP;
    with a positive penalty a smoothed objective is minimized with L-BFGS-B.
    """
    if epsilon < 0:
        raise FitError(f"epsilon must be >= 0, got {epsilon}")
    if task.methodology != "quantile":
        raise FitError(f"svqr supports quantile estimation only, got {task.methodology!r}")
    penalty = float((config or {}).get("penalty", 0.0))
    if penalty < 0:
        raise FitError(f"penalty must be >= 0, got {penalty}")
    X, y = train.features, train.target
    n, d = X.shape
    alpha = task.alpha
    if penalty == 0.0:
        b0, beta, loss = _svqr_lp(X, y, alpha, epsilon)
    else:
        b0, beta = _svqr_smooth(X, y, alpha, epsilon, penalty)
        loss = _svqr_loss(X, y, b0, beta, alpha, epsilon)
    return LinearQuantileModel(b0, beta, task, train_loss=loss,
                               diagnostics={"epsilon": epsilon, "penalty": penalty})


def _svqr_lp(X, y, alpha, epsilon):
    n, d = X.shape
    model = MilpModel()
    model.add_variable("b0", "continuous", -math.inf, math.inf)
    for j in range(d):
        model.add_variable(f"b{j + 1}", "continuous", -math.inf, math.inf)
    for i in range(n):
        model.add_variable(f"a{i}", "continuous", 0.0, math.inf)
        model.add_variable(f"c{i}", "continuous", 0.0, math.inf)
    for i in range(n):
        pred = {"b0": 1.0}
        for j in range(d):
            if X[i, j] != 0.0:
                pred[f"b{j + 1}"] = X[i, j]
        # a_i >= (y_i - pred) - eps  <=>  a_i + pred >= y_i - eps
        up = dict(pred)
        up[f"a{i}"] = 1.0
        model.add_constraint(up, ">=", float(y[i]) - epsilon, f"up{i}")
        # c_i >= (pred - y_i) - eps  <=>  c_i - pred >= -y_i - eps
        dn = {k: -v for k, v in pred.items()}
        dn[f"c{i}"] = 1.0
        model.add_constraint(dn, ">=", -float(y[i]) - epsilon, f"dn{i}")
    obj = {}
    for i in range(n):
        obj[f"a{i}"] = alpha / n
        obj[f"c{i}"] = (1.0 - alpha) / n
    model.set_objective("min", obj)
    result = solve_lp(model)
    if result.status != "optimal":
        raise MilpError(f"svqr LP unexpectedly {result.status}")
    beta = np.array([result.assignment[f"b{j + 1}"] for j in range(d)])
    return float(result.assignment["b0"]), beta, float(result.objective)


def _svqr_loss(X, y, b0, beta, alpha, epsilon):
    u = y - (b0 + X @ beta)
    over = np.maximum(0.0, u - epsilon)
    under = np.maximum(0.0, -u - epsilon)
    return float(np.mean(alpha * over + (1.0 - alpha) * under))


def _svqr_smooth(X, y, alpha, epsilon, penalty):
    from scipy.optimize import minimize

    n, d = X.shape
    delta = 1e-4 * (np.std(y) + 1e-12)

    def smooth_hinge(t):
        return np.where(t <= 0, 0.0,
                        np.where(t < delta, t * t / (2 * delta), t - delta / 2))

    def smooth_hinge_grad(t):
        return np.where(t <= 0, 0.0, np.where(t < delta, t / delta, 1.0))

    def objective(w):
        b0, beta = w[0], w[1:]
        u = y - (b0 + X @ beta)
        over, under = u - epsilon, -u - epsilon
        loss = np.mean(alpha * smooth_hinge(over) + (1 - alpha) * smooth_hinge(under))
        loss += 0.5 * penalty * beta @ beta
        # d/du parts
        ddu = (alpha * smooth_hinge_grad(over) - (1 - alpha) * smooth_hinge_grad(under)) / n
        grad = np.empty(d + 1)
        grad[0] = -ddu.sum()
        grad[1:] = -(X.T @ ddu) + penalty * beta
        return loss, grad

    res = minimize(objective, np.zeros(d + 1), jac=True, method="L-BFGS-B",
                   options={"maxiter": 2000, "ftol": 1e-14, "gtol": 1e-10})
    return float(res.x[0]), res.x[1:].copy()


def mixed_linear_superquantile(train: Dataset, alpha: float, n_levels: int,
                               tail: str = "right",
                               config: dict | None = None) -> LinearQuantileModel:
    """Tail-mean estimator as a weighted mix of quantile fits.

    Fits one linear quantile model per midpoint-quadrature level and returns
    the coefficient-wise weighted sum; the recorded task is superquantile.
    """
    scheme = quadrature_scheme(alpha, n_levels, tail)
    b0 = 0.0
    beta = np.zeros(train.n_features)
    loss = 0.0
    for level, w in zip(scheme.levels, scheme.weights):
        part = fit_linear(train, EstimationTask("quantile", alpha=level), config)
        b0 += w * part.intercept
        beta += w * part.coefficients
        loss += w * part.train_loss
    task = EstimationTask("superquantile", alpha=alpha, tail=tail, n_quadrature=n_levels)
    return LinearQuantileModel(b0, beta, task, train_loss=loss,
                               diagnostics={"levels": list(scheme.levels)})
