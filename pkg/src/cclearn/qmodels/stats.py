"""Quantile-loss primitives, empirical tail statistics, and quadrature levels."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

VALID_METHODOLOGIES = ("point", "quantile", "superquantile")
VALID_TAILS = ("left", "right")


@dataclass(frozen=True)
class EstimationTask:
    """What a model estimates: the expectation, a quantile, or a tail mean.

    ``alpha`` is the estimated level for quantile/superquantile tasks,
    ``tail`` the side of the distribution the superquantile averages over,
    and ``n_quadrature`` the number of levels used to discretize the tail.
    """

    methodology: str = "point"
    alpha: float = 0.5
    tail: str = "right"
    n_quadrature: int = 1

    def __post_init__(self):
        if self.methodology not in VALID_METHODOLOGIES:
            raise ValueError(f"unknown methodology {self.methodology!r}")
        if self.methodology != "point" and not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must be in (0, 1), got {self.alpha}")
        if self.tail not in VALID_TAILS:
            raise ValueError(f"unknown tail {self.tail!r}")
        if self.methodology == "superquantile" and self.n_quadrature < 1:
            raise ValueError("n_quadrature must be >= 1 for superquantile tasks")

    def to_dict(self) -> dict:
        return {
            "methodology": self.methodology,
            "alpha": self.alpha,
            "tail": self.tail,
            "n_quadrature": self.n_quadrature,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "EstimationTask":
        return cls(
            methodology=d["methodology"],
            alpha=d["alpha"],
            tail=d.get("tail", "right"),
            n_quadrature=d.get("n_quadrature", 1),
        )


def pinball_loss(u: float, alpha: float) -> float:
    """Asymmetric residual loss: alpha*u for u >= 0, (alpha-1)*u otherwise."""
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    u = float(u)
    return alpha * u if u >= 0.0 else (alpha - 1.0) * u


def mean_pinball(predictions, targets, alpha: float) -> float:
    """Average pinball loss of residuals ``targets - predictions``."""
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    pred = np.asarray(predictions, dtype=float)
    targ = np.asarray(targets, dtype=float)
    if pred.shape != targ.shape:
        raise ValueError(f"length mismatch: {pred.shape} vs {targ.shape}")
    if pred.size == 0:
        raise ValueError("empty input")
    u = targ - pred
    return float(np.mean(np.where(u >= 0.0, alpha * u, (alpha - 1.0) * u)))


def empirical_quantile(samples, alpha: float) -> float:
    """Linear-interpolation empirical quantile at rank position (n-1)*alpha."""
    s = np.asarray(samples, dtype=float)
    if s.size == 0:
        raise ValueError("empty sample set")
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    return float(np.quantile(s, alpha))


def empirical_superquantile(samples, alpha: float, tail: str = "right") -> float:
    """Mean of the samples beyond the empirical alpha-quantile.

    Right tail averages samples strictly greater than the quantile, left tail
    strictly less; when no sample lies beyond, the extreme value (which then
    equals the quantile) is returned.
    """
    s = np.asarray(samples, dtype=float)
    if s.size == 0:
        raise ValueError("empty sample set")
    if tail not in VALID_TAILS:
        raise ValueError(f"unknown tail {tail!r}")
    q = empirical_quantile(s, alpha)
    beyond = s[s > q] if tail == "right" else s[s < q]
    if beyond.size == 0:
        return q
    return float(np.mean(beyond))


@dataclass(frozen=True)
class QuadratureScheme:
    """Midpoint discretization of the tail integral into J weighted levels."""

    levels: tuple = field(default_factory=tuple)
    weights: tuple = field(default_factory=tuple)
    tail: str = "right"
    alpha: float = 0.5
    step: float = 0.0

    def __len__(self) -> int:
        return len(self.levels)

    def to_dict(self) -> dict:
        return {
            "levels": list(self.levels),
            "weights": list(self.weights),
            "tail": self.tail,
            "alpha": self.alpha,
            "step": self.step,
        }


def quadrature_scheme(alpha: float, n_levels: int, tail: str = "right") -> QuadratureScheme:
    """Levels and weights of the midpoint rule for the tail beyond ``alpha``.

    Right tail: step = (1-alpha)/J, level_j = alpha + (j-0.5)*step.
    Left tail:  step = alpha/J,     level_j = alpha - (j-0.5)*step.
    Weights are uniform 1/J in both cases.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    if n_levels < 1:
        raise ValueError(f"n_levels must be >= 1, got {n_levels}")
    if tail not in VALID_TAILS:
        raise ValueError(f"unknown tail {tail!r}")
    n = int(n_levels)
    if tail == "right":
        step = (1.0 - alpha) / n
        levels = tuple(alpha + (j - 0.5) * step for j in range(1, n + 1))
    else:
        step = alpha / n
        levels = tuple(alpha - (j - 0.5) * step for j in range(1, n + 1))
    weights = tuple(1.0 / n for _ in range(n))
    return QuadratureScheme(levels=levels, weights=weights, tail=tail, alpha=alpha, step=step)
