"""Smoothed dual objectives, their penalized forms, and analytic gradients.

The decision variable is a real |Y|-by-|Z| matrix ``a``. For each sample i the
objective replaces the hard min/max over classes of ``G[i, y] + a[y, z_i]``
with a temperature-eps log-mean-exp, then subtracts the label-model
expectation of ``a[., z_i]``. Everything here is a pure function of immutable
inputs.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .domain import DatasetView, GMatrix, LabelModel
from .errors import CoverageError

EPSILON_FLOOR = 1e-6


class Side(enum.Enum):
    LOWER = "lower"
    UPPER = "upper"


@dataclass(frozen=True)
class SmoothingConfig:
    """Smoothing temperature and penalty weight for the unconstrained reformulation."""

    epsilon: float = 0.01 / math.log(2.0)
    penalty_weight: float = 1.0

    def __post_init__(self):
        if self.epsilon < EPSILON_FLOOR:
            raise ValueError(
                f"epsilon must be >= {EPSILON_FLOOR} (overflow guard), got {self.epsilon}"
            )
        if self.penalty_weight < 0:
            raise ValueError("penalty_weight must be non-negative")

    @classmethod
    def for_classes(cls, num_classes: int, target_error: float = 0.01, **kw):
        """Temperature giving a smoothing bias of ``target_error`` units."""
        return cls(epsilon=target_error / math.log(num_classes), **kw)


def soft_extreme(values, epsilon: float, side: Side) -> float:
    """Log-mean-exp relaxation of min (LOWER) or max (UPPER) of ``values``.

    Lies within ``epsilon * log(len(values))`` of the hard extreme, on the
    inside of it: soft-min >= min, soft-max <= max.
    """
    b = np.asarray(values, dtype=np.float64)
    if b.size == 0:
        raise ValueError("soft_extreme of an empty list")
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    sign = -1.0 if side is Side.LOWER else 1.0
    t = sign * b / epsilon
    m = t.max()
    return float(sign * epsilon * (m + np.log(np.mean(np.exp(t - m)))))


def _check_coverage(data: DatasetView, model: LabelModel, G: GMatrix):
    if data.z_ids.size and int(data.z_ids.max()) >= model.num_signatures:
        raise CoverageError(
            "data contains z-ids beyond the label model's coverage"
        )
    if G.n != data.n or G.num_classes != model.num_classes:
        raise ValueError("shape mismatch between data, label model, and G")


def _shifted(data: DatasetView, G: GMatrix, a: np.ndarray) -> np.ndarray:
    # n-by-|Y| matrix of G[i, y] + a[y, z_i]
    return G.values + a.T[data.z_ids]


def per_sample_objective(
    data: DatasetView,
    model: LabelModel,
    G: GMatrix,
    a: np.ndarray,
    cfg: SmoothingConfig,
    side: Side,
) -> np.ndarray:
    """The n per-sample smoothed dual values; their mean is the objective."""
    _check_coverage(data, model, G)
    eps = cfg.epsilon
    sign = -1.0 if side is Side.LOWER else 1.0
    t = sign * _shifted(data, G, a) / eps
    m = t.max(axis=1)
    soft = sign * eps * (m + np.log(np.mean(np.exp(t - m[:, None]), axis=1)))
    # label-model expectation, grouped by z: one dot product per signature
    per_z = np.einsum("zy,yz->z", model.table, a)
    return soft - per_z[data.z_ids]


def eval_objective(data, model, G, a, cfg, side) -> float:
    """Mean smoothed dual value over the sample; penalty not included."""
    return float(per_sample_objective(data, model, G, a, cfg, side).mean())


def penalty(a: np.ndarray) -> float:
    """Squared column-sum penalty enforcing membership in the zero-sum set."""
    col = np.asarray(a).sum(axis=0)
    return float(col @ col)


def eval_penalized(data, model, G, a, cfg, side) -> float:
    """Objective plus the penalty, signed so the solved problem stays convex.

    Upper side adds the penalty (minimized); lower side subtracts it (the
    lower problem is a supremum, so its negation gains the penalty).
    """
    base = eval_objective(data, model, G, a, cfg, side)
    sign = 1.0 if side is Side.UPPER else -1.0
    return base + sign * cfg.penalty_weight * penalty(a)


def gradient(data, model, G, a, cfg, side) -> np.ndarray:
    """Exact gradient of the minimized objective in ``a``.

    UPPER: gradient of eval_penalized. LOWER: gradient of -eval_penalized,
    i.e. of the function the solver minimizes for the supremum problem.
    """
    _check_coverage(data, model, G)
    eps = cfg.epsilon
    sign = -1.0 if side is Side.LOWER else 1.0
    t = sign * _shifted(data, G, a) / eps
    t -= t.max(axis=1, keepdims=True)
    w = np.exp(t)
    w /= w.sum(axis=1, keepdims=True)  # n-by-|Y| softmin/softmax weights

    num_y, num_z = a.shape
    counts = np.bincount(data.z_ids, minlength=num_z).astype(np.float64)
    acc = np.zeros((num_z, num_y))
    np.add.at(acc, data.z_ids, w)
    data_term = (acc - counts[:, None] * model.table).T / data.n

    grad = sign * data_term
    grad += 2.0 * cfg.penalty_weight * a.sum(axis=0, keepdims=True)
    return grad


def minimized_value(data, model, G, a, cfg, side) -> float:
    """The scalar the solver minimizes; gradient() is its exact derivative."""
    v = eval_penalized(data, model, G, a, cfg, side)
    return v if side is Side.UPPER else -v
