"""Smooth epsilon-SVR objective with its gradient and Hessian.

The objective over ``x = (coeffs, bias)`` is::

    phi(x) = 0.5 * (coeffs @ coeffs + bias**2) + (C / 2) * sum_i q(r_i)
    r      = design @ coeffs + bias - targets

with ``q`` the smoothed squared epsilon-insensitive loss.  The same code
serves the linear model (design = A, coeffs = w) and the kernel model
(design = K(A, A'), coeffs = u).
"""

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .kernel import KernelSpec
from .linalg import DimensionMismatch, as_matrix, as_vector
from .smoothing import (
    SmoothingParams,
    eps_loss_sq,
    p_eps_sq,
    p_eps_sq_diff,
    p_eps_sq_grad,
    p_eps_sq_hess,
)


@dataclass(frozen=True)
class Hyperparams:
    C: float = 1000.0
    epsilon: float = 0.1
    alpha: float = 5.0
    kernel: KernelSpec = field(default_factory=KernelSpec.linear)

    def __post_init__(self):
        if not (np.isfinite(self.C) and self.C > 0):
            raise ValueError(f"C must be positive, got {self.C}")
        SmoothingParams(alpha=self.alpha, epsilon=self.epsilon)

    @property
    def smoothing(self) -> SmoothingParams:
        return SmoothingParams(alpha=self.alpha, epsilon=self.epsilon)

    @property
    def gamma(self):
        return None if self.kernel.is_linear else self.kernel.gamma


@dataclass(frozen=True)
class ModelParams:
    coeffs: np.ndarray
    bias: float = 0.0

    @classmethod
    def zeros(cls, size):
        return cls(np.zeros(size), 0.0)

    @classmethod
    def from_vector(cls, x):
        x = np.asarray(x, dtype=float)
        return cls(x[:-1].copy(), float(x[-1]))

    def to_vector(self):
        return np.append(np.asarray(self.coeffs, dtype=float), self.bias)


@dataclass(frozen=True, eq=False)
class Problem:
    """Design matrix (features or Gram matrix), targets and hyperparameters.

    ``C`` may be overridden to zero for diagnostics through ``weight``; the
    hyperparameter record itself always carries a positive ``C``.
    """

    design: np.ndarray
    targets: np.ndarray
    hyper: Hyperparams
    weight: float = None

    def __post_init__(self):
        design = as_matrix(self.design)
        targets = as_vector(self.targets)
        if design.shape[0] != targets.shape[0]:
            raise DimensionMismatch(f"design has {design.shape[0]} rows, targets has {targets.shape[0]}")
        if not self.hyper.kernel.is_linear:
            if design.shape[0] != design.shape[1]:
                raise DimensionMismatch("kernel problems need a square Gram matrix")
            if not np.allclose(np.diag(design), 1.0):
                raise ValueError("Gram matrix must have unit diagonal")
        object.__setattr__(self, "design", design)
        object.__setattr__(self, "targets", targets)
        if self.weight is None:
            object.__setattr__(self, "weight", float(self.hyper.C))

    @property
    def n_params(self):
        return self.design.shape[1] + 1

    @cached_property
    def augmented(self):
        """Design with a trailing column of ones for the bias."""
        return np.hstack([self.design, np.ones((self.design.shape[0], 1))])


def _vector(p: Problem, m):
    x = m.to_vector() if isinstance(m, ModelParams) else np.asarray(m, dtype=float)
    if x.shape != (p.n_params,):
        raise DimensionMismatch(f"expected {p.n_params} parameters, got {x.shape}")
    return x


def residuals(p: Problem, m) -> np.ndarray:
    """``design @ coeffs + bias - targets``."""
    x = _vector(p, m)
    return p.augmented @ x - p.targets


def objective_value(p: Problem, m) -> float:
    x = _vector(p, m)
    r = p.augmented @ x - p.targets
    return 0.5 * float(x @ x) + 0.5 * p.weight * float(np.sum(p_eps_sq(r, p.hyper.smoothing)))


def nonsmooth_value(p: Problem, m) -> float:
    """Objective with the exact squared epsilon-insensitive loss."""
    x = _vector(p, m)
    r = p.augmented @ x - p.targets
    return 0.5 * float(x @ x) + 0.5 * p.weight * float(np.sum(eps_loss_sq(r, p.hyper.epsilon)))


def objective_gradient(p: Problem, m) -> np.ndarray:
    x = _vector(p, m)
    r = p.augmented @ x - p.targets
    return x + 0.5 * p.weight * (p.augmented.T @ p_eps_sq_grad(r, p.hyper.smoothing))


def objective_hessian(p: Problem, m) -> np.ndarray:
    x = _vector(p, m)
    r = p.augmented @ x - p.targets
    h = p_eps_sq_hess(r, p.hyper.smoothing)
    Z = p.augmented
    H = (0.5 * p.weight) * (Z.T @ (Z * h[:, None]))
    H = 0.5 * (H + H.T)
    H[np.diag_indices_from(H)] += 1.0
    return H


def objective_decrease(p: Problem, m, d, step) -> float:
    """``phi(x) - phi(x + step * d)`` evaluated without cancellation.

    The regularizer difference is expanded algebraically and the loss
    difference is taken term by term with :func:`p_eps_sq_diff`.
    """
    x = _vector(p, m)
    d = np.asarray(d, dtype=float)
    r = p.augmented @ x - p.targets
    dr = step * (p.augmented @ d)
    reg = -step * float(x @ d) - 0.5 * step * step * float(d @ d)
    loss = -float(np.sum(p_eps_sq_diff(r, dr, p.hyper.smoothing)))
    return reg + 0.5 * p.weight * loss
