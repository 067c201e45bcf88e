"""Plus function, epsilon-insensitive loss and their smooth surrogates.

All functions accept scalars or numpy arrays and broadcast elementwise.
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

LOG2 = float(np.log(2.0))


@dataclass(frozen=True)
class SmoothingParams:
    """Sharpness ``alpha`` of the p-function and tube half-width ``epsilon``."""

    alpha: float = 5.0
    epsilon: float = 0.1

    def __post_init__(self):
        if not (np.isfinite(self.alpha) and self.alpha > 0):
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if not (np.isfinite(self.epsilon) and self.epsilon >= 0):
            raise ValueError(f"epsilon must be nonnegative, got {self.epsilon}")


def plus(x):
    return np.maximum(0.0, x)


def softplus(z):
    """log(1 + e^z) without overflow."""
    z = np.asarray(z, dtype=float)
    return np.maximum(z, 0.0) + np.log1p(np.exp(-np.abs(z)))


def p_smooth(x, alpha):
    """Smooth plus function p(x, alpha) = x + log(1 + exp(-alpha x)) / alpha.

    Evaluated as ``max(x, 0) + log1p(exp(-alpha |x|)) / alpha``, which never
    overflows and never drops below ``max(x, 0)``.
    """
    x = np.asarray(x, dtype=float)
    return np.maximum(x, 0.0) + np.log1p(np.exp(-alpha * np.abs(x))) / alpha


def p_smooth_diff(x, h, alpha):
    """Accurate ``p(x + h) - p(x)`` for small ``h``.

    Uses ``softplus(z + v) - softplus(z) = log1p(a)`` with
    ``a = sigmoid(z) * expm1(v)``.  When ``a`` nears -1 the sum
    ``1 + a = sigmoid(-z) + sigmoid(z) * e^v`` is formed directly instead, so
    neither branch cancels.
    """
    x = np.asarray(x, dtype=float)
    h = np.asarray(h, dtype=float)
    z = alpha * x
    v = alpha * h
    small = np.abs(v) <= 30.0
    vs = np.where(small, v, 0.0)
    a = expit(z) * np.expm1(vs)
    near = a < -0.5
    accurate = np.where(
        near,
        np.log(expit(-z) + expit(z) * np.exp(np.where(near, vs, 0.0))),
        np.log1p(np.where(near, 0.0, a)),
    ) / alpha
    direct = p_smooth(x + h, alpha) - p_smooth(x, alpha)
    return np.where(small, accurate, direct)


def eps_loss(x, epsilon):
    """|x|_eps = max(0, |x| - epsilon)."""
    return plus(x - epsilon) + plus(-x - epsilon)


def eps_loss_sq(x, epsilon):
    # at most one of the two plus terms is nonzero, so no cross term
    return plus(x - epsilon) ** 2 + plus(-x - epsilon) ** 2


def p_eps_sq(x, params: SmoothingParams):
    """Smooth surrogate of the squared epsilon-insensitive loss."""
    x = np.asarray(x, dtype=float)
    a, e = params.alpha, params.epsilon
    return p_smooth(x - e, a) ** 2 + p_smooth(-x - e, a) ** 2


def p_eps_sq_grad(x, params: SmoothingParams):
    x = np.asarray(x, dtype=float)
    a, e = params.alpha, params.epsilon
    u, v = x - e, -x - e
    return 2.0 * (p_smooth(u, a) * expit(a * u) - p_smooth(v, a) * expit(a * v))


def p_eps_sq_hess(x, params: SmoothingParams):
    """Second derivative of :func:`p_eps_sq`; strictly positive everywhere."""
    x = np.asarray(x, dtype=float)
    a, e = params.alpha, params.epsilon

    def term(z):
        s = expit(a * z)
        return s * s + p_smooth(z, a) * a * s * expit(-a * z)

    return 2.0 * (term(x - e) + term(-x - e))


def p_eps_sq_diff(x, h, params: SmoothingParams):
    """Accurate ``p_eps_sq(x + h) - p_eps_sq(x)``.

    Each squared term is differenced as ``(q1 - q0) * (q1 + q0)`` with the
    first factor from :func:`p_smooth_diff`.
    """
    x = np.asarray(x, dtype=float)
    h = np.asarray(h, dtype=float)
    a, e = params.alpha, params.epsilon
    u, v = x - e, -x - e
    du = p_smooth_diff(u, h, a)
    dv = p_smooth_diff(v, -h, a)
    pu, pv = p_smooth(u, a), p_smooth(v, a)
    return du * (2.0 * pu + du) + dv * (2.0 * pv + dv)


def smoothing_gap_bound(sigma, alpha):
    """Upper bound on ``p_eps_sq(x) - eps_loss_sq(x)`` for ``|x| < sigma + epsilon``."""
    t = LOG2 / alpha
    return 2.0 * t * t + 2.0 * sigma * t
