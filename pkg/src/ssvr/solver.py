"""Newton-Armijo minimization of the smooth epsilon-SVR objective."""

from dataclasses import dataclass, field, replace
from fractions import Fraction

import numpy as np

from .linalg import NotPositiveDefinite, spd_solve
from .objective import (
    ModelParams,
    Problem,
    objective_decrease,
    objective_gradient,
    objective_hessian,
    objective_value,
)

GRAD_TOLERANCE_MET = "GradToleranceMet"
MAX_ITERS_REACHED = "MaxItersReached"


class SolverError(RuntimeError):
    """Solver failure; ``iteration`` is set when raised from :func:`minimize`."""

    iteration = None


class LineSearchFailed(SolverError):
    pass


@dataclass(frozen=True)
class SolverConfig:
    delta: float = 0.05
    grad_tol: float = 1e-6
    max_iters: int = 200
    max_halvings: int = 30

    def __post_init__(self):
        if not 0.0 < self.delta < 0.5:
            raise ValueError(f"delta must lie in (0, 1/2), got {self.delta}")
        if not self.grad_tol > 0:
            raise ValueError(f"grad_tol must be positive, got {self.grad_tol}")
        if self.max_iters < 1 or self.max_halvings < 1:
            raise ValueError("max_iters and max_halvings must be at least 1")


@dataclass
class SolverReport:
    """Per-iteration trace of a :func:`minimize` run.

    ``objective_trace`` and ``grad_norm_trace`` have one entry per iterate
    (including the start).  ``step_sizes``, ``slopes`` and ``decreases`` have
    one entry per accepted step; ``slopes`` holds ``grad . s`` and
    ``decreases`` holds ``phi(x) - phi(x + s)`` for the realized displacement
    ``s``, the latter computed without cancellation and always positive.

    ``objective_trace[0]`` is evaluated directly and later entries subtract
    the recorded decreases.  Once a decrease falls below the rounding unit of
    ``phi`` (possible for very large ``C``) consecutive float entries can tie;
    :meth:`exact_objective_trace` keeps the strict ordering.
    """

    iterations: int = 0
    objective_trace: list = field(default_factory=list)
    grad_norm_trace: list = field(default_factory=list)
    step_sizes: list = field(default_factory=list)
    slopes: list = field(default_factory=list)
    decreases: list = field(default_factory=list)
    termination: str = ""
    iterates: list = None

    @property
    def final_grad_norm(self):
        return self.grad_norm_trace[-1] if self.grad_norm_trace else float("nan")

    @property
    def converged(self):
        return self.termination == GRAD_TOLERANCE_MET

    def exact_objective_trace(self):
        """The objective trace as exact rationals, strictly decreasing."""
        phi = Fraction(self.objective_trace[0])
        out = [phi]
        for dec in self.decreases:
            phi -= Fraction(dec)
            out.append(phi)
        return out

    def quadratic_ratios(self):
        """``||g_{k+1}|| / ||g_k||^2`` along the trace."""
        g = np.asarray(self.grad_norm_trace)
        if g.size < 2:
            return np.array([])
        with np.errstate(divide="ignore", invalid="ignore"):
            return g[1:] / g[:-1] ** 2


def newton_direction(p: Problem, m, grad=None) -> np.ndarray:
    """Solve ``hess @ d = -grad``; propagates :class:`NotPositiveDefinite`."""
    x = m.to_vector() if isinstance(m, ModelParams) else np.asarray(m, dtype=float)
    g = objective_gradient(p, x) if grad is None else grad
    return spd_solve(objective_hessian(p, x), -g)


def armijo_step(p: Problem, m, d, cfg: SolverConfig = SolverConfig(), grad=None):
    """Largest step in ``{1, 1/2, 1/4, ...}`` with sufficient decrease.

    The test is applied to the displacement actually realized in floating
    point, ``s = fl(x + step * d) - x``::

        phi(x) - phi(x + s) >= -delta * grad . s

    Returns ``(step, decrease)``.
    """
    x = m.to_vector() if isinstance(m, ModelParams) else np.asarray(m, dtype=float)
    g = objective_gradient(p, x) if grad is None else grad
    slope = float(g @ d)
    if not slope < 0:
        raise LineSearchFailed(f"not a descent direction (slope {slope:.3e})")
    step = 1.0
    for _ in range(cfg.max_halvings + 1):
        s = (x + step * d) - x
        realized = float(g @ s)
        if realized < 0:
            decrease = objective_decrease(p, x, s, 1.0)
            if decrease > 0 and decrease >= -cfg.delta * realized:
                return step, decrease
        step *= 0.5
    raise LineSearchFailed(
        f"no step down to 2^-{cfg.max_halvings} gave sufficient decrease (slope {slope:.3e})"
    )


def minimize(p: Problem, init=None, cfg: SolverConfig = SolverConfig(), record_iterates=False):
    """Run Newton-Armijo from ``init`` (zeros by default).

    Returns ``(ModelParams, SolverReport)``.  Stops once the infinity norm of
    the gradient is at most ``cfg.grad_tol``.
    """
    if init is None:
        x = np.zeros(p.n_params)
    else:
        x = init.to_vector() if isinstance(init, ModelParams) else np.array(init, dtype=float)
    report = SolverReport(iterates=[] if record_iterates else None)

    phi = objective_value(p, x)
    g = objective_gradient(p, x)
    report.objective_trace.append(phi)
    report.grad_norm_trace.append(float(np.max(np.abs(g))))
    if record_iterates:
        report.iterates.append(x.copy())

    k = 0
    while True:
        if report.grad_norm_trace[-1] <= cfg.grad_tol:
            report.termination = GRAD_TOLERANCE_MET
            break
        if k >= cfg.max_iters:
            report.termination = MAX_ITERS_REACHED
            break
        try:
            d = newton_direction(p, x, grad=g)
            step, decrease = armijo_step(p, x, d, cfg, grad=g)
        except (NotPositiveDefinite, SolverError) as exc:
            exc.iteration = k
            exc.args = (f"iteration {k}: {exc}",)
            raise
        x_new = x + step * d
        report.slopes.append(float(g @ (x_new - x)))
        report.step_sizes.append(step)
        report.decreases.append(decrease)

        x = x_new
        k += 1
        # accumulate the cancellation-free decrease; direct re-evaluation
        # loses steps smaller than the rounding of phi
        phi = phi - decrease
        g = objective_gradient(p, x)
        report.objective_trace.append(phi)
        report.grad_norm_trace.append(float(np.max(np.abs(g))))
        if record_iterates:
            report.iterates.append(x.copy())

    report.iterations = k
    return ModelParams.from_vector(x), report


def minimize_continuation(p: Problem, alphas=(5.0, 50.0, 500.0), cfg: SolverConfig = SolverConfig(), init=None):
    """Solve at increasing smoothing sharpness, warm-starting each stage.

    Returns a list of ``(alpha, ModelParams, SolverReport)``.
    """
    out = []
    current = init
    for alpha in alphas:
        hyper = replace(p.hyper, alpha=float(alpha))
        stage = Problem(p.design, p.targets, hyper, weight=p.weight)
        params, report = minimize(stage, current, cfg)
        out.append((float(alpha), params, report))
        current = params
    return out
