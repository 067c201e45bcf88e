"""Model fitting, prediction, cross-validation and grid search."""

import itertools
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import metrics
from .data import ColumnMismatch, Dataset, FoldPlan, ScalingStats, fit_scaling, make_folds, scale_matrix
from .kernel import GAUSSIAN, LINEAR, KernelSpec, gram_matrix, kernel_rows
from .objective import Hyperparams, ModelParams, Problem
from .solver import GRAD_TOLERANCE_MET, SolverConfig, SolverError, minimize

log = logging.getLogger(__name__)

FORMAT_VERSION = 1
LOO = "loo"


class NotConverged(SolverError):
    pass


class FoldFailed(RuntimeError):
    def __init__(self, fold, cause):
        super().__init__(f"fold {fold}: {cause}")
        self.fold = fold
        self.cause = cause


class AllCellsFailed(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class TrainedModel:
    hyper: Hyperparams
    params: ModelParams
    scaling: ScalingStats
    anchors: np.ndarray
    iterations: int = 0
    final_grad_norm: float = float("nan")
    termination: str = ""
    feature_names: tuple = None
    target_name: str = None

    @property
    def n_features(self):
        return self.scaling.means.shape[0]


def training_problem(d: Dataset, h: Hyperparams):
    """Scaling fit on all rows of ``d``, the scaled features, and the problem to solve."""
    scaling = fit_scaling(d, np.arange(d.n_samples))
    Z = scale_matrix(d.features, scaling)
    return scaling, Z, Problem(gram_matrix(Z, h.kernel), d.targets, h)


def fit(d: Dataset, h: Hyperparams, cfg: SolverConfig = SolverConfig()) -> TrainedModel:
    """Standardize ``d`` on all of its rows and solve from the zero start."""
    scaling, Z, problem = training_problem(d, h)
    params, report = minimize(problem, None, cfg)
    anchors = np.empty((0, d.n_features)) if h.kernel.is_linear else Z
    return TrainedModel(
        hyper=h,
        params=params,
        scaling=scaling,
        anchors=anchors,
        iterations=report.iterations,
        final_grad_norm=report.final_grad_norm,
        termination=report.termination,
        feature_names=d.feature_names,
        target_name=d.target_name,
    )


def predict(model: TrainedModel, queries) -> np.ndarray:
    Q = np.atleast_2d(np.asarray(queries, dtype=float))
    if Q.shape[1] != model.n_features:
        raise ColumnMismatch(f"model expects {model.n_features} features, got {Q.shape[1]}")
    Z = scale_matrix(Q, model.scaling)
    if model.hyper.kernel.is_linear:
        return Z @ model.params.coeffs + model.params.bias
    return kernel_rows(Z, model.anchors, model.hyper.kernel) @ model.params.coeffs + model.params.bias


def cross_validate(d: Dataset, h: Hyperparams, folds: FoldPlan, cfg: SolverConfig = SolverConfig(),
                   require_convergence=True):
    """Mean and per-fold RMSE; scaling is refit on each training complement."""
    if len(folds.fold_assignments) != d.n_samples:
        raise ValueError(f"fold plan covers {len(folds.fold_assignments)} rows, dataset has {d.n_samples}")
    per_fold = []
    for f, train, test in folds.folds():
        try:
            model = fit(d.subset(train), h, cfg)
            if require_convergence and model.termination != GRAD_TOLERANCE_MET:
                raise NotConverged(
                    f"{model.termination} after {model.iterations} iterations "
                    f"(gradient {model.final_grad_norm:.3e})"
                )
        except (SolverError, np.linalg.LinAlgError) as exc:
            raise FoldFailed(f, exc) from exc
        per_fold.append(metrics.rmse(d.targets[test], predict(model, d.features[test])))
    return float(np.mean(per_fold)), per_fold


@dataclass(frozen=True)
class GridSpec:
    c_values: tuple = (1e3, 8350.0, 1e6, 1e7)
    epsilon_values: tuple = (0.1,)
    gamma_values: tuple = tuple(round(0.01 * i, 2) for i in range(1, 10))
    kernel: str = GAUSSIAN
    cv_k: object = 10
    alpha: float = 5.0

    def __post_init__(self):
        for name in ("c_values", "epsilon_values", "gamma_values"):
            vals = tuple(float(v) for v in getattr(self, name))
            object.__setattr__(self, name, vals)
        if not self.c_values or not self.epsilon_values:
            raise ValueError("C and epsilon lists must be nonempty")
        if any(not (math.isfinite(c) and c > 0) for c in self.c_values):
            raise ValueError("C values must be finite and positive")
        if any(not (math.isfinite(e) and e >= 0) for e in self.epsilon_values):
            raise ValueError("epsilon values must be finite and nonnegative")
        if self.kernel == GAUSSIAN:
            if not self.gamma_values:
                raise ValueError("gamma list must be nonempty for the gaussian kernel")
            if any(not (math.isfinite(g) and g > 0) for g in self.gamma_values):
                raise ValueError("gamma values must be finite and positive")
        elif self.kernel != LINEAR:
            raise ValueError(f"unknown kernel kind {self.kernel!r}")
        if self.cv_k != LOO and (not isinstance(self.cv_k, int) or self.cv_k < 2):
            raise ValueError(f"cv_k must be an integer >= 2 or {LOO!r}")

    def hyperparams(self):
        gammas = self.gamma_values if self.kernel == GAUSSIAN else (None,)
        for C, eps, gamma in itertools.product(self.c_values, self.epsilon_values, gammas):
            kernel = KernelSpec.linear() if gamma is None else KernelSpec.gaussian(gamma)
            yield Hyperparams(C=C, epsilon=eps, alpha=self.alpha, kernel=kernel)


@dataclass(frozen=True)
class GridCell:
    hyper: Hyperparams
    mean_rmse: float = float("nan")
    fold_rmse: tuple = ()
    error: str = None

    @property
    def ok(self):
        return self.error is None

    @property
    def key(self):
        """Sort key implementing the tie-break: smaller C, then gamma, then epsilon."""
        return (self.hyper.C, self.hyper.gamma or 0.0, self.hyper.epsilon)


@dataclass(frozen=True)
class GridResult:
    cells: tuple
    best: GridCell
    spec: GridSpec = None
    seed: int = 0

    def curve(self, param):
        """(value, lowest mean CV RMSE among successful cells with that value)."""
        get = {"C": lambda h: h.C, "epsilon": lambda h: h.epsilon, "gamma": lambda h: h.gamma}[param]
        best = {}
        for cell in self.cells:
            if not cell.ok:
                continue
            v = get(cell.hyper)
            best[v] = min(best.get(v, math.inf), cell.mean_rmse)
        return sorted(best.items())


def _run_cell(args):
    d, h, folds, cfg = args
    try:
        mean, per_fold = cross_validate(d, h, folds, cfg)
    except (FoldFailed, ValueError, ArithmeticError) as exc:
        return GridCell(h, error=f"{type(exc).__name__}: {exc}")
    return GridCell(h, mean, tuple(per_fold))


def grid_search(d: Dataset, g: GridSpec, cfg: SolverConfig = SolverConfig(), seed=0, n_jobs=1) -> GridResult:
    """Cross-validate every (C, epsilon, gamma) cell; failed cells are recorded, not raised."""
    k = d.n_samples if g.cv_k == LOO else g.cv_k
    folds = make_folds(d, k, seed)
    hypers = list(g.hyperparams())
    jobs = [(d, h, folds, cfg) for h in hypers]
    if n_jobs and n_jobs > 1:
        with ProcessPoolExecutor(max_workers=n_jobs) as pool:
            cells = list(pool.map(_run_cell, jobs))
    else:
        cells = [_run_cell(j) for j in jobs]
    for cell in cells:
        if not cell.ok:
            log.warning("cell C=%g eps=%g gamma=%s failed: %s", cell.hyper.C, cell.hyper.epsilon,
                        cell.hyper.gamma, cell.error)
    cells = tuple(sorted(cells, key=lambda c: c.key))
    good = [c for c in cells if c.ok]
    if not good:
        raise AllCellsFailed(f"all {len(cells)} grid cells failed")
    best = min(good, key=lambda c: (c.mean_rmse, *c.key))
    return GridResult(cells, best, g, seed)


def evaluate_report(model: TrainedModel, train: Dataset, test: Dataset):
    """Metrics on the training and test splits, as ``(train_report, test_report)``."""
    train_pred = predict(model, train.features)
    test_pred = predict(model, test.features)
    return metrics.evaluate(train.targets, train_pred), metrics.evaluate(test.targets, test_pred)


# -- serialization ----------------------------------------------------------

def _fmt(v):
    return format(float(v), ".17g")


def _row(values):
    return " ".join(_fmt(v) for v in values)


def save_model(model: TrainedModel, path):
    h = model.hyper
    lines = [
        f"ssvr-model {FORMAT_VERSION}",
        f"kernel {h.kernel.kind}",
        f"gamma {_fmt(h.kernel.gamma)}",
        f"C {_fmt(h.C)}",
        f"epsilon {_fmt(h.epsilon)}",
        f"alpha {_fmt(h.alpha)}",
        f"bias {_fmt(model.params.bias)}",
        f"iterations {model.iterations}",
        f"final_grad_norm {_fmt(model.final_grad_norm)}",
        f"termination {model.termination or '-'}",
        f"target_name {model.target_name or '-'}",
        f"n_features {model.n_features}",
    ]
    if model.feature_names is not None:
        lines.append("feature_names " + "\t".join(model.feature_names))
    lines += [
        "means " + _row(model.scaling.means),
        "stddevs " + _row(model.scaling.stddevs),
        f"coeffs {model.params.coeffs.shape[0]}",
        _row(model.params.coeffs),
        f"anchors {model.anchors.shape[0]} {model.anchors.shape[1]}",
    ]
    lines += [_row(r) for r in model.anchors]
    Path(path).write_text("\n".join(lines) + "\n")


def load_model(path) -> TrainedModel:
    lines = Path(path).read_text().splitlines()
    head = lines[0].split()
    if head[:1] != ["ssvr-model"] or len(head) != 2 or int(head[1]) != FORMAT_VERSION:
        raise ValueError(f"{path}: not an ssvr model file (format version {FORMAT_VERSION})")
    kv = {}
    i = 1
    while not lines[i].startswith("coeffs "):
        key, _, value = lines[i].partition(" ")
        kv[key] = value
        i += 1
    n_coef = int(lines[i].split()[1])
    coeffs = np.array([float(v) for v in lines[i + 1].split()]) if n_coef else np.empty(0)
    rows, cols = (int(v) for v in lines[i + 2].split()[1:])
    anchors = np.array([[float(v) for v in line.split()] for line in lines[i + 3:i + 3 + rows]])
    anchors = anchors.reshape(rows, cols)

    kind = kv["kernel"]
    kernel = KernelSpec.linear() if kind == LINEAR else KernelSpec.gaussian(float(kv["gamma"]))
    hyper = Hyperparams(C=float(kv["C"]), epsilon=float(kv["epsilon"]), alpha=float(kv["alpha"]), kernel=kernel)
    means = np.array([float(v) for v in kv["means"].split()])
    stds = np.array([float(v) for v in kv["stddevs"].split()])
    scaling = ScalingStats(means, stds, tuple(int(j) for j in np.flatnonzero(stds == 0)))
    names = tuple(kv["feature_names"].split("\t")) if "feature_names" in kv else None
    return TrainedModel(
        hyper=hyper,
        params=ModelParams(coeffs, float(kv["bias"])),
        scaling=scaling,
        anchors=anchors,
        iterations=int(kv["iterations"]),
        final_grad_norm=float(kv["final_grad_norm"]),
        termination="" if kv["termination"] == "-" else kv["termination"],
        feature_names=names,
        target_name=None if kv["target_name"] == "-" else kv["target_name"],
    )
