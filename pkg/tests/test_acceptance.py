"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v``; the verdict lines are
repeated under "acceptance criteria" at the end of the run.
"""

import math
import time
from pathlib import Path

import mpmath as mp
import numpy as np
import pytest

from oracles import central_diff, central_jacobian, mp_gradient, mp_phi, nonsmooth_minimizer_2d, rel_err
from problems import random_point, random_problem
from ssvr import metrics
from ssvr.data import Dataset, fit_scaling, make_folds, similarity_split
from ssvr.kernel import KernelSpec
from ssvr.model import GridSpec, fit, grid_search, predict, training_problem
from ssvr.objective import Hyperparams, Problem, objective_gradient, objective_hessian, objective_value
from ssvr.reports import write_grid_outputs
from ssvr.smoothing import LOG2, eps_loss_sq, p_smooth
from ssvr.solver import GRAD_TOLERANCE_MET, minimize
from ssvr.synthetic import make_linear, make_sinc

DELTA = 0.05


# -- 1: smoothing bound ------------------------------------------------------

def test_criterion_1_smoothing_bound(verdict):
    rng = np.random.default_rng(2024)
    n = 100_000
    t0 = time.perf_counter()
    alpha = rng.uniform(1, 500, n)
    eps = rng.uniform(0, 2, n)
    sigma = rng.uniform(0, 5, n)
    x = rng.uniform(-1, 1, n) * (sigma + eps)
    # p_smooth broadcasts over an array of alphas
    smooth = p_smooth(x - eps, alpha) ** 2 + p_smooth(-x - eps, alpha) ** 2
    gap = smooth - eps_loss_sq(x, eps)
    t = LOG2 / alpha
    bound = 2 * t * t + 2 * sigma * t
    violations = int(np.sum((gap < 0) | (gap > bound)))
    elapsed = time.perf_counter() - t0
    ok = violations == 0 and elapsed < 1.0
    verdict(1, ok, f"{violations} violations in {n} draws, {elapsed:.3f}s (limit 1s)")
    assert ok


# -- 2: derivative oracles ---------------------------------------------------

def test_criterion_2_derivatives(verdict):
    rng = np.random.default_rng(7)
    t0 = time.perf_counter()
    worst_g = worst_h = 0.0
    for _ in range(100):
        p = random_problem(rng, m=int(rng.integers(2, 31)), n=int(rng.integers(1, 9)))
        x = random_point(rng, p)
        fd_g = central_diff(lambda v: objective_value(p, v), x)
        fd_h = central_jacobian(lambda v: objective_gradient(p, v), x)
        worst_g = max(worst_g, rel_err(objective_gradient(p, x), fd_g))
        worst_h = max(worst_h, rel_err(objective_hessian(p, x), fd_h))
    elapsed = time.perf_counter() - t0
    ok = worst_g <= 1e-5 and worst_h <= 1e-4 and elapsed < 10
    verdict(2, ok, f"max rel err gradient {worst_g:.2e} (<=1e-5), Hessian {worst_h:.2e} (<=1e-4), {elapsed:.2f}s")
    assert ok


# -- solver runs shared with criterion 5 -------------------------------------

@pytest.fixture(scope="module")
def convergence_runs():
    rng = np.random.default_rng(11)
    p = random_problem(rng, m=40, n=6, C=100.0, epsilon=0.1, alpha=5.0)
    t0 = time.perf_counter()
    runs = [minimize(p, rng.normal(scale=10.0, size=p.n_params), record_iterates=True) for _ in range(100)]
    return p, runs, time.perf_counter() - t0


def tiny_instance():
    rng = np.random.default_rng(5)
    a = rng.normal(size=5)
    y = 1.5 * a - 0.4 + 0.5 * rng.normal(size=5)
    return a, y, 0.2


@pytest.fixture(scope="module")
def alpha_runs():
    a, y, eps = tiny_instance()
    t0 = time.perf_counter()
    runs = {}
    for alpha in (5.0, 50.0, 500.0):
        p = Problem(a[:, None], y, Hyperparams(C=1.0, epsilon=eps, alpha=alpha))
        runs[alpha] = (p, minimize(p, record_iterates=True))
    return runs, time.perf_counter() - t0


def split(d, seed=0):
    plan = similarity_split(d, 0.25, seed)
    return d.subset(plan.train_indices), d.subset(plan.test_indices)


@pytest.fixture(scope="module")
def regression_runs():
    t0 = time.perf_counter()
    out = {}
    lin_train, lin_test = split(make_linear(m=100, n=10, seed=0)[0])
    sinc_train, sinc_test = split(make_sinc(m=100, noise=0.05, seed=0))
    cases = {
        "linear": (lin_train, lin_test, Hyperparams(C=1e3, epsilon=0.1)),
        "sinc C=100": (sinc_train, sinc_test, Hyperparams(C=100.0, epsilon=0.1, kernel=KernelSpec.gaussian(0.5))),
        "sinc C=1e3": (sinc_train, sinc_test, Hyperparams(C=1e3, epsilon=0.1, kernel=KernelSpec.gaussian(0.5))),
        "sinc C=1e7": (sinc_train, sinc_test, Hyperparams(C=1e7, epsilon=0.1, kernel=KernelSpec.gaussian(0.5))),
    }
    for name, (train, test, h) in cases.items():
        model = fit(train, h)
        out[name] = (train, test, model)
    elapsed = time.perf_counter() - t0
    # the same problems again with iterates recorded, for criterion 5
    traced = {}
    for name, (train, _, h) in cases.items():
        _, _, p = training_problem(train, h)
        params, report = minimize(p, record_iterates=True)
        assert np.array_equal(params.to_vector(), out[name][2].params.to_vector())
        traced[name] = (p, (params, report))
    return out, traced, elapsed


# -- 3: global convergence and uniqueness ------------------------------------

def test_criterion_3_global_convergence(verdict, convergence_runs):
    p, runs, elapsed = convergence_runs
    converged = sum(r.termination == GRAD_TOLERANCE_MET and r.iterations <= 200 for _, r in runs)
    finals = np.array([params.to_vector() for params, _ in runs])
    spread = float(np.max(finals.max(axis=0) - finals.min(axis=0)))
    ok = converged == 100 and spread <= 1e-6 and elapsed < 30
    worst = max(r.iterations for _, r in runs)
    verdict(3, ok, f"{converged}/100 converged (max {worst} iterations), pairwise spread {spread:.2e} "
                   f"(<=1e-6), {elapsed:.2f}s")
    assert ok


# -- 4: alpha-convergence bound ----------------------------------------------

def test_criterion_4_alpha_bound(verdict, alpha_runs):
    a, y, eps = tiny_instance()
    Z = np.column_stack([a, np.ones(5)])
    t0 = time.perf_counter()
    ref = nonsmooth_minimizer_2d(Z, y, eps, C=1.0)
    # strong convexity (modulus 1) turns a gradient norm into a distance bound
    r = Z @ ref - y
    d = 2 * np.maximum(0, r - eps) - 2 * np.maximum(0, -r - eps)
    oracle_err = float(np.linalg.norm(ref + 0.5 * Z.T @ d))
    xi = float(np.max(np.abs(r)))
    runs, solve_time = alpha_runs
    rows, ok = [], oracle_err <= 1e-6
    for alpha, (p, (params, report)) in runs.items():
        t = LOG2 / alpha
        dist2 = float(np.sum((params.to_vector() - ref) ** 2))
        bound = 5 * (t * t + xi * t)
        ok &= report.converged and dist2 <= bound
        rows.append(f"alpha={alpha:g}: {dist2:.2e}<={bound:.2e}")
    elapsed = time.perf_counter() - t0 + solve_time
    ok &= elapsed < 60
    verdict(4, ok, f"oracle accuracy {oracle_err:.1e}; " + "; ".join(rows) + f"; {elapsed:.2f}s")
    assert ok


# -- 6: end-to-end regression quality ----------------------------------------

def test_criterion_6_regression_quality(verdict, regression_runs):
    out, _, elapsed = regression_runs
    train, test, model = out["linear"]
    lin_r2 = metrics.r2(test.targets, predict(model, test.features))
    train, test, model = out["sinc C=100"]
    sinc_rmse = metrics.rmse(test.targets, predict(model, test.features))
    sinc_train_r2 = metrics.r2(train.targets, predict(model, train.features))
    sinc_test_r2 = metrics.r2(test.targets, predict(model, test.features))
    robust = [out[k][2].termination for k in ("sinc C=1e3", "sinc C=1e7")]
    ok_a = lin_r2 >= 0.999
    ok_b = sinc_rmse <= 0.1 and sinc_train_r2 > sinc_test_r2
    ok_c = all(t == GRAD_TOLERANCE_MET for t in robust)
    ok = ok_a and ok_b and ok_c and elapsed < 60
    verdict(6, ok, f"(a) linear test R2 {lin_r2:.6f}; (b) sinc test RMSE {sinc_rmse:.4f}, "
                   f"train R2 {sinc_train_r2:.4f} vs test R2 {sinc_test_r2:.4f} (need >); (c) {robust}; {elapsed:.2f}s")
    assert ok


# -- 5: monotone descent and Armijo validity ---------------------------------

def check_run(p, report, dps=50):
    """Re-verify one run in high precision; returns the number of violations."""
    Z, y, h = p.augmented, p.targets, p.hyper
    C = p.weight
    bad = 0
    exact = report.exact_objective_trace()
    bad += sum(not b < a for a, b in zip(exact, exact[1:]))
    bad += sum(not b <= a for a, b in zip(report.objective_trace, report.objective_trace[1:]))
    bad += sum(not (s <= 1 and s == 2.0 ** round(math.log2(s))) for s in report.step_sizes)
    with mp.workdps(dps):
        phis = [mp_phi(Z, y, C, h.epsilon, h.alpha, x, dps) for x in report.iterates]
        for k in range(report.iterations):
            x0, x1 = report.iterates[k], report.iterates[k + 1]
            s = [mp.mpf(float(b)) - mp.mpf(float(a)) for a, b in zip(x0, x1)]
            g = mp_gradient(Z, y, C, h.epsilon, h.alpha, x0, dps)
            slope = mp.fsum(gi * si for gi, si in zip(g, s))
            decrease = phis[k] - phis[k + 1]
            if not (decrease > 0 and slope < 0 and decrease >= -DELTA * slope):
                bad += 1
    return bad


def test_criterion_5_descent_and_armijo(verdict, convergence_runs, alpha_runs, regression_runs):
    runs = [(convergence_runs[0], r) for _, r in convergence_runs[1]]
    runs += [(p, r) for p, (_, r) in alpha_runs[0].values()]
    runs += [(p, r) for p, (_, r) in regression_runs[1].values()]
    steps = sum(r.iterations for _, r in runs)
    violations = sum(check_run(p, r) for p, r in runs)
    ties = sum(sum(b == a for a, b in zip(r.objective_trace, r.objective_trace[1:])) for _, r in runs)
    ok = violations == 0
    note = f"; {ties} float64 ties resolved by the exact trace" if ties else ""
    verdict(5, ok, f"{violations} violations over {len(runs)} runs / {steps} accepted steps "
                   f"(re-checked at 50 digits){note}")
    assert ok


# -- 7: metrics identities ---------------------------------------------------

def test_criterion_7_metrics(verdict):
    rng = np.random.default_rng(3)
    t0 = time.perf_counter()
    bad = 0
    for _ in range(1000):
        n = int(rng.integers(2, 60))
        y = rng.normal(loc=rng.uniform(-3, 3), scale=rng.uniform(0.1, 3), size=n)
        yhat = y + rng.normal(scale=rng.uniform(0, 2), size=n)
        rep = metrics.evaluate(y, yhat) if y.mean() != 0 else None
        rmse, mae, r2 = metrics.rmse(y, yhat), metrics.mae(y, yhat), metrics.r2(y, yhat)
        sep = metrics.sep_rep_rmse(y, yhat)[0]
        identity = 1 - rmse ** 2 * n / np.sum((y - y.mean()) ** 2)
        bad += sep != rmse
        bad += rep is not None and rep.sep != rep.rmse
        bad += rmse < mae
        bad += abs(r2 - identity) > 1e-12 * max(1.0, abs(r2))
    ex = metrics.evaluate([1, 2, 3], [2, 2, 2])
    example_ok = (
        math.isclose(ex.mae, 2 / 3, rel_tol=1e-15)
        and ex.r2 == 0
        and math.isclose(ex.rmse, math.sqrt(2 / 3), rel_tol=1e-15)
        and math.isclose(ex.rep_percent, 50 * math.sqrt(2 / 3), rel_tol=1e-15)
    )
    elapsed = time.perf_counter() - t0
    ok = bad == 0 and example_ok and elapsed < 1
    verdict(7, ok, f"{bad} identity violations in 1000 pairs; worked example "
                   f"{'ok' if example_ok else 'wrong'}; {elapsed:.3f}s")
    assert ok


# -- 8: determinism and leakage guard ----------------------------------------

def test_criterion_8_determinism_and_leakage(verdict, tmp_path):
    t0 = time.perf_counter()
    d = make_sinc(m=40, seed=8)
    same_split = similarity_split(d, 0.25, 4) == similarity_split(d, 0.25, 4)
    same_folds = make_folds(d, 5, 4) == make_folds(d, 5, 4)
    g = GridSpec(c_values=(10.0, 100.0), gamma_values=(0.3, 0.5), cv_k=5)
    files = []
    for sub in ("first", "second"):
        paths = write_grid_outputs(tmp_path / sub, grid_search(d, g, seed=4))
        files.append({Path(p).name: Path(p).read_bytes() for p in paths})
    same_grid = files[0] == files[1] and len(files[0]) == 4

    # scaling statistics depend on the training rows only
    plan = similarity_split(d, 0.25, 4)
    train = np.asarray(plan.train_indices)
    base = fit_scaling(d, train)
    rng = np.random.default_rng(0)
    untouched = True
    for _ in range(20):
        X = d.features.copy()
        X[list(plan.test_indices)] = rng.normal(scale=1e3, size=(len(plan.test_indices), d.n_features))
        other = fit_scaling(Dataset(X, d.targets), train)
        untouched &= np.array_equal(base.means, other.means) and np.array_equal(base.stddevs, other.stddevs)
    try:
        fit_scaling(d)
        needs_rows = False
    except TypeError:
        needs_rows = True
    elapsed = time.perf_counter() - t0
    ok = same_split and same_folds and same_grid and untouched and needs_rows and elapsed < 5
    verdict(8, ok, f"split {same_split}, folds {same_folds}, grid files {same_grid}, "
                   f"scaling leak-free {untouched}, row set required {needs_rows}; {elapsed:.2f}s")
    assert ok


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v", "-s"]))
