"""Command line interface: ``ssvr {train,predict,cv,grid,eval,split}``."""

import argparse
import csv
import logging
import sys
from pathlib import Path

import numpy as np

from . import reports
from .data import load_csv, load_features, make_folds, read_table, similarity_split
from .kernel import GAUSSIAN, LINEAR, KernelSpec
from .model import (
    LOO,
    GridSpec,
    cross_validate,
    evaluate_report,
    fit,
    grid_search,
    load_model,
    predict,
    save_model,
)
from .objective import Hyperparams
from .solver import SolverConfig

log = logging.getLogger("ssvr")


def _floats(text):
    return [float(v) for v in text.split(",") if v.strip()]


def _add_data(p, target=True):
    p.add_argument("--data", required=True, help="CSV file with a header row")
    if target:
        p.add_argument("--target", required=True, help="target column name or zero-based index")
        p.add_argument("--id-col", default=None, help="identifier column to ignore")


def _add_hyper(p):
    p.add_argument("--kernel", choices=(LINEAR, GAUSSIAN), default=GAUSSIAN)
    p.add_argument("--c", type=float, default=1000.0)
    p.add_argument("--epsilon", type=float, default=0.1)
    p.add_argument("--alpha", type=float, default=5.0)
    p.add_argument("--gamma", type=float, default=0.02)


def _add_solver(p):
    p.add_argument("--grad-tol", type=float, default=1e-6)
    p.add_argument("--max-iters", type=int, default=200)


def _add_cv(p):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--k", type=int, default=10, help="number of folds (default 10)")
    g.add_argument("--loo", action="store_true", help="leave-one-out cross-validation")
    p.add_argument("--seed", type=int, default=0)


def _hyper(args):
    kernel = KernelSpec.linear() if args.kernel == LINEAR else KernelSpec.gaussian(args.gamma)
    return Hyperparams(C=args.c, epsilon=args.epsilon, alpha=args.alpha, kernel=kernel)


def _cfg(args):
    return SolverConfig(grad_tol=args.grad_tol, max_iters=args.max_iters)


def cmd_train(args):
    d = load_csv(args.data, args.target, args.id_col)
    model = fit(d, _hyper(args), _cfg(args))
    save_model(model, args.out_model)
    print(f"trained on {d.n_samples}x{d.n_features}: {model.termination} after {model.iterations} "
          f"iterations, |grad|_inf={model.final_grad_norm:.3e}")


def cmd_predict(args):
    model = load_model(args.model)
    if model.feature_names is not None:
        X = load_features(args.data, model.feature_names)
    else:
        _, body = read_table(args.data)
        X = np.array([[float(v) for v in row] for row in body])
    reports.write_predictions(args.out, predict(model, X))


def cmd_cv(args):
    d = load_csv(args.data, args.target, args.id_col)
    k = d.n_samples if args.loo else args.k
    mean, per_fold = cross_validate(d, _hyper(args), make_folds(d, k, args.seed), _cfg(args))
    print(f"mean_rmse {mean:.17g}")
    for i, v in enumerate(per_fold):
        print(f"fold_{i} {v:.17g}")


def cmd_grid(args):
    d = load_csv(args.data, args.target, args.id_col)
    spec = GridSpec(
        c_values=tuple(_floats(args.c_list)),
        epsilon_values=tuple(_floats(args.epsilon_list)),
        gamma_values=tuple(_floats(args.gamma_list)) if args.kernel == GAUSSIAN else (),
        kernel=args.kernel,
        cv_k=LOO if args.loo else args.k,
        alpha=args.alpha,
    )
    result = grid_search(d, spec, _cfg(args), seed=args.seed, n_jobs=args.jobs)
    for path in reports.write_grid_outputs(args.out_dir, result):
        print(path)
    h = result.best.hyper
    print(f"best C={h.C:g} epsilon={h.epsilon:g} gamma={h.gamma} mean_rmse={result.best.mean_rmse:.6g}")


def cmd_eval(args):
    model = load_model(args.model)
    target = args.target or model.target_name
    if target is None:
        raise ValueError("--target is required for models saved without a target name")
    train = load_csv(args.train, target, args.id_col)
    test = load_csv(args.test, target, args.id_col)
    train_rep, test_rep = evaluate_report(model, train, test)
    reports.write_table(args.out_table, [reports.table_row(model.hyper, train_rep, test_rep)])
    if args.out_scatter:
        reports.write_scatter(
            args.out_scatter,
            train.targets, predict(model, train.features),
            test.targets, predict(model, test.features),
        )
    print(",".join(reports.TABLE_HEADER))
    print(",".join(reports.table_row(model.hyper, train_rep, test_rep)))


def cmd_split(args):
    d = load_csv(args.data, args.target, args.id_col)
    plan = similarity_split(d, args.test_fraction, args.seed)
    header, body = read_table(args.data)
    for path, rows in ((args.out_train, plan.train_indices), (args.out_test, plan.test_indices)):
        with Path(path).open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            w.writerows(body[i] for i in rows)
    print(f"train {len(plan.train_indices)} rows -> {args.out_train}")
    print(f"test {len(plan.test_indices)} rows -> {args.out_test}")


def build_parser():
    parser = argparse.ArgumentParser(prog="ssvr", description="Smooth epsilon-support vector regression")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="fit a model and save it")
    _add_data(p)
    _add_hyper(p)
    _add_solver(p)
    p.add_argument("--out-model", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="predict with a saved model")
    p.add_argument("--model", required=True)
    _add_data(p, target=False)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("cv", help="cross-validated RMSE for one hyperparameter setting")
    _add_data(p)
    _add_hyper(p)
    _add_solver(p)
    _add_cv(p)
    p.set_defaults(func=cmd_cv)

    p = sub.add_parser("grid", help="cross-validated grid search over C, epsilon and gamma")
    _add_data(p)
    p.add_argument("--kernel", choices=(LINEAR, GAUSSIAN), default=GAUSSIAN)
    p.add_argument("--alpha", type=float, default=5.0)
    p.add_argument("--c-list", default="1000,8350,1000000,10000000")
    p.add_argument("--epsilon-list", default="0.1")
    p.add_argument("--gamma-list", default="0.01,0.02,0.03,0.04,0.05,0.06,0.07,0.08,0.09")
    _add_solver(p)
    _add_cv(p)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_grid)

    p = sub.add_parser("eval", help="metric table and scatter data for a saved model")
    p.add_argument("--model", required=True)
    p.add_argument("--train", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--target", default=None, help="defaults to the target name stored in the model")
    p.add_argument("--id-col", default=None)
    p.add_argument("--out-table", required=True)
    p.add_argument("--out-scatter", default=None)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("split", help="similarity-preserving train/test split")
    _add_data(p)
    p.add_argument("--test-fraction", type=float, default=0.25)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-train", required=True)
    p.add_argument("--out-test", required=True)
    p.set_defaults(func=cmd_split)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except Exception as exc:
        print(f"ssvr {args.command}: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
