"""Plot-ready CSV outputs: metric tables, parameter curves, scatter data."""

import csv
from pathlib import Path

TABLE_HEADER = (
    "Algorithm", "epsilon", "C", "gamma",
    "Train Error(R2)", "Test Error(R2)", "MAE", "SRE", "SEP", "REP(%)",
)


def _fmt(v):
    if v is None:
        return ""
    return format(float(v), ".17g")


def _writer(fh):
    return csv.writer(fh, lineterminator="\n")


def table_row(hyper, train_report, test_report, algorithm="e-SSVR"):
    """One row in the comparison-table layout; error columns use the test split."""
    return (
        algorithm, _fmt(hyper.epsilon), _fmt(hyper.C), _fmt(hyper.gamma),
        _fmt(train_report.r2), _fmt(test_report.r2),
        _fmt(test_report.mae), _fmt(test_report.sre), _fmt(test_report.sep), _fmt(test_report.rep_percent),
    )


def write_table(path, rows):
    with Path(path).open("w", newline="") as fh:
        w = _writer(fh)
        w.writerow(TABLE_HEADER)
        w.writerows(rows)


def write_scatter(path, train_obs, train_pred, test_obs, test_pred):
    with Path(path).open("w", newline="") as fh:
        w = _writer(fh)
        w.writerow(("split", "observed", "predicted"))
        for split, obs, pred in (("train", train_obs, train_pred), ("test", test_obs, test_pred)):
            for o, p in zip(obs, pred):
                w.writerow((split, _fmt(o), _fmt(p)))


def write_predictions(path, predictions):
    with Path(path).open("w", newline="") as fh:
        w = _writer(fh)
        w.writerow(("row", "predicted"))
        for i, p in enumerate(predictions):
            w.writerow((i, _fmt(p)))


def write_grid(path, result):
    k = max((len(c.fold_rmse) for c in result.cells), default=0)
    with Path(path).open("w", newline="") as fh:
        w = _writer(fh)
        w.writerow(("C", "epsilon", "gamma", "status", "mean_rmse", *(f"fold_{i}" for i in range(k)), "error"))
        for c in result.cells:
            h = c.hyper
            folds = [_fmt(v) for v in c.fold_rmse] + [""] * (k - len(c.fold_rmse))
            w.writerow((
                _fmt(h.C), _fmt(h.epsilon), _fmt(h.gamma), "ok" if c.ok else "failed",
                _fmt(c.mean_rmse) if c.ok else "", *folds, c.error or "",
            ))


def write_curve(path, result, param):
    with Path(path).open("w", newline="") as fh:
        w = _writer(fh)
        w.writerow((param, "mean_rmse"))
        for value, err in result.curve(param):
            w.writerow((_fmt(value), _fmt(err)))


def write_best(path, result):
    h = result.best.hyper
    with Path(path).open("w", newline="") as fh:
        w = _writer(fh)
        w.writerow(("kernel", "C", "epsilon", "gamma", "alpha", "mean_rmse", "seed"))
        w.writerow((h.kernel.kind, _fmt(h.C), _fmt(h.epsilon), _fmt(h.gamma), _fmt(h.alpha),
                    _fmt(result.best.mean_rmse), result.seed))


def write_grid_outputs(out_dir, result):
    """Write ``grid.csv``, ``best.csv`` and one ``curve_<param>.csv`` per swept parameter."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_grid(out / "grid.csv", result)
    write_best(out / "best.csv", result)
    spec = result.spec
    swept = {"C": spec.c_values, "epsilon": spec.epsilon_values}
    if spec.kernel == "gaussian":
        swept["gamma"] = spec.gamma_values
    written = [out / "grid.csv", out / "best.csv"]
    for name, values in swept.items():
        if len(values) > 1:
            write_curve(out / f"curve_{name}.csv", result, name)
            written.append(out / f"curve_{name}.csv")
    return written
