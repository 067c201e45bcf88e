"""Regression statistics: SRE, MAE, R^2, SEP, REP(%) and RMSE."""

from dataclasses import asdict, dataclass

import numpy as np


class MetricError(ValueError):
    pass


class ZeroObservedNorm(MetricError):
    pass


class ZeroVariance(MetricError):
    pass


class ZeroMeanObserved(MetricError):
    """REP(%) is undefined for a zero observed mean; ``sep``/``rmse`` are attached."""

    def __init__(self, sep, rmse):
        super().__init__("observed mean is zero; REP(%) undefined")
        self.sep = sep
        self.rmse = rmse


def _pair(observed, predicted):
    y = np.asarray(observed, dtype=float).ravel()
    yhat = np.asarray(predicted, dtype=float).ravel()
    if y.shape != yhat.shape:
        raise MetricError(f"observed has {y.size} values, predicted has {yhat.size}")
    if y.size == 0:
        raise MetricError("empty evaluation set")
    return y, yhat


def sre(observed, predicted):
    """2-norm relative error ``||y - yhat|| / ||y||``."""
    y, yhat = _pair(observed, predicted)
    norm = np.linalg.norm(y)
    if norm == 0:
        raise ZeroObservedNorm("observed vector has zero norm")
    return float(np.linalg.norm(y - yhat) / norm)


def mae(observed, predicted):
    y, yhat = _pair(observed, predicted)
    return float(np.mean(np.abs(yhat - y)))


def r2(observed, predicted):
    """Coefficient of determination, with the mean taken over ``observed``."""
    y, yhat = _pair(observed, predicted)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    if ss_tot == 0:
        raise ZeroVariance("observed values have zero variance")
    return 1.0 - float(np.sum((y - yhat) ** 2)) / ss_tot


def rmse(observed, predicted):
    y, yhat = _pair(observed, predicted)
    return float(np.sqrt(np.mean((yhat - y) ** 2)))


def sep_rep_rmse(observed, predicted):
    """Return ``(sep, rep_percent, rmse)``.

    SEP and RMSE share one formula and are returned as the same number.
    """
    y, yhat = _pair(observed, predicted)
    err = rmse(y, yhat)
    ybar = float(np.mean(y))
    if ybar == 0:
        raise ZeroMeanObserved(err, err)
    return err, 100.0 / ybar * err, err


@dataclass(frozen=True)
class MetricsReport:
    r2: float
    mae: float
    sre: float
    sep: float
    rep_percent: float
    rmse: float

    def as_dict(self):
        return asdict(self)


def evaluate(observed, predicted) -> MetricsReport:
    sep, rep, err = sep_rep_rmse(observed, predicted)
    return MetricsReport(
        r2=r2(observed, predicted),
        mae=mae(observed, predicted),
        sre=sre(observed, predicted),
        sep=sep,
        rep_percent=rep,
        rmse=err,
    )
