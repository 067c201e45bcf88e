"""CSV ingestion, feature standardization, train/test splits and CV folds."""

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np


class DataError(ValueError):
    pass


class MissingTarget(DataError):
    pass


class BadNumeric(DataError):
    """A cell that does not parse as a finite number.

    ``row`` is the 1-based line number in the file (the header is line 1).
    """

    def __init__(self, row, column, value):
        super().__init__(f"line {row}, column {column!r}: bad numeric value {value!r}")
        self.row = row
        self.column = column
        self.value = value


class ColumnMismatch(DataError):
    pass


@dataclass(frozen=True, eq=False)
class Dataset:
    features: np.ndarray
    targets: np.ndarray
    feature_names: tuple = None
    target_name: str = None

    def __post_init__(self):
        X = np.asarray(self.features, dtype=float)
        y = np.asarray(self.targets, dtype=float).ravel()
        if X.ndim != 2:
            raise DataError(f"features must be 2-D, got shape {X.shape}")
        if X.shape[0] != y.shape[0]:
            raise DataError(f"{X.shape[0]} feature rows but {y.shape[0]} targets")
        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
            raise DataError("dataset contains non-finite values")
        if self.feature_names is not None:
            names = tuple(self.feature_names)
            if len(names) != X.shape[1]:
                raise DataError(f"{len(names)} feature names for {X.shape[1]} columns")
            object.__setattr__(self, "feature_names", names)
        object.__setattr__(self, "features", X)
        object.__setattr__(self, "targets", y)

    @property
    def n_samples(self):
        return self.features.shape[0]

    @property
    def n_features(self):
        return self.features.shape[1]

    def subset(self, rows):
        rows = np.asarray(rows, dtype=int)
        return Dataset(self.features[rows], self.targets[rows], self.feature_names, self.target_name)


@dataclass(frozen=True, eq=False)
class ScalingStats:
    means: np.ndarray
    stddevs: np.ndarray
    constant_columns: tuple = ()


@dataclass(frozen=True)
class SplitPlan:
    train_indices: tuple
    test_indices: tuple


@dataclass(frozen=True)
class FoldPlan:
    fold_assignments: tuple
    k: int

    def folds(self):
        """Yield ``(fold_id, train_rows, test_rows)``."""
        a = np.asarray(self.fold_assignments)
        for f in range(self.k):
            yield f, np.flatnonzero(a != f), np.flatnonzero(a == f)


def _parse(value, line, column):
    try:
        x = float(value)
    except ValueError:
        raise BadNumeric(line, column, value) from None
    if not math.isfinite(x):
        raise BadNumeric(line, column, value)
    return x


def _resolve_column(header, col, what):
    if col is None:
        return None
    if isinstance(col, int) or (isinstance(col, str) and col.isdigit() and col not in header):
        idx = int(col)
        if not 0 <= idx < len(header):
            raise MissingTarget(f"{what} index {idx} out of range for {len(header)} columns")
        return idx
    if col not in header:
        raise MissingTarget(f"{what} {col!r} not in header {header[:5]}...")
    return header.index(col)


def read_table(path):
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"no such file: {path}")
    with path.open(newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise DataError(f"{path} is empty")
    return rows[0], rows[1:]


def load_csv(path, target_column, id_column=None) -> Dataset:
    """Read a comma-separated file with a header row.

    ``target_column`` and ``id_column`` are names or zero-based indices.
    Every other column must be numeric and becomes a feature, in file order.
    """
    header, body = read_table(path)
    t = _resolve_column(header, target_column, "target column")
    skip = {t}
    i = _resolve_column(header, id_column, "id column")
    if i is not None:
        skip.add(i)
    keep = [j for j in range(len(header)) if j not in skip]
    X = np.empty((len(body), len(keep)))
    y = np.empty(len(body))
    for r, row in enumerate(body):
        line = r + 2
        if len(row) != len(header):
            raise DataError(f"line {line}: expected {len(header)} fields, got {len(row)}")
        y[r] = _parse(row[t], line, header[t])
        for c, j in enumerate(keep):
            X[r, c] = _parse(row[j], line, header[j])
    return Dataset(X, y, tuple(header[j] for j in keep), header[t])


def load_features(path, feature_names):
    """Read the named feature columns from a CSV (other columns are ignored)."""
    header, body = read_table(path)
    missing = [n for n in feature_names if n not in header]
    if missing:
        raise ColumnMismatch(f"columns missing from {path}: {missing[:5]}")
    cols = [header.index(n) for n in feature_names]
    X = np.empty((len(body), len(cols)))
    for r, row in enumerate(body):
        for c, j in enumerate(cols):
            X[r, c] = _parse(row[j], r + 2, header[j])
    return X


def write_csv(path, dataset: Dataset):
    names = dataset.feature_names or tuple(f"x{j}" for j in range(dataset.n_features))
    target = dataset.target_name or "y"
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([*names, target])
        for x, y in zip(dataset.features, dataset.targets):
            w.writerow([format(v, ".17g") for v in x] + [format(y, ".17g")])


def fit_scaling(d: Dataset, rows) -> ScalingStats:
    """Column means and population standard deviations over ``rows`` only."""
    rows = np.asarray(rows, dtype=int)
    if rows.size == 0:
        raise DataError("cannot fit scaling on an empty row set")
    X = d.features[rows]
    means = X.mean(axis=0)
    stds = X.std(axis=0)
    constant = np.flatnonzero(np.ptp(X, axis=0) == 0)
    stds[constant] = 0.0
    return ScalingStats(means, stds, tuple(int(j) for j in constant))


def scale_matrix(X, s: ScalingStats):
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != s.means.shape[0]:
        raise ColumnMismatch(f"expected {s.means.shape[0]} feature columns, got shape {X.shape}")
    safe = np.where(s.stddevs > 0, s.stddevs, 1.0)
    Z = (X - s.means) / safe
    Z[:, s.stddevs == 0] = 0.0
    return Z


def apply_scaling(d: Dataset, s: ScalingStats) -> Dataset:
    """Standardize features; targets pass through unchanged."""
    return Dataset(scale_matrix(d.features, s), d.targets, d.feature_names, d.target_name)


def unscale_matrix(Z, s: ScalingStats):
    """Inverse of :func:`scale_matrix` (constant columns return their value)."""
    return np.asarray(Z, dtype=float) * s.stddevs + s.means


def _target_order(d: Dataset):
    return np.argsort(d.targets, kind="stable")


def similarity_split(d: Dataset, test_fraction=0.25, seed=0) -> SplitPlan:
    """Target-sorted systematic split.

    Rows are ranked by target and cut into ``round(m * test_fraction)``
    consecutive blocks of nearly equal size; one seeded-random row of each
    block goes to the test set, so both sets span the whole target range.
    """
    m = d.n_samples
    if m < 4:
        raise DataError("need at least 4 rows to split")
    if not 0 < test_fraction < 1:
        raise DataError(f"test_fraction must lie in (0, 1), got {test_fraction}")
    n_test = min(max(int(round(m * test_fraction)), 1), m - 1)
    rng = np.random.default_rng(seed)
    order = _target_order(d)
    edges = (np.arange(n_test + 1) * m) // n_test
    picks = [order[lo + rng.integers(hi - lo)] for lo, hi in zip(edges[:-1], edges[1:])]
    test = np.sort(np.asarray(picks, dtype=int))
    train = np.setdiff1d(np.arange(m), test)
    return SplitPlan(tuple(int(i) for i in train), tuple(int(i) for i in test))


def make_folds(d: Dataset, k=10, seed=0) -> FoldPlan:
    """Target-stratified systematic folds.

    Rows are ranked by target and taken in blocks of ``k``; within a block the
    rank offset picks the fold, running backwards on odd blocks so no fold is
    always handed the lowest target of each block.  A seeded shift rotates
    the fold labels.
    """
    m = d.n_samples
    if k < 2 or m < k:
        raise DataError(f"need 2 <= k <= m, got k={k}, m={m}")
    shift = int(np.random.default_rng(seed).integers(k))
    rank = np.arange(m)
    pos = rank % k
    pos = np.where((rank // k) % 2 == 1, k - 1 - pos, pos)
    assignment = np.empty(m, dtype=int)
    assignment[_target_order(d)] = (pos + shift) % k
    return FoldPlan(tuple(int(a) for a in assignment), int(k))
