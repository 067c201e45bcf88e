"""Seeded synthetic datasets used by the tests and the shipped fixtures.

Run ``python -m ssvr.synthetic OUT_DIR`` to regenerate the descriptor-shaped
fixture files.
"""

import sys
from pathlib import Path

import numpy as np

from .data import Dataset, write_csv


def make_linear(m=100, n=10, seed=0, noise=0.0, bias=0.5):
    """``y = A w + bias (+ noise)`` with standard normal ``A`` and ``w``."""
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(m, n))
    w = rng.normal(size=n)
    y = A @ w + bias + noise * rng.normal(size=m)
    return Dataset(A, y, tuple(f"x{j}" for j in range(n)), "y"), w


def make_sinc(m=100, noise=0.05, seed=0, low=-5.0, high=5.0):
    """``y = sin(x) / x + noise`` with ``x`` uniform on ``[low, high]``."""
    rng = np.random.default_rng(seed)
    x = rng.uniform(low, high, size=m)
    y = np.sinc(x / np.pi) + noise * rng.normal(size=m)
    return Dataset(x[:, None], y, ("x",), "y")


def make_descriptors(m=100, n=254, seed=0, n_informative=8, n_constant=6, noise=0.1):
    """Descriptor-like table with a pIC50-like target in roughly ``[-1, 3]``.

    A handful of columns drive the target nonlinearly, some are correlated
    copies, a few are constant (as exported descriptor sets often are), and
    the rest are noise.
    """
    rng = np.random.default_rng(seed)
    latent = rng.normal(size=(m, n_informative))
    X = rng.normal(size=(m, n))
    X[:, :n_informative] = latent
    n_corr = min(n_informative, n - n_informative)
    X[:, n_informative:n_informative + n_corr] = latent[:, :n_corr] + 0.3 * rng.normal(size=(m, n_corr))
    if n_constant:
        X[:, n - n_constant:] = rng.integers(0, 5, size=n_constant)
    coef = rng.normal(size=n_informative)
    raw = latent @ coef + 0.5 * np.sin(latent[:, 0]) * latent[:, 1] + noise * rng.normal(size=m)
    y = -1.0 + 4.0 * (raw - raw.min()) / (raw.max() - raw.min())
    names = tuple(f"D{j:03d}" for j in range(n))
    return Dataset(X, y, names, "pIC50")


def reduced(d: Dataset, n=71):
    """First ``n`` descriptor columns of a descriptor table."""
    return Dataset(d.features[:, :n], d.targets, d.feature_names[:n], d.target_name)


def write_fixtures(out_dir, seed=0):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    full = make_descriptors(seed=seed)
    write_csv(out / "descriptors_full.csv", full)
    write_csv(out / "descriptors_reduced.csv", reduced(full))
    write_csv(out / "sinc.csv", make_sinc(seed=seed))
    write_csv(out / "linear.csv", make_linear(seed=seed)[0])


if __name__ == "__main__":
    write_fixtures(sys.argv[1] if len(sys.argv) > 1 else "fixtures")
