"""Gaussian kernel evaluation and Gram matrices."""

from dataclasses import dataclass

import numpy as np

from .linalg import DimensionMismatch, as_matrix

LINEAR = "linear"
GAUSSIAN = "gaussian"


@dataclass(frozen=True)
class KernelSpec:
    """Kernel kind and width; ``gamma`` is ignored for the linear kind."""

    kind: str = LINEAR
    gamma: float = 0.0

    def __post_init__(self):
        kind = self.kind.lower()
        object.__setattr__(self, "kind", kind)
        if kind not in (LINEAR, GAUSSIAN):
            raise ValueError(f"unknown kernel kind {self.kind!r}")
        if kind == GAUSSIAN and not (np.isfinite(self.gamma) and self.gamma > 0):
            raise ValueError(f"gaussian kernel needs gamma > 0, got {self.gamma}")

    @classmethod
    def linear(cls):
        return cls(LINEAR, 0.0)

    @classmethod
    def gaussian(cls, gamma):
        return cls(GAUSSIAN, float(gamma))

    @property
    def is_linear(self):
        return self.kind == LINEAR


def squared_distances(B, A):
    """Pairwise ``||B_i - A_j||^2``, clamped at zero."""
    bb = np.einsum("ij,ij->i", B, B)
    aa = np.einsum("ij,ij->i", A, A)
    d2 = bb[:, None] + aa[None, :] - 2.0 * (B @ A.T)
    return np.maximum(d2, 0.0)


def gram_matrix(A, spec: KernelSpec):
    """m x m kernel matrix ``exp(-gamma ||A_i - A_j||^2)`` with exact symmetry.

    For the linear kind the design matrix itself is the model input, so ``A``
    is returned unchanged.
    """
    A = as_matrix(A)
    if A.shape[0] == 0:
        raise ValueError("empty design matrix")
    if spec.is_linear:
        return A
    G = np.exp(-spec.gamma * squared_distances(A, A))
    # mirror the upper triangle and pin the diagonal
    G = np.triu(G, 1)
    G = G + G.T
    np.fill_diagonal(G, 1.0)
    return G


def kernel_rows(B, A, spec: KernelSpec):
    """Kernel values between query rows ``B`` and anchor rows ``A``."""
    B, A = as_matrix(B), as_matrix(A)
    if B.shape[1] != A.shape[1]:
        raise DimensionMismatch(f"queries have {B.shape[1]} columns, anchors have {A.shape[1]}")
    if spec.is_linear:
        return B
    if B is A or (B.shape == A.shape and np.array_equal(B, A)):
        return gram_matrix(A, spec)
    return np.exp(-spec.gamma * squared_distances(B, A))
