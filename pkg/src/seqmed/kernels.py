"""Base kernels and Gram-matrix evaluation.

Samples are stored row-wise: a feature matrix has shape ``(n_samples,
n_features)``.  Conventions are fixed here because downstream tolerances
depend on them:

* ``rbf``: ``k(x, x') = exp(-||x - x'||^2 / (2 * rbf_width**2))``.
* ``tfidf-linear``: each row of raw counts is scaled per column by a fitted
  idf weight, L2-normalized (all-zero rows stay zero), then the linear
  kernel applies.
* ``precomputed`` marks a spec whose Gram blocks are assembled by the
  caller (e.g. fed straight into a dual problem); :func:`gram` cannot
  evaluate it from raw features and rejects it.

``gram(spec, A, B)`` is bitwise the transpose of ``gram(spec, B, A)``: the
matrix product is always evaluated in a canonical operand order, because
BLAS is not transpose-stable at large sizes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

KERNEL_KINDS = ("linear", "rbf", "tfidf-linear", "precomputed")


@dataclass(frozen=True, eq=False)
class KernelSpec:
    """Which base kernel to use and its parameters.

    kind
        One of ``linear``, ``rbf``, ``tfidf-linear``, ``precomputed``.
    rbf_width
        Bandwidth sigma of the rbf kernel; required iff ``kind == "rbf"``.
    idf_weights
        Per-column nonnegative idf weights; required iff
        ``kind == "tfidf-linear"``.  Fit them with :func:`fit_tfidf`.
    """

    kind: str
    rbf_width: float | None = None
    idf_weights: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in KERNEL_KINDS:
            raise ValueError(f"unknown kernel kind {self.kind!r}; expected one of {KERNEL_KINDS}")
        if self.kind == "rbf":
            if self.rbf_width is None or not np.isfinite(self.rbf_width) or self.rbf_width <= 0:
                raise ValueError("rbf kernel requires rbf_width > 0")
        if self.kind == "tfidf-linear":
            if self.idf_weights is None:
                raise ValueError("tfidf-linear kernel requires idf_weights")
            w = np.asarray(self.idf_weights, dtype=float)
            if w.ndim != 1 or not np.all(np.isfinite(w)) or np.any(w < 0):
                raise ValueError("idf_weights must be a finite nonnegative 1-D vector")
            object.__setattr__(self, "idf_weights", w)


def as_feature_matrix(X, name: str = "X") -> np.ndarray:
    """Validate and return a 2-D float feature matrix (rows = samples)."""
    A = np.asarray(X, dtype=float)
    if A.ndim != 2:
        raise ValueError(f"{name} must be 2-D (n_samples, n_features), got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError(f"{name} contains non-finite entries")
    return A


def _tfidf_transform(A: np.ndarray, idf: np.ndarray) -> np.ndarray:
    Z = A * idf[np.newaxis, :]
    norms = np.linalg.norm(Z, axis=1)
    nz = norms > 0
    Z[nz] = Z[nz] / norms[nz, np.newaxis]
    return Z


def _canonical_dot(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    # Operand order fixed by (row count, bytes) so swapping A and B yields
    # the exact transpose.
    if A.shape[0] < B.shape[0]:
        return A @ B.T
    if A.shape[0] > B.shape[0]:
        return (B @ A.T).T
    a, b = A.tobytes(), B.tobytes()
    if a == b:
        S = A @ B.T
        return (S + S.T) / 2.0
    return A @ B.T if a < b else (B @ A.T).T


def _sq_distances(A: np.ndarray, B: np.ndarray, same: bool) -> np.ndarray:
    na = np.einsum("ij,ij->i", A, A)
    nb = na if same else np.einsum("ij,ij->i", B, B)
    d2 = na[:, np.newaxis] + nb[np.newaxis, :] - 2.0 * _canonical_dot(A, B)
    np.maximum(d2, 0.0, out=d2)
    if same:
        d2 = (d2 + d2.T) / 2.0
        np.fill_diagonal(d2, 0.0)
    return d2


def gram(spec: KernelSpec, A, B) -> np.ndarray:
    """Gram block: entry (i, j) is k(a_i, b_j) under ``spec``.

    For ``A is B`` the result is exactly symmetric; rbf self-grams have an
    exact unit diagonal.
    """
    same = A is B
    Am = as_feature_matrix(A, "A")
    Bm = Am if same else as_feature_matrix(B, "B")
    if Am.shape[1] != Bm.shape[1]:
        raise ValueError(
            f"feature dimension mismatch: A has {Am.shape[1]} columns, B has {Bm.shape[1]}"
        )
    if spec.kind == "linear":
        K = _canonical_dot(Am, Bm)
        if same:
            K = (K + K.T) / 2.0
        return K
    if spec.kind == "rbf":
        d2 = _sq_distances(Am, Bm, same)
        return np.exp(-d2 / (2.0 * spec.rbf_width**2))
    if spec.kind == "tfidf-linear":
        if Am.shape[1] != spec.idf_weights.shape[0]:
            raise ValueError(
                f"feature dimension mismatch: kernel fitted with "
                f"{spec.idf_weights.shape[0]} columns, input has {Am.shape[1]}"
            )
        Za = _tfidf_transform(Am, spec.idf_weights)
        Zb = Za if same else _tfidf_transform(Bm, spec.idf_weights)
        K = _canonical_dot(Za, Zb)
        if same:
            K = (K + K.T) / 2.0
        return K
    raise ValueError(
        "precomputed kernels carry no feature map; assemble Gram blocks "
        "directly (e.g. build a DualProblem from them)"
    )


def fit_tfidf(counts) -> KernelSpec:
    """Fit idf weights from a reference count corpus.

    ``idf_j = ln(N / df_j)`` with ``df_j`` the number of rows where column
    ``j`` is positive; columns that never occur get weight 0.
    """
    C = as_feature_matrix(counts, "counts")
    if C.size == 0:
        raise ValueError("counts must be a nonempty matrix")
    if np.any(C < 0):
        raise ValueError("counts must be nonnegative")
    n = C.shape[0]
    df = np.count_nonzero(C > 0, axis=0).astype(float)
    idf = np.zeros(C.shape[1])
    seen = df > 0
    idf[seen] = np.log(n / df[seen])
    return KernelSpec(kind="tfidf-linear", idf_weights=idf)
