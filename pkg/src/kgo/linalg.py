"""Dense symmetric eigendecomposition, generalized eigenproblems, SVD, SPD roots.

All routines enforce a deterministic sign convention (the largest-magnitude
entry of every eigenvector / left singular vector is positive) so repeated
runs and serialized models are reproducible bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, NumericalError

_SYM_TOL = 1e-12


@dataclass(frozen=True)
class SymEigResult:
    """Full spectrum of a symmetric matrix, eigenvalues descending."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # orthonormal columns, one per eigenvalue


@dataclass(frozen=True)
class GenEigResult:
    """Spectrum of the pencil (A, B): A v = lambda B v with v^T B v = I."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # B-orthonormal columns


def _as_square(a, name="matrix"):
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise NumericalError(f"{name} contains non-finite entries")
    return a


def _require_symmetric(a, name="matrix"):
    scale = max(1.0, float(np.abs(a).max()) if a.size else 0.0)
    if np.abs(a - a.T).max(initial=0.0) > _SYM_TOL * scale:
        raise NumericalError(f"{name} is not symmetric within tolerance")
    return 0.5 * (a + a.T)


def _fix_column_signs(vectors):
    v = np.array(vectors, copy=True)
    for i in range(v.shape[1]):
        k = int(np.argmax(np.abs(v[:, i])))
        if v[k, i] < 0.0:
            v[:, i] = -v[:, i]
    return v


def sym_eig(a) -> SymEigResult:
    """Eigendecompose a symmetric matrix; descending eigenvalues.

    Exact ties keep their original index order (stable sort).
    """
    a = _require_symmetric(_as_square(a, "A"), "A")
    w, v = np.linalg.eigh(a)
    order = np.argsort(-w, kind="stable")
    return SymEigResult(w[order], _fix_column_signs(v[:, order]))


def spd_inverse_sqrt(g, rel_floor=1e-12) -> np.ndarray:
    """Symmetric W with W G W = I for symmetric positive definite G."""
    g = _require_symmetric(_as_square(g, "G"), "G")
    w, v = np.linalg.eigh(g)
    if w[-1] <= 0.0 or w[0] <= rel_floor * w[-1]:
        raise NumericalError("matrix is not positive definite")
    return (v / np.sqrt(w)) @ v.T


def spd_sqrt(g, rel_floor=1e-12) -> np.ndarray:
    """Symmetric square root of an SPD matrix."""
    g = _require_symmetric(_as_square(g, "G"), "G")
    w, v = np.linalg.eigh(g)
    if w[-1] <= 0.0 or w[0] <= rel_floor * w[-1]:
        raise NumericalError("matrix is not positive definite")
    return (v * np.sqrt(w)) @ v.T


def gen_sym_eig(a, b) -> GenEigResult:
    """Solve A v = lambda B v for symmetric A and SPD B.

    Reduced to an ordinary symmetric problem by whitening with the inverse
    square root of B; the returned vectors satisfy v^T B v = I.
    """
    a = _require_symmetric(_as_square(a, "A"), "A")
    b = _as_square(b, "B")
    if a.shape != b.shape:
        raise DimensionError(f"shape mismatch: {a.shape} vs {b.shape}")
    w_half = spd_inverse_sqrt(b)
    inner = sym_eig(w_half @ a @ w_half)
    vectors = _fix_column_signs(w_half @ inner.eigenvectors)
    return GenEigResult(inner.eigenvalues, vectors)


def svd(u):
    """Full SVD u = U diag(s) V^T with the deterministic sign convention.

    Returns (U, s, V) where U is D x D, s is the descending vector of
    singular values, and V is n x n. Sign fixes are applied jointly to
    paired (U, V) columns so the product is preserved.
    """
    u = np.asarray(u, dtype=float)
    if u.ndim != 2:
        raise DimensionError(f"expected a matrix, got shape {u.shape}")
    if not np.all(np.isfinite(u)):
        raise NumericalError("matrix contains non-finite entries")
    left, s, right_t = np.linalg.svd(u, full_matrices=True)
    right = right_t.T
    d, n = u.shape
    for i in range(min(d, n)):
        k = int(np.argmax(np.abs(left[:, i])))
        if left[k, i] < 0.0:
            left[:, i] = -left[:, i]
            right[:, i] = -right[:, i]
    # Null-space columns are unpaired; fix them independently.
    for i in range(min(d, n), max(d, n)):
        if i < left.shape[1]:
            k = int(np.argmax(np.abs(left[:, i])))
            if left[k, i] < 0.0:
                left[:, i] = -left[:, i]
        if i < right.shape[1]:
            k = int(np.argmax(np.abs(right[:, i])))
            if right[k, i] < 0.0:
                right[:, i] = -right[:, i]
    return left, s, right
