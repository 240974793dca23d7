"""Coverage tensors and the coverage-bound machinery.

The transferred coverage of a channel u is a quadratic form
F(u) = sum_jk,j'k' u_jk S_jk;j'k' u_j'k' over the flattened matrix u.
Four tensor kinds differ only in how each observation's contribution is
normalized:

  CHRISTOFFEL_PRODUCT           both sides normalized by their Christoffel
                                functions (full localized-state overlap),
  CHRISTOFFEL_PRODUCT_ADJUSTED  attribute side normalized by the adjusted
                                Christoffel function with label-matched
                                degrees of freedom,
  F_CHRISTOFFEL                 label side only ("partially normalized"),
  PLAIN_VALUE                   no normalization (fourth-order moments).

Tensors are built and stored in orthonormal coordinates; the Gram inverse
factors of the raw-coordinate formulas collapse to identity there. The
flattened index is row-major over (label index j, attribute index k).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from .errors import DimensionError, NumericalError
from .hilbert import PreparedData
from .linalg import sym_eig


class TensorKind(str, Enum):
    CHRISTOFFEL_PRODUCT = "christoffel-product"
    CHRISTOFFEL_PRODUCT_ADJUSTED = "christoffel-product-adjusted"
    F_CHRISTOFFEL = "f-christoffel"
    PLAIN_VALUE = "plain-value"


@dataclass(frozen=True)
class CoverageTensor:
    """Symmetric (d*n) x (d*n) matrix making coverage quadratic in the channel."""

    kind: TensorKind
    d: int
    n: int
    matrix: np.ndarray

    def quadratic_form(self, u) -> float:
        u = np.asarray(u, dtype=float)
        if u.shape != (self.d, self.n):
            raise DimensionError(f"channel shape {u.shape} != ({self.d}, {self.n})")
        flat = u.reshape(-1)
        return float(flat @ self.matrix @ flat)

    def as_four_index(self) -> np.ndarray:
        return self.matrix.reshape(self.d, self.n, self.d, self.n)


@dataclass(frozen=True)
class ContributingSubspace:
    """Attribute-space directions carrying the achievable coverage.

    `vectors` holds raw coefficient columns, Gram-orthonormal; `coords` the
    same directions in orthonormal coordinates.
    """

    vectors: np.ndarray      # (n_raw, d)
    coords: np.ndarray       # (n_eff, d), orthonormal columns
    eigenvalues: np.ndarray  # (d,), descending
    variant: str             # "projective" | "coverage"


def _norms2(coords, side: str) -> np.ndarray:
    norms2 = np.einsum("ij,ij->i", coords, coords)
    bad = np.nonzero(norms2 <= 0.0)[0]
    if bad.size:
        raise NumericalError(f"observation {bad[0]} has zero {side} projection")
    return norms2


def christoffel_product_moments(data: PreparedData) -> np.ndarray:
    """Moments of the two Christoffel functions' product, orthonormal coords.

    Four-index array M[j, k, j', k'] = <x_k f_j | K_x K_f | x_k' f_j'>,
    symmetric under (j, k) <-> (j', k').
    """
    weights = data.weights / (_norms2(data.x_orth, "attribute")
                              * _norms2(data.f_orth, "label"))
    return _fourth_moments(data, weights).as_four_index()


def _fourth_moments(data: PreparedData, eff_weights) -> CoverageTensor:
    m = data.f_orth.shape[1]
    n = data.x_orth.shape[1]
    z = np.einsum("lj,lk->ljk", data.f_orth, data.x_orth).reshape(data.size, m * n)
    z = z * np.sqrt(eff_weights)[:, None]
    matrix = z.T @ z
    matrix = 0.5 * (matrix + matrix.T)
    return CoverageTensor(TensorKind.PLAIN_VALUE, m, n, matrix)


def build_coverage_tensor(kind: TensorKind, data: PreparedData,
                          subspace: Optional[ContributingSubspace] = None) -> CoverageTensor:
    """Assemble the coverage tensor of the requested kind.

    With a contributing subspace the christoffel-product tensor is composed
    with the projections of the subspace directions onto the label basis,
    yielding the projective d x n problem.
    """
    kind = TensorKind(kind)
    if kind is TensorKind.CHRISTOFFEL_PRODUCT:
        w = data.weights / (_norms2(data.x_orth, "attribute")
                            * _norms2(data.f_orth, "label"))
    elif kind is TensorKind.CHRISTOFFEL_PRODUCT_ADJUSTED:
        projection = label_matched_projection(data)
        adj = np.einsum("ij,jk,ik->i", data.x_orth, projection, data.x_orth)
        bad = np.nonzero(adj <= 0.0)[0]
        if bad.size:
            raise NumericalError(f"observation {bad[0]} has zero adjusted normalizer")
        w = data.weights / (adj * _norms2(data.f_orth, "label"))
    elif kind is TensorKind.F_CHRISTOFFEL:
        w = data.weights / _norms2(data.f_orth, "label")
    elif kind is TensorKind.PLAIN_VALUE:
        w = data.weights
    else:  # pragma: no cover
        raise DimensionError(f"unknown tensor kind {kind}")
    base = _fourth_moments(data, w)
    matrix = base.matrix
    d = base.d
    if subspace is not None:
        if kind is not TensorKind.CHRISTOFFEL_PRODUCT:
            raise DimensionError(
                "subspace composition is defined for the christoffel-product kind")
        embed = data.cross_gram() @ subspace.coords  # (m_eff, d_sub)
        four = matrix.reshape(base.d, base.n, base.d, base.n)
        four = np.einsum("js,jkql,qt->sktl", embed, four, embed)
        d = embed.shape[1]
        matrix = four.reshape(d * base.n, d * base.n)
        matrix = 0.5 * (matrix + matrix.T)
    return CoverageTensor(kind, d, base.n, matrix)


def subspace_embedding(data: PreparedData, subspace: ContributingSubspace) -> np.ndarray:
    """Projections of the subspace directions onto the label basis (m_eff x d)."""
    return data.cross_gram() @ subspace.coords


def label_christoffel_moments(data: PreparedData) -> np.ndarray:
    """<f_t | K_f | f_s> in orthonormal label coordinates."""
    w = data.weights / _norms2(data.f_orth, "label")
    return (data.f_orth.T * w) @ data.f_orth


def label_to_attribute_coverage(data: PreparedData) -> np.ndarray:
    """The label-coverage matrix pulled back to attribute coordinates.

    In orthonormal coordinates this is C^T M C with C the cross Gram and M
    the label-Christoffel moments; its spectrum decomposes the total
    transferable coverage.
    """
    cross = data.cross_gram()
    return cross.T @ label_christoffel_moments(data) @ cross


def ftot_upper_bound(data: PreparedData) -> float:
    """Total transferable coverage, computed by the trace route.

    Equals the eigenvalue sum of the pulled-back coverage matrix; no
    eigenproblem is needed for the bound itself.
    """
    return float(np.trace(label_to_attribute_coverage(data)))


def contributing_subspace(data: PreparedData, d: int,
                          variant: str = "projective") -> ContributingSubspace:
    """Top-d attribute directions by transferable coverage.

    The projective variant diagonalizes the pulled-back label coverage (rank
    at most m); the coverage variant swaps in plain attribute moments under
    the label Christoffel function.
    """
    m_eff = data.f_orth.shape[1]
    n_eff = data.x_orth.shape[1]
    if not 1 <= d <= min(m_eff, n_eff):
        raise DimensionError(f"d={d} out of range 1..{min(m_eff, n_eff)}")
    if variant == "projective":
        matrix = label_to_attribute_coverage(data)
    elif variant == "coverage":
        w = data.weights / _norms2(data.f_orth, "label")
        matrix = (data.x_orth.T * w) @ data.x_orth
    else:
        raise DimensionError(f"unknown subspace variant {variant!r}")
    eig = sym_eig(matrix)
    coords = eig.eigenvectors[:, :d]
    return ContributingSubspace(
        vectors=data.x_space.transform.T @ coords,
        coords=coords,
        eigenvalues=eig.eigenvalues[:d],
        variant=variant,
    )


def coverage_spectrum(data: PreparedData, variant: str = "projective") -> np.ndarray:
    """All eigenvalues of the chosen coverage matrix, descending."""
    if variant == "projective":
        matrix = label_to_attribute_coverage(data)
    elif variant == "coverage":
        w = data.weights / _norms2(data.f_orth, "label")
        matrix = (data.x_orth.T * w) @ data.x_orth
    else:
        raise DimensionError(f"unknown subspace variant {variant!r}")
    return sym_eig(matrix).eigenvalues


def label_matched_projection(data: PreparedData) -> np.ndarray:
    """Projector onto the attribute subspace coupled to the labels.

    Orthonormal-coordinate form of the adjusted-Christoffel matrix: with C
    the cross Gram, this is C^T (C C^T)^{-1} C. Its quadratic form never
    exceeds the plain squared norm, so the adjusted Christoffel function
    dominates the original one pointwise.
    """
    cross = data.cross_gram()
    coupling = cross @ cross.T
    eig = np.linalg.eigvalsh(coupling)
    if eig[0] <= 1e-12 * max(eig[-1], 1e-300):
        raise NumericalError("label/attribute coupling matrix is singular")
    return cross.T @ np.linalg.solve(coupling, cross)


def adjusted_christoffel(data: PreparedData):
    """Adjusted-Christoffel apparatus: raw-coordinate matrix and evaluator.

    Returns (G_c, k_adj) where the raw matrix G_c satisfies
    k_adj(point) = 1 / (point^T G_c point) and matches the label degrees of
    freedom; k_adj >= the plain Christoffel function everywhere.
    """
    projection = label_matched_projection(data)
    t = data.x_space.transform
    g_c = t.T @ projection @ t

    def k_adj(point) -> float:
        point = np.asarray(point, dtype=float).reshape(-1)
        denom = float(point @ g_c @ point)
        if denom <= 0.0:
            raise NumericalError("point has zero adjusted normalizer")
        return 1.0 / denom

    return g_c, k_adj
