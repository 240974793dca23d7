"""Reference estimators: least squares, Radon-Nikodym, joint-distribution
coverage, and the direct-projection probability model.

These are the comparison points for the partially unitary channel. They all
consume a PreparedData record so the two Hilbert spaces are built once.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericalError
from .hilbert import PreparedData, localized_state


@dataclass(frozen=True)
class LeastSquaresMap:
    """Linear expansion of each label component over the attribute basis."""

    beta: np.ndarray  # (m_raw, n_raw)


@dataclass(frozen=True)
class RadonNikodymModel:
    """Third moments <x_q x_s f_j> in orthonormal attribute coordinates."""

    third_moments: np.ndarray  # (m_labels, n_eff, n_eff), each slice symmetric
    transform: np.ndarray      # attribute whitening transform, kept for evaluation


def fit_least_squares(data: PreparedData) -> LeastSquaresMap:
    """Least-squares expansion of the label features over the attribute basis.

    Solved in regularized coordinates, where the normal equations reduce to a
    plain cross-moment contraction.
    """
    cross = (data.f_points.T * data.weights) @ data.x_orth  # (m_raw, n_eff)
    return LeastSquaresMap(beta=cross @ data.x_space.transform)


def eval_least_squares(lsq: LeastSquaresMap, x_point) -> np.ndarray:
    return lsq.beta @ np.asarray(x_point, dtype=float).reshape(-1)


def lsq_channel(data: PreparedData) -> np.ndarray:
    """The least-squares map between orthonormal coordinates (the cross Gram)."""
    return data.cross_gram()


def partial_unitarity_residual(data: PreparedData, channel=None) -> float:
    """Frobenius residual of the Gram-invariance condition for a channel.

    Defaults to the least-squares channel; zero exactly when the label space
    is a subspace of the attribute space.
    """
    u = data.cross_gram() if channel is None else np.asarray(channel, dtype=float)
    return float(np.linalg.norm(u @ u.T - np.eye(u.shape[0])))


def fit_radon_nikodym(data: PreparedData, labels=None) -> RadonNikodymModel:
    """Per-label third-moment matrices over the attribute space.

    `labels` defaults to the label feature rows; pass raw label columns to
    interpolate them directly.
    """
    labels = data.f_points if labels is None else np.atleast_2d(np.asarray(labels, float))
    m = labels.shape[1]
    n_eff = data.x_orth.shape[1]
    moments = np.empty((m, n_eff, n_eff))
    for j in range(m):
        moments[j] = (data.x_orth.T * (data.weights * labels[:, j])) @ data.x_orth
    return RadonNikodymModel(third_moments=moments, transform=data.x_space.transform)


def eval_radon_nikodym(model: RadonNikodymModel, x_point) -> np.ndarray:
    """Localized weighted average of every label: a ratio of quadratic forms."""
    coords = model.transform @ np.asarray(x_point, dtype=float).reshape(-1)
    denom = float(coords @ coords)
    if denom <= 0.0:
        raise NumericalError("point has zero projection on the measure's span")
    return np.einsum("i,jik,k->j", coords, model.third_moments, coords) / denom


def joint_distribution_coverage(data: PreparedData) -> float:
    """Number of covered observations under the pure joint-distribution model.

    Secondary sampling: the Gram matrices (and cross moments) come first, then
    the squared overlap of the two localized states is accumulated per
    observation.
    """
    cross = data.cross_gram()
    x_norm2 = np.einsum("ij,ij->i", data.x_orth, data.x_orth)
    f_norm2 = np.einsum("ij,ij->i", data.f_orth, data.f_orth)
    bad = np.nonzero((x_norm2 <= 0.0) | (f_norm2 <= 0.0))[0]
    if bad.size:
        raise NumericalError(f"observation {bad[0]} has zero projection")
    overlap = np.einsum("ij,jk,ik->i", data.f_orth, cross, data.x_orth)
    return float(np.sum(data.weights * overlap ** 2 / (x_norm2 * f_norm2)))


def direct_projection_probability(data: PreparedData, lsq: LeastSquaresMap,
                                  x_point, f_point) -> float:
    """Probability of a label outcome under the direct-projection model.

    The least-squares prediction is used as the localization point on the
    label side; the result is the squared overlap with the queried outcome.
    """
    predicted = eval_least_squares(lsq, x_point)
    state = localized_state(data.f_space, predicted)
    query = localized_state(data.f_space, f_point)
    return float(np.dot(state.coords, query.coords) ** 2)
