"""Desk-scale demonstrations: localized states, square-wave interpolation,
an exact polynomial map, and image intensity mapping.

Each builder returns (header, rows) ready to be written as TSV; continuous
measures are discretized on uniform grids standing in for the integral.
"""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

from . import baselines, hilbert, model as model_mod
from .errors import DataError, DimensionError
from .sample import BasisSpec, Sample, design_matrix, evaluate_basis
from .solver import SolverConfig
from .tensors import TensorKind

DEFAULT_GRID_POINTS = 201


def grid_measure(n_points: int = DEFAULT_GRID_POINTS, lo: float = -1.0, hi: float = 1.0):
    """Uniform grid with weights summing to the interval length."""
    if n_points < 2:
        raise DimensionError("need at least two grid points")
    grid = np.linspace(lo, hi, n_points)
    weights = np.full(n_points, (hi - lo) / n_points)
    return grid, weights


def localized_states_table(n: int = 7, ys: Sequence[float] = (-0.6, 0.0, 0.4),
                           n_points: int = DEFAULT_GRID_POINTS):
    """Squared localized states on the grid, one column per localization point."""
    grid, weights = grid_measure(n_points)
    spec = BasisSpec("monomial", n - 1)
    sample = Sample(grid[:, None], grid[:, None], weights)
    space = hilbert.space_from_sample(sample, "x", spec)
    design = design_matrix(spec, grid[:, None])
    header = ["x"] + [f"psi2_y{y:+g}" for y in ys]
    columns = [grid]
    for y in ys:
        state = hilbert.localized_state(space, evaluate_basis(spec, [y]))
        columns.append(hilbert.state_values(state, design) ** 2)
    rows = np.column_stack(columns)
    return header, rows


def _comparison_table(grid, weights, f_true, x_order: int, f_order: int,
                      kind: TensorKind, config: SolverConfig):
    """Shared assembly of the 1D function-mapping demos."""
    sample = Sample(grid[:, None], f_true[:, None], weights)
    x_spec = BasisSpec("monomial", x_order)
    f_spec = BasisSpec("monomial", f_order)
    data = hilbert.prepare(sample, x_spec, f_spec)
    lsq = baselines.fit_least_squares(data)
    rn = baselines.fit_radon_nikodym(data, labels=f_true[:, None])
    fitted, _ = model_mod.fit(sample, x_spec, f_spec, kind=kind, config=config)
    header = ["x", "exact", "least_squares", "radon_nikodym",
              "kgo_value", "kgo_p_at_truth", "pole"]
    rows = np.empty((grid.shape[0], len(header)))
    for i, x in enumerate(grid):
        point = evaluate_basis(x_spec, [x])
        ls_val = baselines.eval_least_squares(lsq, point)[1]
        rn_val = baselines.eval_radon_nikodym(rn, point)[0]
        val, pole = model_mod.value(fitted, [x])
        p_truth = model_mod.probability(fitted, [x], [f_true[i]])
        rows[i] = (x, f_true[i], ls_val, rn_val, val[1], p_truth, float(pole))
    return header, rows, fitted


def square_wave_table(n: int = 7, n_points: int = DEFAULT_GRID_POINTS,
                      kind: TensorKind = TensorKind.F_CHRISTOFFEL,
                      config: Optional[SolverConfig] = None):
    """Square-wave interpolation: exact, least squares, Radon-Nikodym, channel.

    The label takes two values, so its producted basis has dimension 2.
    """
    grid, weights = grid_measure(n_points)
    f_true = np.where(grid >= 0.0, 1.0, -1.0)
    if config is None:
        config = SolverConfig(algorithm="linear-constraints", max_iterations=200,
                              init_with_least_squares=True)
    header, rows, _ = _comparison_table(grid, weights, f_true, n - 1, 1, kind, config)
    return header, rows


def exact_map_table(n: int = 7, m: int = 5, n_points: int = DEFAULT_GRID_POINTS,
                    kind: TensorKind = TensorKind.F_CHRISTOFFEL,
                    config: Optional[SolverConfig] = None):
    """Identity map whose exact solution keeps the leading label components."""
    grid, weights = grid_measure(n_points)
    if not 1 <= m <= n:
        raise DimensionError("need 1 <= m <= n")
    if config is None:
        config = SolverConfig(algorithm="linear-constraints", max_iterations=200,
                              init_with_least_squares=True)
    header, rows, _ = _comparison_table(grid, weights, grid.copy(), n - 1, m - 1,
                                        kind, config)
    return header, rows


def read_pgm(path) -> np.ndarray:
    """Read an ASCII (P2) portable graymap into intensities in [0, 1]."""
    try:
        with open(path, "r", encoding="ascii") as handle:
            text = handle.read()
    except (OSError, UnicodeDecodeError) as exc:
        raise DataError(f"cannot read image {path}: {exc}") from exc
    tokens = []
    for line in text.splitlines():
        body = line.split("#", 1)[0]
        tokens.extend(body.split())
    if not tokens or tokens[0] != "P2":
        raise DataError("expected an ASCII portable graymap (P2)")
    try:
        width, height, maxval = int(tokens[1]), int(tokens[2]), int(tokens[3])
        values = np.array([float(t) for t in tokens[4:]], dtype=float)
    except (IndexError, ValueError) as exc:
        raise DataError(f"malformed graymap: {exc}") from exc
    if maxval <= 0 or values.shape[0] != width * height:
        raise DataError("graymap header does not match pixel data")
    return values.reshape(height, width) / maxval


def write_pgm(path, image, maxval: int = 255):
    """Write intensities in [0, 1] as an ASCII portable graymap."""
    image = np.clip(np.asarray(image, dtype=float), 0.0, 1.0)
    levels = np.rint(image * maxval).astype(int)
    with open(path, "w", encoding="ascii") as handle:
        handle.write(f"P2\n{image.shape[1]} {image.shape[0]}\n{maxval}\n")
        for row in levels:
            handle.write(" ".join(str(v) for v in row) + "\n")


def synthetic_gradient(size: int = 8) -> np.ndarray:
    """Deterministic diagonal gradient image for self-contained runs."""
    axis = np.linspace(0.0, 1.0, size)
    return 0.5 * (axis[:, None] + axis[None, :])


def tensor_grid_design(x, y, n_x: int, n_y: int, kind: str = "chebyshev"):
    """Two-axis tensor-product basis columns, leading-axis exponent major.

    The constant component (both exponents zero) comes first.
    """
    spec_x = BasisSpec(kind, n_x - 1, scale=((np.array([-1.0]), np.array([1.0]))
                                             if kind == "chebyshev" else None))
    spec_y = BasisSpec(kind, n_y - 1, scale=((np.array([-1.0]), np.array([1.0]))
                                             if kind == "chebyshev" else None))
    cols_x = design_matrix(spec_x, np.asarray(x, dtype=float)[:, None])
    cols_y = design_matrix(spec_y, np.asarray(y, dtype=float)[:, None])
    out = np.einsum("li,lj->lij", cols_x, cols_y)
    return out.reshape(out.shape[0], n_x * n_y)


def image_table(image: np.ndarray, n_x: int = 5, n_y: int = 5, m: int = 3,
                kind: TensorKind = TensorKind.F_CHRISTOFFEL,
                config: Optional[SolverConfig] = None,
                basis_kind: str = "chebyshev"):
    """Pixel-coordinate to gray-intensity mapping over a whole image.

    Pixel centers are scaled onto [-1, 1]^2; the attribute basis is the
    n_x by n_y tensor grid, the label basis the first m powers of intensity.
    """
    image = np.asarray(image, dtype=float)
    if image.ndim != 2 or min(image.shape) < 2:
        raise DataError("image must be a 2D array with at least 2x2 pixels")
    height, width = image.shape
    xx = np.tile(np.linspace(-1.0, 1.0, width), height)
    yy = np.repeat(np.linspace(-1.0, 1.0, height), width)
    gray = image.reshape(-1)
    x_design = tensor_grid_design(xx, yy, n_x, n_y, basis_kind)
    f_spec = BasisSpec("monomial", m - 1)
    f_design = design_matrix(f_spec, gray[:, None])
    weights = np.ones(gray.shape[0])
    data = hilbert.prepare_points(x_design, f_design, weights)
    if config is None:
        config = SolverConfig(algorithm="lsq-adj")
    fitted, _ = model_mod.fit_prepared(data, kind, config)
    lsq = baselines.fit_least_squares(data)
    rn = baselines.fit_radon_nikodym(data, labels=gray[:, None])
    header = ["x", "y", "exact", "least_squares", "radon_nikodym",
              "kgo_value", "kgo_p_at_truth", "pole"]
    rows = np.empty((gray.shape[0], len(header)))
    for i in range(gray.shape[0]):
        point = x_design[i]
        ls_val = baselines.eval_least_squares(lsq, point)[1]
        rn_val = baselines.eval_radon_nikodym(rn, point)[0]
        val, pole = model_mod.value(fitted, point)
        p_truth = model_mod.probability(fitted, point, f_design[i])
        rows[i] = (xx[i], yy[i], gray[i], ls_val, rn_val, val[1], p_truth, float(pole))
    return header, rows
