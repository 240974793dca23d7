"""Solvers for the partially unitary channel maximizing a coverage tensor.

The problem: maximize F(u) = u^T S u over real d x n matrices with
orthonormal rows (u u^T = I). It behaves like an eigenvalue problem whose
"eigenvalue" is a d x d symmetric matrix of Lagrange multipliers; the
extremal F equals that matrix's trace.

All algorithms share the same skeleton: solve an ordinary (d*n)-dimensional
eigenproblem under the relaxed Frobenius-norm constraint, pick a promising
eigenstate, snap it onto the constraint set (all singular values to +1), and
refresh the multipliers. Convergence is not guaranteed, so every iteration
is traced and the best constrained iterate seen is returned.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .errors import DimensionError, NumericalError
from .linalg import gen_sym_eig, spd_inverse_sqrt, spd_sqrt, sym_eig
from .tensors import CoverageTensor

MAXEV = "maxev"
MAXEV_SVD_ADJ = "maxev-svd-adj"
MAXEV_EVADJ = "maxev-evadj"
LAGRANGE_ITER = "lagrange-iter"
LINEAR_CONSTRAINTS = "linear-constraints"
LSQ_ADJ = "lsq-adj"

ALGORITHMS = (MAXEV, MAXEV_SVD_ADJ, MAXEV_EVADJ, LAGRANGE_ITER,
              LINEAR_CONSTRAINTS, LSQ_ADJ)

_RANK_REL = 1e-12
_RESIDUAL_TOL = 1e-8


def normalize_algorithm(name: str) -> str:
    key = str(name).strip().lower().replace("_", "-")
    if key not in ALGORITHMS:
        raise DimensionError(f"unknown algorithm {name!r}; choose from {ALGORITHMS}")
    return key


@dataclass(frozen=True)
class SolverConfig:
    algorithm: str = LINEAR_CONSTRAINTS
    max_iterations: int = 1000
    rel_tol: float = 1e-10
    candidate_pool: int = 16
    seed: int = 0
    init_with_least_squares: bool = False

    def __post_init__(self):
        object.__setattr__(self, "algorithm", normalize_algorithm(self.algorithm))
        if self.max_iterations < 1:
            raise DimensionError("max_iterations must be positive")
        if self.rel_tol <= 0.0:
            raise DimensionError("rel_tol must be positive")
        if self.candidate_pool < 1:
            raise DimensionError("candidate_pool must be positive")


@dataclass(frozen=True)
class PartiallyUnitaryOp:
    """A channel with orthonormal rows plus its provenance."""

    u: np.ndarray
    residual: float          # ||u u^T - I||_F
    algorithm: str
    iterations: int
    f_value: Optional[float] = None

    @property
    def d(self) -> int:
        return self.u.shape[0]

    @property
    def n(self) -> int:
        return self.u.shape[1]


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    f_before: float       # objective of the selected unconstrained candidate
    f_after: float        # objective after snapping onto the constraints
    residual: float       # constraint residual of the snapped iterate
    lambda_asym: float    # anti-symmetric norm of the raw multipliers
    lambda_spur: float    # trace of the raw multipliers (should equal f_after)


@dataclass
class IterationTrace:
    records: List[IterationRecord] = field(default_factory=list)

    def append(self, record: IterationRecord):
        self.records.append(record)

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)


def constraint_residual(u) -> float:
    u = np.asarray(u, dtype=float)
    return float(np.linalg.norm(u @ u.T - np.eye(u.shape[0])))


def _shifted_matrix(tensor: CoverageTensor, lam) -> np.ndarray:
    lam = np.asarray(lam, dtype=float)
    if lam.shape != (tensor.d, tensor.d):
        raise DimensionError(f"multiplier shape {lam.shape} != ({tensor.d}, {tensor.d})")
    if np.abs(lam - lam.T).max(initial=0.0) > 1e-10 * max(1.0, np.abs(lam).max(initial=0.0)):
        raise NumericalError("multiplier matrix must be symmetric")
    return tensor.matrix - np.kron(0.5 * (lam + lam.T), np.eye(tensor.n))


def solve_partial_constraint(tensor: CoverageTensor, lam=None):
    """Spectrum of the multiplier-shifted problem under the norm constraint.

    Returns (eigenvalues, channels): the full descending spectrum of the
    (d*n)-dimensional matrix S - lam (x) I and each eigenvector reshaped
    row-major to d x n, scaled so its squared Frobenius norm equals d.
    """
    if lam is None:
        lam = np.zeros((tensor.d, tensor.d))
    eig = sym_eig(_shifted_matrix(tensor, lam))
    scale = np.sqrt(tensor.d)
    channels = [scale * eig.eigenvectors[:, i].reshape(tensor.d, tensor.n)
                for i in range(eig.eigenvalues.shape[0])]
    return eig.eigenvalues, channels


def _full_row_rank(u) -> bool:
    s = np.linalg.svd(u, compute_uv=False)
    return s[0] > 0.0 and s[-1] > _RANK_REL * s[0]


def enforce_partial_unitarity(u, method: str = "svd") -> np.ndarray:
    """Snap a full-row-rank matrix onto the constraint set u u^T = I.

    "svd" sets every singular value to +1 (the minimal change); "gram-eig"
    multiplies by the inverse square root of u u^T. The two coincide.
    """
    u = np.asarray(u, dtype=float)
    if u.ndim != 2 or u.shape[0] > u.shape[1]:
        raise DimensionError(f"expected a wide matrix, got shape {u.shape}")
    if not _full_row_rank(u):
        raise NumericalError("matrix is rank deficient; cannot enforce constraints")
    if method == "svd":
        left, _, right = np.linalg.svd(u, full_matrices=False)
        return left @ right
    if method == "gram-eig":
        # The row Gram's eigenvalue ratio is the squared singular-value
        # ratio, so the SPD floor must sit below the rank gate squared.
        return spd_inverse_sqrt(u @ u.T, rel_floor=0.5 * _RANK_REL ** 2) @ u
    raise DimensionError(f"unknown adjustment method {method!r}")


def make_operator(u, algorithm: str, iterations: int,
                  tensor: Optional[CoverageTensor] = None,
                  f_value: Optional[float] = None) -> PartiallyUnitaryOp:
    u = np.asarray(u, dtype=float)
    if f_value is None and tensor is not None:
        f_value = tensor.quadratic_form(u)
    return PartiallyUnitaryOp(u=u, residual=constraint_residual(u),
                              algorithm=algorithm, iterations=iterations,
                              f_value=f_value)


def approximate_from_any(u_any, tensor: Optional[CoverageTensor] = None) -> PartiallyUnitaryOp:
    """Partially unitary operator nearest in spirit to an arbitrary map.

    Expands the input in singular values and sets them all to +1; useful on
    least-squares maps or any other full-row-rank starting point.
    """
    adjusted = enforce_partial_unitarity(u_any, "svd")
    return make_operator(adjusted, "svd-adjustment", 0, tensor)


def raw_lagrange_multipliers(u, tensor: CoverageTensor) -> np.ndarray:
    """Unsymmetrized multipliers at a constrained point: u contracted with S u."""
    u = np.asarray(u, dtype=float)
    y = (tensor.matrix @ u.reshape(-1)).reshape(tensor.d, tensor.n)
    return u @ y.T


def lagrange_multipliers(u, tensor: CoverageTensor) -> np.ndarray:
    """Symmetric multiplier matrix at a partially unitary point.

    The trace of the unsymmetrized matrix equals F(u) identically; the
    extremal coverage is the multiplier trace.
    """
    u = np.asarray(u, dtype=float)
    if constraint_residual(u) > _RESIDUAL_TOL:
        raise NumericalError("operator does not satisfy the partial unitarity constraints")
    raw = raw_lagrange_multipliers(u, tensor)
    return 0.5 * (raw + raw.T)


def select_candidate(channels, tensor: CoverageTensor,
                     pool_size: int, method: str = "svd"):
    """Score the leading eigenstates and keep the most promising one.

    `channels` must come ordered by descending eigenvalue. Each candidate is
    snapped onto the constraints and scored by its adjusted objective; the
    returned triple is (unadjusted candidate, adjusted candidate, adjusted
    objective). Rank-deficient candidates are skipped; if the whole pool is
    deficient the search widens to the full spectrum. Ties keep the earlier
    (larger-eigenvalue) candidate.
    """
    if pool_size < 1:
        raise DimensionError("pool size must be positive")
    best = None
    scored = 0
    for cand in channels:
        if best is not None and scored >= pool_size:
            break
        if not _full_row_rank(cand):
            continue
        try:
            adjusted = enforce_partial_unitarity(cand, method)
        except NumericalError:
            # Numerically rank deficient for the chosen snap (the gram-eig
            # route squares the conditioning); reject rather than pseudo-adjust.
            continue
        scored += 1
        f_adj = tensor.quadratic_form(adjusted)
        if best is None or f_adj > best[2]:
            best = (cand, adjusted, f_adj)
    if best is None:
        raise NumericalError("every candidate eigenstate is rank deficient")
    return best


def _record(trace: IterationTrace, iteration: int, f_before: float,
            u_adj, f_adj: float, tensor: CoverageTensor):
    raw = raw_lagrange_multipliers(u_adj, tensor)
    trace.append(IterationRecord(
        iteration=iteration,
        f_before=f_before,
        f_after=f_adj,
        residual=constraint_residual(u_adj),
        lambda_asym=float(np.linalg.norm(raw - raw.T)),
        lambda_spur=float(np.trace(raw)),
    ))
    return 0.5 * (raw + raw.T)


def iterate_lagrange(tensor: CoverageTensor, config: SolverConfig,
                     u_init=None) -> Tuple[PartiallyUnitaryOp, IterationTrace]:
    """Multiplier fixed-point iteration.

    Start from zero multipliers, alternate (relaxed eigenproblem -> candidate
    selection -> constraint snap -> new multipliers) until the constrained
    objective stalls; return the best constrained iterate seen.
    """
    trace = IterationTrace()
    lam = np.zeros((tensor.d, tensor.d))
    best_u, best_f = None, -np.inf
    pool = min(config.candidate_pool, tensor.d * tensor.n)
    budget = config.max_iterations
    if u_init is not None:
        u0 = enforce_partial_unitarity(u_init, "svd")
        f0 = tensor.quadratic_form(u0)
        lam = _record(trace, 0, f0, u0, f0, tensor)
        best_u, best_f = u0, f0
        budget -= 1
    f_prev = None
    iterations = 0
    for it in range(1, budget + 1):
        iterations = it
        _, channels = solve_partial_constraint(tensor, lam)
        cand, adjusted, f_adj = select_candidate(channels, tensor, pool)
        lam = _record(trace, it, tensor.quadratic_form(cand), adjusted, f_adj, tensor)
        if f_adj > best_f:
            best_u, best_f = adjusted, f_adj
        if f_prev is not None and abs(f_adj - f_prev) <= config.rel_tol * max(abs(f_adj), 1e-300):
            break
        f_prev = f_adj
    return make_operator(best_u, LAGRANGE_ITER, iterations, f_value=best_f), trace


def _bordered_matrix(tensor: CoverageTensor, border, corner: float) -> np.ndarray:
    dn = tensor.d * tensor.n
    out = np.empty((dn + 1, dn + 1))
    out[:dn, :dn] = tensor.matrix
    out[:dn, dn] = border
    out[dn, :dn] = border
    out[dn, dn] = corner
    return out


def iterate_linear_constraints(tensor: CoverageTensor, config: SolverConfig,
                               u_init=None) -> Tuple[PartiallyUnitaryOp, IterationTrace]:
    """Iteration with the constraints replaced by closeness to the iterate.

    One extra coordinate keeps the bordered problem a Rayleigh quotient; the
    border vector and corner entry act as multipliers recomputed from each
    snapped iterate (unit extra coordinate, corner = current objective,
    border = -S u). The first pass uses a zero border, which reproduces the
    plain relaxed eigenproblem with one inert coordinate.
    """
    trace = IterationTrace()
    dn = tensor.d * tensor.n
    pool = min(config.candidate_pool, dn + 1)
    border = np.zeros(dn)
    corner = 0.0
    best_u, best_f = None, -np.inf

    def refresh(u_adj):
        y = (tensor.matrix @ u_adj.reshape(-1))
        return -y, float(u_adj.reshape(-1) @ y)

    budget = config.max_iterations
    if u_init is not None:
        u0 = enforce_partial_unitarity(u_init, "svd")
        f0 = tensor.quadratic_form(u0)
        _record(trace, 0, f0, u0, f0, tensor)
        best_u, best_f = u0, f0
        border, corner = refresh(u0)
        budget -= 1
    f_prev = None
    iterations = 0
    for it in range(1, budget + 1):
        iterations = it
        eig = sym_eig(_bordered_matrix(tensor, border, corner))
        channels = []
        for i in range(eig.eigenvalues.shape[0]):
            w = eig.eigenvectors[:dn, i]
            norm = np.linalg.norm(w)
            if norm <= 1e-12:
                continue
            channels.append((np.sqrt(tensor.d) / norm) * w.reshape(tensor.d, tensor.n))
        cand, adjusted, f_adj = select_candidate(channels, tensor, pool)
        _record(trace, it, tensor.quadratic_form(cand), adjusted, f_adj, tensor)
        if f_adj > best_f:
            best_u, best_f = adjusted, f_adj
        if f_prev is not None and abs(f_adj - f_prev) <= config.rel_tol * max(abs(f_adj), 1e-300):
            break
        f_prev = f_adj
        border, corner = refresh(adjusted)
    return make_operator(best_u, LINEAR_CONSTRAINTS, iterations, f_value=best_f), trace


def operator_adjust(u, j_matrix, tensor: CoverageTensor):
    """Operator-dependent constraint snap, with the snap moved into the tensor.

    Diagonalizing a symmetric operator J against the row Gram matrix u u^T
    gives a non-unitary row transform whose output coordinates satisfy the
    constraints exactly; the matching conjugation of the tensor carries the
    adjustment, so the new quadratic form evaluates the adjusted objective.
    With J = I this reproduces the gram-eig snap up to a row rotation.
    """
    u = np.asarray(u, dtype=float)
    j_matrix = np.asarray(j_matrix, dtype=float)
    if j_matrix.shape != (u.shape[0], u.shape[0]):
        raise DimensionError("operator dimensions do not match the channel")
    if not _full_row_rank(u):
        raise NumericalError("matrix is rank deficient")
    gram = u @ u.T
    pencil = gen_sym_eig(j_matrix, gram)
    basis = pencil.eigenvectors                      # columns, gram-orthonormal
    coords = basis.T @ u                             # rows satisfy the constraints
    half = spd_sqrt(gram) @ basis                    # (d, d)
    four = tensor.as_four_index()
    adjusted = np.einsum("is,ikjl,jt->sktl", half, four, half)
    matrix = adjusted.reshape(tensor.d * tensor.n, tensor.d * tensor.n)
    matrix = 0.5 * (matrix + matrix.T)
    transferred = CoverageTensor(tensor.kind, tensor.d, tensor.n, matrix)
    op = make_operator(coords, "operator-adjust", 0, transferred)
    return op, transferred


def sigma_basis_multipliers(u, tensor: CoverageTensor) -> np.ndarray:
    """One multiplier per singular value, from the tensor in the SVD basis.

    Row sums of the tensor conjugated onto the singular-vector dyads, taken
    at unit singular values.
    """
    u = np.asarray(u, dtype=float)
    if not _full_row_rank(u):
        raise NumericalError("matrix is rank deficient")
    left, _, right_t = np.linalg.svd(u, full_matrices=False)
    dyads = np.einsum("js,ks->sjk", left, right_t.T).reshape(u.shape[0], -1)
    sigma_tensor = dyads @ tensor.matrix @ dyads.T
    return sigma_tensor.sum(axis=1)


def convert_sigma_multipliers(u, multipliers) -> np.ndarray:
    """Map per-singular-value multipliers back to a symmetric d x d matrix."""
    u = np.asarray(u, dtype=float)
    left, _, _ = np.linalg.svd(u, full_matrices=False)
    return (left * np.asarray(multipliers, dtype=float)) @ left.T


def solve(tensor: CoverageTensor, config: SolverConfig,
          u_init=None) -> Tuple[PartiallyUnitaryOp, IterationTrace]:
    """Dispatch on the configured algorithm.

    Single-shot paths (maxev family, lsq-adj) record one trace row; the
    iterative paths delegate to their loops. lsq-adj requires an initial map
    (the least-squares channel) via u_init.
    """
    algorithm = normalize_algorithm(config.algorithm)
    pool = min(config.candidate_pool, tensor.d * tensor.n)
    if algorithm in (MAXEV, MAXEV_SVD_ADJ, MAXEV_EVADJ):
        _, channels = solve_partial_constraint(tensor)
        method = "gram-eig" if algorithm == MAXEV_EVADJ else "svd"
        cand, adjusted, f_adj = select_candidate(
            channels, tensor, 1 if algorithm == MAXEV else pool, method)
        trace = IterationTrace()
        _record(trace, 1, tensor.quadratic_form(cand), adjusted, f_adj, tensor)
        return make_operator(adjusted, algorithm, 1, f_value=f_adj), trace
    if algorithm == LSQ_ADJ:
        if u_init is None:
            raise DimensionError("lsq-adj requires the least-squares channel as u_init")
        adjusted = enforce_partial_unitarity(u_init, "svd")
        f_adj = tensor.quadratic_form(adjusted)
        trace = IterationTrace()
        _record(trace, 1, f_adj, adjusted, f_adj, tensor)
        return make_operator(adjusted, algorithm, 1, f_value=f_adj), trace
    if algorithm == LAGRANGE_ITER:
        return iterate_lagrange(tensor, config,
                                u_init if config.init_with_least_squares else None)
    return iterate_linear_constraints(tensor, config,
                                      u_init if config.init_with_least_squares else None)
