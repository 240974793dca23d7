"""Sample ingestion, attribute producting, basis evaluation, weighted averages.

A Sample is a weighted list of (attribute row, label row) observations; the
weighted sum over it is the measure behind every moment in the package.
Attribute / label rows are expanded into polynomial feature vectors by a
BasisSpec before any Hilbert-space machinery sees them.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from math import comb
from typing import Optional

import numpy as np

from .errors import DataError, DimensionError, NumericalError

MONOMIAL = "monomial"
CHEBYSHEV = "chebyshev"

DEFAULT_DIMENSION_CAP = 10_000


@dataclass(frozen=True)
class Sample:
    """Weighted observations: attribute rows, label rows, nonnegative weights."""

    x_rows: np.ndarray
    f_rows: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        x = np.atleast_2d(np.asarray(self.x_rows, dtype=float))
        f = np.atleast_2d(np.asarray(self.f_rows, dtype=float))
        w = np.asarray(self.weights, dtype=float).reshape(-1)
        if x.shape[0] < 1 or x.shape[0] != f.shape[0] or x.shape[0] != w.shape[0]:
            raise DimensionError(
                f"inconsistent observation counts: x={x.shape[0]}, f={f.shape[0]}, w={w.shape[0]}"
            )
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(f)) and np.all(np.isfinite(w))):
            raise DataError("sample contains non-finite values")
        if np.any(w < 0.0):
            raise DataError("weights must be nonnegative")
        if w.sum() <= 0.0:
            raise DataError("total weight must be positive")
        object.__setattr__(self, "x_rows", x)
        object.__setattr__(self, "f_rows", f)
        object.__setattr__(self, "weights", w)

    @property
    def size(self) -> int:
        return self.x_rows.shape[0]

    @property
    def total_weight(self) -> float:
        return float(self.weights.sum())


@dataclass(frozen=True)
class BasisSpec:
    """Recipe turning a raw row into a polynomial feature vector.

    kind            "monomial" or "chebyshev" (argument-scaled Chebyshev).
    product_order   total degree of the producted monomials.
    source          which raw columns feed the basis (None = all).
    mode            "up_to" includes every degree 0..order, "exact" only the
                    stated degree (use exact order 1 for pass-through columns).
    constant_index  position of the constant component in the output vector.
    scale           per-source (lo, hi) used by the Chebyshev argument map;
                    fill it from the training sample with `with_scale`.
    """

    kind: str = MONOMIAL
    product_order: int = 1
    source: Optional[tuple] = None
    mode: str = "up_to"
    constant_index: int = 0
    scale: Optional[tuple] = None

    def __post_init__(self):
        if self.kind not in (MONOMIAL, CHEBYSHEV):
            raise DataError(f"unknown basis kind {self.kind!r}")
        if self.mode not in ("up_to", "exact"):
            raise DataError(f"unknown producting mode {self.mode!r}")
        if self.product_order < 0:
            raise DataError("product order must be nonnegative")
        if self.source is not None:
            object.__setattr__(self, "source", tuple(int(c) for c in self.source))


def multi_indices(n_vars: int, order: int, mode: str = "exact"):
    """Exponent tuples of the producted basis, in the documented order.

    Exact mode lists all tuples with sum == order; up_to mode walks degrees
    0..order. Within a degree, tuples appear in lexicographic monomial order
    (leading variable first): (2,0) before (1,1) before (0,2).
    """
    if n_vars < 1:
        raise DimensionError("need at least one variable")

    def exact(remaining, slots):
        if slots == 1:
            yield (remaining,)
            return
        for k in range(remaining, -1, -1):
            for rest in exact(remaining - k, slots - 1):
                yield (k,) + rest

    if mode == "exact":
        yield from exact(order, n_vars)
    elif mode == "up_to":
        for d in range(order + 1):
            yield from exact(d, n_vars)
    else:
        raise DataError(f"unknown producting mode {mode!r}")


def producted_dimension(n_vars: int, order: int, mode: str = "exact") -> int:
    """Closed-form count of producted monomials."""
    if mode == "exact":
        return comb(n_vars + order - 1, order)
    return sum(comb(n_vars + d - 1, d) for d in range(order + 1))


def product_attributes(raw, order: int, mode: str = "exact",
                       cap: int = DEFAULT_DIMENSION_CAP) -> np.ndarray:
    """Evaluate every producted monomial of the raw attributes.

    The output dimension is C(n+order-1, order) for exact mode and the sum of
    those counts over degrees 0..order for up_to mode; builds beyond `cap`
    components are refused instead of allocating huge Gram matrices later.
    """
    raw = np.asarray(raw, dtype=float).reshape(-1)
    n = raw.shape[0]
    if n < 1:
        raise DimensionError("need at least one attribute")
    dim = producted_dimension(n, order, mode)
    if dim > cap:
        raise DimensionError(f"producted dimension {dim} exceeds cap {cap}")
    out = np.empty(dim)
    for i, idx in enumerate(multi_indices(n, order, mode)):
        v = 1.0
        for base, k in zip(raw, idx):
            if k:
                v *= base ** k
        out[i] = v
    return out


def weighted_average(sample: Sample, h) -> float:
    """Measure-weighted sum of a per-observation quantity.

    `h` may be a scalar, a length-M array of precomputed values, or a callable
    h(x_row, f_row) evaluated on every observation.
    """
    if callable(h):
        vals = np.array([float(h(x, f)) for x, f in zip(sample.x_rows, sample.f_rows)])
    else:
        vals = np.broadcast_to(np.asarray(h, dtype=float), (sample.size,))
    if not np.all(np.isfinite(vals)):
        raise NumericalError("non-finite value under the average")
    return float(np.dot(vals, sample.weights))


def _chebyshev_columns(t, order):
    """T_0..T_order of one scaled variable, vectorized over observations."""
    cols = [np.ones_like(t), t]
    for _ in range(2, order + 1):
        cols.append(2.0 * t * cols[-1] - cols[-2])
    return cols[: order + 1]


def _select(spec: BasisSpec, rows: np.ndarray) -> np.ndarray:
    if spec.source is None:
        return rows
    if max(spec.source) >= rows.shape[1]:
        raise DimensionError(
            f"source column {max(spec.source)} out of range for width {rows.shape[1]}"
        )
    return rows[:, list(spec.source)]


def _scaled(spec: BasisSpec, sel: np.ndarray) -> np.ndarray:
    if spec.scale is None:
        return sel
    lo = np.asarray(spec.scale[0], dtype=float)
    hi = np.asarray(spec.scale[1], dtype=float)
    span = hi - lo
    safe = np.where(span > 0.0, span, 1.0)
    t = (2.0 * sel - (lo + hi)) / safe
    return np.where(span > 0.0, t, 0.0)


def with_scale(spec: BasisSpec, rows) -> BasisSpec:
    """Return the spec with Chebyshev argument scaling fit to sample rows."""
    rows = np.atleast_2d(np.asarray(rows, dtype=float))
    sel = _select(spec, rows)
    return replace(spec, scale=(sel.min(axis=0), sel.max(axis=0)))


def basis_dimension(spec: BasisSpec, n_raw_columns: int) -> int:
    n_vars = len(spec.source) if spec.source is not None else n_raw_columns
    return producted_dimension(n_vars, spec.product_order, spec.mode)


def design_matrix(spec: BasisSpec, rows, cap: int = DEFAULT_DIMENSION_CAP) -> np.ndarray:
    """Evaluate the basis on every row; one feature vector per observation."""
    rows = np.atleast_2d(np.asarray(rows, dtype=float))
    sel = _select(spec, rows)
    n_vars = sel.shape[1]
    dim = producted_dimension(n_vars, spec.product_order, spec.mode)
    if dim > cap:
        raise DimensionError(f"producted dimension {dim} exceeds cap {cap}")
    if spec.kind == CHEBYSHEV:
        t = _scaled(spec, sel)
        per_var = [_chebyshev_columns(t[:, j], spec.product_order) for j in range(n_vars)]
    else:
        per_var = None
    out = np.empty((rows.shape[0], dim))
    for i, idx in enumerate(multi_indices(n_vars, spec.product_order, spec.mode)):
        col = np.ones(rows.shape[0])
        for j, k in enumerate(idx):
            if k:
                col = col * (per_var[j][k] if per_var is not None else sel[:, j] ** k)
        out[:, i] = col
    if not np.all(np.isfinite(out)):
        raise NumericalError("basis evaluation produced non-finite values")
    return out


def evaluate_basis(spec: BasisSpec, raw) -> np.ndarray:
    """Basis-evaluated feature vector of one raw row; constant always present."""
    return design_matrix(spec, np.atleast_2d(np.asarray(raw, dtype=float)))[0]


def parse_column_spec(text: str):
    """Parse `x=<a>-<b>;f=<c>-<d>[;w=<e>]` with zero-based inclusive ranges.

    Attribute and label ranges may alias each other (handy for identity-map
    checks); the weight column must not overlap either.
    """
    ranges = {}
    for part in text.split(";"):
        part = part.strip()
        if not part:
            continue
        if "=" not in part:
            raise DataError(f"bad column spec fragment {part!r}")
        key, _, val = part.partition("=")
        key = key.strip()
        if key not in ("x", "f", "w") or key in ranges:
            raise DataError(f"bad or repeated column spec key {key!r}")
        lo, dash, hi = val.partition("-")
        try:
            a = int(lo)
            b = int(hi) if dash else a
        except ValueError as exc:
            raise DataError(f"bad column range {val!r}") from exc
        if a < 0 or b < a:
            raise DataError(f"bad column range {val!r}")
        ranges[key] = list(range(a, b + 1))
    if "x" not in ranges or "f" not in ranges:
        raise DataError("column spec must name both x and f ranges")
    if "w" in ranges:
        if len(ranges["w"]) != 1:
            raise DataError("weight spec must name a single column")
        if set(ranges["w"]) & (set(ranges["x"]) | set(ranges["f"])):
            raise DataError("weight column overlaps attribute or label columns")
    return ranges["x"], ranges["f"], ranges.get("w", [None])[0]


def load_sample(path, column_spec: str) -> Sample:
    """Load a CSV of decimal reals into a Sample; rows keep file order.

    Lines starting with '#' are comments. Weights default to 1 when the spec
    names no w column.
    """
    x_cols, f_cols, w_col = parse_column_spec(column_spec)
    rows = []
    try:
        with open(path, "r", encoding="utf-8") as handle:
            raw_lines = handle.readlines()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    for line in raw_lines:
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split(",")
        try:
            rows.append([float(tok) for tok in fields])
        except ValueError as exc:
            raise DataError(f"malformed value in row {len(rows) + 1}") from exc
        if not all(np.isfinite(rows[-1])):
            raise DataError(f"non-finite value in row {len(rows) + 1}")
    if not rows:
        raise DataError(f"no data rows in {path}")
    width = len(rows[0])
    for i, row in enumerate(rows):
        if len(row) != width:
            raise DataError(f"ragged row {i + 1}: expected {width} fields")
    needed = max(x_cols + f_cols + ([w_col] if w_col is not None else []))
    if needed >= width:
        raise DataError(f"column {needed} out of range for {width}-column file")
    table = np.asarray(rows, dtype=float)
    weights = table[:, w_col] if w_col is not None else np.ones(table.shape[0])
    return Sample(table[:, x_cols], table[:, f_cols], weights)
