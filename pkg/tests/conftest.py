import numpy as np
import pytest

import kgo


@pytest.fixture
def three_point_sample():
    """x in {-1, 0, 1}, unit weights, labels equal to attributes."""
    x = np.array([[-1.0], [0.0], [1.0]])
    return kgo.Sample(x, x.copy(), np.ones(3))


@pytest.fixture
def line_spec():
    """Basis (1, t) of one raw column."""
    return kgo.BasisSpec("monomial", 1)


@pytest.fixture
def three_point_data(three_point_sample, line_spec):
    """Both sides of the three-point sample prepared with the (1, t) basis."""
    return kgo.prepare(three_point_sample, line_spec, line_spec)


def make_random_instance(rng, max_obs=200, max_n=8, max_m=4):
    """Random prepared dataset with constant columns on both sides, m <= n."""
    m_obs = int(rng.integers(20, max_obs + 1))
    n = int(rng.integers(2, max_n + 1))
    m = int(rng.integers(1, min(n, max_m) + 1))
    x = np.column_stack([np.ones(m_obs), rng.normal(size=(m_obs, n - 1))])
    f = np.column_stack([np.ones(m_obs),
                         x[:, 1:] @ rng.normal(size=(n - 1, max(m - 1, 1)))
                         + 0.3 * rng.normal(size=(m_obs, max(m - 1, 1)))])[:, :m]
    w = rng.uniform(0.1, 2.0, size=m_obs)
    return kgo.prepare_points(x, f, w)


def random_partially_unitary(rng, d, n):
    u = rng.normal(size=(d, n))
    return kgo.enforce_partial_unitarity(u)


def grid_sample(n_points=201, lo=-1.0, hi=1.0, labels=None):
    grid = np.linspace(lo, hi, n_points)
    w = np.full(n_points, (hi - lo) / n_points)
    f = grid if labels is None else labels(grid)
    return kgo.Sample(grid[:, None], np.asarray(f, dtype=float)[:, None], w), grid


def direct_coverage(data, u, kind, embed=None):
    """Independent per-observation oracle for every tensor kind.

    Plain python loop over observations; kept free of the flattened
    quadratic-form path it is used to check.
    """
    channel = np.asarray(u, dtype=float) if embed is None else embed @ np.asarray(u)
    total = 0.0
    projection = (kgo.label_matched_projection(data)
                  if kind is kgo.TensorKind.CHRISTOFFEL_PRODUCT_ADJUSTED else None)
    for l in range(data.size):
        xo = data.x_orth[l]
        fo = data.f_orth[l]
        amp = float(fo @ channel @ xo)
        term = amp * amp
        if kind in (kgo.TensorKind.CHRISTOFFEL_PRODUCT,
                    kgo.TensorKind.CHRISTOFFEL_PRODUCT_ADJUSTED,
                    kgo.TensorKind.F_CHRISTOFFEL):
            term /= float(fo @ fo)
        if kind is kgo.TensorKind.CHRISTOFFEL_PRODUCT:
            term /= float(xo @ xo)
        if kind is kgo.TensorKind.CHRISTOFFEL_PRODUCT_ADJUSTED:
            term /= float(xo @ projection @ xo)
        total += data.weights[l] * term
    return total
