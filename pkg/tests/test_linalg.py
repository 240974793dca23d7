import numpy as np
import pytest

import kgo
from kgo.errors import NumericalError


class TestSymEig:
    def test_diagonal(self):
        res = kgo.sym_eig(np.diag([2.0, 1.0]))
        np.testing.assert_allclose(res.eigenvalues, [2.0, 1.0])
        np.testing.assert_allclose(np.abs(res.eigenvectors), np.eye(2))

    def test_two_by_two_exchange(self):
        res = kgo.sym_eig([[0.0, 1.0], [1.0, 0.0]])
        np.testing.assert_allclose(res.eigenvalues, [1.0, -1.0])
        r = 1.0 / np.sqrt(2.0)
        np.testing.assert_allclose(res.eigenvectors[:, 0], [r, r])
        np.testing.assert_allclose(res.eigenvectors[:, 1], [r, -r])

    def test_scalar(self):
        res = kgo.sym_eig([[5.0]])
        np.testing.assert_allclose(res.eigenvalues, [5.0])

    def test_rejects_asymmetric(self):
        with pytest.raises(NumericalError):
            kgo.sym_eig([[0.0, 1.0], [0.0, 0.0]])

    def test_rejects_non_finite(self):
        with pytest.raises(NumericalError):
            kgo.sym_eig([[np.nan, 0.0], [0.0, 1.0]])

    def test_reconstruction_property(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            n = int(rng.integers(1, 31))
            a = rng.normal(size=(n, n))
            a = a + a.T
            res = kgo.sym_eig(a)
            scale = 1.0 + np.linalg.norm(a)
            for i in range(n):
                resid = a @ res.eigenvectors[:, i] - res.eigenvalues[i] * res.eigenvectors[:, i]
                assert np.linalg.norm(resid) <= 1e-10 * scale
            gram = res.eigenvectors.T @ res.eigenvectors
            assert np.abs(gram - np.eye(n)).max() <= 1e-12


class TestGenEig:
    def test_identity_b_matches_sym_eig(self):
        a = np.diag([2.0, 1.0])
        res = kgo.gen_sym_eig(a, np.eye(2))
        plain = kgo.sym_eig(a)
        np.testing.assert_allclose(res.eigenvalues, plain.eigenvalues)

    def test_diagonal_ratio(self):
        res = kgo.gen_sym_eig(np.diag([4.0, 1.0]), np.diag([2.0, 1.0]))
        np.testing.assert_allclose(res.eigenvalues, [2.0, 1.0])

    def test_identity_pencil(self):
        rng = np.random.default_rng(3)
        a = rng.normal(size=(4, 4))
        spd = a @ a.T + 4.0 * np.eye(4)
        res = kgo.gen_sym_eig(spd, spd)
        np.testing.assert_allclose(res.eigenvalues, np.ones(4), atol=1e-12)

    def test_b_orthonormality_and_residual(self):
        rng = np.random.default_rng(4)
        for _ in range(10):
            n = int(rng.integers(2, 31))
            a = rng.normal(size=(n, n))
            a = a + a.T
            b = rng.normal(size=(n, n))
            b = b @ b.T + n * np.eye(n)
            res = kgo.gen_sym_eig(a, b)
            scale = 1.0 + np.linalg.norm(a) + np.linalg.norm(b)
            for i in range(n):
                resid = a @ res.eigenvectors[:, i] - res.eigenvalues[i] * (b @ res.eigenvectors[:, i])
                assert np.linalg.norm(resid) <= 1e-10 * scale
            gram = res.eigenvectors.T @ b @ res.eigenvectors
            assert np.abs(gram - np.eye(n)).max() <= 1e-12 * scale

    def test_whitening_route_agreement(self):
        rng = np.random.default_rng(5)
        a = rng.normal(size=(6, 6))
        a = a + a.T
        b = rng.normal(size=(6, 6))
        b = b @ b.T + 6.0 * np.eye(6)
        w = kgo.spd_inverse_sqrt(b)
        np.testing.assert_allclose(kgo.gen_sym_eig(a, b).eigenvalues,
                                   kgo.sym_eig(w @ a @ w).eigenvalues, atol=1e-9)

    def test_rejects_indefinite_b(self):
        with pytest.raises(NumericalError):
            kgo.gen_sym_eig(np.eye(2), np.diag([1.0, -1.0]))


class TestSvd:
    def test_diagonal(self):
        _, s, _ = kgo.svd(np.diag([3.0, 2.0]))
        np.testing.assert_allclose(s, [3.0, 2.0])

    def test_permuted_diagonal(self):
        u, s, v = kgo.svd([[0.0, 2.0], [1.0, 0.0]])
        np.testing.assert_allclose(s, [2.0, 1.0])
        np.testing.assert_allclose(u @ np.diag(s) @ v.T, [[0.0, 2.0], [1.0, 0.0]], atol=1e-12)

    def test_zero_matrix(self):
        u, s, v = kgo.svd(np.zeros((2, 2)))
        np.testing.assert_array_equal(s, [0.0, 0.0])
        np.testing.assert_array_equal(u, np.eye(2))
        np.testing.assert_array_equal(v, np.eye(2))

    def test_reconstruction_wide(self):
        rng = np.random.default_rng(6)
        for _ in range(10):
            d = int(rng.integers(1, 5))
            n = int(rng.integers(d, 9))
            m = rng.normal(size=(d, n))
            u, s, v = kgo.svd(m)
            sigma = np.zeros((d, n))
            sigma[:d, :d] = np.diag(s)
            assert np.abs(u @ sigma @ v.T - m).max() <= 1e-12 * (1.0 + np.abs(m).max())
            np.testing.assert_allclose(u.T @ u, np.eye(d), atol=1e-12)
            np.testing.assert_allclose(v.T @ v, np.eye(n), atol=1e-12)

    def test_rejects_non_finite(self):
        with pytest.raises(NumericalError):
            kgo.svd([[np.inf, 0.0]])


class TestSpdInverseSqrt:
    def test_diagonal(self):
        np.testing.assert_allclose(kgo.spd_inverse_sqrt(np.diag([4.0, 9.0])),
                                   np.diag([0.5, 1.0 / 3.0]))

    def test_identity(self):
        np.testing.assert_allclose(kgo.spd_inverse_sqrt(np.eye(3)), np.eye(3))

    def test_defining_property(self):
        g = np.array([[2.0, 1.0], [1.0, 2.0]])
        w = kgo.spd_inverse_sqrt(g)
        np.testing.assert_allclose(w @ g @ w, np.eye(2), atol=1e-10)
        np.testing.assert_allclose(w, w.T)

    def test_rejects_singular(self):
        with pytest.raises(NumericalError):
            kgo.spd_inverse_sqrt(np.diag([1.0, 0.0]))

    def test_random_spd_property(self):
        rng = np.random.default_rng(7)
        for _ in range(10):
            n = int(rng.integers(1, 31))
            a = rng.normal(size=(n, n))
            g = a @ a.T + n * np.eye(n)
            w = kgo.spd_inverse_sqrt(g)
            assert np.abs(w @ g @ w - np.eye(n)).max() <= 1e-10 * np.linalg.norm(g)


class TestDeterminism:
    def test_sign_convention_stable(self):
        rng = np.random.default_rng(8)
        a = rng.normal(size=(8, 8))
        a = a + a.T
        first = kgo.sym_eig(a)
        second = kgo.sym_eig(a.copy())
        np.testing.assert_array_equal(first.eigenvectors, second.eigenvectors)
