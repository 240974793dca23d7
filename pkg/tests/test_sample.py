import numpy as np
import pytest

import kgo
from kgo.errors import DataError, DimensionError, NumericalError


def write(tmp_path, text, name="data.csv"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


class TestLoadSample:
    def test_three_row_file(self, tmp_path):
        path = write(tmp_path, "-1,-1\n0,0\n1,1\n")
        s = kgo.load_sample(path, "x=0;f=1")
        assert s.size == 3
        np.testing.assert_array_equal(s.weights, np.ones(3))
        np.testing.assert_array_equal(s.x_rows[:, 0], [-1, 0, 1])

    def test_aliased_columns(self, tmp_path):
        path = write(tmp_path, "-1,-1\n0,0\n1,1\n")
        s = kgo.load_sample(path, "x=0;f=0")
        np.testing.assert_array_equal(s.f_rows, s.x_rows)

    def test_malformed_row_names_row(self, tmp_path):
        path = write(tmp_path, "1,2\n1,oops\n3,4\n")
        with pytest.raises(DataError, match="row 2"):
            kgo.load_sample(path, "x=0;f=1")

    def test_missing_file(self, tmp_path):
        with pytest.raises(DataError):
            kgo.load_sample(str(tmp_path / "absent.csv"), "x=0;f=1")

    def test_weight_column_and_comments(self, tmp_path):
        path = write(tmp_path, "# header\n1,2,0.5\n3,4,1.5\n")
        s = kgo.load_sample(path, "x=0;f=1;w=2")
        np.testing.assert_array_equal(s.weights, [0.5, 1.5])

    def test_weight_overlap_rejected(self):
        with pytest.raises(DataError):
            kgo.parse_column_spec("x=0-1;f=2;w=1")

    def test_empty_selection(self, tmp_path):
        path = write(tmp_path, "# only a comment\n")
        with pytest.raises(DataError):
            kgo.load_sample(path, "x=0;f=1")

    def test_column_out_of_range(self, tmp_path):
        path = write(tmp_path, "1,2\n")
        with pytest.raises(DataError):
            kgo.load_sample(path, "x=0;f=5")

    def test_ragged_rows(self, tmp_path):
        path = write(tmp_path, "1,2\n1,2,3\n")
        with pytest.raises(DataError):
            kgo.load_sample(path, "x=0;f=1")


class TestColumnSpec:
    def test_ranges(self):
        assert kgo.parse_column_spec("x=0-6;f=7-8;w=9") == (
            list(range(7)), [7, 8], 9)

    @pytest.mark.parametrize("bad", ["x=0", "f=1", "x=a;f=1", "x=3-1;f=0",
                                     "x=0;x=1;f=2", "q=0;f=1;x=2", "x=0;f=1;w=2-3"])
    def test_rejects(self, bad):
        with pytest.raises(DataError):
            kgo.parse_column_spec(bad)


class TestProductAttributes:
    def test_exact_count(self):
        out = kgo.product_attributes(np.ones(3), 2, "exact")
        assert out.shape[0] == 6  # C(4, 2)

    def test_order_zero(self):
        np.testing.assert_array_equal(kgo.product_attributes([3.0, 4.0], 0), [1.0])

    def test_lexicographic_values(self):
        np.testing.assert_allclose(kgo.product_attributes([2.0, 3.0], 2), [4.0, 6.0, 9.0])

    def test_dimension_cap(self):
        with pytest.raises(DimensionError):
            kgo.product_attributes(np.ones(10), 8, "exact", cap=1000)

    @pytest.mark.parametrize("n", range(1, 7))
    @pytest.mark.parametrize("order", range(6))
    def test_counts_match_closed_form(self, n, order):
        for mode in ("exact", "up_to"):
            listed = sum(1 for _ in kgo.multi_indices(n, order, mode))
            assert listed == kgo.producted_dimension(n, order, mode)
            assert kgo.product_attributes(np.ones(n), order, mode).shape[0] == listed

    def test_up_to_constant_first(self):
        indices = list(kgo.multi_indices(3, 2, "up_to"))
        assert indices[0] == (0, 0, 0)
        degrees = [sum(i) for i in indices]
        assert degrees == sorted(degrees)


class TestWeightedAverage:
    def test_total_weight(self, three_point_sample):
        assert kgo.weighted_average(three_point_sample, 1.0) == 3.0

    def test_first_moment(self, three_point_sample):
        assert kgo.weighted_average(three_point_sample, lambda x, f: x[0]) == 0.0

    def test_second_moment(self, three_point_sample):
        assert kgo.weighted_average(three_point_sample, lambda x, f: x[0] ** 2) == 2.0

    def test_linear_in_values_and_weights(self):
        rng = np.random.default_rng(0)
        x = rng.normal(size=(17, 2))
        w = rng.uniform(0.1, 1.0, size=17)
        s1 = kgo.Sample(x, x, w)
        s2 = kgo.Sample(x, x, 2.0 * w)
        vals = rng.normal(size=17)
        a = kgo.weighted_average(s1, vals)
        assert kgo.weighted_average(s1, 3.0 * vals) == pytest.approx(3.0 * a)
        assert kgo.weighted_average(s2, vals) == pytest.approx(2.0 * a)

    def test_non_finite_rejected(self, three_point_sample):
        with pytest.raises(NumericalError):
            kgo.weighted_average(three_point_sample, [1.0, np.inf, 0.0])


class TestEvaluateBasis:
    def test_monomial_powers(self):
        spec = kgo.BasisSpec("monomial", 2)
        np.testing.assert_allclose(kgo.evaluate_basis(spec, [0.5]), [1.0, 0.5, 0.25])

    def test_chebyshev_degree_two(self):
        spec = kgo.BasisSpec("chebyshev", 2,
                             scale=(np.array([-1.0]), np.array([1.0])))
        np.testing.assert_allclose(kgo.evaluate_basis(spec, [0.5]), [1.0, 0.5, -0.5])

    def test_constant_basis(self):
        spec = kgo.BasisSpec("monomial", 0)
        for v in (-3.0, 0.0, 11.0):
            np.testing.assert_array_equal(kgo.evaluate_basis(spec, [v]), [1.0])

    def test_constant_component_always_one(self):
        rng = np.random.default_rng(1)
        for kind in ("monomial", "chebyshev"):
            spec = kgo.BasisSpec(kind, 3)
            spec = kgo.with_scale(spec, rng.normal(size=(20, 2)))
            for row in rng.normal(size=(5, 2)):
                vec = kgo.evaluate_basis(spec, row)
                assert vec[spec.constant_index] == pytest.approx(1.0)

    def test_source_out_of_range(self):
        spec = kgo.BasisSpec("monomial", 1, source=(3,))
        with pytest.raises(DimensionError):
            kgo.evaluate_basis(spec, [1.0, 2.0])


class TestSampleInvariants:
    def test_rejects_negative_weights(self):
        with pytest.raises(DataError):
            kgo.Sample([[1.0]], [[1.0]], [-1.0])

    def test_rejects_zero_total_weight(self):
        with pytest.raises(DataError):
            kgo.Sample([[1.0]], [[1.0]], [0.0])

    def test_rejects_count_mismatch(self):
        with pytest.raises(DimensionError):
            kgo.Sample([[1.0], [2.0]], [[1.0]], [1.0, 1.0])
