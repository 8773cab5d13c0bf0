"""Kernel evaluation, Gram matrices, implicit combinations, and the explicit
polynomial feature map that serves as their independent oracle."""

import math

import numpy as np
import pytest

from conftest import explicit_combination, explicit_poly_point, random_kernel_case
from kernelshot import (
    FeatureCombination,
    KernelSpec,
    centered_inner,
    centered_sq_norm,
    combo_pair_stats,
    eval_kernel,
    gaussian_kernel,
    gram_matrix,
    linear_kernel,
    mean_combination,
    multi_index_basis,
    poly_coefficient,
    poly_feature_dim,
    poly_feature_map,
    polynomial_kernel,
    singleton_combination,
)

ALL_SPECS = [
    linear_kernel(0.0),
    linear_kernel(1.0),
    polynomial_kernel(2, 1.0),
    polynomial_kernel(3, 0.5),
    gaussian_kernel(1.0),
    gaussian_kernel(0.25),
]


class TestKernelSpec:
    def test_invalid_parameters(self):
        with pytest.raises(ValueError):
            KernelSpec("polynomial", degree=0)
        with pytest.raises(ValueError):
            KernelSpec("polynomial", degree=2, bias=-0.1)
        with pytest.raises(ValueError):
            KernelSpec("gaussian", sigma=0.0)
        with pytest.raises(ValueError):
            KernelSpec("linear", degree=2)
        with pytest.raises(ValueError):
            KernelSpec("sigmoid")

    def test_labels_distinct(self):
        labels = {spec.label for spec in ALL_SPECS}
        assert len(labels) == len(ALL_SPECS)


class TestEvalKernel:
    def test_polynomial_unit_vector(self):
        e1 = np.array([1.0, 0.0])
        assert eval_kernel(polynomial_kernel(2, 1.0), e1, e1) == 4.0

    def test_gaussian_zero_distance(self):
        x = np.array([0.3, -1.2, 0.8])
        for sigma in (0.25, 1.0, 5.0):
            assert eval_kernel(gaussian_kernel(sigma), x, x) == 1.0

    def test_linear_orthogonal(self):
        assert eval_kernel(linear_kernel(0.0), [1.0, 0.0], [0.0, 2.0]) == 0.0

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="dimension mismatch"):
            eval_kernel(linear_kernel(), [1.0, 2.0], [1.0, 2.0, 3.0])

    @pytest.mark.parametrize("spec", ALL_SPECS, ids=lambda s: s.label)
    def test_symmetry(self, spec):
        rng = np.random.default_rng(7)
        for _ in range(25):
            x = rng.normal(size=3)
            y = rng.normal(size=3)
            assert eval_kernel(spec, x, y) == eval_kernel(spec, y, x)


class TestGramMatrix:
    def test_gaussian_unit_diagonal(self):
        rng = np.random.default_rng(0)
        X = rng.normal(size=(6, 4))
        K = gram_matrix(gaussian_kernel(0.7), X)
        assert np.all(np.diagonal(K) == 1.0)

    def test_orthonormal_linear_identity(self):
        K = gram_matrix(linear_kernel(0.0), np.eye(4))
        np.testing.assert_array_equal(K, np.eye(4))

    def test_matches_entrywise_loop(self):
        rng = np.random.default_rng(3)
        X = rng.normal(size=(4, 3))
        for spec in ALL_SPECS:
            K = gram_matrix(spec, X)
            for i in range(4):
                for j in range(4):
                    assert K[i, j] == pytest.approx(eval_kernel(spec, X[i], X[j]), abs=1e-12)

    def test_empty_raises(self):
        with pytest.raises(ValueError):
            gram_matrix(linear_kernel(), np.empty((0, 3)))

    @pytest.mark.parametrize("spec", ALL_SPECS, ids=lambda s: s.label)
    def test_positive_semidefinite(self, spec):
        rng = np.random.default_rng(11)
        for _ in range(50):
            n = int(rng.integers(2, 12))
            d = int(rng.integers(1, 6))
            X = rng.normal(scale=rng.uniform(0.2, 2.0), size=(n, d))
            K = gram_matrix(spec, X)
            assert np.linalg.eigvalsh(K).min() >= -1e-8


class TestPolyFeatureMap:
    def test_dimension_count(self):
        assert poly_feature_dim(2, 2) == 6
        assert len(multi_index_basis(2, 2)) == 6
        assert poly_feature_map(np.zeros(2), 2, 1.0).size == 6

    def test_zero_input_constant_term(self):
        phi = poly_feature_map(np.zeros(3), 2, 1.0)
        assert phi[0] == 1.0
        assert np.all(phi[1:] == 0.0)

    def test_graded_lex_order(self):
        basis = multi_index_basis(2, 2)
        assert basis == [(0, 0), (0, 1), (1, 0), (0, 2), (1, 1), (2, 0)]

    def test_kernel_identity_cubic(self):
        rng = np.random.default_rng(42)
        for _ in range(20):
            x = rng.uniform(-1, 1, size=3)
            y = rng.uniform(-1, 1, size=3)
            lhs = poly_feature_map(x, 3, 1.0) @ poly_feature_map(y, 3, 1.0)
            assert lhs == pytest.approx((1.0 + x @ y) ** 3, abs=1e-10)

    def test_kernel_identity_random_cases(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            d, degree, bias = random_kernel_case(rng)
            x = rng.uniform(-1, 1, size=d)
            y = rng.uniform(-1, 1, size=d)
            lhs = poly_feature_map(x, degree, bias) @ poly_feature_map(y, degree, bias)
            assert lhs == pytest.approx((bias**2 + x @ y) ** degree, abs=1e-10)

    def test_dim_cap(self):
        with pytest.raises(ValueError, match="exceeds cap"):
            poly_feature_map(np.zeros(100), 5, 1.0, dim_cap=10**4)

    def test_coefficient_is_multinomial_weighted(self):
        # alpha((1,1))^2 for degree 2 must carry the multinomial factor 2
        assert poly_coefficient((1, 1), 2, 0.0) == pytest.approx(math.sqrt(2.0))
        assert poly_coefficient((2, 0), 2, 0.0) == 1.0


class TestCenteredOps:
    def test_identity_point_zero(self):
        for spec in ALL_SPECS:
            y = np.array([0.4, -0.3])
            c = singleton_combination(spec, y)
            assert centered_sq_norm(spec, y, c) <= 1e-12

    def test_gaussian_singleton_expansion(self):
        spec = gaussian_kernel(0.5)
        rng = np.random.default_rng(2)
        for _ in range(20):
            x = rng.normal(size=3)
            y = rng.normal(size=3)
            expected = 2.0 - 2.0 * eval_kernel(spec, y, x)
            got = centered_sq_norm(spec, y, singleton_combination(spec, x))
            assert got == pytest.approx(expected, abs=1e-12)

    def test_gaussian_bounded_by_sphere_diameter(self):
        spec = gaussian_kernel(1.0)
        rng = np.random.default_rng(9)
        for _ in range(100):
            x = rng.normal(scale=3.0, size=4)
            y = rng.normal(scale=3.0, size=4)
            assert centered_sq_norm(spec, y, singleton_combination(spec, x)) <= 4.0 + 1e-9

    def test_diagonal_consistency(self):
        rng = np.random.default_rng(13)
        for spec in ALL_SPECS:
            pts = rng.normal(size=(3, 2))
            c = mean_combination(spec, pts)
            y = rng.normal(size=2)
            assert centered_inner(spec, y, y, c) == pytest.approx(
                centered_sq_norm(spec, y, c), abs=1e-12
            )

    def test_zero_vector_factor(self):
        rng = np.random.default_rng(14)
        for spec in ALL_SPECS:
            y = rng.normal(size=2)
            c = singleton_combination(spec, y)
            for _ in range(5):
                z = rng.normal(size=2)
                assert centered_inner(spec, y, z, c) == pytest.approx(0.0, abs=1e-12)

    def test_cauchy_schwarz(self):
        rng = np.random.default_rng(15)
        for spec in ALL_SPECS:
            for _ in range(40):
                pts = rng.normal(size=(3, 3))
                weights = rng.normal(size=3)
                c = FeatureCombination(spec, pts, weights)
                y = rng.normal(size=3)
                z = rng.normal(size=3)
                lhs = abs(centered_inner(spec, y, z, c))
                rhs = math.sqrt(
                    centered_sq_norm(spec, y, c) * centered_sq_norm(spec, z, c)
                )
                assert lhs <= rhs + 1e-9

    def test_combo_pair_stats_identical(self):
        spec = polynomial_kernel(2, 1.0)
        pts = np.array([[0.1, 0.5], [-0.2, 0.3]])
        A = mean_combination(spec, pts)
        assert combo_pair_stats(spec, A, A).sq_distance == 0.0

    def test_combo_pair_stats_gaussian_singletons(self):
        spec = gaussian_kernel(2.0)
        rng = np.random.default_rng(21)
        for _ in range(10):
            x = rng.normal(size=3)
            y = rng.normal(size=3)
            stats = combo_pair_stats(
                spec, singleton_combination(spec, x), singleton_combination(spec, y)
            )
            assert stats.sq_distance == pytest.approx(2.0 - 2.0 * eval_kernel(spec, x, y), abs=1e-12)

    def test_weights_length_mismatch(self):
        with pytest.raises(ValueError, match="weights length"):
            FeatureCombination(linear_kernel(), np.zeros((2, 2)), np.ones(3))

    def test_spec_mismatch(self):
        c = singleton_combination(linear_kernel(), np.array([1.0, 0.0]))
        with pytest.raises(ValueError, match="kernel spec mismatch"):
            centered_sq_norm(gaussian_kernel(1.0), np.array([0.0, 0.0]), c)

    def test_combination_immutable(self):
        c = singleton_combination(linear_kernel(), np.array([1.0, 0.0]))
        with pytest.raises(ValueError):
            c.support[0, 0] = 2.0


class TestKernelTrickOracle:
    """Kernel-trick results must agree with the explicit polynomial map."""

    def test_centered_ops_match_explicit_map(self):
        rng = np.random.default_rng(100)
        for _ in range(100):
            d, degree, bias = random_kernel_case(rng)
            spec = polynomial_kernel(degree, bias)
            n = int(rng.integers(1, 4))
            pts = rng.uniform(-1, 1, size=(n, d))
            weights = rng.normal(size=n)
            c = FeatureCombination(spec, pts, weights)
            c_vec = explicit_combination(pts, weights, degree, bias)
            y = rng.uniform(-1, 1, size=d)
            z = rng.uniform(-1, 1, size=d)
            phi_y = explicit_poly_point(y, degree, bias)
            phi_z = explicit_poly_point(z, degree, bias)

            assert centered_sq_norm(spec, y, c) == pytest.approx(
                float((phi_y - c_vec) @ (phi_y - c_vec)), abs=1e-9
            )
            assert centered_inner(spec, y, z, c) == pytest.approx(
                float((phi_y - c_vec) @ (phi_z - c_vec)), abs=1e-9
            )

    def test_combo_pair_stats_match_explicit_map(self):
        rng = np.random.default_rng(200)
        for _ in range(50):
            d, degree, bias = random_kernel_case(rng, max_d=2, max_degree=2)
            spec = polynomial_kernel(degree, bias)
            pts_a = rng.uniform(-1, 1, size=(2, d))
            pts_b = rng.uniform(-1, 1, size=(3, d))
            w_a = rng.normal(size=2)
            w_b = rng.normal(size=3)
            A = FeatureCombination(spec, pts_a, w_a)
            B = FeatureCombination(spec, pts_b, w_b)
            a_vec = explicit_combination(pts_a, w_a, degree, bias)
            b_vec = explicit_combination(pts_b, w_b, degree, bias)
            stats = combo_pair_stats(spec, A, B)
            assert stats.sq_distance == pytest.approx(
                float((a_vec - b_vec) @ (a_vec - b_vec)), abs=1e-9
            )
            assert stats.inner == pytest.approx(float(a_vec @ b_vec), abs=1e-9)
