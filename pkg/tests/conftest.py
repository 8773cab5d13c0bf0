"""Shared test helpers: explicit-feature-map oracles for the kernel trick."""

import numpy as np

from kernelshot import poly_feature_map


def explicit_poly_point(x, degree, bias):
    """phi(x) materialised explicitly; the oracle side of kernel-trick checks."""
    return poly_feature_map(np.asarray(x, dtype=float), degree, bias)


def explicit_combination(points, weights, degree, bias):
    """sum_i w_i phi(x_i) materialised explicitly."""
    feats = np.stack([explicit_poly_point(p, degree, bias) for p in np.asarray(points, dtype=float)])
    return np.asarray(weights, dtype=float) @ feats


def random_kernel_case(rng, max_d=4, max_degree=3):
    """One random polynomial-kernel scenario: dimensions, kernel, and points."""
    d = int(rng.integers(1, max_d + 1))
    degree = int(rng.integers(1, max_degree + 1))
    bias = float(rng.choice([0.0, 0.5, 1.0]))
    return d, degree, bias
