import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import fd_laplacian, random_rbf_instance
from varclass.errors import ShapeError
from varclass.rbf_core import (
    RbfExpansion,
    g_eval,
    kernel_matrices,
    laplacian_u,
    rbf_eval,
    sigmoid,
    sqdist_matrix,
    u_eval,
)


def test_rbf_at_center_is_one():
    assert rbf_eval([0.3, -1.2], [0.3, -1.2], 7.5) == 1.0


def test_rbf_unit_distance():
    # exp(-0.5) from a 30-digit evaluation
    assert rbf_eval([1.0, 0.0], [0.0, 0.0], 0.5) == pytest.approx(0.6065306597126334, abs=1e-15)


def test_rbf_flat_limit():
    assert rbf_eval([3.0, 4.0], [0.0, 0.0], 1e-300) == 1.0


def test_rbf_dimension_mismatch():
    with pytest.raises(ShapeError):
        rbf_eval([1.0, 2.0], [1.0, 2.0, 3.0], 1.0)


def test_expansion_validates():
    with pytest.raises(ShapeError):
        RbfExpansion([[0.0, 0.0], [1.0, 1.0]], [1.0], 1.0)
    with pytest.raises(ValueError):
        RbfExpansion([[0.0]], [1.0], 0.0)
    with pytest.raises(ValueError):
        RbfExpansion([[np.nan]], [1.0], 1.0)


def test_u_zero_weights():
    e = RbfExpansion([[0.0, 1.0], [2.0, 2.0]], [0.0, 0.0], 1.3)
    assert u_eval(e, [0.5, 0.5]) == 0.0


def test_u_single_center():
    e = RbfExpansion([[0.4, -0.1]], [3.0], 2.0)
    assert u_eval(e, [0.4, -0.1]) == 3.0


def test_u_matches_termwise_sum(rng):
    centers = rng.standard_normal((2, 3))
    w = rng.standard_normal(2)
    x = rng.standard_normal(3)
    c = 0.8
    by_hand = sum(w[i] * math.exp(-c * sum((x[k] - centers[i][k]) ** 2 for k in range(3))) for i in range(2))
    assert u_eval(RbfExpansion(centers, w, c), x) == pytest.approx(by_hand, abs=1e-12)


def test_u_dimension_mismatch():
    with pytest.raises(ShapeError):
        u_eval(RbfExpansion([[0.0, 0.0]], [1.0], 1.0), [1.0])


@pytest.mark.parametrize("m", [1, 2, 5])
@pytest.mark.parametrize("c", [0.5, 1.0, 3.0])
def test_laplacian_at_center(m, c):
    e = RbfExpansion(np.zeros((1, m)), [1.0], c)
    x = np.zeros(m)
    fd = fd_laplacian(lambda p: u_eval(e, p), x)
    assert fd == pytest.approx(-2 * c * m, rel=1e-5)
    assert laplacian_u(e, x) == pytest.approx(-2 * c * m, rel=1e-14)


def test_laplacian_zero_crossing():
    e = RbfExpansion([[0.0]], [1.0], 1.0)
    x = np.array([math.sqrt(0.5)])
    assert laplacian_u(e, x) == pytest.approx(0.0, abs=1e-15)
    # finite differences see the sign change either side of r^2 = m / 2c
    inside = fd_laplacian(lambda p: u_eval(e, p), x - 0.01)
    outside = fd_laplacian(lambda p: u_eval(e, p), x + 0.01)
    assert inside < 0 < outside


def test_laplacian_zero_weights():
    e = RbfExpansion([[1.0, 2.0]], [0.0], 2.0)
    assert laplacian_u(e, [0.0, 0.0]) == 0.0


@pytest.mark.parametrize("m", [1, 2, 5, 30])
def test_laplacian_matches_finite_differences(m, rng):
    for _ in range(10):
        c = rng.uniform(0.5, 5.0)
        centers, w, x = random_rbf_instance(rng, m, c)
        e = RbfExpansion(centers, w, c)
        analytic = laplacian_u(e, x)
        fd = fd_laplacian(lambda p: u_eval(e, p), x)
        r2 = np.sum((centers - x) ** 2, axis=1)
        scale = np.sum(np.abs(w * 2 * c * np.exp(-c * r2) * (2 * c * r2 - m)))
        assert abs(analytic - fd) <= 1e-4 * max(abs(fd), scale)


def test_linearity_in_weights(rng):
    centers = rng.standard_normal((4, 3))
    w1, w2 = rng.standard_normal(4), rng.standard_normal(4)
    x = rng.standard_normal(3)
    e1, e2, e12 = (RbfExpansion(centers, w, 1.7) for w in (w1, w2, w1 + w2))
    assert u_eval(e12, x) == pytest.approx(u_eval(e1, x) + u_eval(e2, x), abs=1e-10)
    assert laplacian_u(e12, x) == pytest.approx(laplacian_u(e1, x) + laplacian_u(e2, x), abs=1e-10)


def test_sigmoid_values():
    assert sigmoid(0.0) == 0.5
    with np.errstate(over="raise"):
        assert sigmoid(1000.0) == 1.0
        assert sigmoid(-1000.0) == 0.0
    assert abs(sigmoid(0.7) + sigmoid(-0.7) - 1.0) <= 1e-15


def test_sigmoid_array():
    out = sigmoid(np.array([-800.0, 0.0, 800.0]))
    np.testing.assert_array_equal(out, [0.0, 0.5, 1.0])


@given(st.floats(-1e308, 1e308), st.floats(-1e308, 1e308))
def test_sigmoid_monotone_and_finite(a, b):
    lo, hi = min(a, b), max(a, b)
    s_lo, s_hi = sigmoid(lo), sigmoid(hi)
    assert not math.isnan(s_lo) and not math.isnan(s_hi)
    assert 0.0 <= s_lo <= s_hi <= 1.0


@settings(max_examples=200)
@given(
    st.lists(st.floats(-5, 5), min_size=2, max_size=2),
    st.lists(st.floats(-5, 5), min_size=2, max_size=2),
    st.floats(0.01, 10),
)
def test_rbf_range(x, center, c):
    v = rbf_eval(x, center, c)
    assert 0.0 <= v <= 1.0
    if x == center:
        assert v == 1.0


def test_g_zero_weights():
    e = RbfExpansion([[0.0, 0.0], [1.0, 1.0]], [0.0, 0.0], 1.0)
    for lam in (0.0, 1.0, 7.0):
        assert g_eval(e, lam, [0.3, 0.3]) == 0.5


def test_g_without_regularizer_is_sigmoid_of_u(rng):
    e = RbfExpansion(rng.standard_normal((3, 2)), rng.standard_normal(3), 1.1)
    x = rng.standard_normal(2)
    assert g_eval(e, 0.0, x) == sigmoid(u_eval(e, x))


def test_g_composed_value():
    e = RbfExpansion([[0.0, 0.0]], [1.0], 1.0)
    # sigma(1) + 4, 30-digit reference
    assert g_eval(e, 1.0, [0.0, 0.0]) == pytest.approx(4.731058578630005, abs=1e-12)


@settings(max_examples=100)
@given(st.lists(st.floats(-50, 50), min_size=3, max_size=3), st.floats(-3, 3), st.floats(-3, 3))
def test_g_bounded_without_regularizer(w, x0, x1):
    e = RbfExpansion([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], w, 0.9)
    g = g_eval(e, 0.0, [x0, x1])
    assert 0.0 <= g <= 1.0


def test_g_unbounded_with_regularizer():
    e = RbfExpansion([[0.0, 0.0]], [1.0], 1.0)
    assert g_eval(e, 1.0, [0.0, 0.0]) > 1.0


def test_g_rejects_negative_lambda():
    with pytest.raises(ValueError):
        g_eval(RbfExpansion([[0.0]], [1.0], 1.0), -1.0, [0.0])


def test_kernel_matrices_agree_with_pointwise(rng):
    centers = rng.standard_normal((5, 3))
    X = rng.standard_normal((4, 3))
    w = rng.standard_normal(5)
    e = RbfExpansion(centers, w, 0.9)
    phi, lap = kernel_matrices(sqdist_matrix(X, centers), 0.9, 3)
    for i, x in enumerate(X):
        assert phi[i] @ w == pytest.approx(u_eval(e, x), abs=1e-12)
        assert lap[i] @ w == pytest.approx(laplacian_u(e, x), abs=1e-12)
