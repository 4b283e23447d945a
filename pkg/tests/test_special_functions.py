import math

import hypothesis as hyp
import hypothesis.strategies as st
import numpy as np
import pytest
from scipy.special import eval_genlaguerre, eval_hermite

from gauge_fields import MagneticSetup
from special_functions import (
    QuantumNumberError,
    assoc_laguerre,
    hermite,
    hermite_eval,
    hermite_function,
    laguerre_eval,
    norm_constants,
)


@pytest.mark.parametrize(
    'n, xi, expected',
    [
        (0, 0.7, 1.0),
        (1, 0.5, 1.0),
        (3, 1.0, -4.0),
    ]
)
def test_hermite_examples(n, xi, expected):
    assert hermite(n, xi) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize(
    'n, alpha, xi, expected',
    [
        (0, 3, 2.5, 1.0),
        (1, 1, 1.0, 1.0),
        (2, 0, 0.0, 1.0),
    ]
)
def test_assoc_laguerre_examples(n, alpha, xi, expected):
    assert assoc_laguerre(n, alpha, xi) == pytest.approx(expected, abs=1e-15)


@hyp.settings(max_examples=50, deadline=None)
@hyp.given(xi=st.floats(min_value=-5, max_value=5, allow_nan=False, allow_infinity=False))
def test_hermite_matches_explicit_low_degrees(xi):
    explicit = [
        1.0,
        2 * xi,
        4 * xi ** 2 - 2,
        8 * xi ** 3 - 12 * xi,
        16 * xi ** 4 - 48 * xi ** 2 + 12,
    ]
    for n, value in enumerate(explicit):
        assert hermite(n, xi) == pytest.approx(value, rel=1e-13, abs=1e-10)


@hyp.settings(max_examples=50, deadline=None)
@hyp.given(
    xi=st.floats(min_value=0, max_value=20, allow_nan=False, allow_infinity=False),
    alpha=st.integers(min_value=0, max_value=6),
)
def test_laguerre_matches_explicit_low_degrees(xi, alpha):
    a = alpha
    explicit = [
        1.0,
        1 + a - xi,
        (xi ** 2 - 2 * (a + 2) * xi + (a + 1) * (a + 2)) / 2,
    ]
    for n, value in enumerate(explicit):
        assert assoc_laguerre(n, alpha, xi) == pytest.approx(value, rel=1e-12, abs=1e-11)


@pytest.mark.parametrize('n', [5, 12, 20])
def test_recurrences_agree_with_scipy(n):
    xi = np.linspace(-3, 3, 13)
    np.testing.assert_allclose(hermite(n, xi), eval_hermite(n, xi), rtol=1e-12, atol=1e-12 * 2 ** n)
    r = np.linspace(0, 15, 13)
    for alpha in (0, 3, 7):
        expected = eval_genlaguerre(n, alpha, r)
        scale = float(np.max(np.abs(expected)))
        np.testing.assert_allclose(assoc_laguerre(n, alpha, r), expected, rtol=1e-10, atol=1e-12 * scale)


def test_hermite_orthogonality_by_gauss_hermite():
    nodes, weights = np.polynomial.hermite.hermgauss(60)
    for j in range(0, 21, 4):
        for k in range(0, 21, 3):
            integral = float(np.sum(weights * hermite(j, nodes) * hermite(k, nodes)))
            norm = math.sqrt(math.pi) * 2.0 ** k * math.factorial(k)
            if j == k:
                assert integral == pytest.approx(norm, rel=1e-10)
            else:
                scale = math.sqrt(norm * math.sqrt(math.pi) * 2.0 ** j * math.factorial(j))
                assert abs(integral) < 1e-10 * scale


@pytest.mark.parametrize('alpha', [0, 2, 5, 10])
def test_laguerre_orthogonality_by_gauss_laguerre(alpha):
    nodes, weights = np.polynomial.laguerre.laggauss(50)
    for j in range(0, 21, 4):
        for k in range(0, 21, 5):
            integral = float(np.sum(weights * nodes ** alpha * assoc_laguerre(j, alpha, nodes) * assoc_laguerre(k, alpha, nodes)))
            norm_k = math.factorial(k + alpha) / math.factorial(k)
            if j == k:
                assert integral == pytest.approx(norm_k, rel=1e-9)
            else:
                norm_j = math.factorial(j + alpha) / math.factorial(j)
                assert abs(integral) < 1e-9 * math.sqrt(norm_j * norm_k)


@pytest.mark.parametrize('n', [0, 1, 4, 10])
def test_hermite_function_is_normalized_polynomial(n):
    xi = np.linspace(-4, 4, 17)
    expected = hermite(n, xi) * np.exp(-0.5 * xi ** 2) / math.sqrt(math.sqrt(math.pi) * 2.0 ** n * math.factorial(n))
    np.testing.assert_allclose(hermite_function(n, xi), expected, rtol=1e-12, atol=1e-13)


def test_scaled_evaluation_stays_finite_at_high_degree():
    big = hermite_eval(200, 50.0)
    assert math.isfinite(big.value)
    assert math.isfinite(big.log_abs)
    assert big.log_abs > 700
    assert big.as_float() == math.inf

    lag = laguerre_eval(200, 3, 50.0)
    assert math.isfinite(lag.value)
    assert math.isfinite(lag.log_abs)


def test_scaled_evaluation_matches_plain_recurrence():
    assert hermite_eval(30, 2.0).as_float() == pytest.approx(hermite(30, 2.0), rel=1e-12)
    assert laguerre_eval(15, 2, 4.5).as_float() == pytest.approx(assoc_laguerre(15, 2, 4.5), rel=1e-12)
    assert hermite_eval(0, 3.0).as_float() == 1.0


def test_norm_constants_examples(setup):
    ground = norm_constants(setup, 0, 0)
    assert ground.N_n == pytest.approx(math.pi ** -0.25, rel=1e-14)
    assert ground.C_nm == pytest.approx(math.pi ** -0.25, rel=1e-14)
    assert norm_constants(setup, 1, 1).N_nm == pytest.approx(1.0, rel=1e-14)


def test_norm_constants_scale_with_magnetic_length():
    setup = MagneticSetup(eB=4.0)
    constants = norm_constants(setup, 0, 0)
    # l_B = 1/2
    assert constants.N_n == pytest.approx(math.pi ** -0.25 * math.sqrt(2.0), rel=1e-14)
    assert constants.N_nm == pytest.approx(2.0, rel=1e-14)


def test_norm_constants_finite_for_large_quantum_numbers(setup):
    constants = norm_constants(setup, 100, -70)
    for value in (constants.N_n, constants.N_nm, constants.C_nm):
        assert value > 0
        assert math.isfinite(value)


def test_quantum_number_checks(setup):
    with pytest.raises(QuantumNumberError):
        norm_constants(setup, 1, 2)
    with pytest.raises(QuantumNumberError):
        hermite(-1, 0.0)
    with pytest.raises(QuantumNumberError):
        assoc_laguerre(2, -1, 0.5)
