import numpy as np
import pytest
from scipy.special import airy, gamma

from hoairy import _core, ai, ai_asymptotic, ai_deriv
from hoairy.fredholm import airy_cutoff, composite_gauss
from hoairy.specfun import HigherAiryEvaluator, QuadratureError


def ai_n_at_zero(n):
    p = 2 * n + 1
    return p ** (1 / p - 1) * gamma(1 / p) * np.cos(np.pi / (2 * p)) / np.pi


def test_ai1_matches_scipy_with_derivatives():
    x = np.linspace(-12.0, 10.0, 441)
    a, ap, _, _ = airy(x)
    assert np.max(np.abs(ai(1, x) - a)) < 1e-12
    assert np.max(np.abs(ai_deriv(1, x, 1) - ap)) < 1e-12
    assert np.max(np.abs(ai_deriv(1, x, 2) - x * a)) < 1e-12


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_value_at_origin(n):
    assert ai(n, 0.0) == pytest.approx(ai_n_at_zero(n), abs=1e-13)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_ode(n):
    x = np.linspace(-6.0, 6.0, 121)
    res = ai_deriv(n, x, 2 * n) - (-1) ** (n + 1) * x * ai(n, x)
    assert np.max(np.abs(res)) < 1e-10


@pytest.mark.parametrize("n", [1, 2])
def test_derivative_chain_by_differences(n):
    x, h = np.linspace(-3.0, 3.0, 13), 1e-4
    for j in range(2 * n):
        fd = (ai_deriv(n, x + h, j) - ai_deriv(n, x - h, j)) / (2 * h)
        assert np.max(np.abs(fd - ai_deriv(n, x, j + 1))) < 1e-7


def test_right_half_integral():
    # int_0^inf Ai = 1/3
    x, w = composite_gauss([0.0, 4.0, 40.0], [1.0, 0.2], 256)
    assert np.dot(w, ai(1, x)) == pytest.approx(1 / 3, abs=1e-13)


def test_scalar_in_scalar_out():
    v = ai(2, 0.5)
    assert isinstance(v, float)
    assert ai(2, np.array([0.5]))[0] == v


def envelope(n, x):
    zeta = (2 * n / (2 * n + 1)) * x ** ((2 * n + 1) / (2 * n))
    return (n * np.pi) ** -0.5 * x ** (-(2 * n - 1) / (4 * n)) * np.exp(-zeta * np.sin(np.pi / (2 * n)))


@pytest.mark.parametrize("n", [1, 2])
def test_far_right_within_envelope(n):
    x = np.array([50.0, 150.0, 300.0])
    v = ai(n, x)
    assert np.all(np.isfinite(v))
    assert np.all(np.abs(v) <= envelope(n, x) * 1.01)


def test_airy_cutoff_bounds_envelope():
    for n in (1, 2, 3):
        a = airy_cutoff(n)
        assert envelope(n, a) == pytest.approx(1e-11, rel=1e-6)


@pytest.mark.parametrize("n", [1, 2])
def test_asymptotics(n):
    # leading order only; the error relative to the envelope decays with x
    right = [abs(ai(n, x) - ai_asymptotic(n, x, "positive")) / envelope(n, x) for x in (20.0, 40.0)]
    assert right[1] < right[0] < 0.1
    left = [abs(ai(n, -x) - ai_asymptotic(n, x, "negative")) for x in (20.0, 40.0)]
    assert left[1] < left[0] < 1e-2


def test_asymptotic_argument_checks():
    with pytest.raises(ValueError):
        ai_asymptotic(1, -1.0, "positive")
    with pytest.raises(ValueError):
        ai_asymptotic(1, 1.0, "left")


@pytest.mark.skipif("cython" not in _core.BACKENDS, reason="compiled kernel not built")
@pytest.mark.parametrize("n", [1, 2, 3])
def test_backends_agree(n):
    x = np.linspace(-10.0, 10.0, 41)
    a = HigherAiryEvaluator(n, backend="numpy")
    b = HigherAiryEvaluator(n, backend="cython")
    for j in (0, 1, 2 * n):
        va, vb = a(x, j), b(x, j)
        assert np.max(np.abs(va - vb) / np.maximum(1.0, np.abs(va))) < 1e-13


def test_imaginary_part_vanishes():
    ev = HigherAiryEvaluator(2)
    z = ev.complex_integral(np.array([-3.0, 0.0, 2.0]))
    assert np.max(np.abs(z.imag)) < 1e-12
    assert np.max(np.abs(z.real - ev(np.array([-3.0, 0.0, 2.0])))) < 1e-10


def test_parameter_validation():
    with pytest.raises(ValueError):
        HigherAiryEvaluator(0)
    with pytest.raises(ValueError):
        HigherAiryEvaluator(1, quad_points=7)
    with pytest.raises(ValueError):
        HigherAiryEvaluator(1, backend="fortran")


def test_refinement_failure_raises():
    ev = HigherAiryEvaluator(3, quad_points=8, max_points=8, rtol=1e-15)
    with pytest.raises(QuadratureError):
        ev(np.array([-30.0]), 0)


def test_first_derivative_at_origin():
    assert ai_deriv(1, 0.0, 1) == pytest.approx(-(3 ** (-1 / 3)) / gamma(1 / 3), abs=1e-14)


@pytest.mark.parametrize("n", [1, 2])
def test_asymptotic_ratio_at_eight(n):
    assert ai(n, 8.0) / ai_asymptotic(n, 8.0, "positive") == pytest.approx(1.0, abs=0.05)


def test_negative_side_phase_at_airy_zeros():
    from scipy.special import ai_zeros
    z = -ai_zeros(3)[0]
    assert np.max(np.abs(ai(1, -z))) < 1e-12
    # the leading-order cosine nearly vanishes there; the residue shrinks along the zeros
    rel = np.abs(ai_asymptotic(1, z, "negative")) / (np.pi**-0.5 * z**-0.25)
    assert np.all(rel < 0.03) and np.all(np.diff(rel) < 0)
