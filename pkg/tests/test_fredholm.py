import numpy as np
import pytest

from hoairy import fredholm as fr
from hoairy.acceptance import classical_tw
from hoairy.specfun import ai
from hoairy.weights import make_fermi, make_smoothed_step


def test_lambda_zero_is_one(fermi1):
    assert fr.det_halfline(1, 0.0, 0.0, fermi1) == 1.0
    assert fr.det_sigma(2, 0.0, 0.0, fermi1) == 1.0
    assert fr.logdet(1, 0.0, 0.0, fermi1) == 0.0


def test_composite_gauss_polynomial_exact():
    x, w = fr.composite_gauss([0.0, 1.0, 5.0], [3.0, 1.0], 64)
    assert np.sum(w) == pytest.approx(5.0, abs=1e-14)
    assert np.dot(w, x**9) == pytest.approx(5.0**10 / 10, rel=1e-13)


@pytest.mark.parametrize("n", [1, 2])
def test_christoffel_darboux_against_quadrature(n):
    a = np.array([-1.5, 0.3, 2.0])
    y, yw = fr.composite_gauss([0.0, 4.0, fr.airy_cutoff(n) + 2.0], [4.0, 1.0], 1200)
    F = ai(n, a[:, None] + y[None, :])
    ref = (F * yw) @ F.T
    tab = fr._derivative_table(n, a)
    H = fr.christoffel_darboux(n, a, a, tab, tab)
    assert np.max(np.abs(H - ref)) < 1e-11


@pytest.mark.parametrize("n", [1, 2])
@pytest.mark.parametrize("t", [-1.0, 0.5])
def test_routes_agree(fermi1, n, t):
    h = fr.det_halfline(n, t, 0.7, fermi1)
    s = fr.det_sigma(n, t, 0.7, fermi1)
    q = fr.det_sigma(n, t, 0.7, fermi1, m_y=400)
    assert abs(h - s) < 1e-10
    assert abs(q - s) < 1e-10


def test_kernel_symmetric_and_psd(fermi1):
    d = fr.assemble_halfline(1, 0.0, 1.0, fermi1)
    assert np.array_equal(d.matrix, d.matrix.T) or np.max(np.abs(d.matrix - d.matrix.T)) < 1e-15
    mu = d.eigenvalues()
    assert mu.min() > -1e-12 and mu.max() < 1.0


def test_kernel_value_symmetric(fermi1):
    assert fr.kernel_value(1, 0.0, fermi1, 0.3, 1.1) == fr.kernel_value(1, 0.0, fermi1, 1.1, 0.3)


def test_trace_matches_eigenvalue_sum(fermi1):
    for n in (1, 2):
        d = fr.assemble_halfline(n, 0.0, 1.0, fermi1)
        assert np.sum(d.eigenvalues()) == pytest.approx(fr.trace_kernel(n, 0.0, fermi1), abs=1e-12)


@pytest.mark.parametrize("t", [-3.0, -1.0, 0.0, 2.0])
def test_step_is_classical_tracy_widom(t):
    assert fr.det_step(1, t, 1.0) == pytest.approx(classical_tw(t), abs=1e-12)


def test_tracy_widom_reference_values():
    # F_2(-2) and F_2(0) to the digits tabulated in the literature
    assert fr.det_step(1, -2.0, 1.0) == pytest.approx(0.413224142505, abs=1e-11)
    assert fr.det_step(1, 0.0, 1.0) == pytest.approx(0.969372828, abs=1e-8)


def test_steep_fermi_approaches_step():
    diffs = [abs(fr.det_halfline(1, 0.0, 1.0, make_smoothed_step(k)) - fr.det_step(1, 0.0, 1.0))
             for k in (25.0, 50.0, 100.0)]
    # second order in 1/k
    assert 3.5 < diffs[0] / diffs[1] < 4.5
    assert 3.5 < diffs[1] / diffs[2] < 4.5


def test_monotone_in_lambda(fermi1):
    vals = [fr.det_halfline(2, 0.0, lam, fermi1) for lam in (0.25, 0.5, 0.75, 1.0)]
    assert np.all(np.diff(vals) < 0)


def test_logdet_far_left_does_not_underflow(fermi1):
    assert np.exp(fr.logdet(1, -6.0, 1.0, fermi1)) == pytest.approx(
        fr.det_halfline(1, -6.0, 1.0, fermi1), rel=1e-10)
    lds = [fr.logdet(1, t, 1.0, fermi1) for t in (-12.0, -10.0)]
    assert np.all(np.isfinite(lds)) and lds[0] < lds[1] < 0


def test_assembly_check_flags_bad_kernel(fermi1):
    d = fr.assemble_halfline(1, -2.0, 1.0, fermi1)
    bad = fr.KernelDiscretization(d.n, d.t, d.lam, d.x_nodes, d.x_weights, d.z_nodes, d.z_weights,
                                  3.0 * d.matrix, "scaled")
    with pytest.raises(fr.KernelAssemblyError):
        bad.check()


def test_empty_window_raises():
    with pytest.raises(ValueError):
        fr.det_halfline(1, 200.0, 1.0, make_fermi(1.0))


def test_kernel_far_right_is_thermal_tail(fermi1):
    # at finite temperature K(0,0) ~ e^{-t} int Ai(s)^2 e^{s} ds, not Airy-small
    for n in (1, 2):
        k15, k17 = (fr.kernel_value(n, t, fermi1, 0.0, 0.0) for t in (15.0, 17.0))
        assert 0 < k15 < 1e-6
        assert k15 / k17 == pytest.approx(np.exp(2.0), rel=1e-2)
