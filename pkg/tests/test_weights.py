import numpy as np
import pytest

from hoairy.weights import make_fermi, make_smoothed_step, parse_weight, sigma_quadrature


@pytest.mark.parametrize("alpha", [0.5, 1.0, 3.0, 200.0])
def test_fermi_admissible(alpha):
    assert make_fermi(alpha).check() == []


def test_fermi_rejects_nonpositive():
    with pytest.raises(ValueError):
        make_fermi(0.0)


@pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0])
def test_sigma_rule_moments(alpha):
    # Fermi w' is a logistic density: mean 0, variance pi^2 / (3 alpha^2)
    g = sigma_quadrature(make_fermi(alpha), 160)
    assert g.integrate(np.ones_like(g.nodes)) == pytest.approx(1.0, abs=1e-14)
    assert abs(g.integrate(g.nodes)) < 1e-12
    assert g.integrate(g.nodes**2) == pytest.approx(np.pi**2 / (3 * alpha**2), rel=1e-12)


def test_sigma_rule_geometric_convergence():
    w = make_fermi(1.0)
    exact = sigma_quadrature(w, 400).integrate(np.cos(sigma_quadrature(w, 400).nodes))
    errs = []
    for m in (40, 80):
        g = sigma_quadrature(w, m)
        errs.append(abs(g.integrate(np.cos(g.nodes)) - exact))
    assert errs[1] < 1e-3 * errs[0]


def test_scaled_rule():
    g = sigma_quadrature(make_fermi(1.0), 120)
    h = g.scaled(2.0)
    ref = sigma_quadrature(make_fermi(2.0), 400)
    assert h.integrate(h.nodes**2) == pytest.approx(ref.integrate(ref.nodes**2), rel=1e-10)


def test_parse_weight():
    w = parse_weight("fermi:alpha=2.5")
    assert w.label == "fermi:alpha=2.5"
    assert w.scale == pytest.approx(0.4)
    assert parse_weight("step-approx:k=200").label == "step-approx:k=200"
    for bad in ("gauss:s=1", "fermi:beta=1", "fermi:alpha=-1"):
        with pytest.raises(ValueError):
            parse_weight(bad)


def test_smoothed_step_limits():
    w = make_smoothed_step(200.0)
    v = w.value(np.array([-0.1, 0.1]))
    assert v[0] < 1e-8 and 1 - v[1] < 1e-8


def test_too_few_nodes():
    with pytest.raises(ValueError):
        sigma_quadrature(make_fermi(1.0), 3)
