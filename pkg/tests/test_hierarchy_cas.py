from fractions import Fraction

import numpy as np
import pytest

from hoairy import hierarchy_cas as cas
from hoairy.acceptance import golden_text


@pytest.mark.parametrize("n", [1, 2, 3])
def test_pii_golden(n):
    assert cas.render(cas.pii_member(n)) + "\n" == golden_text(f"pii_{n}")


@pytest.mark.parametrize("n", [1, 2])
def test_mkdv_golden(n):
    assert cas.render(cas.mkdv_member(n)) + "\n" == golden_text(f"mkdv_{n}")


def test_first_members_verbatim():
    assert cas.render(cas.pii_member(1)) == "(t+x)*u = u'' - 2*u*<u,u>"
    assert cas.render(cas.mkdv_member(1)) == "v_t3 = -v''' + 3*v'*<v,v> + 3*v*<v,v'>"


@pytest.mark.parametrize("n", [1, 2, 3])
def test_operator_route_agrees(n):
    via = cas.pii_member_via_operators(n)
    assert via.terms == cas.pii_member(n).terms
    assert via.metadata == {"route": "operators", "variant": "U"}


def test_other_operator_variant_is_rejected():
    with pytest.raises(cas.RouteMismatchError):
        cas.pii_member_via_operators(1, variant="V")


@pytest.mark.parametrize("n", [1, 2, 3])
def test_pii_grading_and_leading(n):
    m = cas.pii_member(n)
    assert cas.grading(m.terms) == {2 * n + 1}
    assert m.leading.coeff == (-1) ** n


@pytest.mark.parametrize("n", [1, 2])
def test_mkdv_grading(n):
    m = cas.mkdv_member(n)
    assert cas.grading(m.terms) == {2 * n + 2}
    assert m.leading.coeff == (-1) ** n


def test_term_counts():
    assert [len(cas.pii_member(n).terms) for n in (1, 2, 3)] == [2, 6, 16]
    assert [len(cas.mkdv_member(n).terms) for n in (1, 2)] == [3, 9]


def test_point_mass_reduction_gives_classical_hierarchy():
    # with dsigma = delta_0, member 2 collapses to u'''' - 10 u^2 u'' - 10 u u'^2 + 6 u^5
    red = cas.delta_reduce(cas.pii_member(2).terms)
    assert red == {(4,): 1, (2, 0, 0): -10, (1, 1, 0): -10, (0, 0, 0, 0, 0): 6}
    assert cas.delta_reduce(cas.pii_member(1).terms) == {(2,): -1, (0, 0, 0): 2}


def test_point_mass_reduction_mkdv():
    # classical mKdV: v_t3 = -v''' + 6 v^2 v'
    assert cas.delta_reduce(cas.mkdv_member(1).terms) == {(3,): -1, (1, 0, 0): 6}


@pytest.mark.parametrize("make,n", [(cas.pii_member, 1), (cas.pii_member, 2), (cas.pii_member, 3),
                                    (cas.mkdv_member, 1), (cas.mkdv_member, 2)])
def test_text_and_json_round_trip(make, n):
    m = make(n)
    back = cas.parse(cas.render(m))
    assert back.terms == m.terms and back.kind == m.kind and back.n == m.n
    assert cas.from_json(cas.to_json(m)) == m.terms


def test_json_schema():
    import json
    # stored right-hand side: leading coefficient (-1)^n
    rows = json.loads(cas.to_json(cas.pii_member(1)))
    assert rows[0] == {"coeff_num": -1, "coeff_den": 1, "derivative_order": 2, "brackets": [],
                       "t_plus_x_power": 0}
    assert rows[1]["brackets"] == [[0, 0]]


def test_to_ode():
    f = cas.to_ode(cas.pii_member(1))
    assert cas.render(f) == "u'' = (t+x)*u + 2*u*<u,u>"
    assert f.order == 2
    assert cas.parse(cas.render(f)).terms == f.terms


def test_evaluate_terms_matches_rendering():
    f = cas.to_ode(cas.pii_member(1))
    x = np.array([0.0, 1.0])
    derivs = np.array([[0.5, -0.2], [0.1, 0.3]])
    B = np.array([[0.7, 0.1], [0.1, 0.2]])
    assert np.allclose(cas.evaluate_terms(f.terms, 0.5, x, derivs, B),
                       (0.5 + x) * derivs[0] + 2 * derivs[0] * 0.7)


def test_differentiate_terms_is_total_derivative():
    # d/dt [u <u,u'>] = u' <u,u'> + u <u',u'> + u <u,u''>
    terms = (cas.DiagonalTerm(Fraction(1), 0, ((0, 1),)),)
    got = {(t.derivative_order, t.brackets): t.coeff for t in cas.differentiate_terms(terms)}
    assert got == {(1, ((0, 1),)): 1, (0, ((1, 1),)): 1, (0, ((0, 2),)): 1}


def test_antiderivative_of_non_derivative_fails():
    # u <u,u> is not an exact derivative in the diagonal algebra
    with pytest.raises(cas.AntiderivativeError):
        cas.antiderivative_diag({(0, ((0, 0),), 0): cas.GaussQ(1)})


def test_gaussian_rationals():
    z = cas.GaussQ(Fraction(1, 2), 3)
    assert z * cas.I == cas.GaussQ(-3, Fraction(1, 2))
    assert (z + z).re == 1
    assert cas.I * cas.I == cas.GaussQ(-1)


def test_invalid_order():
    with pytest.raises(ValueError):
        cas.pii_member(0)
    with pytest.raises(ValueError):
        cas.mkdv_member(0)
