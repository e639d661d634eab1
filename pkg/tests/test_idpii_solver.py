import numpy as np
import pytest
from scipy.integrate import solve_ivp

from hoairy import fredholm as fr
from hoairy import idpii_solver as S
from hoairy.specfun import ai, ai_deriv
from hoairy.weights import make_smoothed_step


@pytest.fixture(scope="module")
def grid1(fermi1):
    return S.solver_grid(1, fermi1)


@pytest.fixture(scope="module")
def hastings_mcleod():
    """q'' = t q + 2 q^3 with q ~ Ai(t) at +inf, integrated from t = 8."""
    sol = solve_ivp(lambda t, y: [y[1], t * y[0] + 2 * y[0] ** 3], (8.0, -3.0),
                    [ai(1, 8.0), ai_deriv(1, 8.0, 1)], method="DOP853",
                    rtol=1e-13, atol=1e-16, dense_output=True)
    return lambda t: sol.sol(t)[0]


def test_seed_is_linear_airy(grid1):
    st = S.seed(1, 0.49, grid=grid1)
    assert st.t == S.DEFAULT_T0
    assert np.allclose(st.values[0], 0.7 * ai(1, st.t + st.x), rtol=1e-14, atol=0)
    assert st.Q() < 1e-8
    assert st.logd < 0 and st.dlogd > 0


def test_seed_rejects_small_t0(grid1):
    with pytest.raises(S.SeedError):
        S.seed(1, 1.0, T0=4.0, grid=grid1)


def test_seed_argument_checks(grid1):
    with pytest.raises(ValueError):
        S.seed(1, 1.5, grid=grid1)
    with pytest.raises(ValueError):
        S.seed(1, 1.0, grid=None)
    with pytest.raises(ValueError):
        S.seed(1, 0.25, grid=grid1, lambda_sqrt=0.4)


def test_auto_t0_meets_threshold(fermi1):
    g = S.solver_grid(1, fermi1).scaled(0.5)
    T0 = S.auto_t0(1, g)
    assert S._q_seed(1, 1.0, g, T0)[0] <= 1e-8 < S._q_seed(1, 1.0, g, T0 - 5.0)[0]


def test_seed_tail_matches_direct_quadrature(grid1):
    T0 = 20.0
    s, sw = fr.composite_gauss([T0, T0 + 30.0], [1.0], 800)
    q = S._q_seed(1, 1.0, grid1, s)
    P, L = S.seed_tail(1, 1.0, grid1, T0)
    assert P == pytest.approx(sw @ q, rel=1e-10)
    assert L == pytest.approx(-(sw * (s - T0)) @ q, rel=1e-10)


def test_forward_step_rejected(grid1):
    st = S.seed(1, 1.0, grid=grid1)
    with pytest.raises(ValueError):
        S.step_to(st, st.t + 1.0)


def test_lambda_zero_stays_zero(fermi1):
    assert S.tw_representation(1, 0.0, fermi1, 0.0) == 1.0
    r = S.tw_details(1, 0.0, fermi1, 0.0)
    assert r.logd == 0.0 and np.all(r.state.values == 0)


@pytest.mark.parametrize("n,t,tol", [(1, -1.0, 1e-8), (1, 1.0, 1e-8), (2, 0.5, 1e-5)])
def test_matches_determinant(fermi1, n, t, tol):
    assert S.tw_details(n, 1.0, fermi1, t).logd == pytest.approx(fr.logdet(n, t, 1.0, fermi1), abs=tol)


def test_partial_lambda(fermi1):
    assert S.tw_representation(1, 0.5, fermi1, 0.0) == pytest.approx(
        fr.det_halfline(1, 0.0, 0.5, fermi1), abs=1e-8)


def test_first_derivative_of_log_det(fermi1, grid1):
    # d/dt log D = int_t^inf Q
    st = S.seed(1, 1.0, grid=grid1)
    end = S.step_to(st, 0.0)
    h = 1e-3
    fd = (fr.logdet(1, h, 1.0, fermi1) - fr.logdet(1, -h, 1.0, fermi1)) / (2 * h)
    assert end.dlogd == pytest.approx(fd, abs=1e-6)


def test_sample_points_consistent(grid1):
    st = S.seed(1, 1.0, grid=grid1)
    end, samples = S.step_to(st, -0.5, t_eval=[1.0, 0.0, -0.5])
    assert set(samples) == {1.0, 0.0, -0.5}
    assert samples[-0.5]["logD"] == pytest.approx(end.logd, abs=1e-14)
    assert samples[-0.5]["probes"][0] == end.probe(0.0)


def test_fixed_step_rk4_converges(grid1):
    st = S.step_to(S.seed(1, 1.0, grid=grid1), 2.0)
    ref = S.step_to(st, 0.0, tol=1e-12).logd
    errs = [abs(S.step_to(st, 0.0, fixed_step=h).logd - ref) for h in (0.2, 0.1)]
    assert 12.0 < errs[0] / errs[1] < 20.0


def test_blowup_guard(grid1):
    st = S.seed(1, 1.0, grid=grid1)
    with pytest.raises(S.DivergenceError) as exc:
        S.step_to(st, -2.0, max_abs=0.6)
    t_hit = exc.value.t
    assert 0.0 < t_hit < 2.0
    assert np.max(np.abs(S.step_to(st, t_hit).values[0])) == pytest.approx(0.6, abs=1e-6)
    with pytest.raises(S.DivergenceError):
        S.step_to(st, 0.0, max_abs=0.3)


def test_branch_of_square_root(fermi1):
    a = S.tw_details(2, 1.0, fermi1, 0.0)
    b = S.tw_details(2, 1.0, fermi1, 0.0, lambda_sqrt=-1.0)
    assert a.logd == b.logd
    assert np.array_equal(a.state.values, -b.state.values)


def test_asymptotic_check_small_near_seed(grid1):
    st = S.seed(1, 1.0, grid=grid1)
    assert S.asymptotic_check(st) == 0.0
    assert S.asymptotic_check(S.step_to(st, st.t - 1.0)) < 1e-6


@pytest.mark.slow
def test_hastings_mcleod_limit(hastings_mcleod):
    # a steep weight approaches the point mass at 0; the error is O(k^-2)
    errs = []
    for k in (50.0, 100.0, 200.0):
        w = make_smoothed_step(k)
        st = S.seed(1, 1.0, T0=None, grid=S.solver_grid(1, w))
        _, samples = S.step_to(st, -1.0, t_eval=[0.0, -1.0])
        errs.append([abs(samples[t]["probes"][0] - hastings_mcleod(t)) for t in (0.0, -1.0)])
    errs = np.array(errs)
    assert np.all(errs[-1] < 1e-5)
    ratios = errs[:-1] / errs[1:]
    assert np.all((3.8 < ratios) & (ratios < 4.2))


def test_asymptotic_check_lambda_zero(grid1):
    st = S.seed(1, 0.0, grid=grid1)
    assert S.asymptotic_check(S.step_to(st, st.t - 1.0)) == 0.0
