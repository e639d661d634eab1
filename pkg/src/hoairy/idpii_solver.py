"""Backward shooting for the integro-differential Painleve-II boundary value problem.

The field u(t|x_i) is carried on the nodes of a sigma-quadrature together with
its first 2n-1 t-derivatives. Starting from u = lambda^(1/2) Ai_n(t+x) at a
large T0, the localized ODE u^(2n) = F(t, x, u, ..., brackets) is integrated
toward smaller t. Two scalars ride along:

    P(t) = int_t^inf Q(s) ds,    l(t) = -int_t^inf (s-t) Q(s) ds = log D(t),

with Q = <u,u> = sum_i omega_i u(t|x_i)^2, so that P' = -Q and l' = P.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np
from scipy.integrate import solve_ivp

from .fredholm import composite_gauss
from .hierarchy_cas import evaluate_terms, pii_member, to_ode
from .specfun import ai_deriv
from .weights import SigmaQuadrature, sigma_quadrature

DEFAULT_T0 = 20.0
DEFAULT_M = 160


class SeedError(ValueError):
    """T0 is too small for the linear seed to be accurate."""


class DivergenceError(RuntimeError):
    """The backward integration left the admissible range."""

    def __init__(self, message, t):
        super().__init__(f"{message} at t = {t:.6g}")
        self.t = t


@lru_cache(maxsize=None)
def ode_form(n):
    return to_ode(pii_member(n))


def solver_grid(n, w, m=DEFAULT_M):
    """Default sigma-grid for the solver.

    For n >= 2 the linearised equation has a real growing mode at nodes with
    t + x < 0 when integrated toward smaller t, so the far left tail of w',
    which carries negligible mass, is cut at 1e-6 of the peak.
    """
    return sigma_quadrature(w, m, tail=1e-16 if n == 1 else 1e-6)


@dataclass(frozen=True)
class FieldState:
    """u^(j)(t|x) for j < 2n at the grid nodes followed by the probe points."""

    t: float
    n: int
    lambda_sqrt: float
    grid: SigmaQuadrature
    values: np.ndarray
    probes: tuple = ()
    dlogd: float = 0.0
    logd: float = 0.0
    tail: dict = field(default_factory=dict, compare=False)

    @property
    def x(self):
        return np.concatenate([self.grid.nodes, np.asarray(self.probes, dtype=np.float64)])

    @property
    def m(self):
        return self.grid.nodes.size

    def brackets(self, values=None):
        """Symmetric matrix of <u^(i), u^(j)> over the grid nodes."""
        v = (self.values if values is None else values)[:, : self.m]
        return _bracket_matrix(v, self.grid.weights)

    def Q(self):
        return float(self.brackets()[0, 0])

    def probe(self, x0, j=0):
        """u^(j)(t | x0) at a probe point."""
        k = self.probes.index(x0)
        return float(self.values[j, self.m + k])


def _bracket_matrix(v, w):
    k = v.shape[0]
    B = np.empty((k, k))
    for i in range(k):
        for j in range(i, k):
            B[i, j] = B[j, i] = np.dot(w, v[i] * v[j])
    return B


def _q_seed(n, lam, grid, s):
    s = np.atleast_1d(s)
    A = ai_deriv(n, s[:, None] + grid.nodes[None, :], 0)
    return lam * (A**2 @ grid.weights)


def seed_tail(n, lam, grid, T0):
    """(P(T0), log D(T0)) from the linear seed Q(s) = lam sum omega Ai_n(s + x)^2."""
    if lam == 0:
        return 0.0, 0.0
    q0 = _q_seed(n, lam, grid, T0)[0]
    if q0 == 0:
        return 0.0, 0.0
    span = 4.0
    while _q_seed(n, lam, grid, T0 + span)[0] > 1e-18 * q0:
        span *= 2
        if span > 4096:
            raise SeedError("seed bracket does not decay")
    s, sw = composite_gauss([T0, T0 + 2.0, T0 + span], [4.0, 1.0], max(64, int(8 * span)))
    q = _q_seed(n, lam, grid, s)
    return float(sw @ q), float(-(sw * (s - T0)) @ q)


def auto_t0(n, grid, seed_tol=1e-8, start=DEFAULT_T0):
    """Smallest T0 = start + 5k whose seeded bracket (lambda = 1) is below ``seed_tol``."""
    T0 = start
    while _q_seed(n, 1.0, grid, T0)[0] > seed_tol:
        T0 += 5.0
        if T0 > 1000:
            raise SeedError("no admissible T0 below 1000")
    return T0


def seed(n, lam, T0=DEFAULT_T0, grid=None, probes=(0.0,), lambda_sqrt=None, seed_tol=1e-8):
    """State at T0 with u^(j) = lambda^(1/2) Ai_n^(j)(T0 + x).

    The seeded bracket <u,u>(T0) must be below ``seed_tol`` so that the
    neglected nonlinear correction is of that relative size. ``T0=None``
    picks the smallest admissible T0 with :func:`auto_t0`.
    """
    if grid is None:
        raise ValueError("a sigma-grid is required")
    if not 0 <= lam <= 1:
        raise ValueError("lambda must lie in [0, 1]")
    ls = np.sqrt(lam) if lambda_sqrt is None else float(lambda_sqrt)
    if abs(ls * ls - lam) > 1e-14:
        raise ValueError("lambda_sqrt**2 must equal lambda")
    if T0 is None:
        T0 = auto_t0(n, grid, seed_tol)
    x = np.concatenate([grid.nodes, np.asarray(probes, dtype=np.float64)])
    vals = np.array([ls * ai_deriv(n, T0 + x, j) for j in range(2 * n)])
    state = FieldState(float(T0), n, ls, grid, vals, tuple(float(p) for p in probes))
    q0 = state.Q()
    if q0 > seed_tol:
        raise SeedError(f"seeded <u,u>(T0={T0}) = {q0:.3e} exceeds {seed_tol:.1e}; raise T0")
    P, L = seed_tail(n, lam, grid, T0)
    return replace(state, dlogd=P, logd=L, tail={"P": P, "logD": L, "Q": q0, "T0": float(T0)})


def _scales(state):
    s = np.max(np.abs(state.values), axis=0)
    return np.where(s > 0, s, 1.0)


def _rhs_factory(state):
    n, m = state.n, state.m
    form = ode_form(n)
    x = state.x
    w = state.grid.weights
    k = 2 * n
    scale = _scales(state)
    size = k * x.size

    def rhs(t, y):
        v = y[:size].reshape(k, -1) * scale
        B = _bracket_matrix(v[:, :m], w)
        dv = np.empty_like(v)
        dv[:-1] = v[1:]
        dv[-1] = evaluate_terms(form.terms, t, x, v, B)
        return np.concatenate([(dv / scale).ravel(), [-B[0, 0], y[size]]])

    return rhs, scale, size


def _pack(state, scale):
    return np.concatenate([(state.values / scale).ravel(), [state.dlogd, state.logd]])


def _rk4(rhs, y, t0, t1, h):
    steps = max(1, int(np.ceil(abs(t1 - t0) / h - 1e-12)))
    dt = (t1 - t0) / steps
    for k in range(steps):
        t = t0 + (t1 - t0) * k / steps
        k1 = rhs(t, y)
        k2 = rhs(t + dt / 2, y + dt / 2 * k1)
        k3 = rhs(t + dt / 2, y + dt / 2 * k2)
        k4 = rhs(t + dt, y + dt * k3)
        y = y + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    return y


def step_to(state, t_target, tol=1e-10, fixed_step=None, max_abs=1e6, t_eval=None):
    """Integrate the state backward to ``t_target``.

    Adaptive DOP853 with rtol = ``tol`` on node-wise rescaled variables, or,
    with ``fixed_step``, classical RK4 on a uniform mesh (its error is then a
    smooth function of the endpoints). Returns the new state, or with
    ``t_eval`` the pair (state, samples) where samples maps each requested t
    to a dict of Q, log D and the probe values.
    """
    if t_target > state.t:
        raise ValueError("step_to integrates toward smaller t only")
    if state.lambda_sqrt == 0 or t_target == state.t:
        out = replace(state, t=float(t_target))
        return (out, {}) if t_eval is not None else out
    if np.max(np.abs(state.values[0])) > max_abs:
        raise DivergenceError(f"|u| already exceeds {max_abs:g}", state.t)
    rhs, scale, size = _rhs_factory(state)
    y0 = _pack(state, scale)
    samples = {}
    if fixed_step is not None:
        y = _rk4(rhs, y0, state.t, t_target, fixed_step)
    else:
        def blowup(t, y):
            return max_abs - np.max(np.abs(y[:size].reshape(2 * state.n, -1)[0] * scale))

        blowup.terminal = True
        ts = None
        if t_eval is not None:
            ts = sorted({float(v) for v in t_eval if t_target <= v <= state.t} | {float(t_target)},
                        reverse=True)
        sol = solve_ivp(rhs, (state.t, t_target), y0, method="DOP853", rtol=tol,
                        atol=tol * 1e-2, events=blowup, t_eval=ts)
        if sol.status == 1:
            raise DivergenceError(f"|u| exceeded {max_abs:g}", float(sol.t_events[0][0]))
        if not sol.success:
            raise DivergenceError(sol.message, float(sol.t[-1]))
        if t_eval is not None:
            for j, tj in enumerate(sol.t):
                samples[float(tj)] = _sample(state, sol.y[:, j], scale, size, tj)
        y = sol.y[:, -1]
    vals = y[:size].reshape(2 * state.n, -1) * scale
    if not np.all(np.isfinite(vals)) or np.max(np.abs(vals[0])) > max_abs:
        raise DivergenceError(f"|u| exceeded {max_abs:g}", float(t_target))
    out = replace(state, t=float(t_target), values=vals, dlogd=float(y[size]),
                  logd=float(y[size + 1]))
    return (out, samples) if t_eval is not None else out


def _sample(state, y, scale, size, t):
    vals = y[:size].reshape(2 * state.n, -1) * scale
    s = replace(state, t=float(t), values=vals, dlogd=float(y[size]), logd=float(y[size + 1]))
    return {"Q": s.Q(), "logD": s.logd, "dlogD": s.dlogd,
            "probes": [float(vals[0, state.m + k]) for k in range(len(state.probes))]}


@dataclass(frozen=True)
class TwResult:
    t: float
    logd: float
    tail_logd: float
    tail_dlogd: float
    state: FieldState

    @property
    def value(self):
        return float(np.exp(self.logd))


def tw_details(n, lam, w, t, T0=DEFAULT_T0, tol=1e-10, grid=None, m=DEFAULT_M,
               lambda_sqrt=None, probes=(0.0,)):
    """log D(t) from u via log D = -int_t^inf (s - t) <u,u>(s) ds."""
    grid = solver_grid(n, w, m) if grid is None else grid
    st = seed(n, lam, T0, grid, probes, lambda_sqrt)
    end = step_to(st, t, tol)
    return TwResult(float(t), end.logd, st.tail["logD"], st.tail["P"], end)


def tw_representation(n, lam, w, t, T0=DEFAULT_T0, tol=1e-10, **kw):
    """D_n(t, lambda) through the integrated Painleve-II field (1.0 when lambda = 0)."""
    if lam == 0:
        return 1.0
    return tw_details(n, lam, w, t, T0, tol, **kw).value


def asymptotic_check(state):
    """max_i |u - lambda^(1/2) Ai_n(t + x_i)| / (|lambda^(1/2) Ai_n| + 1e-30)."""
    ref = state.lambda_sqrt * ai_deriv(state.n, state.t + state.x, 0)
    dev = np.abs(state.values[0] - ref)
    if not np.any(dev):
        return 0.0
    return float(np.max(dev / (np.abs(ref) + 1e-30)))
