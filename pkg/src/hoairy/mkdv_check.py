"""Scaling reduction from the Painleve-II field to the integro-differential mKdV flow.

With v(t1, t_{2n+1} | x) = u(t | x/tau) / tau, t1 = tau t and
t_{2n+1} = tau^(2n+1)/(2n+1), where u solves the Painleve-II member for the
weight x -> w(tau x), v solves dv/dt_{2n+1} = (L- L+)^n dv/dt1 with brackets
taken against w'. On a sigma-grid this needs no interpolation: the rule for
w(tau .) has the nodes x_i/tau and the same weights as the rule for w.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy.interpolate import CubicSpline

from .fredholm import det_halfline
from .hierarchy_cas import differentiate_terms, evaluate_terms, mkdv_member
from .idpii_solver import auto_t0, ode_form, seed, solver_grid, step_to, tw_details
from .weights import SigmaQuadrature, make_fermi

log = logging.getLogger(__name__)


@lru_cache(maxsize=None)
def _ode_derivative(n):
    return differentiate_terms(ode_form(n).terms)


@dataclass(frozen=True)
class MkdvFrame:
    """v and its t1-derivatives of order 0..2n+1 at the frame nodes and probes."""

    n: int
    tau: float
    t1: float
    t_odd: float
    grid: SigmaQuadrature
    probes: tuple
    values: np.ndarray

    @property
    def x(self):
        return np.concatenate([self.grid.nodes, np.asarray(self.probes, dtype=np.float64)])

    def brackets(self):
        return _brackets(self.grid.weights, self.values[:, : self.grid.nodes.size])

    def probe(self, x0, j=0):
        return float(self.values[j, self.grid.nodes.size + self.probes.index(x0)])

    def interpolate(self, x, j=0):
        """Cubic spline in x through the frame nodes; x must lie inside their hull."""
        nodes = self.grid.nodes
        x = np.asarray(x, dtype=np.float64)
        if np.any(x < nodes[0]) or np.any(x > nodes[-1]):
            raise ValueError("interpolation point outside the grid hull")
        return CubicSpline(nodes, self.values[j, : nodes.size])(x)


def scaling_reduce(state, tau):
    """mKdV frame of a solver state whose grid is the tau-scaled rule."""
    n, tau = state.n, float(tau)
    x = state.x
    U = [state.values[j] for j in range(2 * n)]
    B = state.brackets()
    form = ode_form(n)
    U.append(evaluate_terms(form.terms, state.t, x, U, B))
    Bfull = _brackets(state.grid.weights, np.array(U)[:, : state.m])
    U.append(evaluate_terms(_ode_derivative(n), state.t, x, U, Bfull))
    vals = np.array([U[j] / tau ** (j + 1) for j in range(2 * n + 2)])
    grid = SigmaQuadrature(state.grid.nodes * tau, state.grid.weights, state.grid.order,
                           state.grid.label)
    return MkdvFrame(n, tau, tau * state.t, tau ** (2 * n + 1) / (2 * n + 1), grid,
                     state.probes, vals)


def _brackets(w, v):
    k = v.shape[0]
    B = np.empty((k, k))
    for i in range(k):
        for j in range(i, k):
            B[i, j] = B[j, i] = np.dot(w, v[i] * v[j])
    return B


def mkdv_rhs(frame):
    """(L- L+)^n dv/dt1 evaluated on the frame."""
    return evaluate_terms(mkdv_member(frame.n).terms, frame.t1, frame.x, frame.values,
                          frame.brackets())


def solve_frame(n, tau, t1, base, lam=1.0, tol=1e-12, T0=None, probes=(0.0,)):
    """Integrate u for the weight w(tau .) to t = t1/tau and reduce to the v-frame."""
    grid = base.scaled(tau)
    st = seed(n, lam, T0, grid, probes)
    return scaling_reduce(step_to(st, t1 / tau, tol), tau)


@dataclass(frozen=True)
class ResidualReport:
    n: int
    tau: float
    delta_tau: float
    t1: float
    residual: np.ndarray
    x: np.ndarray

    def max_abs(self):
        return float(np.max(np.abs(self.residual)))

    def at(self, x0):
        return float(self.residual[int(np.argmin(np.abs(self.x - x0)))])


def mkdv_residual_report(n, tau, delta_tau, t1=0.0, tol=1e-12, w=None, m=160, lam=1.0,
                         T0=None):
    """Centered difference of v in t_{2n+1} minus the right side, at every frame point."""
    w = make_fermi(1.0) if w is None else w
    base = solver_grid(n, w, m)
    if T0 is None:
        T0 = auto_t0(n, base.scaled(tau - delta_tau))
    lo = solve_frame(n, tau - delta_tau, t1, base, lam, tol, T0)
    mid = solve_frame(n, tau, t1, base, lam, tol, T0)
    hi = solve_frame(n, tau + delta_tau, t1, base, lam, tol, T0)
    dv = (hi.values[0] - lo.values[0]) / (hi.t_odd - lo.t_odd)
    return ResidualReport(n, tau, delta_tau, t1, dv - mkdv_rhs(mid), mid.x)


def mkdv_residual(n, tau, delta_tau, t1=0.0, tol=1e-12, x=None, **kw):
    """Residual of the mKdV member: max over the grid, or the value at probe ``x``.

    The grid maximum is dominated by the outermost nodes, where v oscillates
    fast in tau (so the difference quotient needs a much smaller delta_tau)
    and, for n >= 2, where the backward integration is least accurate.
    """
    rep = mkdv_residual_report(n, tau, delta_tau, t1, tol, **kw)
    return rep.max_abs() if x is None else abs(rep.at(x))


def observed_order(n, tau, deltas, t1=0.0, x=0.0, **kw):
    """Residuals at the given delta_tau values and the successive log2 ratios."""
    res = [mkdv_residual(n, tau, d, t1, x=x, **kw) for d in deltas]
    orders = [np.log(res[k] / res[k + 1]) / np.log(deltas[k] / deltas[k + 1])
              for k in range(len(res) - 1)]
    return res, orders


def fermi_routes(n, alpha, t, m=160, tol=1e-10):
    """(determinant, mKdV-frame value) of F_n^alpha(t).

    The frame route integrates v^2 against the unit Fermi density over
    s in (alpha t, inf); with s = alpha t' and <v,v> = <u,u>_alpha / alpha^2 this
    equals the Painleve-II field integral for the weight w(alpha .), which is
    what is evaluated here on the alpha-scaled grid.
    """
    det = det_halfline(n, t, 1.0, make_fermi(alpha))
    base = solver_grid(n, make_fermi(1.0), m)
    grid = base.scaled(alpha)
    tw = tw_details(n, 1.0, make_fermi(alpha), t, T0=auto_t0(n, grid), tol=tol, grid=grid)
    return det, tw.value


def fermi_distribution(n, alpha, t, **kw):
    """F_n^alpha(t) as a Fredholm determinant, cross-checked against the frame route."""
    det, frame = fermi_routes(n, alpha, t, **kw)
    log.info("F_%d^%g(%g): det %.15g frame %.15g diff %.3e", n, alpha, t, det, frame, det - frame)
    return det


def scaling_exponents(n):
    """(e_n, f_n) = (n/((n+1)(2n+1)), 2n^2/((n+1)(2n+1)))."""
    d = (n + 1) * (2 * n + 1)
    return Fraction(n, d), Fraction(2 * n * n, d)
