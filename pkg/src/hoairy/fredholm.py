"""Fredholm determinants det(I - lambda K_{t,n}) on L^2(R+).

K_{t,n}(x,y) = int Ai_n(x+z+t) Ai_n(z+y+t) w(z) dz.

Two discretisations are provided and kept independent of each other:

* ``det_halfline`` puts Gauss-Legendre nodes on the half-line and evaluates
  the z-integral of each kernel entry by quadrature against w.
* ``det_sigma`` commutes the factorisation K = C D and works on the z-side
  with the half-line integral H_n(a,b) = int_0^inf Ai_n(a+y) Ai_n(b+y) dy in
  closed form (a Christoffel-Darboux type formula that follows from the ODE
  Ai_n^(2n) = (-1)^(n+1) x Ai_n).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq

from .specfun import evaluator

_PANEL = 8
_GL = np.polynomial.legendre.leggauss(_PANEL)


class KernelAssemblyError(RuntimeError):
    """Discrete kernel left the range 0 <= K <= 1 (or lost symmetry)."""


@lru_cache(maxsize=None)
def airy_cutoff(n, tol=1e-11):
    """Argument A beyond which |Ai_n| stays below ``tol`` (from the decay envelope)."""
    env = lambda a: (n * np.pi) ** -0.5 * a ** (-(2 * n - 1) / (4 * n)) * np.exp(
        -(2 * n / (2 * n + 1)) * a ** ((2 * n + 1) / (2 * n)) * np.sin(np.pi / (2 * n))
    )
    with np.errstate(divide="ignore", over="ignore"):
        return brentq(lambda a: np.log(env(a)) - np.log(tol), 1.0, 500.0)


def composite_gauss(breaks, density, total):
    """Gauss-Legendre panels (8 nodes each) on consecutive intervals.

    ``density[i]`` is the relative number of nodes per unit length on
    interval i; ``total`` is the approximate overall node budget.
    """
    breaks = np.asarray(breaks, dtype=np.float64)
    lengths = np.diff(breaks)
    need = lengths * np.asarray(density, dtype=np.float64)
    share = need / need.sum() * total / _PANEL
    panels = np.maximum(1, np.ceil(share - 1e-9)).astype(int)
    g, gw = _GL
    nodes, weights = [], []
    for a, b, k in zip(breaks[:-1], breaks[1:], panels):
        edges = np.linspace(a, b, k + 1)
        mid = 0.5 * (edges[:-1] + edges[1:])[:, None]
        half = 0.5 * np.diff(edges)[:, None]
        nodes.append((mid + half * g).ravel())
        weights.append((half * gw).ravel())
    return np.concatenate(nodes), np.concatenate(weights)


def _weight_window(w, t, n):
    """Breakpoints and node densities for integrals against w(z) dz."""
    lo, hi = w.support(1e-17)
    z_lo = lo
    z_hi = airy_cutoff(n) - t
    if z_hi <= z_lo:
        raise ValueError("empty z-window: t is so large that the kernel vanishes")
    width = w.scale
    centre = 0.5 * (lo + hi)
    marks = {z_lo, z_hi}
    for b in (centre - 12 * width, centre + 12 * width, -t):
        if z_lo < b < z_hi:
            marks.add(b)
    breaks = np.array(sorted(marks))
    mids = 0.5 * (breaks[:-1] + breaks[1:])
    # resolve the transition of w at its own scale and oscillations at unit scale
    dens = np.where(np.abs(mids - centre) < 12 * width, 1.0 / min(width, 1.0), 1.0)
    return breaks, dens


def christoffel_darboux(n, a, b, derivs_a, derivs_b):
    """H_n(a_i, b_j) = int_0^inf Ai_n(a_i+y) Ai_n(b_j+y) dy from derivative tables.

    ``derivs_a[k]`` holds Ai_n^(k)(a) for k = 0..2n (same for b).
    """
    a = np.asarray(a, dtype=np.float64)[:, None]
    b = np.asarray(b, dtype=np.float64)[None, :]
    m = 2 * n
    num = np.zeros(np.broadcast_shapes(a.shape, b.shape))
    diag = np.zeros_like(num)
    for j in range(m):
        s = (-1) ** j
        num += s * np.outer(derivs_a[m - 1 - j], derivs_b[j])
        diag += s * np.outer(derivs_a[m - j], derivs_b[j])
    sign = (-1) ** n
    diff = a - b
    close = np.abs(diff) < 1e-9
    with np.errstate(divide="ignore", invalid="ignore"):
        out = sign * num / diff
    out[close] = sign * diag[close]
    return out


def _derivative_table(n, args):
    ev = evaluator(n)
    return [ev(args, j) for j in range(2 * n + 1)]


@dataclass(frozen=True)
class KernelDiscretization:
    n: int
    t: float
    lam: float
    x_nodes: np.ndarray
    x_weights: np.ndarray
    z_nodes: np.ndarray
    z_weights: np.ndarray
    matrix: np.ndarray
    route: str

    def eigenvalues(self):
        return np.linalg.eigvalsh(0.5 * (self.matrix + self.matrix.T))

    def check(self, sym_tol=1e-12, eig_tol=1e-6):
        asym = np.max(np.abs(self.matrix - self.matrix.T)) if self.matrix.size else 0.0
        if asym > sym_tol * max(1.0, np.max(np.abs(self.matrix))):
            raise KernelAssemblyError(f"{self.route}: matrix asymmetry {asym:.2e}")
        if 0 <= self.lam <= 1:
            mu = self.eigenvalues()
            if mu.size and (mu.min() < -eig_tol or mu.max() > 1 + eig_tol):
                raise KernelAssemblyError(
                    f"{self.route}: eigenvalues in [{mu.min():.3e}, {mu.max():.3e}] leave [0,1]"
                )
        return self

    def logdet(self):
        """(det, log det) of I - matrix from the symmetric eigenvalues."""
        if self.lam == 0:
            return 1.0, 0.0
        mu = self.eigenvalues()
        one_minus = 1.0 - mu
        if np.any(one_minus <= 0):
            sign, ld = np.linalg.slogdet(np.eye(mu.size) - self.matrix)
            return sign * np.exp(ld), ld
        ld = float(np.sum(np.log1p(-mu)))
        return float(np.exp(ld)), ld


def _halfline_nodes(n, t, w, m_x):
    lo, _ = w.support(1e-17)
    X = max(airy_cutoff(n) - t - lo, 1.0)
    # denser near x = 0 where the kernel is largest, coarser in the e^{-x} tail
    breaks = [0.0, min(4.0, X / 4), min(12.0, X / 2), X]
    breaks = sorted(set(breaks))
    return composite_gauss(breaks, [2.0, 1.5, 1.0][: len(breaks) - 1], m_x)


def assemble_halfline(n, t, lam, w, m_x=96, m_z=320):
    x, xw = _halfline_nodes(n, t, w, m_x)
    breaks, dens = _weight_window(w, t, n)
    z, zw = composite_gauss(breaks, dens, m_z)
    zw = zw * w.value(z)
    keep = zw > 1e-300
    z, zw = z[keep], zw[keep]
    A = evaluator(n)(x[:, None] + z[None, :] + t)
    B = A * np.sqrt(zw)[None, :] * np.sqrt(xw)[:, None]
    mat = lam * (B @ B.T)
    return KernelDiscretization(n, t, lam, x, xw, z, zw, mat, "halfline")


def assemble_sigma(n, t, lam, w, m_z=320, m_y=None):
    breaks, dens = _weight_window(w, t, n)
    z, zw = composite_gauss(breaks, dens, m_z)
    zw = zw * w.value(z)
    keep = zw > 1e-300
    z, zw = z[keep], zw[keep]
    if m_y is None:
        tab = _derivative_table(n, z + t)
        H = christoffel_darboux(n, z + t, z + t, tab, tab)
        H = 0.5 * (H + H.T)
    else:
        y, yw = composite_gauss([0.0, max(airy_cutoff(n) - t - z[0], 1.0)], [1.0], m_y)
        F = evaluator(n)(z[:, None] + y[None, :] + t) * np.sqrt(yw)[None, :]
        H = F @ F.T
    s = np.sqrt(zw)
    mat = lam * (s[:, None] * H * s[None, :])
    return KernelDiscretization(n, t, lam, z, zw, z, zw, mat, "sigma")


def kernel_value(n, t, w, x, y, m_z=480):
    """K_{t,n}(x, y) by composite Gauss-Legendre in z against w(z)."""
    breaks, dens = _weight_window(w, t + min(x, y), n)
    z, zw = composite_gauss(breaks, dens, m_z)
    ev = evaluator(n)
    vals = ev(x + z + t) * ev(y + z + t) * w.value(z)
    # the product is symmetric in (x, y); sum in a fixed order so K(x,y) == K(y,x)
    return float(np.sum(np.sort(vals * zw)))


def det_halfline(n, t, lam, w, m_x=96, m_z=320, check=True):
    if lam == 0:
        return 1.0
    disc = assemble_halfline(n, t, lam, w, m_x, m_z)
    if check:
        disc.check()
    return disc.logdet()[0]


def det_sigma(n, t, lam, w, m_z=320, m_y=None, check=True):
    if lam == 0:
        return 1.0
    disc = assemble_sigma(n, t, lam, w, m_z, m_y)
    if check:
        disc.check()
    return disc.logdet()[0]


def logdet(n, t, lam, w, route="halfline", **kw):
    """Log-determinant through the named route (avoids underflow far left)."""
    if lam == 0:
        return 0.0
    build = {"halfline": assemble_halfline, "sigma": assemble_sigma}[route]
    return build(n, t, lam, w, **kw).check().logdet()[1]


def assemble_step(n, t, lam, m=160):
    """Exact step weight: z runs over (0, inf) and M = H_n(z+t, z'+t)."""
    Z = max(airy_cutoff(n) - t, 1.0)
    z, zw = composite_gauss([0.0, Z], [1.0], m)
    tab = _derivative_table(n, z + t)
    H = christoffel_darboux(n, z + t, z + t, tab, tab)
    H = 0.5 * (H + H.T)
    s = np.sqrt(zw)
    return KernelDiscretization(n, t, lam, z, zw, z, zw, lam * s[:, None] * H * s[None, :], "step")


def det_step(n, t, lam, m=160, check=True):
    """Determinant with w = indicator of R+ (for n = 1 the GUE Tracy-Widom F_2(t) at lam = 1)."""
    if lam == 0:
        return 1.0
    disc = assemble_step(n, t, lam, m)
    if check:
        disc.check()
    return disc.logdet()[0]


def trace_kernel(n, t, w, m_z=480):
    """tr K_{t,n} = int_0^inf K(x,x) dx = int w(z) H_n(z+t, z+t) dz."""
    breaks, dens = _weight_window(w, t, n)
    z, zw = composite_gauss(breaks, dens, m_z)
    tab = _derivative_table(n, z + t)
    diag = (-1) ** n * sum((-1) ** j * tab[2 * n - j] * tab[j] for j in range(2 * n))
    return float(np.sum(zw * w.value(z) * diag))
