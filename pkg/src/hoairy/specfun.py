"""Higher-order Airy functions Ai_n on the real line.

Ai_n(x) = (1/2pi) * int_G exp(i(l^(2n+1)/(2n+1) + x l)) dl, evaluated on a
hyperbola in the upper half plane whose asymptotic directions lie inside the
decay sectors. The integrand is conjugate-symmetric under l -> -conj(l), so
only the right half of the path is summed and twice its real part is kept.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _core


class QuadratureError(RuntimeError):
    """Raised when successive trapezoid refinements still disagree."""

    def __init__(self, message, residual):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual


_LOG_CUT = float(np.log(1e-18))
# absolute floor for the refinement test: values this small are subnormal-adjacent
_TINY = 1e-280


def _slope(n):
    # asymptotic direction atan(c) sits in the middle of the sector (0, pi/(2n+1))
    return float(np.tan(np.pi / (2 * (2 * n + 1))))


@dataclass(frozen=True)
class HigherAiryEvaluator:
    """Contour quadrature for Ai_n and its first 2n derivatives.

    The path is l(s) = R sinh(s) + i (h + c R (cosh(s) - 1)). For x > 0 it is
    placed through the dominant saddle height; for x <= 0 it hugs the real
    axis where the two real saddles +-|x|^(1/2n) live.
    """

    n: int
    quad_points: int = 256
    max_points: int = 1 << 15
    switch_x: float | None = None
    rtol: float = 1e-9
    backend: str = _core.BACKEND

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be a positive integer")
        if self.quad_points < 8 or self.quad_points % 2:
            raise ValueError("quad_points must be an even integer >= 8")
        if self.backend not in _core.BACKENDS:
            raise ValueError(f"unknown backend {self.backend!r}")

    @property
    def slope(self):
        return _slope(self.n)

    def contour(self, x):
        """Shape parameters ``(h, R, S)`` of the path for each x (S = truncation in s)."""
        n = self.n
        x = np.atleast_1d(np.asarray(x, dtype=np.float64))
        c = self.slope
        rho = np.abs(x) ** (1.0 / (2 * n))
        pos = x > 0
        hv = np.where(pos, np.maximum(rho * np.sin(np.pi / (2 * n)), 0.5), 0.5 / (1.0 + rho**n))
        R = np.where(pos, np.maximum(hv / c, 1.0), np.maximum(1.0, 5.0 * rho))
        S = _core.BACKENDS[self.backend].truncation(x, n, c, hv, R, _LOG_CUT, 8.0, 0.02)
        return hv, R, S

    def truncation_radius(self, x):
        hv, R, S = self.contour(x)
        return np.abs(R * np.sinh(S) + 1j * (hv + self.slope * R * (np.cosh(S) - 1.0)))

    def _quadrature(self, x, j):
        hv, R, S = self.contour(x)
        kernel = _core.BACKENDS[self.backend].contour_sums
        out = np.empty_like(x)
        todo = np.arange(x.size)
        N = self.quad_points
        while todo.size:
            full, half, l1 = kernel(x[todo], j, self.n, self.slope, hv[todo], R[todo], S[todo], N)
            err = np.abs(full - half)
            ok = err <= self.rtol * l1 + _TINY
            out[todo[ok]] = full[ok]
            todo = todo[~ok]
            if todo.size and 2 * N > self.max_points:
                raise QuadratureError(
                    f"contour sum for Ai_{self.n}^({j}) did not settle at {N} points",
                    float(np.max(err[~ok] / np.maximum(l1[~ok], _TINY))),
                )
            N *= 2
        return out

    def __call__(self, x, j=0):
        """Ai_n^(j)(x) for scalar or array x (0 <= j <= 2n)."""
        if not 0 <= j <= 2 * self.n:
            raise ValueError(f"derivative order must lie in 0..{2 * self.n}")
        xa = np.asarray(x, dtype=np.float64)
        flat = np.atleast_1d(xa).ravel()
        if not np.all(np.isfinite(flat)):
            raise ValueError("x must be finite")
        out = np.empty_like(flat)
        far = np.zeros(flat.shape, dtype=bool)
        if self.switch_x is not None and j == 0:
            far = np.abs(flat) > self.switch_x
            if far.any():
                xf = flat[far]
                out[far] = np.where(
                    xf > 0,
                    ai_asymptotic(self.n, np.abs(xf), "positive"),
                    ai_asymptotic(self.n, np.abs(xf), "negative"),
                )
        near = ~far
        if near.any():
            out[near] = self._quadrature(flat[near], j)
        return out.reshape(xa.shape) if xa.ndim else float(out[0])

    def complex_integral(self, x, j=0):
        """Full-path complex integral (diagnostic; the imaginary part should vanish)."""
        p, c = 2 * self.n + 1, self.slope
        x = np.atleast_1d(np.asarray(x, dtype=np.float64))
        hv, R, S = self.contour(x)
        N = 4 * self.quad_points
        s = np.linspace(-1.0, 1.0, 2 * N + 1)[None, :] * S[:, None]
        r = R[:, None]
        lam = r * np.sinh(s) + 1j * (hv[:, None] + c * r * (np.cosh(s) - 1.0))
        dlam = r * (np.cosh(s) + 1j * c * np.sinh(s))
        f = (1j * lam) ** j * np.exp(1j * (lam**p / p + x[:, None] * lam)) * dlam
        return np.trapezoid(f, s, axis=1) / (2 * np.pi)

    def endpoint_ratio(self, x):
        """|exp(i psi)| at the truncation point relative to its on-path maximum."""
        p, c = 2 * self.n + 1, self.slope
        x = np.atleast_1d(np.asarray(x, dtype=np.float64))
        hv, R, S = self.contour(x)
        s = np.linspace(0.0, 1.0, 2001)[None, :] * S[:, None]
        r = R[:, None]
        lam = r * np.sinh(s) + 1j * (hv[:, None] + c * r * (np.cosh(s) - 1.0))
        lg = (1j * (lam**p / p + x[:, None] * lam)).real
        return np.exp(lg[:, -1] - lg.max(axis=1))


@lru_cache(maxsize=16)
def evaluator(n):
    return HigherAiryEvaluator(n)


def ai(n, x):
    """Ai_n(x) for real x (scalar or array)."""
    return evaluator(n)(x, 0)


def ai_deriv(n, x, j):
    """j-th derivative of Ai_n at real x, 0 <= j <= 2n."""
    return evaluator(n)(x, j)


def ai_asymptotic(n, x, side):
    """Leading large-x behaviour of Ai_n(x) (side='positive') or Ai_n(-x) (side='negative').

    The positive side sums the two conjugate saddles e^{i pi/2n}, e^{i(pi - pi/2n)};
    they coincide when n = 1, which halves the amplitude there.
    """
    x = np.asarray(x, dtype=np.float64)
    if np.any(x <= 0):
        raise ValueError("the asymptotic formulas take a positive magnitude x")
    amp = (n * np.pi) ** -0.5 * x ** (-(2 * n - 1) / (4 * n))
    zeta = (2 * n / (2 * n + 1)) * x ** ((2 * n + 1) / (2 * n))
    if side == "negative":
        return amp * np.cos(zeta - np.pi / 4)
    if side != "positive":
        raise ValueError("side must be 'positive' or 'negative'")
    phi = zeta * np.cos(np.pi / (2 * n)) + 0.5 * (-np.pi / 2 + np.pi / (2 * n))
    val = amp * np.exp(-zeta * np.sin(np.pi / (2 * n))) * np.cos(phi)
    return 0.5 * val if n == 1 else val
