"""Admissible weights w and quadrature rules for d sigma = w'(x) dx."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import brentq
from scipy.special import expit

# trapezoid nodes are kept where w' exceeds this fraction of its peak
_TAIL = 1e-16


@dataclass(frozen=True)
class Weight:
    """Increasing w: R -> (0,1) with w' <= exp(-omega |x|) once |x| >= x0."""

    value: Callable[[np.ndarray], np.ndarray]
    derivative: Callable[[np.ndarray], np.ndarray]
    decay_rate: float
    decay_onset: float
    label: str
    # natural length scale of the transition region (1/alpha for a Fermi factor)
    scale: float = 1.0

    def support(self, tail=_TAIL):
        """Interval outside which w' < tail * max w'."""
        probe = np.linspace(-self.scale * 60, self.scale * 60, 4001)
        d = self.derivative(probe)
        peak = d.max()
        x_peak = probe[np.argmax(d)]
        floor = np.log(tail * peak)

        def g(x):
            with np.errstate(divide="ignore"):
                return np.log(self.derivative(x)) - floor

        span = self.decay_onset + np.log(1.0 / tail) / self.decay_rate + self.scale
        lo = brentq(g, x_peak - span, x_peak)
        hi = brentq(g, x_peak, x_peak + span)
        return lo, hi

    def check(self, samples=2001):
        """Sampled version of the admissibility conditions; returns a list of failures."""
        problems = []
        X = self.decay_onset + 20.0 / self.decay_rate
        grid = np.linspace(-X, X, samples)
        v = self.value(grid)
        # w itself rounds to 0 or 1 far out, so strict increase is read off w'
        if not (np.all(np.diff(v) >= 0) and np.all(self.derivative(grid) > 0)):
            problems.append("w is not strictly increasing on the sample grid")
        if self.value(np.array([-X]))[0] >= 1e-6 or 1 - self.value(np.array([X]))[0] >= 1e-6:
            problems.append("w does not reach its limits")
        tail = grid[np.abs(grid) >= self.decay_onset]
        d = self.derivative(tail)
        if not np.all((d > 0) & (d <= np.exp(-self.decay_rate * np.abs(tail)))):
            problems.append("w' violates the exponential decay bound")
        lo, hi = self.support(1e-18)
        xs = np.linspace(lo, hi, 20001)
        mass = np.trapezoid(self.derivative(xs), xs)
        if abs(mass - 1.0) > 1e-10:
            problems.append(f"total mass of w' is {mass!r}")
        return problems


def make_fermi(alpha):
    """Fermi factor w(x) = e^{alpha x} / (1 + e^{alpha x})."""
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    alpha = float(alpha)

    def value(x):
        return expit(alpha * np.asarray(x, dtype=np.float64))

    def derivative(x):
        ax = alpha * np.asarray(x, dtype=np.float64)
        # the product form keeps full relative accuracy where expit saturates
        return alpha * expit(ax) * expit(-ax)

    # alpha e^{-alpha|x|} <= e^{-alpha|x|/2} once |x| >= 2 log(alpha)/alpha
    omega = alpha / 2.0
    x0 = max(1.0, 2.0 * np.log(alpha) / alpha)
    return Weight(value, derivative, omega, x0, f"fermi:alpha={alpha:g}", 1.0 / alpha)


def make_smoothed_step(steepness):
    """Steep Fermi factor standing in for the step function on R+."""
    w = make_fermi(steepness)
    return Weight(w.value, w.derivative, w.decay_rate, w.decay_onset,
                  f"step-approx:k={float(steepness):g}", w.scale)


@dataclass(frozen=True)
class SigmaQuadrature:
    nodes: np.ndarray
    weights: np.ndarray
    order: int
    label: str = ""

    def integrate(self, values):
        return float(np.dot(self.weights, values))

    def bracket(self, f, g):
        return float(np.dot(self.weights, np.asarray(f) * np.asarray(g)))

    def scaled(self, tau):
        """Rule for the weight x -> w(tau x): nodes divide by tau, weights unchanged."""
        return SigmaQuadrature(self.nodes / tau, self.weights, self.order, f"{self.label}/tau={tau:g}")


def sigma_quadrature(w, m, tail=_TAIL):
    """m-node rule for d sigma = w' dx.

    Trapezoid sums on the interval where w' is above ``tail`` times its peak. For
    integrands analytic in a strip around the real axis this converges
    geometrically in m; the weights are normalised to unit mass.
    """
    if m < 4:
        raise ValueError("m must be at least 4")
    lo, hi = w.support(tail)
    x = np.linspace(lo, hi, m)
    h = x[1] - x[0]
    raw = h * w.derivative(x)
    raw[[0, -1]] *= 0.5
    mass = raw.sum()
    if not np.isfinite(mass) or mass <= 0:
        raise ValueError(f"sigma rule has no mass: {mass!r}")
    weights = raw / mass
    if abs(weights.sum() - 1.0) > 1e-10:
        raise ValueError("sigma rule normalisation failed")
    return SigmaQuadrature(x, weights, m, w.label)


_WEIGHT_KINDS = {"fermi": ("alpha", make_fermi), "step-approx": ("k", make_smoothed_step)}


def parse_weight(text):
    """Parse ``fermi:alpha=1.0`` or ``step-approx:k=200``."""
    kind, _, rest = text.partition(":")
    if kind not in _WEIGHT_KINDS:
        raise ValueError(f"unknown weight kind {kind!r}")
    key, factory = _WEIGHT_KINDS[kind]
    params = dict(item.split("=", 1) for item in rest.split(",") if item)
    if set(params) - {key}:
        raise ValueError(f"weight {kind!r} takes only {key}=...")
    return factory(float(params.get(key, 1.0)))
