"""Pure numpy fallback for the contour trapezoid sums used by :mod:`hoairy.specfun`."""

import numpy as np

_CHUNK = 4096


def truncation(x, n, c, hv, R, log_cut, smax, ds):
    """Right end S of the path: last scan point where |exp(i psi)| >= e^log_cut * max, plus margin."""
    x = np.asarray(x, dtype=np.float64)
    p = 2 * n + 1
    grid = np.arange(int(smax / ds + 0.5) + 1) * ds
    s = grid[None, :]
    out = np.empty_like(x)
    for lo in range(0, x.size, 1024):
        sl = slice(lo, lo + 1024)
        r = R[sl, None]
        lam = r * np.sinh(s) + 1j * (hv[sl, None] + c * r * (np.cosh(s) - 1.0))
        lg = (1j * (lam**p / p + x[sl, None] * lam)).real
        keep = lg >= lg.max(axis=1, keepdims=True) + log_cut
        last = keep.shape[1] - 1 - np.argmax(keep[:, ::-1], axis=1)
        out[sl] = grid[np.minimum(last + 1, grid.size - 1)] + 0.02
    return out


def contour_sums(x, j, n, c, hv, R, S, N):
    """Trapezoid sums over the right half of the symmetric contour.

    Returns ``(full, half, l1)``: the estimate with ``N`` panels, the estimate
    from the even nodes only (``N/2`` panels) and the L1 size of the integrand,
    all already divided by pi. ``N`` must be even.
    """
    x = np.asarray(x, dtype=np.float64)
    full = np.empty_like(x)
    half = np.empty_like(x)
    l1 = np.empty_like(x)
    p = 2 * n + 1
    k = np.arange(N + 1, dtype=np.float64)
    tw = np.ones(N + 1)
    tw[0] = 0.5
    tw[N] = 0.5
    hw = np.zeros(N + 1)
    hw[::2] = 2.0
    hw[0] = 1.0
    hw[N] = 1.0
    for lo in range(0, x.size, _CHUNK):
        sl = slice(lo, lo + _CHUNK)
        h = (S[sl] / N)[:, None]
        s = k[None, :] * h
        r = R[sl][:, None]
        lam = r * np.sinh(s) + 1j * (hv[sl][:, None] + c * r * (np.cosh(s) - 1.0))
        dlam = r * (np.cosh(s) + 1j * c * np.sinh(s))
        f = np.exp(1j * (lam**p / p + x[sl][:, None] * lam)) * dlam
        if j:
            f = f * (1j * lam) ** j
        fr = f.real
        full[sl] = (fr @ tw) * h[:, 0] / np.pi
        half[sl] = (fr @ hw) * h[:, 0] / np.pi
        l1[sl] = (np.abs(f) @ tw) * h[:, 0] / np.pi
    return full, half, l1
