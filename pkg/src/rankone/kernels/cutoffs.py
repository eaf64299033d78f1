"""Smooth cutoffs built from the mollifier ``psi(x) = exp(-1/(1 - x^2))``.

``S(x) = int_{-1}^{x} psi / int_{-1}^{1} psi`` is a smooth step from 0 (``x <= -1``)
to 1 (``x >= 1``). The two cutoffs used throughout are

    eta(t) = 1 - S(|t| - 3)     equal to 1 on [-2, 2], zero outside [-4, 4]
    chi(t) = S(t / 2)           zero on (-inf, -2], one on [2, inf)

All derivatives up to order three are available in closed form.
"""
from __future__ import annotations

import numpy as np

__all__ = [
    "psi",
    "smoothstep",
    "eta_cutoff",
    "chi_cutoff",
]

# 64-point Gauss-Legendre on [-1, 1]; psi is flat at the endpoints so a
# fixed rule is accurate to rounding on every subinterval [-1, x]
_GL_X, _GL_W = np.polynomial.legendre.leggauss(64)


def psi(x, deriv: int = 0):
    """The mollifier and its derivatives, zero outside ``(-1, 1)``."""
    x = np.asarray(x, dtype=float)
    inside = np.abs(x) < 1
    xi = np.where(inside, x, 0.0)
    u = 1.0 - xi * xi
    base = np.where(inside, np.exp(-1.0 / u), 0.0)
    if deriv == 0:
        out = base
    elif deriv == 1:
        out = base * (-2.0 * xi / u**2)
    elif deriv == 2:
        out = base * (4.0 * xi**2 / u**4 - (2.0 + 6.0 * xi**2) / u**3)
    elif deriv == 3:
        # d/dx of psi * P(x) with P = 4x^2/u^4 - (2+6x^2)/u^3
        p = 4.0 * xi**2 / u**4 - (2.0 + 6.0 * xi**2) / u**3
        dp = 8.0 * xi / u**4 + 32.0 * xi**3 / u**5 - 12.0 * xi / u**3 - 6.0 * xi * (2.0 + 6.0 * xi**2) / u**4
        out = base * (-2.0 * xi / u**2 * p + dp)
    else:
        raise ValueError("derivatives up to order 3 are available")
    return np.where(inside, out, 0.0)


def _integral_from_minus_one(x):
    """``int_{-1}^{x} psi`` for ``x`` in ``[-1, 0]``."""
    half = 0.5 * (x + 1.0)
    nodes = -1.0 + half[..., None] * (_GL_X + 1.0)
    return half * np.sum(_GL_W * psi(nodes), axis=-1)


_NORM = 2.0 * float(_integral_from_minus_one(np.array(0.0)))


def smoothstep(x, deriv: int = 0):
    """``S`` and its derivatives; ``S(x) + S(-x) = 1``."""
    x = np.asarray(x, dtype=float)
    if deriv > 0:
        out = psi(x, deriv - 1) / _NORM
        return out[()] if out.ndim == 0 else out
    xc = np.clip(x, -1.0, 1.0)
    neg = xc <= 0
    left = _integral_from_minus_one(np.where(neg, xc, -xc)) / _NORM
    out = np.where(neg, left, 1.0 - left)
    out = np.where(x <= -1, 0.0, np.where(x >= 1, 1.0, out))
    return out[()] if out.ndim == 0 else out


def eta_cutoff(t, deriv: int = 0):
    """Even cutoff, 1 on ``[-2, 2]`` and 0 for ``|t| >= 4``."""
    t = np.asarray(t, dtype=float)
    a = np.abs(t) - 3.0
    if deriv == 0:
        return 1.0 - smoothstep(a)
    sign = np.sign(t) ** deriv
    out = -sign * smoothstep(a, deriv)
    return out[()] if np.ndim(out) == 0 else out


def chi_cutoff(t, deriv: int = 0):
    """Step from 0 on ``(-inf, -2]`` to 1 on ``[2, inf)``."""
    t = np.asarray(t, dtype=float)
    return smoothstep(0.5 * t, deriv) * 0.5**deriv
