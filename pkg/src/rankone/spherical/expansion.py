"""Harish-Chandra series coefficients and the large-radius expansion of phi.

Substituting ``phi = sum_l G_l exp((i lam - rho - 2l) t)`` into

    phi'' + (m_a coth t + 2 m_2a coth 2t) phi' = -(lam^2 + rho^2) phi

and expanding ``coth`` in powers of ``exp(-2t)`` gives the recursion

    4 l (l - i lam) G_l = - sum_{k=1}^{l} a_k (i lam - rho - 2(l-k)) G_{l-k}

with ``a_k = 2 m_a + 4 m_2a [k even]``. It is singular at ``lam = -i l``.
The recursion only uses ``+ - * /`` so it runs unchanged on numpy arrays,
:class:`~rankone.jets.Jet` objects and mpmath numbers.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from ..jets import Jet
from ..space import SpaceParams
from .cfunction import c_function

__all__ = [
    "GammaCoeffs",
    "SingularRecursionError",
    "RegimeWarning",
    "gamma_coeffs",
    "gamma_recursion",
    "gamma_table",
    "series_terms_needed",
    "omega_remainder",
    "hc_series",
    "MAX_TERMS",
]

MAX_TERMS = 60
SERIES_RTOL = 1e-14


class SingularRecursionError(ArithmeticError):
    pass


class RegimeWarning(RuntimeWarning):
    pass


@dataclass(frozen=True)
class GammaCoeffs:
    lam: complex
    values: tuple

    def __getitem__(self, l):
        return self.values[l]

    def __len__(self):
        return len(self.values)


def _recursion_weights(sp: SpaceParams, L: int):
    return [0.0] + [2.0 * sp.m_alpha + (4.0 * sp.m_2alpha if k % 2 == 0 else 0.0) for k in range(1, L + 1)]


def gamma_recursion(lam, L: int, sp: SpaceParams, one=1.0):
    """``[G_0, ..., G_L]`` for ``lam`` of any numeric type closed under field operations."""
    il = lam * 1j
    rho = sp.rho
    a = _recursion_weights(sp, L)
    G = [lam * 0 + one]
    for l in range(1, L + 1):
        acc = 0
        for k in range(1, l + 1):
            acc = acc + a[k] * (il - (rho + 2.0 * (l - k))) * G[l - k]
        G.append(-acc / ((il * -1 + l) * (4.0 * l)))
    return G


def _check_singular(lam, L, tol=1e-9):
    lam = np.asarray(lam, dtype=complex)
    for l in range(1, L + 1):
        if np.any(np.abs(lam + 1j * l) < tol * l):
            raise SingularRecursionError(f"lambda = -{l}i is singular for the coefficient recursion")


def gamma_coeffs(lam: complex, L: int, sp: SpaceParams) -> GammaCoeffs:
    if L < 0:
        raise ValueError("L must be nonnegative")
    lam = complex(lam)
    _check_singular(lam, L)
    vals = gamma_recursion(np.asarray(lam), L, sp)
    return GammaCoeffs(lam, tuple(complex(v) for v in vals))


def gamma_table(lam, L: int, sp: SpaceParams) -> np.ndarray:
    """Array ``(L + 1, *lam.shape)`` of coefficients for an array of ``lam``."""
    lam = np.asarray(lam, dtype=complex)
    with np.errstate(all="ignore"):
        return np.stack(gamma_recursion(lam, L, sp))


def omega_remainder(lam: complex, t: float, L: int, sp: SpaceParams):
    """``sum_{l=1}^{L} G_l(lam) e^{-2lt}`` and a geometric bound for the tail beyond ``L``.

    The tail bound extrapolates the last coefficient ratio; it is a heuristic
    estimate rather than a rigorous majorant.
    """
    if t < 0.5:
        warnings.warn(f"t = {t} is below 1/2 where the expansion is controlled", RegimeWarning, stacklevel=2)
    coeffs = gamma_coeffs(lam, L + 1, sp).values
    e = np.exp(-2.0 * t * np.arange(L + 2))
    value = complex(np.dot(coeffs[1 : L + 1], e[1 : L + 1]))
    last = abs(coeffs[L + 1]) * e[L + 1]
    ratios = [abs(coeffs[l + 1]) / abs(coeffs[l]) for l in range(max(1, L - 3), L + 1) if coeffs[l] != 0]
    r = (max(ratios) if ratios else 1.0) * e[1]
    tail = last / (1.0 - r) if r < 1 else float("inf")
    return value, tail


def hc_series(lam, t, sp: SpaceParams, max_terms: int = MAX_TERMS):
    """Two-term Harish-Chandra expansion on a ``(lam, t)`` outer grid.

    Returns an array of shape ``lam.shape + t.shape``; valid for ``t >= 1/2``
    away from ``lam = 0`` and from the singular set ``lam = +-i l``.
    """
    lam = np.atleast_1d(np.asarray(lam, dtype=complex))
    t = np.atleast_1d(np.asarray(t, dtype=float))
    L = max_terms
    ell = np.arange(L + 1)
    E = np.exp(-2.0 * np.outer(ell, t))  # (L+1, Nt)
    flat = lam.ravel()
    rows = []
    for sign in (1.0, -1.0):
        G = gamma_table(sign * flat, L, sp)  # (L+1, Nl)
        S = G.T @ E  # (Nl, Nt)
        pref = c_function(sign * flat, sp)[:, None]
        phase = np.exp(np.outer(sign * 1j * flat - sp.rho, t))
        rows.append(pref * phase * S)
    out = (rows[0] + rows[1]).reshape(lam.shape + t.shape)
    return out


def series_terms_needed(lam: complex, t: float, sp: SpaceParams, rtol=SERIES_RTOL, cap=MAX_TERMS) -> int:
    """Smallest ``L`` with ``|G_L| e^{-2Lt} < rtol * |running sum|``, capped."""
    G = gamma_table(np.asarray(lam), cap, sp)
    running = 0j
    for l in range(cap + 1):
        term = G[l] * np.exp(-2.0 * l * t)
        running += term
        if l > 0 and abs(term) < rtol * abs(running):
            return l
    return cap
