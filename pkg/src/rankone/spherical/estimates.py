"""Empirical suprema behind the c-function and remainder estimates.

Each check evaluates a weighted supremum on a grid and again on a grid of
twice the density; the relative change between the two is the drift.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..jets import Jet, variable
from ..space import SpaceParams
from .cfunction import c_check_inverse_jet
from .expansion import MAX_TERMS, gamma_recursion

__all__ = [
    "SupremumCheck",
    "GammaFit",
    "hcest_suprema",
    "omega_derivative_suprema",
    "gamma_mikhlin_fit",
    "gamma_mikhlin_norms",
]

STABLE_DRIFT = 0.05
NOISE_FLOOR = 1e-9


@dataclass(frozen=True)
class SupremumCheck:
    """Suprema indexed by derivative order ``j`` at two grid densities."""

    coarse: tuple
    fine: tuple

    @property
    def drift(self) -> tuple:
        # suprema at rounding level (identically vanishing derivatives) count as zero
        floor = NOISE_FLOOR * max(1.0, abs(self.fine[0]))
        out = []
        for c, f in zip(self.coarse, self.fine):
            big = max(abs(f), abs(c))
            out.append(0.0 if big < floor else abs(f - c) / big)
        return tuple(out)

    @property
    def stable(self) -> bool:
        return all(np.isfinite(self.fine)) and max(self.drift) < STABLE_DRIFT

    def to_dict(self) -> dict:
        return {
            "coarse": list(self.coarse),
            "fine": list(self.fine),
            "drift": list(self.drift),
            "stable": self.stable,
        }


def _imag_levels(sp):
    return (0.0, 0.5 * sp.rho, sp.rho)


def _hcest_once(sp, per_decade, order, lam_range):
    x = np.geomspace(lam_range[0], lam_range[1], int(np.log10(lam_range[1] / lam_range[0]) * per_decade) + 1)
    lam = np.concatenate([x + 1j * y for y in _imag_levels(sp)])
    with np.errstate(all="ignore"):
        d = c_check_inverse_jet(variable(lam, order), sp).derivatives()
    w = 1.0 + np.abs(lam)
    expo = np.arange(order + 1)[:, None] - 0.5 * (sp.n - 1)
    return tuple(float(v) for v in np.max(np.abs(d) * w[None, :] ** expo, axis=1))


def hcest_suprema(sp: SpaceParams, order: int = 2, per_decade: int = 64, lam_range=(0.1, 1e3)) -> SupremumCheck:
    """``sup |d^j c_check^-1(lam)| (1+|lam|)^(j-(n-1)/2)`` over ``0 <= Im lam <= rho``."""
    return SupremumCheck(
        _hcest_once(sp, per_decade, order, lam_range),
        _hcest_once(sp, 2 * per_decade, order, lam_range),
    )


def _omega_jets(lam, t, sp, order, L):
    G = gamma_recursion(variable(lam, order), L, sp)
    coeffs = np.stack([g.c for g in G[1:]])  # (L, order+1, Nl)
    E = np.exp(-2.0 * np.outer(np.arange(1, L + 1), t))  # (L, Nt)
    series = np.einsum("lkn,lt->knt", coeffs, E)
    return Jet(series).derivatives()


def _omega_once(sp, per_decade, order, t_points, L):
    x = np.concatenate([[0.0], np.geomspace(1e-2, 1e3, 5 * per_decade + 1)])
    lam = np.concatenate([x + 1j * y for y in _imag_levels(sp)])
    t = np.linspace(0.5, 6.0, t_points)
    with np.errstate(all="ignore"):
        d = _omega_jets(lam, t, sp, order, L)
    w = (1.0 + np.abs(lam.real))[None, :, None] ** np.arange(order + 1)[:, None, None]
    return tuple(float(v) for v in np.max(np.abs(d) * w, axis=(1, 2)))


def omega_derivative_suprema(
    sp: SpaceParams, order: int = 2, per_decade: int = 32, t_points: int = 23, L: int = MAX_TERMS
) -> SupremumCheck:
    """``sup |d^j_lam omega(lam, t)| (1+|Re lam|)^j`` over ``t >= 1/2``, ``0 <= Im lam <= rho``."""
    return SupremumCheck(
        _omega_once(sp, per_decade, order, t_points, L),
        _omega_once(sp, 2 * per_decade, order, 2 * t_points - 1, L),
    )


@dataclass(frozen=True)
class GammaFit:
    """Envelope ``M_l <= C l^d`` of the per-coefficient Mikhlin norms."""

    C: float
    d: float
    norms: tuple

    def bound(self, l):
        return self.C * np.asarray(l, dtype=float) ** self.d

    def to_dict(self) -> dict:
        return {"C": self.C, "d": self.d, "norms": list(self.norms)}


def gamma_mikhlin_norms(sp: SpaceParams, shift: float, L: int = 30, per_decade: int = 32) -> np.ndarray:
    """``sup_lam |G_l(lam + i shift)| + |lam d G_l(lam + i shift)|`` for ``l = 1..L``."""
    x = np.geomspace(1e-3, 1e3, 6 * per_decade + 1)
    lam = np.concatenate([-x[::-1], [0.0], x])
    with np.errstate(all="ignore"):
        G = gamma_recursion(variable(lam + 1j * shift, 1), L, sp)
    return np.array([np.max(np.abs(g.c[0]) + np.abs(lam * g.c[1])) for g in G[1:]])


def gamma_mikhlin_fit(sp: SpaceParams, shift: float, L: int = 30, per_decade: int = 32) -> GammaFit:
    """Least-squares exponent ``d`` of ``log M_l`` against ``log l``, then the smallest valid ``C``."""
    M = gamma_mikhlin_norms(sp, shift, L, per_decade)
    ell = np.arange(1, L + 1, dtype=float)
    use = ell >= 2
    d = float(np.polyfit(np.log(ell[use]), np.log(M[use]), 1)[0]) if L >= 3 else 0.0
    d = max(d, 0.0)
    C = float(np.max(M / ell**d))
    return GammaFit(C, d, tuple(float(v) for v in M))
