"""L1 norms of the smooth weights that multiply kernel pieces.

Every weight here is of the form ``g(t) e^{beta t}`` with ``g`` built from the
cutoffs, so ``D^2`` is computed exactly from the closed-form cutoff
derivatives and only the final ``L1`` integral is numerical (trapezoid rule,
repeated at twice the density to measure drift).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..geometry import iwasawa_exponent
from ..space import SpaceParams
from .cutoffs import chi_cutoff, eta_cutoff

__all__ = [
    "eta_weight",
    "eta_weight_norm",
    "EtaLedger",
    "eta_ledger",
    "psi_v",
    "psi_v_norm",
    "PsiLedger",
    "psi_ledger",
    "varphi_weight",
    "varphi_norm",
]

LEDGER_DRIFT = 0.10
_DENSITY = 400  # points per unit length at the coarse level


def _trapz(y, x):
    return float(np.trapezoid(y, x) if hasattr(np, "trapezoid") else np.trapz(y, x))


def _beta(sign: int, ell: int, sp: SpaceParams, p: float) -> float:
    return -2.0 * ell if sign > 0 else 2.0 * sp.rho / p + 2.0 * ell


def eta_weight(t, ell: int, sign: int, sp: SpaceParams, p: float, deriv: int = 0):
    """``eta_{l,+} = 2(1-eta) 1_{t>0} e^{-2lt}`` or ``eta_{l,-} = 2(1-eta) e^{2 rho t/p} 1_{t<0} e^{2lt}``.

    ``deriv`` is 0 or 2.
    """
    t = np.asarray(t, dtype=float)
    beta = _beta(sign, ell, sp, p)
    side = (t > 0) if sign > 0 else (t < 0)
    h = np.exp(beta * t)
    g = 2.0 * (1.0 - eta_cutoff(t))
    if deriv == 0:
        out = g * h
    elif deriv == 2:
        g1 = -2.0 * eta_cutoff(t, 1)
        g2 = -2.0 * eta_cutoff(t, 2)
        out = h * (g2 + 2.0 * beta * g1 + beta**2 * g)
    else:
        raise ValueError("deriv must be 0 or 2")
    return np.where(side, out, 0.0)


def eta_weight_norm(ell: int, sign: int, sp: SpaceParams, p: float, density: int = _DENSITY) -> float:
    """``||eta_{l,+-}||_1 + ||D^2 eta_{l,+-}||_1``; ``inf`` for the non-integrable ``(l, +) = (0, +)``."""
    beta = _beta(sign, ell, sp, p)
    if beta == 0:
        return float("inf")
    length = 2.0 + 40.0 / abs(beta)
    t = np.linspace(2.0, 2.0 + length, int(length * density) + 1)
    if sign < 0:
        t = -t[::-1]
    f0 = np.abs(eta_weight(t, ell, sign, sp, p))
    f2 = np.abs(eta_weight(t, ell, sign, sp, p, deriv=2))
    return _trapz(f0, t) + _trapz(f2, t)


@dataclass(frozen=True)
class EtaLedger:
    ells: tuple
    plus: tuple
    minus: tuple
    C_coarse: float
    C_fine: float
    excluded: tuple

    @property
    def drift(self) -> float:
        return abs(self.C_fine - self.C_coarse) / max(self.C_fine, self.C_coarse)

    @property
    def stable(self) -> bool:
        return np.isfinite(self.C_fine) and self.drift < LEDGER_DRIFT

    def to_dict(self) -> dict:
        return {
            "ells": list(self.ells),
            "plus": [v if np.isfinite(v) else None for v in self.plus],
            "minus": list(self.minus),
            "C": self.C_fine,
            "drift": self.drift,
            "stable": self.stable,
            "excluded": list(self.excluded),
        }


def eta_ledger(sp: SpaceParams, p: float, max_ell: int = 20) -> EtaLedger:
    """Fit ``C = max_l e^l (||eta_{l,+-}||_1 + ||D^2 eta_{l,+-}||_1)`` at two densities."""
    ells = tuple(range(max_ell + 1))
    fits = []
    for density in (_DENSITY, 2 * _DENSITY):
        plus = [eta_weight_norm(l, +1, sp, p, density) for l in ells]
        minus = [eta_weight_norm(l, -1, sp, p, density) for l in ells]
        scaled = [v * np.exp(l) for l, v in zip(ells, plus) if np.isfinite(v)]
        scaled += [v * np.exp(l) for l, v in zip(ells, minus)]
        fits.append((max(scaled), plus, minus))
    excluded = tuple(f"l={l} (+): not integrable" for l, v in zip(ells, fits[1][1]) if not np.isfinite(v))
    return EtaLedger(ells, tuple(fits[1][1]), tuple(fits[1][2]), fits[0][0], fits[1][0], excluded)


def psi_v(t, h: float, deriv: int = 0):
    """``-chi(t - h/2) + chi(t)`` with ``h = alpha(H(v))``."""
    t = np.asarray(t, dtype=float)
    return chi_cutoff(t, deriv) - chi_cutoff(t - 0.5 * h, deriv)


def psi_v_norm(h: float, density: int = _DENSITY) -> float:
    lo, hi = -2.5, 2.5 + 0.5 * abs(h)
    t = np.linspace(lo, hi, int((hi - lo) * density) + 1)
    return _trapz(np.abs(psi_v(t, h)), t) + _trapz(np.abs(psi_v(t, h, 2)), t)


@dataclass(frozen=True)
class PsiLedger:
    h: tuple
    norms: tuple
    slope_coarse: float
    slope_fine: float

    @property
    def drift(self) -> float:
        return abs(self.slope_fine - self.slope_coarse) / max(self.slope_fine, self.slope_coarse)

    @property
    def stable(self) -> bool:
        return np.isfinite(self.slope_fine) and self.drift < LEDGER_DRIFT

    def to_dict(self) -> dict:
        return {"slope": self.slope_fine, "drift": self.drift, "stable": self.stable, "samples": len(self.h)}


def psi_ledger(sp: SpaceParams, rng: np.random.Generator, samples: int = 100, norm_max: float = 20.0) -> PsiLedger:
    """Slope ``max ||psi_v|| / alpha(H(v))`` over random ``v`` at two densities."""
    x = rng.uniform(0.0, norm_max, samples)
    y = rng.uniform(0.0, norm_max, samples) if sp.m_2alpha else np.zeros(samples)
    h = np.asarray(iwasawa_exponent((x, y), sp), dtype=float)
    keep = h > 1e-8
    h = h[keep]
    slopes, norms = [], None
    for density in (_DENSITY, 2 * _DENSITY):
        norms = np.array([psi_v_norm(v, density) for v in h])
        slopes.append(float(np.max(norms / h)))
    return PsiLedger(tuple(h), tuple(norms), slopes[0], slopes[1])


def varphi_weight(t, sp: SpaceParams, p: float, deriv: int = 0):
    """``(1 - chi(t)) e^{4 rho t / p}``; supported on ``t <= 2``."""
    t = np.asarray(t, dtype=float)
    beta = 4.0 * sp.rho / p
    h = np.exp(beta * t)
    g = 1.0 - chi_cutoff(t)
    if deriv == 0:
        return g * h
    g1, g2 = -chi_cutoff(t, 1), -chi_cutoff(t, 2)
    return h * (g2 + 2.0 * beta * g1 + beta**2 * g)


def varphi_norm(sp: SpaceParams, p: float, density: int = _DENSITY) -> float:
    beta = 4.0 * sp.rho / p
    t = np.linspace(-2.0 - 40.0 / beta, 2.0, int((4.0 + 40.0 / beta) * density) + 1)
    return _trapz(np.abs(varphi_weight(t, sp, p)), t) + _trapz(np.abs(varphi_weight(t, sp, p, 2)), t)
