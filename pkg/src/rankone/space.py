"""Rank-one symmetric space parameters.

A rank-one space is identified by the root multiplicities ``(m_alpha, m_2alpha)``.
Complexified frequencies are identified with complex numbers via
``zeta -> zeta * alpha`` and the group ``A`` with the real line via
``t = alpha(log a)``; every radial API in this package takes ``t``.

Fractional powers use the principal branch.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

__all__ = [
    "SpaceParams",
    "PRESETS",
    "preset",
    "dual_exponent",
    "delta_exponent",
    "rho_p",
    "omega_weight",
    "delta_density",
    "DomainError",
    "BranchError",
]


class DomainError(ValueError):
    """Argument outside the domain of a formula."""


class BranchError(ArithmeticError):
    """A principal-branch power was requested on its branch cut."""


@dataclass(frozen=True)
class SpaceParams:
    m_alpha: int
    m_2alpha: int = 0

    def __post_init__(self):
        if int(self.m_alpha) != self.m_alpha or self.m_alpha < 1:
            raise DomainError(f"m_alpha must be a positive integer, got {self.m_alpha!r}")
        if int(self.m_2alpha) != self.m_2alpha or self.m_2alpha < 0:
            raise DomainError(f"m_2alpha must be a nonnegative integer, got {self.m_2alpha!r}")

    @property
    def n(self) -> int:
        """Dimension of the space."""
        return self.m_alpha + self.m_2alpha + 1

    @property
    def rho_exact(self) -> Fraction:
        return Fraction(self.m_alpha + 2 * self.m_2alpha, 2)

    @property
    def rho(self) -> float:
        """``|rho|`` with ``2|rho| = m_alpha + 2 m_2alpha``."""
        return float(self.rho_exact)

    @property
    def c_nbar(self) -> float:
        """Constant ``c`` in the Iwasawa formulas, ``1/c = 4(m_alpha + 4 m_2alpha)``."""
        return 1.0 / (4.0 * (self.m_alpha + 4 * self.m_2alpha))

    @classmethod
    def from_config(cls, obj) -> "SpaceParams":
        if isinstance(obj, str):
            return preset(obj)
        return cls(int(obj["m_alpha"]), int(obj.get("m_2alpha", 0)))

    def to_config(self) -> dict:
        return {"m_alpha": self.m_alpha, "m_2alpha": self.m_2alpha}


PRESETS = {
    "H3": SpaceParams(2, 0),
    "H4": SpaceParams(3, 0),
    "CH2": SpaceParams(2, 1),
}


def preset(name: str) -> SpaceParams:
    try:
        return PRESETS[name.upper()]
    except KeyError:
        raise DomainError(f"unknown space preset {name!r}; known: {sorted(PRESETS)}") from None


def _check_exponent(p, allow_one=False):
    p = float(p)
    if not np.isfinite(p) or p < 1 or (p == 1 and not allow_one):
        raise DomainError(f"exponent must lie in (1, inf), got {p}")
    return p


def dual_exponent(p: float) -> float:
    p = _check_exponent(p)
    return p / (p - 1.0)


def delta_exponent(p: float, allow_one: bool = True) -> float:
    """``|2/p - 1|``; ``p = 1`` is accepted for weights."""
    p = _check_exponent(p, allow_one=allow_one)
    return abs(2.0 / p - 1.0)


def rho_p(p: float, sp: SpaceParams) -> float:
    """Half-width of the critical strip ``T_p``."""
    return delta_exponent(p) * sp.rho


def omega_weight(zeta, sp: SpaceParams):
    """``(zeta^2 + 4 rho^2)^((n-1)/4)`` on the closure of ``T_1``."""
    z = np.asarray(zeta, dtype=complex)
    w = z * z + 4.0 * sp.rho**2
    on_cut = (w.real < 0) & (w.imag == 0)
    if np.any(on_cut):
        raise BranchError("zeta^2 + 4 rho^2 lies on the negative real axis")
    out = w ** ((sp.n - 1) / 4.0)
    return out[()] if out.ndim == 0 else out


def delta_density(t, sp: SpaceParams):
    """Radial part of the Haar measure in Cartan coordinates, ``t >= 0``."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise DomainError("delta_density needs t >= 0; symmetrize first")
    out = (
        2.0 ** (-2 * sp.rho)
        * (2 * np.sinh(t)) ** sp.m_alpha
        * (2 * np.sinh(2 * t)) ** sp.m_2alpha
    )
    return out[()] if out.ndim == 0 else out
