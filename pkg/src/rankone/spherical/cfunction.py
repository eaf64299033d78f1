"""Harish-Chandra c-function and Plancherel density.

Normalization: ``c(-i rho) = 1`` (equivalently ``phi_lambda(0) = 1`` with the
inversion formula ``k(t) = int_R F(lambda) phi_lambda(t) |c(lambda)|^-2 d lambda``
carrying no extra constant on the inverse side). For the real hyperbolic
3-space this gives ``c(lambda) = 1/(i lambda)`` and density ``lambda^2``.

Gamma values come from :func:`scipy.special.loggamma`; derivative jets use a
Lanczos approximation written in jet arithmetic (see :func:`loggamma_jet`).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import loggamma

from ..jets import Jet
from ..space import SpaceParams

__all__ = [
    "PoleError",
    "HarishChandraC",
    "c_function",
    "c_inverse",
    "c_check_inverse",
    "plancherel_density",
    "loggamma_jet",
    "c_check_inverse_jet",
]

LOG2 = math.log(2.0)

# g = 7, n = 9 Lanczos coefficients
_LANCZOS_G = 7.0
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


class PoleError(ArithmeticError):
    """Evaluation at a pole of a meromorphic formula."""


@dataclass(frozen=True)
class HarishChandraC:
    """Callable view of the c-function of one space."""

    sp: SpaceParams
    normalization: float = 1.0

    def __call__(self, lam):
        return self.normalization * c_function(lam, self.sp)

    def density(self, lam):
        return plancherel_density(lam, self.sp) / self.normalization**2

    def check_inverse(self, lam):
        return c_check_inverse(lam, self.sp) / self.normalization


def _args(sp: SpaceParams):
    return sp.rho, 0.5 * sp.m_alpha + 1.0, 0.5 * sp.n


def c_function(lam, sp: SpaceParams):
    """``2^(rho - i lam) G(n/2) G(i lam) / (G((i lam + rho)/2) G((i lam + m_a/2 + 1)/2))``.

    Poles at ``lam = i k``, ``k = 0, 1, 2, ...``.
    """
    lam = np.asarray(lam, dtype=complex)
    il = 1j * lam
    near = np.abs(il - np.round(il.real)) < 1e-13
    if np.any(near & (np.round(il.real) <= 0)):
        raise PoleError("c-function pole: i*lambda is a nonpositive integer")
    rho, b, h = _args(sp)
    logc = (
        (rho - il) * LOG2
        + loggamma(h)
        + loggamma(il)
        - loggamma(0.5 * (il + rho))
        - loggamma(0.5 * (il + b))
    )
    out = np.exp(logc)
    return out[()] if out.ndim == 0 else out


def c_inverse(lam, sp: SpaceParams):
    """``1/c(lam)``, entire across ``lam = 0`` (written with ``1/G(w) = w/G(w+1)``)."""
    lam = np.asarray(lam, dtype=complex)
    il = 1j * lam
    rho, b, h = _args(sp)
    with np.errstate(all="ignore"):
        logv = (
            loggamma(0.5 * (il + rho))
            + loggamma(0.5 * (il + b))
            - (rho - il) * LOG2
            - loggamma(h)
            - loggamma(il + 1.0)
        )
        out = il * np.exp(logv)
    out = np.where(il == 0, 0.0, out)
    return out[()] if out.ndim == 0 else out


def c_check_inverse(lam, sp: SpaceParams):
    """``1/c(-lam)``, the inverse of the reflected c-function."""
    return c_inverse(-np.asarray(lam, dtype=complex), sp)


def plancherel_density(lam, sp: SpaceParams):
    """``|c(lam)|^-2`` for real ``lam``; even, vanishing at ``lam = 0``."""
    lam = np.asarray(lam, dtype=float)
    out = np.abs(c_inverse(lam, sp)) ** 2
    out = np.asarray(out, dtype=float)
    return out[()] if out.ndim == 0 else out


# jets


def loggamma_jet(w: Jet) -> Jet:
    """Jet of ``log G`` by the Lanczos formula; the value may differ from the
    principal ``loggamma`` by a multiple of ``2 pi i``, derivatives do not."""
    shift = 0
    re_min = float(np.min(w.c[0].real))
    if re_min < 0.5:
        shift = int(math.ceil(0.5 - re_min))
    correction = None
    for k in range(shift):
        term = (w + float(k)).log()
        correction = term if correction is None else correction + term
    x = w + (shift - 1.0)
    t = x + (_LANCZOS_G + 0.5)
    series = x * 0.0 + _LANCZOS[0]
    for k, ck in enumerate(_LANCZOS[1:], start=1):
        series = series + ck / (x + float(k))
    out = (x + 0.5) * t.log() - t + series.log() + 0.5 * math.log(2 * math.pi)
    if correction is not None:
        out = out - correction
    return out


def c_check_inverse_jet(lam: Jet, sp: SpaceParams) -> Jet:
    """Jet in ``lam`` of ``1/c(-lam) = z G((z+rho)/2) G((z+m_a/2+1)/2) / (2^(rho-z) G(n/2) G(z+1))``
    with ``z = -i lam``."""
    rho, b, h = _args(sp)
    z = lam * (-1j)
    logv = (
        loggamma_jet((z + rho) * 0.5)
        + loggamma_jet((z + b) * 0.5)
        - loggamma_jet(z + 1.0)
        + (z - rho) * LOG2
        - complex(loggamma(h))
    )
    return z * logv.exp()
