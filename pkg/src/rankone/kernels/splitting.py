"""Kernels on ``S = Nbar A`` built from the global radial part ``K``.

Points of ``S`` are written ``v a`` with ``v`` given by the norms ``(|X|, |Y|)``
and ``a = exp(t H_0)``. All functions broadcast over arrays of ``t``, ``|X|``
and ``|Y|``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..geometry import NbarPoint, cartan_exponent, iwasawa_exponent
from ..space import SpaceParams
from .cutoffs import chi_cutoff
from .synthesis import RadialKernel

__all__ = ["SKernelSample", "splitting_kernels", "approximating_kernels", "kernel_on_s"]


@dataclass(frozen=True)
class SKernelSample:
    v: NbarPoint
    t: float
    value: complex


def _vt(v, t, sp):
    if isinstance(v, NbarPoint):
        v.check(sp)
        x, y = v.x_norm, v.y_norm
    else:
        x, y = v
    t, x, y = np.broadcast_arrays(np.asarray(t, float), np.asarray(x, float), np.asarray(y, float))
    return t, x, y, iwasawa_exponent((x, y), sp)


def kernel_on_s(k: RadialKernel, v, t, sp: SpaceParams, outside: str = "error"):
    """``K(v a) = K([v a]_+)``, the radial kernel at the Cartan exponent."""
    t, x, y, _ = _vt(v, t, sp)
    return k(cartan_exponent(t, (x, y), sp), outside=outside)


def splitting_kernels(k_glo: RadialKernel, v, t, sp: SpaceParams, outside: str = "error"):
    """``(K1, K2)`` with ``K1 = chi(t + h/2) K([va]_+)`` and ``K2 = K - K1``, ``h = alpha(H(v))``."""
    t, x, y, h = _vt(v, t, sp)
    chi = chi_cutoff(t + 0.5 * h)
    base = k_glo(cartan_exponent(t, (x, y), sp), outside=outside)
    k1 = chi * base
    return k1, base - k1


def approximating_kernels(k_glo: RadialKernel, v, t, sp: SpaceParams, outside: str = "error"):
    """``(K~1, K~2) = (chi(t + h/2) K(t + h), (1 - chi(t + h/2)) K(-t))``."""
    t, x, y, h = _vt(v, t, sp)
    chi = chi_cutoff(t + 0.5 * h)
    return chi * k_glo(t + h, outside=outside), (1.0 - chi) * k_glo(-t, outside=outside)
