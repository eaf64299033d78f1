"""Radial kernels from spherical multipliers and back.

Conventions (fixed package-wide):

* inversion  ``k(t) = int_R m(lam) e^{-eps lam^2} phi_lam(t) |c(lam)|^-2 d lam``
* transform  ``F(lam) = C_fwd int_0^inf k(t) phi_lam(t) delta(t) dt`` with
  ``C_fwd = 2^(2 rho) / (4 pi)`` so that ``F`` reproduces ``e^{-eps lam^2} m``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np
from scipy.interpolate import CubicSpline

from ..jets import variable
from ..multiplier import MultiplierExpr
from ..space import SpaceParams, delta_density, rho_p
from ..spherical import (
    c_check_inverse,
    gamma_table,
    plancherel_density,
    spherical_table,
)
from ..spherical.expansion import MAX_TERMS
from .cutoffs import eta_cutoff

__all__ = [
    "RadialKernel",
    "QuadratureError",
    "OutOfGridError",
    "DivergenceError",
    "default_grid",
    "synthesize_kernel",
    "spherical_transform",
    "forward_constant",
    "split_local_global",
    "kappa_q",
    "shifted_synthesis",
    "lambda_extent",
]

DEFAULT_T_MAX = 16.0
DEFAULT_POINTS = 4096
TRUNCATION = 1e-16


class QuadratureError(ArithmeticError):
    pass


class OutOfGridError(ValueError):
    pass


class DivergenceError(ArithmeticError):
    pass


def default_grid(t_max: float = DEFAULT_T_MAX, n_points: int = DEFAULT_POINTS) -> np.ndarray:
    """Uniform symmetric grid; an even point count keeps ``t = 0`` off the grid."""
    return np.linspace(-t_max, t_max, n_points)


@dataclass(frozen=True, eq=False)
class RadialKernel:
    t: np.ndarray
    values: np.ndarray
    epsilon: float = 0.0
    even: bool = True
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float)
        v = np.asarray(self.values)
        if t.ndim != 1 or t.shape != v.shape:
            raise ValueError("grid and values must be 1-d arrays of equal length")
        if np.any(np.diff(t) <= 0):
            raise ValueError("grid must be strictly increasing")
        if not np.all(np.isfinite(v)):
            raise ValueError("kernel values must be finite")
        if self.even:
            if not np.allclose(t, -t[::-1], rtol=0, atol=1e-12 * max(1.0, abs(t[-1]))):
                raise ValueError("even kernels need a grid symmetric about 0")
            scale = max(1.0, float(np.max(np.abs(v)))) if v.size else 1.0
            if np.max(np.abs(v - v[::-1]), initial=0.0) > 1e-12 * scale:
                raise ValueError("kernel values are not even")

    @property
    def step(self) -> float:
        return float(self.t[1] - self.t[0])

    @property
    def t_max(self) -> float:
        return float(self.t[-1])

    def with_values(self, values, even=None, **meta) -> "RadialKernel":
        # the cached spline belongs to the old values
        kept = {k: v for k, v in self.meta.items() if k != "_spline"}
        return replace(
            self, values=np.asarray(values), even=self.even if even is None else even,
            meta={**kept, **meta},
        )

    def _spline(self):
        cached = self.meta.get("_spline")
        if cached is None:
            cached = CubicSpline(self.t, self.values, bc_type="clamped")
            self.meta["_spline"] = cached
        return cached

    def __call__(self, s, outside: str = "error", edge_tol: float = 1e-12):
        """Cubic interpolation; ``outside='zero'`` returns 0 beyond the grid after
        checking that the kernel is negligible at the grid edges."""
        s = np.asarray(s, dtype=float)
        lo, hi = self.t[0], self.t[-1]
        out_of = (s < lo) | (s > hi)
        if np.any(out_of):
            if outside != "zero":
                bad = s[out_of].flat[0]
                raise OutOfGridError(f"evaluation point {bad:.6g} outside [{lo:.6g}, {hi:.6g}]")
            edge = max(abs(self.values[0]), abs(self.values[-1]))
            scale = float(np.max(np.abs(self.values))) or 1.0
            if edge > edge_tol * scale:
                raise OutOfGridError(
                    f"kernel is not negligible at the grid edge ({edge / scale:.3g} of its maximum)"
                )
        out = self._spline()(np.clip(s, lo, hi))
        out = np.where(out_of, 0.0, out)
        return out[()] if out.ndim == 0 else out

    def l1_norm(self, weight=None) -> float:
        v = np.abs(self.values)
        if weight is not None:
            v = v * weight
        return float(np.trapezoid(v, self.t)) if hasattr(np, "trapezoid") else float(np.trapz(v, self.t))

    def to_rows(self):
        return [(float(a), float(np.real(b)), float(np.imag(b))) for a, b in zip(self.t, self.values)]


def _trapz(y, x, axis=-1):
    return np.trapezoid(y, x, axis=axis) if hasattr(np, "trapezoid") else np.trapz(y, x, axis=axis)


def _multiplier_on_reals(m, lam):
    if isinstance(m, MultiplierExpr):
        return m(lam)
    return np.asarray(m(lam), dtype=complex)


def lambda_extent(m, sp: SpaceParams, epsilon: float, floor: float = TRUNCATION) -> float:
    """Largest ``lam`` where ``|m| e^{-eps lam^2} |c|^-2`` exceeds ``floor`` times its peak."""
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    lam_hi = math.sqrt((-math.log(floor) + 0.5 * (sp.n - 1) * 20.0) / epsilon) + 10.0
    lam = np.concatenate([np.linspace(0.0, 1.0, 65)[1:], np.geomspace(1.0, lam_hi, 4000)[1:]])
    with np.errstate(all="ignore"):
        env = np.abs(_multiplier_on_reals(m, lam)) * np.exp(-epsilon * lam**2) * plancherel_density(lam, sp)
    if not np.all(np.isfinite(env)):
        raise DivergenceError("multiplier is not finite on the real line")
    peak = float(np.max(env))
    if peak == 0:
        return 0.0
    above = np.nonzero(env >= floor * peak)[0]
    return float(lam[min(above[-1] + 1, lam.size - 1)])


def _panels(a: float, b: float, width: float, order: int):
    count = max(1, int(math.ceil((b - a) / width)))
    edges = np.linspace(a, b, count + 1)
    x, w = np.polynomial.legendre.leggauss(order)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x).ravel()
    weights = (half[:, None] * w).ravel()
    return nodes, weights


def _chunked_sum(lam, weights, t, phi_fn, chunk=1024):
    total = np.zeros(t.size, dtype=complex)
    for s in range(0, lam.size, chunk):
        total += weights[s : s + chunk] @ phi_fn(lam[s : s + chunk], t)
    return total


def synthesize_kernel(
    m,
    sp: SpaceParams,
    epsilon: float = 1e-4,
    grid=None,
    tol: float = 1e-11,
    max_doublings: int = 3,
) -> RadialKernel:
    """Inverse spherical transform of ``e^{-eps lam^2} m`` on a symmetric grid.

    Gauss-Legendre panels on ``[0, Lambda]`` (the integrand is even in ``lam``),
    doubled until two successive results agree to ``tol`` relative to the peak.
    """
    t = default_grid() if grid is None else np.asarray(grid, dtype=float)
    half = t[t >= 0]
    mirror = t < 0
    ta = np.abs(t)
    lam_max = lambda_extent(m, sp, epsilon)
    if lam_max == 0:
        return RadialKernel(t, np.zeros(t.size), epsilon, meta={"lambda_max": 0.0})
    uniq, inv = np.unique(ta, return_inverse=True)
    width = min(1.0, math.pi / max(uniq[-1], 1.0))

    def evaluate(order):
        nodes, w = _panels(0.0, lam_max, width, order)
        amp = _multiplier_on_reals(m, nodes) * np.exp(-epsilon * nodes**2) * plancherel_density(nodes, sp)
        vals = _chunked_sum(nodes, 2.0 * w * amp, uniq, lambda l, tt: spherical_table(l, tt, sp))
        return vals[inv]

    order = 8
    prev = evaluate(order)
    for _ in range(max_doublings):
        order *= 2
        cur = evaluate(order)
        scale = float(np.max(np.abs(cur))) or 1.0
        err = float(np.max(np.abs(cur - prev))) / scale
        if err <= tol:
            break
        prev = cur
    else:
        raise QuadratureError(f"lambda quadrature did not converge (relative change {err:.3g})")
    values = cur
    if np.max(np.abs(values.imag)) <= 1e-13 * scale:
        values = values.real
    values = 0.5 * (values + values[::-1]) if np.allclose(t, -t[::-1]) else values
    return RadialKernel(t, values, epsilon, meta={"lambda_max": lam_max, "quadrature_error": err})


def forward_constant(sp: SpaceParams) -> float:
    return 2.0 ** (2 * sp.rho) / (4.0 * math.pi)


def spherical_transform(k: RadialKernel, lam, sp: SpaceParams) -> np.ndarray:
    """``C_fwd int_0^inf k(t) phi_lam(t) delta(t) dt``, by the trapezoid rule on the
    symmetric grid (half of the integral over ``[-T, T]``)."""
    lam = np.atleast_1d(np.asarray(lam, dtype=complex))
    ta = np.abs(k.t)
    uniq, inv = np.unique(ta, return_inverse=True)
    phi = spherical_table(lam, uniq, sp)[:, inv]
    integrand = phi * (k.values * delta_density(ta, sp))[None, :]
    return 0.5 * forward_constant(sp) * _trapz(integrand, k.t, axis=1)


def split_local_global(k: RadialKernel):
    """``(eta k, (1 - eta) k)``; the global part vanishes on ``[-2, 2]``."""
    eta = eta_cutoff(k.t)
    local = k.with_values(eta * k.values, part="local")
    glob = k.with_values(k.values - local.values, part="global")
    return local, glob


def kappa_q(k_glo: RadialKernel, q: float, sp: SpaceParams) -> RadialKernel:
    """``e^{2 rho t / q} K(t)`` on the signed grid (not even)."""
    if not 1 < q <= 2:
        raise ValueError("q must lie in (1, 2]")
    w = np.exp(2.0 * sp.rho * k_glo.t / q)
    return k_glo.with_values(w * k_glo.values, even=False, q=q)


def shifted_synthesis(
    m,
    sp: SpaceParams,
    q: float,
    epsilon: float = 1e-4,
    grid=None,
    derivative: bool = False,
    tol: float = 1e-11,
    max_terms: int = MAX_TERMS,
):
    """``kappa^q`` for ``t >= 2`` by integrating along ``Im lam = rho_q``.

    ``2 (1 - eta(t)) int e^{i lam t} (1 + omega(lam + i rho_q, t)) m~(lam + i rho_q) d lam``
    with ``m~ = c_check^{-1} e^{-eps z^2} m``. With ``derivative=True`` also returns
    the ``t``-derivative, using ``d/dt omega = sum -2 l G_l e^{-2lt}``.
    """
    t = np.asarray(grid if grid is not None else np.linspace(2.0, 8.0, 121), dtype=float)
    if np.any(t < 2):
        raise ValueError("the shifted representation is used for t >= 2")
    shift = rho_p(q, sp)
    fn = m if callable(m) and not isinstance(m, MultiplierExpr) else m.__call__
    lam_max = _shifted_extent(fn, sp, epsilon, shift)
    ell = np.arange(max_terms + 1)
    E = np.exp(-2.0 * np.outer(ell, t))
    dE = -2.0 * ell[:, None] * E

    def evaluate(order):
        nodes, w = _panels(-lam_max, lam_max, min(1.0, math.pi / max(t[-1], 1.0)), order)
        z = nodes + 1j * shift
        with np.errstate(all="ignore"):
            mt = fn(z) * np.exp(-epsilon * z * z) * c_check_inverse(z, sp)
        if not np.all(np.isfinite(mt)):
            raise DivergenceError("shifted multiplier is singular on the integration line")
        G = gamma_table(z, max_terms, sp)  # (L+1, N)
        phase = np.exp(1j * np.outer(nodes, t))
        series = G.T @ E
        val = (w * mt) @ (phase * series)
        if not derivative:
            return val, None
        dval = (w * mt) @ (phase * (1j * nodes[:, None] * series + G.T @ dE))
        return val, dval

    order = 8
    prev = evaluate(order)
    for _ in range(3):
        order *= 2
        cur = evaluate(order)
        scale = float(np.max(np.abs(cur[0]))) or 1.0
        if np.max(np.abs(cur[0] - prev[0])) <= tol * scale:
            break
        prev = cur
    else:
        raise QuadratureError("shifted quadrature did not converge")
    one_minus_eta = 1.0 - eta_cutoff(t)
    kq = 2.0 * one_minus_eta * cur[0]
    out = RadialKernel(t, kq, epsilon, even=False, meta={"q": q, "lambda_max": lam_max})
    if not derivative:
        return out
    dkq = 2.0 * (-eta_cutoff(t, 1) * cur[0] + one_minus_eta * cur[1])
    return out, RadialKernel(t, dkq, epsilon, even=False, meta={"q": q, "derivative": 1})


def _shifted_extent(fn, sp, epsilon, shift, floor=TRUNCATION):
    lam_hi = math.sqrt((-math.log(floor) + 0.5 * (sp.n - 1) * 20.0) / epsilon) + 10.0
    x = np.concatenate([np.linspace(0.0, 1.0, 65), np.geomspace(1.0, lam_hi, 4000)[1:]])
    x = np.concatenate([-x[::-1], x[1:]])
    z = x + 1j * shift
    with np.errstate(all="ignore"):
        env = np.abs(fn(z) * np.exp(-epsilon * z * z) * c_check_inverse(z, sp))
    if not np.all(np.isfinite(env)):
        raise DivergenceError("shifted multiplier is singular on the integration line")
    peak = float(np.max(env))
    if peak == 0:
        return 1.0
    # absolute integrability heuristic: the envelope must fall below floor*peak
    if env[0] > floor * peak or env[-1] > floor * peak:
        raise DivergenceError("shifted integrand does not decay within the search range")
    above = np.nonzero(env >= floor * peak)[0]
    return float(max(abs(x[above[0]]), abs(x[above[-1]]))) * 1.02 + 0.1
