"""Mikhlin-Hormander constants of multipliers on strips, by grid sweeps.

The sweep evaluates jets of order ``N`` on a grid of the closed strip
``|Im z| <= w`` restricted to ``Re z >= 0`` (multipliers are even), takes the
weighted supremum of ``|d^j m|`` and repeats on a doubled grid. A relative
drift above 10% or any non-finite jet marks the constant as divergent.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from ..jets import Jet, variable
from ..space import SpaceParams, rho_p
from .expr import MultiplierExpr

__all__ = [
    "GridSpec",
    "MHResult",
    "EvennessError",
    "BranchDiscontinuityWarning",
    "check_even",
    "mh_constant",
    "mh_outer_constant",
    "mikhlin_real_line",
    "DRIFT_TOL",
]

DRIFT_TOL = 0.10
_CHUNK = 1 << 15

JetFn = Callable[[Jet], Jet]


class EvennessError(ValueError):
    """The multiplier is not numerically even."""


class BranchDiscontinuityWarning(RuntimeWarning):
    pass


@dataclass(frozen=True)
class GridSpec:
    re_min: float = 1e-3
    re_max: float = 1e3
    per_decade: int = 256
    im_levels: int = 33

    def refined(self) -> "GridSpec":
        # halving re_min as well lets successive levels see poles that sit
        # closer to the imaginary axis than the coarse grid resolves
        return replace(
            self,
            re_min=self.re_min / 2,
            per_decade=2 * self.per_decade,
            im_levels=2 * self.im_levels - 1,
        )

    def re_axis(self, lo: float | None = None, hi: float | None = None, probe_zero=True):
        lo = self.re_min if lo is None else lo
        hi = self.re_max if hi is None else hi
        count = max(2, int(np.ceil(np.log10(hi / lo) * self.per_decade)) + 1)
        xs = np.geomspace(lo, hi, count)
        return np.concatenate([[0.0], xs]) if probe_zero else xs

    def im_axis(self, half_width: float):
        if half_width <= 0:
            return np.zeros(1)
        return np.linspace(-half_width, half_width, self.im_levels)

    def to_dict(self) -> dict:
        return {
            "re_min": self.re_min,
            "re_max": self.re_max,
            "per_decade": self.per_decade,
            "im_levels": self.im_levels,
        }


@dataclass(frozen=True)
class MHResult:
    value: float
    status: str
    levels: tuple
    j_max: int = 0
    argmax: complex = 0j
    notes: tuple = field(default=())

    @property
    def finite(self) -> bool:
        return self.status == "stable"

    def to_dict(self) -> dict:
        return {
            "value": self.value if np.isfinite(self.value) else None,
            "status": self.status,
            "levels": [v if np.isfinite(v) else None for v in self.levels],
            "j_max": self.j_max,
            "argmax": [self.argmax.real, self.argmax.imag],
            "notes": list(self.notes),
        }


def check_even(m: MultiplierExpr | JetFn, half_width: float, samples: int = 64, rtol=1e-8):
    """Compare ``m(z)`` with ``m(-z)`` on fixed pseudo-random strip points."""
    fn = _as_jet_fn(m)
    rng = np.random.default_rng(20240607)
    z = rng.uniform(-6, 6, samples) + 1j * rng.uniform(-1, 1, samples) * half_width
    z = np.concatenate([z, [0.37, 1.9, 0.5j * half_width + 0.2]])
    with np.errstate(all="ignore"):
        a = fn(variable(z, 0)).c[0]
        b = fn(variable(-z, 0)).c[0]
    ok = np.isfinite(a) & np.isfinite(b)
    err = np.abs(a - b)[ok]
    scale = np.maximum(1.0, np.abs(a[ok]))
    if err.size and np.any(err > rtol * scale):
        k = int(np.argmax(err / scale))
        raise EvennessError(
            f"m(z) != m(-z) at z = {z[ok][k]:.6g}: |difference| = {err[k]:.3g}"
        )


def _as_jet_fn(m) -> JetFn:
    if isinstance(m, MultiplierExpr):
        return lambda zj: m.jet(zj)
    return m


def _sweep(fn: JetFn, Z: np.ndarray, weight: np.ndarray, order: int):
    """Weighted supremum of ``|d^j m| * weight^j`` over the flat point set ``Z``."""
    best, jbest, zbest = -np.inf, 0, 0j
    bad = []
    fact = np.cumprod(np.r_[1.0, np.arange(1, order + 1)])
    for s in range(0, Z.size, _CHUNK):
        z = Z[s : s + _CHUNK]
        w = weight[s : s + _CHUNK]
        with np.errstate(all="ignore"):
            c = fn(variable(z, order)).c
            finite = np.all(np.isfinite(c), axis=0)
            if not np.all(finite):
                bad.extend(z[~finite][:4].tolist())
            powers = w[None, :] ** np.arange(order + 1)[:, None]
            powers[0] = 1.0
            terms = np.abs(c) * fact[:, None] * powers
        terms[:, ~finite] = -np.inf
        flat = int(np.argmax(terms))
        j, k = np.unravel_index(flat, terms.shape)
        if terms[j, k] > best:
            best, jbest, zbest = float(terms[j, k]), int(j), complex(z[k])
    return best, jbest, zbest, bad


def _branch_jumps(fn: JetFn, re: np.ndarray, im: np.ndarray) -> list:
    """Jump sampling along rows and columns; returns suspicious locations."""
    X, Y = np.meshgrid(re, im)
    Z = X + 1j * Y
    with np.errstate(all="ignore"):
        c = fn(variable(Z.ravel(), 2)).c.reshape((3,) + Z.shape)
    val, d1, d2 = c[0], np.abs(c[1]), 2 * np.abs(c[2])
    scale = np.nanmax(np.abs(val[np.isfinite(val)]), initial=1.0)
    found = []
    for axis in (0, 1):
        if Z.shape[axis] < 2:
            continue
        dz = np.abs(np.diff(Z, axis=axis))
        jump = np.abs(np.diff(val, axis=axis))
        slope = np.maximum(_pairmax(d1, axis), 0)
        curv = _pairmax(d2, axis)
        predicted = slope * dz + 0.5 * curv * dz**2
        with np.errstate(invalid="ignore"):
            sus = jump > 4 * predicted + 1e-9 * scale
        sus &= np.isfinite(jump)
        if np.any(sus):
            idx = np.argwhere(sus)[0]
            found.append(complex(Z[tuple(idx)]))
    return found


def _pairmax(a, axis):
    lo = np.take(a, np.arange(a.shape[axis] - 1), axis=axis)
    hi = np.take(a, np.arange(1, a.shape[axis]), axis=axis)
    return np.maximum(lo, hi)


def _stability(levels, tol=DRIFT_TOL):
    a, b = levels[-2], levels[-1]
    if not (np.isfinite(a) and np.isfinite(b)):
        return False
    return abs(b - a) <= tol * max(abs(a), abs(b), 1e-300)


def _run(fn, points_for, order, grid, n_levels, extra_notes=()):
    levels, notes = [], list(extra_notes)
    j_max, argmax = 0, 0j
    g = grid
    for level in range(n_levels):
        Z, W = points_for(g)
        value, j_max, argmax, bad = _sweep(fn, Z, W, order)
        if bad:
            notes.append(
                "singular jet at "
                + ", ".join(f"{b.real:.6g}{b.imag:+.6g}i" for b in bad[:3])
                + f" (grid level {level})"
            )
            levels.append(float("inf"))
            return MHResult(float("inf"), "divergent", tuple(levels), j_max, argmax, tuple(notes))
        levels.append(value)
        g = g.refined()
    if _stability(levels):
        return MHResult(levels[-1], "stable", tuple(levels), j_max, argmax, tuple(notes))
    notes.append(f"drift above {DRIFT_TOL:.0%} under grid doubling")
    return MHResult(float("inf"), "divergent", tuple(levels), j_max, argmax, tuple(notes))


def _check_order(order, sp):
    if order < 0:
        raise ValueError("N must be nonnegative")
    if order <= (sp.n + 3) / 2:
        warnings.warn(
            f"N = {order} does not exceed (n+3)/2 = {(sp.n + 3) / 2} for this space",
            stacklevel=3,
        )


def mh_constant(
    m: MultiplierExpr | JetFn,
    sp: SpaceParams,
    q: float,
    N: int = 8,
    grid: GridSpec | None = None,
    n_levels: int = 2,
) -> MHResult:
    """Corner-weighted Mikhlin constant of ``m`` on the strip of half-width ``rho_q``.

    ``sup max_j |d^j m(z)| * min(|z - i rho_q|, |z + i rho_q|)^j``.
    """
    grid = grid or GridSpec()
    _check_order(N, sp)
    w = rho_p(q, sp)
    fn = _as_jet_fn(m)
    check_even(fn, w)

    def points(g):
        X, Y = np.meshgrid(g.re_axis(), g.im_axis(w))
        Z = (X + 1j * Y).ravel()
        return Z, np.minimum(np.abs(Z - 1j * w), np.abs(Z + 1j * w))

    notes = _branch_notes(fn, grid.re_axis(hi=min(grid.re_max, 50.0)), grid.im_axis(w))
    return _run(fn, points, N, grid, n_levels, notes)


def mh_outer_constant(
    m: MultiplierExpr | JetFn,
    sp: SpaceParams,
    p: float,
    N: int = 8,
    grid: GridSpec | None = None,
    n_levels: int = 2,
) -> MHResult:
    """Mikhlin constant with weight ``|z|^j`` on ``{|Re z| > 1}`` inside the strip of ``p``."""
    grid = grid or GridSpec()
    _check_order(N, sp)
    w = rho_p(p, sp)
    fn = _as_jet_fn(m)
    check_even(fn, w)

    notes = ["inner region unchecked"]
    X, Y = np.meshgrid(np.linspace(0, 1, 129), grid.im_axis(w))
    with np.errstate(all="ignore"):
        inner = fn(variable((X + 1j * Y).ravel(), 0)).c[0]
    if not np.all(np.isfinite(inner)):
        notes.append("singularities present in the excluded region |Re z| <= 1")

    def points(g):
        X, Y = np.meshgrid(g.re_axis(lo=1.0, probe_zero=False), g.im_axis(w))
        Z = (X + 1j * Y).ravel()
        return Z, np.abs(Z)

    notes += _branch_notes(fn, grid.re_axis(lo=1.0, hi=min(grid.re_max, 50.0), probe_zero=False),
                           grid.im_axis(w))
    return _run(fn, points, N, grid, n_levels, notes)


def _branch_notes(fn, re, im):
    jumps = _branch_jumps(fn, re, im)
    if not jumps:
        return []
    msg = f"possible branch discontinuity near {jumps[0]:.4g}"
    warnings.warn(msg, BranchDiscontinuityWarning, stacklevel=3)
    return [msg]


def mikhlin_real_line(
    fn: JetFn,
    N: int = 8,
    grid: GridSpec | None = None,
    n_levels: int = 2,
) -> MHResult:
    """``sup_{lambda real} max_j |lambda|^j |d^j g(lambda)|`` for a not necessarily even ``g``."""
    grid = grid or GridSpec()

    def points(g):
        r = g.re_axis()
        Z = np.concatenate([-r[::-1], r[1:]]).astype(complex)
        return Z, np.abs(Z)

    return _run(fn, points, N, grid, n_levels)
