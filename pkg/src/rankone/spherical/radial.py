"""Evaluation of the spherical function ``phi_lambda(t)``.

Three evaluators, dispatched by region:

``series``   two-term Harish-Chandra expansion, for ``t`` at or beyond the crossover;
``hyp``      the Jacobi-function hypergeometric series
             ``2F1((rho+i lam)/2, (rho-i lam)/2; n/2; -sinh(t)^2)``, near the origin
             while ``|lam| sinh t`` is moderate;
``ode``      the radial equation integrated from a Taylor start near ``t = 0``.

The ODE is the fallback everywhere else and serves as an independent oracle.
"""
from __future__ import annotations

import numpy as np
from scipy.integrate import solve_ivp

from ..space import DomainError, SpaceParams
from .expansion import MAX_TERMS, hc_series

__all__ = [
    "CrossoverMismatchError",
    "spherical_function",
    "spherical_table",
    "phi_hypergeometric",
    "phi_ode",
    "phi_taylor",
    "crossover_discrepancy",
    "radial_operator_coefficient",
]

CROSSOVER = 0.5
HYP_LIMIT = 8.0  # largest |lam| sinh t handled by the hypergeometric series
SMALL_LAMBDA = 1e-3
ODE_RTOL = 1e-11
ODE_ATOL = 1e-30


class CrossoverMismatchError(ArithmeticError):
    pass


def radial_operator_coefficient(t, sp: SpaceParams):
    """First-order coefficient ``m_a coth t + 2 m_2a coth 2t`` of the radial Laplacian."""
    return sp.m_alpha / np.tanh(t) + 2.0 * sp.m_2alpha / np.tanh(2.0 * t)


def phi_taylor(lam, t, sp: SpaceParams):
    """``1 + a t^2 + b t^4`` (value and derivative); accurate for ``|lam| t << 1``."""
    lam = np.asarray(lam, dtype=complex)
    mu = lam * lam + sp.rho**2
    a = -mu / (2.0 * sp.n)
    a1 = sp.m_alpha / 3.0 + 4.0 * sp.m_2alpha / 3.0
    b = -a * (2.0 * a1 + mu) / (4.0 * (sp.n + 2))
    return 1 + a * t**2 + b * t**4, 2 * a * t + 4 * b * t**3


def phi_hypergeometric(lam, t, sp: SpaceParams, max_terms: int = 2000):
    """Outer grid ``(lam, t)`` of the hypergeometric series; needs ``sinh(t)^2 < 1``."""
    lam = np.atleast_1d(np.asarray(lam, dtype=complex))[:, None]
    t = np.atleast_1d(np.asarray(t, dtype=float))[None, :]
    z = -np.sinh(t) ** 2
    if np.any(-z >= 1):
        raise DomainError("hypergeometric series needs sinh(t) < 1")
    a = 0.5 * (sp.rho + 1j * lam)
    b = 0.5 * (sp.rho - 1j * lam)
    c = 0.5 * sp.n
    term = np.ones(np.broadcast_shapes(lam.shape, t.shape), dtype=complex)
    total = term.copy()
    for k in range(max_terms):
        term = term * ((a + k) * (b + k) / ((c + k) * (k + 1.0))) * z
        total += term
        if k > 4 and np.all(np.abs(term) <= 1e-17 * np.maximum(np.abs(total), 1e-300)):
            break
    return total


def _ode_rhs_factory(lam, sp):
    mu = lam * lam + sp.rho**2
    n = lam.size

    def rhs(t, y):
        phi, dphi = y[:n], y[n:]
        return np.concatenate([dphi, -radial_operator_coefficient(t, sp) * dphi - mu * phi])

    return rhs


def phi_ode(lam, t, sp: SpaceParams, rtol: float = ODE_RTOL, atol: float = ODE_ATOL):
    """Outer grid ``(lam, t)`` by integrating the radial equation (DOP853)."""
    lam = np.atleast_1d(np.asarray(lam, dtype=complex))
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(t < 0):
        raise DomainError("t must be nonnegative")
    mu_max = float(np.max(np.abs(lam * lam + sp.rho**2))) if lam.size else 1.0
    t0 = min(1e-3, 0.02 / np.sqrt(max(mu_max, 1e-300)))
    out = np.empty((lam.size, t.size), dtype=complex)
    early = t <= t0
    if np.any(early):
        out[:, early] = phi_taylor(lam[:, None], t[None, early], sp)[0]
    late = ~early
    if np.any(late):
        ts = np.unique(t[late])
        y0, dy0 = phi_taylor(lam, t0, sp)
        sol = solve_ivp(
            _ode_rhs_factory(lam, sp),
            (t0, float(ts[-1])),
            np.concatenate([y0, dy0]).astype(complex),
            method="DOP853",
            t_eval=ts,
            rtol=rtol,
            atol=atol,
        )
        if not sol.success:
            raise ArithmeticError(f"radial ODE integration failed: {sol.message}")
        idx = np.searchsorted(ts, t[late])
        out[:, late] = sol.y[: lam.size][:, idx]
    return out


def _irregular(lam, sp):
    """Points where the two-term expansion is numerically unusable."""
    bad = np.abs(lam) < SMALL_LAMBDA
    for l in range(1, int(np.floor(sp.rho)) + 2):
        bad |= np.abs(lam - 1j * l) < SMALL_LAMBDA
        bad |= np.abs(lam + 1j * l) < SMALL_LAMBDA
    return bad


def spherical_table(
    lam,
    t,
    sp: SpaceParams,
    method: str = "auto",
    crossover: float = CROSSOVER,
    max_terms: int = MAX_TERMS,
):
    """``phi_lam(t)`` on the outer grid of 1-d arrays ``lam`` and ``t``."""
    lam = np.atleast_1d(np.asarray(lam, dtype=complex)).ravel()
    t = np.atleast_1d(np.asarray(t, dtype=float)).ravel()
    if np.any(t < 0):
        raise DomainError("spherical functions are evaluated at t >= 0; use |t|")
    if method == "ode":
        return phi_ode(lam, t, sp)
    if method == "series":
        return hc_series(lam, t, sp, max_terms)
    if method == "hyp":
        return phi_hypergeometric(lam, t, sp)
    if method != "auto":
        raise ValueError(f"unknown method {method!r}")

    out = np.full((lam.size, t.size), np.nan + 0j)
    far = t >= crossover
    irregular = _irregular(lam, sp)
    regular = ~irregular
    if np.any(far) and np.any(regular):
        out[np.ix_(regular, far)] = hc_series(lam[regular], t[far], sp, max_terms)

    near = ~far
    hyp_ok = (np.abs(lam)[:, None] * np.sinh(t)[None, :] <= HYP_LIMIT) & near[None, :]
    hyp_ok &= (np.sinh(t) ** 2 <= 0.5)[None, :]
    rows = np.any(hyp_ok, axis=1)
    if np.any(rows):
        cols = np.any(hyp_ok, axis=0)
        block = phi_hypergeometric(lam[rows], t[cols], sp)
        sub = out[np.ix_(rows, cols)]
        mask = hyp_ok[np.ix_(rows, cols)]
        sub[mask] = block[mask]
        out[np.ix_(rows, cols)] = sub

    todo = np.isnan(out.real)
    rows = np.any(todo, axis=1)
    if np.any(rows):
        cols = np.any(todo, axis=0)
        block = phi_ode(lam[rows], t[cols], sp)
        sub = out[np.ix_(rows, cols)]
        mask = todo[np.ix_(rows, cols)]
        sub[mask] = block[mask]
        out[np.ix_(rows, cols)] = sub
    return out


def spherical_function(lam, t, sp: SpaceParams, method: str = "auto", **kw):
    """``phi_lam(t)`` with numpy broadcasting between ``lam`` and ``t``; ``phi_lam(0) = 1``."""
    lam_b, t_b = np.broadcast_arrays(np.asarray(lam, dtype=complex), np.asarray(t, dtype=float))
    ul, li = np.unique(lam_b.ravel(), return_inverse=True)
    ut, ti = np.unique(t_b.ravel(), return_inverse=True)
    table = spherical_table(ul, ut, sp, method=method, **kw)
    out = table[li, ti].reshape(lam_b.shape)
    return out[()] if out.ndim == 0 else out


def crossover_discrepancy(lam, sp: SpaceParams, t: float = CROSSOVER, tol: float | None = None):
    """Largest ``|series - ode|`` at ``t`` over ``lam``, relative to ``max(|phi|, e^{-rho t})``.

    Raises :class:`CrossoverMismatchError` when ``tol`` is given and exceeded.
    """
    lam = np.atleast_1d(np.asarray(lam, dtype=complex))
    lam = lam[~_irregular(lam, sp)]
    s = hc_series(lam, [t], sp)[:, 0]
    o = phi_ode(lam, [t], sp)[:, 0]
    scale = np.maximum(np.abs(o), np.exp(-sp.rho * t) / np.maximum(1.0, np.abs(lam)))
    worst = float(np.max(np.abs(s - o) / scale)) if lam.size else 0.0
    if tol is not None and worst > tol:
        raise CrossoverMismatchError(f"series and ODE differ by {worst:.3g} at t = {t}")
    return worst
