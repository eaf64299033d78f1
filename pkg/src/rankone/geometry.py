"""Cartan and Iwasawa coordinates on a rank-one group.

Elements ``v`` of ``Nbar`` enter only through the norms ``|X|`` and ``|Y|`` of
their ``g_{-alpha}`` and ``g_{-2alpha}`` coordinates. The Haar measure of
``Nbar`` is Lebesgue measure on ``(X, Y)`` in the exponential chart (the
group-dependent constant in the Iwasawa integration formula is set to 1).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .space import DomainError, SpaceParams

__all__ = [
    "NbarPoint",
    "IDENTITY",
    "CtoIReport",
    "NonConvergenceError",
    "phi_map",
    "phi_defect",
    "iwasawa_exponent",
    "cartan_exponent",
    "p_function",
    "ctoi_report",
    "ctoi_slacks",
    "decom_iwas_slack",
    "sphere_area",
    "nbar_quadrature",
    "NbarGrid",
    "fuzz_ctoi",
]


class NonConvergenceError(ArithmeticError):
    """Adaptive quadrature could not reach the requested tolerance."""


@dataclass(frozen=True)
class NbarPoint:
    x_norm: float
    y_norm: float = 0.0

    def __post_init__(self):
        if self.x_norm < 0 or self.y_norm < 0:
            raise DomainError("Nbar coordinates are norms and must be nonnegative")

    def check(self, sp: SpaceParams) -> "NbarPoint":
        if sp.m_2alpha == 0 and self.y_norm != 0:
            raise DomainError("y_norm must vanish when 2*alpha is not a root")
        return self


IDENTITY = NbarPoint(0.0, 0.0)


@dataclass(frozen=True)
class CtoIReport:
    """Signed slacks of the four Cartan-to-Iwasawa inequalities.

    Slacks are scaled by ``max(1, b^alpha)`` so that rounding in large
    exponentials does not masquerade as a violation. ``None`` marks an item
    whose hypothesis fails at this sample.
    """

    b_exp: float
    ta_exp: float
    slack_1: float
    slack_2: float
    slack_3: float | None
    slack_4: float | None


def phi_map(x):
    """Inverse of ``y -> y + 1/y`` on ``[1, inf)``."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 2):
        raise DomainError("phi_map needs x >= 2")
    out = 0.5 * (x + np.sqrt((x - 2.0) * (x + 2.0)))
    return out[()] if out.ndim == 0 else out


def phi_defect(x):
    """``x - phi_map(x)`` without cancellation."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 2):
        raise DomainError("phi_defect needs x >= 2")
    out = 2.0 / (x + np.sqrt((x - 2.0) * (x + 2.0)))
    return out[()] if out.ndim == 0 else out


def _norms(v, sp):
    if isinstance(v, NbarPoint):
        v.check(sp)
        return float(v.x_norm), float(v.y_norm)
    x, y = v
    return np.asarray(x, dtype=float), np.asarray(y, dtype=float)


def _exp2h_minus_one(x2, y2, c):
    # exp(2 alpha H(v)) - 1, kept exact for small |X|, |Y|
    return 2 * c * x2 + (c * x2) ** 2 + 4 * c * y2


def iwasawa_exponent(v, sp: SpaceParams):
    """``alpha(H(v)) = 1/2 log[(1 + c|X|^2)^2 + 4c|Y|^2]``.

    ``v`` is an :class:`NbarPoint` or a pair of arrays ``(|X|, |Y|)``.
    """
    x, y = _norms(v, sp)
    c = sp.c_nbar
    base = np.log1p(c * x * x)
    return base + 0.5 * np.log1p(4 * c * y * y * np.exp(-2 * base))


def _bracket_minus_one(t, x, y, c):
    # [(b + 1/b)/2]^2 - 1 = sinh(t)^2 + e^{2t}/4 (e^{2 alpha H} - 1) + c|X|^2/2
    x2 = x * x
    return np.sinh(t) ** 2 + 0.25 * np.exp(2 * t) * _exp2h_minus_one(x2, y * y, c) + 0.5 * c * x2


def cartan_exponent(t, v, sp: SpaceParams):
    """``alpha(log [v a]_+)`` for ``a = exp(t H_0)``.

    With ``B = [(b + 1/b)/2]^2`` the bracket, ``b = phi_map(2 sqrt B)``; this
    is evaluated as ``asinh(sqrt(B - 1))``, the same number without the
    cancellation in ``sqrt(x^2 - 4)`` near ``x = 2``.
    """
    x, y = _norms(v, sp)
    bm1 = _bracket_minus_one(np.asarray(t, dtype=float), x, y, sp.c_nbar)
    if np.any(bm1 < -1e-12):
        raise ArithmeticError("Cartan bracket below 1; coordinate formula violated")
    out = np.arcsinh(np.sqrt(np.maximum(bm1, 0.0)))
    return out[()] if np.ndim(out) == 0 else out


def p_function(v, sp: SpaceParams):
    """``P(v) = exp(-|rho| alpha(H(v)))``."""
    return np.exp(-sp.rho * iwasawa_exponent(v, sp))


def ctoi_slacks(t, x, y, sp: SpaceParams):
    """Vectorized slacks of the four items; NaN where an item does not apply.

    Returns ``(b_exp, ta_exp, s1, s2, s3, s4)`` as arrays.
    """
    t = np.asarray(t, dtype=float)
    h = iwasawa_exponent((x, y), sp)
    b_exp = cartan_exponent(t, (x, y), sp)
    ta_exp = t + h
    b = np.exp(b_exp)
    ta = np.exp(ta_exp)
    am = np.exp(-t)
    scale = np.maximum(1.0, b)

    s1 = (b - phi_map(np.maximum(np.maximum(am, ta), 2.0))) / scale
    s2 = (phi_map(np.maximum(am + ta, 2.0)) - b) / scale

    with np.errstate(over="ignore", invalid="ignore"):
        lo3 = ta * (1 - 2 * np.exp(-2 * ta_exp))
        hi3 = ta * (1 + np.exp(-t - ta_exp))
        s3 = np.minimum(b - lo3, hi3 - b) / scale
        s3 = np.where(ta >= 2, s3, np.nan)

        lo4 = am * (1 - 2 * np.exp(2 * t))
        hi4 = am * (1 + np.exp(t + ta_exp))
        s4 = np.minimum(b - lo4, hi4 - b) / scale
        s4 = np.where(am >= 2, s4, np.nan)
    return b_exp, ta_exp, s1, s2, s3, s4


def ctoi_report(t: float, v: NbarPoint, sp: SpaceParams) -> CtoIReport:
    v.check(sp)
    b_exp, ta_exp, s1, s2, s3, s4 = (float(a) for a in ctoi_slacks(t, v.x_norm, v.y_norm, sp))
    return CtoIReport(
        b_exp=b_exp,
        ta_exp=ta_exp,
        slack_1=s1,
        slack_2=s2,
        slack_3=None if math.isnan(s3) else s3,
        slack_4=None if math.isnan(s4) else s4,
    )


def decom_iwas_slack(t, x, y, sp: SpaceParams):
    """Slacks of ``0 <= E(v,a) <= 2 e^{-2t}`` for ``t >= 0``.

    ``E = alpha(log [va]_+) - t - alpha(H(v))``. Returns ``(E, lower, upper)``.
    """
    t = np.asarray(t, dtype=float)
    e = cartan_exponent(t, (x, y), sp) - t - iwasawa_exponent((x, y), sp)
    return e, e, 2 * np.exp(-2 * t) - e


def fuzz_ctoi(sp: SpaceParams, n_samples: int, rng: np.random.Generator,
              t_range=(-8.0, 8.0), norm_max=10.0) -> dict:
    """Worst slacks of the Cartan-to-Iwasawa inequalities and of ``E(v,a)`` bounds."""
    t = rng.uniform(*t_range, n_samples)
    x = rng.uniform(0.0, norm_max, n_samples)
    y = rng.uniform(0.0, norm_max, n_samples) if sp.m_2alpha else np.zeros(n_samples)
    _, _, s1, s2, s3, s4 = ctoi_slacks(t, x, y, sp)
    pos = t >= 0
    _, elo, ehi = decom_iwas_slack(t[pos], x[pos], y[pos], sp)

    def worst(s):
        s = s[~np.isnan(s)]
        return (float(s.min()) if s.size else math.nan), int(s.size)

    out = {}
    for name, s in (("item1", s1), ("item2", s2), ("item3", s3), ("item4", s4),
                    ("decom_lower", elo), ("decom_upper", ehi)):
        out[name] = worst(s)
    return out


def sphere_area(k: int) -> float:
    """Area of the unit sphere in ``R^k`` (``k = 1`` gives 2 points)."""
    return 2.0 * math.pi ** (k / 2.0) / math.gamma(k / 2.0)


def _radial_weight(r, k):
    return sphere_area(k) * r ** (k - 1)


def _log_radial_integral(g, tol, lower=-40.0, max_upper=160.0):
    """``int_0^inf g(r) dr`` via ``r = e^u``.

    The upper limit grows until the integrand is negligible or its tail is
    cleanly exponential in ``u`` (algebraic in ``r``), in which case the tail
    is added in closed form. Two consecutive extrapolated totals must agree.
    """
    def h(u):
        r = math.exp(u)
        return g(r) * r

    opts = dict(epsabs=0.0, epsrel=tol * 0.1, limit=200)
    total, _ = integrate.quad(h, lower, 0.0, **opts)
    upper, width, previous = 0.0, 8.0, None
    while upper < max_upper:
        width = min(width, max_upper - upper)
        total += integrate.quad(h, upper, upper + width, **opts)[0]
        upper += width
        width *= 2
        h_end, h_mid = h(upper), h(upper - 1.0)
        if not (math.isfinite(total) and math.isfinite(h_end)):
            break
        if h_end == 0.0:
            return total
        tail = math.nan
        if h_mid != 0.0 and h_end / h_mid > 0:
            beta = math.log(h_mid / h_end)
            if beta > 1e-3:
                tail = h_end / beta
        estimate = total + tail
        if math.isfinite(estimate) and previous is not None and abs(estimate - previous) <= tol * abs(estimate):
            return estimate
        previous = estimate
    raise NonConvergenceError(
        f"Nbar integral did not converge up to log-radius {upper:.0f} (partial value {total:.6g})"
    )


def nbar_quadrature(f, sp: SpaceParams, tol: float = 1e-8) -> float:
    """Integral of a radial integrand ``f(|X|, |Y|)`` over ``Nbar``.

    The measure reduces to ``sigma_{m_a} |X|^{m_a-1} sigma_{m_2a} |Y|^{m_2a-1} d|X| d|Y|``.
    Raises :class:`NonConvergenceError` if the integrand lacks decay.
    """
    ka, k2 = sp.m_alpha, sp.m_2alpha
    if k2 == 0:
        return _log_radial_integral(lambda r: f(r, 0.0) * _radial_weight(r, ka), tol)

    c = sp.c_nbar

    def inner(rx):
        # |Y| scales like 1 + c|X|^2 in every in-scope integrand
        sc = 1.0 + c * rx * rx
        return sc * _log_radial_integral(lambda ry: f(rx, sc * ry) * _radial_weight(sc * ry, k2), tol * 0.1)

    return _log_radial_integral(lambda rx: inner(rx) * _radial_weight(rx, ka), tol)


@dataclass(frozen=True)
class NbarGrid:
    """Tensor trapezoid grid over ``Nbar`` in log-radial coordinates.

    ``nodes()`` returns ``(|X|, |Y|, weight)`` arrays with the Haar weights
    folded in, so that ``sum(f(x, y) * w)`` approximates ``int f dv``.
    """

    sp: SpaceParams
    n_per_unit: int = 8
    u_min: float = -14.0
    u_max: float = 14.0

    def refined(self) -> "NbarGrid":
        return NbarGrid(self.sp, 2 * self.n_per_unit, self.u_min, self.u_max)

    def _axis(self, k):
        n = int(round((self.u_max - self.u_min) * self.n_per_unit)) + 1
        u = np.linspace(self.u_min, self.u_max, n)
        du = u[1] - u[0]
        r = np.exp(u)
        w = np.full(n, du)
        w[0] = w[-1] = du / 2
        return r, w * r * _radial_weight(r, k)

    def nodes(self):
        rx, wx = self._axis(self.sp.m_alpha)
        if self.sp.m_2alpha == 0:
            return rx, np.zeros_like(rx), wx
        k2 = self.sp.m_2alpha
        ry, wy = self._axis(k2)
        # |Y| is measured in units of 1 + c|X|^2, where the integrands turn over
        sc = 1.0 + self.sp.c_nbar * rx * rx
        X = np.repeat(rx, ry.size)
        Y = np.outer(sc, ry).ravel()
        W = np.outer(wx * sc**k2, wy).ravel()
        return X, Y, W
