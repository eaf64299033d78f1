"""End-to-end certificate: every bounding quantity for one multiplier.

Each quantity is evaluated on a sequence of grids, each twice as fine as the
previous one. A quantity is ``stable`` when every successive relative change
stays below the drift tolerance and ``divergent`` otherwise; quantities that
cannot be evaluated because a hypothesis gate failed are ``not-applicable``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..geometry import NbarGrid
from ..jets import Jet
from ..kernels import (
    approximating_kernels,
    default_grid,
    eta_ledger,
    kappa_q,
    psi_ledger,
    shifted_synthesis,
    split_local_global,
    splitting_kernels,
    synthesize_kernel,
    varphi_norm,
)
from ..multiplier import GridSpec, MultiplierExpr, check_even, mh_constant, mh_outer_constant, mikhlin_real_line
from ..multiplier.mikhlin import EvennessError
from ..space import SpaceParams, delta_density, dual_exponent, rho_p
from ..spherical import c_check_inverse_jet, gamma_mikhlin_fit, hcest_suprema, omega_derivative_suprema
from .line import cv2_argmax, cvp_lower, cvp_upper, lip_norm
from .transference import line_grid, transference_bound

__all__ = [
    "CertificateConfig",
    "Quantity",
    "Gate",
    "CertificateReport",
    "theorem_certificate",
    "VARIANTS",
    "STABLE",
    "DIVERGENT",
    "NOT_APPLICABLE",
    "DESCRIPTIONS",
]

VARIANTS = ("main", "main_i")
STABLE, DIVERGENT, NOT_APPLICABLE = "stable", "divergent", "not-applicable"


@dataclass(frozen=True)
class CertificateConfig:
    epsilon: float = 1e-4
    kernel_t_max: float = 16.0
    kernel_points: int = 4096
    levels: int = 3
    drift: float = 0.10
    mh_order: int = 8
    mh_grid: GridSpec = GridSpec()
    nbar_per_unit: int = 4
    nbar_u_min: float = -14.0
    nbar_u_max: float = 14.0
    line_step: float = 1.0 / 16
    mc_tests: int = 200
    transference_mc_tests: int = 0
    gamma_terms: int = 30


@dataclass(frozen=True)
class Quantity:
    value: float | None
    flag: str
    levels: tuple = ()
    note: str = ""
    proxy: bool = False

    def to_dict(self) -> dict:
        return {
            "value": _num(self.value),
            "flag": self.flag,
            "levels": [_num(v) for v in self.levels],
            "note": self.note,
            "proxy": self.proxy,
        }


@dataclass(frozen=True)
class Gate:
    passed: bool
    detail: str = ""

    def to_dict(self) -> dict:
        return {"passed": self.passed, "detail": self.detail}


def _num(v):
    if v is None:
        return None
    v = float(v)
    return v if math.isfinite(v) else None


@dataclass
class CertificateReport:
    space: dict
    p: float
    q: float
    variant: str
    multiplier: str
    seed: int
    gates: dict = field(default_factory=dict)
    quantities: dict = field(default_factory=dict)

    @property
    def gates_passed(self) -> bool:
        return all(g.passed for g in self.gates.values())

    @property
    def verdict(self) -> str:
        if not self.quantities and self.gates_passed:
            return NOT_APPLICABLE
        if not self.gates_passed or any(q.flag == DIVERGENT for q in self.quantities.values()):
            return "fail"
        return STABLE

    def to_dict(self) -> dict:
        return {
            "space": self.space,
            "p": self.p,
            "q": self.q,
            "variant": self.variant,
            "multiplier": self.multiplier,
            "seed": self.seed,
            "gates": {k: self.gates[k].to_dict() for k in sorted(self.gates)},
            "quantities": {k: self.quantities[k].to_dict() for k in sorted(self.quantities)},
            "verdict": self.verdict,
        }


def _drifts(levels):
    out = []
    for a, b in zip(levels, levels[1:]):
        big = max(abs(a), abs(b))
        out.append(0.0 if big < 1e-300 else abs(b - a) / big)
    return out


def _from_levels(levels, tol, note="", proxy=False) -> Quantity:
    levels = tuple(float(v) for v in levels)
    if not all(math.isfinite(v) for v in levels):
        return Quantity(None, DIVERGENT, levels, note or "non-finite value", proxy)
    drifts = _drifts(levels)
    if any(d >= tol for d in drifts):
        worst = max(drifts)
        return Quantity(levels[-1], DIVERGENT, levels, (note + "; " if note else "") + f"drift {worst:.3g}", proxy)
    return Quantity(levels[-1], STABLE, levels, note, proxy)


def _from_mh(res) -> Quantity:
    return Quantity(res.value if res.finite else None, STABLE if res.finite else DIVERGENT, res.levels,
                    "; ".join(res.notes))


def _na(reason) -> Quantity:
    return Quantity(None, NOT_APPLICABLE, (), reason)


def _omega_jet(z: Jet, sp: SpaceParams) -> Jet:
    return (z * z + 4.0 * sp.rho**2).cpow((sp.n - 1) / 4.0)


def _strip_probe(m: MultiplierExpr, width: float, grid: GridSpec):
    """Non-finite values of ``m`` on the open strip ``|Im z| < width`` (``Re z >= 0``)."""
    im = grid.im_axis(width)
    if width > 0:
        im = im[1:-1]
    X, Y = np.meshgrid(grid.re_axis(), im)
    Z = (X + 1j * Y).ravel()
    with np.errstate(all="ignore"):
        vals = m(Z)
    bad = Z[~np.isfinite(vals)]
    return bad


DESCRIPTIONS = {
    "mh_constant": "corner-weighted Mikhlin constant of m on the strip of q",
    "mh_outer_constant": "Mikhlin constant of m for |Re z| >= 1 on the strip of p",
    "ocm_factor_mikhlin": "real-line Mikhlin constant of c-check^-1 / omega shifted by i rho_p",
    "multiplier_proxy_mikhlin": "real-line Mikhlin constant of the shifted multiplier",
    "multiplier_proxy_cv2": "sup of the shifted multiplier, the exact Cv_2 norm of its inverse transform",
    "mtilde_shift_mikhlin": "real-line Mikhlin constant of c-check^-1 m shifted by i rho_p",
    "hcest_sup": "weighted sup of derivatives of c-check^-1",
    "omega_derivative_sup": "weighted sup of lambda-derivatives of the expansion remainder",
    "gamma_fit_C": "constant C in the fitted envelope of Gamma_l Mikhlin norms",
    "gamma_fit_d": "exponent d in the fitted envelope of Gamma_l Mikhlin norms",
    "eta_ledger_C": "constant C with ||eta_l|| + ||D^2 eta_l|| <= C e^-l",
    "psi_v_slope": "slope of ||psi_v|| + ||D^2 psi_v|| against alpha(H(v))",
    "varphi_norm": "||varphi|| + ||D^2 varphi|| for the left cutoff weight",
    "local_kernel_l1": "L1 norm of the local kernel against the radial density",
    "kappa_p_cvp_upper": "interpolation upper bound of the Cv_p norm of kappa^p",
    "kappa_p_cvp_lower": "Monte Carlo lower bound of the Cv_p norm of kappa^p",
    "kappa_p_decomposition_bound": "bound on kappa^p summed over the Gamma_l decomposition",
    "kappa_q_lip": "Lipschitz norm of kappa^q from difference quotients",
    "kappa_q_sup_derivative": "sup of |D kappa^q| for |t| >= 2 from the shifted synthesis",
    "difference_integral_1": "weighted double integral of |K1 - approximant|",
    "difference_integral_2": "weighted double integral of |K2 - approximant|",
    "transference_tK1_integral": "weighted double integral of the first approximant",
    "transference_tK2_integral": "weighted double integral of the second approximant",
    "transference_tK1_per_v": "integral over Nbar of Cv_p upper bounds, first approximant",
    "transference_tK2_per_v": "integral over Nbar of Cv_p upper bounds, second approximant",
}


def theorem_certificate(
    sp: SpaceParams,
    p: float,
    q: float | None,
    m: MultiplierExpr,
    variant: str = "main",
    cfg: CertificateConfig | None = None,
    seed: int = 0,
) -> CertificateReport:
    cfg = cfg or CertificateConfig()
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}")
    q = p if (variant == "main_i" or q is None) else q
    label = m.source or m.to_source()
    if m.params:
        label += " with " + ", ".join(f"{k} = {v:g}" for k, v in sorted(m.param_dict.items()))
    rep = CertificateReport(sp.to_config(), float(p), float(q), variant, label, int(seed))
    G, Q = rep.gates, rep.quantities

    # hypothesis gates
    G["exponent_range"] = Gate(1 < p < 2, f"p = {p} must lie in (1, 2); p' cases follow by duality")
    if not G["exponent_range"].passed:
        return rep
    pp = dual_exponent(p)
    if variant == "main":
        G["q_range"] = Gate(p - 1e-12 <= q <= pp + 1e-12, f"q = {q} must lie in [p, p'] = [{p}, {pp:.6g}]")
        gap = sp.rho * abs(1 / p - 1 / q)
        G["q_gap"] = Gate(gap < 1, f"|rho| |1/p - 1/q| = {gap:.6g} must be < 1")
    width = rho_p(p, sp)
    try:
        check_even(m, width)
        G["evenness"] = Gate(True, "m(z) = m(-z) on sampled strip points")
    except EvennessError as exc:
        G["evenness"] = Gate(False, str(exc))
    bad = _strip_probe(m, width, cfg.mh_grid)
    G["strip_analytic"] = Gate(
        bad.size == 0,
        "no singular values on the open strip probe" if bad.size == 0
        else f"{bad.size} singular probe points, first at {bad[0]:.6g}",
    )

    # Mikhlin-Hormander constants
    if G["evenness"].passed:
        if variant == "main":
            Q["mh_constant"] = _from_mh(mh_constant(m, sp, q, cfg.mh_order, cfg.mh_grid, cfg.levels))
        else:
            Q["mh_outer_constant"] = _from_mh(mh_outer_constant(m, sp, p, cfg.mh_order, cfg.mh_grid, cfg.levels))
    if not rep.gates_passed:
        for name in _PIPELINE_NAMES[variant]:
            Q.setdefault(name, _na("hypothesis gate failed"))
        return rep

    _proxies(rep, sp, p, m, variant, cfg)
    _spherical_checks(rep, sp, p, cfg)
    _ledgers(rep, sp, p, cfg, seed)
    _kernel_pipeline(rep, sp, p, q, m, variant, cfg, seed)
    _kpdec(rep, cfg)
    return rep


_COMMON = [
    "multiplier_proxy_mikhlin", "multiplier_proxy_cv2", "mtilde_shift_mikhlin",
    "hcest_sup", "omega_derivative_sup", "gamma_fit_C", "gamma_fit_d",
    "eta_ledger_C", "psi_v_slope", "varphi_norm", "local_kernel_l1",
    "kappa_p_cvp_upper", "kappa_p_cvp_lower", "kappa_p_decomposition_bound",
    "kappa_q_lip", "kappa_q_sup_derivative",
    "difference_integral_1", "difference_integral_2",
    "transference_tK1_integral", "transference_tK2_integral",
    "transference_tK1_per_v", "transference_tK2_per_v",
]
_PIPELINE_NAMES = {"main": _COMMON + ["ocm_factor_mikhlin"], "main_i": _COMMON}


def _proxies(rep, sp, p, m, variant, cfg):
    Q = rep.quantities
    shift = 1j * rho_p(p, sp)

    def shifted_m(z):
        return m.jet(z + shift)

    if variant == "main":
        def proxy(z):
            return _omega_jet(z + shift, sp) * m.jet(z + shift)

        def ocm(z):
            w = z + shift
            return c_check_inverse_jet(w, sp) / _omega_jet(w, sp)

        Q["ocm_factor_mikhlin"] = _from_mh(mikhlin_real_line(ocm, cfg.mh_order, cfg.mh_grid, cfg.levels))
        note = "real-line Mikhlin constant of (omega m)(. + i rho_p)"
    else:
        proxy = shifted_m
        note = "real-line Mikhlin constant of m(. + i rho_p)"

    mk = _from_mh(mikhlin_real_line(proxy, cfg.mh_order, cfg.mh_grid, cfg.levels))
    Q["multiplier_proxy_mikhlin"] = Quantity(mk.value, mk.flag, mk.levels, _join(note, mk.note), True)
    c2 = _from_mh(mikhlin_real_line(proxy, 0, cfg.mh_grid, cfg.levels))
    Q["multiplier_proxy_cv2"] = Quantity(c2.value, c2.flag, c2.levels, _join("sup of the proxy on the real line", c2.note), True)

    def mtilde(z):
        w = z + shift
        return c_check_inverse_jet(w, sp) * m.jet(w)

    mt = _from_mh(mikhlin_real_line(mtilde, cfg.mh_order, cfg.mh_grid, cfg.levels))
    Q["mtilde_shift_mikhlin"] = Quantity(mt.value, mt.flag, mt.levels, mt.note, True)


def _join(*parts):
    return "; ".join(s for s in parts if s)


def _spherical_checks(rep, sp, p, cfg):
    Q = rep.quantities
    h = hcest_suprema(sp)
    Q["hcest_sup"] = _from_levels((max(h.coarse), max(h.fine)), 0.05, "max over j <= 2")
    o = omega_derivative_suprema(sp)
    Q["omega_derivative_sup"] = _from_levels((max(o.coarse), max(o.fine)), 0.05, "max over j <= 2")
    fits = [gamma_mikhlin_fit(sp, rho_p(p, sp), cfg.gamma_terms, d) for d in (16, 32, 64)[: max(2, cfg.levels)]]
    Q["gamma_fit_C"] = _from_levels([f.C for f in fits], cfg.drift)
    Q["gamma_fit_d"] = Quantity(fits[-1].d, STABLE if Q["gamma_fit_C"].flag == STABLE else DIVERGENT,
                                tuple(f.d for f in fits), "fitted exponent, reported only")


def _ledgers(rep, sp, p, cfg, seed):
    Q = rep.quantities
    e = eta_ledger(sp, p)
    Q["eta_ledger_C"] = _from_levels((e.C_coarse, e.C_fine), cfg.drift, "; ".join(e.excluded))
    ps = psi_ledger(sp, np.random.default_rng(np.random.SeedSequence(seed).spawn(2)[1]))
    Q["psi_v_slope"] = _from_levels((ps.slope_coarse, ps.slope_fine), cfg.drift)
    Q["varphi_norm"] = _from_levels((varphi_norm(sp, p, 400), varphi_norm(sp, p, 800)), cfg.drift)


def _kernel_pipeline(rep, sp, p, q, m, variant, cfg, seed):
    Q = rep.quantities
    q_eff = min(q, dual_exponent(q)) if q != 2 else 2.0
    acc = {name: [] for name in (
        "local_kernel_l1", "kappa_p_cvp_upper", "kappa_q_lip", "kappa_q_sup_derivative",
        "difference_integral_1", "difference_integral_2",
        "transference_tK1_integral", "transference_tK2_integral",
        "transference_tK1_per_v", "transference_tK2_per_v",
    )}
    lower = 0.0
    lip_status = []
    mc_seed = int(np.random.SeedSequence(seed).generate_state(1)[0])
    for level in range(cfg.levels):
        scale = 2**level
        grid = default_grid(cfg.kernel_t_max, cfg.kernel_points * scale)
        k = synthesize_kernel(m, sp, cfg.epsilon, grid)
        loc, glo = split_local_global(k)
        ta = np.abs(loc.t)
        acc["local_kernel_l1"].append(0.5 * float(np.sum(np.abs(loc.values) * delta_density(ta, sp))) * loc.step)

        kp = kappa_q(glo, p, sp)
        acc["kappa_p_cvp_upper"].append(cvp_upper(kp.values, p, kp.t))
        if level == cfg.levels - 1:
            lower = cvp_lower(kp.values, p, mc_seed, kp.t, cfg.mc_tests)

        kq = kappa_q(glo, q_eff, sp)
        lip = lip_norm(kq.values, kq.t)
        acc["kappa_q_lip"].append(lip.value)
        lip_status.append(lip.status)
        ts = np.linspace(2.0, cfg.kernel_t_max, 128 * scale + 1)
        kqs, dkq = shifted_synthesis(m, sp, q_eff, cfg.epsilon, ts, derivative=True)
        beta = 4.0 * sp.rho / q_eff
        # kappa(-t) = e^{-beta t} kappa(t) for the even kernel K
        d_neg = -np.exp(-beta * ts) * (dkq.values - beta * kqs.values)
        acc["kappa_q_sup_derivative"].append(float(max(np.max(np.abs(dkq.values)), np.max(np.abs(d_neg)))))

        nbar = NbarGrid(sp, cfg.nbar_per_unit * scale, cfg.nbar_u_min, cfg.nbar_u_max)
        tl = line_grid(cfg.kernel_t_max, cfg.line_step / scale)

        def diff1(x, y, t):
            k1, _ = splitting_kernels(glo, (x, y), t, sp, outside="zero")
            a1, _ = approximating_kernels(glo, (x, y), t, sp, outside="zero")
            return k1 - a1

        def diff2(x, y, t):
            _, k2 = splitting_kernels(glo, (x, y), t, sp, outside="zero")
            _, a2 = approximating_kernels(glo, (x, y), t, sp, outside="zero")
            return k2 - a2

        def tk1(x, y, t):
            return approximating_kernels(glo, (x, y), t, sp, outside="zero")[0]

        def tk2(x, y, t):
            return approximating_kernels(glo, (x, y), t, sp, outside="zero")[1]

        acc["difference_integral_1"].append(transference_bound(diff1, p, sp, "integral", nbar, tl))
        acc["difference_integral_2"].append(transference_bound(diff2, p, sp, "integral", nbar, tl))
        acc["transference_tK1_integral"].append(transference_bound(tk1, p, sp, "integral", nbar, tl))
        acc["transference_tK2_integral"].append(transference_bound(tk2, p, sp, "integral", nbar, tl))
        acc["transference_tK1_per_v"].append(transference_bound(tk1, p, sp, "per_v", nbar, tl))
        acc["transference_tK2_per_v"].append(transference_bound(tk2, p, sp, "per_v", nbar, tl))

    for name, levels in acc.items():
        Q[name] = _from_levels(levels, cfg.drift)
    if "divergent" in lip_status:
        Q["kappa_q_lip"] = Quantity(Q["kappa_q_lip"].value, DIVERGENT, Q["kappa_q_lip"].levels,
                                    "difference quotients grow under refinement")
    Q["kappa_q_lip"] = Quantity(Q["kappa_q_lip"].value, Q["kappa_q_lip"].flag, Q["kappa_q_lip"].levels,
                                _join(Q["kappa_q_lip"].note, f"q_eff = {q_eff:.6g}"))
    up = Q["kappa_p_cvp_upper"]
    Q["kappa_p_cvp_lower"] = Quantity(
        lower,
        STABLE if math.isfinite(lower) and (up.value is None or lower <= up.value * (1 + 1e-9)) else DIVERGENT,
        (lower,),
        f"Monte Carlo over {cfg.mc_tests} seeded test functions on the finest grid",
    )


def _kpdec(rep, cfg):
    """Sum over l of C_gamma max(1,l)^d * C_eta e^{-l} times the shifted m~ proxy."""
    Q = rep.quantities
    parts = [Q.get(n) for n in ("gamma_fit_C", "eta_ledger_C", "mtilde_shift_mikhlin")]
    if any(x is None or x.flag != STABLE for x in parts):
        Q["kappa_p_decomposition_bound"] = Quantity(None, DIVERGENT, (), "an ingredient is not stable")
        return
    d = Q["gamma_fit_d"].value
    ell = np.arange(0, 400, dtype=float)
    series = float(np.sum(np.maximum(ell, 1.0) ** d * np.exp(-ell)))
    gC, eC, mt = parts
    n = min(len(gC.levels), len(eC.levels), len(mt.levels))
    levels = [gC.levels[i] * eC.levels[i] * mt.levels[i] * series for i in range(n)]
    q = _from_levels(levels, cfg.drift, "uses fitted Gamma_l envelope and cutoff ledger", True)
    Q["kappa_p_decomposition_bound"] = q
