import math

import numpy as np
import pytest
from scipy.integrate import quad

from rankone.geometry import NbarPoint, cartan_exponent, iwasawa_exponent
from rankone.kernels import (
    DivergenceError,
    OutOfGridError,
    RadialKernel,
    approximating_kernels,
    chi_cutoff,
    default_grid,
    eta_cutoff,
    eta_ledger,
    eta_weight,
    eta_weight_norm,
    forward_constant,
    kappa_q,
    kernel_on_s,
    psi,
    psi_ledger,
    psi_v,
    shifted_synthesis,
    smoothstep,
    spherical_transform,
    split_local_global,
    splitting_kernels,
    synthesize_kernel,
    varphi_norm,
)
from rankone.multiplier import parse_multiplier
from rankone.space import PRESETS

H3, H4, CH2 = PRESETS["H3"], PRESETS["H4"], PRESETS["CH2"]
EPS = 1e-4


def gaussian_kernel_h3(t, eps=EPS):
    """Inverse transform of ``exp(-(1 + eps) lam^2)`` on H3."""
    a = 1 + eps
    t = np.asarray(t, dtype=float)
    with np.errstate(invalid="ignore", divide="ignore"):
        out = math.sqrt(math.pi) * t * np.exp(-t * t / (4 * a)) / (2 * a**1.5 * np.sinh(t))
    return np.where(t == 0, math.sqrt(math.pi) / (2 * a**1.5), out)


@pytest.fixture(scope="module")
def h3_gauss():
    return synthesize_kernel(parse_multiplier("exp(-z^2)"), H3, EPS)


# cutoffs


def test_smoothstep_against_quadrature():
    norm = quad(psi, -1, 1, epsabs=1e-14)[0]
    for x in (-0.9, -0.3, 0.0, 0.4, 0.95):
        ref = quad(psi, -1, x, epsabs=1e-14)[0] / norm
        assert smoothstep(x) == pytest.approx(ref, abs=1e-13)
    assert smoothstep(0.0) == 0.5
    x = np.linspace(-1.2, 1.2, 101)
    assert np.allclose(smoothstep(x) + smoothstep(-x), 1.0, atol=1e-15)


@pytest.mark.parametrize("deriv", [1, 2, 3])
def test_psi_derivatives_by_differences(deriv):
    x = np.linspace(-0.9, 0.9, 37)
    h = 1e-5
    fd = (psi(x + h, deriv - 1) - psi(x - h, deriv - 1)) / (2 * h)
    assert np.allclose(psi(x, deriv), fd, rtol=1e-5, atol=1e-8)


def test_cutoff_support_values():
    assert eta_cutoff(1.0) == 1.0 and eta_cutoff(-2.0) == 1.0
    assert eta_cutoff(5.0) == 0.0 and eta_cutoff(-4.0) == 0.0
    assert chi_cutoff(3.0) == 1.0 and chi_cutoff(-3.0) == 0.0
    assert chi_cutoff(0.0) == 0.5


@pytest.mark.parametrize("cutoff, edges", [(eta_cutoff, (2.0, 4.0, -2.0, -4.0)), (chi_cutoff, (-2.0, 2.0))])
def test_cutoffs_flat_at_window_edges(cutoff, edges):
    for e in edges:
        for d in (1, 2, 3):
            assert abs(cutoff(e, d)) < 1e-8


@pytest.mark.parametrize("cutoff", [eta_cutoff, chi_cutoff])
@pytest.mark.parametrize("deriv", [1, 2, 3])
def test_cutoff_derivatives_by_differences(cutoff, deriv):
    t = np.linspace(-3.9, 3.9, 53)
    h = 1e-5
    fd = (cutoff(t + h, deriv - 1) - cutoff(t - h, deriv - 1)) / (2 * h)
    assert np.allclose(cutoff(t, deriv), fd, rtol=1e-4, atol=1e-7)


# synthesis and the transform


def test_zero_multiplier_gives_zero_kernel():
    k = synthesize_kernel(parse_multiplier("0"), H4, EPS, default_grid(8.0, 256))
    assert np.all(k.values == 0)


def test_h3_gaussian_closed_form(h3_gauss):
    assert np.max(np.abs(h3_gauss.values - gaussian_kernel_h3(h3_gauss.t))) < 1e-12
    assert np.isrealobj(h3_gauss.values)


def test_real_even_multiplier_gives_real_even_kernel():
    k = synthesize_kernel(parse_multiplier("1/(z^2 + 9) * heat(0.5)"), CH2, EPS, default_grid(8.0, 512))
    assert np.isrealobj(k.values)
    assert np.allclose(k.values, k.values[::-1])


def test_radial_kernel_validation():
    t = default_grid(2.0, 8)
    with pytest.raises(ValueError, match="even"):
        RadialKernel(t, t.copy())
    with pytest.raises(ValueError, match="finite"):
        RadialKernel(t, np.full(8, np.nan))
    k = RadialKernel(t, np.cos(t))
    with pytest.raises(OutOfGridError):
        k(3.0)


def test_interpolation_and_zero_extension(h3_gauss):
    s = np.array([0.123, 1.7, 5.55])
    assert np.allclose(h3_gauss(s), gaussian_kernel_h3(s), atol=1e-9)
    assert h3_gauss(40.0, outside="zero") == 0.0


def test_forward_transform_inverts(h3_gauss):
    lam = np.array([0.0, 0.7, 2.0, 4.0])
    got = spherical_transform(h3_gauss, lam, H3)
    assert np.allclose(got, np.exp(-(1 + EPS) * lam**2), rtol=1e-5, atol=1e-12)
    assert forward_constant(H3) == pytest.approx(1 / math.pi)


def test_split_local_global(h3_gauss):
    loc, glo = split_local_global(h3_gauss)
    assert np.allclose(loc.values + glo.values, h3_gauss.values, rtol=2e-16, atol=0)
    assert np.all(glo.values[np.abs(glo.t) <= 2] == 0)
    assert np.all(loc.values[np.abs(loc.t) >= 4] == 0)


def test_kappa_q_relations(h3_gauss):
    _, glo = split_local_global(h3_gauss)
    kq = kappa_q(glo, 2.0, H3)
    assert not kq.even
    assert np.all(kq.values[np.abs(kq.t) < 2] == 0)
    # e^{-2 rho t/q} kappa(t) = e^{2 rho t/q} kappa(-t)
    w = np.exp(2 * H3.rho * kq.t / 2.0)
    assert np.allclose(kq.values / w, kq.values[::-1] * w, rtol=1e-12, atol=1e-30)
    assert kq(3.0) == pytest.approx((1 - eta_cutoff(3.0)) * math.exp(3) * gaussian_kernel_h3(3.0), rel=1e-8)
    with pytest.raises(ValueError):
        kappa_q(glo, 2.5, H3)


def test_shifted_synthesis_matches_direct(h3_gauss):
    _, glo = split_local_global(h3_gauss)
    t = np.linspace(2, 8, 25)
    direct = kappa_q(glo, 2.0, H3)(t)
    shifted = shifted_synthesis(parse_multiplier("exp(-z^2)"), H3, 2.0, EPS, t)
    assert np.max(np.abs(shifted.values - direct)) < 1e-8


def test_shifted_synthesis_zero_and_derivative():
    t = np.linspace(2, 6, 9)
    zero = shifted_synthesis(parse_multiplier("0"), H4, 1.5, EPS, t)
    assert np.all(zero.values == 0)
    m = parse_multiplier("heat(1)")
    kq, dkq = shifted_synthesis(m, H4, 1.5, EPS, t, derivative=True)
    h = 1e-4
    plus = shifted_synthesis(m, H4, 1.5, EPS, t + h).values
    minus = shifted_synthesis(m, H4, 1.5, EPS, t + 2 * h).values
    # one-sided second-order difference, away from the t = 2 boundary
    fd = (-3 * kq.values + 4 * plus - minus) / (2 * h)
    assert np.allclose(dkq.values, fd, rtol=1e-5, atol=1e-9)


def test_shifted_synthesis_needs_t_at_least_two():
    with pytest.raises(ValueError):
        shifted_synthesis(parse_multiplier("heat(1)"), H3, 2.0, EPS, [1.0, 3.0])


def test_shifted_synthesis_singular_line():
    with pytest.raises(DivergenceError):
        shifted_synthesis(parse_multiplier("1/z^2"), H3, 2.0, EPS, [3.0])


# kernels on S


def test_partition_and_supports(h3_gauss, rng):
    _, glo = split_local_global(h3_gauss)
    n = 10_000
    t = rng.uniform(-6, 6, n)
    x = rng.uniform(0, 6, n)
    y = np.zeros(n)
    k1, k2 = splitting_kernels(glo, (x, y), t, H3, outside="zero")
    full = kernel_on_s(glo, (x, y), t, H3, outside="zero")
    assert np.allclose(k1 + k2, full, rtol=2e-16, atol=0)
    s = t + 0.5 * iwasawa_exponent((x, y), H3)
    assert np.all(k1[s <= -2] == 0)
    assert np.all(k2[s >= 2] == 0)


def test_approximating_kernels_at_identity(h3_gauss):
    t = np.array([-3.0, 2.5, 4.0])
    a1, a2 = approximating_kernels(h3_gauss, NbarPoint(0.0), t, H3)
    assert np.allclose(a1, chi_cutoff(t) * h3_gauss(t))
    assert np.allclose(a2, (1 - chi_cutoff(t)) * h3_gauss(t))


def test_approximating_kernel_h3_sample(h3_gauss):
    a1, _ = approximating_kernels(h3_gauss, NbarPoint(math.sqrt(8)), 1.0, H3)
    expected = chi_cutoff(1 + 0.5 * math.log(2)) * gaussian_kernel_h3(1 + math.log(2))
    assert a1 == pytest.approx(expected, rel=1e-9)


def test_kernel_on_s_uses_cartan_exponent(h3_gauss):
    v = NbarPoint(2.0)
    b = cartan_exponent(0.7, v, H3)
    assert kernel_on_s(h3_gauss, v, 0.7, H3) == pytest.approx(float(h3_gauss(b)))


# ledgers


def test_eta_weights_vanish_near_origin(space):
    t = np.linspace(-2, 2, 41)
    for sign in (1, -1):
        assert np.all(eta_weight(t, 3, sign, space, 1.5) == 0)


def test_eta_weight_second_derivative(space):
    t = np.linspace(2.1, 5.5, 30)
    h = 1e-4
    f = lambda s: eta_weight(s, 2, 1, space, 1.5)
    fd = (f(t + h) - 2 * f(t) + f(t - h)) / h**2
    assert np.allclose(eta_weight(t, 2, 1, space, 1.5, deriv=2), fd, rtol=1e-4, atol=1e-6)


def test_eta_zero_plus_not_integrable(space):
    assert eta_weight_norm(0, 1, space, 1.5) == math.inf
    led = eta_ledger(space, 1.5)
    assert led.stable
    assert led.excluded == ("l=0 (+): not integrable",)


def test_eta_ledger_bound_holds(space):
    led = eta_ledger(space, 1.5)
    ell = np.arange(21)
    plus = np.array(led.plus)
    finite = np.isfinite(plus)
    assert np.all(plus[finite] <= led.C_fine * np.exp(-ell[finite]) * (1 + 1e-12))
    assert np.all(np.array(led.minus) <= led.C_fine * np.exp(-ell) * (1 + 1e-12))


def test_psi_v_identity_and_support():
    t = np.linspace(-5, 5, 101)
    assert np.all(psi_v(t, 0.0) == 0)
    assert np.all(psi_v(t[np.abs(t) > 2 + 1.5], 3.0) == 0)


def test_psi_ledger_linear_slope(space, rng):
    led = psi_ledger(space, rng, samples=30)
    assert led.stable
    norms, h = np.array(led.norms), np.array(led.h)
    assert np.all(norms <= led.slope_fine * h * (1 + 1e-12))


def test_varphi_norm_converges(space):
    a, b = varphi_norm(space, 1.5, 400), varphi_norm(space, 1.5, 800)
    assert abs(a - b) < 1e-3 * b
