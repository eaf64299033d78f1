import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rankone.geometry import NbarGrid
from rankone.opnorms import (
    LineOperator,
    cv2_argmax,
    cv2_norm,
    cvp_bound,
    cvp_lower,
    cvp_upper,
    l1_norm,
    line_grid,
    lip_norm,
    mel_product_bound,
    mellin_transform,
    transference_bound,
)
from rankone.space import PRESETS

H3 = PRESETS["H3"]
T = np.arange(-2048, 2049) / 128.0  # h = 1/128 on [-16, 16]
GAUSS = np.exp(-T**2)
SQRT_PI = math.sqrt(math.pi)


# Fourier side


def test_mellin_of_gaussian():
    lam = np.linspace(-6, 6, 25)
    got = mellin_transform(GAUSS, lam, t=T)
    assert np.allclose(got, SQRT_PI * np.exp(-lam**2 / 4), rtol=0, atol=1e-13)


@given(a=st.floats(-3, 3), b=st.floats(-3, 3))
def test_mellin_is_linear(a, b):
    lam = np.array([-1.0, 0.3, 2.0])
    f, g = GAUSS, np.exp(-((T - 1) ** 2) / 2)
    lhs = mellin_transform(a * f + b * g, lam, t=T)
    rhs = a * mellin_transform(f, lam, t=T) + b * mellin_transform(g, lam, t=T)
    assert np.allclose(lhs, rhs, atol=1e-12)


def test_mellin_of_zero():
    assert np.all(mellin_transform(np.zeros_like(T), [0.0, 1.0], t=T) == 0)


def test_cv2_of_gaussian_is_its_peak():
    assert cv2_norm(GAUSS, T) == pytest.approx(SQRT_PI, rel=1e-12)


@pytest.mark.parametrize("theta", [0.7, 3.1, -5.0])
def test_cv2_is_modulation_invariant(theta):
    val, arg = cv2_argmax(GAUSS * np.exp(1j * theta * T), T)
    assert val == pytest.approx(SQRT_PI, rel=1e-9)
    assert arg == pytest.approx(theta, abs=1e-4)


# Cv_p bounds


@pytest.mark.parametrize("p", [1.2, 1.5, 1.8])
def test_cvp_lower_below_upper(p):
    kappa = np.exp(-T**2) * np.cos(2 * T) + 0.3 * np.exp(-((T - 1) ** 2) * 4)
    lo, hi = cvp_bound(kappa, p, seed=11, t=T, n_tests=50)
    assert 0 < lo <= hi * (1 + 1e-12)
    assert hi <= l1_norm(kappa, T) * (1 + 1e-12)


def test_cvp_at_two_is_the_l2_norm():
    lo, hi = cvp_bound(GAUSS, 2.0, seed=5, t=T, n_tests=100)
    assert hi == pytest.approx(SQRT_PI, rel=1e-12)
    assert lo == pytest.approx(SQRT_PI, rel=0.02)


def test_cvp_upper_at_one_is_l1():
    kappa = np.exp(-T**2) * np.sin(3 * T)
    assert cvp_upper(kappa, 1.0, T) == pytest.approx(l1_norm(kappa, T), rel=1e-12)


def test_cvp_lower_needs_seed():
    with pytest.raises(ValueError):
        cvp_lower(GAUSS, 1.5, None, t=T)


def test_cvp_lower_reproducible():
    a = cvp_lower(GAUSS, 1.5, 3, t=T, n_tests=30)
    assert a == cvp_lower(GAUSS, 1.5, 3, t=T, n_tests=30)


def test_line_operator_matches_dense_matrix(rng):
    t = np.arange(-8, 9) * 0.25
    k = rng.normal(size=t.size)
    f = rng.normal(size=11)
    op = LineOperator.from_samples(t, k)
    assert np.allclose(op.apply(f), op.matrix(f.size) @ f, atol=1e-12)


# Lipschitz seminorm


@pytest.mark.parametrize(
    "fn, expected",
    [(np.sin, 1.0), (np.abs, 1.0), (lambda t: np.full_like(t, 2.5), 0.0)],
    ids=["sin", "abs", "const"],
)
def test_lip_norm_callables(fn, expected):
    res = lip_norm(fn, domain=(-4.0, 4.0))
    assert res.finite
    assert res.value == pytest.approx(expected, abs=1e-3)


def test_lip_norm_flags_a_jump():
    res = lip_norm(np.sign, domain=(-1.0, 1.0 + 1e-3))
    assert not res.finite


# multiplication by smooth functions


def test_mellin_l1_of_gaussian_is_two_pi():
    check = mel_product_bound(GAUSS, GAUSS, T)
    # int sqrt(pi) e^{-lam^2/4} d lam = 2 pi
    assert check.mellin_l1 == pytest.approx(2 * math.pi, rel=1e-6)


def test_mel_check_random_pairs(rng):
    for _ in range(50):
        a, b = rng.uniform(0.3, 3, 2)
        s, w = rng.uniform(-2, 2, 2)
        phi = np.exp(-a * (T - s) ** 2) * (1 + 0.5 * np.cos(w * T))
        kappa = np.exp(-b * T**2) * np.cos(rng.uniform(0, 4) * T) + rng.uniform(-1, 1) * np.exp(-((T + 1) ** 2))
        assert mel_product_bound(phi, kappa, T).passed


# transference


def test_transference_product_kernel_closed_form():
    p = 1.5
    grid = NbarGrid(H3, 8)

    def K(x, y, t):
        return np.exp(-x * x) * np.exp(-t * t)

    got = transference_bound(K, p, H3, "integral", grid, line_grid(16.0, 1 / 64))
    # pi from the Gaussian on R^2, the rest from int e^{2t/p - t^2} dt
    assert got == pytest.approx(math.pi * SQRT_PI * math.exp(1 / p**2), rel=1e-8)


def _random_kernel(rng):
    a, b, c, w = rng.uniform(0.2, 2), rng.uniform(0.3, 2), rng.uniform(-2, 2), rng.uniform(0, 3)

    def K(x, y, t):
        return np.exp(-a * x * x - b * (t - c) ** 2) * np.cos(w * t + x)

    return K


def test_transference_per_v_bounds_are_ordered():
    rng = np.random.default_rng(2024)
    t = line_grid(12.0, 1 / 16)
    grid = NbarGrid(H3, 2, -6, 4)
    for i in range(20):
        K = _random_kernel(rng)
        full = transference_bound(K, 1.5, H3, "integral", grid, t)
        upper = transference_bound(K, 1.5, H3, "per_v", grid, t)
        lower = transference_bound(K, 1.5, H3, "per_v_lower", grid, t, seed=i, n_tests=10)
        assert lower <= upper * (1 + 1e-9) + 1e-12
        assert upper <= full * (1 + 1e-9)


def test_transference_lower_needs_seed():
    with pytest.raises(ValueError):
        transference_bound(lambda x, y, t: np.exp(-t * t) + 0 * x, 1.5, H3, "per_v_lower")


def test_transference_unknown_mode():
    with pytest.raises(ValueError):
        transference_bound(lambda x, y, t: t, 1.5, H3, "sup")
