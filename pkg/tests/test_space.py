import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rankone.space import (
    PRESETS,
    BranchError,
    DomainError,
    SpaceParams,
    delta_density,
    delta_exponent,
    dual_exponent,
    omega_weight,
    preset,
    rho_p,
)


@pytest.mark.parametrize(
    "name, n, rho",
    [("H3", 3, 1.0), ("H4", 4, 1.5), ("CH2", 4, 2.0)],
)
def test_preset_dimension_and_rho(name, n, rho):
    sp = preset(name)
    assert sp.n == n
    assert sp.rho == rho
    assert 2 * sp.rho_exact == sp.m_alpha + 2 * sp.m_2alpha


def test_config_round_trip():
    sp = SpaceParams(5, 2)
    assert SpaceParams.from_config(sp.to_config()) == sp
    assert SpaceParams.from_config("ch2") is PRESETS["CH2"]


@pytest.mark.parametrize("bad", [(0, 0), (1.5, 0), (2, -1)])
def test_invalid_multiplicities(bad):
    with pytest.raises(DomainError):
        SpaceParams(*bad)


def test_unknown_preset():
    with pytest.raises(DomainError, match="unknown space preset"):
        preset("H7")


@pytest.mark.parametrize("p, expected", [(2.0, 0.0), (1.0, 1.0), (4 / 3, 0.5), (4.0, 0.5)])
def test_delta_exponent(p, expected):
    assert delta_exponent(p) == pytest.approx(expected, abs=1e-15)


@given(st.floats(min_value=1.0001, max_value=1.9999))
def test_delta_exponent_is_dual_symmetric(p):
    assert delta_exponent(p) == pytest.approx(delta_exponent(dual_exponent(p)), rel=1e-14, abs=1e-15)


def test_delta_exponent_rejects_p_below_one():
    with pytest.raises(DomainError):
        delta_exponent(0.9)
    with pytest.raises(DomainError):
        dual_exponent(1.0)


def test_rho_p_examples():
    assert rho_p(4 / 3, PRESETS["H3"]) == pytest.approx(0.5)
    assert rho_p(1.0, PRESETS["H4"]) == pytest.approx(1.5)
    for sp in PRESETS.values():
        assert rho_p(2.0, sp) == 0.0


def test_omega_weight_values():
    h3 = PRESETS["H3"]
    assert omega_weight(0.0, h3) == pytest.approx(2.0)
    assert omega_weight(math.sqrt(5.0), h3) == pytest.approx(3.0)
    assert np.isrealobj(np.real_if_close(omega_weight(np.linspace(-4, 4, 9), h3)))


def test_omega_weight_even_on_strip(space, rng):
    z = rng.uniform(-50, 50, 1000) + 1j * rng.uniform(-space.rho, space.rho, 1000)
    a, b = omega_weight(z, space), omega_weight(-z, space)
    assert np.max(np.abs(a - b) / np.abs(a)) < 1e-14


def test_omega_weight_growth(space):
    lam = np.array([1e3, 1e4, 1e5])
    ratio = omega_weight(lam, space).real / lam ** ((space.n - 1) / 2)
    assert abs(ratio[-1] - 1) < 1e-8
    assert np.all(np.diff(np.abs(ratio - 1)) < 0)


def test_omega_weight_branch_cut():
    with pytest.raises(BranchError):
        omega_weight(3j, PRESETS["H3"])


def test_delta_density_values(h3):
    assert delta_density(0.0, h3) == 0.0
    assert delta_density(math.log(2.0), h3) == pytest.approx(9 / 16)
    with pytest.raises(DomainError):
        delta_density(-0.1, h3)


def test_delta_density_small_t_order(space):
    t = np.array([1e-2, 1e-3, 1e-4])
    ratio = delta_density(t, space) / t ** (space.n - 1)
    assert ratio[-1] == pytest.approx(ratio[-2], rel=1e-5)


def test_delta_density_large_t_growth(space):
    t = np.linspace(3, 30, 50)
    r = delta_density(t, space) / np.exp(2 * space.rho * t)
    base = 2.0 ** (-2 * space.rho)
    assert np.all((r >= base / 2) & (r <= 2 * base))
