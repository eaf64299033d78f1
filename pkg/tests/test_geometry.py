import math

import numpy as np
import pytest

from rankone.geometry import (
    IDENTITY,
    NbarGrid,
    NbarPoint,
    NonConvergenceError,
    cartan_exponent,
    ctoi_report,
    decom_iwas_slack,
    fuzz_ctoi,
    iwasawa_exponent,
    nbar_quadrature,
    p_function,
    phi_defect,
    phi_map,
)
from rankone.space import PRESETS, DomainError

H3, CH2 = PRESETS["H3"], PRESETS["CH2"]
GOLDEN_SQ = (3 + math.sqrt(5)) / 2


def test_phi_map_examples():
    assert phi_map(2.0) == 1.0
    assert phi_map(2.5) == pytest.approx(2.0)
    assert phi_map(10.0) == pytest.approx(5 + math.sqrt(24))
    with pytest.raises(DomainError):
        phi_map(1.99)


def test_phi_map_monotone_with_defect_bound():
    x = np.geomspace(2, 1e8, 1000)
    y = phi_map(x)
    assert np.all(np.diff(y) > 0)
    d = phi_defect(x)
    assert np.all(d >= 0) and np.all(d <= 2 / x * (1 + 1e-15))
    # the stable defect agrees with the naive difference where that is accurate
    small = x < 100
    assert np.allclose(d[small], x[small] - y[small], rtol=1e-12)


def test_phi_map_inverts_y_plus_one_over_y():
    y = np.geomspace(1, 1e6, 200)
    assert np.allclose(phi_map(y + 1 / y), y, rtol=1e-12)


@pytest.mark.parametrize(
    "sp, v, expected",
    [(H3, NbarPoint(0, 0), 0.0), (H3, NbarPoint(math.sqrt(8)), math.log(2)), (CH2, NbarPoint(0, math.sqrt(18)), math.log(2))],
)
def test_iwasawa_exponent(sp, v, expected):
    assert iwasawa_exponent(v, sp) == pytest.approx(expected, abs=1e-15)


def test_nbar_point_checks_space():
    with pytest.raises(DomainError):
        iwasawa_exponent(NbarPoint(1.0, 1.0), H3)
    with pytest.raises(DomainError):
        NbarPoint(-1.0)


@pytest.mark.parametrize("t", [3.0, -3.0, 0.0, 12.5])
def test_cartan_exponent_identity(space, t):
    assert cartan_exponent(t, IDENTITY, space) == pytest.approx(abs(t), abs=1e-14)


def test_cartan_exponent_example():
    assert cartan_exponent(0.0, NbarPoint(math.sqrt(8)), H3) == pytest.approx(math.log(GOLDEN_SQ), rel=1e-14)


def test_cartan_exponent_rank_one_equality(rng):
    # without a 2 alpha root item 2 of the comparison lemma is an identity
    t = rng.uniform(-6, 6, 500)
    x = rng.uniform(0, 10, 500)
    b = cartan_exponent(t, (x, np.zeros_like(x)), H3)
    ta = t + iwasawa_exponent((x, 0 * x), H3)
    assert np.allclose(np.exp(b), phi_map(np.exp(-t) + np.exp(ta)), rtol=1e-12)


def test_p_function_examples():
    assert p_function(IDENTITY, H3) == 1.0
    assert p_function(NbarPoint(math.sqrt(8)), H3) == pytest.approx(0.5)
    assert p_function(NbarPoint(0, math.sqrt(18)), CH2) == pytest.approx(0.25)


def test_ctoi_report_examples():
    rep = ctoi_report(3.0, IDENTITY, H3)
    assert rep.slack_2 == pytest.approx(0.0, abs=1e-12)
    rep = ctoi_report(0.0, NbarPoint(math.sqrt(8)), H3)
    # slacks are reported relative to max(1, b^alpha)
    assert rep.slack_1 == pytest.approx((GOLDEN_SQ - 1) / GOLDEN_SQ, rel=1e-12)
    assert rep.slack_3 is not None and rep.slack_3 >= 0  # a~^alpha = 2 sits on the threshold
    assert rep.slack_4 is None


def test_fuzz_small(space, rng):
    worst = fuzz_ctoi(space, 20_000, rng)
    for name, (slack, count) in worst.items():
        assert count > 0, name
        assert slack >= -1e-10, name


def test_decom_iwas_bounds(space, rng):
    t = rng.uniform(0, 8, 10_000)
    x = rng.uniform(0, 10, t.size)
    y = rng.uniform(0, 10, t.size) if space.m_2alpha else 0 * x
    e, lo, hi = decom_iwas_slack(t, x, y, space)
    assert lo.min() >= -1e-10 and hi.min() >= -1e-10


@pytest.mark.parametrize("q", [1.5, 2.0, 3.0])
def test_nbar_quadrature_h3_closed_form(q):
    val = nbar_quadrature(lambda x, y: p_function((x, y), H3) ** q, H3, tol=1e-9)
    assert val == pytest.approx(8 * math.pi / (q - 1), rel=1e-7)


@pytest.mark.parametrize("q", [1.1, 1.5, 2.0])
def test_nbar_quadrature_log_weighted_converges(space, q):
    def f(x, y):
        return (1 + iwasawa_exponent((x, y), space)) * p_function((x, y), space) ** q

    assert np.isfinite(nbar_quadrature(f, space, tol=1e-6))


def test_nbar_quadrature_flags_divergence():
    with pytest.raises(NonConvergenceError):
        nbar_quadrature(lambda x, y: p_function((x, y), H3), H3, tol=1e-8)


def test_nbar_grid_matches_quadrature(space):
    X, Y, W = NbarGrid(space).nodes()
    f = p_function((X, Y), space) ** 2
    exact = nbar_quadrature(lambda x, y: p_function((x, y), space) ** 2, space, tol=1e-9)
    assert np.dot(W, f) == pytest.approx(exact, rel=1e-5)
