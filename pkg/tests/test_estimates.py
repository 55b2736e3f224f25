import math
from fractions import Fraction as F

import pytest
from mpmath import mp

from magicser.estimates import (FeasibilityWarning, SciNumber, bottomley,
                                canonical_formula, compose_series,
                                corrected_estimate, gaussian_series,
                                gaussian_central_probability, prefactor_exact,
                                prefactor_series)
from magicser.problem import make_problem


def as_float(sci: SciNumber) -> float:
    return float(sci.sign * int(sci.mantissa)) * 10.0 ** (sci.exp10 - sci.digits + 1)


# ---------------------------------------------------------------------------
# SciNumber

def test_scinumber_round_trip():
    for text in ["6.591829225191e+3424", "1.18003e+29", "2e+4", "-3.5e-7", "0"]:
        assert str(SciNumber.parse(text)) == text


def test_scinumber_random_round_trip():
    import random
    rng = random.Random(99)
    for _ in range(200):
        digits = rng.randint(1, 20)
        mant = str(rng.randint(1, 9)) + "".join(
            str(rng.randint(0, 9)) for _ in range(digits - 1))
        sci = SciNumber(rng.choice((-1, 1)), mant, rng.randint(-5000, 5000))
        assert SciNumber.parse(str(sci)) == sci


def test_scinumber_as_fraction():
    sci = SciNumber.parse("2.5e+3")
    assert sci.as_fraction() == 2500
    assert SciNumber.parse("-1.25e-2").as_fraction() == F(-1, 80)


def test_scinumber_validation():
    with pytest.raises(ValueError):
        SciNumber(1, "05", 3)
    with pytest.raises(ValueError):
        SciNumber(2, "5", 3)


# ---------------------------------------------------------------------------
# prefactor

def test_prefactor_trivial():
    # beta = 1/2, m = 2: beta^-1 (1-beta)^-1 = 4
    sci = prefactor_exact(2, F(1, 2), precision=30, digits=10)
    assert abs(as_float(sci) - 4.0) < 1e-9


def test_prefactor_rejects_bad_inputs():
    with pytest.raises(ValueError):
        prefactor_exact(10, F(3, 2), precision=40)
    with pytest.raises(ValueError):
        prefactor_exact(10, F(1, 2), precision=10)


def test_prefactor_series_values():
    assert prefactor_series(2, 2) == [F(1), F(-1, 6), F(-5, 72)]
    assert prefactor_series(3, 2) == [F(1), F(-1, 2), F(1, 8)]
    assert prefactor_series(5, 2) == [F(1), F(0), F(0)]
    assert prefactor_series(5, 3) == [F(1), F(0), F(0), F(-1, 2)]


def test_prefactor_exact_matches_series_squares():
    # m = N^2, beta = 1/N at N = 10 vs (Ne)^N/sqrt(e) (1 - 1/6N - 5/72N^2)
    N = 10
    sci = prefactor_exact(N * N, F(1, N), precision=40, digits=30)
    with mp.workdps(50):
        series = 1 - mp.mpf(1) / (6 * N) - mp.mpf(5) / (72 * N * N)
        ref = (N * mp.e) ** N / mp.sqrt(mp.e) * series
        rel = abs(mp.mpf(str(sci.as_fraction().numerator))
                  / sci.as_fraction().denominator / ref - 1)
    assert rel < 1e-4


def test_prefactor_exact_matches_series_cubes():
    # the third-order coefficient of the cube prefactor series is -3/16,
    # so the order-2 truncation sits ~1.9e-4 off at N=10
    N = 10
    sci = prefactor_exact(N ** 3, F(1, N * N), precision=40, digits=30)
    with mp.workdps(50):
        series = 1 - mp.mpf(1) / (2 * N) + mp.mpf(1) / (8 * N * N)
        ref = (N * N * mp.e) ** N * series
        val = mp.mpf(sci.as_fraction().numerator) / sci.as_fraction().denominator
        resid = abs(val / ref - 1)
        assert resid < 2.5e-4
        assert abs(resid - 3 / 16 / N ** 3) < 0.2 * 3 / 16 / N ** 3
    assert prefactor_series(3, 3) == [F(1), F(-1, 2), F(1, 8), F(-3, 16)]


def test_prefactor_residual_scales_with_order():
    # growth x truncated series differs from the exact prefactor by
    # O(N^-(order+1)) relative
    for N in (10, 30, 100):
        sci = prefactor_exact(N * N, F(1, N), precision=60, digits=40)
        with mp.workdps(80):
            val = mp.mpf(sci.as_fraction().numerator) / sci.as_fraction().denominator
            series = sum(mp.mpf(c.numerator) / c.denominator / mp.mpf(N) ** k
                         for k, c in enumerate(prefactor_series(2, 2)))
            ref = (N * mp.e) ** N / mp.sqrt(mp.e) * series
            rel = abs(val / ref - 1)
        assert rel < 5.0 / N ** 3


# ---------------------------------------------------------------------------
# Gaussian peak probability

def test_gaussian_peak_degree1():
    spec = make_problem(2, 5, 1)   # m=25, beta=1/5
    sci = gaussian_central_probability(spec, precision=40)
    want = (1 / (math.pi * 4)) * math.sqrt(3 / 624)
    assert abs(as_float(sci) / want - 1) < 1e-12


def test_gaussian_peak_degree2_constant():
    # leading constant is 6 sqrt(30) / pi^(3/2)
    spec = make_problem(2, 30, 2)
    m, beta = spec.m, float(spec.beta)
    sci = gaussian_central_probability(spec, precision=40)
    want = (6 * math.sqrt(30) / math.pi ** 1.5
            / ((1 - beta) * beta) ** 1.5 / m ** 4.5)
    assert abs(as_float(sci) / want - 1) < 1e-12


def test_gaussian_peak_degree1_degenerate():
    with pytest.raises(ValueError):
        gaussian_central_probability(make_problem(2, 1, 1))


def test_trimagic_leading_constant():
    # the full degree-3 constant assembles to (720/pi^2) sqrt(105/e)
    formula = canonical_formula(2, 3, 0)
    c = formula.constant
    assert (c.q, c.r, c.pi_power, c.e_power) == (F(720), F(105), -4, -1)


# ---------------------------------------------------------------------------
# series composition

def test_compose_series_degree1():
    assert compose_series(2, 1, 2).coefficient_list(2) == [F(1), F(3, 5), F(31, 420)]
    assert compose_series(3, 1, 2).coefficient_list(2) == [F(1), F(-11, 15), F(157, 126)]
    assert compose_series(4, 1, 2).coefficient_list(2) == [F(1), F(-7, 30), F(-1249, 2520)]
    for alpha in (5, 6, 7):
        assert compose_series(alpha, 1, 2).coefficient_list(2) == \
            [F(1), F(-7, 30), F(11, 2520)]


def test_compose_series_bimagic():
    assert compose_series(2, 2, 1).coefficient_list(1) == [F(1), F(1787, 2940)]
    assert compose_series(3, 2, 1).coefficient_list(1) == [F(1), F(-1201, 980)]


def test_compose_matches_canonical():
    for alpha, degree, order in [(2, 1, 2), (3, 1, 2), (4, 1, 2), (5, 1, 2),
                                 (2, 2, 1), (3, 2, 1), (2, 3, 0)]:
        composed = compose_series(alpha, degree, order)
        canonical = canonical_formula(alpha, degree, order)
        assert composed.coefficient_list(order) == canonical.coefficient_list(order)
        assert composed.constant == canonical.constant
        assert composed.power == canonical.power


def test_compose_order_limits():
    with pytest.raises(ValueError):
        compose_series(2, 2, 2)
    with pytest.raises(ValueError):
        compose_series(2, 3, 1)
    with pytest.raises(ValueError):
        compose_series(1, 1, 2)


def test_gaussian_series_fixtures():
    assert gaussian_series(2, 1, 2) == [F(1), F(5, 6), F(55, 72)]
    assert gaussian_series(3, 1, 2) == [F(1), F(-1, 2), F(9, 8)]
    assert gaussian_series(4, 1, 2) == [F(1), F(0), F(-1, 2)]
    assert gaussian_series(2, 2, 1) == [F(1), F(4, 3)]
    assert gaussian_series(3, 2, 1) == [F(1), F(-1, 2)]


def test_leading_constants():
    c2 = canonical_formula(2, 1, 2).constant
    assert (c2.q, c2.r, c2.pi_power, c2.e_power) == (F(1), F(3), -2, -1)
    c3 = canonical_formula(3, 1, 2).constant
    assert (c3.q, c3.r, c3.pi_power, c3.e_power) == (F(1), F(3), -2, 0)
    b2 = canonical_formula(2, 2, 1).constant
    assert (b2.q, b2.r, b2.pi_power, b2.e_power) == (F(6), F(30), -3, -1)
    b3 = canonical_formula(3, 2, 1).constant
    assert (b3.q, b3.r, b3.pi_power, b3.e_power) == (F(6), F(30), -3, 0)


# ---------------------------------------------------------------------------
# corrected estimates

def test_estimate_square_n1000():
    spec = make_problem(2, 1000, 1)
    assert str(corrected_estimate(spec, 2)) == "6.591829225199e+3424"


def test_estimate_bimagic_n28():
    spec = make_problem(2, 28, 2)
    assert str(corrected_estimate(spec, 1, digits=7)) == "2.455567e+42"


def test_estimate_trimagic_n12():
    spec = make_problem(2, 12, 3)
    assert str(corrected_estimate(spec, 0, digits=3)) == "5.12e+5"


def test_prediction_bimagic_square_29():
    spec = make_problem(2, 29, 2)
    assert str(corrected_estimate(spec, 1, digits=5)) == "3.9714e+44"


def test_prediction_bimagic_cube_12():
    spec = make_problem(3, 12, 2)
    assert str(corrected_estimate(spec, 1, digits=5)) == "3.1966e+20"


def test_estimate_infeasible_warns_but_evaluates():
    spec = make_problem(2, 14, 3)   # N = 2 mod 4
    with pytest.warns(FeasibilityWarning):
        sci = corrected_estimate(spec, 0, digits=3)
    assert sci.sign == 1 and sci.exp10 > 0


def test_estimate_precision_too_low_rejected():
    spec = make_problem(2, 1000, 1)
    with pytest.raises(ValueError):
        corrected_estimate(spec, 2, precision=10)


def test_estimate_order_consistency():
    # order-2 / order-0 - 1 ~ (3/5)/N at alpha=2
    N = 10 ** 4
    spec = make_problem(2, N, 1)
    e2 = corrected_estimate(spec, 2, digits=20)
    e0 = corrected_estimate(spec, 0, digits=20)
    ratio = float(e2.as_fraction() / e0.as_fraction()) - 1
    assert abs(ratio - 0.6 / N) < 0.01 * 0.6 / N


def test_estimate_monotone_in_N():
    spec_logs = []
    for N in range(5, 101, 5):
        sci = corrected_estimate(make_problem(2, N, 1), 2)
        spec_logs.append(sci.log10())
    assert all(b > a for a, b in zip(spec_logs, spec_logs[1:]))


# ---------------------------------------------------------------------------
# Bottomley formula

def test_bottomley_n2():
    want = (1 / math.pi) * math.sqrt(3 / math.e) * (2 * math.e) ** 2 \
        / (8 - 12 / 5 + 4 / 7)
    got = as_float(bottomley(2, digits=12))
    assert abs(got / want - 1) < 1e-10


def test_bottomley_corrected_denominator():
    # variants differ only through 2/7 vs 2/7 + 1/2100 in the N coefficient
    N = 6
    plain = bottomley(N, digits=16).as_fraction()
    corr = bottomley(N, corrected=True, digits=16).as_fraction()
    ratio = float(plain / corr)
    d_plain = N ** 3 - F(3, 5) * N ** 2 + F(2, 7) * N
    d_corr = N ** 3 - F(3, 5) * N ** 2 + (F(2, 7) + F(1, 2100)) * N
    assert abs(ratio - float(d_corr / d_plain)) < 1e-12


def test_bottomley_ratio_tends_to_one():
    prev = None
    for N in (10, 100, 1000):
        r = float(bottomley(N, corrected=True, digits=18).as_fraction()
                  / bottomley(N, digits=18).as_fraction())
        if prev is not None:
            assert abs(r - 1) < abs(prev - 1)
        prev = r
    assert abs(prev - 1) < 1e-6


def test_bottomley_close_to_second_order_estimate():
    N = 50
    est = corrected_estimate(make_problem(2, N, 1), 2)
    bot = bottomley(N, corrected=True)
    assert abs(float(bot.as_fraction() / est.as_fraction()) - 1) < 1e-4
