from fractions import Fraction as F

import pytest

from magicser.problem import (check_feasibility, make_problem, sampling_model,
                              target_moments, weight)


def direct_targets(spec):
    """Oracle: beta times the raw column sums of the weight matrix."""
    beta = spec.beta
    return tuple(beta * sum(weight(i, r) for i in range(1, spec.m + 1))
                 for r in range(spec.degree + 1))


def test_make_problem_powers():
    spec = make_problem(2, 5, 1)
    assert spec.m == 25 and spec.beta == F(1, 5)
    spec = make_problem(3, 4, 1)
    assert spec.m == 64 and spec.beta == F(1, 16)
    spec = make_problem(2, 28, 2)
    assert spec.m == 784 and spec.beta == F(1, 28) and spec.dimension == 3


def test_make_problem_invariant_beta_m():
    for alpha, N, degree in [(2, 7, 1), (3, 5, 2), (4, 3, 3)]:
        spec = make_problem(alpha, N, degree)
        assert spec.beta * spec.m == N


@pytest.mark.parametrize("alpha,N,degree", [(1, 5, 1), (2, 0, 1), (2, 5, 0),
                                            (2, 5, 4), (2, -3, 1)])
def test_make_problem_rejects(alpha, N, degree):
    with pytest.raises(ValueError):
        make_problem(alpha, N, degree)


def test_sampling_model():
    model = sampling_model(make_problem(2, 5, 1))
    assert model.m == 25 and model.beta == F(1, 5)
    assert 0 < model.beta < 1


def test_target_moments_magic_square_series():
    # second component is the magic constant N(N^2+1)/2
    assert target_moments(make_problem(2, 3, 1)).mu == (F(3), F(15))


def test_target_moments_magic_cube_series():
    # second component is N(N^3+1)/2
    assert target_moments(make_problem(3, 2, 1)).mu == (F(2), F(9))


def test_target_moments_bimagic_derived():
    spec = make_problem(2, 4, 2)
    got = target_moments(spec)
    assert got.mu == direct_targets(spec)
    assert got.mu == (F(4), F(34), F(170))  # mu_z = 4*(4^4-1)/6


def test_target_moments_match_direct_summation():
    for alpha, N, degree in [(2, 5, 1), (2, 4, 3), (3, 3, 2), (4, 2, 3)]:
        spec = make_problem(alpha, N, degree)
        assert target_moments(spec).mu == direct_targets(spec)


def test_power_sum_convention():
    spec = make_problem(2, 4, 3)
    mu = target_moments(spec)
    beta = spec.beta
    want = tuple(beta * sum(i ** r for i in range(1, spec.m + 1))
                 for r in range(1, 4))
    assert mu.power_sums() == (mu.mu[0],) + want


def test_trimagic_infeasible_at_n6():
    feas = check_feasibility(make_problem(2, 6, 3))
    assert not feas.feasible
    assert "cube-weight" in feas.reason and "not an integer" in feas.reason


def test_trimagic_feasible_at_n5():
    assert check_feasibility(make_problem(2, 5, 3)).feasible


def test_degree1_always_feasible():
    for N in range(1, 60):
        assert check_feasibility(make_problem(2, N, 1)).feasible


def test_trimagic_feasibility_pattern_mod4():
    for N in range(1, 201):
        feas = check_feasibility(make_problem(2, N, 3)).feasible
        assert feas != (N % 4 == 2), f"N={N}"


def test_as_integers_round_trip():
    spec = make_problem(2, 4, 2)
    assert target_moments(spec).as_integers() == (4, 34, 170)
    with pytest.raises(ValueError):
        target_moments(make_problem(2, 6, 3)).as_integers()
