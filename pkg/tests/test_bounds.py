import math

import numpy as np
import pytest

from spherebits.bounds import (
    N_upper,
    approx_family_constant,
    bounds_table,
    boundary_cell_bound,
    boundary_cell_bound_from_Kd,
    family_gap_bound,
    hoeffding_tail,
    jittered_l2_bound,
    lambda_plan,
    leopardi_Kd,
    n_upper_report,
    net_cardinality_bound,
    random_cap_l2_expectation,
    random_l2_expectation,
    rip_bound_at,
    union_bound_threshold,
    wedge_Cd,
)
from spherebits.discrepancy import l2_cap_exact, l2_wedge_exact
from spherebits.errors import InvalidParameterError
from spherebits.sampling import mean_and_stderr, random_set


def test_constants_on_small_spheres():
    assert leopardi_Kd(2) == pytest.approx(16.0)
    assert leopardi_Kd(3) == pytest.approx(13.41, abs=0.01)
    assert wedge_Cd(2) == pytest.approx(36.68, abs=0.01)
    assert wedge_Cd(3) == pytest.approx(49.96, abs=0.01)


def test_constants_need_d_at_least_two():
    for fn in (leopardi_Kd, wedge_Cd, approx_family_constant, union_bound_threshold, bounds_table):
        with pytest.raises(InvalidParameterError):
            fn(1)


def test_hoeffding_tail_value():
    assert hoeffding_tail(100, 20) == pytest.approx(2 * math.exp(-8))
    assert hoeffding_tail(100, 20) == pytest.approx(6.71e-4, rel=1e-3)
    with pytest.raises(InvalidParameterError):
        hoeffding_tail(0, 1.0)


def test_hoeffding_tail_dominates_binomial_deviations():
    rng = np.random.default_rng(17)
    m, lam = 100, 10.0
    sums = rng.binomial(m, 0.5, size=200_000) - m / 2
    empirical = float(np.mean(np.abs(sums) > lam))
    assert empirical < hoeffding_tail(m, lam)


@pytest.mark.parametrize("m", [20, 50, 100])
@pytest.mark.parametrize("lam", [2.0, 5.0, 10.0])
def test_hoeffding_tail_dominates_heterogeneous_bernoulli_sums(m, lam):
    rng = np.random.default_rng(1000 * m + int(lam))
    p = rng.random(m)
    draws = rng.random((100_000, m)) < p
    sums = draws.sum(axis=1) - p.sum()
    empirical = float(np.mean(np.abs(sums) > lam))
    assert empirical <= hoeffding_tail(m, lam)


def test_lambda_plan():
    assert lambda_plan(6, 100, math.e) == pytest.approx(math.sqrt(600))
    with pytest.raises(InvalidParameterError):
        lambda_plan(6, 100, 1)


def test_boundary_cell_bound():
    assert boundary_cell_bound(2, 1000) == pytest.approx(2024, abs=1)
    assert boundary_cell_bound(2, 1) == pytest.approx(64)
    # the stated form is the intermediate one with K_d written out
    for d in (2, 3, 5):
        assert boundary_cell_bound_from_Kd(d, 500) == pytest.approx(boundary_cell_bound(d, 500))


def test_net_cardinality_bound():
    assert net_cardinality_bound(2, 1.0) == pytest.approx(164.0 ** 3)
    assert net_cardinality_bound(2, 0.5) == pytest.approx(164.0 ** 3 * 2.0 ** 6)
    with pytest.raises(InvalidParameterError):
        net_cardinality_bound(2, 0.0)


def test_family_gap_bound_on_s2():
    # omega/Omega = 1/2 on S^2
    assert family_gap_bound(2, 0.1) == pytest.approx(0.2)


def test_rip_bound_value():
    assert rip_bound_at(2, 10_000) == pytest.approx(0.1113, rel=2e-3)
    with pytest.raises(InvalidParameterError):
        rip_bound_at(2, 1)


def test_final_form_example():
    report = n_upper_report(2, 0.1)
    assert report.final_form == pytest.approx(7.73e5, rel=0.01)


@pytest.mark.parametrize("d", [2, 3, 4])
@pytest.mark.parametrize("delta", [0.05, 0.1, 0.2])
def test_n_upper_is_self_consistent(d, delta):
    report = n_upper_report(d, delta)
    assert report.N == N_upper(d, delta)
    assert report.N >= report.proof_form >= 100 * d
    assert rip_bound_at(d, report.N) < delta
    assert report.check


@pytest.mark.parametrize("d", [2, 3])
def test_proof_form_decreases_with_delta(d):
    forms = [n_upper_report(d, delta).proof_form for delta in (0.05, 0.1, 0.2, 0.5, 0.99)]
    assert all(a >= b for a, b in zip(forms, forms[1:]))
    assert forms[-1] >= 100 * d


def test_n_upper_preconditions():
    with pytest.raises(InvalidParameterError):
        N_upper(2, 0.0)
    with pytest.raises(InvalidParameterError):
        N_upper(2, 1.0)
    with pytest.raises(InvalidParameterError):
        N_upper(1, 0.1)


@pytest.mark.parametrize("delta", [0.05, 0.1, 0.2])
def test_n_upper_grows_with_dimension(delta):
    sizes = [N_upper(d, delta) for d in range(2, 7)]
    assert all(a <= b for a, b in zip(sizes, sizes[1:]))


@pytest.mark.parametrize("d", [2, 3, 4])
def test_n_upper_shrinks_with_delta(d):
    sizes = [N_upper(d, delta) for delta in (0.05, 0.1, 0.2, 0.5)]
    assert all(a >= b for a, b in zip(sizes, sizes[1:]))


def test_bounds_table_fields():
    table = bounds_table(3)
    assert table.K_d == pytest.approx(leopardi_Kd(3))
    assert table.alpha_d == 8
    assert table.A_d == pytest.approx(246.0 ** 4)
    assert table.ratio == pytest.approx(2.0 / np.pi)


def test_jittered_bound_beats_random_expectation_for_large_N():
    assert jittered_l2_bound(2, 10_000) < random_l2_expectation(2, 10_000)


def test_random_expectations_match_sampled_means():
    N = 8
    wedge, cap = [], []
    for seed in range(500):
        Z = random_set(2, N, seed)
        wedge.append(l2_wedge_exact(Z))
        cap.append(l2_cap_exact(Z))

    mean, stderr = mean_and_stderr(wedge)
    assert random_l2_expectation(2, N) == pytest.approx(2.0 / (8 * np.pi ** 2))
    assert abs(mean - random_l2_expectation(2, N)) <= 3 * stderr

    mean, stderr = mean_and_stderr(cap)
    assert random_cap_l2_expectation(2, N) == pytest.approx(1.0 / 24.0)
    assert abs(mean - random_cap_l2_expectation(2, N)) <= 3 * stderr
