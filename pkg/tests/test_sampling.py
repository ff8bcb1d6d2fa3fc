import numpy as np
import pytest

from spherebits.bounds import jittered_l2_bound
from spherebits.discrepancy import l2_wedge_exact
from spherebits.errors import InvalidParameterError
from spherebits.models import Method
from spherebits.sampling import (
    derive_seed,
    expected_slope,
    generate,
    jittered_set,
    loglog_slope,
    mean_and_stderr,
    one_point_per_cell,
    random_set,
    replicate_seeds,
)


def test_generators_are_reproducible():
    for method in (Method.RANDOM, Method.JITTERED):
        a = generate(method, 2, 50, seed=7)
        b = generate(method, 2, 50, seed=7)
        c = generate(method, 2, 50, seed=8)
        assert np.array_equal(a.points, b.points)
        assert not np.array_equal(a.points, c.points)
        assert a.meta.method == method and a.meta.seed == 7


def test_generate_rejects_non_generators():
    with pytest.raises(InvalidParameterError):
        generate(Method.MINIMIZED, 2, 10, 0)
    with pytest.raises(InvalidParameterError):
        random_set(2, 0, 0)


@pytest.mark.parametrize("d,N", [(2, 1), (2, 7), (2, 256), (3, 100), (4, 64)])
def test_jittered_set_has_one_point_per_cell(d, N):
    Z = jittered_set(d, N, seed=N)
    assert Z.N == N and Z.d == d
    assert Z.meta.partition_N == N
    assert one_point_per_cell(Z)


def test_random_set_is_not_one_per_cell():
    assert not one_point_per_cell(random_set(2, 64, seed=0))


def test_derived_seeds():
    assert derive_seed(0, 16, 3) == derive_seed(0, 16, 3)
    seeds = replicate_seeds(0, 16, 50)
    assert len(set(seeds)) == 50
    assert replicate_seeds(0, 16, 10) == seeds[:10]
    assert set(seeds).isdisjoint(replicate_seeds(0, 64, 50))


def test_loglog_slope_of_power_law():
    Ns = [16, 64, 256, 1024]
    assert loglog_slope(Ns, [3.0 * N ** -1.5 for N in Ns]) == pytest.approx(-1.5)
    with pytest.raises(InvalidParameterError):
        loglog_slope([16], [1.0])
    with pytest.raises(InvalidParameterError):
        loglog_slope([16, 64], [1.0, 0.0])


def test_expected_slopes():
    assert expected_slope(Method.JITTERED, 2) == pytest.approx(-1.5)
    assert expected_slope(Method.JITTERED, 4) == pytest.approx(-1.25)
    assert expected_slope(Method.RANDOM, 3) == -1.0


def test_mean_and_stderr():
    mean, stderr = mean_and_stderr([1.0, 2.0, 3.0, 4.0])
    assert mean == 2.5
    assert stderr == pytest.approx(np.std([1, 2, 3, 4], ddof=1) / 2.0)
    assert np.isnan(mean_and_stderr([1.0])[1])


def test_jittered_beats_random_on_average():
    N = 256
    jittered = np.mean([l2_wedge_exact(jittered_set(2, N, s)) for s in range(20)])
    random = np.mean([l2_wedge_exact(random_set(2, N, s)) for s in range(20)])
    assert jittered < random


def _mean_l2(method, N, seeds):
    return np.mean([l2_wedge_exact(generate(method, 2, N, derive_seed(1, N, s))) for s in range(seeds)])


@pytest.mark.slow
def test_jittered_scaling_on_s2():
    Ns = [16, 64, 256, 1024]
    means = [_mean_l2(Method.JITTERED, N, 200) for N in Ns]
    assert loglog_slope(Ns, means) == pytest.approx(-1.5, abs=0.1)
    assert all(m <= jittered_l2_bound(2, N) for m, N in zip(means, Ns))


@pytest.mark.slow
def test_random_scaling_on_s2():
    Ns = [16, 64, 256, 1024]
    means = [_mean_l2(Method.RANDOM, N, 200) for N in Ns]
    assert loglog_slope(Ns, means) == pytest.approx(-1.0, abs=0.05)
