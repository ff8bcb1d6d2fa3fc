import numpy as np
import pytest
from hypothesis import given, strategies as st

from spherebits.errors import DimensionMismatchError, InvalidParameterError
from spherebits.sphere_core import (
    cap_measure,
    colatitude_fraction,
    colatitude_quantile,
    geodesic_distance,
    make_point,
    mean_distance_Ud,
    omega_ratio,
    pairwise_geodesic,
    random_rotation,
    ratio_upper_bound,
    second_moment_Vd,
    sphere_constants,
    surface_area,
    uniform_points,
)

PI2 = np.pi ** 2

VD_CLOSED_FORMS = {
    2: 0.5 - 2.0 / PI2,
    3: 1.0 / 3.0 - 1.0 / (2.0 * PI2),
    4: 0.5 - 20.0 / (9.0 * PI2),
    5: 1.0 / 3.0 - 5.0 / (8.0 * PI2),
    6: 0.5 - 518.0 / (225.0 * PI2),
}


@pytest.mark.parametrize("d", sorted(VD_CLOSED_FORMS))
def test_second_moment_matches_closed_forms(d):
    assert abs(second_moment_Vd(d) - VD_CLOSED_FORMS[d]) < 1e-10


def test_constants_on_s2():
    consts = sphere_constants(2)
    assert consts.Omega == pytest.approx(4 * np.pi)
    assert consts.omega == pytest.approx(2 * np.pi)
    assert consts.ratio == pytest.approx(0.5)
    assert consts.Ud == pytest.approx(4.0 / 3.0, abs=1e-10)
    assert consts.cd == pytest.approx(0.25)


def test_surface_area_and_ratio():
    assert surface_area(3) == pytest.approx(2 * PI2)
    assert omega_ratio(3) == pytest.approx(2.0 / np.pi)
    for d in range(2, 51):
        assert 0.0 < omega_ratio(d) <= ratio_upper_bound(d)


def test_moments_need_d_at_least_two():
    with pytest.raises(InvalidParameterError):
        second_moment_Vd(1)
    with pytest.raises(InvalidParameterError):
        mean_distance_Ud(0)


def test_geodesic_distance_special_values():
    e1, e2 = np.eye(3)[0], np.eye(3)[1]
    assert geodesic_distance(e1, e1) == 0.0
    assert geodesic_distance(e1, -e1) == pytest.approx(1.0)
    assert geodesic_distance(e1, e2) == pytest.approx(0.5)


def test_geodesic_distance_clamps_rounding():
    x = np.array([0.6, 0.8, 0.0])
    assert geodesic_distance(x, x * (1 + 1e-15)) == pytest.approx(0.0, abs=1e-7)


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        geodesic_distance(np.array([1.0, 0.0]), np.array([1.0, 0.0, 0.0]))


def test_make_point_tolerance():
    p = make_point([0.0, 0.0, 1.0 + 1e-7])
    assert np.linalg.norm(p) == pytest.approx(1.0, abs=1e-15)
    with pytest.raises(InvalidParameterError):
        make_point([0.0, 0.0, 1.1])


@given(st.integers(0, 2 ** 32 - 1), st.integers(2, 6))
def test_geodesic_metric_axioms(seed, d):
    rng = np.random.default_rng(seed)
    x, y, z = uniform_points(d, 3, rng)
    assert geodesic_distance(x, y) == pytest.approx(geodesic_distance(y, x), abs=1e-15)
    assert geodesic_distance(x, z) <= geodesic_distance(x, y) + geodesic_distance(y, z) + 1e-12
    assert geodesic_distance(x, -y) == pytest.approx(1.0 - geodesic_distance(x, y), abs=1e-12)


@given(st.integers(0, 2 ** 32 - 1), st.integers(2, 5))
def test_rotation_preserves_distances(seed, d):
    rng = np.random.default_rng(seed)
    X = uniform_points(d, 6, rng)
    Q = random_rotation(d, rng)
    assert np.allclose(pairwise_geodesic(X @ Q.T), pairwise_geodesic(X), atol=1e-7)


def test_cap_measure():
    t = np.linspace(-1, 1, 11)
    assert np.allclose(cap_measure(t, 2), (1 - t) / 2)
    assert cap_measure(1.0, 5) == pytest.approx(0.0)
    assert cap_measure(-1.0, 5) == pytest.approx(1.0)
    assert cap_measure(0.0, 4) == pytest.approx(0.5)
    with pytest.raises(InvalidParameterError):
        cap_measure(1.5, 2)


@pytest.mark.parametrize("d", [2, 3, 7])
def test_colatitude_quantile_inverts_fraction(d):
    m = np.array([0.01, 0.25, 0.5, 0.9, 0.999])
    assert np.allclose(colatitude_fraction(colatitude_quantile(m, d), d), m, atol=1e-10)


def test_uniform_points_are_unit_and_centered():
    X = uniform_points(3, 100_000, np.random.default_rng(7))
    assert np.allclose(np.linalg.norm(X, axis=1), 1.0)
    assert np.all(np.abs(X.mean(axis=0)) < 0.02)


@pytest.mark.parametrize("d", [3, 4, 5, 8])
def test_cap_measure_complements(d):
    t = np.linspace(-1.0, 1.0, 41)
    assert np.allclose(cap_measure(t, d) + cap_measure(-t, d), 1.0, atol=1e-12)


@pytest.mark.parametrize("d", [2, 3, 5])
def test_distance_moments_by_monte_carlo(d):
    rng = np.random.default_rng(300 + d)
    M = 200_000
    X = uniform_points(d, M, rng)
    Y = uniform_points(d, M, rng)
    dist = np.arccos(np.clip(np.sum(X * Y, axis=1), -1.0, 1.0)) / np.pi
    p = uniform_points(d, 1, rng)[0]
    projection = (X @ p) ** 2

    for sample, expected in ((dist, 0.5), (dist ** 2, second_moment_Vd(d)), (projection, 1.0 / (d + 1))):
        stderr = sample.std(ddof=1) / np.sqrt(M)
        assert abs(sample.mean() - expected) <= 4.0 * stderr
