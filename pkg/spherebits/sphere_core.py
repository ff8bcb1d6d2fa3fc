"""
Sphere geometry, metrics, constants and moment integrals.

Points on S^d are numpy vectors of length d+1. Distances use the normalized
geodesic metric d(x, y) = arccos(x.y)/pi, so antipodal points are at distance 1.
"""

import logging
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy import integrate, special

from .config import QUAD_TOL
from .errors import DimensionMismatchError, NumericalError, require
from .models import SphereConstants

logger = logging.getLogger(__name__)

# Alias for readability; a Point is a unit vector in R^(d+1)
Point = np.ndarray

NORM_TOLERANCE = 1e-6


def make_point(coords) -> Point:
    """Validate and renormalize a coordinate vector onto the sphere"""
    v = np.asarray(coords, dtype=float).reshape(-1)
    require(v.size >= 2, f"a point needs at least 2 coordinates, got {v.size}")
    norm = np.linalg.norm(v)
    require(
        abs(norm - 1.0) <= NORM_TOLERANCE,
        f"point norm {norm:.12g} deviates from 1 by more than {NORM_TOLERANCE}"
    )
    return v / norm


def normalize_rows(X: np.ndarray) -> np.ndarray:
    """Project the rows of X onto the unit sphere"""
    return X / np.linalg.norm(X, axis=-1, keepdims=True)


def _check_same_dim(x: np.ndarray, y: np.ndarray) -> None:
    if x.shape[-1] != y.shape[-1]:
        raise DimensionMismatchError(
            f"points live in R^{x.shape[-1]} and R^{y.shape[-1]}"
        )


# ==================== Metrics ====================

def geodesic_distance(x: Point, y: Point) -> float:
    """Normalized geodesic distance arccos(x.y)/pi in [0, 1]"""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    _check_same_dim(x, y)
    return float(np.arccos(np.clip(np.dot(x, y), -1.0, 1.0)) / np.pi)


def geodesic_distances(X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Row-wise geodesic distances between two (M, d+1) arrays"""
    _check_same_dim(X, Y)
    t = np.einsum('ij,ij->i', X, Y)
    return np.arccos(np.clip(t, -1.0, 1.0)) / np.pi


def pairwise_geodesic(Z: np.ndarray, W: np.ndarray = None) -> np.ndarray:
    """Matrix of geodesic distances between rows of Z and rows of W (default Z)"""
    if W is None:
        D = np.arccos(np.clip(Z @ Z.T, -1.0, 1.0)) / np.pi
        np.fill_diagonal(D, 0.0)
        return D
    _check_same_dim(Z, W)
    return np.arccos(np.clip(Z @ W.T, -1.0, 1.0)) / np.pi


def pairwise_euclidean(Z: np.ndarray, W: np.ndarray = None) -> np.ndarray:
    """Matrix of Euclidean distances between unit vectors, via 2 - 2 x.y"""
    if W is None:
        E = np.sqrt(np.clip(2.0 - 2.0 * (Z @ Z.T), 0.0, 4.0))
        np.fill_diagonal(E, 0.0)
        return E
    _check_same_dim(Z, W)
    return np.sqrt(np.clip(2.0 - 2.0 * (Z @ W.T), 0.0, 4.0))


# ==================== Constants ====================

def surface_area(d: int) -> float:
    """Unnormalized surface measure Omega of S^d"""
    require(d >= 1, f"sphere dimension must be at least 1, got d={d}")
    return float(2.0 * np.exp((d + 1) / 2 * np.log(np.pi) - special.gammaln((d + 1) / 2)))


def omega_ratio(d: int) -> float:
    """omega/Omega = Gamma((d+1)/2) / (Gamma(d/2) sqrt(pi))"""
    require(d >= 1, f"sphere dimension must be at least 1, got d={d}")
    return float(np.exp(special.gammaln((d + 1) / 2) - special.gammaln(d / 2)) / np.sqrt(np.pi))


def ratio_upper_bound(d: int) -> float:
    return float(np.sqrt(d / (2.0 * np.pi)))


def _moment_integral(d: int, f: Callable[[float], float], name: str) -> float:
    """(omega/Omega) * integral_0^pi f(phi) sin^(d-1)(phi) dphi, checked against QUAD_TOL"""
    value, abserr = integrate.quad(
        lambda phi: f(phi) * np.sin(phi) ** (d - 1),
        0.0, np.pi,
        epsabs=QUAD_TOL, epsrel=QUAD_TOL, limit=200
    )
    if abserr > 10 * QUAD_TOL:
        raise NumericalError(
            f"quadrature for {name} at d={d} did not converge: achieved error {abserr:.3e}"
        )
    if abserr > QUAD_TOL:
        logger.warning(f"Quadrature for {name} at d={d} reached error {abserr:.3e}")
    return omega_ratio(d) * value


@lru_cache(maxsize=128)
def second_moment_Vd(d: int) -> float:
    """V_d = E d(x,y)^2 for independent uniform x, y on S^d"""
    require(d >= 2, f"V_d is defined here for d >= 2, got d={d}")
    return _moment_integral(d, lambda phi: phi * phi, "V_d") / np.pi ** 2


@lru_cache(maxsize=128)
def mean_distance_Ud(d: int) -> float:
    """U_d = E ||x - y|| for independent uniform x, y on S^d"""
    require(d >= 2, f"U_d is defined here for d >= 2, got d={d}")
    return _moment_integral(d, lambda phi: 2.0 * np.sin(phi / 2.0), "U_d")


@lru_cache(maxsize=128)
def sphere_constants(d: int) -> SphereConstants:
    """All sphere constants for S^d in one record"""
    require(d >= 2, f"sphere constants need d >= 2, got d={d}")
    ratio = omega_ratio(d)
    Omega = surface_area(d)
    return SphereConstants(
        d=d,
        Omega=Omega,
        omega=ratio * Omega,
        ratio=ratio,
        Vd=second_moment_Vd(d),
        Ud=mean_distance_Ud(d),
        cd=ratio / d,
    )


# ==================== Caps ====================

def cap_measure(t, d: int):
    """Normalized measure of the cap {z : z.x >= t}; vectorized over t.

    Equals (omega/Omega) * integral_t^1 (1-u^2)^((d-2)/2) du, written as the
    regularized incomplete beta function I_{(1-t)/2}(d/2, d/2).
    """
    require(d >= 1, f"sphere dimension must be at least 1, got d={d}")
    t_arr = np.asarray(t, dtype=float)
    require(
        bool(np.all((t_arr >= -1.0) & (t_arr <= 1.0))),
        "cap height t must lie in [-1, 1]"
    )
    value = special.betainc(d / 2.0, d / 2.0, (1.0 - t_arr) / 2.0)
    return float(value) if value.ndim == 0 else value


def colatitude_fraction(phi, d: int):
    """Normalized measure of the polar cap of colatitude phi on S^d"""
    s = np.sin(np.asarray(phi, dtype=float) / 2.0) ** 2
    return special.betainc(d / 2.0, d / 2.0, np.clip(s, 0.0, 1.0))


def colatitude_quantile(m, d: int):
    """Inverse of colatitude_fraction: colatitude whose polar cap has measure m"""
    s = special.betaincinv(d / 2.0, d / 2.0, np.clip(np.asarray(m, dtype=float), 0.0, 1.0))
    return 2.0 * np.arcsin(np.sqrt(np.clip(s, 0.0, 1.0)))


# ==================== Random points ====================

def uniform_points(d: int, n: int, rng: np.random.Generator) -> np.ndarray:
    """n independent uniform points on S^d (Gaussian normalization)"""
    require(d >= 1, f"sphere dimension must be at least 1, got d={d}")
    G = rng.standard_normal((n, d + 1))
    norms = np.linalg.norm(G, axis=1, keepdims=True)
    # zero rows have probability zero but cannot be normalized
    while np.any(norms == 0.0):
        bad = (norms[:, 0] == 0.0)
        G[bad] = rng.standard_normal((int(bad.sum()), d + 1))
        norms = np.linalg.norm(G, axis=1, keepdims=True)
    return G / norms


def uniform_point(d: int, rng: np.random.Generator) -> Point:
    """One uniform point on S^d"""
    return uniform_points(d, 1, rng)[0]


def random_rotation(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed orthogonal matrix acting on R^(d+1)"""
    A = rng.standard_normal((d + 1, d + 1))
    Q, R = np.linalg.qr(A)
    return Q * np.sign(np.diag(R))
