"""
Regular (equal-area, bounded-diameter) partitions of S^d.

Recursive zonal construction: two polar caps of measure 1/N and a stack of
collars between them; every collar is split into near-square cells by an
equal-area partition of S^(d-1) applied to its angular factor. Colatitude is
measured from the north pole e_(d+1), so a point is (sin(phi) u, cos(phi))
with u on S^(d-1). On S^1 cells are equal arcs of the angle atan2(x2, x1).
"""

import json
import logging
import threading
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Dict, Any, List, Optional, Tuple

import numpy as np
from cachetools import LRUCache, cached
from scipy import optimize
from scipy.spatial.distance import cdist

from .config import PARTITION_CACHE_SIZE
from .errors import InvalidParameterError, NumericalError, require
from .sphere_core import (
    colatitude_fraction,
    colatitude_quantile,
    surface_area,
)

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * np.pi
ROOT_XTOL = 1e-14
# sampled points stay this many radians inside their cell
EDGE_MARGIN = 1e-12


@dataclass(frozen=True)
class Partition:
    """Immutable equal-area partition of S^d into N cells.

    For d >= 2 the sphere is cut into colatitude bands [edges[k], edges[k+1]);
    band k holds counts[k] cells. nested[k] is the partition of S^(d-1) used
    for the angular factor of band k, or None when the band is a single cell
    (polar caps, the whole sphere). For d == 1 the cells are N equal arcs.
    """
    d: int
    N: int
    edges: Tuple[float, ...]
    counts: Tuple[int, ...]
    nested: Tuple[Optional["Partition"], ...]

    @cached_property
    def offsets(self) -> np.ndarray:
        """First cell index of every band"""
        return np.concatenate(([0], np.cumsum(self.counts)[:-1])).astype(int)

    @cached_property
    def band_ends(self) -> np.ndarray:
        return np.cumsum(self.counts).astype(int)

    @cached_property
    def band_measures(self) -> np.ndarray:
        """Polar cap measure at every band edge"""
        return colatitude_fraction(np.asarray(self.edges), self.d)

    @property
    def n_bands(self) -> int:
        return len(self.counts)

    def band_of(self, i: int) -> int:
        """Band holding cell i"""
        self._check_index(i)
        return int(np.searchsorted(self.band_ends, i, side='right'))

    def _check_index(self, i: int) -> None:
        if not (0 <= int(i) < self.N):
            raise InvalidParameterError(f"cell index {i} outside 0..{self.N - 1}")

    # ==================== Serialization ====================

    def to_dict(self) -> Dict[str, Any]:
        return {
            "d": self.d,
            "N": self.N,
            "bands": [
                [self.edges[k], self.edges[k + 1], self.counts[k]]
                for k in range(len(self.edges) - 1)
            ],
            "nested": [None if p is None else p.to_dict() for p in self.nested],
        }

    def to_json(self, indent: int = None) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Partition":
        d = int(data["d"])
        N = int(data["N"])
        if d == 1:
            return cls(d=1, N=N, edges=(), counts=(N,), nested=())
        bands = data["bands"]
        edges = tuple([float(bands[0][0])] + [float(b[1]) for b in bands])
        counts = tuple(int(b[2]) for b in bands)
        nested = tuple(None if p is None else cls.from_dict(p) for p in data["nested"])
        return cls(d=d, N=N, edges=edges, counts=counts, nested=nested)

    @classmethod
    def from_json(cls, text: str) -> "Partition":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class DiameterCertificate:
    cell: int
    sampled: float      # max pairwise distance over sampled cell points (lower estimate)
    analytic: float     # band-width bound (upper bound)
    samples: int


# ==================== Construction ====================

def _round_half_up(x: float) -> int:
    return int(np.floor(x + 0.5))


def _colatitude_for_measure(d: int, m: float) -> float:
    """Colatitude of the polar cap with normalized measure m, by root solving"""
    if m <= 0.0:
        return 0.0
    if m >= 1.0:
        return float(np.pi)
    try:
        return float(optimize.brentq(
            lambda phi: float(colatitude_fraction(phi, d)) - m,
            0.0, np.pi, xtol=ROOT_XTOL, rtol=4 * np.finfo(float).eps, maxiter=500
        ))
    except (RuntimeError, ValueError) as e:
        raise NumericalError(f"band edge for measure {m} on S^{d} not found: {e}")


def _collar_counts(d: int, N: int, c_polar: float) -> List[int]:
    """Cells per band: [1, collars..., 1], collar counts rounded to preserve N"""
    ideal_angle = (surface_area(d) / N) ** (1.0 / d)
    n_collars = max(1, _round_half_up((np.pi - 2.0 * c_polar) / ideal_angle))
    fitting = (np.pi - 2.0 * c_polar) / n_collars

    ideal = []
    for k in range(1, n_collars + 1):
        upper = float(colatitude_fraction(c_polar + k * fitting, d))
        lower = float(colatitude_fraction(c_polar + (k - 1) * fitting, d))
        ideal.append((upper - lower) * N)

    counts = []
    carry = 0.0
    for r in [1.0] + ideal + [1.0]:
        n = _round_half_up(r + carry)
        carry += r - n
        counts.append(n)
    if sum(counts) != N:
        raise NumericalError(f"collar rounding produced {sum(counts)} cells instead of {N}")
    return counts


@cached(cache=LRUCache(maxsize=PARTITION_CACHE_SIZE), lock=threading.Lock())
def _build(d: int, N: int) -> Partition:
    if d == 1:
        return Partition(d=1, N=N, edges=(), counts=(N,), nested=())
    if N == 1:
        return Partition(d=d, N=1, edges=(0.0, float(np.pi)), counts=(1,), nested=(None,))
    if N == 2:
        return Partition(d=d, N=2, edges=(0.0, float(np.pi) / 2, float(np.pi)),
                         counts=(1, 1), nested=(None, None))

    c_polar = _colatitude_for_measure(d, 1.0 / N)
    counts = _collar_counts(d, N, c_polar)

    edges = [0.0, c_polar]
    subtotal = 1
    for n in counts[1:-1]:
        subtotal += n
        edges.append(_colatitude_for_measure(d, subtotal / N))
    edges.append(float(np.pi))

    nested = tuple(None if n <= 1 else _build(d - 1, n) for n in counts)
    return Partition(d=d, N=N, edges=tuple(edges), counts=tuple(counts), nested=nested)


def build_partition(d: int, N: int) -> Partition:
    """Equal-area partition of S^d into N cells (deterministic, cached by (d, N))"""
    require(d >= 2, f"partitions are built for d >= 2, got d={d}")
    require(N >= 1, f"partition size must be at least 1, got N={N}")
    P = _build(d, N)
    logger.debug(f"Partition of S^{d} into {N} cells uses {P.n_bands} bands")
    return P


# ==================== Locating ====================

def locate_points(P: Partition, X: np.ndarray) -> np.ndarray:
    """Cell index of every row of X (half-open bands [lo, hi))"""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] != P.d + 1:
        raise InvalidParameterError(f"points in R^{X.shape[1]} do not lie on S^{P.d}")
    if P.d == 1:
        theta = np.mod(np.arctan2(X[:, 1], X[:, 0]), TWO_PI)
        return np.clip(np.floor(theta * P.N / TWO_PI).astype(int), 0, P.N - 1)

    rho = np.linalg.norm(X[:, :-1], axis=1)
    phi = np.arctan2(rho, X[:, -1])
    inner_edges = np.asarray(P.edges[1:-1])
    band = np.searchsorted(inner_edges, phi, side='right')

    out = np.empty(X.shape[0], dtype=int)
    for b in np.unique(band):
        mask = band == b
        sub = P.nested[b]
        if sub is None:
            out[mask] = P.offsets[b]
            continue
        r = rho[mask]
        U = X[mask, :-1] / np.where(r > 0.0, r, 1.0)[:, None]
        out[mask] = P.offsets[b] + locate_points(sub, U)
    return out


def cell_locate(P: Partition, x: np.ndarray) -> int:
    """Index of the cell containing x"""
    return int(locate_points(P, np.asarray(x, dtype=float)[None, :])[0])


# ==================== Sampling ====================

def _whole(d: int) -> Partition:
    return _build(d, 1)


def sample_cells(P: Partition, idx: np.ndarray, U: np.ndarray) -> np.ndarray:
    """Uniform points in the given cells, driven by uniforms U of shape (n, d).

    Each level of the recursion consumes one column of U: the colatitude is
    drawn from the band density (proportional to sin^(d-1) phi) by inverse CDF,
    the last column picks the angle on S^1.
    """
    idx = np.asarray(idx, dtype=int)
    U = np.atleast_2d(np.asarray(U, dtype=float))
    if P.d == 1:
        m = min(EDGE_MARGIN * P.N / TWO_PI, 0.25)
        theta = TWO_PI * (idx + np.clip(U[:, 0], m, 1.0 - m)) / P.N
        return np.column_stack((np.cos(theta), np.sin(theta)))

    band = np.searchsorted(P.band_ends, idx, side='right')
    edges = np.asarray(P.edges)
    lo, hi = edges[band], edges[band + 1]
    m_lo, m_hi = P.band_measures[band], P.band_measures[band + 1]
    phi = colatitude_quantile(m_lo + U[:, 0] * (m_hi - m_lo), P.d)
    margin = np.minimum(EDGE_MARGIN, (hi - lo) / 4.0)
    phi = np.clip(phi, lo + margin, hi - margin)

    angular = np.empty((idx.size, P.d))
    for b in np.unique(band):
        mask = band == b
        sub = P.nested[b]
        if sub is None:
            angular[mask] = sample_cells(_whole(P.d - 1), np.zeros(int(mask.sum()), dtype=int), U[mask, 1:])
        else:
            angular[mask] = sample_cells(sub, idx[mask] - P.offsets[b], U[mask, 1:])

    return np.column_stack((np.sin(phi)[:, None] * angular, np.cos(phi)))


def cell_sample(P: Partition, i: int, rng: np.random.Generator) -> np.ndarray:
    """One uniform point in cell i"""
    P._check_index(i)
    return sample_cells(P, np.array([i]), rng.random((1, P.d)))[0]


def sample_in_cell(P: Partition, i: int, n: int, rng: np.random.Generator) -> np.ndarray:
    """n independent uniform points in cell i"""
    P._check_index(i)
    return sample_cells(P, np.full(n, i, dtype=int), rng.random((n, P.d)))


# ==================== Diameters ====================

def _arc_diameter(N: int) -> float:
    return float(2.0 * np.sin(min(TWO_PI / N, np.pi) / 2.0))


def _band_diameter(P: Partition, b: int, inner: Optional[float]) -> float:
    """Diameter bound for a cell of band b whose angular factor has diameter <= inner.

    inner is None when the band is a single cell (polar caps, whole sphere).
    """
    lo, hi = P.edges[b], P.edges[b + 1]
    if inner is None:
        if lo == 0.0 and hi >= np.pi:
            return 2.0
        if lo == 0.0:
            return float(2.0 * np.sin(hi)) if hi <= np.pi / 2 else 2.0
        if hi >= np.pi:
            return float(2.0 * np.sin(np.pi - lo)) if np.pi - lo <= np.pi / 2 else 2.0
        inner = 2.0

    s_max = 1.0 if lo <= np.pi / 2 <= hi else max(np.sin(lo), np.sin(hi))
    return float(min(2.0, 2.0 * np.sin((hi - lo) / 2.0) + s_max * inner))


def analytic_diameter(P: Partition, i: int) -> float:
    """Upper bound on the Euclidean diameter of cell i from its band widths"""
    P._check_index(i)
    if P.d == 1:
        return _arc_diameter(P.N)
    b = P.band_of(i)
    sub = P.nested[b]
    inner = None if sub is None else analytic_diameter(sub, i - int(P.offsets[b]))
    return _band_diameter(P, b, inner)


@lru_cache(maxsize=256)
def max_analytic_diameter(P: Partition) -> float:
    """Largest analytic_diameter over all cells, one evaluation per band"""
    if P.d == 1:
        return _arc_diameter(P.N)
    best = 0.0
    for b, sub in enumerate(P.nested):
        if P.counts[b] == 0:
            continue
        inner = None if sub is None else max_analytic_diameter(sub)
        best = max(best, _band_diameter(P, b, inner))
    return best


def _max_pairwise_distance(X: np.ndarray, block: int = 1024) -> float:
    best = 0.0
    for start in range(0, X.shape[0], block):
        best = max(best, float(cdist(X[start:start + block], X).max()))
    return best


def diameter_certificate(P: Partition, i: int, samples: int,
                         rng: np.random.Generator = None) -> DiameterCertificate:
    """Sampled lower estimate and analytic upper bound of diam(S_i)"""
    require(samples >= 2, f"diameter estimate needs at least 2 samples, got {samples}")
    rng = rng if rng is not None else np.random.default_rng(0)
    X = sample_in_cell(P, i, samples, rng)
    return DiameterCertificate(
        cell=int(i),
        sampled=_max_pairwise_distance(X),
        analytic=analytic_diameter(P, i),
        samples=int(samples),
    )


# ==================== Wedge boundaries ====================

def _great_sphere_points(x: np.ndarray, n: int, rng: np.random.Generator) -> np.ndarray:
    G = rng.standard_normal((n, x.size))
    G -= np.outer(G @ x, x)
    return G / np.linalg.norm(G, axis=1, keepdims=True)


def cells_meeting_wedge_boundary(P: Partition, x: np.ndarray, y: np.ndarray,
                                 samples: int, rng: np.random.Generator) -> int:
    """Number of cells hit by the great spheres x-perp and y-perp bounding W_xy"""
    boundary = np.vstack((
        _great_sphere_points(np.asarray(x, dtype=float), samples, rng),
        _great_sphere_points(np.asarray(y, dtype=float), samples, rng),
    ))
    return int(np.unique(locate_points(P, boundary)).size)
