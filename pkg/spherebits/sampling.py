"""
Point-set generators: i.i.d. uniform and jittered (one uniform point per cell
of a regular partition).

All randomness comes from an integer seed. A jittered set of size N draws one
(N, d) block of uniforms; row i drives the point of cell i, so the result is
fixed by (d, N, seed) regardless of how cells are processed.
"""

import logging
from typing import List, Sequence, Tuple

import numpy as np

from .errors import InvalidParameterError, require
from .models import Method, PointSetMeta
from .onebit import PointSet
from .partition import build_partition, locate_points, sample_cells
from .sphere_core import uniform_points

logger = logging.getLogger(__name__)


def derive_seed(seed: int, *keys: int) -> int:
    """Deterministic child seed for (seed, keys...), e.g. the s-th replicate at size N"""
    state = np.random.SeedSequence([int(seed), *[int(k) for k in keys]]).generate_state(1)
    return int(state[0])


def random_set(d: int, N: int, seed: int) -> PointSet:
    """N independent uniform points on S^d"""
    require(N >= 1, f"point sets need N >= 1, got N={N}")
    rng = np.random.default_rng(seed)
    points = uniform_points(d, N, rng)
    return PointSet(points=points, meta=PointSetMeta(method=Method.RANDOM, seed=seed))


def jittered_uniforms(d: int, N: int, seed: int) -> np.ndarray:
    return np.random.default_rng(seed).random((N, d))


def jittered_set(d: int, N: int, seed: int) -> PointSet:
    """One uniform point in every cell of the regular partition of size N; row i lies in cell i"""
    require(N >= 1, f"point sets need N >= 1, got N={N}")
    P = build_partition(d, N)
    points = sample_cells(P, np.arange(N), jittered_uniforms(d, N, seed))
    return PointSet(
        points=points,
        meta=PointSetMeta(method=Method.JITTERED, seed=seed, partition_N=N),
    )


def one_point_per_cell(Z: PointSet) -> bool:
    """True when point i of a jittered set locates to cell i for every i"""
    P = build_partition(Z.d, Z.N)
    return bool(np.array_equal(locate_points(P, Z.points), np.arange(Z.N)))


def generate(method: Method, d: int, N: int, seed: int) -> PointSet:
    if method == Method.RANDOM:
        return random_set(d, N, seed)
    if method == Method.JITTERED:
        return jittered_set(d, N, seed)
    raise InvalidParameterError(f"method {method.value!r} is not a generator (use random or jittered)")


# ==================== Scaling analysis ====================

def loglog_slope(Ns: Sequence[int], values: Sequence[float]) -> float:
    """Least-squares slope of log(values) against log(Ns)"""
    require(len(Ns) >= 2 and len(Ns) == len(values), "slope needs at least two (N, value) pairs")
    v = np.asarray(values, dtype=float)
    if np.any(v <= 0.0):
        raise InvalidParameterError("log-log slope needs positive values")
    slope, _ = np.polyfit(np.log(np.asarray(Ns, dtype=float)), np.log(v), 1)
    return float(slope)


def expected_slope(method: Method, d: int) -> float:
    return -(1.0 + 1.0 / d) if method == Method.JITTERED else -1.0


def mean_and_stderr(values: Sequence[float]) -> Tuple[float, float]:
    v = np.asarray(values, dtype=float)
    if v.size < 2:
        return float(v.mean()), float('nan')
    return float(v.mean()), float(v.std(ddof=1) / np.sqrt(v.size))


def replicate_seeds(seed: int, N: int, count: int) -> List[int]:
    return [derive_seed(seed, N, s) for s in range(count)]
