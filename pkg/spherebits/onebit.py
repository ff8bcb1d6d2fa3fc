"""
Sign-linear one-bit embedding, Hamming metric, wedge/slice geometry and the
pointwise discrepancy Delta_Z(x, y).

Sign convention everywhere: sgn(0) = +1.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, Any, Optional, Tuple

import numpy as np

from .config import MC_CHUNK
from .errors import DimensionMismatchError, InvalidParameterError, require
from .models import Method, PointSetMeta, WedgeWitness
from .sphere_core import NORM_TOLERANCE, geodesic_distance, geodesic_distances, make_point

logger = logging.getLogger(__name__)


@dataclass
class PointSet:
    """N points on S^d stored as the rows of an (N, d+1) array"""
    points: np.ndarray
    meta: PointSetMeta = field(default_factory=PointSetMeta)

    def __post_init__(self):
        P = np.atleast_2d(np.asarray(self.points, dtype=float))
        require(P.shape[0] >= 1, "a point set needs at least one point")
        require(P.shape[1] >= 2, f"points need at least 2 coordinates, got {P.shape[1]}")
        norms = np.linalg.norm(P, axis=1)
        worst = float(np.max(np.abs(norms - 1.0)))
        require(
            worst <= NORM_TOLERANCE,
            f"point norms deviate from 1 by up to {worst:.3e} (tolerance {NORM_TOLERANCE})"
        )
        self.points = P / norms[:, None]

    @property
    def d(self) -> int:
        return self.points.shape[1] - 1

    @property
    def N(self) -> int:
        return self.points.shape[0]

    def __len__(self) -> int:
        return self.N

    def meta_dict(self) -> Dict[str, Any]:
        return {"d": self.d, "N": self.N, **self.meta.model_dump(mode="json")}

    def with_points(self, points: np.ndarray, method: Method = None) -> "PointSet":
        meta = self.meta.model_copy(update={"method": method}) if method else self.meta
        return PointSet(points=points, meta=meta)


@dataclass(frozen=True)
class WedgeDescriptor:
    """W_xy: normals z whose hyperplane z-perp separates x and y"""
    x: np.ndarray
    y: np.ndarray

    @classmethod
    def of(cls, x, y) -> "WedgeDescriptor":
        x = make_point(x)
        y = make_point(y)
        if x.size != y.size:
            raise DimensionMismatchError(f"wedge points live in R^{x.size} and R^{y.size}")
        return cls(x=x, y=y)

    @property
    def degenerate(self) -> bool:
        """x = y (empty wedge) or x = -y (full sphere up to measure zero)"""
        return bool(np.allclose(self.x, self.y) or np.allclose(self.x, -self.y))

    @property
    def measure(self) -> float:
        """Crofton formula: sigma(W_xy) = d(x, y)"""
        return geodesic_distance(self.x, self.y)

    def witness(self) -> WedgeWitness:
        return WedgeWitness(x=self.x.tolist(), y=self.y.tolist())


def _as_array(Z) -> np.ndarray:
    return Z.points if isinstance(Z, PointSet) else np.atleast_2d(np.asarray(Z, dtype=float))


def _check_dims(Z: np.ndarray, x: np.ndarray) -> None:
    if Z.shape[-1] != np.asarray(x).shape[-1]:
        raise DimensionMismatchError(
            f"point set lives in R^{Z.shape[-1]} but the query in R^{np.asarray(x).shape[-1]}"
        )


def sgn(v: np.ndarray) -> np.ndarray:
    """Sign with sgn(0) = +1, as int8"""
    return np.where(np.asarray(v) >= 0.0, 1, -1).astype(np.int8)


# ==================== Embedding and Hamming metric ====================

def sign_embed(Z, x: np.ndarray) -> np.ndarray:
    """phi_Z(x) = (sgn(z_j . x))_j"""
    Zp = _as_array(Z)
    x = np.asarray(x, dtype=float)
    _check_dims(Zp, x)
    return sgn(Zp @ x)


def sign_matrix(Z, X: np.ndarray) -> np.ndarray:
    """Bit vectors of many queries: row m is phi_Z(X[m])"""
    Zp = _as_array(Z)
    X = np.atleast_2d(np.asarray(X, dtype=float))
    _check_dims(Zp, X)
    return sgn(X @ Zp.T)


def hamming(a: np.ndarray, b: np.ndarray) -> float:
    """Fraction of coordinates in which two sign vectors differ"""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise InvalidParameterError(f"bit vectors of lengths {a.size} and {b.size}")
    require(a.size >= 1, "bit vectors must be non-empty")
    return float(np.mean(a != b))


def hamming_matrix(Z, X: np.ndarray) -> np.ndarray:
    """Pairwise normalized Hamming distances between the embeddings of the rows of X"""
    B = sign_matrix(Z, X).astype(float)
    N = B.shape[1]
    return (N - B @ B.T) / (2.0 * N)


# ==================== Wedges, slices, discrepancy ====================

def wedge_measure(x: np.ndarray, y: np.ndarray) -> float:
    return WedgeDescriptor.of(x, y).measure


def wedge_contains(w: WedgeDescriptor, z: np.ndarray) -> bool:
    """z in W_xy iff sgn(z.x) != sgn(z.y)"""
    z = np.asarray(z, dtype=float)
    _check_dims(w.x[None, :], z)
    return bool(sgn(np.dot(z, w.x)) != sgn(np.dot(z, w.y)))


def wedge_count(Z, x: np.ndarray, y: np.ndarray) -> int:
    """#{k : z_k in W_xy}"""
    Zp = _as_array(Z)
    _check_dims(Zp, x)
    _check_dims(Zp, y)
    return int(np.count_nonzero(sgn(Zp @ x) != sgn(Zp @ y)))


def delta(Z, x: np.ndarray, y: np.ndarray) -> float:
    """Delta_Z(x, y) = #{z_k in W_xy}/N - d(x, y)"""
    Zp = _as_array(Z)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return wedge_count(Zp, x, y) / Zp.shape[0] - geodesic_distance(x, y)


def delta_hamming(Z, x: np.ndarray, y: np.ndarray) -> float:
    """Same quantity through the embedding: d_H(phi(x), phi(y)) - d(x, y)"""
    return hamming(sign_embed(Z, x), sign_embed(Z, y)) - geodesic_distance(x, y)


def delta_pairs(Z, X: np.ndarray, Y: np.ndarray, chunk: int = MC_CHUNK) -> np.ndarray:
    """Delta_Z over many pairs (rows of X, Y), evaluated in chunks"""
    Zp = _as_array(Z)
    X = np.atleast_2d(X)
    Y = np.atleast_2d(Y)
    _check_dims(Zp, X)
    _check_dims(Zp, Y)
    out = np.empty(X.shape[0])
    ZT = Zp.T
    for start in range(0, X.shape[0], chunk):
        stop = start + chunk
        sx = (X[start:stop] @ ZT) >= 0.0
        sy = (Y[start:stop] @ ZT) >= 0.0
        out[start:stop] = np.mean(sx != sy, axis=1)
    return out - geodesic_distances(X, Y)


def slice_discrepancy(Z, x: np.ndarray, y: np.ndarray) -> float:
    """D(Z, S_xy) with S_xy = {z : z.x > 0, z.y < 0} and sigma(S_xy) = d(x, y)/2.

    Under sgn(0) = +1 the slice is {sgn(z.x) = +1, sgn(z.y) = -1}; the slices of
    (x, y) and (-x, -y) tile the wedge except on the ties z.x = 0 or z.y = 0.
    """
    Zp = _as_array(Z)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    _check_dims(Zp, x)
    _check_dims(Zp, y)
    inside = (sgn(Zp @ x) == 1) & (sgn(Zp @ y) == -1)
    return float(np.mean(inside)) - geodesic_distance(x, y) / 2.0


def symmetrize(Z: PointSet) -> PointSet:
    """Z* = Z u (-Z), of size 2N"""
    return PointSet(points=np.vstack((Z.points, -Z.points)), meta=Z.meta)


# ==================== Uniform tessellation check ====================

@dataclass
class RipCheck:
    passes: bool
    value: float
    delta_target: float
    witness: Optional[Tuple[np.ndarray, np.ndarray]] = None


def rip_sup_check(Z: PointSet, delta_target: float, estimator_budget: int,
                  rng: np.random.Generator) -> RipCheck:
    """Evidence for delta-RIP: the certified lower bound on sup|Delta_Z| stays below delta_target.

    A pass is only evidence, the search lower-bounds the supremum. A failure is
    a proof and carries the witness pair.
    """
    require(0.0 < delta_target <= 1.0, f"delta_target must lie in (0, 1], got {delta_target}")
    if delta_target >= 1.0:
        # |Delta_Z| <= 1 always, both terms lie in [0, 1]
        return RipCheck(passes=True, value=float('nan'), delta_target=delta_target)

    from .discrepancy import sup_wedge_lower

    report = sup_wedge_lower(Z, estimator_budget, rng)
    if report.value < delta_target:
        return RipCheck(passes=True, value=report.value, delta_target=delta_target)
    logger.info(f"RIP check failed: sup|Delta| >= {report.value:.6f} >= {delta_target}")
    witness = (np.asarray(report.witness.x), np.asarray(report.witness.y))
    return RipCheck(passes=False, value=report.value, delta_target=delta_target, witness=witness)
