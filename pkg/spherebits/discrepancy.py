"""
Discrepancy engines for wedges, caps and slices.

- exact L2 through the Stolarsky identities (wedges and caps)
- Monte-Carlo L2 estimators with standard errors
- a certified lower bound on sup|Delta_Z| (every reported value is |Delta_Z|
  at an explicit witness pair)
- an upper bound on sup|Delta_Z| through an epsilon-approximating family of
  interior/exterior wedges over a greedy net

The two sup engines bracket the L-infinity wedge discrepancy; neither computes it.
"""

import logging
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Tuple, List

import numpy as np
from cachetools import LRUCache, cached
from scipy import integrate

from .config import DEFAULT_THREADS, MAX_FAMILY_PAIRS, MC_CHUNK
from .energy import wedge_energy
from .errors import ApproxFamilyTooLargeError, NumericalError, require
from .models import DiscrepancyReport, Family, Mode, WedgeWitness
from .onebit import PointSet, delta_pairs
from .partition import build_partition, max_analytic_diameter, sample_cells
from .sphere_core import (
    cap_measure,
    normalize_rows,
    omega_ratio,
    pairwise_euclidean,
    second_moment_Vd,
    sphere_constants,
    uniform_points,
)

logger = logging.getLogger(__name__)

SUP_ROUND = 1000
SUP_RANDOM = 400
SUP_STRUCTURED = 300
SUP_REFINE_ITERS = 10
SUP_REFINE_PROPOSALS = 30

FAMILY_MAX_POOL = 200_000
FAMILY_THETA_GRID = 513
FAMILY_QUAD_TOL = 1e-10


# ==================== Exact L2 ====================

def l2_wedge_exact(Z: PointSet) -> float:
    """||Delta_Z||_2^2 = (1/N^2) sum (1/2 - d(z_i,z_j))^2 - (V_d - 1/4)"""
    return wedge_energy(Z) - (second_moment_Vd(Z.d) - 0.25)


def l2_cap_exact(Z: PointSet) -> float:
    """Squared L2 cap discrepancy c_d (U_d - (1/N^2) sum ||z_i - z_j||)"""
    consts = sphere_constants(Z.d)
    mean_distance = float(np.mean(pairwise_euclidean(Z.points)))
    return consts.cd * (consts.Ud - mean_distance)


# ==================== Monte-Carlo L2 ====================

def _chunk_sizes(M: int, chunk: int) -> List[int]:
    sizes = [chunk] * (M // chunk)
    if M % chunk:
        sizes.append(M % chunk)
    return sizes


def _run_chunks(fn, sizes: List[int], rng: np.random.Generator, threads: int) -> Tuple[float, float]:
    """Sum and sum of squares of per-sample values, chunk k on child stream k, reduced in order"""
    streams = rng.spawn(len(sizes))
    jobs = list(zip(sizes, streams))
    if threads > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda job: fn(*job), jobs))
    else:
        parts = [fn(*job) for job in jobs]
    total = 0.0
    total_sq = 0.0
    for s, ss in parts:
        total += s
        total_sq += ss
    return total, total_sq


def _mean_and_stderr(total: float, total_sq: float, M: int) -> Tuple[float, float]:
    mean = total / M
    var = max(total_sq - M * mean * mean, 0.0) / (M - 1)
    return mean, float(np.sqrt(var / M))


def l2_wedge_montecarlo(Z: PointSet, M: int, rng: np.random.Generator,
                        threads: int = DEFAULT_THREADS) -> Tuple[float, float]:
    """Mean of Delta_Z(x,y)^2 over M uniform pairs, with its standard error"""
    require(M >= 2, f"Monte-Carlo needs at least 2 samples, got M={M}")
    d = Z.d

    def chunk(n: int, stream: np.random.Generator) -> Tuple[float, float]:
        X = uniform_points(d, n, stream)
        Y = uniform_points(d, n, stream)
        v = delta_pairs(Z, X, Y) ** 2
        return float(np.sum(v)), float(np.sum(v * v))

    total, total_sq = _run_chunks(chunk, _chunk_sizes(M, MC_CHUNK), rng, threads)
    estimate, stderr = _mean_and_stderr(total, total_sq, M)
    logger.debug(f"Wedge L2 Monte-Carlo over {M} pairs: {estimate:.6g} +/- {stderr:.2g}")
    return estimate, stderr


def l2_cap_montecarlo(Z: PointSet, M: int, rng: np.random.Generator,
                      threads: int = DEFAULT_THREADS) -> Tuple[float, float]:
    """Integral over t in [-1,1] and x of (cap count/N - cap measure)^2, by Monte Carlo"""
    require(M >= 2, f"Monte-Carlo needs at least 2 samples, got M={M}")
    d = Z.d
    ZT = Z.points.T

    def chunk(n: int, stream: np.random.Generator) -> Tuple[float, float]:
        X = uniform_points(d, n, stream)
        t = stream.uniform(-1.0, 1.0, n)
        counts = np.mean((X @ ZT) >= t[:, None], axis=1)
        # the t-range has length 2
        v = 2.0 * (counts - cap_measure(t, d)) ** 2
        return float(np.sum(v)), float(np.sum(v * v))

    total, total_sq = _run_chunks(chunk, _chunk_sizes(M, MC_CHUNK), rng, threads)
    return _mean_and_stderr(total, total_sq, M)


def wedge_exact_report(Z: PointSet) -> DiscrepancyReport:
    return DiscrepancyReport(family=Family.WEDGE, mode=Mode.EXACT_STOLARSKY,
                             value=l2_wedge_exact(Z), z_meta=Z.meta_dict())


def cap_exact_report(Z: PointSet) -> DiscrepancyReport:
    return DiscrepancyReport(family=Family.CAP, mode=Mode.EXACT_STOLARSKY,
                             value=l2_cap_exact(Z), z_meta=Z.meta_dict())


def montecarlo_report(Z: PointSet, family: Family, M: int, seed: int,
                      threads: int = DEFAULT_THREADS) -> DiscrepancyReport:
    rng = np.random.default_rng(seed)
    if family == Family.CAP:
        value, stderr = l2_cap_montecarlo(Z, M, rng, threads)
    else:
        value, stderr = l2_wedge_montecarlo(Z, M, rng, threads)
    return DiscrepancyReport(family=family, mode=Mode.MONTE_CARLO, value=value,
                             stderr=stderr, samples=M, seed=seed, z_meta=Z.meta_dict())


# ==================== Sup lower bound ====================

def _tangent_noise(X: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    G = rng.standard_normal(X.shape)
    G -= np.sum(G * X, axis=1)[:, None] * X
    return G


def _structured_pairs(Zp: np.ndarray, n: int, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
    """Wedges whose boundary hyperplanes pass close to points of Z.

    x = v + a z_k and y = v' - b z_l with v, v' tangent at z_k, z_l; when k = l
    and v = v' this is a thin wedge around z_k.
    """
    N = Zp.shape[0]
    k = rng.integers(0, N, n)
    same = rng.random(n) < 0.5
    l = np.where(same, k, rng.integers(0, N, n))
    zk, zl = Zp[k], Zp[l]
    vk = normalize_rows(_tangent_noise(zk, rng))
    vl = normalize_rows(_tangent_noise(zl, rng))
    vl = np.where(same[:, None], vk, vl)
    scale = 10.0 ** rng.uniform(-4.0, 0.0, n)
    a = scale * rng.random(n)
    b = scale * rng.random(n)
    X = normalize_rows(vk + a[:, None] * zk)
    Y = normalize_rows(vl - b[:, None] * zl)
    return X, Y


@dataclass
class _SearchState:
    x: np.ndarray
    y: np.ndarray
    value: float
    sigma: float = 0.1

    def offer(self, X: np.ndarray, Y: np.ndarray, values: np.ndarray) -> bool:
        k = int(np.argmax(values))
        if values[k] > self.value:
            self.x, self.y, self.value = X[k].copy(), Y[k].copy(), float(values[k])
            return True
        return False


def _refine(Zp: np.ndarray, state: _SearchState, rng: np.random.Generator) -> None:
    """Coordinate ascent: perturb x or y along the sphere, keep improvements"""
    for _ in range(SUP_REFINE_ITERS):
        n = SUP_REFINE_PROPOSALS
        X = np.repeat(state.x[None, :], n, axis=0)
        Y = np.repeat(state.y[None, :], n, axis=0)
        move_x = rng.random(n) < 0.5
        steps = state.sigma * _tangent_noise(np.where(move_x[:, None], X, Y), rng)
        X = np.where(move_x[:, None], normalize_rows(X + steps), X)
        Y = np.where(move_x[:, None], Y, normalize_rows(Y + steps))
        values = np.abs(delta_pairs(Zp, X, Y))
        if state.offer(X, Y, values):
            state.sigma = min(1.0, 1.5 * state.sigma)
        else:
            state.sigma = max(1e-7, 0.5 * state.sigma)


def sup_wedge_lower(Z: PointSet, budget: int, rng: np.random.Generator) -> DiscrepancyReport:
    """Certified lower bound on sup |Delta_Z| with its witness pair.

    The search runs in rounds of 1000 evaluations (random pairs, wedges with
    boundaries near points of Z, local refinement of the incumbent); budget is
    rounded up to whole rounds. Round r always uses child stream r of rng, so
    a larger budget extends the same search and never reports less.
    """
    require(budget >= 1, f"search budget must be at least 1, got {budget}")
    Zp = Z.points
    d = Z.d
    rounds = -(-budget // SUP_ROUND)
    streams = rng.spawn(rounds)

    state = _SearchState(x=Zp[0], y=Zp[0], value=0.0)
    for r, stream in enumerate(streams):
        X = uniform_points(d, SUP_RANDOM, stream)
        Y = uniform_points(d, SUP_RANDOM, stream)
        state.offer(X, Y, np.abs(delta_pairs(Zp, X, Y)))

        X, Y = _structured_pairs(Zp, SUP_STRUCTURED, stream)
        state.offer(X, Y, np.abs(delta_pairs(Zp, X, Y)))

        _refine(Zp, state, stream)
        logger.debug(f"Sup search round {r}: best |Delta| = {state.value:.6g}")

    evaluations = rounds * SUP_ROUND
    logger.info(f"Sup lower bound after {evaluations} evaluations: {state.value:.6g}")
    return DiscrepancyReport(
        family=Family.WEDGE,
        mode=Mode.SUP_LOWER,
        value=state.value,
        samples=evaluations,
        witness=WedgeWitness(x=state.x.tolist(), y=state.y.tolist()),
        z_meta=Z.meta_dict(),
        note="certified lower bound: |Delta_Z| evaluated at the witness pair",
    )


# ==================== Approximating family ====================

def _radius_of_uniform(v: float, d: int) -> float:
    """Radius of the 2-D projection of a uniform point on S^d; v uniform on [0, 1]"""
    return float(np.sqrt(max(0.0, 1.0 - v ** (2.0 / (d - 1)))))


def _half_width(r: float, gamma: float) -> float:
    """Half-width of the arc {psi : r cos(psi) >= gamma} on the circle of radius r"""
    if r <= gamma:
        return 0.0
    return float(np.arccos(gamma / r))


def _radial_expectation(d: int, gamma: float, shift: float) -> float:
    """E over the projection radius of max(0, 2 a(r) - shift) / pi"""
    kinks = [(1.0 - gamma ** 2) ** ((d - 1) / 2.0)]
    if 0.0 < shift < np.pi:
        r_kink = gamma / np.cos(shift / 2.0)
        if r_kink < 1.0:
            kinks.append((1.0 - r_kink ** 2) ** ((d - 1) / 2.0))
    kinks = sorted(k for k in kinks if 0.0 < k < 1.0)

    def integrand(v: float) -> float:
        a = _half_width(_radius_of_uniform(v, d), gamma)
        return max(0.0, 2.0 * a - shift)

    value, abserr = integrate.quad(integrand, 0.0, 1.0, points=kinks or None,
                                   epsabs=FAMILY_QUAD_TOL, epsrel=FAMILY_QUAD_TOL, limit=200)
    if abserr > 100 * FAMILY_QUAD_TOL:
        raise NumericalError(f"belt quadrature did not converge: achieved error {abserr:.3e}")
    return value / np.pi


def family_region_measures(d: int, gamma: float, theta: float) -> Tuple[float, float]:
    """sigma(W^int(gamma)) and sigma(W^ext(gamma)) for net points at angle theta.

    Only the projection of p onto span(x, y) matters; on the circle of radius r
    each belt condition is an arc, so both measures are 1-D integrals over r.
    """
    require(d >= 2, f"approximating families need d >= 2, got d={d}")
    interior = _radial_expectation(d, gamma, np.pi - theta)
    exterior = 1.0 - _radial_expectation(d, gamma, theta)
    return interior, exterior


@cached(cache=LRUCache(maxsize=16), lock=threading.Lock())
def _measure_table(d: int, gamma: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    grid = np.linspace(0.0, np.pi, FAMILY_THETA_GRID)
    table = np.array([family_region_measures(d, gamma, th) for th in grid])
    return grid, table[:, 0], table[:, 1]


@dataclass
class ApproxFamily:
    """Interior/exterior wedges W^int(gamma), W^ext(gamma) over all ordered net pairs"""
    d: int
    epsilon: float
    gamma: float
    net: np.ndarray

    @property
    def net_size(self) -> int:
        return self.net.shape[0]

    @property
    def cardinality(self) -> int:
        return 2 * self.net_size ** 2

    def nearest(self, P: np.ndarray) -> np.ndarray:
        """Index of the nearest net point for every row of P"""
        P = np.atleast_2d(P)
        return np.argmax(P @ self.net.T, axis=1)

    def covering_radius(self, probes: np.ndarray) -> float:
        best = np.max(probes @ self.net.T, axis=1)
        return float(np.sqrt(max(0.0, 2.0 - 2.0 * float(np.min(best)))))

    def interior_contains(self, i: int, j: int, P: np.ndarray) -> np.ndarray:
        px, py = P @ self.net[i], P @ self.net[j]
        g = self.gamma
        return ((px >= g) & (py <= -g)) | ((px <= -g) & (py >= g))

    def exterior_contains(self, i: int, j: int, P: np.ndarray) -> np.ndarray:
        px, py = P @ self.net[i], P @ self.net[j]
        g = self.gamma
        return ((px >= -g) & (py <= g)) | ((px <= g) & (py >= -g))

    def measure_bounds(self, theta: np.ndarray):
        """Bracketing values of sigma(W^int), sigma(W^ext) from the tabulated grid.

        Both measures increase with theta, so the grid values either side of
        theta bound them from below and above.
        """
        grid, interior, exterior = _measure_table(self.d, self.gamma)
        hi = np.clip(np.searchsorted(grid, theta, side='left'), 0, grid.size - 1)
        lo = np.clip(np.where(grid[hi] == theta, hi, hi - 1), 0, grid.size - 1)
        return interior[lo], interior[hi], exterior[lo], exterior[hi]


def _pool(d: int, gamma: float) -> Tuple[np.ndarray, float]:
    """Cell midpoints of a regular partition and the largest cell diameter.

    Every point of S^d lies in a cell together with that cell's midpoint, so
    the pool covers the sphere within the returned reach.
    """
    probe = build_partition(d, 1000)
    scale = max_analytic_diameter(probe) * 1000 ** (1.0 / d)
    for fraction in (8.0, 4.0, 2.0):
        size = int(np.ceil((scale * fraction / gamma) ** d))
        if size <= FAMILY_MAX_POOL:
            break
    else:
        raise ApproxFamilyTooLargeError(
            f"covering S^{d} at gamma={gamma:.4g} needs more than {FAMILY_MAX_POOL} pool points; "
            f"use a larger epsilon"
        )
    P = build_partition(d, max(size, 2))
    reach = max_analytic_diameter(P)
    if reach >= 0.75 * gamma:
        raise ApproxFamilyTooLargeError(
            f"pool of {P.N} cells only reaches {reach:.4g} at gamma={gamma:.4g}; use a larger epsilon"
        )
    pool = sample_cells(P, np.arange(P.N), np.full((P.N, d), 0.5))
    return pool, reach


def _greedy_net(d: int, gamma: float) -> np.ndarray:
    """Farthest-point net over the pool; every point of S^d ends up within gamma of the net"""
    pool, reach = _pool(d, gamma)
    radius = gamma - reach
    min_dot = 1.0 - radius ** 2 / 2.0
    pair_limit = int(np.sqrt(MAX_FAMILY_PAIRS))

    chosen = [0]
    best = pool @ pool[0]
    while best.min() < min_dot:
        k = int(np.argmin(best))
        chosen.append(k)
        np.maximum(best, pool @ pool[k], out=best)
        if len(chosen) > pair_limit:
            raise ApproxFamilyTooLargeError(
                f"net for gamma={gamma:.4g} exceeds {pair_limit} points; use a larger epsilon"
            )
    logger.debug(f"Net over {pool.shape[0]} pool points (reach {reach:.4g}) has {len(chosen)} points")
    return pool[chosen]


@cached(cache=LRUCache(maxsize=8), lock=threading.Lock())
def build_approx_family(d: int, epsilon: float) -> ApproxFamily:
    """epsilon-approximating family for wedges with gamma = Omega epsilon / (4 omega)"""
    require(d >= 2, f"approximating families need d >= 2, got d={d}")
    require(0.0 < epsilon < 1.0, f"epsilon must lie in (0, 1), got {epsilon}")
    gamma = epsilon / (4.0 * omega_ratio(d))
    net = _greedy_net(d, gamma)
    family = ApproxFamily(d=d, epsilon=epsilon, gamma=gamma, net=net)
    logger.info(
        f"Approximating family on S^{d}: epsilon={epsilon}, gamma={gamma:.4g}, "
        f"net of {family.net_size} points, {family.cardinality} regions"
    )
    return family


# ==================== Sup upper bound ====================

def sup_wedge_net_upper(Z: PointSet, epsilon: float, block: int = 256) -> DiscrepancyReport:
    """max over the approximating family of |D(Z, Q)|, plus epsilon: an upper bound on sup|Delta_Z|"""
    family = build_approx_family(Z.d, epsilon)
    net = family.net
    g = family.gamma
    N = Z.N

    A = Z.points @ net.T
    pos = (A >= g).astype(np.float32)
    neg = (A <= -g).astype(np.float32)
    ge = (A >= -g).astype(np.float32)
    le = (A <= g).astype(np.float32)
    belt = ge * le

    best = -1.0
    best_pair = (0, 0)
    for start in range(0, net.shape[0], block):
        rows = slice(start, start + block)
        c_int = pos[:, rows].T @ neg + neg[:, rows].T @ pos
        c_ext = ge[:, rows].T @ le + le[:, rows].T @ ge - belt[:, rows].T @ belt
        theta = np.arccos(np.clip(net[rows] @ net.T, -1.0, 1.0))
        int_lo, int_hi, ext_lo, ext_hi = family.measure_bounds(theta)
        f_int = c_int / N
        f_ext = c_ext / N
        worst = np.maximum.reduce([
            f_int - int_lo, int_hi - f_int,
            f_ext - ext_lo, ext_hi - f_ext,
        ])
        k = int(np.argmax(worst))
        if worst.flat[k] > best:
            best = float(worst.flat[k])
            i, j = np.unravel_index(k, worst.shape)
            best_pair = (start + int(i), int(j))

    value = best + epsilon
    i, j = best_pair
    logger.info(f"Net upper bound with epsilon={epsilon}: {value:.6g}")
    return DiscrepancyReport(
        family=Family.WEDGE,
        mode=Mode.SUP_NET_UPPER,
        value=value,
        samples=family.cardinality,
        witness=WedgeWitness(x=net[i].tolist(), y=net[j].tolist()),
        z_meta=Z.meta_dict(),
        note=f"upper bound over {family.cardinality} interior/exterior wedges plus epsilon={epsilon}",
    )
