"""
Discrete energies and a Riemannian gradient-descent minimizer.

The wedge energy (1/N^2) sum_{i,j} (1/2 - d(z_i, z_j))^2 is the discrete term
of the Stolarsky identity for wedges, so lowering it lowers the L2 wedge
discrepancy by exactly the same amount.
"""

import logging
from dataclasses import dataclass, field
from typing import List

import numpy as np
import pandas as pd

from .errors import require
from .models import Method, TraceRow
from .onebit import PointSet, _as_array
from .sphere_core import normalize_rows, pairwise_geodesic

logger = logging.getLogger(__name__)

CLAMP = 1.0 - 1e-9
MAX_HALVINGS = 30
BLOCK = 2048


@dataclass
class EnergyState:
    """One iterate of the descent: points, their energy and tangent gradient"""
    points: np.ndarray
    energy: float
    gradient: np.ndarray
    step: int = 0

    @property
    def grad_norm(self) -> float:
        return float(np.max(np.linalg.norm(self.gradient, axis=1)))


@dataclass
class MinimizeResult:
    Z: PointSet
    trace: List[TraceRow] = field(default_factory=list)
    converged: bool = False
    accepted_steps: int = 0

    @property
    def initial_energy(self) -> float:
        return self.trace[0].energy

    @property
    def final_energy(self) -> float:
        return self.trace[-1].energy


def wedge_energy(Z) -> float:
    """(1/N^2) sum over all i, j (diagonal included) of (1/2 - d(z_i, z_j))^2"""
    P = _as_array(Z)
    N = P.shape[0]
    total = 0.0
    for start in range(0, N, BLOCK):
        G = pairwise_geodesic(P[start:start + BLOCK], P)
        rows = np.arange(G.shape[0])
        G[rows, start + rows] = 0.0
        total += float(np.sum((0.5 - G) ** 2))
    return total / (N * N)


def frame_potential(Z) -> float:
    """Total frame potential sum_{i,j} (z_i . z_j)^2 = ||Z^T Z||_F^2"""
    P = _as_array(Z)
    S = P.T @ P
    return float(np.sum(S * S))


def energy_gradient(Z) -> np.ndarray:
    """Tangent gradient of wedge_energy at every point, rows orthogonal to their points"""
    P = _as_array(Z)
    N = P.shape[0]
    T = np.clip(P @ P.T, -1.0, 1.0)
    D = np.arccos(T) / np.pi
    Tc = np.clip(T, -CLAMP, CLAMP)
    W = 2.0 * (0.5 - D) / (np.pi * np.sqrt(1.0 - Tc * Tc))
    np.fill_diagonal(W, 0.0)
    raw = W @ P
    tangent = raw - np.sum(raw * P, axis=1)[:, None] * P
    return (2.0 / (N * N)) * tangent


def energy_state(X: np.ndarray, step: int = 0) -> EnergyState:
    return EnergyState(points=X, energy=wedge_energy(X), gradient=energy_gradient(X), step=step)


def _separate_singular_pairs(X: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Nudge exactly coincident or antipodal points apart"""
    T = X @ X.T
    np.fill_diagonal(T, 0.0)
    if np.any(np.abs(T) >= 1.0):
        logger.info("Separating coincident or antipodal points before descent")
        X = normalize_rows(X + 1e-7 * rng.standard_normal(X.shape))
    return X


def minimize(Z0: PointSet, max_steps: int, tol: float,
             rng: np.random.Generator = None) -> MinimizeResult:
    """Projected gradient descent with backtracking on the wedge energy.

    Each step moves along -gradient, retracts onto the sphere by renormalizing
    and halves the step (up to 30 times) until the energy decreases; after an
    accepted step the next trial step doubles. Stops after max_steps, when the
    largest gradient row norm drops below tol, or when backtracking fails.
    The trace starts at the set the descent starts from, which differs from Z0
    only when coincident or antipodal points had to be separated.
    """
    require(Z0.d >= 2, f"minimize needs d >= 2, got d={Z0.d}")
    require(max_steps >= 1, f"max_steps must be at least 1, got {max_steps}")
    require(tol > 0.0, f"tol must be positive, got {tol}")
    rng = rng if rng is not None else np.random.default_rng(0)

    start = _separate_singular_pairs(Z0.points.copy(), rng)
    state = energy_state(start)
    N = start.shape[0]
    step = 0.1 / N

    result = MinimizeResult(Z=Z0)
    result.trace.append(TraceRow(step=0, energy=state.energy, grad_norm=state.grad_norm, step_size=0.0))
    logger.info(f"Minimizing wedge energy of {N} points on S^{Z0.d}: initial energy {state.energy:.12g}")

    for it in range(1, max_steps + 1):
        if state.grad_norm < tol:
            result.converged = True
            break

        trial = step
        for _ in range(MAX_HALVINGS + 1):
            X_new = normalize_rows(state.points - trial * state.gradient)
            E_new = wedge_energy(X_new)
            if E_new < state.energy:
                break
            trial /= 2.0
        else:
            logger.warning(f"Line search exhausted after {MAX_HALVINGS} halvings at step {it}")
            result.converged = True
            break

        state = EnergyState(points=X_new, energy=E_new, gradient=energy_gradient(X_new), step=it)
        result.accepted_steps += 1
        result.trace.append(TraceRow(step=it, energy=state.energy, grad_norm=state.grad_norm, step_size=trial))
        step = 2.0 * trial

    if np.array_equal(state.points, Z0.points):
        result.Z = Z0
    else:
        result.Z = Z0.with_points(state.points, method=Method.MINIMIZED)
    logger.info(
        f"Minimizer finished after {result.accepted_steps} accepted steps: "
        f"energy {result.initial_energy:.12g} -> {result.final_energy:.12g}"
    )
    return result


def trace_frame(result: MinimizeResult) -> pd.DataFrame:
    """Optimization trace with columns step, energy, grad_norm, step_size"""
    return pd.DataFrame([row.model_dump() for row in result.trace],
                        columns=["step", "energy", "grad_norm", "step_size"])
