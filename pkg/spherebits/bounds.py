"""
Explicit constants and bound formulas for jittered tessellations.

Stateless; every function evaluates a closed-form expression in double
precision. Only returned sample sizes are rounded (upwards).
"""

import logging
import math

from .errors import require
from .models import BoundsTable, NUpperReport
from .sphere_core import omega_ratio, second_moment_Vd, sphere_constants

logger = logging.getLogger(__name__)

NET_CONSTANT = 82.0
FINAL_FORM_CONSTANT = 4000.0
PROOF_FORM_CONSTANT = 400.0


def _check_d(d: int) -> None:
    require(d >= 2, f"bounds are stated for d >= 2, got d={d}")


# ==================== Constants ====================

def leopardi_Kd(d: int) -> float:
    """Diameter constant of the regular partition: K_d = 8 (Omega d / omega)^(1/d)"""
    _check_d(d)
    return 8.0 * (d / omega_ratio(d)) ** (1.0 / d)


def wedge_Cd(d: int) -> float:
    """C_d = 20 d^(3/4 + 1/(4d)), valid once N >= 100 d"""
    _check_d(d)
    return 20.0 * d ** (0.75 + 1.0 / (4.0 * d))


def alpha_d(d: int) -> int:
    return 2 * (d + 1)


def net_constant_Ad(d: int) -> float:
    return (NET_CONSTANT * d) ** (d + 1)


def approx_family_constant(d: int) -> float:
    """Constant in the per-member discrepancy estimate: 8 sqrt(alpha_d) d^(1/(2d)) (omega/Omega)^(1/2 - 1/(2d))"""
    _check_d(d)
    return 8.0 * math.sqrt(alpha_d(d)) * d ** (1.0 / (2 * d)) * omega_ratio(d) ** (0.5 - 1.0 / (2 * d))


def union_bound_threshold(d: int) -> float:
    """N beyond which 2 A_d N^(-alpha_d) < 1 and the union bound leaves positive probability"""
    _check_d(d)
    return (2.0 * net_constant_Ad(d)) ** (1.0 / alpha_d(d))


# ==================== Probability ====================

def hoeffding_tail(m: int, lam: float) -> float:
    """P(|sum of m independent centered Bernoulli variables| > lam) < 2 exp(-2 lam^2 / m)"""
    require(m >= 1, f"m must be at least 1, got {m}")
    require(lam > 0.0, f"lambda must be positive, got {lam}")
    return 2.0 * math.exp(-2.0 * lam * lam / m)


def lambda_plan(alpha: float, M: float, N: int) -> float:
    """Deviation level (alpha_d M)^(1/2) sqrt(log N) used in the union bound"""
    require(N >= 2, f"lambda_plan needs N >= 2 (log N must be positive), got N={N}")
    require(alpha > 0 and M > 0, f"alpha_d and M must be positive, got {alpha}, {M}")
    return math.sqrt(alpha * M) * math.sqrt(math.log(N))


# ==================== Counting ====================

def boundary_cell_bound(d: int, N: int) -> float:
    """Upper bound on the number of partition cells a wedge boundary can meet"""
    _check_d(d)
    require(N >= 1, f"N must be at least 1, got N={N}")
    return 64.0 * d ** (1.0 / d) * omega_ratio(d) ** (1.0 - 1.0 / d) * N ** (1.0 - 1.0 / d)


def boundary_cell_bound_from_Kd(d: int, N: int) -> float:
    """Sharper intermediate form 8 K_d (omega/Omega) N^(1 - 1/d)"""
    _check_d(d)
    require(N >= 1, f"N must be at least 1, got N={N}")
    return 8.0 * leopardi_Kd(d) * omega_ratio(d) * N ** (1.0 - 1.0 / d)


def net_cardinality_bound(d: int, epsilon: float) -> float:
    """(82 d)^(d+1) epsilon^(-2(d+1))"""
    require(0.0 < epsilon <= 1.0, f"epsilon must lie in (0, 1], got {epsilon}")
    return net_constant_Ad(d) * epsilon ** (-2.0 * (d + 1))


def belt_measure_bound(d: int, gamma: float) -> float:
    """Measure of the belt {z : |z.x| <= gamma} is at most 2 gamma omega/Omega"""
    require(gamma >= 0.0, f"gamma must be non-negative, got {gamma}")
    return 2.0 * gamma * omega_ratio(d)


def family_gap_bound(d: int, gamma: float) -> float:
    """sigma(W^ext) - sigma(W^int) <= 4 gamma omega/Omega (two belts)"""
    return 2.0 * belt_measure_bound(d, gamma)


# ==================== Discrepancy rates ====================

def rip_bound_at(d: int, N: int) -> float:
    """C_d N^(-1/2 - 1/(2d)) sqrt(log N)"""
    require(N >= 2, f"rip_bound_at needs N >= 2, got N={N}")
    return wedge_Cd(d) * N ** (-0.5 - 0.5 / d) * math.sqrt(math.log(N))


def random_l2_expectation(d: int, N: int) -> float:
    """E ||Delta_Z||_2^2 for N i.i.d. uniform points: (1/2 - V_d)/N"""
    require(N >= 1, f"N must be at least 1, got N={N}")
    return (0.5 - second_moment_Vd(d)) / N


def random_cap_l2_expectation(d: int, N: int) -> float:
    """E of the squared L2 cap discrepancy for N i.i.d. uniform points: c_d U_d / N"""
    require(N >= 1, f"N must be at least 1, got N={N}")
    consts = sphere_constants(d)
    return consts.cd * consts.Ud / N


def jittered_l2_bound(d: int, N: int) -> float:
    """E ||Delta_Z||_2^2 <= K_d N^(-1-1/d) for jittered sets"""
    require(N >= 1, f"N must be at least 1, got N={N}")
    return leopardi_Kd(d) * N ** (-1.0 - 1.0 / d)


# ==================== Sample size for delta-RIP ====================

def _n_proof_form(d: int, delta: float) -> float:
    g = 1.5 - 1.0 / (d + 1)
    lead = PROOF_FORM_CONSTANT * d ** g
    log_term = (d + 1) * math.log(lead) + 2 * d * math.log(1.0 / delta)
    return lead * delta ** (-2.0 * d / (d + 1)) * log_term ** (d / (d + 1))


def _n_final_form(d: int, delta: float) -> float:
    a = 2.5 - 2.0 / (d + 1)
    log_term = 1.0 + math.log(d) + math.log(1.0 / delta)
    return FINAL_FORM_CONSTANT * d ** a * delta ** (-2.0 + 2.0 / (d + 1)) * log_term ** (d / (d + 1))


def n_upper_report(d: int, delta: float) -> NUpperReport:
    """Both sample-size forms for delta-RIP and the a posteriori check at the returned N.

    N is the proof form (never below 100 d); if C_d N^(-1/2-1/(2d)) sqrt(log N)
    is not yet below delta, N grows in 1% steps until it is.
    """
    _check_d(d)
    require(0.0 < delta < 1.0, f"delta must lie in (0, 1), got {delta}")
    floor = 100 * d
    proof_form = math.ceil(max(floor, _n_proof_form(d, delta)))
    final_form = math.ceil(max(floor, _n_final_form(d, delta)))

    n = proof_form
    while rip_bound_at(d, n) >= delta:
        n += max(1, n // 100)
    if n != proof_form:
        logger.info(f"N_upper raised from {proof_form} to {n} so that rip_bound_at < {delta}")

    bound = rip_bound_at(d, n)
    return NUpperReport(d=d, delta=delta, proof_form=proof_form, final_form=final_form,
                        N=n, rip_bound=bound, check=bound < delta)


def N_upper(d: int, delta: float) -> int:
    return n_upper_report(d, delta).N


def bounds_table(d: int) -> BoundsTable:
    _check_d(d)
    consts = sphere_constants(d)
    return BoundsTable(
        d=d,
        K_d=leopardi_Kd(d),
        C_d=wedge_Cd(d),
        alpha_d=alpha_d(d),
        A_d=net_constant_Ad(d),
        alpha=2.5 - 2.0 / (d + 1),
        gamma_exp=1.5 - 1.0 / (d + 1),
        Omega=consts.Omega,
        omega=consts.omega,
        ratio=consts.ratio,
        V_d=consts.Vd,
        c_d=consts.cd,
        approx_family_constant=approx_family_constant(d),
        union_bound_threshold=union_bound_threshold(d),
    )
