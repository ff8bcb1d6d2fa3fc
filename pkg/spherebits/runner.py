"""
Experiment orchestration.

ExperimentRunner fans independent tasks out to a thread pool, times each one
and returns results in task-index order. The batch experiments (Stolarsky
verification, scaling sweeps) are built on it.
"""

import logging
import time
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np

from .bounds import jittered_l2_bound, random_l2_expectation
from .config import DEFAULT_THREADS
from .discrepancy import l2_wedge_exact, l2_wedge_montecarlo
from .models import (
    Method,
    ScalingConfig,
    ScalingRow,
    ScalingSummary,
    TaskRecord,
    VerifyConfig,
    VerifyRow,
    VerifySummary,
)
from .sampling import (
    derive_seed,
    expected_slope,
    generate,
    loglog_slope,
    mean_and_stderr,
    random_set,
    replicate_seeds,
)

logger = logging.getLogger(__name__)

ZSCORE_THRESHOLD = 4.0
SLOPE_TOLERANCE = {Method.JITTERED: 0.1, Method.RANDOM: 0.05}


@dataclass
class Task:
    index: int
    name: str
    fn: Callable[[], Any]


class ExperimentRunner:
    """Runs tasks with timing and failure tracking; output order is task order"""

    def __init__(self, name: str, threads: int = DEFAULT_THREADS):
        self.name = name
        self.threads = max(1, int(threads))
        self.execution_count = 0
        self.total_execution_time = 0.0
        self.success_rate = 0.0
        self.error_counts: Dict[str, int] = defaultdict(int)
        self.records: List[TaskRecord] = []

    def _execute(self, task: Task) -> Tuple[Any, TaskRecord, Optional[BaseException]]:
        start_time = time.perf_counter()
        try:
            result = task.fn()
            error = None
        except Exception as e:
            logger.error(f"Task {task.name} failed: {str(e)}")
            result, error = None, e
        duration = time.perf_counter() - start_time
        record = TaskRecord(index=task.index, name=task.name, duration=duration,
                            success=error is None, error=str(error) if error else None)
        return result, record, error

    def run(self, tasks: List[Task]) -> List[Any]:
        """Execute all tasks; re-raises the failure of the lowest-index failing task"""
        logger.info(f"{self.name}: running {len(tasks)} tasks on {self.threads} thread(s)")
        if self.threads > 1 and len(tasks) > 1:
            with ThreadPoolExecutor(max_workers=self.threads) as pool:
                outcomes = list(pool.map(self._execute, tasks))
        else:
            outcomes = [self._execute(task) for task in tasks]

        results = []
        first_error = None
        for result, record, error in outcomes:
            self.execution_count += 1
            self.total_execution_time += record.duration
            self.records.append(record)
            if error is not None:
                self.error_counts[type(error).__name__] += 1
                first_error = first_error or error
            results.append(result)
        failures = sum(self.error_counts.values())
        self.success_rate = (self.execution_count - failures) / max(self.execution_count, 1)

        logger.info(f"{self.name}: {len(tasks)} tasks done in {self.total_execution_time:.2f}s of task time")
        if first_error is not None:
            raise first_error
        return results

    def get_performance_metrics(self) -> Dict[str, Any]:
        durations = sorted(r.duration for r in self.records)
        if not durations:
            return {"runner": self.name, "execution_count": 0}
        return {
            "runner": self.name,
            "execution_count": self.execution_count,
            "total_execution_time": self.total_execution_time,
            "average_execution_time": self.total_execution_time / self.execution_count,
            "max_execution_time": durations[-1],
            "p95": durations[min(len(durations) - 1, int(len(durations) * 0.95))],
            "success_rate": self.success_rate,
            "errors": dict(self.error_counts),
        }


# ==================== Stolarsky verification ====================

def _verify_one(d: int, N: int, seed: int, M: int) -> VerifyRow:
    Z = random_set(d, N, seed)
    exact = l2_wedge_exact(Z)
    mc, stderr = l2_wedge_montecarlo(Z, M, np.random.default_rng(derive_seed(seed, 1)))
    zscore = (mc - exact) / stderr if stderr > 0 else 0.0
    return VerifyRow(N=N, seed=seed, exact=exact, mc=mc, stderr=stderr, zscore=zscore)


def stolarsky_verify(config: VerifyConfig) -> Tuple[List[VerifyRow], VerifySummary]:
    """Exact wedge L2 against its Monte-Carlo estimate for random sets over the (N, seed) grid"""
    tasks = []
    for N in config.N_list:
        for s in replicate_seeds(config.seed, N, config.seeds):
            tasks.append(Task(
                index=len(tasks),
                name=f"verify N={N} seed={s}",
                fn=lambda N=N, s=s: _verify_one(config.d, N, s, config.M),
            ))
    runner = ExperimentRunner("stolarsky-verify", config.threads)
    rows = runner.run(tasks)
    worst = max(abs(r.zscore) for r in rows)
    summary = VerifySummary(d=config.d, runs=len(rows), max_abs_zscore=worst,
                            threshold=ZSCORE_THRESHOLD, passed=worst <= ZSCORE_THRESHOLD)
    logger.info(f"Stolarsky verification: max |z| = {worst:.3f} over {len(rows)} runs")
    return rows, summary


# ==================== Scaling ====================

def _reference(method: Method, d: int, N: int) -> float:
    if method == Method.JITTERED:
        return jittered_l2_bound(d, N)
    return random_l2_expectation(d, N)


def scaling(config: ScalingConfig) -> Tuple[List[ScalingRow], ScalingSummary]:
    """Mean exact wedge L2 per N over replicate seeds, and the fitted log-log slope"""
    tasks = []
    for N in config.N_grid:
        for s in replicate_seeds(config.seed, N, config.seeds):
            tasks.append(Task(
                index=len(tasks),
                name=f"scaling N={N} seed={s}",
                fn=lambda N=N, s=s: l2_wedge_exact(generate(config.method, config.d, N, s)),
            ))
    values = ExperimentRunner("scaling", config.threads).run(tasks)

    rows = []
    for k, N in enumerate(config.N_grid):
        block = values[k * config.seeds:(k + 1) * config.seeds]
        mean, stderr = mean_and_stderr(block)
        rows.append(ScalingRow(N=N, seeds=config.seeds, mean_l2=mean, stderr=stderr,
                               reference=_reference(config.method, config.d, N)))

    slope = loglog_slope([r.N for r in rows], [r.mean_l2 for r in rows])
    target = expected_slope(config.method, config.d)
    tolerance = SLOPE_TOLERANCE.get(config.method, 0.1)
    if config.method == Method.JITTERED:
        matches = all(r.mean_l2 <= r.reference for r in rows)
    else:
        matches = all(abs(r.mean_l2 - r.reference) <= 4.0 * r.stderr for r in rows)
    summary = ScalingSummary(
        d=config.d, method=config.method, slope=slope, expected_slope=target,
        tolerance=tolerance, within_tolerance=abs(slope - target) <= tolerance,
        matches_reference=matches,
    )
    logger.info(f"Scaling ({config.method.value}): slope {slope:.4f}, expected {target:.4f}")
    return rows, summary
