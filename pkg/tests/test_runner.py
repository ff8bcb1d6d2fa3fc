import pytest
from pydantic import ValidationError

from spherebits.errors import NumericalError
from spherebits.models import Method, ScalingConfig, VerifyConfig
from spherebits.runner import ExperimentRunner, Task, scaling, stolarsky_verify


def _fail():
    raise NumericalError("did not converge")


def test_runner_keeps_task_order_and_metrics():
    runner = ExperimentRunner("squares", threads=4)
    results = runner.run([Task(index=k, name=f"sq{k}", fn=lambda k=k: k * k) for k in range(20)])
    assert results == [k * k for k in range(20)]
    metrics = runner.get_performance_metrics()
    assert metrics["execution_count"] == 20
    assert metrics["success_rate"] == 1.0
    assert metrics["p95"] <= metrics["max_execution_time"]


def test_runner_reraises_first_failure():
    runner = ExperimentRunner("mixed", threads=2)
    tasks = [
        Task(index=0, name="ok", fn=lambda: 1),
        Task(index=1, name="bad", fn=_fail),
        Task(index=2, name="ok2", fn=lambda: 2),
    ]
    with pytest.raises(NumericalError):
        runner.run(tasks)
    assert runner.error_counts["NumericalError"] == 1
    assert runner.success_rate == pytest.approx(2 / 3)
    assert [r.success for r in runner.records] == [True, False, True]


def test_empty_runner_metrics():
    assert ExperimentRunner("idle").get_performance_metrics()["execution_count"] == 0


def test_stolarsky_verify_small_grid():
    config = VerifyConfig(d=2, N_list=[1, 4], seeds=2, M=100_000, seed=3, threads=2)
    rows, summary = stolarsky_verify(config)
    assert [r.N for r in rows] == [1, 1, 4, 4]
    assert summary.runs == 4
    assert summary.passed
    assert all(r.stderr > 0 for r in rows)


def test_stolarsky_verify_is_thread_count_independent():
    single = stolarsky_verify(VerifyConfig(N_list=[2], seeds=3, M=20_000, seed=5, threads=1))[0]
    pooled = stolarsky_verify(VerifyConfig(N_list=[2], seeds=3, M=20_000, seed=5, threads=3))[0]
    assert single == pooled


def test_scaling_small_grid():
    config = ScalingConfig(d=2, N_grid=[16, 64, 256], seeds=10, method=Method.JITTERED, seed=1)
    rows, summary = scaling(config)
    assert [r.N for r in rows] == [16, 64, 256]
    assert summary.expected_slope == pytest.approx(-1.5)
    assert summary.slope < -1.0
    assert all(r.mean_l2 > 0 for r in rows)


def test_config_validation():
    with pytest.raises(ValidationError):
        ScalingConfig(N_grid=[16, 64])
    with pytest.raises(ValidationError):
        ScalingConfig(method=Method.FILE)
    with pytest.raises(ValidationError):
        VerifyConfig(N_list=[0, 4])
