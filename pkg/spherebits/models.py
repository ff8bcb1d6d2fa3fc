from pydantic import BaseModel, Field, field_validator
from typing import List, Optional, Dict, Any
from enum import Enum


class Method(str, Enum):
    RANDOM = "random"
    JITTERED = "jittered"
    FILE = "file"
    MINIMIZED = "minimized"


class Family(str, Enum):
    WEDGE = "wedge"
    CAP = "cap"
    SLICE = "slice"


class Mode(str, Enum):
    EXACT_STOLARSKY = "exact_stolarsky"
    MONTE_CARLO = "monte_carlo"
    SUP_LOWER = "sup_lower"
    SUP_NET_UPPER = "sup_net_upper"


class PointSetMeta(BaseModel):
    method: Method = Method.FILE
    seed: Optional[int] = None
    partition_N: Optional[int] = None


class WedgeWitness(BaseModel):
    x: List[float]
    y: List[float]


class DiscrepancyReport(BaseModel):
    family: Family
    mode: Mode
    value: float
    stderr: Optional[float] = None
    samples: Optional[int] = None
    seed: Optional[int] = None
    witness: Optional[WedgeWitness] = None
    z_meta: Optional[Dict[str, Any]] = None
    note: Optional[str] = None

    @property
    def is_exact(self) -> bool:
        return self.mode == Mode.EXACT_STOLARSKY


class SphereConstants(BaseModel):
    d: int
    Omega: float
    omega: float
    ratio: float
    Vd: float
    Ud: float
    cd: float


class BoundsTable(BaseModel):
    d: int
    K_d: float
    C_d: float
    alpha_d: int
    A_d: float
    alpha: float
    gamma_exp: float
    Omega: float
    omega: float
    ratio: float
    V_d: float
    c_d: float
    approx_family_constant: float
    union_bound_threshold: float


class NUpperReport(BaseModel):
    d: int
    delta: float
    proof_form: int
    final_form: int
    N: int
    rip_bound: float
    check: bool


class TraceRow(BaseModel):
    step: int
    energy: float
    grad_norm: float
    step_size: float


class VerifyRow(BaseModel):
    N: int
    seed: int
    exact: float
    mc: float
    stderr: float
    zscore: float


class ScalingRow(BaseModel):
    N: int
    seeds: int
    mean_l2: float
    stderr: float
    reference: float


class TaskRecord(BaseModel):
    index: int
    name: str
    duration: float
    success: bool
    error: Optional[str] = None


# ==================== Command configurations ====================

class CommandConfig(BaseModel):
    seed: int = 0
    threads: int = Field(default=1, ge=1)
    out: Optional[str] = None


class GenConfig(CommandConfig):
    method: Method = Method.JITTERED
    d: int = Field(ge=1)
    N: int = Field(ge=1)
    fmt: str = "csv"

    @field_validator("method")
    @classmethod
    def _generator_method(cls, value: Method) -> Method:
        if value not in (Method.RANDOM, Method.JITTERED):
            raise ValueError("method must be 'random' or 'jittered'")
        return value

    @field_validator("fmt")
    @classmethod
    def _known_format(cls, value: str) -> str:
        if value not in ("csv", "json"):
            raise ValueError("format must be 'csv' or 'json'")
        return value


class DiscConfig(CommandConfig):
    path: str
    family: Family = Family.WEDGE
    mode: str = "exact"
    M: int = Field(default=1_000_000, ge=2)
    budget: int = Field(default=10_000, ge=1)
    epsilon: float = Field(default=0.2, gt=0.0, lt=1.0)

    @field_validator("mode")
    @classmethod
    def _known_mode(cls, value: str) -> str:
        if value not in ("exact", "mc", "sup", "net"):
            raise ValueError("mode must be one of exact, mc, sup, net")
        return value


class VerifyConfig(CommandConfig):
    d: int = Field(default=2, ge=2)
    N_list: List[int] = Field(default_factory=lambda: [1, 2, 8, 32])
    seeds: int = Field(default=5, ge=1)
    M: int = Field(default=2_000_000, ge=2)

    @field_validator("N_list")
    @classmethod
    def _positive_sizes(cls, value: List[int]) -> List[int]:
        if not value or min(value) < 1:
            raise ValueError("every N must be at least 1")
        return value


class ScalingConfig(CommandConfig):
    d: int = Field(default=2, ge=2)
    N_grid: List[int] = Field(default_factory=lambda: [16, 64, 256, 1024])
    seeds: int = Field(default=200, ge=2)
    method: Method = Method.JITTERED

    @field_validator("N_grid")
    @classmethod
    def _grid(cls, value: List[int]) -> List[int]:
        if len(value) < 3:
            raise ValueError("scaling needs at least 3 grid points")
        if min(value) < 1:
            raise ValueError("every N must be at least 1")
        return value

    @field_validator("method")
    @classmethod
    def _generator_method(cls, value: Method) -> Method:
        if value not in (Method.RANDOM, Method.JITTERED):
            raise ValueError("method must be 'random' or 'jittered'")
        return value


class SupConfig(CommandConfig):
    path: str
    budget: int = Field(default=100_000, ge=1)
    epsilon: Optional[float] = Field(default=None, gt=0.0, lt=1.0)
    delta: Optional[float] = Field(default=None, gt=0.0, lt=1.0)


class BoundsConfig(BaseModel):
    d: int = Field(ge=2)
    delta: Optional[float] = Field(default=None, gt=0.0, lt=1.0)


class MinimizeConfig(CommandConfig):
    path: Optional[str] = None
    d: int = Field(default=2, ge=2)
    N: int = Field(default=12, ge=1)
    steps: int = Field(default=500, ge=1)
    tol: float = Field(default=1e-8, gt=0.0)
    trace: Optional[str] = None


class PartitionInspectConfig(BaseModel):
    d: int = Field(ge=2)
    N: int = Field(ge=1)
    out: Optional[str] = None


class VerifySummary(BaseModel):
    d: int
    runs: int
    max_abs_zscore: float
    threshold: float = 4.0
    passed: bool


class ScalingSummary(BaseModel):
    d: int
    method: Method
    slope: float
    expected_slope: float
    tolerance: float
    within_tolerance: bool
    matches_reference: bool
