from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Dict, Optional

from vcRegularity.exceptions import SpecError


FAMILIES = (
    "interval-incidence",
    "box-incidence",
    "threshold",
    "block-diagonal",
    "matching",
    "complete",
    "erdos-renyi",
    "powerset",
)


@dataclass(frozen=True)
class NetBudget:
    """Sizing rule for nets of quality 1/r; c0 is the constant hidden in O(d r ln r)."""
    d: int
    r: int
    c0: float = 8.0
    max_rounds: int = 6

    def __post_init__(self):
        if self.d < 1:
            raise ValueError(f"d must be >= 1, got {self.d}")
        if self.r < 2:
            raise ValueError(f"r must be >= 2, got {self.r}")
        if self.c0 <= 0:
            raise ValueError(f"c0 must be positive, got {self.c0}")
        if self.max_rounds < 1:
            raise ValueError(f"max_rounds must be >= 1, got {self.max_rounds}")

    @property
    def epsilon(self) -> Fraction:
        return Fraction(1, self.r)


@dataclass(frozen=True)
class TesterConfig:
    exact_cap: int = 14
    trials: int = 50
    seed: int = 0
    n_jobs: int = 1

    def __post_init__(self):
        if self.exact_cap < 0:
            raise ValueError(f"exact_cap must be non-negative, got {self.exact_cap}")
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")


@dataclass(frozen=True)
class LoopConfig:
    r: int
    d: int
    net_budget: NetBudget
    tester: TesterConfig = field(default_factory=TesterConfig)
    max_iters: Optional[int] = None
    seed: int = 0
    c1: float = 1.0
    n_jobs: int = 1
    audit: bool = False
    progress: bool = False
    record_wall_time: bool = True
    keep_history: bool = False

    def __post_init__(self):
        if self.r < 2:
            raise ValueError(f"r must be >= 2, got {self.r}")
        if self.d < 1:
            raise ValueError(f"d must be >= 1, got {self.d}")
        if self.max_iters is None:
            object.__setattr__(self, "max_iters", 10**3 * self.r**7)
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be >= 1, got {self.max_iters}")

    @property
    def epsilon(self) -> Fraction:
        return Fraction(1, self.r)

    @property
    def refinement_budget(self) -> NetBudget:
        """Budget for the per-block nets of a refinement round: quality 1/(10 r^3)."""
        return NetBudget(
            d=self.d,
            r=10 * self.r**3,
            c0=self.net_budget.c0,
            max_rounds=self.net_budget.max_rounds,
        )

    @property
    def increment(self) -> Fraction:
        return Fraction(1, 10**3 * self.r**7)


@dataclass(frozen=True)
class FamilySpec:
    family: str
    n_x: int
    n_y: int
    seed: int = 0
    p: Optional[float] = None
    dim: int = 2

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise SpecError(f"unknown family {self.family!r}; choose from {', '.join(FAMILIES)}")
        if self.n_x < 1 or self.n_y < 1:
            raise SpecError(f"sizes must be >= 1, got {self.n_x}x{self.n_y}")
        if self.family == "erdos-renyi":
            if self.p is None or not 0.0 <= self.p <= 1.0:
                raise SpecError(f"erdos-renyi needs p in [0, 1], got {self.p}")
        elif self.p is not None and not 0.0 <= self.p <= 1.0:
            raise SpecError(f"p must lie in [0, 1], got {self.p}")
        if self.family == "box-incidence" and self.dim < 1:
            raise SpecError(f"box-incidence needs dim >= 1, got {self.dim}")
        if self.family == "powerset" and self.n_x != 2**self.n_y:
            raise SpecError(f"powerset over {self.n_y} points needs n_x = {2**self.n_y}, got {self.n_x}")


@dataclass(frozen=True)
class GraphGenerationConfig:
    root_dir: Path
    graph_file: Path
    manifest_file: Path
    spec: FamilySpec
    params: Dict[str, object] = field(default_factory=dict)


@dataclass(frozen=True)
class RegularizationConfig:
    root_dir: Path
    graph_file: Path
    partition_file: Path
    trace_file: Path
    manifest_file: Path
    loop: LoopConfig
    ci_mode: bool = False
    params: Dict[str, object] = field(default_factory=dict)


@dataclass(frozen=True)
class RegularityCheckConfig:
    root_dir: Path
    graph_file: Path
    partition_file: Path
    report_file: Path
    manifest_file: Path
    epsilon: Fraction
    tester: TesterConfig
    params: Dict[str, object] = field(default_factory=dict)


@dataclass(frozen=True)
class VCDimensionConfig:
    graph_file: Path
    cap: int
