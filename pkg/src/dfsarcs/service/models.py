"""Request/response schemas for the verification service.

Exact rationals cross this boundary as "num/den" strings, never floats.
"""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field

Mode = Literal["knuth", "extended"]
Role = Literal["L", "F", "B", "C", "T"]


class VerifyRequest(BaseModel):
    n_max: int = Field(ge=1)
    mode: Mode = "extended"
    workers: int = Field(default=1, ge=1)
    reduce: bool = False


class VerifyEntry(BaseModel):
    n: int
    equal: bool
    numerator_terms: int
    denominator_factors: int


class VerifyResponse(BaseModel):
    mode: Mode
    n_max: int
    results: list[VerifyEntry]
    all_equal: bool


class CrossCheckRequest(BaseModel):
    n_max: int = Field(ge=1)
    # the four-variable specialization checks get expensive; capped separately
    full_family_n_max: Optional[int] = Field(default=None, ge=1)
    workers: int = Field(default=1, ge=1)


class CrossCheckItem(BaseModel):
    name: str
    n: int
    passed: bool


class CrossCheckResponse(BaseModel):
    n_max: int
    full_family_n_max: int
    checks: list[CrossCheckItem]
    all_passed: bool


class DistributionRequest(BaseModel):
    n: int = Field(ge=1)
    p: str = Field(description='rational in (0,1) as "a/b"')
    role: Role = "F"
    kmax: int = Field(default=16, ge=0)


class DistCoeff(BaseModel):
    k: int
    prob: str


class MeansBlock(BaseModel):
    F: str
    B: str
    T: str
    C: str
    forward_equals_back: bool
    tree_equals_cross: bool


class DistributionResponse(BaseModel):
    n: int
    p: str
    role: Role
    coeffs: list[DistCoeff]
    tail: str
    means: MeansBlock
    ok: bool


class SimulateRequest(BaseModel):
    n: int = Field(ge=1)
    p: str
    trials: int = Field(ge=1)
    seed: int = 0
    projection: list[str] = Field(default_factory=lambda: ["F"])
    kmax: int = Field(default=16, ge=0)
    significance: float = Field(default=0.001, gt=0, lt=1)
    # exact table parameter override; a deliberate mismatch is the negative control
    exact_p: Optional[str] = None


class HistogramRow(BaseModel):
    key: list[int]
    count: int


class GofBlock(BaseModel):
    statistic: float
    dof: int
    threshold: float
    significance: float
    tv_distance: float
    cells: int
    passed: bool


class MeanComparison(BaseModel):
    mean_f: float
    mean_b: float
    combined_se: float
    within_three_se: bool


class TrialDump(BaseModel):
    arcs: list[list[int]]
    tally: list[int]
    tree_sizes: list[int]
    discovery_order: list[int]
    arc_events: list[list[str]]


class SimulateResponse(BaseModel):
    n: int
    p: str
    trials: int
    seed: int
    projection: list[str]
    histogram: list[HistogramRow]
    gof: Optional[GofBlock]
    mean_check: Optional[MeanComparison]
    trial: Optional[TrialDump]
    ok: bool


class OracleRequest(BaseModel):
    n: int = Field(ge=1)
    max_arcs: int = Field(ge=0)
    bound: Optional[int] = Field(default=None, ge=0)
    include_forest: bool = True


class CounterRow(BaseModel):
    L: int
    F: int
    B: int
    C: int
    T: int
    count: int


class MismatchBlock(BaseModel):
    tally: list[int]
    series_coefficient: str
    instance_count: int


class OracleResponse(BaseModel):
    n: int
    max_arcs: int
    bound: int
    tree_match: bool
    tree_mismatch: Optional[MismatchBlock]
    forest_match: Optional[bool]
    forest_mismatch: Optional[MismatchBlock]
    tree_counts: list[CounterRow]
    forest_counts: Optional[list[CounterRow]]
    ok: bool
