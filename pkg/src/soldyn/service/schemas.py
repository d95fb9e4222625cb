"""Request and response models for the service endpoints.

Matrices travel as row lists of integers.  Transition structures travel
either as explicit 0/1 rows or as adjacency (successor) lists; exactly
one of the two must be given.  Map specifications and classifier
configurations reuse the JSON shapes of the core dataclasses.
"""

from __future__ import annotations

from typing import Any, Literal

from pydantic import BaseModel, Field, model_validator

Matrix = list[list[int]]


class IdentitiesRequest(BaseModel):
    matrix: Matrix
    samples: int = Field(default=25, ge=1, le=10_000)
    seed: int = 0


class IdentitiesResponse(BaseModel):
    matrix: Matrix
    samples: int
    identities: list[dict]
    all_passed: bool


class OrbitPointModel(BaseModel):
    base: list[float]
    fiber: list[float] = []


class ShadowRequest(BaseModel):
    """Shadow a supplied pseudo-orbit, or sample one first.

    ``matrix`` selects the toral product system; leaving it out selects
    the angle-doubling circle map.  ``orbit`` takes precedence over the
    sampling parameters.
    """

    matrix: Matrix | None = None
    orbit: list[OrbitPointModel] | None = None
    window: int = Field(default=50, ge=1, le=100_000)
    noise: float = Field(default=0.01, ge=0.0)
    seed: int = 0
    tol: float = Field(default=1e-12, gt=0.0)


class ShadowResponse(BaseModel):
    system: str
    window: int
    gap: float
    existence_bound: float
    verified_sup: float
    within_bound: bool
    converged: bool
    iterations: int
    final_increment: float
    shadow_point: dict


class ConjugacyRequest(BaseModel):
    kind: Literal["solid-torus", "linear-model"]
    depth: int = Field(default=40, ge=1, le=10_000)
    samples: int = Field(default=200, ge=1, le=100_000)
    seed: int = 0
    tolerance: float = Field(default=1e-6, gt=0.0)
    matrix: Matrix | None = None
    eps: float = Field(default=0.05, ge=0.0)
    lam_c: float = Field(default=0.25, gt=0.0, lt=0.5)
    c_off: float = Field(default=0.5, gt=0.0)


class ConjugacyResponse(BaseModel):
    kind: str
    tolerance: float
    within_tolerance: bool
    report: dict


class TransitionModel(BaseModel):
    rows: Matrix | None = None
    adjacency: list[list[int]] | None = None

    @model_validator(mode="after")
    def _exactly_one(self) -> "TransitionModel":
        if (self.rows is None) == (self.adjacency is None):
            raise ValueError("give exactly one of 'rows' or 'adjacency'")
        return self


class EntropyRequest(BaseModel):
    """Entropy of a toral automorphism or of a shift of finite type."""

    matrix: Matrix | None = None
    transition: TransitionModel | None = None

    @model_validator(mode="after")
    def _exactly_one(self) -> "EntropyRequest":
        if (self.matrix is None) == (self.transition is None):
            raise ValueError("give exactly one of 'matrix' or 'transition'")
        return self


class EntropyResponse(BaseModel):
    kind: Literal["toral", "sft"]
    entropy: float
    detail: dict


class WeightsRequest(BaseModel):
    transition: TransitionModel
    max_len: int = Field(default=8, ge=1, le=24)


class WeightEntry(BaseModel):
    word: str
    weight: float


class WeightsResponse(BaseModel):
    entropy: float
    eigenvalue: float
    count: int
    weights: list[WeightEntry]


class LengthRequest(BaseModel):
    """Signed unstable length of a path, or a law report over random paths."""

    matrix: Matrix
    vertices: list[list[float]] | None = None
    samples: int = Field(default=500, ge=1, le=100_000)
    seed: int = 0
    span: int = Field(default=1000, ge=1)


class LengthResponse(BaseModel):
    eigenvalue: float
    length: float | None = None
    mapped_length: float | None = None
    laws: dict | None = None


class ClassifyRequest(BaseModel):
    dim_lambda: int
    dim_eu: int


class ClassifyResponse(BaseModel):
    dim_lambda: int
    dim_eu: int
    class_label: str


class OrbitRequest(BaseModel):
    spec: dict
    transient: int = Field(default=100, ge=0)
    count: int = Field(default=10_000, ge=1, le=1_000_000)
    seed: int = 0


class ReportRequest(BaseModel):
    spec: dict
    config: dict | None = None
    seed: int = 0
    transient: int = Field(default=100, ge=0)
    count: int = Field(default=100_000, ge=1, le=2_000_000)
    steps: int = Field(default=4000, ge=1, le=1_000_000)


class ReportBatchRequest(BaseModel):
    specs: list[dict]
    config: dict | None = None
    seed: int = 0
    transient: int = Field(default=100, ge=0)
    count: int = Field(default=100_000, ge=1, le=2_000_000)
    steps: int = Field(default=4000, ge=1, le=1_000_000)


class ErrorPayload(BaseModel):
    code: Literal["invalid_spec", "estimator_quality", "internal"]
    message: str


def error_json(code: str, message: str) -> dict[str, Any]:
    return ErrorPayload(code=code, message=message).model_dump()
