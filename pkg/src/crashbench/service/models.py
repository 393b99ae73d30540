"""Request/response schemas of the evaluation service."""

from __future__ import annotations

from pydantic import BaseModel, Field


class DescribeRequest(BaseModel):
    problem: int = Field(ge=1, le=3)
    dim: int = Field(ge=1)


class DescribeResponse(BaseModel):
    problem: int
    dim: int
    lower: list[float]
    upper: list[float]
    default_objectives: list[str]
    known_objectives: list[str]
    constraint_limit_mm: float | None
    dimension_range: tuple[int, int]


class EvaluateRequest(BaseModel):
    problem: int = Field(ge=1, le=3)
    dim: int = Field(ge=1)
    x: list[float] = Field(description="normalized design vector in [-5,5]^d")
    objectives: list[str] | None = None
    mode: str = Field(default="mock", pattern="^(mock|external)$")
    solver_path: str | None = None
    cores: int = Field(default=1, ge=1)
    timeout_s: float = Field(default=4000.0, gt=0)
    work_dir: str | None = None
    keep_workdir: bool = False
    write_vtk: bool = False


class EvaluateResponse(BaseModel):
    problem: int
    dim: int
    objectives: dict[str, float]
    feasible: bool
    intrusion_mm: float
    mass_kg: float
    x_normalized: list[float]
    x_physical: list[float]
    work_dir: str


class ErrorBody(BaseModel):
    category: str
    message: str


class ErrorResponse(BaseModel):
    error: ErrorBody


class HealthResponse(BaseModel):
    status: str
    service: str
    version: str
