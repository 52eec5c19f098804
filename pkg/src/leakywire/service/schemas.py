"""Pydantic request/response models for the HTTP service."""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field, model_validator

from ..operator_model import ModelParams
from ..quadrature import QuadSpec


class QuadIn(BaseModel):
    abs_tol: float = Field(default=1e-10, gt=0)
    rel_tol: float = Field(default=1e-10, gt=0)
    max_subdivisions: int = Field(default=200, ge=1)

    def to_spec(self) -> QuadSpec:
        return QuadSpec(
            abs_tol=self.abs_tol,
            rel_tol=self.rel_tol,
            max_subdivisions=self.max_subdivisions,
        )


class ModelIn(BaseModel):
    alpha: float = Field(gt=0)
    dots: list[tuple[float, float]] = Field(default_factory=list)
    betas: list[float] = Field(default_factory=list)

    @model_validator(mode="after")
    def _check(self) -> "ModelIn":
        if len(self.dots) != len(self.betas):
            raise ValueError("dots and betas must have equal length")
        for x, y in self.dots:
            if y == 0.0:
                raise ValueError(f"dot ({x}, {y}) lies on the line")
        if len(set(map(tuple, self.dots))) != len(self.dots):
            raise ValueError("dot positions must be pairwise distinct")
        return self

    def to_model(self) -> ModelParams:
        return ModelParams(
            alpha=self.alpha,
            dots=tuple((x, y) for x, y in self.dots),
            betas=tuple(self.betas),
        )


class GridIn(BaseModel):
    lo: float
    hi: float
    n: int = Field(ge=1)

    @model_validator(mode="after")
    def _ordered(self) -> "GridIn":
        if self.hi < self.lo:
            raise ValueError("grid needs lo <= hi")
        return self

    def points(self) -> list[float]:
        if self.n == 1:
            return [self.lo]
        step = (self.hi - self.lo) / (self.n - 1)
        return [self.lo + i * step for i in range(self.n)]


# ---- spectrum ----


class SpectrumRequest(BaseModel):
    model: ModelIn
    grid_points: int = Field(default=400, ge=16)
    quad: Optional[QuadIn] = None


class BoundStateOut(BaseModel):
    energy: float
    kappa: float
    residual: float
    null_vector: list[float]


class SpectrumResponse(BaseModel):
    states: list[BoundStateOut]
    warnings: list[str] = Field(default_factory=list)


# ---- eigenfunction ----


class EigenfunctionRequest(BaseModel):
    model: ModelIn
    x1: GridIn
    x2: GridIn
    quad: Optional[QuadIn] = None


class EigenPointOut(BaseModel):
    x1: float
    x2: float
    psi: Optional[float]  # None where the grid hits the dot singularity


class EigenfunctionResponse(BaseModel):
    state: BoundStateOut
    points: list[EigenPointOut]


# ---- resonance ----


class ResonanceRequest(BaseModel):
    alpha: float = Field(gt=0)
    beta: Optional[float] = None
    eps_beta: Optional[float] = None
    a_values: list[float] = Field(min_length=1)
    quad: Optional[QuadIn] = None

    @model_validator(mode="after")
    def _coupling(self) -> "ResonanceRequest":
        if (self.beta is None) == (self.eps_beta is None):
            raise ValueError("exactly one of beta / eps_beta must be given")
        if self.eps_beta is not None and not self.eps_beta < 0.0:
            raise ValueError("eps_beta must be negative")
        if any(a <= 0.0 for a in self.a_values):
            raise ValueError("dot heights must be positive")
        return self


class PoleOut(BaseModel):
    a: Optional[float] = None
    b: float
    mu: float
    nu: float
    residual: float
    iterations: int


class ResonanceFitOut(BaseModel):
    nu_slope: float
    mu_over_b_max: float


class ResonanceResponse(BaseModel):
    eps_beta: float
    beta: float
    points: list[PoleOut]
    fit: Optional[ResonanceFitOut] = None


# ---- scattering ----


class ScatterRequest(BaseModel):
    model: ModelIn
    lambdas: Optional[list[float]] = None
    grid_n: int = Field(default=200, ge=2)
    quad: Optional[QuadIn] = None


class ScatterPointOut(BaseModel):
    lam: float
    momentum: float
    r_re: float
    r_im: float
    t_re: float
    t_im: float
    r_abs2: float
    t_abs2: float


class ScatterResponse(BaseModel):
    points: list[ScatterPointOut]


# ---- two-dot resonance ----


class TwopointRequest(BaseModel):
    alpha: float = Field(gt=0)
    a: float = Field(gt=0)
    beta: float
    b_values: list[float] = Field(min_length=1)
    mode: Literal["consistent", "paper-literal"] = "consistent"
    quad: Optional[QuadIn] = None


class TwoPointLevelsOut(BaseModel):
    eps1: float
    kappa1: float
    eps2: Optional[float]
    kappa2: Optional[float]
    has_two: bool


class TwopointResponse(BaseModel):
    levels: TwoPointLevelsOut
    mu2_slope: float
    nu2_curvature: float
    points: list[PoleOut]


# ---- selftest ----


class SelftestCheckOut(BaseModel):
    name: str
    passed: bool
    detail: str


class SelftestResponse(BaseModel):
    passed: bool
    checks: list[SelftestCheckOut]
