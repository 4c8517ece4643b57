"""Request models for the HTTP endpoints.

Each request names its problem either inline (the same document accepted in
problem files) or by scenario name; never both.  Unknown fields are
rejected, matching the strictness of the file format.
"""

from __future__ import annotations

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..config import MAX_SEED
from ..problem_io import ProblemFileModel, TolerancesModel


class ProblemSelector(BaseModel):
    model_config = ConfigDict(extra="forbid")
    problem: ProblemFileModel | None = None
    scenario: str | None = None

    @model_validator(mode="after")
    def _exactly_one_source(self):
        if (self.problem is None) == (self.scenario is None):
            raise ValueError("provide exactly one of 'problem' or 'scenario'")
        return self


class SamplingRequest(ProblemSelector):
    seed: int | None = Field(default=None, ge=0, le=MAX_SEED)
    samples: int | None = Field(default=None, ge=1)
    param_radius: float | None = Field(default=None, gt=0)
    point_radius: float | None = Field(default=None, gt=0)
    tolerances: TolerancesModel | None = None


class ProjectRequest(ProblemSelector):
    p: list[float]
    w: list[float]
    tolerances: TolerancesModel | None = None


class MultipliersRequest(ProjectRequest):
    pass


class RcrcqRequest(SamplingRequest):
    pass


class LiminfRequest(SamplingRequest):
    pass


class EstimateRequest(SamplingRequest):
    pass


class SequencePoint(BaseModel):
    model_config = ConfigDict(extra="forbid")
    p: list[float]
    w: list[float]


class BlowupRequest(ProblemSelector):
    policy: str = "reduced"
    kmax: int = Field(default=20, ge=1)
    sequence: str | None = None              # named scenario sequence
    points: list[SequencePoint] | None = None  # explicit (p_k, w_k) values
    tolerances: TolerancesModel | None = None
