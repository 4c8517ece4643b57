"""Reading and writing problem descriptions as JSON documents.

The document layout is strict: unknown fields are rejected everywhere, and
dimensions are cross-checked against the declared ``ambient_dim`` and
``param_dim``.  Equality constraints may appear anywhere in the file; parsing
reorders them ahead of inequalities and records the original positions.
"""

from __future__ import annotations

import dataclasses
import json
import math
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from .config import (MAX_SEED, DEFAULT_SAMPLING, DEFAULT_TOLERANCES,
                     SamplingConfig, tolerances_from_mapping)
from .errors import DimensionMismatchError, MovepolyError, ProblemFormatError
from .polyhedron import KIND_EQ, AffineConstraint, MovingPolyhedron


class ConstraintModel(BaseModel):
    model_config = ConfigDict(extra="forbid")
    kind: Literal["eq", "ineq"]
    A: list[list[float]]
    b: list[float]
    c: list[float]
    d0: float


class BasePointModel(BaseModel):
    model_config = ConfigDict(extra="forbid")
    p: list[float]
    x: list[float]


class RadiiModel(BaseModel):
    model_config = ConfigDict(extra="forbid")
    param: float = Field(gt=0)
    point: float = Field(gt=0)


class TolerancesModel(BaseModel):
    model_config = ConfigDict(extra="forbid")
    feasibility: float | None = Field(default=None, gt=0)
    kkt: float | None = Field(default=None, gt=0)
    rank: float | None = Field(default=None, gt=0)
    active: float | None = Field(default=None, gt=0)
    positivity_floor: float | None = Field(default=None, gt=0)
    iteration_cap_factor: int | None = Field(default=None, ge=1)


class SamplingModel(BaseModel):
    model_config = ConfigDict(extra="forbid")
    seed: int | None = Field(default=None, ge=0, le=MAX_SEED)
    samples: int | None = Field(default=None, ge=1)
    shrink_levels: int | None = Field(default=None, ge=1)
    subset_guard: int | None = Field(default=None, ge=1)
    bruteforce_guard: int | None = Field(default=None, ge=1)
    close_pair_cutoff: float | None = Field(default=None, gt=0)


class ProblemFileModel(BaseModel):
    model_config = ConfigDict(extra="forbid")
    ambient_dim: int = Field(ge=1)
    param_dim: int = Field(ge=1)
    constraints: list[ConstraintModel] = Field(min_length=1)
    base_point: BasePointModel
    radii: RadiiModel
    tolerances: TolerancesModel | None = None
    sampling: SamplingModel | None = None


def _loc_to_path(loc: tuple) -> str:
    parts = []
    for item in loc:
        if isinstance(item, int):
            parts[-1] = f"{parts[-1]}[{item}]" if parts else f"[{item}]"
        else:
            parts.append(str(item))
    return ".".join(parts)


def _check_finite(values, path: str):
    flat = values if isinstance(values, list) else [values]
    for v in flat:
        if isinstance(v, list):
            _check_finite(v, path)
        elif not math.isfinite(v):
            raise ProblemFormatError("numbers must be finite", path)


def problem_from_model(model: ProblemFileModel) -> MovingPolyhedron:
    """Build the validated in-memory problem from a parsed document."""
    d, m = model.ambient_dim, model.param_dim
    for i, con in enumerate(model.constraints):
        path = f"constraints[{i}]"
        if len(con.A) != d or any(len(row) != m for row in con.A):
            raise ProblemFormatError(f"A must be {d}x{m}", f"{path}.A")
        if len(con.b) != d:
            raise ProblemFormatError(f"b must have length {d}", f"{path}.b")
        if len(con.c) != m:
            raise ProblemFormatError(f"c must have length {m}", f"{path}.c")
        _check_finite(con.A, f"{path}.A")
        _check_finite(con.b, f"{path}.b")
        _check_finite(con.c, f"{path}.c")
        _check_finite(con.d0, f"{path}.d0")
    if len(model.base_point.p) != m:
        raise ProblemFormatError(f"p must have length {m}", "base_point.p")
    if len(model.base_point.x) != d:
        raise ProblemFormatError(f"x must have length {d}", "base_point.x")
    _check_finite(model.base_point.p, "base_point.p")
    _check_finite(model.base_point.x, "base_point.x")
    _check_finite(model.radii.param, "radii.param")
    _check_finite(model.radii.point, "radii.point")

    order = sorted(range(len(model.constraints)),
                   key=lambda i: (model.constraints[i].kind != KIND_EQ, i))
    source_order = None
    if order != list(range(len(model.constraints))):
        source_order = tuple(i + 1 for i in order)

    tolerances = DEFAULT_TOLERANCES
    if model.tolerances is not None:
        overrides = {k: v for k, v in model.tolerances.model_dump().items()
                     if v is not None}
        tolerances = tolerances_from_mapping(overrides)
    sampling = DEFAULT_SAMPLING
    if model.sampling is not None:
        overrides = {k: v for k, v in model.sampling.model_dump().items()
                     if v is not None}
        sampling = sampling.replace(**overrides)

    constraints = tuple(
        AffineConstraint(kind=model.constraints[i].kind,
                         A=model.constraints[i].A,
                         b=model.constraints[i].b,
                         c=model.constraints[i].c,
                         d0=model.constraints[i].d0)
        for i in order)
    try:
        return MovingPolyhedron(
            constraints=constraints,
            base_param=model.base_point.p,
            base_point=model.base_point.x,
            param_radius=model.radii.param,
            point_radius=model.radii.point,
            tolerances=tolerances,
            sampling=sampling,
            source_order=source_order,
        )
    except ProblemFormatError:
        raise
    except (DimensionMismatchError, MovepolyError) as exc:
        raise ProblemFormatError(str(exc)) from exc


def parse_problem(source: str | bytes | dict) -> MovingPolyhedron:
    """Parse a problem document given as JSON text or an already-loaded dict."""
    if isinstance(source, (str, bytes)):
        try:
            data = json.loads(source)
        except json.JSONDecodeError as exc:
            raise ProblemFormatError(f"invalid JSON: {exc}") from exc
    else:
        data = source
    try:
        model = ProblemFileModel.model_validate(data)
    except ValidationError as exc:
        first = exc.errors()[0]
        raise ProblemFormatError(first["msg"],
                                 _loc_to_path(tuple(first["loc"]))) from exc
    return problem_from_model(model)


def load_problem(path: str) -> MovingPolyhedron:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ProblemFormatError(f"cannot read problem file: {exc}", path) from exc
    return parse_problem(text)


def problem_to_dict(mp: MovingPolyhedron) -> dict:
    """Document form of a problem, in the canonical field order."""
    doc = {
        "ambient_dim": mp.ambient_dim,
        "param_dim": mp.param_dim,
        "constraints": [
            {"kind": c.kind, "A": c.A.tolist(), "b": c.b.tolist(),
             "c": c.c.tolist(), "d0": c.d0}
            for c in mp.constraints
        ],
        "base_point": {"p": mp.base_param.tolist(),
                       "x": mp.base_point.tolist()},
        "radii": {"param": mp.param_radius, "point": mp.point_radius},
    }
    if mp.tolerances != DEFAULT_TOLERANCES:
        doc["tolerances"] = dataclasses.asdict(mp.tolerances)
    if mp.sampling != DEFAULT_SAMPLING:
        doc["sampling"] = dataclasses.asdict(mp.sampling)
    return doc


def serialize_problem(mp: MovingPolyhedron) -> str:
    """JSON text that parses back to an equal problem."""
    return json.dumps(problem_to_dict(mp), indent=2)
