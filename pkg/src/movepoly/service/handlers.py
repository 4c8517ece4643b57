"""Command implementations shared by the HTTP endpoints and the CLI.

Every handler takes a validated request model and returns a plain report
dict ready for canonical serialization: schema tag first, then the effective
run configuration (for provenance), then the command's payload.  Reports
never contain timestamps or environment data, so identical requests yield
identical bytes.
"""

from __future__ import annotations

import dataclasses

import numpy as np

from .. import analysis
from ..config import Tolerances, tolerances_from_mapping
from ..errors import DimensionMismatchError, ProblemFormatError
from ..polyhedron import MovingPolyhedron
from ..problem_io import problem_from_model
from ..projection import STATUS_CONVERGED, project
from ..reduction import min_l1_multiplier, normalize_multiplier, \
    reduced_multiplier
from ..reports import SCHEMA
from ..scenarios import Scenario, get_scenario, list_scenarios
from . import schemas


def resolve_problem(request, input_desc: dict | None = None
                    ) -> tuple[MovingPolyhedron, dict, Scenario | None]:
    """The problem to analyze, its provenance descriptor, and its scenario."""
    if request.scenario is not None:
        scenario = get_scenario(request.scenario)
        mp = scenario.problem
        desc = {"kind": "scenario", "name": request.scenario}
    else:
        mp = problem_from_model(request.problem)
        scenario = None
        desc = {"kind": "problem", "origin": "inline"}
    if input_desc is not None:
        desc = input_desc
    overrides = getattr(request, "tolerances", None)
    if overrides is not None:
        data = {k: v for k, v in overrides.model_dump().items()
                if v is not None}
        if data:
            mp = dataclasses.replace(
                mp, tolerances=tolerances_from_mapping(data, mp.tolerances))
    return mp, desc, scenario


def _tolerances_dict(tol: Tolerances) -> dict:
    return {
        "feasibility": tol.feasibility,
        "kkt": tol.kkt,
        "rank": tol.rank,
        "active": tol.active,
        "positivity_floor": tol.positivity_floor,
        "iteration_cap_factor": tol.iteration_cap_factor,
    }


def _sampling_config(request, mp: MovingPolyhedron) -> dict:
    cfg = mp.sampling
    return {
        "seed": cfg.seed if request.seed is None else request.seed,
        "samples": cfg.samples if request.samples is None else request.samples,
        "param_radius": mp.param_radius if request.param_radius is None
        else request.param_radius,
        "point_radius": mp.point_radius if request.point_radius is None
        else request.point_radius,
    }


def _vector(values, length: int, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.shape != (length,):
        raise ProblemFormatError(f"must have length {length}", name)
    return arr


def _projection_block(inst, w, result, tol) -> dict:
    block = {
        "status": result.status,
        "point": list(result.point) if result.point is not None else None,
        "distance": result.distance if result.point is not None else None,
        "active": list(result.active),
        "multipliers": list(result.multipliers)
        if result.multipliers is not None else None,
        "kkt_residual": result.kkt_residual
        if result.point is not None else None,
        "iterations": result.iterations,
        "trace": [[event, label] for event, label in result.trace],
    }
    if result.status == STATUS_CONVERGED:
        block["certificate"] = reduced_multiplier(inst, w, result,
                                                  tol).as_dict()
    else:
        block["certificate"] = None
    return block


def handle_project(request: schemas.ProjectRequest,
                   input_desc: dict | None = None) -> dict:
    mp, desc, _ = resolve_problem(request, input_desc)
    try:
        p = _vector(request.p, mp.param_dim, "p")
        w = _vector(request.w, mp.ambient_dim, "w")
    except DimensionMismatchError as exc:
        raise ProblemFormatError(str(exc)) from exc
    inst = mp.instantiate(p)
    result = project(inst, w, mp.tolerances, mp.sampling.bruteforce_guard)
    report = {
        "schema": SCHEMA,
        "command": "project",
        "config": {
            "input": desc,
            "p": list(p),
            "w": list(w),
            "tolerances": _tolerances_dict(mp.tolerances),
        },
    }
    report.update(_projection_block(inst, w, result, mp.tolerances))
    return report


def handle_multipliers(request: schemas.MultipliersRequest,
                       input_desc: dict | None = None) -> dict:
    mp, desc, _ = resolve_problem(request, input_desc)
    p = _vector(request.p, mp.param_dim, "p")
    w = _vector(request.w, mp.ambient_dim, "w")
    inst = mp.instantiate(p)
    tol = mp.tolerances
    result = project(inst, w, tol, mp.sampling.bruteforce_guard)
    report = {
        "schema": SCHEMA,
        "command": "multipliers",
        "config": {
            "input": desc,
            "p": list(p),
            "w": list(w),
            "tolerances": _tolerances_dict(tol),
        },
    }
    report.update(_projection_block(inst, w, result, tol))
    if result.status == STATUS_CONVERGED and result.distance > tol.feasibility:
        normalized = normalize_multiplier(result.multipliers, result.distance)
        minimal = min_l1_multiplier(inst, w, result, tol,
                                    mp.sampling.bruteforce_guard)
        report["normalized_multipliers"] = list(normalized)
        report["min_l1"] = {
            "value": minimal.value,
            "support": list(minimal.support),
            "multipliers": list(minimal.multipliers),
        }
    else:
        report["normalized_multipliers"] = None
        report["min_l1"] = None
    return report


def handle_check_rcrcq(request: schemas.RcrcqRequest,
                       input_desc: dict | None = None) -> dict:
    mp, desc, _ = resolve_problem(request, input_desc)
    cfg = _sampling_config(request, mp)
    result = analysis.check_rcrcq(mp, param_radius=cfg["param_radius"],
                                  seed=cfg["seed"], samples=cfg["samples"])
    report = {
        "schema": SCHEMA,
        "command": "check-rcrcq",
        "config": {
            "input": desc,
            "seed": cfg["seed"],
            "samples": cfg["samples"],
            "param_radius": cfg["param_radius"],
            "tolerances": _tolerances_dict(mp.tolerances),
        },
    }
    report.update(result.as_dict())
    return report


def handle_check_liminf(request: schemas.LiminfRequest,
                        input_desc: dict | None = None) -> dict:
    mp, desc, _ = resolve_problem(request, input_desc)
    cfg = _sampling_config(request, mp)
    result = analysis.check_inner_semicontinuity(
        mp, param_radius=cfg["param_radius"],
        point_radius=cfg["point_radius"], seed=cfg["seed"],
        samples=cfg["samples"])
    report = {
        "schema": SCHEMA,
        "command": "check-liminf",
        "config": {
            "input": desc,
            "seed": cfg["seed"],
            "samples": cfg["samples"],
            "param_radius": cfg["param_radius"],
            "point_radius": cfg["point_radius"],
            "tolerances": _tolerances_dict(mp.tolerances),
        },
    }
    report.update(result.as_dict())
    return report


def handle_estimate(request: schemas.EstimateRequest,
                    input_desc: dict | None = None) -> dict:
    mp, desc, _ = resolve_problem(request, input_desc)
    cfg = _sampling_config(request, mp)
    result = analysis.run_estimate_pipeline(
        mp, param_radius=cfg["param_radius"],
        point_radius=cfg["point_radius"], seed=cfg["seed"],
        samples=cfg["samples"])
    report = {
        "schema": SCHEMA,
        "command": "estimate",
        "config": {
            "input": desc,
            "seed": cfg["seed"],
            "samples": cfg["samples"],
            "param_radius": cfg["param_radius"],
            "point_radius": cfg["point_radius"],
            "tolerances": _tolerances_dict(mp.tolerances),
        },
    }
    report.update(result.as_dict())
    return report


def handle_blowup(request: schemas.BlowupRequest,
                  input_desc: dict | None = None) -> dict:
    mp, desc, scenario = resolve_problem(request, input_desc)
    try:
        policy = analysis.parse_policy(request.policy)
    except ValueError as exc:
        raise ProblemFormatError(str(exc), "policy") from exc
    if request.points is not None:
        sequence = [(np.asarray(pt.p, dtype=float),
                     np.asarray(pt.w, dtype=float))
                    for pt in request.points]
        sequence_name = "explicit"
    elif scenario is not None and scenario.sequences:
        try:
            spec = scenario.sequence(request.sequence)
        except KeyError as exc:
            raise ProblemFormatError(str(exc), "sequence") from exc
        sequence = spec.points(request.kmax)
        sequence_name = spec.name
    else:
        raise ProblemFormatError(
            "no sequence available: pass explicit points or pick a scenario "
            "with built-in sequences", "points")
    result = analysis.detect_multiplier_blowup(mp, sequence, policy,
                                               mp.tolerances)
    report = {
        "schema": SCHEMA,
        "command": "blowup",
        "config": {
            "input": desc,
            "policy": result.policy,
            "kmax": request.kmax,
            "sequence": sequence_name,
            "tolerances": _tolerances_dict(mp.tolerances),
        },
    }
    report.update(result.as_dict())
    return report


def handle_scenarios() -> dict:
    return {
        "schema": SCHEMA,
        "command": "scenarios",
        "scenarios": list_scenarios(),
        "random_pattern": "random-<seed>",
    }
