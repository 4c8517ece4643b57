"""Command-line front end.

Every command builds the same request model the HTTP service accepts and, by
default, runs the shared handler in process.  With ``--server URL`` the
request is posted to a running service instead; the JSON bytes received are
exactly what the in-process path would have produced.

Exit codes: 0 success, 1 input error, 2 infeasible set, 3 solver iteration
limit, 4 enumeration guard exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys

import httpx
from pydantic import ValidationError

from .config import MAX_SEED
from .errors import (DimensionMismatchError, EnumerationGuardError,
                     InfeasibleSetError, MovepolyError, ProblemFormatError,
                     SamplingDiagnosticError, SolverLimitError)
from .problem_io import ProblemFileModel, TolerancesModel
from .projection import STATUS_INFEASIBLE, STATUS_ITERATION_LIMIT
from .reports import canonical_json, render_text
from .service import handlers, schemas

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_INFEASIBLE = 2
EXIT_SOLVER_LIMIT = 3
EXIT_GUARD = 4

_ERROR_EXITS = (
    (ProblemFormatError, EXIT_INPUT),
    (DimensionMismatchError, EXIT_INPUT),
    (InfeasibleSetError, EXIT_INFEASIBLE),
    (SolverLimitError, EXIT_SOLVER_LIMIT),
    (EnumerationGuardError, EXIT_GUARD),
    (SamplingDiagnosticError, EXIT_INPUT),
    (MovepolyError, EXIT_INPUT),
)

_REMOTE_EXITS = {
    "input": EXIT_INPUT,
    "infeasible": EXIT_INFEASIBLE,
    "solver_limit": EXIT_SOLVER_LIMIT,
    "guard": EXIT_GUARD,
    "sampling": EXIT_INPUT,
    "error": EXIT_INPUT,
}


def _vector(text: str) -> list[float]:
    try:
        parts = [float(part) for part in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"bad vector literal {text!r}; expected comma-separated decimals"
        ) from None
    if not parts:
        raise argparse.ArgumentTypeError("vector must not be empty")
    return parts


def _seed(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad seed {text!r}") from None
    if not 0 <= value <= MAX_SEED:
        raise argparse.ArgumentTypeError(
            "seed must fit in an unsigned 64-bit integer")
    return value


def _positive(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad number {text!r}") from None
    if not value > 0:
        raise argparse.ArgumentTypeError("value must be positive")
    return value


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad integer {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError("value must be at least 1")
    return value


def _add_source_args(cmd: argparse.ArgumentParser):
    group = cmd.add_mutually_exclusive_group(required=True)
    group.add_argument("--input", metavar="FILE",
                       help="problem description file (JSON)")
    group.add_argument("--scenario", metavar="NAME",
                       help="built-in scenario name, or random-<seed>")


def _add_output_args(cmd: argparse.ArgumentParser):
    cmd.add_argument("--format", choices=("text", "json"), default="text",
                     help="report format (default: text)")
    cmd.add_argument("--out", metavar="FILE",
                     help="write the report here instead of stdout")
    cmd.add_argument("--server", metavar="URL",
                     help="post the request to a running service")
    cmd.add_argument("--tol", metavar="KEY=VALUE", action="append",
                     default=[],
                     help="tolerance override, repeatable (e.g. kkt=1e-10)")


def _add_sampling_args(cmd: argparse.ArgumentParser, point_radius=True):
    cmd.add_argument("--seed", type=_seed, default=None,
                     help="sampling seed (default from the problem, else 0)")
    cmd.add_argument("--samples", type=_positive_int, default=None,
                     metavar="N", help="samples per estimator (default 500)")
    cmd.add_argument("--param-radius", type=_positive, default=None,
                     metavar="R", help="parameter ball radius")
    if point_radius:
        cmd.add_argument("--point-radius", type=_positive, default=None,
                         metavar="R", help="point ball radius")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="movepoly",
        description="projection, multiplier and regularity analysis for "
                    "parametric polyhedral sets")
    sub = parser.add_subparsers(dest="command", required=True)

    cmd = sub.add_parser("project", help="project a point onto the set at "
                                         "one parameter")
    _add_source_args(cmd)
    cmd.add_argument("--p", type=_vector, required=True, metavar="V",
                     help="parameter, comma-separated decimals")
    cmd.add_argument("--w", type=_vector, required=True, metavar="V",
                     help="point to project, comma-separated decimals")
    _add_output_args(cmd)
    cmd.set_defaults(func=_cmd_project)

    cmd = sub.add_parser("multipliers",
                         help="projection plus normalized and minimal-l1 "
                              "multipliers")
    _add_source_args(cmd)
    cmd.add_argument("--p", type=_vector, required=True, metavar="V")
    cmd.add_argument("--w", type=_vector, required=True, metavar="V")
    _add_output_args(cmd)
    cmd.set_defaults(func=_cmd_multipliers)

    cmd = sub.add_parser("check-rcrcq",
                         help="constant-rank check over a sampled parameter "
                              "ball")
    _add_source_args(cmd)
    _add_sampling_args(cmd, point_radius=False)
    _add_output_args(cmd)
    cmd.set_defaults(func=_cmd_check_rcrcq)

    cmd = sub.add_parser("check-liminf",
                         help="inner-semicontinuity check by sampled "
                              "projections of the base point")
    _add_source_args(cmd)
    _add_sampling_args(cmd)
    _add_output_args(cmd)
    cmd.set_defaults(func=_cmd_check_liminf)

    cmd = sub.add_parser("estimate",
                         help="full pipeline: liminf, constant rank, "
                              "multiplier bound, error-bound constant, "
                              "Lipschitz modulus")
    _add_source_args(cmd)
    _add_sampling_args(cmd)
    _add_output_args(cmd)
    cmd.set_defaults(func=_cmd_estimate)

    cmd = sub.add_parser("blowup",
                         help="multiplier norms along a (p_k, w_k) sequence")
    _add_source_args(cmd)
    cmd.add_argument("--policy", default="reduced", metavar="POLICY",
                     help="'reduced', 'min-l1' or 'fixed:<labels>' "
                          "(default: reduced)")
    cmd.add_argument("--kmax", type=_positive_int, default=20, metavar="K",
                     help="sequence length (default 20)")
    cmd.add_argument("--sequence", default=None, metavar="NAME",
                     help="named scenario sequence (default: first)")
    cmd.add_argument("--points", default=None, metavar="FILE",
                     help="JSON file with explicit [{p, w}, ...] entries")
    _add_output_args(cmd)
    cmd.set_defaults(func=_cmd_blowup)

    cmd = sub.add_parser("scenarios", help="list built-in scenarios")
    _add_output_args(cmd)
    cmd.set_defaults(func=_cmd_scenarios)

    cmd = sub.add_parser("serve", help="run the HTTP service")
    cmd.add_argument("--host", default="127.0.0.1")
    cmd.add_argument("--port", type=int, default=8000)
    cmd.set_defaults(func=_cmd_serve)
    return parser


def _load_problem_model(path: str) -> ProblemFileModel:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ProblemFormatError(f"cannot read problem file: {exc}",
                                 path) from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProblemFormatError(f"invalid JSON: {exc}", path) from exc
    try:
        return ProblemFileModel.model_validate(data)
    except ValidationError as exc:
        first = exc.errors()[0]
        loc = ".".join(str(part) for part in first["loc"])
        raise ProblemFormatError(first["msg"], loc) from exc


def _tolerances_model(pairs: list[str]) -> TolerancesModel | None:
    if not pairs:
        return None
    data = {}
    for pair in pairs:
        key, sep, value = pair.partition("=")
        if not sep:
            raise ProblemFormatError("expected KEY=VALUE", f"--tol {pair!r}")
        try:
            data[key] = int(value) if key == "iteration_cap_factor" \
                else float(value)
        except ValueError:
            raise ProblemFormatError(f"bad number {value!r}",
                                     f"--tol {key}") from None
    try:
        return TolerancesModel(**data)
    except ValidationError as exc:
        first = exc.errors()[0]
        loc = ".".join(str(part) for part in first["loc"])
        raise ProblemFormatError(first["msg"], f"--tol {loc}") from exc


def _source_kwargs(args) -> dict:
    if args.input is not None:
        return {"problem": _load_problem_model(args.input)}
    return {"scenario": args.scenario}


def _input_desc(args) -> dict | None:
    if getattr(args, "input", None) is not None:
        return {"kind": "file", "path": args.input}
    return None


def _exit_for_report(report: dict) -> int:
    status = report.get("status")
    if status == STATUS_INFEASIBLE:
        return EXIT_INFEASIBLE
    if status == STATUS_ITERATION_LIMIT:
        return EXIT_SOLVER_LIMIT
    return EXIT_OK


def _emit(args, report: dict, report_bytes: bytes):
    if args.format == "json":
        payload = report_bytes
    else:
        payload = (render_text(report) + "\n").encode("utf-8")
    if args.out:
        with open(args.out, "wb") as fh:
            fh.write(payload)
    else:
        sys.stdout.buffer.write(payload)
        sys.stdout.buffer.flush()


def _dispatch(args, path: str, request) -> int:
    if getattr(args, "server", None):
        url = args.server.rstrip("/") + path
        if request is None:
            response = httpx.get(url, timeout=600.0)
        else:
            payload = request.model_dump(mode="json", exclude_none=True)
            response = httpx.post(url, json=payload, timeout=600.0)
        if response.status_code == 400:
            error = response.json().get("error", {})
            print(f"error: {error.get('message', 'request failed')}",
                  file=sys.stderr)
            return _REMOTE_EXITS.get(error.get("code"), EXIT_INPUT)
        if response.status_code == 422:
            print(f"error: invalid request: {response.text}", file=sys.stderr)
            return EXIT_INPUT
        if response.status_code != 200:
            print(f"error: server returned {response.status_code}",
                  file=sys.stderr)
            return EXIT_INPUT
        report_bytes = response.content
        report = json.loads(report_bytes)
    else:
        if path == "/scenarios":
            report = handlers.handle_scenarios()
        else:
            handler = {
                "/project": handlers.handle_project,
                "/multipliers": handlers.handle_multipliers,
                "/check-rcrcq": handlers.handle_check_rcrcq,
                "/check-liminf": handlers.handle_check_liminf,
                "/estimate": handlers.handle_estimate,
                "/blowup": handlers.handle_blowup,
            }[path]
            report = handler(request, _input_desc(args))
        report_bytes = (canonical_json(report) + "\n").encode("utf-8")
    _emit(args, report, report_bytes)
    return _exit_for_report(report)


def _cmd_project(args) -> int:
    request = schemas.ProjectRequest(p=args.p, w=args.w,
                                     tolerances=_tolerances_model(args.tol),
                                     **_source_kwargs(args))
    return _dispatch(args, "/project", request)


def _cmd_multipliers(args) -> int:
    request = schemas.MultipliersRequest(
        p=args.p, w=args.w, tolerances=_tolerances_model(args.tol),
        **_source_kwargs(args))
    return _dispatch(args, "/multipliers", request)


def _cmd_check_rcrcq(args) -> int:
    request = schemas.RcrcqRequest(
        seed=args.seed, samples=args.samples, param_radius=args.param_radius,
        tolerances=_tolerances_model(args.tol), **_source_kwargs(args))
    return _dispatch(args, "/check-rcrcq", request)


def _cmd_check_liminf(args) -> int:
    request = schemas.LiminfRequest(
        seed=args.seed, samples=args.samples, param_radius=args.param_radius,
        point_radius=args.point_radius,
        tolerances=_tolerances_model(args.tol), **_source_kwargs(args))
    return _dispatch(args, "/check-liminf", request)


def _cmd_estimate(args) -> int:
    request = schemas.EstimateRequest(
        seed=args.seed, samples=args.samples, param_radius=args.param_radius,
        point_radius=args.point_radius,
        tolerances=_tolerances_model(args.tol), **_source_kwargs(args))
    return _dispatch(args, "/estimate", request)


def _load_points(path: str) -> list[schemas.SequencePoint]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ProblemFormatError(f"cannot read points file: {exc}",
                                 path) from exc
    except json.JSONDecodeError as exc:
        raise ProblemFormatError(f"invalid JSON: {exc}", path) from exc
    if not isinstance(data, list):
        raise ProblemFormatError("expected a JSON list of {p, w} entries",
                                 path)
    try:
        return [schemas.SequencePoint.model_validate(item) for item in data]
    except ValidationError as exc:
        first = exc.errors()[0]
        raise ProblemFormatError(first["msg"], f"{path}: points") from exc


def _cmd_blowup(args) -> int:
    points = _load_points(args.points) if args.points else None
    request = schemas.BlowupRequest(
        policy=args.policy, kmax=args.kmax, sequence=args.sequence,
        points=points, tolerances=_tolerances_model(args.tol),
        **_source_kwargs(args))
    return _dispatch(args, "/blowup", request)


def _cmd_scenarios(args) -> int:
    return _dispatch(args, "/scenarios", None)


def _cmd_serve(args) -> int:
    import uvicorn

    from .service.app import app
    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_INPUT
    try:
        return args.func(args)
    except ValidationError as exc:
        first = exc.errors()[0]
        loc = ".".join(str(part) for part in first["loc"])
        print(f"error: {loc}: {first['msg']}", file=sys.stderr)
        return EXIT_INPUT
    except MovepolyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        for klass, code in _ERROR_EXITS:
            if isinstance(exc, klass):
                return code
        return EXIT_INPUT
    except httpx.HTTPError as exc:
        print(f"error: cannot reach server: {exc}", file=sys.stderr)
        return EXIT_INPUT


def entrypoint():
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
