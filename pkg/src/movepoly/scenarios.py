"""Built-in problem instances and seeded random generation.

Two fixed scenarios anchor the test surface: ``paper-example`` is a plane
pinned to the origin by two equalities plus one inequality whose normal
vector equals the parameter, so the set is always the single point (0,0) but
the gradient family degenerates at the base parameter; ``rcrcq-violation``
is a pair of inequalities whose normals are opposite at the base parameter
and fan apart for nonzero parameters, which breaks the constant-rank
property and makes minimal multiplier norms blow up near the base point.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ProblemFormatError
from .linalg import VectorFamily, numerical_rank
from .polyhedron import KIND_EQ, KIND_INEQ, AffineConstraint, MovingPolyhedron

MAX_REDRAWS = 100


@dataclass(frozen=True)
class SequenceSpec:
    """A closed-form (p_k, w_k) sequence, k = 1, 2, ..."""

    name: str
    description: str
    point_at: Callable[[int], tuple[np.ndarray, np.ndarray]] = field(repr=False)

    def points(self, kmax: int) -> list[tuple[np.ndarray, np.ndarray]]:
        if kmax < 1:
            raise ValueError("kmax must be at least 1")
        return [self.point_at(k) for k in range(1, kmax + 1)]


@dataclass(frozen=True)
class Scenario:
    name: str
    description: str
    problem: MovingPolyhedron
    sequences: tuple[SequenceSpec, ...] = ()
    # closed-form expectations, each entry derived from the geometry
    expected: dict = field(default_factory=dict)

    def sequence(self, name: str | None = None) -> SequenceSpec:
        if not self.sequences:
            raise KeyError(f"scenario {self.name!r} has no sequences")
        if name is None:
            return self.sequences[0]
        for seq in self.sequences:
            if seq.name == name:
                return seq
        raise KeyError(f"scenario {self.name!r} has no sequence {name!r}")


def paper_example() -> Scenario:
    """The degenerate-at-base example: C(p) = {origin} for every p."""
    constraints = (
        AffineConstraint(kind=KIND_EQ, A=np.zeros((2, 2)), b=[1.0, 0.0],
                         c=[0.0, 0.0], d0=0.0),
        AffineConstraint(kind=KIND_EQ, A=np.zeros((2, 2)), b=[0.0, 1.0],
                         c=[0.0, 0.0], d0=0.0),
        AffineConstraint(kind=KIND_INEQ, A=np.eye(2), b=[0.0, 0.0],
                         c=[0.0, 0.0], d0=0.0),
    )
    problem = MovingPolyhedron(constraints=constraints,
                               base_param=[0.0, 0.0], base_point=[0.0, 0.0])

    def curve(k: int):
        return (np.array([1.0 / k**2, 1.0 / k**2]),
                np.array([1.0 / k, 2.0 / k]))

    sequence = SequenceSpec(
        name="approach",
        description="p_k = (1/k^2, 1/k^2), w_k = (1/k, 2/k): the query "
                    "approaches the base point while the inequality normal "
                    "degenerates quadratically faster",
        point_at=curve)
    expected = {
        # the two equalities force x = (0, 0); the inequality then reads 0 <= 0
        "set_is_origin": True,
        "projection_distance_formula": "sqrt(5)/k along the 'approach' sequence",
        "rcrcq_verdict": "holds",
        "subset_rank": 2,
        "blowup_subfamily": (2, 3),
        "blowup_third_component_formula": "k^2/sqrt(5)",
        "reduced_l1": 3.0 / math.sqrt(5.0),
        "min_l1_ball_bound": math.sqrt(2.0),
    }
    return Scenario(
        name="paper-example",
        description="two fixed equalities pin the plane to the origin; one "
                    "inequality normal equals the parameter itself, so its "
                    "gradient vanishes at the base parameter",
        problem=problem, sequences=(sequence,), expected=expected)


def rcrcq_violation() -> Scenario:
    """Opposite normals at the base parameter that fan apart away from it."""
    constraints = (
        AffineConstraint(kind=KIND_INEQ, A=np.zeros((2, 1)), b=[1.0, 0.0],
                         c=[0.0], d0=0.0),
        AffineConstraint(kind=KIND_INEQ, A=[[0.0], [1.0]], b=[-1.0, 0.0],
                         c=[0.0], d0=0.0),
    )
    problem = MovingPolyhedron(constraints=constraints, base_param=[0.0],
                               base_point=[0.0, 0.0])
    expected = {
        # ranks: {(1,0), (-1, p1)} has rank 1 at p1 = 0 and rank 2 otherwise
        "rcrcq_verdict": "violated",
        "violating_subset": (1, 2),
        # the feasible set is a sliver of angle ~ p1, so unit offsets into
        # the normal cone need multiplier mass ~ 1/p1
        "m_hat_growth": "roughly doubles per radius halving",
    }
    return Scenario(
        name="rcrcq-violation",
        description="two inequalities whose normals are opposite at the base "
                    "parameter and spread apart linearly in the parameter; "
                    "rank jumps from 1 to 2 and multiplier norms blow up",
        problem=problem, expected=expected)


BUILTIN_SCENARIOS = {
    "paper-example": paper_example,
    "rcrcq-violation": rcrcq_violation,
}

_RANDOM_NAME = re.compile(r"^random-(\d+)$")


def random_scenario(seed: int, d: int = 3, m: int = 2, n_eq: int = 1,
                    n_ineq: int = 2, fraction_tight: float = 0.25) -> Scenario:
    """A feasible-by-construction random problem, reproducible from the seed.

    Constraint entries are uniform in [-1, 1]; right-hand sides are shifted
    so a drawn anchor point is feasible at the base parameter, with a
    configurable fraction of inequalities tight there.  Families whose rank
    certificate is borderline at the base parameter are redrawn.
    """
    if not 1 <= d <= 6:
        raise ValueError("ambient dimension limited to 1..6")
    if not 1 <= m <= 6:
        raise ValueError("parameter dimension limited to 1..6")
    if n_eq < 0 or n_ineq < 0 or n_eq + n_ineq < 1:
        raise ValueError("need at least one constraint")
    if n_eq + n_ineq > 10:
        raise ValueError("constraint count limited to 10")
    if not 0.0 <= fraction_tight <= 1.0:
        raise ValueError("fraction_tight must lie in [0, 1]")

    rng = np.random.default_rng(seed)
    for _ in range(MAX_REDRAWS):
        base_param = rng.uniform(-1.0, 1.0, m)
        base_point = rng.uniform(-1.0, 1.0, d)
        constraints = []
        for i in range(n_eq + n_ineq):
            kind = KIND_EQ if i < n_eq else KIND_INEQ
            A = rng.uniform(-1.0, 1.0, (d, m))
            b = rng.uniform(-1.0, 1.0, d)
            c = rng.uniform(-1.0, 1.0, m)
            gradient = A @ base_param + b
            value = float(gradient @ base_point)
            slack = 0.0
            if kind == KIND_INEQ and rng.random() >= fraction_tight:
                slack = float(rng.uniform(0.1, 1.0))
            d0 = value - float(c @ base_param) + slack
            constraints.append(AffineConstraint(kind=kind, A=A, b=b, c=c,
                                                d0=d0))
        gradients = np.array([con.gradient(base_param) for con in constraints])
        cert = numerical_rank(VectorFamily(gradients,
                                           tuple(range(1, len(constraints) + 1))))
        if cert.borderline:
            continue
        problem = MovingPolyhedron(constraints=tuple(constraints),
                                   base_param=base_param,
                                   base_point=base_point)
        return Scenario(
            name=f"random-{seed}",
            description=f"seeded random family: d={d}, m={m}, "
                        f"{n_eq} equalities, {n_ineq} inequalities",
            problem=problem,
            expected={"feasible_at_base": True})
    raise RuntimeError(f"no well-conditioned draw within {MAX_REDRAWS} tries "
                       f"for seed {seed}")


def get_scenario(name: str) -> Scenario:
    """Look up a built-in scenario or a ``random-<seed>`` name."""
    factory = BUILTIN_SCENARIOS.get(name)
    if factory is not None:
        return factory()
    match = _RANDOM_NAME.match(name)
    if match:
        return random_scenario(int(match.group(1)))
    known = ", ".join(sorted(BUILTIN_SCENARIOS))
    raise ProblemFormatError(
        f"unknown scenario {name!r}; built-ins: {known}; seeded names "
        f"matching random-<seed> are also accepted", "scenario")


def list_scenarios() -> list[dict]:
    entries = []
    for name, factory in BUILTIN_SCENARIOS.items():
        scenario = factory()
        entries.append({
            "name": name,
            "description": scenario.description,
            "sequences": [seq.name for seq in scenario.sequences],
        })
    return entries
