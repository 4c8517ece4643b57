"""Parametric polyhedra: families of affine constraints moved by a parameter.

A problem is a family of constraints ``<x, g_i(p)> (= or <=) f_i(p)`` whose
normal vectors and right-hand sides depend affinely on a parameter ``p``:
``g_i(p) = A_i p + b_i`` and ``f_i(p) = <c_i, p> + d0_i``.  Equality
constraints always come first and constraints are labeled 1..n in public
surfaces.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT_SAMPLING, DEFAULT_TOLERANCES, SamplingConfig, Tolerances
from .errors import DimensionMismatchError, ProblemFormatError
from .linalg import VectorFamily

KIND_EQ = "eq"
KIND_INEQ = "ineq"


def _frozen_array(values, shape, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.shape != shape:
        raise DimensionMismatchError(f"{name} must have shape {shape},"
                                     f" got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DimensionMismatchError(f"{name} must be finite")
    arr = arr.copy()
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class AffineConstraint:
    """One constraint row with affine parameter dependence."""

    kind: str                  # KIND_EQ or KIND_INEQ
    A: np.ndarray              # (d, m), normal-vector sensitivity
    b: np.ndarray              # (d,), normal vector at p = 0
    c: np.ndarray              # (m,), right-hand-side sensitivity
    d0: float

    def __post_init__(self):
        if self.kind not in (KIND_EQ, KIND_INEQ):
            raise ProblemFormatError(f"kind must be {KIND_EQ!r} or {KIND_INEQ!r}",
                                     "kind")
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        d, m = A.shape
        object.__setattr__(self, "A", _frozen_array(A, (d, m), "A"))
        object.__setattr__(self, "b", _frozen_array(self.b, (d,), "b"))
        object.__setattr__(self, "c", _frozen_array(self.c, (m,), "c"))
        object.__setattr__(self, "d0", float(self.d0))

    @property
    def ambient_dim(self) -> int:
        return self.A.shape[0]

    @property
    def param_dim(self) -> int:
        return self.A.shape[1]

    def gradient(self, p: np.ndarray) -> np.ndarray:
        return self.A @ np.asarray(p, dtype=float) + self.b

    def rhs(self, p: np.ndarray) -> float:
        return float(self.c @ np.asarray(p, dtype=float) + self.d0)

    def lipschitz(self) -> tuple[float, float]:
        """(modulus of p -> g(p), modulus of p -> f(p)), exact for affine maps."""
        grad_mod = float(np.linalg.norm(self.A, 2)) if self.A.size else 0.0
        return grad_mod, float(np.linalg.norm(self.c))

    def __eq__(self, other) -> bool:
        if not isinstance(other, AffineConstraint):
            return NotImplemented
        return (self.kind == other.kind and np.array_equal(self.A, other.A)
                and np.array_equal(self.b, other.b)
                and np.array_equal(self.c, other.c) and self.d0 == other.d0)


@dataclass(frozen=True, eq=False)
class PolyhedronInstance:
    """The polyhedron at one fixed parameter value."""

    param: np.ndarray          # (m,)
    gradients: np.ndarray      # (n, d), row i is g_i(param)
    rhs: np.ndarray            # (n,)
    n_eq: int

    def __post_init__(self):
        object.__setattr__(self, "param",
                           _frozen_array(self.param, np.asarray(self.param).shape,
                                         "param"))
        grads = np.atleast_2d(np.asarray(self.gradients, dtype=float))
        object.__setattr__(self, "gradients",
                           _frozen_array(grads, grads.shape, "gradients"))
        object.__setattr__(self, "rhs",
                           _frozen_array(self.rhs, (grads.shape[0],), "rhs"))
        if not 0 <= self.n_eq <= grads.shape[0]:
            raise DimensionMismatchError("n_eq out of range")

    @property
    def n(self) -> int:
        return self.gradients.shape[0]

    @property
    def dim(self) -> int:
        return self.gradients.shape[1]

    @property
    def labels(self) -> tuple[int, ...]:
        return tuple(range(1, self.n + 1))

    @property
    def eq_labels(self) -> tuple[int, ...]:
        return tuple(range(1, self.n_eq + 1))

    @property
    def ineq_labels(self) -> tuple[int, ...]:
        return tuple(range(self.n_eq + 1, self.n + 1))

    def values(self, x: np.ndarray) -> np.ndarray:
        """Constraint values <x, g_i> - f_i, one per row."""
        return self.gradients @ np.asarray(x, dtype=float) - self.rhs

    def residual(self, x: np.ndarray) -> float:
        """Worst violation: |value| on equalities, positive part on the rest."""
        vals = self.values(x)
        viol = np.concatenate([np.abs(vals[:self.n_eq]),
                               np.maximum(vals[self.n_eq:], 0.0)])
        return float(np.max(viol)) if viol.size else 0.0

    def membership(self, x: np.ndarray,
                   tol: float = DEFAULT_TOLERANCES.feasibility) -> bool:
        return self.residual(x) <= tol

    def active_set(self, x: np.ndarray,
                   eps: float = DEFAULT_TOLERANCES.active) -> tuple[int, ...]:
        """Labels with |value| <= eps; x must be feasible within eps."""
        if self.residual(x) > eps:
            raise ProblemFormatError(
                f"point is infeasible beyond the activity tolerance "
                f"(residual {self.residual(x):.3e} > {eps:.3e})", "x")
        vals = self.values(x)
        return tuple(i + 1 for i in range(self.n) if abs(vals[i]) <= eps)

    def gradient_family(self, labels=None) -> VectorFamily:
        if labels is None:
            labels = self.labels
        labels = tuple(labels)
        rows = [l - 1 for l in labels]
        return VectorFamily(self.gradients[rows], labels)


@dataclass(frozen=True, eq=False)
class MovingPolyhedron:
    """A constraint family plus the base point the analysis is anchored at."""

    constraints: tuple[AffineConstraint, ...]
    base_param: np.ndarray     # (m,)
    base_point: np.ndarray     # (d,)
    param_radius: float = 0.5
    point_radius: float = 0.5
    tolerances: Tolerances = DEFAULT_TOLERANCES
    sampling: SamplingConfig = DEFAULT_SAMPLING
    # original 1-based positions after the equalities-first reorder, when a
    # parsed file listed constraints in a different order
    source_order: tuple[int, ...] | None = field(default=None)

    def __post_init__(self):
        constraints = tuple(self.constraints)
        if not constraints:
            raise ProblemFormatError("at least one constraint required",
                                     "constraints")
        d = constraints[0].ambient_dim
        m = constraints[0].param_dim
        for i, con in enumerate(constraints):
            if con.ambient_dim != d or con.param_dim != m:
                raise ProblemFormatError(
                    "all constraints must share ambient and parameter "
                    "dimensions", f"constraints[{i}]")
        seen_ineq = False
        for i, con in enumerate(constraints):
            if con.kind == KIND_INEQ:
                seen_ineq = True
            elif seen_ineq:
                raise ProblemFormatError(
                    "equality constraints must precede inequalities",
                    f"constraints[{i}]")
        object.__setattr__(self, "constraints", constraints)
        object.__setattr__(self, "base_param",
                           _frozen_array(self.base_param, (m,), "base_point.p"))
        object.__setattr__(self, "base_point",
                           _frozen_array(self.base_point, (d,), "base_point.x"))
        if not (self.param_radius > 0 and self.point_radius > 0):
            raise ProblemFormatError("radii must be positive", "radii")
        inst = self.instantiate(self.base_param)
        resid = inst.residual(self.base_point)
        if resid > self.tolerances.feasibility:
            raise ProblemFormatError(
                f"base point violates the constraints at the base parameter "
                f"(residual {resid:.3e})", "base_point.x")

    @property
    def ambient_dim(self) -> int:
        return self.constraints[0].ambient_dim

    @property
    def param_dim(self) -> int:
        return self.constraints[0].param_dim

    @property
    def n(self) -> int:
        return len(self.constraints)

    @property
    def n_eq(self) -> int:
        return sum(1 for c in self.constraints if c.kind == KIND_EQ)

    @property
    def labels(self) -> tuple[int, ...]:
        return tuple(range(1, self.n + 1))

    @property
    def eq_labels(self) -> tuple[int, ...]:
        return tuple(range(1, self.n_eq + 1))

    @property
    def ineq_labels(self) -> tuple[int, ...]:
        return tuple(range(self.n_eq + 1, self.n + 1))

    def instantiate(self, p: np.ndarray) -> PolyhedronInstance:
        p = np.asarray(p, dtype=float)
        if p.shape != (self.param_dim,):
            raise DimensionMismatchError(
                f"parameter must have shape ({self.param_dim},), got {p.shape}")
        gradients = np.array([c.gradient(p) for c in self.constraints])
        rhs = np.array([c.rhs(p) for c in self.constraints])
        return PolyhedronInstance(param=p, gradients=gradients, rhs=rhs,
                                  n_eq=self.n_eq)

    def lipschitz_constants(self) -> list[tuple[float, float]]:
        """Per-constraint moduli (gradient map, right-hand-side map)."""
        return [c.lipschitz() for c in self.constraints]

    def __eq__(self, other) -> bool:
        if not isinstance(other, MovingPolyhedron):
            return NotImplemented
        return (self.constraints == other.constraints
                and np.array_equal(self.base_param, other.base_param)
                and np.array_equal(self.base_point, other.base_point)
                and self.param_radius == other.param_radius
                and self.point_radius == other.point_radius
                and self.tolerances == other.tolerances
                and self.sampling == other.sampling)
