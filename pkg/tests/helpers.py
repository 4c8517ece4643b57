"""Shared builders for the test suite."""

import numpy as np

from movepoly.polyhedron import (AffineConstraint, KIND_EQ, KIND_INEQ,
                                 MovingPolyhedron, PolyhedronInstance)
from movepoly.scenarios import get_scenario, random_scenario


def constant_constraint(kind, gradient, rhs, param_dim=1):
    """A constraint whose gradient and right-hand side ignore the parameter."""
    gradient = np.asarray(gradient, dtype=float)
    return AffineConstraint(kind=kind,
                            A=np.zeros((gradient.size, param_dim)),
                            b=gradient,
                            c=np.zeros(param_dim),
                            d0=float(rhs))


def make_instance(gradients, rhs, n_eq, param=(0.0,)):
    """Bare polyhedron snapshot for solver-level tests."""
    return PolyhedronInstance(param=np.asarray(param, dtype=float),
                              gradients=np.asarray(gradients, dtype=float),
                              rhs=np.asarray(rhs, dtype=float),
                              n_eq=n_eq)


def paper_problem() -> MovingPolyhedron:
    return get_scenario("paper-example").problem


def paper_points(kmax):
    """The built-in approach sequence (p_k, w_k) for k = 1..kmax."""
    scenario = get_scenario("paper-example")
    return scenario.sequence().points(kmax)


def corpus_problem(seed: int) -> MovingPolyhedron:
    """Deterministic small random problem; dimensions vary with the seed.

    Keeps d at most 4 and the constraint count at most 6 so the
    brute-force oracle stays cheap.
    """
    d = 2 + seed % 3
    m = 1 + (seed // 3) % 3
    n_eq = (seed // 9) % min(3, d)
    n_ineq = 1 + (seed // 27) % 4
    tight = (0.0, 0.25, 0.5, 1.0)[(seed // 108) % 4]
    scenario = random_scenario(seed, d=d, m=m, n_eq=n_eq, n_ineq=n_ineq,
                               fraction_tight=tight)
    return scenario.problem


def corpus_query(mp: MovingPolyhedron, seed: int):
    """A parameter near base and a query point that is often infeasible."""
    rng = np.random.default_rng(977_000_003 + seed)
    p = mp.base_param + rng.uniform(-0.3, 0.3, size=mp.param_dim)
    w = mp.base_point + rng.uniform(-1.5, 1.5, size=mp.ambient_dim)
    return p, w


def parameter_gap_problem() -> MovingPolyhedron:
    """One ambient dimension, equalities x = 0 and x = p; empty for p != 0."""
    eq_fixed = AffineConstraint(kind=KIND_EQ, A=np.zeros((1, 1)),
                                b=np.array([1.0]), c=np.zeros(1), d0=0.0)
    eq_moving = AffineConstraint(kind=KIND_EQ, A=np.zeros((1, 1)),
                                 b=np.array([1.0]), c=np.array([1.0]), d0=0.0)
    return MovingPolyhedron([eq_fixed, eq_moving],
                            base_param=np.zeros(1),
                            base_point=np.zeros(1))


def parallel_gradient_problem(sign: float) -> MovingPolyhedron:
    """Two inequalities whose gradients align at the base parameter.

    Constraint 1 keeps gradient (1, 0); constraint 2 has gradient
    (sign, p1).  Both right-hand sides stay at zero.
    """
    g1 = constant_constraint(KIND_INEQ, [1.0, 0.0], 0.0)
    g2 = AffineConstraint(kind=KIND_INEQ,
                          A=np.array([[0.0], [1.0]]),
                          b=np.array([sign, 0.0]),
                          c=np.zeros(1), d0=0.0)
    return MovingPolyhedron([g1, g2], base_param=np.zeros(1),
                            base_point=np.zeros(2))


def guard_heavy_problem(n_ineq: int = 13) -> MovingPolyhedron:
    """Many inequalities all tight at the base point (subset blow-up)."""
    rng = np.random.default_rng(4242)
    constraints = []
    for _ in range(n_ineq):
        g = rng.uniform(-1.0, 1.0, size=3)
        g /= np.linalg.norm(g)
        constraints.append(constant_constraint(KIND_INEQ, g, 0.0))
    return MovingPolyhedron(constraints, base_param=np.zeros(1),
                            base_point=np.zeros(3))
