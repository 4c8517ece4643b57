"""Euclidean projection onto one polyhedron instance, with multipliers.

Two independent routes compute the same projection:

* :func:`project` runs a dual active-set iteration (identity Hessian).  It
  keeps a working set of constraint rows with independent normal vectors,
  enters the most violated constraint, and takes the largest step that keeps
  the working multipliers sign-feasible, dropping blockers as needed.
  Equalities are folded in first, so the iteration starts from the point of
  the equality subsystem nearest to the query.
* :func:`project_bruteforce` enumerates candidate working sets outright and
  is the reference oracle for the solver at small sizes.

Multipliers are returned unnormalized: the stationarity identity is
``w - point = sum_i multipliers[i] * g_i(p)``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_SAMPLING, DEFAULT_TOLERANCES, Tolerances
from .errors import EnumerationGuardError
from .linalg import VectorFamily, max_independent_subfamily, numerical_rank
from .polyhedron import PolyhedronInstance

STATUS_CONVERGED = "converged"
STATUS_INFEASIBLE = "infeasible_set"
STATUS_ITERATION_LIMIT = "iteration_limit"


@dataclass(frozen=True, eq=False)
class ProjectionResult:
    status: str
    point: np.ndarray | None         # None when the set is empty
    multipliers: np.ndarray | None   # length n, unnormalized
    active: tuple[int, ...]          # labels active at the point
    distance: float
    kkt_residual: float
    iterations: int
    trace: tuple[tuple[str, int], ...]

    @property
    def converged(self) -> bool:
        return self.status == STATUS_CONVERGED


def _kkt_value(inst: PolyhedronInstance, w: np.ndarray, x: np.ndarray,
               lam: np.ndarray) -> float:
    vals = inst.values(x)
    stationarity = float(np.linalg.norm(w - x - inst.gradients.T @ lam))
    feasibility = inst.residual(x)
    ineq_vals = vals[inst.n_eq:]
    ineq_lam = lam[inst.n_eq:]
    # complementarity via the natural residual min(multiplier, slack): the
    # raw product multiplier * slack scales with the multiplier size, so on
    # badly conditioned instances it cannot beat eps * |multiplier| * |x|
    # even at an exact solution
    complementarity = float(np.max(np.minimum(
        np.maximum(ineq_lam, 0.0), np.maximum(-ineq_vals, 0.0)))) \
        if ineq_lam.size else 0.0
    sign = float(max(0.0, -np.min(ineq_lam))) if ineq_lam.size else 0.0
    return max(stationarity, feasibility, complementarity, sign)


def kkt_residual(inst: PolyhedronInstance, w: np.ndarray,
                 result: ProjectionResult) -> float:
    """Worst violation among stationarity, feasibility, complementarity, sign."""
    if result.point is None or result.multipliers is None:
        return math.inf
    return _kkt_value(inst, np.asarray(w, dtype=float), result.point,
                      result.multipliers)


def _solve_working_set(rows: np.ndarray, rhs: np.ndarray, w: np.ndarray):
    """Projection of w onto {x : rows @ x = rhs} and its multipliers.

    ``rows`` must have independent rows.  Solved through a QR factorization
    of the transposed row matrix, so both the point and the multipliers come
    out at machine precision.
    """
    if rows.shape[0] == 0:
        return w.copy(), np.zeros(0)
    q, r = np.linalg.qr(rows.T)
    qtw = q.T @ w
    shifted = qtw - np.linalg.solve(r.T, rhs)
    x = w - q @ shifted
    # badly conditioned rows leave an O(eps * cond) gap in the working-set
    # equations; two refinement passes push it back to rounding level
    for _ in range(2):
        gap = rows @ x - rhs
        shifted = shifted + np.linalg.solve(r.T, gap)
        x = w - q @ shifted
    lam = np.linalg.solve(r, shifted)
    return x, lam


def _assemble(inst: PolyhedronInstance, w: np.ndarray, x: np.ndarray,
              lam: np.ndarray, status: str, iterations: int, trace: list,
              tol: Tolerances) -> ProjectionResult:
    if status == STATUS_INFEASIBLE:
        return ProjectionResult(status=status, point=None, multipliers=None,
                                active=(), distance=math.inf,
                                kkt_residual=math.inf, iterations=iterations,
                                trace=tuple(trace))
    lam = lam.copy()
    # iteration wear can leave -1e-18-sized inequality multipliers
    ineq = slice(inst.n_eq, inst.n)
    lam[ineq] = np.where((lam[ineq] < 0) & (lam[ineq] > -tol.kkt), 0.0,
                         lam[ineq])
    distance = float(np.linalg.norm(w - x))
    if status == STATUS_CONVERGED:
        active = inst.active_set(x, tol.active)
    else:
        active = ()
    x = x.copy()
    x.flags.writeable = False
    lam.flags.writeable = False
    return ProjectionResult(status=status, point=x, multipliers=lam,
                            active=active, distance=distance,
                            kkt_residual=_kkt_value(inst, w, x, lam),
                            iterations=iterations, trace=tuple(trace))


def project(inst: PolyhedronInstance, w, tol: Tolerances = DEFAULT_TOLERANCES,
            bruteforce_guard: int = DEFAULT_SAMPLING.bruteforce_guard
            ) -> ProjectionResult:
    """Projection of ``w`` onto the instance via a dual active-set iteration.

    An infeasibility signal from the iteration is confirmed against
    :func:`project_bruteforce` whenever the instance is small enough for the
    oracle; beyond that guard the signal stands on its own.
    """
    w = np.asarray(w, dtype=float)
    n, d = inst.gradients.shape
    if w.shape != (d,):
        raise ValueError(f"w must have shape ({d},), got {w.shape}")
    G, f = inst.gradients, inst.rhs
    feas = tol.feasibility
    floor = tol.positivity_floor
    cap = tol.iteration_cap_factor * max(n, 1)
    trace: list[tuple[str, int]] = []
    iterations = 0

    if inst.residual(w) <= feas:
        return _assemble(inst, w, w.copy(), np.zeros(n), STATUS_CONVERGED, 0,
                         trace, tol)

    working: list[int] = []      # row positions, insertion order
    lam_w = np.zeros(0)          # multipliers parallel to ``working``
    x = w.copy()

    def full_multipliers() -> np.ndarray:
        lam = np.zeros(n)
        lam[working] = lam_w
        return lam

    def enter(j: int) -> str:
        """Bring row j into the working set; may drop blockers on the way."""
        nonlocal x, lam_w, iterations
        acc = 0.0
        sigma = 1.0 if float(G[j] @ x - f[j]) > 0 else -1.0
        while True:
            iterations += 1
            if iterations > cap:
                return "limit"
            rows = G[working] if working else np.zeros((0, d))
            g_eff = sigma * G[j]
            if working:
                r_eff, *_ = np.linalg.lstsq(rows.T, g_eff, rcond=None)
                z = g_eff - rows.T @ r_eff
            else:
                r_eff = np.zeros(0)
                z = g_eff.copy()
            z_norm = float(np.linalg.norm(z))
            independent = z_norm > tol.rank * max(np.linalg.norm(g_eff), 1.0)
            v_eff = sigma * float(G[j] @ x - f[j])
            t_full = v_eff / (z_norm * z_norm) if independent else math.inf

            # blocking step: working inequality multipliers must stay >= 0
            t_block = math.inf
            blocker = -1
            for k, pos in enumerate(working):
                if pos >= inst.n_eq and r_eff[k] > floor:
                    ratio = lam_w[k] / r_eff[k]
                    if ratio < t_block - 1e-15 or (
                            abs(ratio - t_block) <= 1e-15
                            and (blocker < 0 or pos < working[blocker])):
                        t_block = ratio
                        blocker = k
            if not independent and t_block == math.inf:
                return "infeasible"
            t = min(t_full, t_block)
            if independent:
                x = x - t * z
            if working:
                lam_w = lam_w - t * r_eff
            acc += t
            if independent and t == t_full:
                working.append(j)
                lam_w = np.append(lam_w, sigma * acc)
                trace.append(("add", j + 1))
                return "entered"
            dropped = working.pop(blocker)
            lam_w = np.delete(lam_w, blocker)
            trace.append(("drop", dropped + 1))

    # equalities first, in label order; consistent dependent rows are skipped
    for j in range(inst.n_eq):
        v = float(G[j] @ x - f[j])
        rows = G[working] if working else np.zeros((0, d))
        if working:
            coeff, *_ = np.linalg.lstsq(rows.T, G[j], rcond=None)
            resid = float(np.linalg.norm(G[j] - rows.T @ coeff))
        else:
            resid = float(np.linalg.norm(G[j]))
        if resid <= tol.rank * max(np.linalg.norm(G[j]), 1.0):
            if abs(v) > feas:
                trace.append(("infeasible-signal", j + 1))
                return _confirm_infeasible(inst, w, tol, bruteforce_guard,
                                           iterations, trace)
            continue
        if abs(v) <= feas:
            # satisfied but independent: enter with a zero step so later
            # moves stay inside the equality subspace
            pass
        outcome = enter(j)
        if outcome == "limit":
            return _assemble(inst, w, x, full_multipliers(),
                             STATUS_ITERATION_LIMIT, iterations, trace, tol)
        if outcome == "infeasible":
            trace.append(("infeasible-signal", j + 1))
            return _confirm_infeasible(inst, w, tol, bruteforce_guard,
                                       iterations, trace)

    while True:
        vals = G @ x - f
        viol = np.concatenate([np.abs(vals[:inst.n_eq]),
                               np.maximum(vals[inst.n_eq:], 0.0)])
        viol[working] = 0.0
        j = int(np.argmax(viol))
        if viol[j] <= feas:
            break
        outcome = enter(j)
        if outcome == "limit":
            return _assemble(inst, w, x, full_multipliers(),
                             STATUS_ITERATION_LIMIT, iterations, trace, tol)
        if outcome == "infeasible":
            trace.append(("infeasible-signal", j + 1))
            return _confirm_infeasible(inst, w, tol, bruteforce_guard,
                                       iterations, trace)

    # one refinement solve on the final working set removes iteration wear
    if working:
        x_ref, lam_ref = _solve_working_set(G[working], f[working], w)
        signs_ok = all(lam_ref[k] >= -tol.kkt for k, pos in enumerate(working)
                       if pos >= inst.n_eq)
        if signs_ok and inst.residual(x_ref) <= feas:
            x, lam_w = x_ref, lam_ref
    return _assemble(inst, w, x, full_multipliers(), STATUS_CONVERGED,
                     iterations, trace, tol)


def _confirm_infeasible(inst, w, tol, guard, iterations, trace
                        ) -> ProjectionResult:
    if inst.n <= guard:
        oracle = project_bruteforce(inst, w, tol, guard)
        trace = trace + list(oracle.trace)
        return ProjectionResult(status=oracle.status, point=oracle.point,
                                multipliers=oracle.multipliers,
                                active=oracle.active, distance=oracle.distance,
                                kkt_residual=oracle.kkt_residual,
                                iterations=iterations + oracle.iterations,
                                trace=tuple(trace))
    return _assemble(inst, w, w, np.zeros(inst.n), STATUS_INFEASIBLE,
                     iterations, trace, tol)


def project_bruteforce(inst: PolyhedronInstance, w,
                       tol: Tolerances = DEFAULT_TOLERANCES,
                       guard: int = DEFAULT_SAMPLING.bruteforce_guard
                       ) -> ProjectionResult:
    """Reference projection by enumerating candidate working sets.

    Every subset made of an independent spanning subfamily of the equality
    rows plus at most ``dim`` inequality rows is solved as an equality
    system; feasible candidates compete on distance.  Intended for small
    instances; raises :class:`EnumerationGuardError` above ``guard``.
    """
    w = np.asarray(w, dtype=float)
    n, d = inst.gradients.shape
    if n > guard:
        raise EnumerationGuardError(
            f"exhaustive projection limited to {guard} constraints, got {n}")
    G, f = inst.gradients, inst.rhs
    scale = max(1.0, float(np.max(np.abs(f))) if f.size else 0.0,
                float(np.max(np.abs(w))) if w.size else 0.0)
    atol = tol.feasibility * scale
    trace = [("bruteforce", 0)]

    if inst.residual(w) <= tol.feasibility:
        return _assemble(inst, w, w.copy(), np.zeros(n), STATUS_CONVERGED, 0,
                         trace, tol)

    eq_positions = list(range(inst.n_eq))
    if eq_positions:
        x_eq, *_ = np.linalg.lstsq(G[eq_positions], f[eq_positions],
                                   rcond=None)
        eq_gap = float(np.max(np.abs(G[eq_positions] @ x_eq
                                     - f[eq_positions])))
        if eq_gap > atol:
            return _assemble(inst, w, w, np.zeros(n), STATUS_INFEASIBLE, 0,
                             trace, tol)
        eq_family = VectorFamily(G[eq_positions],
                                 tuple(range(inst.n_eq)))
        base = list(max_independent_subfamily(eq_family, tol=tol.rank))
    else:
        base = []

    ineq_positions = list(range(inst.n_eq, n))
    best = None   # (distance, not sign_ok, subset, x, lam_subset)
    for size in range(0, d - len(base) + 1):
        for extra in itertools.combinations(ineq_positions, size):
            subset = sorted(base) + list(extra)
            if subset:
                fam = VectorFamily(G[subset], tuple(subset))
                if numerical_rank(fam, tol.rank).rank < len(subset):
                    continue
            x_c, lam_c = _solve_working_set(G[subset], f[subset], w)
            if inst.residual(x_c) > atol:
                continue
            dist = float(np.linalg.norm(w - x_c))
            sign_ok = all(lam_c[k] >= -tol.kkt
                          for k, pos in enumerate(subset)
                          if pos >= inst.n_eq)
            key = (dist, not sign_ok, tuple(subset))
            if best is None:
                best = (key, subset, x_c, lam_c)
                continue
            best_dist = best[0][0]
            if dist < best_dist - 1e-9 * max(1.0, best_dist):
                best = (key, subset, x_c, lam_c)
            elif dist <= best_dist + 1e-9 * max(1.0, best_dist):
                if key[1:] < best[0][1:]:
                    best = (key, subset, x_c, lam_c)

    if best is None:
        return _assemble(inst, w, w, np.zeros(n), STATUS_INFEASIBLE, 0, trace,
                         tol)
    _, subset, x_c, lam_c = best
    lam = np.zeros(n)
    lam[subset] = lam_c
    return _assemble(inst, w, x_c, lam, STATUS_CONVERGED, 0, trace, tol)


def instance_is_feasible(inst: PolyhedronInstance,
                         tol: Tolerances = DEFAULT_TOLERANCES,
                         guard: int = DEFAULT_SAMPLING.bruteforce_guard
                         ) -> bool:
    """Whether the instance has any feasible point at all."""
    probe = np.zeros(inst.dim)
    if inst.n <= guard:
        return project_bruteforce(inst, probe, tol, guard).status \
            != STATUS_INFEASIBLE
    return project(inst, probe, tol, guard).status != STATUS_INFEASIBLE
