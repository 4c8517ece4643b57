"""Reducing projection multipliers to independent supporting subfamilies.

A converged projection expresses the offset ``w - point`` as a combination
of constraint normal vectors with nonnegative weights on inequalities.  The
routines here rewrite that combination over an independent subfamily without
changing the represented vector: dependent equality rows are folded into a
spanning subfamily, and dependent inequality rows are eliminated one witness
at a time through a ratio test that keeps every inequality weight
nonnegative and zeroes at least one of them per round.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_SAMPLING, DEFAULT_TOLERANCES, Tolerances
from .errors import (DependentFamilyError, EnumerationGuardError,
                     InfeasibleSetError, ReductionError)
from .linalg import (RankCertificate, VectorFamily, dependency_witness,
                     max_independent_subfamily, numerical_rank)
from .polyhedron import MovingPolyhedron, PolyhedronInstance
from .projection import ProjectionResult, instance_is_feasible

RECONSTRUCTION_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class MultiplierCertificate:
    """An independent, positively weighted rewrite of a multiplier vector."""

    equality_support: tuple[int, ...]     # labels, ascending
    inequality_support: tuple[int, ...]   # labels, ascending
    coefficients: np.ndarray              # parallel to combined support
    rank_certificate: RankCertificate
    reconstruction_error: float
    reduction_steps: int
    trivial: bool = False                 # query point was already feasible

    @property
    def support(self) -> tuple[int, ...]:
        return self.equality_support + self.inequality_support

    def as_dict(self) -> dict:
        return {
            "trivial": self.trivial,
            "equality_support": list(self.equality_support),
            "inequality_support": list(self.inequality_support),
            "coefficients": [float(v) for v in self.coefficients],
            "rank": self.rank_certificate.rank,
            "rank_borderline": self.rank_certificate.borderline,
            "reconstruction_error": self.reconstruction_error,
            "reduction_steps": self.reduction_steps,
        }

    def as_full_vector(self, n: int) -> np.ndarray:
        full = np.zeros(n)
        for label, value in zip(self.support, self.coefficients):
            full[label - 1] = value
        return full

    def l1_norm(self) -> float:
        return float(np.sum(np.abs(self.coefficients)))


def normalize_multiplier(multipliers: np.ndarray, distance: float) -> np.ndarray:
    """Rescale multipliers of an offset representation to unit offset."""
    if not distance > 0:
        raise ValueError("distance must be positive")
    multipliers = np.asarray(multipliers, dtype=float)
    if not np.any(multipliers):
        raise ReductionError(
            "zero multiplier vector cannot represent a positive offset")
    return multipliers / distance


def denormalize_multiplier(multipliers: np.ndarray, distance: float) -> np.ndarray:
    if not distance > 0:
        raise ValueError("distance must be positive")
    return np.asarray(multipliers, dtype=float) * distance


def reduce_equalities(mp: MovingPolyhedron, p,
                      tol: Tolerances | None = None,
                      guard: int = DEFAULT_SAMPLING.bruteforce_guard
                      ) -> tuple[int, ...]:
    """Labels of an independent spanning subfamily of the equality rows.

    Requires the instance at ``p`` to be nonempty; raises
    :class:`InfeasibleSetError` otherwise.
    """
    tol = tol or mp.tolerances
    inst = mp.instantiate(p)
    if not instance_is_feasible(inst, tol, guard):
        raise InfeasibleSetError("the set is empty at this parameter")
    return _equality_basis(inst, tol)


def _equality_basis(inst: PolyhedronInstance, tol: Tolerances
                    ) -> tuple[int, ...]:
    if inst.n_eq == 0:
        return ()
    family = inst.gradient_family(inst.eq_labels)
    return tuple(sorted(max_independent_subfamily(family, tol=tol.rank)))


def reduce_positive_combination(target, family: VectorFamily,
                                eq_labels, pos_labels, coefficients,
                                tol: Tolerances = DEFAULT_TOLERANCES
                                ) -> tuple[tuple[int, ...], np.ndarray, int]:
    """Eliminate dependent positively weighted vectors from a combination.

    ``family`` holds the vectors for ``eq_labels`` (free-sign weights,
    independent) followed by ``pos_labels`` (nonnegative weights);
    ``coefficients`` is parallel to the family and must combine to
    ``target``.  Returns the kept positive labels, the rewritten
    coefficients over the family order, and the number of elimination
    rounds, which never exceeds ``len(pos_labels)``.
    """
    target = np.asarray(target, dtype=float)
    eq_labels = tuple(eq_labels)
    pos_labels = tuple(pos_labels)
    if set(eq_labels) & set(pos_labels):
        raise ValueError("label groups must be disjoint")
    if tuple(eq_labels) + tuple(pos_labels) != family.labels:
        raise ValueError("family must list the free-sign labels first")
    coeff = {l: float(c) for l, c in zip(family.labels, coefficients)}
    floor = tol.positivity_floor
    for l in pos_labels:
        if coeff[l] < -floor:
            raise ValueError(f"coefficient of label {l} must be nonnegative")
    scale = max(1.0, float(np.linalg.norm(target)))
    if _combination_gap(target, family, coeff) > RECONSTRUCTION_TOL * scale:
        raise ValueError("coefficients do not combine to the target vector")
    if eq_labels:
        eq_cert = numerical_rank(family.subfamily(eq_labels), tol.rank)
        if eq_cert.rank < len(eq_labels):
            raise DependentFamilyError("free-sign vectors must be independent")

    active = [l for l in pos_labels if coeff[l] > floor]
    for l in pos_labels:
        if l not in active:
            coeff[l] = 0.0
    steps = 0
    while True:
        sub_labels = eq_labels + tuple(active)
        witness = dependency_witness(family.subfamily(sub_labels), tol.rank)
        if witness is None:
            break
        if steps >= len(pos_labels):
            raise ReductionError("elimination exceeded its round bound")
        beta = dict(zip(sub_labels, witness.coefficients))
        positive = [l for l in active if beta[l] > floor]
        if not positive:
            beta = {l: -v for l, v in beta.items()}
            positive = [l for l in active if beta[l] > floor]
        if not positive:
            raise ReductionError(
                "dependency witness has no usable entry on the nonnegative "
                "part; the free-sign vectors are too close to dependent")
        leaving = min(positive, key=lambda l: (coeff[l] / beta[l], l))
        step = coeff[leaving] / beta[leaving]
        for l in sub_labels:
            coeff[l] -= step * beta[l]
        coeff[leaving] = 0.0
        for l in active:
            if coeff[l] < 0:
                if coeff[l] < -RECONSTRUCTION_TOL * scale:
                    raise ReductionError(
                        "ratio step drove a nonnegative coefficient negative")
                coeff[l] = 0.0
        survivors = [l for l in active if coeff[l] > floor]
        for l in active:
            if l not in survivors:
                coeff[l] = 0.0
        active = survivors
        steps += 1

    gap = _combination_gap(target, family, coeff)
    if gap > RECONSTRUCTION_TOL * scale:
        raise ReductionError(f"rewrite drifted off the target (gap {gap:.3e})")
    out = np.array([coeff[l] for l in family.labels])
    return tuple(active), out, steps


def _combination_gap(target, family: VectorFamily, coeff: dict) -> float:
    combo = np.zeros(family.dim)
    for l in family.labels:
        combo += coeff[l] * family.vectors[family.position(l)]
    return float(np.linalg.norm(target - combo))


def reduced_multiplier(inst: PolyhedronInstance, w,
                       result: ProjectionResult,
                       tol: Tolerances = DEFAULT_TOLERANCES
                       ) -> MultiplierCertificate:
    """Rewrite a projection's multipliers over an independent subfamily."""
    if not result.converged:
        raise ValueError("projection must have converged")
    w = np.asarray(w, dtype=float)
    offset = w - result.point
    scale = max(1.0, float(np.linalg.norm(offset)))
    if result.distance <= tol.feasibility * max(1.0, float(np.max(np.abs(w)))):
        return MultiplierCertificate(
            equality_support=(), inequality_support=(),
            coefficients=np.zeros(0),
            rank_certificate=RankCertificate(0, (), 0.0, 0.0, False),
            reconstruction_error=0.0, reduction_steps=0, trivial=True)

    eq_basis = _equality_basis(inst, tol)
    lam = result.multipliers
    if eq_basis:
        eq_rows = inst.gradient_family(inst.eq_labels).vectors
        eq_part = eq_rows.T @ lam[:inst.n_eq]
        basis_rows = inst.gradient_family(eq_basis).vectors
        mu, *_ = np.linalg.lstsq(basis_rows.T, eq_part, rcond=None)
        fold_gap = float(np.linalg.norm(basis_rows.T @ mu - eq_part))
        if fold_gap > RECONSTRUCTION_TOL * scale:
            raise ReductionError(
                f"equality fold missed its span (gap {fold_gap:.3e})")
    else:
        mu = np.zeros(0)

    floor = tol.positivity_floor
    pos_labels = tuple(l for l in result.active
                       if l > inst.n_eq and lam[l - 1] > floor)
    family = inst.gradient_family(eq_basis + pos_labels)
    coefficients = np.concatenate([mu, [lam[l - 1] for l in pos_labels]]) \
        if (eq_basis or pos_labels) else np.zeros(0)
    kept, rewritten, steps = reduce_positive_combination(
        offset, family, eq_basis, pos_labels, coefficients, tol)

    support = eq_basis + tuple(sorted(kept))
    final = family.subfamily(support) if support else None
    cert = numerical_rank(final, tol.rank) if final is not None \
        else RankCertificate(0, (), 0.0, 0.0, False)
    if cert.rank < len(support):
        raise ReductionError("reduced support failed its independence check")
    values = np.array([rewritten[family.labels.index(l)] for l in support])
    recon = float(np.linalg.norm(
        offset - (final.vectors.T @ values if final is not None
                  else np.zeros(inst.dim))))
    if recon > RECONSTRUCTION_TOL * scale:
        raise ReductionError(f"reconstruction error {recon:.3e} out of bounds")
    return MultiplierCertificate(
        equality_support=eq_basis,
        inequality_support=tuple(sorted(kept)),
        coefficients=values,
        rank_certificate=cert,
        reconstruction_error=recon,
        reduction_steps=steps,
        trivial=False)


@dataclass(frozen=True, eq=False)
class MinL1Result:
    """The smallest l1-norm unit-offset multiplier over the active family."""

    value: float
    support: tuple[int, ...]
    multipliers: np.ndarray   # length n, normalized to unit offset


def min_l1_multiplier(inst: PolyhedronInstance, w, result: ProjectionResult,
                      tol: Tolerances = DEFAULT_TOLERANCES,
                      guard: int = DEFAULT_SAMPLING.bruteforce_guard
                      ) -> MinL1Result:
    """Minimize the l1 norm over valid unit-offset multiplier vectors.

    Some optimal vector is supported on an independent subfamily of the
    active set (a basic solution of the underlying linear program), so all
    such subfamilies are enumerated.  Guarded by instance size.
    """
    if not result.converged:
        raise ValueError("projection must have converged")
    if inst.n > guard:
        raise EnumerationGuardError(
            f"subfamily enumeration limited to {guard} constraints, got {inst.n}")
    if not result.distance > 0:
        raise ValueError("query point must lie outside the set")
    w = np.asarray(w, dtype=float)
    direction = (w - result.point) / result.distance
    active = result.active
    G = inst.gradients
    best_value = None
    best_support = None
    best_lam = None
    for size in range(1, min(inst.dim, len(active)) + 1):
        for subset in itertools.combinations(active, size):
            rows = G[[l - 1 for l in subset]]
            lam_s, _, rank, _ = np.linalg.lstsq(rows.T, direction, rcond=None)
            if rank < size:
                continue
            if float(np.linalg.norm(rows.T @ lam_s - direction)) > tol.kkt:
                continue
            lam_s = np.where((lam_s < 0) & (lam_s > -tol.kkt), 0.0, lam_s)
            if any(lam_s[k] < 0 for k, l in enumerate(subset)
                   if l > inst.n_eq):
                continue
            value = float(np.sum(np.abs(lam_s)))
            if best_value is None or value < best_value - 1e-12 * max(1.0, value):
                best_value, best_support, best_lam = value, subset, lam_s
            elif abs(value - best_value) <= 1e-12 * max(1.0, best_value) \
                    and subset < best_support:
                best_support, best_lam = subset, lam_s
    if best_value is None:
        raise ReductionError(
            "no valid multiplier found over the active set; the projection "
            "result is inconsistent")
    full = np.zeros(inst.n)
    full[[l - 1 for l in best_support]] = best_lam
    return MinL1Result(value=best_value, support=best_support,
                       multipliers=full)
