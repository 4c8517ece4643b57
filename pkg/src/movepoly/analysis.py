"""Sampled regularity analysis of a moving polyhedron near its base point.

The estimators here replace neighborhood quantifiers with seeded Monte Carlo
sampling: constant-rank checks over parameter balls, feasibility of the base
point's neighborhood (inner semicontinuity), the bound on minimal multiplier
norms, the distance/residual error-bound constant, and the set-Lipschitz
modulus.  Every verdict is sampled evidence at a tolerance, never a proof,
and all reports are deterministic functions of (problem, seed, counts).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_TOLERANCES, Tolerances
from .errors import (DependentFamilyError, EnumerationGuardError,
                     InfeasibleSetError, ReductionError,
                     SamplingDiagnosticError, SolverLimitError)
from .linalg import VectorFamily, numerical_rank
from .polyhedron import MovingPolyhedron
from .projection import STATUS_INFEASIBLE, project
from .reduction import min_l1_multiplier, reduced_multiplier
from .sampling import sample_ball

VERDICT_HOLDS = "holds"
VERDICT_VIOLATED = "violated"
VERDICT_BORDERLINE = "borderline"
LIMINF_CONSISTENT = "consistent with liminf"
LIMINF_VIOLATED = "violated"
SAMPLED_CAVEAT = ("sampled evidence at the working tolerance; "
                  "not a proof of the exact property")


def _resolve(mp: MovingPolyhedron, seed, samples, param_radius, point_radius,
             tol):
    cfg = mp.sampling
    return (
        mp.tolerances if tol is None else tol,
        cfg.seed if seed is None else int(seed),
        cfg.samples if samples is None else int(samples),
        mp.param_radius if param_radius is None else float(param_radius),
        mp.point_radius if point_radius is None else float(point_radius),
        cfg,
    )


# ---------------------------------------------------------------------------
# constant-rank check


@dataclass(frozen=True)
class SubsetRankRow:
    subset: tuple[int, ...]
    base_rank: int
    min_rank: int
    max_rank: int
    verdict: str
    witness_param: tuple[float, ...] | None

    def as_dict(self) -> dict:
        return {
            "subset": list(self.subset),
            "base_rank": self.base_rank,
            "min_rank": self.min_rank,
            "max_rank": self.max_rank,
            "verdict": self.verdict,
            "witness_param": list(self.witness_param)
            if self.witness_param is not None else None,
        }


@dataclass(frozen=True)
class RcrcqReport:
    base_active: tuple[int, ...]
    param_radius: float
    seed: int
    samples: int
    rows: tuple[SubsetRankRow, ...]
    overall: str
    witnesses: tuple[tuple[tuple[int, ...], tuple[float, ...]], ...]

    def as_dict(self) -> dict:
        return {
            "base_active": list(self.base_active),
            "param_radius": self.param_radius,
            "seed": self.seed,
            "samples": self.samples,
            "subsets": [row.as_dict() for row in self.rows],
            "verdict": self.overall,
            "witnesses": [{"subset": list(subset), "param": list(param)}
                          for subset, param in self.witnesses],
            "caveat": SAMPLED_CAVEAT,
        }


def check_rcrcq(mp: MovingPolyhedron, *, param_radius=None, seed=None,
                samples=None, tol: Tolerances | None = None) -> RcrcqReport:
    """Constant-rank verdict for every gradient subfamily between the
    equality set and the base active set, over a sampled parameter ball."""
    tol, seed, samples, param_radius, _, cfg = _resolve(
        mp, seed, samples, param_radius, None, tol)
    inst0 = mp.instantiate(mp.base_param)
    base_active = inst0.active_set(mp.base_point, tol.active)
    extras = tuple(l for l in base_active if l > mp.n_eq)
    if 2 ** len(extras) > cfg.subset_guard:
        raise EnumerationGuardError(
            f"{2 ** len(extras)} subsets exceed the guard of {cfg.subset_guard}")

    subsets = []
    for size in range(len(extras) + 1):
        for combo in itertools.combinations(extras, size):
            subsets.append(mp.eq_labels + combo)

    rng = np.random.default_rng(seed)
    params = [sample_ball(rng, mp.base_param, param_radius)
              for _ in range(samples)]
    gradient_tables = [mp.instantiate(p).gradients for p in params]

    rows = []
    witnesses = []
    for subset in subsets:
        positions = [l - 1 for l in subset]
        base_cert = numerical_rank(
            VectorFamily(inst0.gradients[positions], subset), tol.rank)
        min_rank = max_rank = base_cert.rank
        flagged = base_cert.borderline
        witness = None
        for p, grads in zip(params, gradient_tables):
            cert = numerical_rank(VectorFamily(grads[positions], subset),
                                  tol.rank)
            flagged = flagged or cert.borderline
            min_rank = min(min_rank, cert.rank)
            max_rank = max(max_rank, cert.rank)
            if cert.rank != base_cert.rank and witness is None:
                witness = tuple(float(v) for v in p)
        if min_rank == max_rank == base_cert.rank:
            verdict = VERDICT_BORDERLINE if flagged else VERDICT_HOLDS
        else:
            verdict = VERDICT_VIOLATED
            witnesses.append((subset, witness))
        rows.append(SubsetRankRow(subset=subset, base_rank=base_cert.rank,
                                  min_rank=min_rank, max_rank=max_rank,
                                  verdict=verdict, witness_param=witness))

    if any(r.verdict == VERDICT_VIOLATED for r in rows):
        overall = VERDICT_VIOLATED
    elif any(r.verdict == VERDICT_BORDERLINE for r in rows):
        overall = VERDICT_BORDERLINE
    else:
        overall = VERDICT_HOLDS
    return RcrcqReport(base_active=base_active, param_radius=param_radius,
                       seed=seed, samples=samples, rows=tuple(rows),
                       overall=overall, witnesses=tuple(witnesses))


# ---------------------------------------------------------------------------
# inner semicontinuity (liminf) check


@dataclass(frozen=True)
class InnerSemicontinuityReport:
    param_radius: float
    point_radius: float
    seed: int
    samples: int
    infeasible_count: int
    failure_count: int
    max_distance: float
    worst_param: tuple[float, ...] | None
    first_infeasible_param: tuple[float, ...] | None
    verdict: str

    def as_dict(self) -> dict:
        return {
            "param_radius": self.param_radius,
            "point_radius": self.point_radius,
            "seed": self.seed,
            "samples": self.samples,
            "infeasible_count": self.infeasible_count,
            "failure_count": self.failure_count,
            "max_distance": self.max_distance,
            "worst_param": list(self.worst_param)
            if self.worst_param is not None else None,
            "first_infeasible_param": list(self.first_infeasible_param)
            if self.first_infeasible_param is not None else None,
            "verdict": self.verdict,
            "caveat": SAMPLED_CAVEAT,
        }


def check_inner_semicontinuity(mp: MovingPolyhedron, *, param_radius=None,
                               point_radius=None, seed=None, samples=None,
                               tol: Tolerances | None = None
                               ) -> InnerSemicontinuityReport:
    """Distance from the base point to the set for sampled nearby parameters.

    Consistent when every sampled instance is nonempty and all distances stay
    below the point radius; empty instances are reported as violations, not
    raised.
    """
    tol, seed, samples, param_radius, point_radius, cfg = _resolve(
        mp, seed, samples, param_radius, point_radius, tol)
    rng = np.random.default_rng(seed)
    infeasible = 0
    failures = 0
    max_distance = 0.0
    worst = None
    first_bad = None
    for _ in range(samples):
        p = sample_ball(rng, mp.base_param, param_radius)
        result = project(mp.instantiate(p), mp.base_point, tol,
                         cfg.bruteforce_guard)
        if result.status == STATUS_INFEASIBLE:
            infeasible += 1
            if first_bad is None:
                first_bad = tuple(float(v) for v in p)
            continue
        if not result.converged:
            failures += 1
            continue
        if result.distance > max_distance:
            max_distance = result.distance
            worst = tuple(float(v) for v in p)
    consistent = infeasible == 0 and max_distance < point_radius
    return InnerSemicontinuityReport(
        param_radius=param_radius, point_radius=point_radius, seed=seed,
        samples=samples, infeasible_count=infeasible, failure_count=failures,
        max_distance=max_distance, worst_param=worst,
        first_infeasible_param=first_bad,
        verdict=LIMINF_CONSISTENT if consistent else LIMINF_VIOLATED)


# ---------------------------------------------------------------------------
# multiplier bound


@dataclass(frozen=True)
class BoundLevel:
    level: int
    param_radius: float
    point_radius: float
    m_hat: float
    samples_used: int

    def as_dict(self) -> dict:
        return {"level": self.level, "param_radius": self.param_radius,
                "point_radius": self.point_radius, "m_hat": self.m_hat,
                "samples_used": self.samples_used}


@dataclass(frozen=True)
class MultiplierBoundReport:
    m_hat: float
    witness_param: tuple[float, ...] | None
    witness_point: tuple[float, ...] | None
    seed: int
    samples: int
    samples_used: int
    skipped_feasible: int
    skipped_failures: int
    levels: tuple[BoundLevel, ...]

    def as_dict(self) -> dict:
        return {
            "m_hat": self.m_hat,
            "witness_param": list(self.witness_param)
            if self.witness_param is not None else None,
            "witness_point": list(self.witness_point)
            if self.witness_point is not None else None,
            "seed": self.seed,
            "samples": self.samples,
            "samples_used": self.samples_used,
            "skipped_feasible": self.skipped_feasible,
            "skipped_failures": self.skipped_failures,
            "shrink_levels": [lv.as_dict() for lv in self.levels],
        }


def _bound_pass(mp, seed, samples, param_radius, point_radius, tol, guard):
    rng = np.random.default_rng(seed)
    m_hat = 0.0
    witness = (None, None)
    used = skipped_feasible = skipped_failures = 0
    for _ in range(samples):
        p = sample_ball(rng, mp.base_param, param_radius)
        w = sample_ball(rng, mp.base_point, point_radius)
        inst = mp.instantiate(p)
        if inst.residual(w) <= tol.feasibility:
            skipped_feasible += 1
            continue
        result = project(inst, w, tol, guard)
        if not result.converged:
            skipped_failures += 1
            continue
        if result.distance <= tol.feasibility:
            skipped_feasible += 1
            continue
        value = min_l1_multiplier(inst, w, result, tol, guard).value
        used += 1
        if value > m_hat:
            m_hat = value
            witness = (tuple(float(v) for v in p), tuple(float(v) for v in w))
    return m_hat, witness, used, skipped_feasible, skipped_failures


def estimate_multiplier_bound(mp: MovingPolyhedron, *, param_radius=None,
                              point_radius=None, seed=None, samples=None,
                              tol: Tolerances | None = None,
                              shrink_levels: int | None = None
                              ) -> MultiplierBoundReport:
    """Largest minimal-l1 normalized multiplier over sampled infeasible pairs.

    The shrink table recomputes the estimate on halved radii (parameter and
    point together, same seed) so unbounded behavior near the base point
    shows up as growth down the levels.
    """
    tol, seed, samples, param_radius, point_radius, cfg = _resolve(
        mp, seed, samples, param_radius, point_radius, tol)
    levels = cfg.shrink_levels if shrink_levels is None else int(shrink_levels)
    guard = cfg.bruteforce_guard
    table = []
    headline = None
    for level in range(max(1, levels)):
        shrink = 2.0 ** level
        m_hat, witness, used, feas, fails = _bound_pass(
            mp, seed, samples, param_radius / shrink, point_radius / shrink,
            tol, guard)
        table.append(BoundLevel(level=level, param_radius=param_radius / shrink,
                                point_radius=point_radius / shrink,
                                m_hat=m_hat, samples_used=used))
        if level == 0:
            headline = (m_hat, witness, used, feas, fails)
    m_hat, witness, used, feas, fails = headline
    return MultiplierBoundReport(
        m_hat=m_hat, witness_param=witness[0], witness_point=witness[1],
        seed=seed, samples=samples, samples_used=used, skipped_feasible=feas,
        skipped_failures=fails, levels=tuple(table))


# ---------------------------------------------------------------------------
# distance / residual error bound


@dataclass(frozen=True)
class RRegularityReport:
    alpha_hat: float
    witness_param: tuple[float, ...] | None
    witness_point: tuple[float, ...] | None
    m_hat_input: float
    two_m_bound_ok: bool
    max_sample_min_l1: float
    seed: int
    samples: int
    samples_used: int
    skipped_feasible: int
    skipped_failures: int

    def as_dict(self) -> dict:
        return {
            "alpha_hat": self.alpha_hat,
            "witness_param": list(self.witness_param)
            if self.witness_param is not None else None,
            "witness_point": list(self.witness_point)
            if self.witness_point is not None else None,
            "m_hat_input": self.m_hat_input,
            "two_m_bound_ok": self.two_m_bound_ok,
            "max_sample_min_l1": self.max_sample_min_l1,
            "seed": self.seed,
            "samples": self.samples,
            "samples_used": self.samples_used,
            "skipped_feasible": self.skipped_feasible,
            "skipped_failures": self.skipped_failures,
        }


def estimate_r_regularity(mp: MovingPolyhedron, m_hat: float, *,
                          param_radius=None, point_radius=None, seed=None,
                          samples=None, tol: Tolerances | None = None
                          ) -> RRegularityReport:
    """Largest sampled distance/residual ratio, with the 2M comparison.

    Each retained sample also records its minimal-l1 multiplier norm, so a
    caller can reconcile the ratio bound with the multiplier bound on the
    identical sample set.
    """
    tol, seed, samples, param_radius, point_radius, cfg = _resolve(
        mp, seed, samples, param_radius, point_radius, tol)
    guard = cfg.bruteforce_guard
    rng = np.random.default_rng(seed)
    alpha_hat = 0.0
    witness = (None, None)
    max_min_l1 = 0.0
    used = skipped_feasible = skipped_failures = 0
    for _ in range(samples):
        p = sample_ball(rng, mp.base_param, param_radius)
        x = sample_ball(rng, mp.base_point, point_radius)
        inst = mp.instantiate(p)
        residual = inst.residual(x)
        if residual <= tol.feasibility:
            skipped_feasible += 1
            continue
        result = project(inst, x, tol, guard)
        if not result.converged:
            skipped_failures += 1
            continue
        used += 1
        ratio = result.distance / residual
        if ratio > alpha_hat:
            alpha_hat = ratio
            witness = (tuple(float(v) for v in p), tuple(float(v) for v in x))
        if result.distance > tol.feasibility:
            value = min_l1_multiplier(inst, x, result, tol, guard).value
            max_min_l1 = max(max_min_l1, value)
    return RRegularityReport(
        alpha_hat=alpha_hat, witness_param=witness[0], witness_point=witness[1],
        m_hat_input=m_hat, two_m_bound_ok=alpha_hat <= 2.0 * m_hat * (1 + 1e-6),
        max_sample_min_l1=max_min_l1, seed=seed, samples=samples,
        samples_used=used, skipped_feasible=skipped_feasible,
        skipped_failures=skipped_failures)


# ---------------------------------------------------------------------------
# set-Lipschitz (Aubin) modulus


@dataclass(frozen=True)
class AubinReport:
    empirical: float
    theoretical: float
    alpha_input: float
    lipschitz_factor: float
    witness: tuple[tuple[float, ...], tuple[float, ...], tuple[float, ...]] | None
    max_alpha_ratio: float
    max_min_l1: float
    residual_consistency_gap: float
    consistency_ok: bool
    seed: int
    samples: int
    retained: int
    skipped_outside: int
    skipped_close: int
    skipped_failures: int
    skipped_infeasible: int
    # (distance, residual, per-sample factor * |p1-p2|) per retained sample;
    # kept out of serialized reports
    sample_rows: tuple[tuple[float, float, float], ...] = ()

    def as_dict(self) -> dict:
        return {
            "empirical": self.empirical,
            "theoretical": self.theoretical,
            "alpha_input": self.alpha_input,
            "lipschitz_factor": self.lipschitz_factor,
            "witness": {
                "param_1": list(self.witness[0]),
                "param_2": list(self.witness[1]),
                "point": list(self.witness[2]),
            } if self.witness is not None else None,
            "max_alpha_ratio": self.max_alpha_ratio,
            "residual_consistency_gap": self.residual_consistency_gap,
            "consistency_ok": self.consistency_ok,
            "seed": self.seed,
            "samples": self.samples,
            "retained": self.retained,
            "skipped_outside": self.skipped_outside,
            "skipped_close": self.skipped_close,
            "skipped_failures": self.skipped_failures,
            "skipped_infeasible": self.skipped_infeasible,
        }


def estimate_aubin_modulus(mp: MovingPolyhedron, alpha_hat: float, *,
                           param_radius=None, point_radius=None, seed=None,
                           samples=None, tol: Tolerances | None = None
                           ) -> AubinReport:
    """Largest sampled dist/parameter-shift ratio against its residual bound.

    Points of the first instance come from projecting ball samples onto it;
    only projections landing inside the point ball are retained.  Raises a
    diagnostic error when nothing is retained.
    """
    tol, seed, samples, param_radius, point_radius, cfg = _resolve(
        mp, seed, samples, param_radius, point_radius, tol)
    guard = cfg.bruteforce_guard
    moduli = mp.lipschitz_constants()
    rng = np.random.default_rng(seed)
    empirical = 0.0
    witness = None
    factor_max = 0.0
    max_ratio = 0.0
    max_min_l1 = 0.0
    gap = 0.0
    retained = outside = close = failures = infeasible = 0
    rows = []
    for _ in range(samples):
        p1 = sample_ball(rng, mp.base_param, param_radius)
        p2 = sample_ball(rng, mp.base_param, param_radius)
        y = sample_ball(rng, mp.base_point, point_radius)
        inst1 = mp.instantiate(p1)
        proj1 = project(inst1, y, tol, guard)
        if proj1.status == STATUS_INFEASIBLE:
            infeasible += 1
            continue
        if not proj1.converged:
            failures += 1
            continue
        x1 = proj1.point
        if float(np.linalg.norm(x1 - mp.base_point)) >= point_radius:
            outside += 1
            continue
        shift = float(np.linalg.norm(p1 - p2))
        if shift < cfg.close_pair_cutoff:
            close += 1
            continue
        inst2 = mp.instantiate(p2)
        proj2 = project(inst2, x1, tol, guard)
        if proj2.status == STATUS_INFEASIBLE:
            infeasible += 1
            continue
        if not proj2.converged:
            failures += 1
            continue
        retained += 1
        x1_norm = float(np.linalg.norm(x1))
        factor = max(x1_norm * lg + lf for lg, lf in moduli)
        factor_max = max(factor_max, factor)
        distance = proj2.distance
        ratio = distance / shift
        if ratio > empirical:
            empirical = ratio
            witness = (tuple(float(v) for v in p1),
                       tuple(float(v) for v in p2),
                       tuple(float(v) for v in x1))
        residual = inst2.residual(x1)
        rows.append((distance, residual, factor * shift))
        gap = max(gap, distance - alpha_hat * residual)
        if residual > tol.feasibility and distance > tol.feasibility:
            max_ratio = max(max_ratio, distance / residual)
            value = min_l1_multiplier(inst2, x1, proj2, tol, guard).value
            max_min_l1 = max(max_min_l1, value)
    if retained == 0:
        raise SamplingDiagnosticError(
            "no projected points landed inside the point ball; increase "
            "--point-radius or decrease --param-radius")
    return AubinReport(
        empirical=empirical, theoretical=alpha_hat * factor_max,
        alpha_input=alpha_hat, lipschitz_factor=factor_max, witness=witness,
        max_alpha_ratio=max_ratio, max_min_l1=max_min_l1,
        residual_consistency_gap=gap, consistency_ok=gap <= 1e-7, seed=seed,
        samples=samples, retained=retained, skipped_outside=outside,
        skipped_close=close, skipped_failures=failures,
        skipped_infeasible=infeasible, sample_rows=tuple(rows))


# ---------------------------------------------------------------------------
# blow-up detection along sequences


@dataclass(frozen=True)
class FixedSubfamilyPolicy:
    labels: tuple[int, ...]

    def describe(self) -> str:
        return "fixed:" + ",".join(str(l) for l in self.labels)


@dataclass(frozen=True)
class ReducedPolicy:
    def describe(self) -> str:
        return "reduced"


@dataclass(frozen=True)
class MinL1Policy:
    def describe(self) -> str:
        return "min-l1"


Policy = FixedSubfamilyPolicy | ReducedPolicy | MinL1Policy


def parse_policy(text: str) -> Policy:
    text = text.strip()
    if text == "reduced":
        return ReducedPolicy()
    if text in ("min-l1", "min_l1"):
        return MinL1Policy()
    if text.startswith("fixed:"):
        try:
            labels = tuple(int(part) for part in text[6:].split(",") if part)
        except ValueError:
            raise ValueError(f"bad subfamily list in policy {text!r}") from None
        if not labels:
            raise ValueError("fixed policy needs at least one label")
        return FixedSubfamilyPolicy(labels)
    raise ValueError(f"unknown policy {text!r}; expected 'reduced', 'min-l1' "
                     f"or 'fixed:<labels>'")


@dataclass(frozen=True)
class BlowupRow:
    k: int
    param: tuple[float, ...]
    query: tuple[float, ...]
    distance: float
    multipliers: tuple[float, ...]   # normalized, full length
    l1_norm: float
    l2_norm: float

    def as_dict(self) -> dict:
        return {"k": self.k, "param": list(self.param),
                "query": list(self.query), "distance": self.distance,
                "multipliers": list(self.multipliers),
                "l1_norm": self.l1_norm, "l2_norm": self.l2_norm}


@dataclass(frozen=True)
class BlowupReport:
    policy: str
    rows: tuple[BlowupRow, ...]
    l1_ratios: tuple[float, ...]       # consecutive l1 quotients
    l1_exponent: float | None          # log-log fits over k >= 3
    l2_exponent: float | None
    growth_exponent: float | None      # headline: Euclidean-norm fit

    def as_dict(self) -> dict:
        return {
            "policy": self.policy,
            "rows": [row.as_dict() for row in self.rows],
            "l1_ratios": list(self.l1_ratios),
            "l1_exponent": self.l1_exponent,
            "l2_exponent": self.l2_exponent,
            "growth_exponent": self.growth_exponent,
        }


def fit_growth_exponent(ks, values, min_k: int = 3) -> float | None:
    """Least-squares slope of log(value) against log(k), k >= ``min_k``."""
    pairs = [(k, v) for k, v in zip(ks, values)
             if k >= min_k and v > 0 and math.isfinite(v)]
    if len(pairs) < 2:
        return None
    logs_k = np.log([k for k, _ in pairs])
    logs_v = np.log([v for _, v in pairs])
    slope = np.polyfit(logs_k, logs_v, 1)[0]
    return float(slope)


def detect_multiplier_blowup(mp: MovingPolyhedron, sequence, policy: Policy,
                             tol: Tolerances | None = None) -> BlowupReport:
    """Normalized multipliers along a (p_k, w_k) sequence, by policy.

    ``fixed`` solves the unit-offset stationarity system on one subfamily at
    every k (erroring if that subfamily goes dependent), ``reduced`` rewrites
    the solver's multiplier over an independent subfamily, and ``min-l1``
    minimizes the l1 norm outright.  The growth exponents compare the norm
    columns against powers of k.
    """
    tol = tol or mp.tolerances
    guard = mp.sampling.bruteforce_guard
    rows = []
    for index, (p, w) in enumerate(sequence, start=1):
        p = np.asarray(p, dtype=float)
        w = np.asarray(w, dtype=float)
        inst = mp.instantiate(p)
        result = project(inst, w, tol, guard)
        if result.status == STATUS_INFEASIBLE:
            raise InfeasibleSetError(f"instance at k={index} is infeasible")
        if not result.converged:
            raise SolverLimitError(
                f"projection hit its iteration cap at k={index}")
        if not result.distance > tol.feasibility:
            raise ValueError(
                f"query at k={index} lies in the set; normalized "
                f"multipliers are undefined")
        direction = (w - result.point) / result.distance
        if isinstance(policy, FixedSubfamilyPolicy):
            labels = policy.labels
            if any(l < 1 or l > inst.n for l in labels):
                raise ValueError(f"policy labels out of range at k={index}")
            rows_g = inst.gradients[[l - 1 for l in labels]]
            family = VectorFamily(rows_g, labels)
            if numerical_rank(family, tol.rank).rank < len(labels):
                raise DependentFamilyError(
                    f"fixed subfamily is dependent at k={index}")
            lam_s, *_ = np.linalg.lstsq(rows_g.T, direction, rcond=None)
            residual = float(np.linalg.norm(rows_g.T @ lam_s - direction))
            if residual > max(tol.kkt, tol.kkt * float(np.sum(np.abs(lam_s)))):
                raise ReductionError(
                    f"fixed subfamily cannot represent the offset at "
                    f"k={index} (residual {residual:.3e})")
            lam = np.zeros(inst.n)
            lam[[l - 1 for l in labels]] = lam_s
        elif isinstance(policy, ReducedPolicy):
            cert = reduced_multiplier(inst, w, result, tol)
            lam = cert.as_full_vector(inst.n) / result.distance
        else:
            lam = min_l1_multiplier(inst, w, result, tol, guard).multipliers
        rows.append(BlowupRow(
            k=index, param=tuple(float(v) for v in p),
            query=tuple(float(v) for v in w), distance=result.distance,
            multipliers=tuple(float(v) for v in lam),
            l1_norm=float(np.sum(np.abs(lam))),
            l2_norm=float(np.linalg.norm(lam))))
    ratios = tuple(rows[i + 1].l1_norm / rows[i].l1_norm
                   for i in range(len(rows) - 1) if rows[i].l1_norm > 0)
    ks = [row.k for row in rows]
    l1_exponent = fit_growth_exponent(ks, [row.l1_norm for row in rows])
    l2_exponent = fit_growth_exponent(ks, [row.l2_norm for row in rows])
    return BlowupReport(policy=policy.describe(), rows=tuple(rows),
                        l1_ratios=ratios, l1_exponent=l1_exponent,
                        l2_exponent=l2_exponent, growth_exponent=l2_exponent)


# ---------------------------------------------------------------------------
# full pipeline


@dataclass(frozen=True)
class PipelineResult:
    liminf: InnerSemicontinuityReport
    rcrcq: RcrcqReport
    bound: MultiplierBoundReport
    regularity: RRegularityReport
    aubin: AubinReport
    m_hat: float
    alpha_hat: float
    two_m_bound_ok: bool
    aubin_theoretical: float
    aubin_bound_ok: bool
    verdict: str

    def as_dict(self) -> dict:
        return {
            "liminf": self.liminf.as_dict(),
            "rcrcq": self.rcrcq.as_dict(),
            "multiplier_bound": self.bound.as_dict(),
            "r_regularity": self.regularity.as_dict(),
            "aubin": self.aubin.as_dict(),
            "m_hat": self.m_hat,
            "alpha_hat": self.alpha_hat,
            "two_m_bound_ok": self.two_m_bound_ok,
            "aubin_theoretical": self.aubin_theoretical,
            "aubin_bound_ok": self.aubin_bound_ok,
            "verdict": self.verdict,
        }


def run_estimate_pipeline(mp: MovingPolyhedron, *, param_radius=None,
                          point_radius=None, seed=None, samples=None,
                          tol: Tolerances | None = None) -> PipelineResult:
    """Liminf check, constant-rank check, and the three estimates in order.

    The headline constants fold the per-sample values of the later
    estimators back in: every distance/residual ratio seen anywhere is
    covered by ``alpha_hat`` and every minimal-l1 norm by ``m_hat``, so the
    reported pair satisfies the two-sided comparisons on the entire sample
    set, not just on each estimator's own stream.
    """
    kw = dict(param_radius=param_radius, point_radius=point_radius, seed=seed,
              samples=samples, tol=tol)
    liminf = check_inner_semicontinuity(mp, **kw)
    rcrcq = check_rcrcq(mp, param_radius=param_radius, seed=seed,
                        samples=samples, tol=tol)
    bound = estimate_multiplier_bound(mp, **kw)
    regularity = estimate_r_regularity(mp, bound.m_hat, **kw)
    aubin = estimate_aubin_modulus(mp, regularity.alpha_hat, **kw)

    m_hat = max(bound.m_hat, regularity.max_sample_min_l1, aubin.max_min_l1)
    alpha_hat = max(regularity.alpha_hat, aubin.max_alpha_ratio)
    two_m_ok = alpha_hat <= 2.0 * m_hat * (1 + 1e-6)
    theoretical = alpha_hat * aubin.lipschitz_factor
    aubin_ok = aubin.empirical <= theoretical * (1 + 1e-6) + 1e-12

    reasons = []
    if liminf.verdict != LIMINF_CONSISTENT:
        reasons.append("inner semicontinuity sampling found violations")
    if rcrcq.overall != VERDICT_HOLDS:
        reasons.append(f"constant-rank check returned {rcrcq.overall!r}")
    if not two_m_ok:
        reasons.append("distance/residual ratio exceeded twice the "
                       "multiplier bound")
    if not aubin_ok:
        reasons.append("empirical modulus exceeded its residual-route bound")
    if not reasons:
        verdict = ("consistent with Lipschitz-like behavior at the base "
                   "point (sampled evidence, not a proof)")
    else:
        verdict = ("Lipschitz-like behavior not established: "
                   + "; ".join(reasons) + " (sampled evidence, not a proof)")
    return PipelineResult(liminf=liminf, rcrcq=rcrcq, bound=bound,
                          regularity=regularity, aubin=aubin, m_hat=m_hat,
                          alpha_hat=alpha_hat, two_m_bound_ok=two_m_ok,
                          aubin_theoretical=theoretical,
                          aubin_bound_ok=aubin_ok, verdict=verdict)
