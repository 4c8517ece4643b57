import math

import numpy as np
import pytest

from movepoly.config import DEFAULT_TOLERANCES
from movepoly.errors import (DependentFamilyError, InfeasibleSetError,
                             ReductionError)
from movepoly.linalg import VectorFamily, dependency_witness
from movepoly.polyhedron import KIND_EQ, MovingPolyhedron
from movepoly.projection import project
from movepoly.reduction import (denormalize_multiplier, min_l1_multiplier,
                                normalize_multiplier,
                                reduce_equalities,
                                reduce_positive_combination,
                                reduced_multiplier)

from helpers import (constant_constraint, corpus_problem, corpus_query,
                     make_instance, paper_points, paper_problem,
                     parameter_gap_problem)


class TestNormalization:
    def test_round_trip(self):
        lam = np.array([0.0, 0.4, 1.2])
        down = normalize_multiplier(lam, 2.5)
        np.testing.assert_allclose(denormalize_multiplier(down, 2.5), lam)

    def test_distance_must_be_positive(self):
        with pytest.raises(ValueError):
            normalize_multiplier(np.array([1.0]), 0.0)
        with pytest.raises(ValueError):
            denormalize_multiplier(np.array([1.0]), -1.0)

    def test_zero_vector_is_rejected(self):
        with pytest.raises(ReductionError):
            normalize_multiplier(np.zeros(3), 1.0)


class TestReduceEqualities:
    def test_collinear_consistent_pair_keeps_the_first(self):
        cs = [constant_constraint(KIND_EQ, [1.0, 0.0], 1.0),
              constant_constraint(KIND_EQ, [2.0, 0.0], 2.0)]
        mp = MovingPolyhedron(cs, base_param=np.zeros(1),
                              base_point=np.array([1.0, 0.0]))
        assert reduce_equalities(mp, np.zeros(1)) == (1,)

    def test_independent_family_is_kept_whole(self):
        mp = paper_problem()
        assert reduce_equalities(mp, np.array([0.3, 0.1])) == (1, 2)

    def test_infeasible_parameter_is_an_error(self):
        mp = parameter_gap_problem()
        with pytest.raises(InfeasibleSetError):
            reduce_equalities(mp, np.array([0.5]))


class TestReducePositiveCombination:
    def test_one_ratio_step_drops_the_mixed_vector(self):
        fam = VectorFamily(np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]),
                           (1, 2, 3))
        kept, coeffs, steps = reduce_positive_combination(
            np.array([1.0, 2.0]), fam, eq_labels=(1, 2), pos_labels=(3,),
            coefficients=[0.0, 1.0, 1.0])
        assert kept == ()
        np.testing.assert_allclose(coeffs, [1.0, 2.0, 0.0], atol=1e-12)
        assert steps == 1

    def test_collinear_positive_pair(self):
        fam = VectorFamily(np.array([[1.0, 0.0], [2.0, 0.0]]), (1, 2))
        kept, coeffs, steps = reduce_positive_combination(
            np.array([3.0, 0.0]), fam, eq_labels=(), pos_labels=(1, 2),
            coefficients=[1.0, 1.0])
        # either single survivor is a valid outcome; the ratio rule picks 2
        assert kept == (2,)
        np.testing.assert_allclose(coeffs, [0.0, 1.5], atol=1e-12)
        assert steps == 1
        np.testing.assert_allclose(coeffs @ fam.vectors, [3.0, 0.0],
                                   atol=1e-12)

    def test_independent_family_is_unchanged(self):
        fam = VectorFamily(np.array([[1.0, 0.0], [0.0, 1.0]]), (4, 7))
        kept, coeffs, steps = reduce_positive_combination(
            np.array([1.0, 1.0]), fam, eq_labels=(), pos_labels=(4, 7),
            coefficients=[1.0, 1.0])
        assert kept == (4, 7)
        np.testing.assert_allclose(coeffs, [1.0, 1.0])
        assert steps == 0

    def test_zero_coefficients_are_dropped_up_front(self):
        fam = VectorFamily(np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]),
                           (1, 2, 3))
        kept, coeffs, steps = reduce_positive_combination(
            np.array([1.0, 0.0]), fam, eq_labels=(), pos_labels=(1, 2, 3),
            coefficients=[1.0, 0.0, 0.0])
        assert kept == (1,)
        assert steps == 0

    def test_dependent_free_part_is_rejected(self):
        fam = VectorFamily(np.array([[1.0, 0.0], [2.0, 0.0], [0.0, 1.0]]),
                           (1, 2, 3))
        with pytest.raises(DependentFamilyError):
            reduce_positive_combination(
                np.array([3.0, 1.0]), fam, eq_labels=(1, 2), pos_labels=(3,),
                coefficients=[1.0, 1.0, 1.0])

    def test_negative_coefficient_is_rejected(self):
        fam = VectorFamily(np.array([[1.0, 0.0], [0.0, 1.0]]), (1, 2))
        with pytest.raises(ValueError):
            reduce_positive_combination(
                np.array([1.0, -1.0]), fam, eq_labels=(), pos_labels=(1, 2),
                coefficients=[1.0, -1.0])

    def test_mismatched_target_is_rejected(self):
        fam = VectorFamily(np.array([[1.0, 0.0], [0.0, 1.0]]), (1, 2))
        with pytest.raises(ValueError):
            reduce_positive_combination(
                np.array([5.0, 5.0]), fam, eq_labels=(), pos_labels=(1, 2),
                coefficients=[1.0, 1.0])

    def test_random_cones_respect_the_round_bound(self):
        rng = np.random.default_rng(101)
        for _ in range(60):
            d = int(rng.integers(2, 5))
            n_pos = int(rng.integers(1, 7))
            vectors = rng.uniform(-1, 1, size=(n_pos, d))
            lam = rng.uniform(0.0, 2.0, size=n_pos)
            target = lam @ vectors
            fam = VectorFamily(vectors, tuple(range(1, n_pos + 1)))
            kept, coeffs, steps = reduce_positive_combination(
                target, fam, eq_labels=(), pos_labels=fam.labels,
                coefficients=lam)
            assert steps <= n_pos
            assert len(kept) <= d
            np.testing.assert_allclose(coeffs @ vectors, target, atol=1e-8)
            for label in kept:
                assert coeffs[label - 1] > 0
            if kept:
                assert dependency_witness(fam.subfamily(kept), 1e-9) is None


class TestReducedMultiplier:
    def test_paper_example_certificate(self):
        mp = paper_problem()
        inst = mp.instantiate(np.array([1.0, 1.0]))
        w = np.array([1.0, 2.0])
        result = project(inst, w)
        cert = reduced_multiplier(inst, w, result)
        assert not cert.trivial
        assert cert.equality_support == (1, 2)
        assert cert.inequality_support == ()
        np.testing.assert_allclose(cert.coefficients, [1.0, 2.0], atol=1e-9)
        assert cert.reconstruction_error <= 1e-8 * max(1.0, result.distance)

    def test_single_halfspace_certificate(self):
        inst = make_instance([[1.0, 0.0]], [0.0], n_eq=0)
        w = np.array([1.0, 1.0])
        result = project(inst, w)
        cert = reduced_multiplier(inst, w, result)
        assert cert.equality_support == ()
        assert cert.inequality_support == (1,)
        np.testing.assert_allclose(cert.coefficients, [1.0], atol=1e-12)

    def test_feasible_query_yields_the_trivial_certificate(self):
        inst = make_instance([[1.0, 0.0]], [1.0], n_eq=0)
        w = np.array([0.0, 0.0])
        result = project(inst, w)
        cert = reduced_multiplier(inst, w, result)
        assert cert.trivial
        assert cert.support == ()
        assert cert.l1_norm() == 0.0

    def test_full_vector_reconstructs_the_offset(self):
        mp = paper_problem()
        for p, w in paper_points(6):
            inst = mp.instantiate(p)
            result = project(inst, w)
            cert = reduced_multiplier(inst, w, result)
            full = cert.as_full_vector(3)
            offset = w - result.point
            np.testing.assert_allclose(inst.gradients.T @ full, offset,
                                       atol=1e-9)

    def test_certificate_invariants_on_random_instances(self):
        floor = DEFAULT_TOLERANCES.positivity_floor
        checked = 0
        for seed in range(120):
            mp = corpus_problem(seed)
            p, w = corpus_query(mp, seed)
            inst = mp.instantiate(p)
            result = project(inst, w)
            if not result.converged or result.distance <= 1e-9:
                continue
            cert = reduced_multiplier(inst, w, result)
            checked += 1
            support = cert.support
            assert len(support) == cert.rank_certificate.rank
            fam = inst.gradient_family(support)
            assert dependency_witness(fam, 1e-9) is None
            ineq_part = cert.coefficients[len(cert.equality_support):]
            assert np.all(ineq_part > floor)
            assert cert.reconstruction_error <= 1e-8 * max(1.0,
                                                           result.distance)
            assert cert.reduction_steps <= max(0, len(result.active)
                                               - inst.n_eq)
        assert checked >= 40


class TestMinL1Multiplier:
    def test_paper_example_sequence_minimum(self):
        mp = paper_problem()
        for k, (p, w) in enumerate(paper_points(8), start=1):
            inst = mp.instantiate(p)
            result = project(inst, w)
            best = min_l1_multiplier(inst, w, result)
            expected = 2.0 / math.sqrt(5.0) if k == 1 else 3.0 / math.sqrt(5.0)
            assert best.value == pytest.approx(expected, rel=1e-9)
        # at k = 1 the winning support uses the moving constraint
        inst = mp.instantiate(np.array([1.0, 1.0]))
        w = np.array([1.0, 2.0])
        best = min_l1_multiplier(inst, w, project(inst, w))
        assert best.support == (2, 3)

    def test_multiplier_satisfies_the_stationarity_system(self):
        for seed in range(60):
            mp = corpus_problem(seed)
            p, w = corpus_query(mp, seed)
            inst = mp.instantiate(p)
            result = project(inst, w)
            if not result.converged or result.distance <= 1e-9:
                continue
            best = min_l1_multiplier(inst, w, result)
            direction = (w - result.point) / result.distance
            np.testing.assert_allclose(inst.gradients.T @ best.multipliers,
                                       direction, atol=1e-7)
            assert best.value == pytest.approx(
                np.sum(np.abs(best.multipliers)), abs=1e-12)

    def test_never_exceeds_the_reduced_certificate_norm(self):
        for seed in range(60):
            mp = corpus_problem(seed)
            p, w = corpus_query(mp, seed)
            inst = mp.instantiate(p)
            result = project(inst, w)
            if not result.converged or result.distance <= 1e-9:
                continue
            best = min_l1_multiplier(inst, w, result)
            cert = reduced_multiplier(inst, w, result)
            reduced_norm = cert.l1_norm() / result.distance
            assert best.value <= reduced_norm + 1e-7
