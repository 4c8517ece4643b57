import itertools

import numpy as np
import pytest

from movepoly.errors import DependentFamilyError, DimensionMismatchError
from movepoly.linalg import (VectorFamily, dependency_witness,
                             gram_determinant, max_independent_subfamily,
                             numerical_rank)


def family(rows, labels=None):
    rows = np.asarray(rows, dtype=float)
    if labels is None:
        labels = tuple(range(1, rows.shape[0] + 1))
    return VectorFamily(rows, tuple(labels))


class TestVectorFamily:
    def test_labels_must_be_unique(self):
        with pytest.raises(DimensionMismatchError):
            family([[1.0, 0.0], [0.0, 1.0]], labels=(1, 1))

    def test_subfamily_picks_rows_by_label(self):
        fam = family([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]], labels=(4, 7, 9))
        sub = fam.subfamily((9, 4))
        assert sub.labels == (9, 4)
        np.testing.assert_allclose(sub.vectors, [[1.0, 1.0], [1.0, 0.0]])


class TestGramDeterminant:
    def test_orthonormal_pair(self):
        assert gram_determinant(family([[1.0, 0.0], [0.0, 1.0]])) == pytest.approx(1.0)

    def test_three_vectors_in_the_plane_vanish(self):
        fam = family([[1.0, 0.0], [0.0, 1.0], [2.0, 2.0]])
        assert gram_determinant(fam) == pytest.approx(0.0, abs=1e-12)

    def test_hand_evaluated_pair(self):
        # inner products [[1,1],[1,2]] have determinant 1
        assert gram_determinant(family([[1.0, 0.0], [1.0, 1.0]])) == pytest.approx(1.0)

    def test_matches_dense_gram_matrix_on_random_input(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            rows = rng.integers(-3, 4, size=(3, 4)).astype(float)
            fam = family(rows)
            expected = np.linalg.det(rows @ rows.T)
            assert gram_determinant(fam) == pytest.approx(expected, abs=1e-8)


class TestNumericalRank:
    def test_plane_family_has_rank_two(self):
        cert = numerical_rank(family([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]), 1e-9)
        assert cert.rank == 2
        assert cert.pivot_indices == (1, 2)
        assert len(cert.pivot_indices) == cert.rank
        assert not cert.borderline

    def test_zero_vector_rejected(self):
        cert = numerical_rank(family([[1.0, 0.0], [0.0, 0.0]]), 1e-9)
        assert cert.rank == 1
        assert cert.pivot_indices == (1,)

    def test_tiny_residual_below_tolerance(self):
        cert = numerical_rank(family([[1.0, 0.0], [1.0, 1e-12]]), 1e-9)
        assert cert.rank == 1

    def test_borderline_flag_near_the_threshold(self):
        accepted = numerical_rank(family([[1.0, 0.0], [1.0, 3e-9]]), 1e-9)
        assert accepted.rank == 2
        assert accepted.borderline
        rejected = numerical_rank(family([[1.0, 0.0], [1.0, 3e-10]]), 1e-9)
        assert rejected.rank == 1
        assert rejected.borderline

    def test_clearly_independent_family_is_not_borderline(self):
        cert = numerical_rank(family([[1.0, 0.0], [0.0, 1.0]]), 1e-9)
        assert not cert.borderline
        assert cert.smallest_accepted > 0
        assert cert.largest_rejected == 0.0

    def test_rank_is_permutation_invariant(self):
        rng = np.random.default_rng(11)
        rows = rng.uniform(-1, 1, size=(5, 3))
        base = numerical_rank(family(rows), 1e-9).rank
        for perm in itertools.islice(itertools.permutations(range(5)), 20):
            cert = numerical_rank(family(rows[list(perm)]), 1e-9)
            assert cert.rank == base

    def test_pivots_pass_an_independence_recheck(self):
        rng = np.random.default_rng(23)
        for _ in range(40):
            k, d = rng.integers(1, 6), rng.integers(1, 5)
            rows = rng.integers(-2, 3, size=(k, d)).astype(float)
            fam = family(rows)
            cert = numerical_rank(fam, 1e-9)
            pivots = fam.subfamily(cert.pivot_indices)
            assert dependency_witness(pivots, 1e-9) is None

    def test_full_rank_iff_positive_gram_determinant(self):
        rng = np.random.default_rng(31)
        for _ in range(60):
            k = int(rng.integers(1, 5))
            rows = rng.integers(-2, 3, size=(k, 4)).astype(float)
            fam = family(rows)
            full = numerical_rank(fam, 1e-9).rank == k
            det = gram_determinant(fam)
            if full:
                assert det > 1e-12
            else:
                assert abs(det) <= 1e-6


class TestDependencyWitness:
    def test_plane_family_witness(self):
        fam = family([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
        witness = dependency_witness(fam, 1e-9)
        assert witness is not None
        beta = witness.coefficients
        assert np.max(np.abs(beta)) == pytest.approx(1.0)
        # proportional to (1, 1, -1)
        scaled = beta / beta[0]
        np.testing.assert_allclose(scaled, [1.0, 1.0, -1.0], atol=1e-12)
        np.testing.assert_allclose(beta @ fam.vectors, 0.0, atol=1e-12)

    def test_independent_family_returns_none(self):
        assert dependency_witness(family([[1.0, 0.0], [0.0, 1.0]]), 1e-9) is None

    def test_collinear_pair(self):
        fam = family([[2.0, 0.0], [1.0, 0.0]])
        witness = dependency_witness(fam, 1e-9)
        scaled = witness.coefficients / witness.coefficients[0]
        np.testing.assert_allclose(scaled, [1.0, -2.0], atol=1e-12)

    def test_combination_bound_on_random_dependent_families(self):
        rng = np.random.default_rng(47)
        tol = 1e-9
        for _ in range(50):
            basis = rng.uniform(-1, 1, size=(2, 4))
            mix = rng.uniform(-1, 1, size=2)
            rows = np.vstack([basis, mix @ basis])
            fam = family(rows)
            witness = dependency_witness(fam, tol)
            assert witness is not None
            residual = np.linalg.norm(witness.coefficients @ rows)
            scale = max(np.linalg.norm(v) for v in rows)
            assert residual <= 10 * tol * scale


class TestMaxIndependentSubfamily:
    def test_greedy_order_without_forcing(self):
        fam = family([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
        assert max_independent_subfamily(fam, tol=1e-9) == (1, 2)

    def test_forced_label_comes_first(self):
        fam = family([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
        assert max_independent_subfamily(fam, must_keep=(3,), tol=1e-9) == (3, 1)

    def test_single_vector(self):
        fam = family([[1.0, 0.0]])
        assert max_independent_subfamily(fam, must_keep=(1,), tol=1e-9) == (1,)

    def test_dependent_must_keep_is_rejected(self):
        fam = family([[1.0, 0.0], [2.0, 0.0], [0.0, 1.0]])
        with pytest.raises(DependentFamilyError):
            max_independent_subfamily(fam, must_keep=(1, 2), tol=1e-9)

    def test_selection_has_full_rank_and_contains_must_keep(self):
        rng = np.random.default_rng(59)
        for _ in range(40):
            rows = rng.integers(-2, 3, size=(5, 3)).astype(float)
            fam = family(rows)
            cert = numerical_rank(fam, 1e-9)
            keep = ()
            if cert.rank:
                keep = (cert.pivot_indices[-1],)
            chosen = max_independent_subfamily(fam, must_keep=keep, tol=1e-9)
            assert set(keep) <= set(chosen)
            assert len(chosen) == cert.rank
            assert dependency_witness(fam.subfamily(chosen), 1e-9) is None
