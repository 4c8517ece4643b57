"""Rank decisions on small families of vectors.

Everything here works at desk scale (tens of vectors, modest dimension) and
favors reproducibility over asymptotic speed: ranks come from a pivoted
modified Gram-Schmidt pass on pre-normalized vectors, with a relative
tolerance and deterministic tie breaking, so repeated runs agree bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .config import DEFAULT_TOLERANCES
from .errors import DependentFamilyError, DimensionMismatchError

# A pivot magnitude within this factor of the tolerance marks the rank
# decision as fragile.
BORDERLINE_FACTOR = 10.0


@dataclass(frozen=True, eq=False)
class VectorFamily:
    """An ordered, labeled family of vectors sharing one ambient dimension."""

    vectors: np.ndarray          # shape (k, d)
    labels: tuple[int, ...]      # unique, parallel to rows

    def __post_init__(self):
        vectors = np.asarray(self.vectors, dtype=float)
        if vectors.ndim != 2:
            raise DimensionMismatchError("vectors must form a 2-d array")
        if vectors.shape[1] < 1:
            raise DimensionMismatchError("ambient dimension must be at least 1")
        if not np.all(np.isfinite(vectors)):
            raise DimensionMismatchError("vectors must be finite")
        labels = tuple(int(l) for l in self.labels)
        if len(labels) != vectors.shape[0]:
            raise DimensionMismatchError("one label per vector required")
        if len(set(labels)) != len(labels):
            raise DimensionMismatchError("labels must be unique")
        vectors = vectors.copy()
        vectors.flags.writeable = False
        object.__setattr__(self, "vectors", vectors)
        object.__setattr__(self, "labels", labels)

    @classmethod
    def from_rows(cls, rows, labels: Sequence[int] | None = None) -> "VectorFamily":
        vectors = np.atleast_2d(np.asarray(rows, dtype=float))
        if labels is None:
            labels = tuple(range(1, vectors.shape[0] + 1))
        return cls(vectors, tuple(labels))

    def __len__(self) -> int:
        return self.vectors.shape[0]

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def position(self, label: int) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"label {label} not in family") from None

    def subfamily(self, labels: Iterable[int]) -> "VectorFamily":
        """Rows for ``labels``, kept in the given order."""
        labels = tuple(labels)
        rows = [self.position(l) for l in labels]
        return VectorFamily(self.vectors[rows], labels)

    def __eq__(self, other) -> bool:
        if not isinstance(other, VectorFamily):
            return NotImplemented
        return self.labels == other.labels and np.array_equal(self.vectors,
                                                              other.vectors)


@dataclass(frozen=True)
class RankCertificate:
    """Outcome of a rank decision, with the magnitudes that drove it."""

    rank: int
    pivot_indices: tuple[int, ...]   # labels of the selected subfamily
    smallest_accepted: float
    largest_rejected: float
    borderline: bool


@dataclass(frozen=True, eq=False)
class DependencyWitness:
    """A nontrivial vanishing combination of a dependent family."""

    coefficients: np.ndarray       # parallel to family order, inf-norm 1
    support: tuple[int, ...]       # labels with nonzero coefficient


def gram_determinant(family: VectorFamily) -> float:
    """det of the pairwise inner-product matrix; 0 marks dependence."""
    if len(family) == 0:
        raise DimensionMismatchError("family must be nonempty")
    gram = family.vectors @ family.vectors.T
    return float(np.linalg.det(gram))


def _greedy_orthogonalize(vectors: np.ndarray, tol: float,
                          forced: Sequence[int] = ()):
    """Pivoted MGS on pre-normalized rows.

    Returns (accepted positions in acceptance order, accepted magnitudes,
    largest rejected magnitude, position of the largest-residual rejected row
    or None, orthonormal basis rows).  ``forced`` rows are taken first, in the
    order given; a forced row whose residual falls below ``tol`` raises.
    Magnitudes are residual norms of unit-normalized rows, so ``tol`` acts
    relative to each vector's own scale.
    """
    k, d = vectors.shape
    norms = np.linalg.norm(vectors, axis=1)
    resid = np.zeros_like(vectors)
    nonzero = norms > 0
    resid[nonzero] = vectors[nonzero] / norms[nonzero, None]

    basis: list[np.ndarray] = []
    order: list[int] = []
    magnitudes: list[float] = []
    remaining = list(range(k))

    def accept(pos: int, magnitude: float):
        q = resid[pos] / magnitude
        # one re-orthogonalization pass keeps the basis tight
        for b in basis:
            q = q - (q @ b) * b
        q = q / np.linalg.norm(q)
        basis.append(q)
        order.append(pos)
        magnitudes.append(magnitude)
        remaining.remove(pos)
        if remaining:
            rows = np.array(remaining)
            resid[rows] -= np.outer(resid[rows] @ q, q)

    for pos in forced:
        magnitude = float(np.linalg.norm(resid[pos]))
        if magnitude <= tol:
            raise DependentFamilyError(
                f"required vector at position {pos} is dependent on the "
                f"vectors accepted before it (residual {magnitude:.3e})")
        accept(pos, magnitude)

    while remaining and len(order) < min(k, d):
        rows = np.array(remaining)
        res_norms = np.linalg.norm(resid[rows], axis=1)
        best = int(np.argmax(res_norms))          # first index wins ties
        magnitude = float(res_norms[best])
        if magnitude <= tol:
            break
        accept(int(rows[best]), magnitude)

    if remaining:
        rows = np.array(remaining)
        res_norms = np.linalg.norm(resid[rows], axis=1)
        worst = int(np.argmax(res_norms))
        largest_rejected = float(res_norms[worst])
        rejected_pos = int(rows[worst])
    else:
        largest_rejected = 0.0
        rejected_pos = None

    basis_arr = np.array(basis) if basis else np.zeros((0, d))
    return order, magnitudes, largest_rejected, rejected_pos, basis_arr


def numerical_rank(family: VectorFamily,
                   tol: float = DEFAULT_TOLERANCES.rank) -> RankCertificate:
    """Rank of the family at relative tolerance ``tol``, with certificate."""
    if len(family) == 0:
        return RankCertificate(0, (), 0.0, 0.0, False)
    order, magnitudes, largest_rejected, _, _ = _greedy_orthogonalize(
        family.vectors, tol)
    smallest_accepted = min(magnitudes) if magnitudes else 0.0
    borderline = bool(
        (magnitudes and smallest_accepted <= BORDERLINE_FACTOR * tol)
        or largest_rejected >= tol / BORDERLINE_FACTOR)
    return RankCertificate(
        rank=len(order),
        pivot_indices=tuple(family.labels[p] for p in order),
        smallest_accepted=smallest_accepted,
        largest_rejected=largest_rejected,
        borderline=borderline,
    )


def dependency_witness(family: VectorFamily,
                       tol: float = DEFAULT_TOLERANCES.rank
                       ) -> DependencyWitness | None:
    """A vanishing combination over a dependent family, or None.

    The witness expresses the largest-residual rejected vector through the
    accepted pivots, is scaled to unit inf-norm, and carries a -1-direction
    entry at the rejected vector before scaling.
    """
    if len(family) == 0:
        return None
    order, _, _, rejected_pos, _ = _greedy_orthogonalize(family.vectors, tol)
    if rejected_pos is None or len(order) == len(family):
        return None
    pivots = family.vectors[order]
    target = family.vectors[rejected_pos]
    coeff_pivots, *_ = np.linalg.lstsq(pivots.T, target, rcond=None)
    coefficients = np.zeros(len(family))
    coefficients[list(order)] = coeff_pivots
    coefficients[rejected_pos] = -1.0
    coefficients = coefficients / np.max(np.abs(coefficients))
    support = tuple(family.labels[i] for i in range(len(family))
                    if coefficients[i] != 0.0)
    return DependencyWitness(coefficients=coefficients, support=support)


def max_independent_subfamily(family: VectorFamily,
                              must_keep: Iterable[int] = (),
                              tol: float = DEFAULT_TOLERANCES.rank
                              ) -> tuple[int, ...]:
    """Labels of a maximal independent subfamily, ``must_keep`` first.

    Raises DependentFamilyError when the ``must_keep`` labels are themselves
    dependent, and KeyError for labels outside the family.
    """
    must_keep = tuple(must_keep)
    forced = [family.position(l) for l in must_keep]
    if len(family) == 0:
        return ()
    order, *_ = _greedy_orthogonalize(family.vectors, tol, forced=forced)
    return tuple(family.labels[p] for p in order)
