"""Numeric tolerances and sampling parameters with their defaults."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

from .errors import ProblemFormatError

MAX_SEED = 2**64 - 1


@dataclass(frozen=True)
class Tolerances:
    feasibility: float = 1e-9      # absolute, on constraint values
    kkt: float = 1e-9              # stationarity / complementarity / sign
    rank: float = 1e-9             # relative, on orthogonalization residuals
    active: float = 1e-8           # absolute, activity detection
    positivity_floor: float = 1e-12  # coefficients below this count as zero
    iteration_cap_factor: int = 100  # cap = factor * constraint count

    def replace(self, **kw) -> "Tolerances":
        return dataclasses.replace(self, **kw)


@dataclass(frozen=True)
class SamplingConfig:
    seed: int = 0
    samples: int = 500
    shrink_levels: int = 5         # radius halvings in the blow-up diagnostic
    subset_guard: int = 4096       # max index subsets enumerated per check
    bruteforce_guard: int = 20     # max constraints for exhaustive projection
    close_pair_cutoff: float = 1e-10  # parameter pairs closer than this are skipped

    def replace(self, **kw) -> "SamplingConfig":
        return dataclasses.replace(self, **kw)

    def __post_init__(self):
        if not (0 <= self.seed <= MAX_SEED):
            raise ProblemFormatError("seed must fit in an unsigned 64-bit integer",
                                     "sampling.seed")
        if self.samples < 1:
            raise ProblemFormatError("samples must be positive", "sampling.samples")


DEFAULT_TOLERANCES = Tolerances()
DEFAULT_SAMPLING = SamplingConfig()


def tolerances_from_mapping(data: dict | None, base: Tolerances = DEFAULT_TOLERANCES,
                            path: str = "tolerances") -> Tolerances:
    """Overlay a validated mapping onto ``base``, rejecting unknown keys."""
    if not data:
        return base
    allowed = {f.name for f in dataclasses.fields(Tolerances)}
    overrides = {}
    for key, value in data.items():
        if key not in allowed:
            raise ProblemFormatError(f"unknown tolerance {key!r}", path)
        if key == "iteration_cap_factor":
            if not isinstance(value, int) or value < 1:
                raise ProblemFormatError("must be a positive integer",
                                         f"{path}.{key}")
            overrides[key] = value
        else:
            value = float(value)
            if not value > 0:
                raise ProblemFormatError("must be positive", f"{path}.{key}")
            overrides[key] = value
    return base.replace(**overrides)
