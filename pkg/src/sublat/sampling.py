"""Monte-Carlo simulation of a position-basis von Neumann measurement.

Outcome r occurs with probability rho[r, r].  The lower and upper
probabilities of a subsystem are estimated as the fraction of outcomes
landing in fixed position sets; because those sets are nested
(lower set within intermediate set within upper set) the estimates are
ordered exactly for every record, not just on average.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import ChainConditionError, TraceNotOne, ValidationError
from .lattice import divisors
from .quantum import EPS_TRACE, DensityMatrix, projector, projector_tilde

ALGORITHM = "numpy-PCG64/inverse-cdf"


@dataclass(frozen=True)
class MeasurementRecord:
    n: int
    counts: tuple[int, ...]
    seed: int
    algorithm: str = ALGORITHM

    def __post_init__(self):
        object.__setattr__(self, "counts", tuple(int(c) for c in self.counts))
        if len(self.counts) != self.n:
            raise ValidationError(f"expected {self.n} counts, got {len(self.counts)}")
        if any(c < 0 for c in self.counts):
            raise ValidationError("counts must be non-negative")
        if self.total == 0:
            raise ValidationError("record holds no outcomes")

    @property
    def total(self) -> int:
        return sum(self.counts)

    def frequency(self, positions) -> float:
        return sum(self.counts[r] for r in positions) / self.total

    def to_json(self) -> dict:
        return {"n": self.n, "seed": self.seed, "algorithm": self.algorithm, "counts": list(self.counts)}

    @classmethod
    def from_json(cls, obj: dict) -> "MeasurementRecord":
        return cls(obj["n"], tuple(obj["counts"]), obj["seed"], obj.get("algorithm", ALGORITHM))

    def dumps(self) -> str:
        return json.dumps(self.to_json())


def outcome_distribution(rho: DensityMatrix) -> np.ndarray:
    p = np.clip(rho.diagonal, 0.0, None)
    total = p.sum()
    if abs(total - 1.0) > EPS_TRACE:
        raise TraceNotOne(f"diagonal sums to {total!r}")
    return p / total


def simulate(rho: DensityMatrix, shots: int, seed: int) -> MeasurementRecord:
    """Draw ``shots`` i.i.d. outcomes by inverse CDF over the diagonal of rho."""
    if shots < 1:
        raise ValidationError(f"shots must be >= 1, got {shots}")
    p = outcome_distribution(rho)
    cdf = np.cumsum(p)
    cdf[-1] = 1.0
    rng = np.random.Generator(np.random.PCG64(seed))
    draws = np.searchsorted(cdf, rng.random(shots), side="right")
    # zero-probability trailing outcomes can never be hit since cdf[-1] == 1 > u
    counts = np.bincount(draws, minlength=rho.dim)
    return MeasurementRecord(rho.dim, tuple(counts.tolist()), seed)


def lower_set(m: int, n: int) -> frozenset[int]:
    """Positions whose collapse lies entirely in the m-subsystem."""
    return projector(m, n).indices


def upper_set(m: int, n: int) -> frozenset[int]:
    """Positions outside the vacuum-excluded negation subsystem."""
    neg = divisors(n).negation(m)
    return frozenset(range(n)) - projector_tilde(neg, n).indices


def intermediate_set(m: int, k: int, n: int) -> frozenset[int]:
    lat = divisors(n)
    lat.check(m, k)
    if k % m or lat.double_negation(m) % k:
        raise ChainConditionError(
            f"k={k} must satisfy {m} | k | {lat.double_negation(m)} in D({n})"
        )
    return projector(k, n).indices


def estimate_lower(record: MeasurementRecord, m: int) -> float:
    return record.frequency(lower_set(m, record.n))


def estimate_upper(record: MeasurementRecord, m: int) -> float:
    return record.frequency(upper_set(m, record.n))


def estimate_dont_know(record: MeasurementRecord, m: int) -> float:
    return record.frequency(upper_set(m, record.n) - lower_set(m, record.n))


def estimate_intermediate(record: MeasurementRecord, m: int, k: int) -> float:
    return record.frequency(intermediate_set(m, k, record.n))


def admissible_intermediates(m: int, n: int) -> tuple[int, ...]:
    """All k with m | k | not-not-m."""
    lat = divisors(n)
    nn = lat.double_negation(m)
    return tuple(k for k in lat if k % m == 0 and nn % k == 0)


def binomial_band(p: float, shots: int, width: float = 5.0) -> float:
    return width * float(np.sqrt(max(p * (1.0 - p), 0.0) / shots))
