"""Hilbert-space layer for the finite system with positions in Z(n).

All projectors built from the divisor lattice are diagonal in the position
basis, so they are stored as index sets (:class:`ProjectorSupport`).  Dense
matrices are only materialised on request, for cross-checks.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from pathlib import Path

import numpy as np

from .errors import (
    DimensionMismatch,
    NegativeProbability,
    NotADivisor,
    NotHermitian,
    NotNormalized,
    NotPSD,
    TraceNotOne,
    ValidationError,
)
from .lattice import divisors

EPS_NORM = 1e-10
EPS_HERM = 1e-10
EPS_TRACE = 1e-10
EPS_PSD = 1e-9
EPS_UNIT = 1e-12


# --------------------------------------------------------------------- states


@dataclass(frozen=True, eq=False)
class StateVector:
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1.0) > EPS_NORM:
            raise NotNormalized(f"squared norm is {norm!r}, expected 1")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def inner(self, other: "StateVector") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))


def position_state(n: int, r: int) -> StateVector:
    """|X_n; r>"""
    if not 0 <= r < n:
        raise ValidationError(f"position {r} outside Z({n})")
    amps = np.zeros(n, dtype=complex)
    amps[r] = 1.0
    return StateVector(amps)


def embed_state(v: StateVector, k: int) -> StateVector:
    """Embed a state of the m-dimensional system into dimension k (m | k).

    The amplitude at position r moves to position (k/m) r.
    """
    m = v.dim
    if k < 1 or k % m:
        raise NotADivisor(f"{m} does not divide {k}")
    out = np.zeros(k, dtype=complex)
    out[:: k // m] = v.amplitudes
    return StateVector(out)


def fourier(n: int) -> np.ndarray:
    """Unitary DFT matrix F[r, s] = exp(2 pi i r s / n) / sqrt(n)."""
    if n < 1:
        raise ValidationError(f"dimension must be positive, got {n}")
    rs = np.outer(np.arange(n), np.arange(n)) % n
    return np.exp(2j * np.pi * rs / n) / math.sqrt(n)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Validated density matrix; build through :func:`make_density` or
    :func:`make_diagonal_density`."""

    entries: np.ndarray

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @cached_property
    def diagonal(self) -> np.ndarray:
        d = self.entries.diagonal().real.copy()
        d.setflags(write=False)
        return d

    @property
    def is_diagonal(self) -> bool:
        return not np.any(self.entries - np.diag(self.entries.diagonal()))

    def __eq__(self, other):
        if not isinstance(other, DensityMatrix):
            return NotImplemented
        return self.entries.shape == other.entries.shape and bool(np.all(self.entries == other.entries))

    __hash__ = None


def make_density(entries) -> DensityMatrix:
    rho = np.array(entries, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1] or rho.shape[0] == 0:
        raise DimensionMismatch(f"density matrix must be square and non-empty, got shape {rho.shape}")
    herm_err = float(np.max(np.abs(rho - rho.conj().T)))
    if herm_err > EPS_HERM:
        raise NotHermitian(f"max |rho - rho^dagger| = {herm_err:.3e} exceeds {EPS_HERM}")
    tr = complex(np.trace(rho))
    if abs(tr - 1.0) > EPS_TRACE:
        raise TraceNotOne(f"trace is {tr}, expected 1")
    sym = (rho + rho.conj().T) / 2
    lam_min = float(np.linalg.eigvalsh(sym)[0])
    if lam_min < -EPS_PSD:
        raise NotPSD(f"smallest eigenvalue {lam_min:.3e} is below -{EPS_PSD}")
    rho.setflags(write=False)
    return DensityMatrix(rho)


def make_diagonal_density(probabilities) -> DensityMatrix:
    p = np.array([float(Fraction(x)) if isinstance(x, str) else float(x) for x in probabilities])
    if p.ndim != 1 or p.size == 0:
        raise DimensionMismatch("probabilities must be a non-empty vector")
    if np.any(p < 0):
        bad = int(np.argmin(p))
        raise NegativeProbability(f"probability at index {bad} is {p[bad]}")
    total = math.fsum(p)
    if abs(total - 1.0) > EPS_TRACE:
        raise TraceNotOne(f"probabilities sum to {total!r}, expected 1")
    rho = np.diag(p).astype(complex)
    rho.setflags(write=False)
    return DensityMatrix(rho)


def maximally_mixed(n: int) -> DensityMatrix:
    return make_diagonal_density(np.full(n, 1.0 / n))


def vacuum(n: int) -> DensityMatrix:
    p = np.zeros(n)
    p[0] = 1.0
    return make_diagonal_density(p)


def random_density(n: int, rng: np.random.Generator) -> DensityMatrix:
    """G G^dagger / Tr(G G^dagger) with G complex Gaussian; full rank almost surely."""
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    rho = g @ g.conj().T
    rho /= np.trace(rho).real
    rho = (rho + rho.conj().T) / 2
    return make_density(rho)


# ----------------------------------------------------------------- projectors


@dataclass(frozen=True)
class ProjectorSupport:
    """Diagonal 0/1 projector on C^n given by the positions it keeps."""

    n: int
    indices: frozenset[int]
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "indices", frozenset(self.indices))
        if any(not 0 <= r < self.n for r in self.indices):
            raise ValidationError(f"projector indices must lie in 0..{self.n - 1}")

    @property
    def rank(self) -> int:
        return len(self.indices)

    def __len__(self):
        return len(self.indices)

    def sorted(self) -> tuple[int, ...]:
        return tuple(sorted(self.indices))

    @cached_property
    def index_array(self) -> np.ndarray:
        a = np.array(self.sorted(), dtype=np.intp)
        a.setflags(write=False)
        return a

    def matrix(self) -> np.ndarray:
        out = np.zeros((self.n, self.n))
        idx = self.index_array
        out[idx, idx] = 1.0
        return out


def _lattice(n: int, *ms: int):
    lat = divisors(n)
    lat.check(*ms)
    return lat


@lru_cache(maxsize=65536)
def projector(m: int, n: int) -> ProjectorSupport:
    """Projector onto the embedded copy of the m-dimensional subsystem."""
    _lattice(n, m)
    return ProjectorSupport(n, frozenset(range(0, n, n // m)), f"P({m})")


@lru_cache(maxsize=65536)
def projector_tilde(m: int, n: int) -> ProjectorSupport:
    """P(m) with the vacuum position 0 removed."""
    return ProjectorSupport(n, projector(m, n).indices - {0}, f"P~({m})")


@lru_cache(maxsize=65536)
def projector_T(m1: int, m2: int, n: int) -> ProjectorSupport:
    """Projector onto span of H(m1) and H(m2)."""
    return ProjectorSupport(n, projector(m1, n).indices | projector(m2, n).indices, f"T({m1},{m2})")


@lru_cache(maxsize=65536)
def projector_S(m1: int, m2: int, n: int) -> ProjectorSupport:
    """Part of H(lcm(m1, m2)) orthogonal to T(m1, m2)."""
    top = projector(math.lcm(m1, m2), n).indices
    return ProjectorSupport(n, top - projector_T(m1, m2, n).indices, f"S({m1},{m2})")


@lru_cache(maxsize=65536)
def projector_D(m: int, n: int) -> ProjectorSupport:
    """Don't-know projector 1 - P(m) - P~(not m)."""
    neg = _lattice(n, m).negation(m)
    rest = frozenset(range(n)) - projector(m, n).indices - projector_tilde(neg, n).indices
    return ProjectorSupport(n, rest, f"D({m})")


def trace_against(rho: DensityMatrix, proj: ProjectorSupport) -> float:
    """Tr[rho P] for a diagonal projector: sum of the kept diagonal entries.

    The raw sum is returned (it can stray outside [0, 1] by rounding);
    use :func:`clamp_probability` for display.
    """
    if rho.dim != proj.n:
        raise DimensionMismatch(f"density has dim {rho.dim}, projector acts on {proj.n}")
    return float(rho.diagonal[proj.index_array].sum())


def clamp_probability(x: float) -> float:
    return min(1.0, max(0.0, x))


# -------------------------------------------------------------------- file IO


def density_from_json(obj: dict) -> DensityMatrix:
    if not isinstance(obj, dict) or "n" not in obj:
        raise ValidationError("density file must be an object with key 'n'")
    has_diag, has_entries = "diagonal" in obj, "entries" in obj
    if has_diag == has_entries:
        raise ValidationError("density file needs exactly one of 'diagonal' or 'entries'")
    n = obj["n"]
    if has_diag:
        rho = make_diagonal_density(obj["diagonal"])
    else:
        try:
            arr = np.array(obj["entries"], dtype=float)
        except (TypeError, ValueError) as exc:
            raise ValidationError(f"malformed 'entries': {exc}") from None
        if arr.ndim != 3 or arr.shape[-1] != 2:
            raise ValidationError("'entries' must be an n x n array of [re, im] pairs")
        rho = make_density(arr[..., 0] + 1j * arr[..., 1])
    if rho.dim != n:
        raise DimensionMismatch(f"declared n={n} but data has dimension {rho.dim}")
    return rho


def density_to_json(rho: DensityMatrix) -> dict:
    if rho.is_diagonal:
        return {"n": rho.dim, "diagonal": [float(x) for x in rho.diagonal]}
    return {
        "n": rho.dim,
        "entries": [[[float(z.real), float(z.imag)] for z in row] for row in rho.entries],
    }


def load_density(path) -> DensityMatrix:
    with open(Path(path)) as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{path}: not valid JSON ({exc})") from None
    return density_from_json(obj)


def projector_identity_violations(n: int) -> list[str]:
    """Exhaustively test the projector algebra over all divisor pairs of n."""
    lat = divisors(n)
    bad: list[str] = []
    full = frozenset(range(n))
    if projector(n, n).indices != full:
        bad.append("P(n) is not the identity")
    for m in lat:
        P = projector(m, n).indices
        if len(P) != m:
            bad.append(f"rank of P({m}) is {len(P)}")
        if P & projector(lat.negation(m), n).indices != {0}:
            bad.append(f"P({m}) P(not {m}) is not P(1)")
        Dm = projector_D(m, n).indices
        if Dm & P:
            bad.append(f"D({m}) overlaps P({m})")
        for k in lat:
            Pk = projector(k, n).indices
            if P & Pk != projector(math.gcd(m, k), n).indices:
                bad.append(f"P({m}) P({k}) differs from P(gcd)")
            if k % m == 0 and not P <= Pk:
                bad.append(f"P({m}) not below P({k})")
            T = projector_T(m, k, n).indices
            S = projector_S(m, k, n).indices
            top = projector(math.lcm(m, k), n).indices
            if T & S or T | S != top:
                bad.append(f"T({m},{k}) and S({m},{k}) do not split P(lcm)")
            dim = math.lcm(m, k) - m - k + math.gcd(m, k)
            if len(S) != dim or dim < 0:
                bad.append(f"dim S({m},{k}) = {len(S)}, expected {dim}")
    return bad
