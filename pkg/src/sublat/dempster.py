"""Classical belief and plausibility from a multivalued evidence map.

Each of ``n`` sources reports a non-empty set of possible values G_i drawn
from a finite frame.  For a query set A the sources split into those with
G_i inside A, those straddling A, and those inside the complement; belief
counts the first group and plausibility the first two.

All quantities are exact :class:`fractions.Fraction`.
"""

from __future__ import annotations

import itertools
import json
import re
from collections.abc import Callable, Iterable, Mapping
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .errors import InvalidEvidence, InvalidSelection, MissingValue, ValidationError


@dataclass(frozen=True)
class Frame:
    elements: frozenset[int]

    def __post_init__(self):
        object.__setattr__(self, "elements", frozenset(self.elements))
        if not self.elements:
            raise ValidationError("frame must be non-empty")

    @classmethod
    def interval(cls, lo: int, hi: int) -> "Frame":
        return cls(frozenset(range(lo, hi + 1)))

    def complement(self, A: Iterable[int]) -> frozenset[int]:
        return self.elements - frozenset(A)

    def check(self, A: Iterable[int]) -> frozenset[int]:
        A = frozenset(A)
        extra = A - self.elements
        if extra:
            raise ValidationError(f"query set has elements outside the frame: {sorted(extra)[:5]}")
        return A

    def __len__(self):
        return len(self.elements)


@dataclass(frozen=True)
class Evidence:
    frame: Frame
    sets: tuple[frozenset[int], ...]

    def __post_init__(self):
        sets = tuple(frozenset(g) for g in self.sets)
        object.__setattr__(self, "sets", sets)
        if not sets:
            raise InvalidEvidence("evidence needs at least one source")
        for i, g in enumerate(sets):
            if not g:
                raise InvalidEvidence(
                    f"evidence set {i} is empty; every source must report a non-empty set"
                )
            if not g <= self.frame.elements:
                raise InvalidEvidence(f"evidence set {i} has elements outside the frame")

    def __len__(self):
        return len(self.sets)

    @property
    def is_singleton(self) -> bool:
        return all(len(g) == 1 for g in self.sets)


@dataclass(frozen=True)
class Selection:
    """One value picked from each evidence set."""

    evidence: Evidence
    choices: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "choices", tuple(self.choices))
        if len(self.choices) != len(self.evidence):
            raise InvalidSelection(f"need {len(self.evidence)} choices, got {len(self.choices)}")
        for i, (a, g) in enumerate(zip(self.choices, self.evidence.sets)):
            if a not in g:
                raise InvalidSelection(f"choice {a} for source {i} is not in its evidence set")


def categorize(evidence: Evidence, A: Iterable[int]) -> tuple[int, int, int]:
    """(inside A, straddling, inside the complement)."""
    A = evidence.frame.check(A)
    n1 = n3 = 0
    for g in evidence.sets:
        if g <= A:
            n1 += 1
        elif g.isdisjoint(A):
            n3 += 1
    return n1, len(evidence) - n1 - n3, n3


def belief(evidence: Evidence, A: Iterable[int]) -> Fraction:
    n1, _, _ = categorize(evidence, A)
    return Fraction(n1, len(evidence))


def plausibility(evidence: Evidence, A: Iterable[int]) -> Fraction:
    n1, n2, _ = categorize(evidence, A)
    return Fraction(n1 + n2, len(evidence))


def dont_know(evidence: Evidence, A: Iterable[int]) -> Fraction:
    return plausibility(evidence, A) - belief(evidence, A)


def selection_probability(selection: Selection, A: Iterable[int]) -> Fraction:
    A = selection.evidence.frame.check(A)
    k = sum(a in A for a in selection.choices)
    return Fraction(k, len(selection.choices))


def all_selections(evidence: Evidence):
    """Every single-valued refinement, in lexicographic order of sorted choices."""
    for choices in itertools.product(*(sorted(g) for g in evidence.sets)):
        yield Selection(evidence, choices)


def count_selections(evidence: Evidence) -> int:
    n = 1
    for g in evidence.sets:
        n *= len(g)
    return n


# ------------------------------------------------------------------- coarsening


def coarsen(frame: Frame, generators: Iterable[Iterable[int]]) -> list[frozenset[int]]:
    """Atoms of the Boolean algebra on ``frame`` generated by ``generators``.

    Two frame points share an atom iff every generator contains both or
    neither.  Belief and plausibility of any set in the generated algebra
    only depend on which atoms it contains.
    """
    gens = [frozenset(g) for g in generators]
    blocks: dict[tuple[bool, ...], set[int]] = {}
    for x in sorted(frame.elements):
        blocks.setdefault(tuple(x in g for g in gens), set()).add(x)
    return [frozenset(b) for b in blocks.values()]


def algebra(atoms: list[frozenset[int]]):
    """All 2**len(atoms) unions of atoms."""
    for r in range(len(atoms) + 1):
        for combo in itertools.combinations(atoms, r):
            yield frozenset().union(*combo)


# ------------------------------------------------------------------- capacities


@dataclass(frozen=True)
class CapacityVerdict:
    normalized: bool
    monotone: bool
    additive: bool

    @property
    def is_capacity(self) -> bool:
        return self.normalized and self.monotone

    @property
    def is_probability(self) -> bool:
        return self.normalized and self.additive


def _lookup(mu, A: frozenset) -> Fraction:
    if isinstance(mu, Mapping):
        try:
            return mu[A]
        except KeyError:
            raise MissingValue(f"set function has no value at {sorted(A)}") from None
    return mu(A)


def capacity_check(
    mu: Mapping[frozenset, Fraction] | Callable[[frozenset], Fraction],
    ground: Iterable,
) -> CapacityVerdict:
    """Check normalisation, monotonicity and additivity of ``mu`` on all
    subsets of a small ground set (typically the atoms of a coarsening,
    in which case pass ``mu`` over unions of atoms)."""
    points = list(ground)
    if len(points) > 16:
        raise ValidationError(f"ground set of {len(points)} points is too large to enumerate")
    subsets = [frozenset(c) for r in range(len(points) + 1) for c in itertools.combinations(points, r)]
    vals = {A: _lookup(mu, A) for A in subsets}
    full = frozenset(points)
    normalized = vals[frozenset()] == 0 and vals[full] == 1
    monotone = all(vals[A] <= vals[A | {x}] for A in subsets for x in points if x not in A)
    additive = all(
        vals[A | B] == vals[A] + vals[B]
        for A in subsets
        for B in subsets
        if A.isdisjoint(B)
    )
    return CapacityVerdict(normalized, monotone, additive)


def capacity_added_value(mu, i, B: Iterable) -> Fraction:
    """mu(B + {i}) - mu(B): what element i adds to coalition B."""
    B = frozenset(B)
    return _lookup(mu, B | {i}) - _lookup(mu, B)


def lift(mu_on_points: Callable[[frozenset], Fraction], atoms: list[frozenset[int]]):
    """View a set function on frame points as one on sets of atoms."""

    def on_atoms(S: frozenset) -> Fraction:
        return mu_on_points(frozenset().union(*S))

    return on_atoms


# ---------------------------------------------------------------------- parsing

_RANGE = re.compile(r"^\s*(-?\d+)\s*\.\.\s*(-?\d+)\s*$")


def parse_set_spec(spec) -> frozenset[int]:
    """``"60..69"`` (inclusive), ``"1,5,9"``, a single int, or a list of ints."""
    if isinstance(spec, int) and not isinstance(spec, bool):
        return frozenset([spec])
    if isinstance(spec, (list, tuple, set, frozenset)):
        out: set[int] = set()
        for part in spec:
            out |= parse_set_spec(part)
        return frozenset(out)
    if isinstance(spec, str):
        out = set()
        for part in spec.split(","):
            part = part.strip()
            if not part:
                continue
            m = _RANGE.match(part)
            if m:
                lo, hi = int(m.group(1)), int(m.group(2))
                if lo > hi:
                    raise ValidationError(f"empty range {part!r}")
                out.update(range(lo, hi + 1))
            else:
                try:
                    out.add(int(part))
                except ValueError:
                    raise ValidationError(f"cannot parse set element {part!r}") from None
        return frozenset(out)
    raise ValidationError(f"cannot parse set specification {spec!r}")


def evidence_from_json(obj: dict) -> Evidence:
    if not isinstance(obj, dict) or "frame" not in obj or "sets" not in obj:
        raise InvalidEvidence("evidence file needs 'frame' and 'sets'")
    fr = obj["frame"]
    if isinstance(fr, dict):
        frame = Frame.interval(int(fr["min"]), int(fr["max"]))
    else:
        frame = Frame(parse_set_spec(fr))
    return Evidence(frame, tuple(parse_set_spec(g) for g in obj["sets"]))


def evidence_to_json(ev: Evidence) -> dict:
    elems = sorted(ev.frame.elements)
    if elems == list(range(elems[0], elems[-1] + 1)):
        frame = {"min": elems[0], "max": elems[-1]}
    else:
        frame = elems
    return {"frame": frame, "sets": [sorted(g) for g in ev.sets]}


def load_evidence(path) -> Evidence:
    with open(Path(path)) as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InvalidEvidence(f"{path}: not valid JSON ({exc})") from None
    return evidence_from_json(obj)
