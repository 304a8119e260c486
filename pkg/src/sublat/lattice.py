"""Divisor lattice of n and the cyclic subgroup arithmetic behind it.

The divisors of ``n`` ordered by divisibility form a finite distributive
lattice with ``meet = gcd`` and ``join = lcm``; bottom is 1, top is ``n``.
Being finite and distributive it is a Heyting algebra, so it also carries an
implication and a pseudocomplement (``negation``).  The subgroups of Z(n)
are in bijection with the divisors (Z(m) for each m | n), which is how the
lattice acts on positions in the quantum layer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterator

from .errors import NotADivisor, ValidationError

__all__ = [
    "Factorization",
    "DivisorLattice",
    "SubgroupView",
    "factorize",
    "divisors",
    "meet",
    "join",
    "negation",
    "double_negation",
    "implication",
    "is_hall_divisor",
    "boolean_sublattice",
    "maximal_chains",
    "covering_edges",
    "embed_group",
    "subgroup",
    "reduced_residues",
    "prime_support",
]


@dataclass(frozen=True)
class Factorization:
    """``value = prod(p ** e for p, e in primes.items())`` with primes ascending."""

    value: int
    primes: dict[int, int] = field(hash=False)

    def __post_init__(self):
        prod = 1
        for p, e in self.primes.items():
            if e < 1:
                raise ValidationError(f"exponent of {p} must be >= 1, got {e}")
            prod *= p**e
        if prod != self.value:
            raise ValidationError(f"factorization {self.primes} does not multiply to {self.value}")

    def __hash__(self):
        return hash((self.value, tuple(self.primes.items())))

    def exponent(self, p: int) -> int:
        return self.primes.get(p, 0)

    @property
    def support(self) -> frozenset[int]:
        return frozenset(self.primes)

    @property
    def num_divisors(self) -> int:
        return math.prod(e + 1 for e in self.primes.values())

    def __str__(self):
        if not self.primes:
            return "1"
        return " * ".join(f"{p}^{e}" if e > 1 else str(p) for p, e in self.primes.items())


def _check_positive(n) -> int:
    if isinstance(n, bool) or not isinstance(n, int):
        raise ValidationError(f"expected a positive integer, got {n!r}")
    if n < 1:
        raise ValidationError(f"expected a positive integer, got {n}")
    return n


@lru_cache(maxsize=4096)
def factorize(n: int) -> Factorization:
    """Trial division up to sqrt(n).  Fine for n up to ~10**12, intended for <= 10**6."""
    _check_positive(n)
    primes: dict[int, int] = {}
    rest = n
    p = 2
    while p * p <= rest:
        while rest % p == 0:
            primes[p] = primes.get(p, 0) + 1
            rest //= p
        p += 1 if p == 2 else 2
    if rest > 1:
        primes[rest] = primes.get(rest, 0) + 1
    return Factorization(n, primes)


def prime_support(k: int) -> frozenset[int]:
    """Set of primes dividing k."""
    return factorize(k).support


@dataclass(frozen=True)
class DivisorLattice:
    """The divisors of ``n`` under divisibility, with Heyting connectives.

    Elements are kept ascending.  All connectives validate that their
    arguments divide ``n`` and raise :class:`NotADivisor` otherwise.
    """

    context: Factorization
    elements: tuple[int, ...]

    @property
    def n(self) -> int:
        return self.context.value

    @property
    def bottom(self) -> int:
        return 1

    @property
    def top(self) -> int:
        return self.n

    def __len__(self):
        return len(self.elements)

    def __iter__(self) -> Iterator[int]:
        return iter(self.elements)

    def __contains__(self, k) -> bool:
        return isinstance(k, int) and not isinstance(k, bool) and k >= 1 and self.n % k == 0

    @cached_property
    def index(self) -> dict[int, int]:
        return {d: i for i, d in enumerate(self.elements)}

    def check(self, *ks: int) -> None:
        for k in ks:
            if k not in self:
                raise NotADivisor(f"{k!r} is not a divisor of {self.n}")

    def meet(self, k: int, m: int) -> int:
        self.check(k, m)
        return math.gcd(k, m)

    def join(self, k: int, m: int) -> int:
        self.check(k, m)
        return math.lcm(k, m)

    def leq(self, k: int, m: int) -> bool:
        """Partial order: k precedes m iff k divides m."""
        self.check(k, m)
        return m % k == 0

    def negation(self, k: int) -> int:
        self.check(k)
        kp = prime_support(k)
        return math.prod(p**e for p, e in self.context.primes.items() if p not in kp)

    def double_negation(self, k: int) -> int:
        return self.negation(self.negation(k))

    def implication(self, k: int, m: int) -> int:
        """Relative pseudocomplement: the largest d with gcd(k, d) | m."""
        self.check(k, m)
        fk, fm = factorize(k), factorize(m)
        out = 1
        for p, e in self.context.primes.items():
            out *= p ** (e if fk.exponent(p) <= fm.exponent(p) else fm.exponent(p))
        return out

    def is_hall(self, r: int) -> bool:
        self.check(r)
        return math.gcd(r, self.n // r) == 1

    @cached_property
    def boolean_elements(self) -> tuple[int, ...]:
        return tuple(d for d in self.elements if math.gcd(d, self.n // d) == 1)

    @cached_property
    def covers(self) -> tuple[tuple[int, int], ...]:
        """Hasse diagram edges (lower, upper) with upper/lower prime."""
        primes = tuple(self.context.primes)
        return tuple(
            (d, d * p) for d in self.elements for p in primes if self.n % (d * p) == 0
        )

    @cached_property
    def chains(self) -> tuple[tuple[int, ...], ...]:
        """Maximal chains, each listed top-down (n, ..., 1), sorted descending."""
        up: dict[int, list[int]] = {d: [] for d in self.elements}
        for lo, hi in self.covers:
            up[lo].append(hi)
        found: list[tuple[int, ...]] = []

        def walk(path: list[int]) -> None:
            nxt = up[path[-1]]
            if not nxt:
                found.append(tuple(reversed(path)))
                return
            for hi in nxt:
                path.append(hi)
                walk(path)
                path.pop()

        walk([1])
        return tuple(sorted(found, reverse=True))


@lru_cache(maxsize=4096)
def divisors(n: int) -> DivisorLattice:
    f = factorize(n)
    elems = [1]
    for p, e in f.primes.items():
        elems = [d * p**j for d in elems for j in range(e + 1)]
    return DivisorLattice(f, tuple(sorted(elems)))


def meet(k: int, m: int, n: int) -> int:
    return divisors(n).meet(k, m)


def join(k: int, m: int, n: int) -> int:
    return divisors(n).join(k, m)


def negation(k: int, n: int) -> int:
    """Largest divisor of n coprime to k."""
    return divisors(n).negation(k)


def double_negation(k: int, n: int) -> int:
    return divisors(n).double_negation(k)


def implication(k: int, m: int, n: int) -> int:
    return divisors(n).implication(k, m)


def is_hall_divisor(r: int, n: int) -> bool:
    return divisors(n).is_hall(r)


def boolean_sublattice(n: int) -> tuple[int, ...]:
    """Hall divisors of n; a Boolean algebra under gcd/lcm/negation."""
    return divisors(n).boolean_elements


def maximal_chains(n: int) -> tuple[tuple[int, ...], ...]:
    return divisors(n).chains


def covering_edges(n: int) -> tuple[tuple[int, int], ...]:
    return divisors(n).covers


def embed_group(a: int, m: int, k: int) -> int:
    """Image of ``a`` in Z(m) under the inclusion Z(m) -> Z(k), a -> (k/m) a."""
    _check_positive(m)
    _check_positive(k)
    if k % m:
        raise NotADivisor(f"{m} does not divide {k}")
    if not 0 <= a < m:
        raise ValidationError(f"{a} is not an element of Z({m})")
    return (k // m) * a


@dataclass(frozen=True)
class SubgroupView:
    """Z(order) sitting inside Z(n) as the multiples of n/order."""

    n: int
    order: int

    def __post_init__(self):
        divisors(self.n).check(self.order)

    @property
    def step(self) -> int:
        return self.n // self.order

    @property
    def elements(self) -> tuple[int, ...]:
        return tuple(range(0, self.n, self.step))

    def __contains__(self, r: int) -> bool:
        return 0 <= r < self.n and r % self.step == 0

    def __len__(self):
        return self.order


def subgroup(m: int, n: int) -> SubgroupView:
    return SubgroupView(n, m)


def reduced_residues(m: int) -> tuple[int, ...]:
    """Units of Z(m).  Z(1) is the zero ring; by convention this returns (0,)."""
    _check_positive(m)
    if m == 1:
        return (0,)
    return tuple(a for a in range(1, m) if math.gcd(a, m) == 1)


def lattice_law_violations(n: int) -> list[str]:
    """Exhaustively test the lattice, Heyting and Boolean-sublattice laws on D(n).

    Returns a description of each violated law; empty when all hold.
    """
    lat = divisors(n)
    E = lat.elements
    bad: list[str] = []
    g, l = math.gcd, math.lcm
    for a in E:
        na, nna = lat.negation(a), lat.double_negation(a)
        if nna % a:
            bad.append(f"{a} does not precede its double negation {nna}")
        if g(a, na) != 1:
            bad.append(f"gcd({a}, not {a}) = {g(a, na)}")
        if n % l(a, na):
            bad.append(f"lcm({a}, not {a}) does not divide {n}")
        if lat.implication(a, 1) != na:
            bad.append(f"{a} -> 1 differs from not {a}")
        if max(d for d in E if g(a, d) == 1) != na:
            bad.append(f"not {a} is not the largest divisor coprime to {a}")
        if l(a, a) != a or g(a, a) != a:
            bad.append(f"idempotence fails at {a}")
        for b in E:
            if g(a, b) != g(b, a) or l(a, b) != l(b, a):
                bad.append(f"commutativity fails at ({a}, {b})")
            if g(a, l(a, b)) != a or l(a, g(a, b)) != a:
                bad.append(f"absorption fails at ({a}, {b})")
            imp = lat.implication(a, b)
            if max(d for d in E if b % g(a, d) == 0) != imp:
                bad.append(f"{a} -> {b} is not the largest d with gcd({a}, d) | {b}")
            for c in E:
                if g(a, g(b, c)) != g(g(a, b), c) or l(a, l(b, c)) != l(l(a, b), c):
                    bad.append(f"associativity fails at ({a}, {b}, {c})")
                if g(a, l(b, c)) != l(g(a, b), g(a, c)):
                    bad.append(f"distributivity fails at ({a}, {b}, {c})")
    B = set(lat.boolean_elements)
    if B != {d for d in E if g(d, n // d) == 1}:
        bad.append("boolean sublattice is not the set of Hall divisors")
    for a in B:
        na = lat.negation(a)
        if na not in B or lat.negation(na) != a or l(a, na) != n:
            bad.append(f"Boolean laws fail at Hall divisor {a}")
        for b in B:
            if g(a, b) not in B or l(a, b) not in B:
                bad.append(f"Hall divisors not closed at ({a}, {b})")
    return bad
