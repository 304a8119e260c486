"""Lower/upper probabilities on the divisor lattice and their verification.

``lower(m)`` is the weight of a state on the embedded subsystem of size m.
It is supermodular on the lattice; the defect ``sigma`` is exactly the
weight on the positions that the join adds beyond the two parts.  ``upper``
is the dual built from the negation, and ``dont_know`` is their gap.

:func:`verify_propositions` evaluates every structural identity and
inequality for one state and reports the worst slack of each.
"""

from __future__ import annotations

import csv
import io
import json
import math
from collections.abc import Callable, Iterable, Mapping
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import DimensionMismatch, MissingValue, NotADivisor
from .lattice import divisors, prime_support
from .quantum import (
    DensityMatrix,
    projector,
    projector_D,
    projector_S,
    projector_tilde,
    trace_against,
)

TOL = 1e-10


def _n(rho: DensityMatrix) -> int:
    return rho.dim


def lower(m: int, rho: DensityMatrix) -> float:
    return trace_against(rho, projector(m, _n(rho)))


def lower_tilde(m: int, rho: DensityMatrix) -> float:
    return trace_against(rho, projector_tilde(m, _n(rho)))


def sigma(m1: int, m2: int, rho: DensityMatrix) -> float:
    """Modularity defect of ``lower`` at (m1, m2)."""
    lat = divisors(_n(rho))
    return (
        lower(lat.join(m1, m2), rho)
        - lower(m1, rho)
        - lower(m2, rho)
        + lower(lat.meet(m1, m2), rho)
    )


def upper(m: int, rho: DensityMatrix) -> float:
    neg = divisors(_n(rho)).negation(m)
    return 1.0 - lower(neg, rho) + lower(1, rho)


def upper_tilde(m: int, rho: DensityMatrix) -> float:
    return upper(m, rho) - lower(1, rho)


def dont_know(m: int, rho: DensityMatrix) -> float:
    return trace_against(rho, projector_D(m, _n(rho)))


def negbar_lower(m: int, rho: DensityMatrix) -> float:
    """Analogue of the belief of the complement: lower_tilde(not m)."""
    return lower_tilde(divisors(_n(rho)).negation(m), rho)


def negbar_upper(m: int, rho: DensityMatrix) -> float:
    """Analogue of the plausibility of the complement: 1 - lower(not not m)."""
    return 1.0 - lower(divisors(_n(rho)).double_negation(m), rho)


def _lcm_of(A: Iterable[int], n: int) -> int | None:
    A = list(A)
    if not A:
        return None
    divisors(n).check(*A)
    return math.lcm(*A)


def capacity_lower(A: Iterable[int], rho: DensityMatrix) -> float:
    top = _lcm_of(A, _n(rho))
    return 0.0 if top is None else lower(top, rho)


def capacity_upper(A: Iterable[int], rho: DensityMatrix) -> float:
    top = _lcm_of(A, _n(rho))
    return 0.0 if top is None else upper(top, rho)


def added_value(m: int, k: int, rho: DensityMatrix) -> float:
    """Gain in lower probability when subsystem m merges with k."""
    return lower(divisors(_n(rho)).join(m, k), rho) - lower(k, rho)


# ------------------------------------------------------ generic lattice functions


def _domain(f: Mapping[int, float]) -> int:
    if not f:
        raise MissingValue("function has no values")
    n = max(f)
    missing = [d for d in divisors(n) if d not in f]
    if missing:
        raise MissingValue(f"function is missing values at divisors {missing} of {n}")
    return n


def modularity_defect(f: Mapping[int, float], m1: int, m2: int) -> float:
    """f(m1 v m2) - f(m1) - f(m2) + f(m1 ^ m2) for f given on all divisors of max(f)."""
    lat = divisors(_domain(f))
    return f[lat.join(m1, m2)] - f[m1] - f[m2] + f[lat.meet(m1, m2)]


def classify(f: Mapping[int, float], tol: float = TOL) -> str:
    """'modular', 'supermodular', 'submodular' or 'neither'."""
    elems = divisors(_domain(f)).elements
    defects = [modularity_defect(f, a, b) for i, a in enumerate(elems) for b in elems[i + 1 :]]
    lo, hi = min(defects, default=0.0), max(defects, default=0.0)
    if lo >= -tol and hi <= tol:
        return "modular"
    if lo >= -tol:
        return "supermodular"
    if hi <= tol:
        return "submodular"
    return "neither"


def as_function(g: Callable[[int, DensityMatrix], float], rho: DensityMatrix) -> dict[int, float]:
    """Tabulate ``g(m, rho)`` over every divisor of rho's dimension."""
    return {m: g(m, rho) for m in divisors(_n(rho))}


# ------------------------------------------------------------ vectorised tables


@dataclass(frozen=True, eq=False)
class _Tables:
    """Index bookkeeping for one n, shared by every state of that dimension."""

    n: int
    elems: tuple[int, ...]
    P: np.ndarray  # (k, n) 0/1 rows: support of P(m)
    S: np.ndarray  # (k*k, n) 0/1 rows: support of S(m1, m2)
    D: np.ndarray  # (k, n) 0/1 rows: support of D(m)
    join: np.ndarray  # (k, k) index of lcm
    meet: np.ndarray  # (k, k) index of gcd
    neg: np.ndarray  # (k,) index of negation
    leq: np.ndarray  # (k, k) bool, i divides j
    full_support: np.ndarray  # (k,) bool, m has every prime of n


@lru_cache(maxsize=512)
def _tables(n: int) -> _Tables:
    lat = divisors(n)
    elems = lat.elements
    k = len(elems)
    ix = lat.index

    def rows(supports):
        out = np.zeros((len(supports), n))
        for i, s in enumerate(supports):
            out[i, s.index_array] = 1.0
        return out

    P = rows([projector(m, n) for m in elems])
    S = rows([projector_S(a, b, n) for a in elems for b in elems])
    D = rows([projector_D(m, n) for m in elems])
    join = np.array([[ix[math.lcm(a, b)] for b in elems] for a in elems])
    meet = np.array([[ix[math.gcd(a, b)] for b in elems] for a in elems])
    neg = np.array([ix[lat.negation(a)] for a in elems])
    leq = np.array([[b % a == 0 for b in elems] for a in elems])
    nsupp = prime_support(n)
    full = np.array([prime_support(a) == nsupp for a in elems])
    for arr in (P, S, D, join, meet, neg, leq, full):
        arr.setflags(write=False)
    return _Tables(n, elems, P, S, D, join, meet, neg, leq, full)


# -------------------------------------------------------------------- checking


@dataclass(frozen=True)
class CheckResult:
    passed: bool
    worst_slack: float

    def to_json(self) -> dict:
        return {"pass": self.passed, "worst_slack": self.worst_slack}


def _ineq(slacks, tol: float) -> CheckResult:
    """Pass iff every slack (rhs - lhs of lhs <= rhs) is >= -tol."""
    s = np.asarray(slacks, dtype=float).ravel()
    worst = float(s.min()) if s.size else 0.0
    return CheckResult(worst >= -tol, worst)


def _eq(diffs, tol: float) -> CheckResult:
    """Identity check; slack is minus the largest absolute deviation."""
    d = np.asarray(diffs, dtype=float).ravel()
    worst = -float(np.abs(d).max()) if d.size else 0.0
    return CheckResult(worst >= -tol, worst)


CHECK_NAMES = (
    "boundary_values",
    "lower_monotone",
    "upper_monotone",
    "lower_upper_order",
    "supermodularity",
    "sigma_trace_identity",
    "chain_modularity",
    "dont_know_trace",
    "negation_chain",
    "upper_defect_identity",
    "submodularity_upper",
    "complement_sandwich",
    "upper_double_negation",
    "upper_negation_difference",
    "double_negation_gain",
    "intermediate_sandwich",
    "full_support_upper_one",
)


@dataclass(frozen=True, eq=False)
class Evaluation:
    """Every per-divisor and pairwise quantity for one state, as arrays
    indexed by position in the ascending divisor list."""

    n: int
    elems: tuple[int, ...]
    l: np.ndarray
    lt: np.ndarray
    u: np.ndarray
    ut: np.ndarray
    d: np.ndarray
    d_trace: np.ndarray
    lbar: np.ndarray
    ubar: np.ndarray
    sigma: np.ndarray  # from lower values
    sigma_trace: np.ndarray  # Tr[rho S]
    upper_defect: np.ndarray  # modularity defect of u


def evaluate(rho: DensityMatrix, n: int | None = None) -> Evaluation:
    if n is not None and n != rho.dim:
        raise DimensionMismatch(f"state has dimension {rho.dim}, expected {n}")
    t = _tables(rho.dim)
    diag = rho.diagonal
    k = len(t.elems)
    l = t.P @ diag
    l1 = l[0]
    lt = l - l1
    u = 1.0 - l[t.neg] + l1
    ut = u - l1
    sig = l[t.join] - l[:, None] - l[None, :] + l[t.meet]
    udef = u[t.join] - u[:, None] - u[None, :] + u[t.meet]
    return Evaluation(
        n=rho.dim,
        elems=t.elems,
        l=l,
        lt=lt,
        u=u,
        ut=ut,
        d=u - l,
        d_trace=t.D @ diag,
        lbar=lt[t.neg],
        ubar=1.0 - l[t.neg[t.neg]],
        sigma=sig,
        sigma_trace=(t.S @ diag).reshape(k, k),
        upper_defect=udef,
    )


def check_evaluation(ev: Evaluation, tol: float = TOL) -> dict[str, CheckResult]:
    t = _tables(ev.n)
    l, u, lt = ev.l, ev.u, ev.lt
    neg = t.neg
    nn = neg[neg]
    top = len(t.elems) - 1
    leq = t.leq
    out: dict[str, CheckResult] = {}

    out["boundary_values"] = _eq([u[0] - l[0], l[top] - 1.0, u[top] - 1.0], tol)
    out["lower_monotone"] = _ineq((l[None, :] - l[:, None])[leq], tol)
    out["upper_monotone"] = _ineq((u[None, :] - u[:, None])[leq], tol)
    out["lower_upper_order"] = _ineq(np.concatenate([l, u - l, 1.0 - u]), tol)
    out["supermodularity"] = _ineq(ev.sigma, tol)
    out["sigma_trace_identity"] = _eq(ev.sigma - ev.sigma_trace, tol)
    # comparable pairs: the S support is empty, so the defect is exactly zero
    comparable = leq | leq.T
    out["chain_modularity"] = _eq(ev.sigma_trace[comparable], 0.0)
    out["dont_know_trace"] = _eq(ev.d - ev.d_trace, tol)
    first = (l[nn] + lt[neg]) - (l + lt[neg])
    second = 1.0 - (l[nn] + lt[neg])
    out["negation_chain"] = _ineq(np.concatenate([first, second]), tol)
    neg_sigma = ev.sigma_trace[np.ix_(neg, neg)]
    out["upper_defect_identity"] = _eq(ev.upper_defect + neg_sigma, tol)
    out["submodularity_upper"] = _ineq(-ev.upper_defect, tol)
    out["complement_sandwich"] = _ineq(np.concatenate([1.0 - l - ev.lbar, u + ev.ubar - 1.0]), tol)
    out["upper_double_negation"] = _eq(u[nn] - u, tol)
    out["upper_negation_difference"] = _eq((u - u[neg]) - (l[nn] - l[neg]), tol)
    out["double_negation_gain"] = _ineq(l[nn] - l, tol)
    sand = []
    for i in range(len(t.elems)):
        ks = np.nonzero(leq[i] & leq[:, nn[i]])[0]
        sand.append(l[ks] - l[i])
        sand.append(u[i] - l[ks])
    out["intermediate_sandwich"] = _ineq(np.concatenate(sand), tol)
    out["full_support_upper_one"] = _eq(u[t.full_support] - 1.0, tol)
    return out


def verify_propositions(rho: DensityMatrix, n: int | None = None, tol: float = TOL) -> dict[str, CheckResult]:
    return check_evaluation(evaluate(rho, n), tol)


# ---------------------------------------------------------------------- report


@dataclass
class ProbabilityReport:
    n: int
    rows: list[dict]
    sigma: list[list[float]]
    upper_defect: list[list[float]]
    checks: dict[str, CheckResult] = field(default_factory=dict)

    @property
    def divisors(self) -> list[int]:
        return [r["m"] for r in self.rows]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks.values())

    def row(self, m: int) -> dict:
        for r in self.rows:
            if r["m"] == m:
                return r
        raise NotADivisor(f"{m} is not a divisor of {self.n}")

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "rows": self.rows,
            "sigma": self.sigma,
            "upper_defect": self.upper_defect,
            "checks": {k: v.to_json() for k, v in self.checks.items()},
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)

    @classmethod
    def from_json(cls, obj: dict) -> "ProbabilityReport":
        return cls(
            n=obj["n"],
            rows=[dict(r) for r in obj["rows"]],
            sigma=[list(r) for r in obj["sigma"]],
            upper_defect=[list(r) for r in obj.get("upper_defect", [])],
            checks={
                k: CheckResult(bool(v["pass"]), float(v["worst_slack"]))
                for k, v in obj.get("checks", {}).items()
            },
        )

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=list(ROW_KEYS), lineterminator="\n")
        w.writeheader()
        for r in self.rows:
            w.writerow({k: repr(r[k]) if isinstance(r[k], float) else r[k] for k in ROW_KEYS})
        return buf.getvalue()

    def to_table(self) -> str:
        lines = [f"n = {self.n}"]
        head = ["m", "l", "l~", "u", "u~", "d", "lbar", "ubar"]
        lines.append("".join(f"{h:>12}" for h in head))
        for r in self.rows:
            vals = [r[k] for k in ROW_KEYS]
            lines.append(f"{vals[0]:>12}" + "".join(f"{v:>12.6f}" for v in vals[1:]))
        ms = self.divisors
        lines.append("")
        lines.append("sigma(m1, m2)")
        lines.append(" " * 8 + "".join(f"{m:>12}" for m in ms))
        for m, row in zip(ms, self.sigma):
            lines.append(f"{m:>8}" + "".join(f"{v:>12.6f}" for v in row))
        if self.checks:
            lines.append("")
            lines.append("checks")
            for name, c in self.checks.items():
                lines.append(f"  {'PASS' if c.passed else 'FAIL'}  {name:<24} worst slack {c.worst_slack:+.3e}")
        return "\n".join(lines) + "\n"


ROW_KEYS = ("m", "l", "lt", "u", "ut", "d", "lbar", "ubar")


def probability_report(rho: DensityMatrix, tol: float = TOL) -> ProbabilityReport:
    ev = evaluate(rho)
    rows = [
        {
            "m": m,
            "l": float(ev.l[i]),
            "lt": float(ev.lt[i]),
            "u": float(ev.u[i]),
            "ut": float(ev.ut[i]),
            "d": float(ev.d[i]),
            "lbar": float(ev.lbar[i]),
            "ubar": float(ev.ubar[i]),
        }
        for i, m in enumerate(ev.elems)
    ]
    return ProbabilityReport(
        n=ev.n,
        rows=rows,
        sigma=ev.sigma.tolist(),
        upper_defect=ev.upper_defect.tolist(),
        checks=check_evaluation(ev, tol),
    )
