import itertools
import math

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from sublat.errors import MissingValue, NotADivisor
from sublat.lattice import divisors, double_negation, negation
from sublat.measures import (
    CHECK_NAMES,
    ProbabilityReport,
    added_value,
    as_function,
    capacity_lower,
    capacity_upper,
    classify,
    dont_know,
    evaluate,
    lower,
    lower_tilde,
    modularity_defect,
    negbar_lower,
    negbar_upper,
    probability_report,
    sigma,
    upper,
    upper_tilde,
    verify_propositions,
)
from sublat.quantum import (
    maximally_mixed,
    projector_D,
    projector_S,
    random_density,
    trace_against,
    vacuum,
)

TOL = 1e-12


def S(a, idx):
    return float(sum(a[i] for i in idx))


def test_lower_examples(rho18, a18):
    assert abs(lower(2, rho18) - S(a18, [0, 9])) < TOL
    assert abs(lower(18, rho18) - 1) < TOL
    mm = maximally_mixed(12)
    for m in divisors(12):
        assert abs(lower(m, mm) - m / 12) < TOL
    assert abs(lower_tilde(2, rho18) - S(a18, [9])) < TOL


def test_sigma_closed_forms(rho18, a18):
    assert abs(sigma(9, 6, rho18) - S(a18, [1, 5, 7, 11, 13, 17])) < TOL
    assert abs(sigma(9, 2, rho18) - S(a18, [1, 3, 5, 7, 11, 13, 15, 17])) < TOL
    assert abs(sigma(2, 3, rho18) - S(a18, [3, 15])) < TOL
    for m in divisors(18):
        assert abs(sigma(1, m, rho18)) < TOL
        assert abs(sigma(18, m, rho18)) < TOL


def test_upper_examples(rho18, a18):
    assert abs(upper(6, rho18) - 1) < TOL
    assert abs(upper(9, rho18) - S(a18, [v for v in range(18) if v != 9])) < TOL
    assert abs(upper_tilde(1, rho18)) < TOL
    assert abs(upper(1, rho18) - lower(1, rho18)) < TOL


def test_dont_know_examples(rho18, a18):
    assert dont_know(18, rho18) == 0
    assert abs(dont_know(2, rho18) - S(a18, [1, 3, 5, 7, 11, 13, 15, 17])) < TOL
    v = vacuum(36)
    for m in divisors(36):
        assert dont_know(m, v) == 0
        assert lower(m, v) == upper(m, v) == 1


def test_negbar(rho18, a18):
    assert abs(negbar_lower(2, rho18) - S(a18, range(2, 18, 2))) < TOL
    assert negbar_lower(18, rho18) == 0
    for m in divisors(18):
        assert lower(m, rho18) + negbar_lower(m, rho18) <= 1 + 1e-12
        assert upper(m, rho18) + negbar_upper(m, rho18) >= 1 - 1e-12


def test_capacities(rho18):
    assert capacity_lower({2, 3}, rho18) == lower(6, rho18)
    assert capacity_upper({2, 3}, rho18) == upper(6, rho18)
    assert capacity_lower(set(), rho18) == capacity_upper([], rho18) == 0
    assert capacity_lower({9}, rho18) == lower(9, rho18)
    with pytest.raises(NotADivisor):
        capacity_lower({4}, rho18)


def test_capacity_monotone_exhaustive(rho18, rng):
    D = list(divisors(18))
    subsets = [frozenset(c) for r in range(4) for c in itertools.combinations(D, r)]
    for rho in (rho18, random_density(18, rng)):
        lo = {A: capacity_lower(A, rho) for A in subsets}
        up = {A: capacity_upper(A, rho) for A in subsets}
        for A in subsets:
            for B in subsets:
                if A <= B:
                    assert lo[A] <= lo[B] + 1e-12
                    assert up[A] <= up[B] + 1e-12


def test_added_value(rho18, a18):
    assert abs(added_value(2, 3, rho18) - S(a18, [3, 9, 15])) < TOL
    assert abs(added_value(2, 3, rho18) - lower_tilde(2, rho18) - S(a18, [3, 15])) < TOL
    for m in divisors(36):
        for k in divisors(36):
            if k % m == 0:
                assert added_value(m, k, maximally_mixed(36)) == 0


def test_added_value_measures_modularity_defect(rng):
    for n in (18, 30, 36, 60):
        rho = random_density(n, rng)
        f = as_function(lower, rho)
        for m in divisors(n):
            for k in divisors(n):
                g = math.gcd(m, k)
                # L(m; k^m) = l(m) - l(k^m) since m v (k^m) = m
                assert abs(added_value(m, g, rho) - (f[m] - f[g])) < 1e-12
                diff = added_value(m, k, rho) - added_value(m, g, rho)
                assert abs(diff - modularity_defect(f, m, k)) < 1e-10


def test_added_value_sum_is_not_the_defect(rho18):
    """With a plus sign the combination is not the modularity defect: at
    (m, k) = (2, 1) the defect vanishes but the sum is 2 (l(2) - l(1))."""
    f = as_function(lower, rho18)
    total = added_value(2, 1, rho18) + added_value(2, 1, rho18)
    assert modularity_defect(f, 2, 1) == 0
    assert abs(total - 2 * (f[2] - f[1])) < 1e-15 and total > 0.1


def test_classify(rho18, rng):
    assert classify(as_function(lower, rho18)) == "supermodular"
    assert classify(as_function(upper, rho18)) == "submodular"
    assert classify({d: 0.3 for d in divisors(18)}) == "modular"
    assert classify({d: float(d) for d in divisors(7)}) == "modular"
    mixed = {d: 0.0 for d in divisors(6)}
    mixed[6] = 1.0
    assert classify(mixed) == "supermodular"
    neither = {d: 0.0 for d in divisors(30)}
    neither[6], neither[30] = 1.0, -1.0
    assert classify(neither) == "neither"
    with pytest.raises(MissingValue):
        classify({1: 0.0, 18: 1.0})


def test_modularity_defect_zero_on_comparable():
    f = {d: math.sin(d) for d in divisors(72)}
    for a in divisors(72):
        for b in divisors(72):
            if b % a == 0 or a in (1, 72):
                assert modularity_defect(f, a, b) == 0 or abs(modularity_defect(f, a, b)) < 1e-15


def test_sigma_equals_S_trace_and_duality(rng):
    for n in (12, 18, 30, 36, 48, 60, 72, 90):
        rho = random_density(n, rng)
        for a in divisors(n):
            assert abs(upper(a, rho) - lower(a, rho) - trace_against(rho, projector_D(a, n))) < 1e-10
            assert upper(double_negation(a, n), rho) == upper(a, rho)
            for b in divisors(n):
                s = sigma(a, b, rho)
                assert s >= -1e-10
                assert abs(s - trace_against(rho, projector_S(a, b, n))) < 1e-10
                if b % a == 0:
                    assert trace_against(rho, projector_S(a, b, n)) == 0


def test_vectorised_route_matches_scalar_route(rng):
    for n in (18, 60, 144):
        rho = random_density(n, rng)
        ev = evaluate(rho)
        for i, m in enumerate(ev.elems):
            assert abs(ev.l[i] - lower(m, rho)) < 1e-13
            assert abs(ev.u[i] - upper(m, rho)) < 1e-13
            assert abs(ev.d_trace[i] - dont_know(m, rho)) < 1e-13
            assert abs(ev.lbar[i] - negbar_lower(m, rho)) < 1e-13
            assert abs(ev.ubar[i] - negbar_upper(m, rho)) < 1e-13
            for j, k in enumerate(ev.elems):
                assert abs(ev.sigma[i, j] - sigma(m, k, rho)) < 1e-13


def test_verify_18(rho18):
    checks = verify_propositions(rho18)
    assert set(checks) == set(CHECK_NAMES)
    assert all(c.passed for c in checks.values())
    assert upper(6, rho18) == 1 and upper(18, rho18) == 1


def test_prime_dimension_is_modular(rng):
    rho = random_density(13, rng)
    ev = evaluate(rho)
    assert np.all(ev.sigma_trace == 0)
    assert np.max(np.abs(ev.sigma)) < 1e-15
    assert classify(as_function(lower, rho)) == "modular"


def test_literal_negation_difference_fails_but_corrected_form_holds(rho18):
    """l(nn m) - l(m) = u(m) - u(not m) does not hold as printed; the
    right side equals l(nn m) - l(not m)."""
    m, n = 3, 18
    nm, nnm = negation(m, n), double_negation(m, n)
    printed = (lower(nnm, rho18) - lower(m, rho18)) - (upper(m, rho18) - upper(nm, rho18))
    corrected = (lower(nnm, rho18) - lower(nm, rho18)) - (upper(m, rho18) - upper(nm, rho18))
    assert abs(printed) > 1e-3
    assert abs(corrected) < 1e-12


def test_verify_detects_a_broken_state():
    """A hand-made 'state' whose diagonal is not a distribution trips the checks."""
    from sublat.quantum import DensityMatrix

    bad = DensityMatrix(np.diag([0.5, -0.4, 0.9, 0.0]).astype(complex))
    checks = verify_propositions(bad)
    assert not all(c.passed for c in checks.values())


def test_report_roundtrip_and_formats(rho18):
    rep = probability_report(rho18)
    again = ProbabilityReport.from_json(rep.to_json())
    assert again == rep
    import json

    assert ProbabilityReport.from_json(json.loads(rep.dumps())) == rep
    csv_lines = rep.to_csv().strip().splitlines()
    assert csv_lines[0] == "m,l,lt,u,ut,d,lbar,ubar"
    assert len(csv_lines) == 7
    assert float(csv_lines[2].split(",")[1]) == rep.row(2)["l"]
    assert "PASS" in rep.to_table()
    for r in rep.rows:
        assert 0 <= r["l"] <= r["u"] + 1e-12 <= 1 + 1e-12
        assert abs(r["d"] - (r["u"] - r["l"])) < 1e-15
    assert rep.row(1)["l"] == rep.row(1)["u"]
    assert rep.row(18)["l"] == rep.row(18)["u"] == 1


densities = st.builds(
    lambda n, seed: random_density(n, np.random.default_rng(seed)),
    st.integers(min_value=1, max_value=120),
    st.integers(min_value=0, max_value=2**32),
)


@settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(densities)
def test_propositions_hold_for_random_states(rho):
    for name, res in verify_propositions(rho).items():
        assert res.passed, (name, rho.dim, res.worst_slack)
