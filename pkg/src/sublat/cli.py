"""Command-line interface.

Exit codes: 0 success, 1 bad input (usage, file, validation), 2 a
mathematical check failed.  Payload goes to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import dempster, lattice, measures, quantum, sampling
from .errors import ValidationError

EXIT_OK, EXIT_INPUT, EXIT_CHECK = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _default_seed() -> int:
    raw = os.environ.get("SUBLAT_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise ValidationError(f"SUBLAT_SEED must be an integer, got {raw!r}") from None


def _dump(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


# --------------------------------------------------------------------- lattice


def lattice_payload(n: int) -> dict:
    lat = lattice.divisors(n)
    return {
        "n": n,
        "factorization": {str(p): e for p, e in lat.context.primes.items()},
        "divisors": list(lat.elements),
        "edges": [list(e) for e in lat.covers],
        "negation": {str(m): lat.negation(m) for m in lat},
        "double_negation": {str(m): lat.double_negation(m) for m in lat},
        "boolean_sublattice": list(lat.boolean_elements),
        "maximal_chains": [list(c) for c in lat.chains],
    }


def cmd_lattice(args) -> tuple[int, str]:
    p = lattice_payload(args.n)
    if args.format == "json":
        return EXIT_OK, _dump(p)
    hall = set(p["boolean_sublattice"])
    rows = [[m, p["negation"][str(m)], p["double_negation"][str(m)], int(m in hall)] for m in p["divisors"]]
    if args.format == "csv":
        return EXIT_OK, _csv(["m", "negation", "double_negation", "hall"], rows)
    fac = lattice.factorize(args.n)
    out = [f"n = {args.n} = {fac}", f"{len(rows)} divisors", ""]
    out.append(f"{'m':>8}{'not m':>10}{'not not m':>12}{'hall':>6}")
    out += [f"{m:>8}{a:>10}{b:>12}{'yes' if h else '':>6}" for m, a, b, h in rows]
    out.append("")
    out.append("covering edges: " + ", ".join(f"{a}<{b}" for a, b in p["edges"]))
    out.append("boolean sublattice: {" + ", ".join(map(str, p["boolean_sublattice"])) + "}")
    out.append(f"maximal chains ({len(p['maximal_chains'])}):")
    out += ["  " + " > ".join(map(str, c)) for c in p["maximal_chains"]]
    return EXIT_OK, "\n".join(out) + "\n"


# --------------------------------------------------------------- probabilities


def _resolve_rho(args) -> quantum.DensityMatrix:
    if args.rho is not None:
        rho = quantum.load_density(args.rho)
    elif args.mixed:
        rho = quantum.maximally_mixed(args.n)
    elif args.vacuum:
        rho = quantum.vacuum(args.n)
    elif args.random_seed is not None:
        rho = quantum.random_density(args.n, np.random.default_rng(args.random_seed))
    else:
        raise ValidationError("give a state with --rho FILE, --mixed, --vacuum or --random-seed S")
    if rho.dim != args.n:
        raise ValidationError(f"state has dimension {rho.dim} but --n is {args.n}")
    return rho


def cmd_probabilities(args) -> tuple[int, str]:
    report = measures.probability_report(_resolve_rho(args))
    text = {"json": lambda: report.dumps() + "\n", "csv": report.to_csv, "table": report.to_table}[args.format]()
    return (EXIT_OK if report.passed else EXIT_CHECK), text


# ---------------------------------------------------------------------- sample


def sample_payload(rho, shots: int, seed: int, m: int, k: int | None) -> dict:
    rec = sampling.simulate(rho, shots, seed)
    est = {
        "lower": sampling.estimate_lower(rec, m),
        "upper": sampling.estimate_upper(rec, m),
        "dont_know": sampling.estimate_dont_know(rec, m),
    }
    exact = {
        "lower": measures.lower(m, rho),
        "upper": measures.upper(m, rho),
        "dont_know": measures.dont_know(m, rho),
    }
    if k is not None:
        est["intermediate"] = sampling.estimate_intermediate(rec, m, k)
        exact["intermediate"] = measures.lower(k, rho)
    bands = {key: sampling.binomial_band(v, shots) for key, v in exact.items()}
    within = {key: abs(est[key] - exact[key]) <= bands[key] for key in exact}
    return {
        "n": rho.dim,
        "m": m,
        "k": k,
        "shots": shots,
        "record": rec.to_json(),
        "estimates": est,
        "exact": exact,
        "band_5sigma": bands,
        "within_band": within,
    }


def cmd_sample(args) -> tuple[int, str]:
    rho = _resolve_rho(args)
    seed = args.seed if args.seed is not None else _default_seed()
    p = sample_payload(rho, args.shots, seed, args.m, args.k)
    keys = list(p["exact"])
    if args.format == "json":
        return EXIT_OK, _dump(p)
    if args.format == "csv":
        rows = [[q, repr(p["estimates"][q]), repr(p["exact"][q]), repr(p["band_5sigma"][q])] for q in keys]
        return EXIT_OK, _csv(["quantity", "estimate", "exact", "band_5sigma"], rows)
    out = [f"n = {p['n']}, m = {p['m']}, shots = {p['shots']}, seed = {seed} ({p['record']['algorithm']})"]
    out.append(f"{'quantity':<14}{'estimate':>12}{'exact':>12}{'5 sigma':>12}")
    for q in keys:
        out.append(f"{q:<14}{p['estimates'][q]:>12.6f}{p['exact'][q]:>12.6f}{p['band_5sigma'][q]:>12.6f}")
    return EXIT_OK, "\n".join(out) + "\n"


# -------------------------------------------------------------------------- ds


def ds_payload(evidence: dempster.Evidence, specs: list[str]) -> dict:
    queries = []
    for spec in specs:
        A = dempster.parse_set_spec(spec)
        n1, n2, n3 = dempster.categorize(evidence, A)
        queries.append(
            {
                "set": spec,
                "belief": str(dempster.belief(evidence, A)),
                "plausibility": str(dempster.plausibility(evidence, A)),
                "categories": [n1, n2, n3],
            }
        )
    return {"sources": len(evidence), "queries": queries}


def cmd_ds(args) -> tuple[int, str]:
    if args.evidence is None:
        from . import data_path

        evidence = dempster.load_evidence(data_path("table1.json"))
    else:
        evidence = dempster.load_evidence(args.evidence)
    p = ds_payload(evidence, args.set or [])
    if args.format == "json":
        return EXIT_OK, _dump(p)
    rows = [[q["set"], q["belief"], q["plausibility"], *q["categories"]] for q in p["queries"]]
    header = ["set", "belief", "plausibility", "inside", "straddling", "outside"]
    if args.format == "csv":
        return EXIT_OK, _csv(header, rows)
    out = [f"{'set':<14}{'belief':>10}{'plaus.':>10}{'n1':>5}{'n2':>5}{'n3':>5}"]
    out += [f"{r[0]:<14}{r[1]:>10}{r[2]:>10}{r[3]:>5}{r[4]:>5}{r[5]:>5}" for r in rows]
    return EXIT_OK, "\n".join(out) + "\n"


# ----------------------------------------------------------------------- check


def check_one(n: int, trials: int, seed: int) -> dict:
    """All checks for a single n; worst slack per proposition over ``trials`` states."""
    seen: dict[str, list[measures.CheckResult]] = {}
    for t in range(trials):
        rho = quantum.random_density(n, np.random.default_rng([seed, n, t]))
        for name, res in measures.verify_propositions(rho).items():
            seen.setdefault(name, []).append(res)
    worst = {
        name: measures.CheckResult(all(r.passed for r in rs), min(r.worst_slack for r in rs))
        for name, rs in seen.items()
    }
    return {
        "n": n,
        "lattice_laws": lattice.lattice_law_violations(n),
        "projector_identities": quantum.projector_identity_violations(n),
        "propositions": worst,
    }


def check_payload(n_max: int, trials: int, seed: int, jobs: int = 1) -> dict:
    ns = list(range(1, n_max + 1))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            cells = list(pool.map(check_one, ns, [trials] * len(ns), [seed] * len(ns)))
    else:
        cells = [check_one(n, trials, seed) for n in ns]

    checks: dict[str, dict] = {}
    lat_bad = [f"n={c['n']}: {msg}" for c in cells for msg in c["lattice_laws"]]
    proj_bad = [f"n={c['n']}: {msg}" for c in cells for msg in c["projector_identities"]]
    checks["lattice_laws"] = {"pass": not lat_bad, "violations": lat_bad[:20]}
    checks["projector_identities"] = {"pass": not proj_bad, "violations": proj_bad[:20]}
    for name in measures.CHECK_NAMES:
        results = [(c["n"], c["propositions"][name]) for c in cells if name in c["propositions"]]
        n_worst, r_worst = min(results, key=lambda nr: nr[1].worst_slack)
        checks[name] = {
            "pass": all(r.passed for _, r in results),
            "worst_slack": r_worst.worst_slack,
            "worst_n": n_worst,
        }
    return {
        "n_max": n_max,
        "trials": trials,
        "seed": seed,
        "passed": all(c["pass"] for c in checks.values()),
        "checks": checks,
    }


def cmd_check(args) -> tuple[int, str]:
    if args.n_max < 2:
        raise ValidationError("--n-max must be at least 2")
    if args.trials < 1:
        raise ValidationError("--trials must be at least 1")
    seed = args.seed if args.seed is not None else _default_seed()
    jobs = args.jobs if args.jobs is not None else (os.cpu_count() or 1)
    p = check_payload(args.n_max, args.trials, seed, jobs)
    code = EXIT_OK if p["passed"] else EXIT_CHECK
    if args.format == "json":
        return code, _dump(p)
    rows = [[k, int(v["pass"]), repr(v.get("worst_slack", ""))] for k, v in p["checks"].items()]
    if args.format == "csv":
        return code, _csv(["check", "pass", "worst_slack"], rows)
    out = [f"n <= {p['n_max']}, {p['trials']} random states per n, seed {p['seed']}"]
    for k, v in p["checks"].items():
        slack = f"worst slack {v['worst_slack']:+.3e} (n={v['worst_n']})" if "worst_slack" in v else ""
        out.append(f"  {'PASS' if v['pass'] else 'FAIL'}  {k:<24} {slack}")
        for msg in v.get("violations", [])[:5]:
            out.append(f"        {msg}")
    out.append("all checks passed" if p["passed"] else "SOME CHECKS FAILED")
    return code, "\n".join(out) + "\n"


# ------------------------------------------------------------------------ main


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sublat", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    fmt = dict(choices=["json", "csv", "table"], default="table")

    p = sub.add_parser("lattice", help="divisor lattice, negations, Hall divisors, maximal chains")
    p.add_argument("n", type=int)
    p.add_argument("--format", **fmt)
    p.set_defaults(func=cmd_lattice)

    def state_args(p):
        p.add_argument("--n", type=int, required=True)
        g = p.add_mutually_exclusive_group()
        g.add_argument("--rho", metavar="FILE", help="density-matrix JSON file")
        g.add_argument("--mixed", action="store_true", help="maximally mixed state")
        g.add_argument("--vacuum", action="store_true", help="pure position-0 state")
        g.add_argument("--random-seed", type=int, metavar="S", help="seeded random full-rank state")
        p.add_argument("--format", **fmt)

    p = sub.add_parser("probabilities", help="lower/upper probability report with proposition checks")
    state_args(p)
    p.set_defaults(func=cmd_probabilities)

    p = sub.add_parser("sample", help="simulate the position measurement and estimate l, u, d")
    state_args(p)
    p.add_argument("--shots", type=int, default=100_000)
    p.add_argument("--seed", type=int, help="RNG seed (default: $SUBLAT_SEED or 0)")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--k", type=int, help="intermediate divisor with m | k | not-not-m")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("ds", help="classical belief/plausibility for query sets")
    p.add_argument("--evidence", metavar="FILE", help="evidence JSON (default: bundled table1.json)")
    p.add_argument("--set", action="append", metavar="SPEC", help='query set, e.g. "60..69" or "1,5,9"')
    p.add_argument("--format", **fmt)
    p.set_defaults(func=cmd_ds)

    p = sub.add_parser("check", help="sweep lattice, projector and proposition checks over n")
    p.add_argument("--n-max", type=int, default=60)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--seed", type=int, help="RNG seed (default: $SUBLAT_SEED or 0)")
    p.add_argument("--jobs", type=int, help="worker processes (default: CPU count)")
    p.add_argument("--format", **fmt)
    p.set_defaults(func=cmd_check)
    return parser


def run(argv=None) -> tuple[int, str]:
    """Parse and execute; returns (exit code, stdout payload)."""
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return (exc.code if isinstance(exc.code, int) else EXIT_INPUT), ""
    try:
        return args.func(args)
    except (ValidationError, OSError) as exc:
        print(f"sublat: error: {exc}", file=sys.stderr)
        return EXIT_INPUT, ""


def main(argv=None) -> int:
    code, text = run(argv)
    sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
