"""Command-line front end: verification suites, exports, simulation.

Exit codes: 0 when every non-informational check passes, 1 on a
verification failure, 2 on usage errors.  Reports are JSON, written to
stdout or to --out.  QLATTICE_THREADS caps the number of checks run
concurrently inside a suite.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

from . import asep, central, classical, hamiltonian, pairing, processes, qgroup
from .exactq import QMatrix, QQ, RationalFunction, write_matrix_json

PASS, FAIL, INFO = "pass", "fail", "info"


def _check(name, fn, informational=False):
    start = time.time()
    try:
        ok, detail = fn()
    except Exception as exc:  # surfaced in the report rather than a traceback
        ok, detail = False, f"error: {exc}"
    if ok:
        status = PASS
    elif informational:
        status = INFO
        detail = f"mismatch (informational): {detail}"
    else:
        status = FAIL
    return {"name": name, "status": status,
            "detail": detail, "seconds": round(time.time() - start, 3)}


def _run_checks(checks, threads: int):
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(lambda c: _check(*c[:2], **c[2]), checks))
    return [_check(*c[:2], **c[2]) for c in checks]


def _suite_report(suite: str, results: list[dict], extra: dict | None = None) -> dict:
    passed = all(r["status"] != FAIL for r in results)
    report = {"suite": suite, "passed": passed, "checks": results}
    if extra:
        report.update(extra)
    return report


def _emit(report: dict, out: str | None) -> None:
    text = json.dumps(report, indent=2, default=str)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("QLATTICE_THREADS", "1")))
    except ValueError:
        return 1


# ---------------------------------------------------------------------------
# Suites
# ---------------------------------------------------------------------------

def pairing_suite(n: int = 4) -> dict:
    def golden_dual():
        d = pairing.dual_element((2, 3), 4)
        r = QQ.q_power(1) - QQ.q_power(-1)
        want = ((r * QQ.q_power(1), (2, 3)), (-r, (3, 2)))
        return d.terms == want, d.format()

    def biorthogonality():
        bad = []
        for rank in (2, 3, 4):
            plan = central.assemble_central(rank)
            multisets = {tuple(sorted(t.e_word.indices())) for t in plan.pairs}
            for ms in sorted(multisets):
                if not pairing.biorthogonality_defect(list(ms), rank).is_zero:
                    bad.append((rank, ms))
        return not bad, f"multisets checked; failures: {bad}"

    checks = [
        ("dual(E2 E3) golden value", golden_dual, {}),
        ("biorthogonality over all central-element multisets", biorthogonality, {}),
    ]
    return _suite_report("pairing", _run_checks(checks, _threads()))


def central_suite(n: int, verify: bool = True, quick: bool = False) -> dict:
    plan = central.assemble_central(n)
    results = []

    def scalar():
        s = central.scalar_action(plan)
        return True, f"scalar: {s!r}"

    def scalar_vs_print():
        printed = {
            3: QQ.q_power(6) + QQ.q_power(2) + QQ.of_fraction(2)
               + QQ.q_power(-2) + QQ.q_power(-6),
            4: QQ.q_power(8) + QQ.q_power(4) + QQ.q_power(2) + QQ.of_fraction(2)
               + QQ.q_power(-2) + QQ.q_power(-4) + QQ.q_power(-8),
        }.get(n)
        s = central.scalar_action(plan)
        if printed is None:
            return True, f"no published value for n={n}; computed {s!r}"
        return s == printed, f"computed {s!r}"

    results.append(_check("single-site action is scalar", scalar))
    results.append(_check("scalar agrees with published value", scalar_vs_print,
                          informational=True))
    if verify:
        max_sites = 1 if (quick and n >= 4) else 2
        def commutators():
            checks = central.verify_central(plan, max_sites=max_sites)
            bad = [c for c in checks if not c.ok]
            return not bad, f"{len(checks)} commutators on up to {max_sites} sites"
        results.append(_check(f"centrality (N <= {max_sites})", commutators))
        if quick and n >= 4:
            def quick_two_site():
                ok = _quick_two_site_centrality(n)
                return ok, "two-site commutators at exact rational points"
            results.append(_check("centrality (N = 2, multi-point)", quick_two_site))
    return _suite_report(f"central(n={n})", results)


def _quick_two_site_centrality(n: int, points: int = 13) -> bool:
    from .exactq import QPoint
    plan = central.assemble_central(n)
    for k in range(points):
        q0 = Fraction(2 * k + 3, 2 * k + 5)
        field = QPoint(q0)
        mat = central.realize(plan, 2, field)
        for sym in central.all_generators(n):
            gen = qgroup.coproduct_action(sym, 2, n, field)
            if not mat.commutator(gen).is_zero:
                return False
    return True


def hamiltonian_suite(n: int, quick: bool = False) -> dict:
    def blocks():
        H = hamiltonian.two_site_hamiltonian(n)
        decomp = hamiltonian.shift_and_decompose(H)
        sizes = decomp.block_sizes()
        want = {1: 2 * n, 2: 2 * n * (n - 1), 2 * n: 1}
        return sizes == want, f"sizes {sizes}, const {decomp.const!r}"

    def kernels():
        block = hamiltonian.big_block_matrix(n)
        kern = hamiltonian.ground_kernel(block)
        return len(kern) == n - 1, f"kernel dimension {len(kern)}"

    def derived():
        bad = []
        for name, case in processes.CASES.items():
            if case.n != n:
                continue
            dg = processes.case_derived_generator(case)
            if any(dg.row_sums()):
                bad.append((name, "row sums"))
            if not dg.offdiagonals_nonnegative_at():
                bad.append((name, "negative rate"))
        return not bad, f"failures: {bad}"

    checks = [
        ("block decomposition", blocks, {}),
        ("kernel dimension", kernels, {}),
        ("derived generators are Markov", derived, {}),
    ]
    return _suite_report(f"hamiltonian(n={n})", _run_checks(checks, _threads()))


def asep_suite(n: int, delta: int, sites: int, which: list[str],
               q0: Fraction | None, explore: bool = False) -> dict:
    rates = asep.RateTable(n, delta)
    results = []
    if "identities" in which:
        def identities():
            checks = asep.rate_identities(n)
            return all(ok for _, ok in checks), "; ".join(name for name, _ in checks)
        results.append(_check("rate identities", identities))
    if "duality" in which:
        def duality():
            kind = asep.CLASS_PRESERVING if delta else asep.SUBSET_BOTH
            numeric = 12 if sites >= 4 else None
            rep = asep.duality_report(rates, kind, sites, numeric_points=numeric)
            return rep.ok, f"{rep.kind} [{rep.mode}] witnesses: {rep.witnesses[:4]}"
        results.append(_check(f"self-duality on {sites} sites", duality))
    if "reversibility" in which:
        def reversibility():
            L = asep.build_generator(rates, sites)
            bad = asep.detailed_balance_violations(L, sites)
            return not bad, f"violations: {bad[:4]}"
        results.append(_check(f"detailed balance on {sites} sites", reversibility))
    if explore:
        def explorer():
            rows = []
            for kind in asep.DUALITY_KINDS:
                rep = asep.duality_report(rates, kind, min(sites, 3))
                rows.append(f"{kind}: {'holds' if rep.ok else 'fails'}")
            return True, "; ".join(rows)
        results.append(_check("duality exploration (informational)", explorer,
                              informational=True))
    extra = {"parameters": {"n": n, "delta": delta, "sites": sites,
                            "q": str(q0) if q0 is not None else None}}
    return _suite_report(f"asep(n={n},delta={delta})", results, extra)


def classical_suite(n: int, golden_path: str | None = None) -> dict:
    gen = classical.generator(n)

    def censuses():
        cen = classical.ClassCensus.of(gen.classes)
        ok = (cen.absorbing == 2 * n and cen.maximal == 2 * n
              and cen.pairwise == 4 * n * n - 4 * n)
        return ok, f"abs={cen.absorbing} max={cen.maximal} pair={cen.pairwise}"

    def offdiag():
        values = {x for i, j, x in gen.matrix.nonzero_items() if i != j}
        return values == {Fraction(1, 2 * n - 2)}, f"values {sorted(values)}"

    def bijection():
        m = n - 1
        pmat, _ = classical.parallel_ssep(m, 2)
        found = classical.match_classical(gen.matrix, pmat)
        return found is not None, f"type-{m} rules on 2 sites"

    checks = [("state-class census", censuses, {}),
              ("uniform off-diagonal rate", offdiag, {}),
              ("particle-rule bijection", bijection, {})]
    results = _run_checks(checks, _threads())
    if golden_path:
        def golden():
            with open(golden_path) as fh:
                want = QMatrix([[Fraction(x) for x in row] for row in json.load(fh)])
            return gen.matrix == want, f"compared against {golden_path}"
        results.append(_check("golden matrix file", golden))
    return _suite_report(f"classical(n={n})", results)


def simulation_suite(n: int, delta: int, q0: Fraction, jumps: int,
                     seed: int) -> dict:
    def stationary():
        rates = asep.RateTable(n, delta)
        start = asep.encode((asep.BOTH, asep.EMPTY))
        res = asep.simulate(rates, 2, q0, float("inf"), seed=seed,
                            start=start, max_jumps=jumps, record=False)
        tv = asep.stationary_tv_distance(res, q0)
        return tv < 0.02, f"total variation {tv:.4f} after {res.jumps} jumps"
    return _suite_report("simulation",
                         [_check("occupation matches reversible measure", stationary)])


def all_suites(quick: bool = True) -> dict:
    reports = [
        pairing_suite(),
        central_suite(2), central_suite(3), central_suite(4, quick=quick),
        hamiltonian_suite(3), hamiltonian_suite(4, quick=quick),
    ]
    for n, delta, kind in ((2, 1, asep.CLASS_PRESERVING), (3, 1, asep.CLASS_PRESERVING),
                           (2, 0, asep.SUBSET_BOTH), (3, 0, asep.SUBSET_BOTH)):
        rates = asep.RateTable(n, delta)
        results = []
        for sites in (2, 3):
            rep = asep.duality_report(rates, kind, sites)
            results.append({"name": f"duality N={sites}", "detail": rep.mode,
                            "status": PASS if rep.ok else FAIL, "seconds": 0})
        reports.append(_suite_report(f"asep-duality(n={n},delta={delta})", results))
    neg = asep.duality_report(asep.RateTable(2, 1), asep.SUBSET_BOTH, 2)
    reports.append(_suite_report("asep-negative-control", [{
        "name": "subset duality fails for delta=1", "detail": str(neg.witnesses[:3]),
        "status": PASS if not neg.ok else FAIL, "seconds": 0}]))
    balance = []
    for n, delta in ((3, 0), (3, 1), (4, 0), (4, 1), (4, 2)):
        for sites in (2, 3):
            L = asep.build_generator(asep.RateTable(n, delta), sites)
            bad = asep.detailed_balance_violations(L, sites)
            balance.append({"name": f"detailed balance (n={n},d={delta}) N={sites}",
                            "detail": str(bad[:2]), "status": PASS if not bad else FAIL,
                            "seconds": 0})
    reports.append(_suite_report("asep-reversibility", balance))
    ident = []
    for n in (2, 3, 4, 5):
        ok = all(flag for _, flag in asep.rate_identities(n))
        ident.append({"name": f"rate identities n={n}", "detail": "",
                      "status": PASS if ok else FAIL, "seconds": 0})
    reports.append(_suite_report("asep-rate-identities", ident))
    matches = []
    for name, case in processes.CASES.items():
        dg = processes.case_derived_generator(case)
        rep = asep.match_hamiltonian_generator(dg, processes.case_rates(case),
                                               case.occupancy, name)
        matches.append({"name": f"{name} -> (n={case.rate_n}, delta={case.delta})",
                        "detail": str(rep.mismatches[:2]),
                        "status": PASS if rep.ok else FAIL, "seconds": 0})
    reports.append(_suite_report("generator-cross-derivation", matches))
    reports.append(classical_suite(2))
    reports.append(classical_suite(3))
    reports.append(simulation_suite(3, 1, Fraction(1, 2), 10 ** 5 if quick else 10 ** 6,
                                    seed=42))
    passed = all(r["passed"] for r in reports)
    return {"suite": "all", "mode": "quick" if quick else "full",
            "passed": passed, "suites": reports}


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------

def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qlattice",
        description="Exact verification of the type D ASEP construction and "
                    "its classical counterpart.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_central = sub.add_parser("central", help="central-element assembly and checks")
    p_central.add_argument("--n", type=int, default=3)
    p_central.add_argument("--verify", action="store_true")
    p_central.add_argument("--quick", action="store_true")
    p_central.add_argument("--emit", metavar="PATH",
                           help="write the single-site matrix as JSON")
    p_central.add_argument("--out", metavar="PATH")

    p_ham = sub.add_parser("hamiltonian", help="two-site Hamiltonian pipeline")
    p_ham.add_argument("--n", type=int, default=3)
    p_ham.add_argument("--blocks", action="store_true")
    p_ham.add_argument("--kernels", action="store_true")
    p_ham.add_argument("--quick", action="store_true")
    p_ham.add_argument("--emit", metavar="PATH", help="write a JSON structure report")
    p_ham.add_argument("--out", metavar="PATH")

    p_asep = sub.add_parser("asep", help="type D ASEP checks and simulation")
    asep_sub = p_asep.add_subparsers(dest="asep_command")
    p_asep.add_argument("--n", type=int, default=3)
    p_asep.add_argument("--delta", type=int, default=1)
    p_asep.add_argument("--sites", type=int, default=2)
    p_asep.add_argument("--check", default="duality,reversibility",
                        help="comma list from duality,reversibility,identities")
    p_asep.add_argument("--q", type=_fraction, default=None)
    p_asep.add_argument("--explore", action="store_true",
                        help="informational duality scan for these parameters")
    p_asep.add_argument("--out", metavar="PATH")

    p_sim = asep_sub.add_parser("simulate", help="continuous-time trajectory")
    p_sim.add_argument("--n", type=int, default=3)
    p_sim.add_argument("--delta", type=int, default=0)
    p_sim.add_argument("--sites", type=int, default=8)
    p_sim.add_argument("--q", type=_fraction, required=True)
    p_sim.add_argument("--tmax", type=float, required=True)
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument("--start", type=str, default=None,
                       help="base-4 digits, site 1 first (default: 12 then empty)")
    p_sim.add_argument("--out", metavar="PATH", required=True)

    p_cls = sub.add_parser("classical", help="Casimir generator and parallel SSEP")
    cls_sub = p_cls.add_subparsers(dest="classical_command")
    p_cls.add_argument("--n", type=int, default=2)
    p_cls.add_argument("--classify", action="store_true")
    p_cls.add_argument("--golden", metavar="PATH")
    p_cls.add_argument("--emit", metavar="PATH", help="write the generator as JSON")
    p_cls.add_argument("--out", metavar="PATH")

    p_exp = cls_sub.add_parser("expand", help="Kronecker-sum expansion to N sites")
    p_exp.add_argument("--n", type=int, default=2)
    p_exp.add_argument("--sites", type=int, default=3)
    p_exp.add_argument("--out", metavar="PATH")

    p_pair = sub.add_parser("pairing", help="Borel pairing utilities")
    pair_sub = p_pair.add_subparsers(dest="pairing_command")
    p_dual = pair_sub.add_parser("dual", help="print the dual of a word")
    p_dual.add_argument("--n", type=int, required=True)
    p_dual.add_argument("--word", required=True, help="e.g. E:2,3")
    p_pair.add_argument("--out", metavar="PATH")

    p_all = sub.add_parser("all", help="run every verification suite")
    mode = p_all.add_mutually_exclusive_group()
    mode.add_argument("--quick", action="store_true", default=True)
    mode.add_argument("--full", dest="quick", action="store_false")
    p_all.add_argument("--out", metavar="PATH")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.command == "central":
        report = central_suite(args.n, verify=args.verify, quick=args.quick)
        if args.emit:
            write_matrix_json(central.realize(central.assemble_central(args.n), 1),
                              args.emit)
        _emit(report, args.out)
        return 0 if report["passed"] else 1

    if args.command == "hamiltonian":
        report = hamiltonian_suite(args.n, quick=args.quick)
        if args.emit:
            H = hamiltonian.two_site_hamiltonian(args.n)
            decomp = hamiltonian.shift_and_decompose(H)
            block = hamiltonian.big_block_matrix(args.n)
            payload = {
                "const": decomp.const.to_json(),
                "singletons": list(decomp.singletons),
                "pair_blocks": [list(b) for b in decomp.pair_blocks],
                "big_block_states": [list(p) for p in
                                     hamiltonian.weight_zero_basis(args.n)],
                "big_block": block.to_json(),
                "kernel": [[x.to_json() for x in vec]
                           for vec in hamiltonian.ground_kernel(block)],
            }
            with open(args.emit, "w") as fh:
                json.dump(payload, fh, indent=2)
        _emit(report, args.out)
        return 0 if report["passed"] else 1

    if args.command == "asep":
        if getattr(args, "asep_command", None) == "simulate":
            start = None
            if args.start is not None:
                start = asep.encode([int(c) for c in args.start])
            res = asep.simulate(asep.RateTable(args.n, args.delta), args.sites,
                                args.q, args.tmax, seed=args.seed, start=start)
            asep.write_trajectory_csv(res, args.out)
            print(json.dumps({"jumps": res.jumps, "final": asep.format_state(
                res.final_state, res.sites), "out": args.out}))
            return 0
        which = [w.strip() for w in args.check.split(",") if w.strip()]
        unknown = set(which) - {"duality", "reversibility", "identities"}
        if unknown:
            parser.error(f"unknown checks: {sorted(unknown)}")
        report = asep_suite(args.n, args.delta, args.sites, which, args.q,
                            explore=args.explore)
        _emit(report, args.out)
        return 0 if report["passed"] else 1

    if args.command == "classical":
        if getattr(args, "classical_command", None) == "expand":
            gen = classical.generator(args.n)
            expanded = classical.expand(gen.matrix, args.sites)
            cen = classical.census(expanded)
            report = {
                "suite": f"classical-expand(n={args.n},N={args.sites})",
                "dimension": expanded.rows,
                "absorbing": cen.absorbing,
                "maximal_choice": cen.maximal,
                "row_sums_zero": all(sum(row) == 0 for row in expanded.data),
                "offdiagonals_nonnegative": all(
                    x >= 0 for i, j, x in expanded.nonzero_items() if i != j),
            }
            report["passed"] = (report["row_sums_zero"]
                                and report["offdiagonals_nonnegative"])
            _emit(report, args.out)
            return 0 if report["passed"] else 1
        report = classical_suite(args.n, golden_path=args.golden)
        if args.emit:
            gen = classical.generator(args.n)
            with open(args.emit, "w") as fh:
                json.dump([[str(x) for x in row] for row in gen.matrix.data], fh)
        if args.classify:
            gen = classical.generator(args.n)
            report["classes"] = list(gen.classes)
            report["pairs"] = sorted((i, j) for i, j in gen.pair_partner.items())
        _emit(report, args.out)
        return 0 if report["passed"] else 1

    if args.command == "pairing":
        if getattr(args, "pairing_command", None) == "dual":
            word = qgroup.Word.parse(args.word)
            kinds = {sym.kind for sym in word.letters}
            if len(kinds) != 1 or kinds - {"E", "F"}:
                parser.error("--word must use a single kind, E or F")
            dual = pairing.dual_element(word.indices(), args.n, kinds.pop())
            print(dual.format())
            return 0
        report = pairing_suite()
        _emit(report, args.out)
        return 0 if report["passed"] else 1

    if args.command == "all":
        report = all_suites(quick=args.quick)
        _emit(report, args.out)
        return 0 if report["passed"] else 1

    parser.error("unknown command")
    return 2


if __name__ == "__main__":
    sys.exit(main())
