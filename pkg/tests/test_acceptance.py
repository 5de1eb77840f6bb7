"""Acceptance suite: one test per criterion, one PASS/FAIL line each.

Run with `pytest tests/test_acceptance.py -v -s`.  Every tolerance is exact
integer arithmetic unless stated; each criterion also enforces its runtime
budget.  Two criteria are asserted in their literal stated form even though
parts of them are mathematically unattainable, and fail here on purpose
with the certified truth printed alongside: criterion 4's expected totals
undercount the roots the polynomial actually has, and criterion 9's
per-disk root distribution for (t, q) = (3, 3) requires exponents growing
like p^(2 gap), far beyond any runtime budget.  Everything else is green.
"""

import math
import random
import time
from fractions import Fraction
from itertools import combinations

import pytest

from padroot.bounds import distinct_product_lcm, lenstra_threshold
from padroot.explore import SweepSpec, run_sweep
from padroot.extremal import _tower_profile, build_family
from padroot.multipoly import MultiPoly
from padroot.padic import solve_power_congruences
from padroot.rootcount import CountOptions, count_roots
from padroot.sparsepoly import newton_polygon, parse_poly
from padroot.vandermonde import (
    binomial_det,
    binomial_det_quotient,
    identity_grid_report,
    standard_powers,
)

from oracle import oracle_root_classes, random_sparse_poly, report_classes

OPTS = CountOptions(prec=40, depth=8)


def conclude(number: int, ok: bool, elapsed: float, detail: str) -> None:
    status = "PASS" if ok else "FAIL"
    print(f"\nCRITERION {number:2d}: {status} ({elapsed:.1f}s) - {detail}")


def test_criterion_01_vandermonde_identity_grid():
    start = time.time()
    rows, summary = identity_grid_report(3, 7)
    elapsed = time.time() - start
    ok = summary["failures"] == 0 and elapsed < 60
    conclude(1, ok, elapsed,
             f"{summary['rows']} grid rows, {summary['failures']} failures, "
             f"all quotients nonzero: {summary['all_quotients_nonzero']}")
    assert summary["failures"] == 0
    assert elapsed < 60


def test_criterion_02_binomial_determinant_grid():
    start = time.time()
    failures = []
    for t in range(1, 5):
        # the standard-index identity
        lhs = binomial_det(standard_powers(t))
        rhs = MultiPoly.const(t, 1)
        for i in range(t):
            rhs = rhs * MultiPoly.monomial(t, i)
            for j in range(i + 1, t):
                rhs = rhs * (MultiPoly.monomial(t, j) - MultiPoly.monomial(t, i))
        if lhs != rhs:
            failures.append(("standard", t))
        for beta in combinations(range(1, 9), t):
            scaled = binomial_det(beta)  # integer coefficients by construction
            if scaled.total_degree() != sum(beta):
                failures.append(("degW", beta))
            q = binomial_det_quotient(beta)  # exact division certifies Z coeffs
            if q.total_degree() != sum(beta) - t * (t + 1) // 2:
                failures.append(("degQ", beta))
    elapsed = time.time() - start
    ok = not failures and elapsed < 30
    conclude(2, ok, elapsed, f"t <= 4, beta_t <= 8; failures: {failures[:4]}")
    assert not failures
    assert elapsed < 30


def test_criterion_03_binomial_sharpness():
    start = time.time()
    outcomes = {}
    for p in (3, 5, 7, 11):
        report = count_roots(parse_poly(f"x^{p - 1} - 1"), p, OPTS)
        outcomes[p] = (report.count_distinct, report.count_with_multiplicity,
                       report.fully_certified,
                       all(e.multiplicity == 1 for e in report.entries))
    elapsed = time.time() - start
    ok = all(v == (p - 1, p - 1, True, True) for p, v in outcomes.items()) \
        and elapsed < 5
    conclude(3, ok, elapsed, f"x^(p-1)-1 root counts: "
             f"{ {p: v[0] for p, v in outcomes.items()} }")
    for p, v in outcomes.items():
        assert v == (p - 1, p - 1, True, True)
    assert elapsed < 5


def test_criterion_04_example_trinomial_q3():
    start = time.time()
    report = count_roots(parse_poly("x^20 - 10*x^2 + 9"), 3, OPTS)
    elapsed = time.time() - start

    torsion = [e for e in report.entries
               if e.certificate == "ExactTorsion" and e.valuation == 0]
    skeleton_ok = (
        sorted(e.rational for e in torsion) == [Fraction(-1), Fraction(1)]
        and all(e.multiplicity == 2 for e in torsion)
        and len([e for e in report.entries
                 if e.certificate == "HenselSimple" and e.valuation == 1]) == 2
        and report.fully_certified
    )
    totals = (report.count_distinct, report.count_with_multiplicity)
    ok = skeleton_ok and totals == (4, 6) and elapsed < 5
    conclude(4, ok, elapsed,
             f"skeleton (double torsion roots at +-1, two simple lifts at "
             f"valuation 1): {'ok' if skeleton_ok else 'BROKEN'}; "
             f"totals certified {totals} against the stated expectation "
             f"(4, 6) [the stated totals are wrong: this trinomial has two "
             f"further simple unit roots over Q_3, congruent to 7 and 74 "
             f"mod 81, confirmed by the independent oracle and by direct "
             f"evaluation]")
    assert skeleton_ok
    assert elapsed < 5
    assert totals == (4, 6), (
        f"the stated expectation is exactly (4, 6) but the certified (and "
        f"independently verified) inventory is {totals}: substituting "
        f"u = x^2, the cofactor sum((9-k) u^k, k=0..8) has a simple zero "
        f"u* = 4 mod 9 in Z_3, and x = +-sqrt(u*) are two extra simple "
        f"unit roots, so the at-least-3(q-1) count is not attained with "
        f"equality at q = 3"
    )


def test_criterion_05_example_trinomial_q5():
    start = time.time()
    report = count_roots(parse_poly("x^2504 - 626*x^4 + 625"), 5, OPTS)
    elapsed = time.time() - start
    totals = (report.count_distinct, report.count_with_multiplicity)
    torsion = [e for e in report.entries if e.certificate == "ExactTorsion"]
    ok = (totals == (8, 12) and report.fully_certified
          and len(torsion) == 4 and all(e.multiplicity == 2 for e in torsion)
          and elapsed < 60)
    conclude(5, ok, elapsed, f"totals {totals}, expected (8, 12); "
             f"{len(torsion)} double torsion roots")
    assert totals == (8, 12)
    assert report.fully_certified
    assert elapsed < 60


def test_criterion_06_oracle_equivalence():
    start = time.time()
    disagreements = []
    corpora = {}
    for p in (3, 5, 7):
        rng = random.Random(600 + p)
        corpus = [random_sparse_poly(rng, max_terms=4, max_exp=50,
                                     coeff_bound=20) for _ in range(500)]
        corpora[p] = corpus
        for f in corpus:
            report = count_roots(f, p, OPTS)
            got = report_classes(report, 6)
            want, total = oracle_root_classes(f, p, 6)
            if not report.fully_certified or got != want \
                    or report.count_with_multiplicity != total:
                disagreements.append((p, f.terms))
    elapsed = time.time() - start
    ok = not disagreements and elapsed < 600
    conclude(6, ok, elapsed,
             f"1500 random polynomials, {len(disagreements)} disagreements "
             f"with the residue-refinement oracle")
    assert not disagreements, disagreements[:3]
    assert elapsed < 600
    test_criterion_06_oracle_equivalence.corpora = corpora


def test_criterion_07_trinomial_bound_consistency():
    start = time.time()
    violations = []
    checked = 0
    for p in (5, 7):
        rng = random.Random(600 + p)  # same corpus as criterion 6
        corpus = [random_sparse_poly(rng, max_terms=4, max_exp=50,
                                     coeff_bound=20) for _ in range(500)]
        for f in corpus:
            if f.num_terms() != 3:
                continue
            checked += 1
            report = count_roots(f, p, OPTS)
            if report.upper_bound_with_multiplicity > 3 * (p - 1):
                violations.append((p, f.terms,
                                   report.upper_bound_with_multiplicity))
    elapsed = time.time() - start
    ok = not violations
    conclude(7, ok, elapsed,
             f"{checked} trinomials checked against 3(p-1); "
             f"{len(violations)} violations (a violation would falsify the "
             f"upper-bound theorem)")
    assert not violations, violations[:3]


def test_criterion_08_lenstra_lemma():
    start = time.time()
    failures = []
    for p in (3, 5, 7, 11, 13, 17, 19, 23):
        for t in range(1, 6):
            for e in range(1, 4):
                if p > t + e:
                    value = lenstra_threshold(p, t, Fraction(1, e))
                    if value != t:
                        failures.append((p, t, e, value))
    for t in range(0, 7):
        if distinct_product_lcm(t, t) != math.factorial(t):
            failures.append(("d_t(t)", t))
    if distinct_product_lcm(2, 3) != 6 or distinct_product_lcm(2, 4) != 24:
        failures.append(("d_2 examples",))
    elapsed = time.time() - start
    ok = not failures and elapsed < 30
    conclude(8, ok, elapsed,
             f"threshold == t on the whole p > t+e grid; d_t(t) = t!; "
             f"failures: {failures[:4]}")
    assert not failures
    assert elapsed < 30


def test_criterion_09_tower_construction():
    start = time.time()
    results = {}
    condition6_failures = []
    for (t, q), target in [((2, 3), 6), ((2, 5), 12), ((3, 3), 10)]:
        t0 = time.time()
        out = build_family(t, q)
        build_elapsed = time.time() - t0
        slopes_ok = newton_polygon(out.poly, q).slopes() == [
            Fraction(-i) for i in range(t - 1, -1, -1)
        ]
        shape_ok = (
            out.poly.num_terms() == t + 1
            and out.poly.leading_coefficient() == 1
            and out.poly.constant_term() != 0
            and all(e % (q - 1) == 0 for e in out.poly.exponents() if e)
        )
        simple_ok = all(e.multiplicity == 1 for e in out.report.entries) \
            and out.report.fully_certified
        count_ok = out.report.count_with_multiplicity >= target
        profile = _tower_profile(out.report, t, q)
        condition5_ok = profile[t - 1] >= 1
        condition6_ok = all(c >= 2 for c in profile[: t - 1])
        if not condition6_ok:
            condition6_failures.append((t, q, profile))
        results[(t, q)] = dict(
            count=out.report.count_with_multiplicity, target=target,
            slopes=slopes_ok, shape=shape_ok, simple=simple_ok,
            count_ok=count_ok, cond5=condition5_ok, cond6=condition6_ok,
            profile=profile, seconds=round(build_elapsed, 1),
        )
        assert build_elapsed < 600, f"build ({t},{q}) exceeded its 10 min budget"
    elapsed = time.time() - start
    core_ok = all(
        r["slopes"] and r["shape"] and r["simple"] and r["count_ok"] and r["cond5"]
        for r in results.values()
    )
    ok = core_ok and not condition6_failures
    conclude(9, ok, elapsed,
             f"builds: { {k: (v['count'], v['target'], v['profile'], v['seconds']) for k, v in results.items()} }; "
             f"per-disk two-roots-each failures: {condition6_failures} "
             f"[(3,3) cannot reach that distribution at any feasible scale: "
             f"the dilated member is congruent to x^deg modulo p^(gap+2), "
             f"so the aligning exponent grows like p^(2 gap); the certified "
             f"total still meets the target through an uneven distribution]")
    assert core_ok, results
    assert not condition6_failures, (
        f"the two-simple-roots-per-inner-disk distribution [2,...,2,1] was "
        f"not attained for {condition6_failures}; the builder's fallback "
        f"delivers the same certified total through an uneven distribution"
    )


def test_criterion_10_exponent_chain_sanity():
    start = time.time()
    rng = random.Random(10)
    p, r = 5, 6
    checked = 0
    for _ in range(10):
        y = 1 + p * rng.randint(1, 10**6)  # admissible: y = 1 mod 5
        alphas = solve_power_congruences(r, y, p, 6, divisor=4, minimum=0)
        for i, alpha in enumerate(alphas, start=1):
            assert pow(r, alpha, p**i) == y % p**i
            assert alpha % 4 == 0
            checked += 1
    elapsed = time.time() - start
    ok = checked == 60 and elapsed < 5
    conclude(10, ok, elapsed,
             f"{checked} congruences verified by direct modular exponentiation")
    assert ok


def test_criterion_11_search_determinism(tmp_path):
    start = time.time()
    base = dict(p=5, t=2, exponent_bound=14, candidates=40, seed=42,
                prec=24, depth=6)
    paths = [tmp_path / name for name in
             ("one.csv", "two.csv", "quad.csv")]
    run_sweep(SweepSpec(workers=1, **base), out_path=str(paths[0]))
    run_sweep(SweepSpec(workers=1, **base), out_path=str(paths[1]))
    run_sweep(SweepSpec(workers=4, **base), out_path=str(paths[2]))
    same_seed = paths[0].read_bytes() == paths[1].read_bytes()
    same_workers = paths[0].read_bytes() == paths[2].read_bytes()
    elapsed = time.time() - start
    ok = same_seed and same_workers
    conclude(11, ok, elapsed,
             f"same-seed byte-identical: {same_seed}; "
             f"1-worker vs 4-worker byte-identical: {same_workers}")
    assert ok
