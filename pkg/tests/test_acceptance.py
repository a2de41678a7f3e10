"""One test per acceptance criterion; each records a PASS/FAIL line for the summary."""
from __future__ import annotations

import itertools
import random
import time
from fractions import Fraction

import pytest

from roommatch import ADDITIVE, LEONTIEF, Instance, Matching, max_welfare, welfare
from roommatch.audit import BinaryAll, audit, check_observation_1, reproduce_impossibility
from roommatch.generators import (all_small_cnfs, expected_optimum, from_3sat, gadget_consistent,
                                  gen_figure, gen_random, max_triple_weight, parity_fixture,
                                  sat_max_clauses)
from roommatch.mechanisms import (EdgePickPolicy, lt_maximal, naive_maximal,
                                  precedence_search, serial_dictatorship, triangle_then_l,
                                  welfare_prioritized_sd, welfare_set_reduction)
from roommatch.oracle import enumerate_matchings
from roommatch.setpacking import max_welfare_packing, reduce, solve_max_weight

from conftest import ACCEPTANCE_LINES


def record(number: int, title: str, ok: bool, detail: str, elapsed: float) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} ({detail}; {elapsed:.1f}s)"
    ACCEPTANCE_LINES.append(line)
    print(line)


def sp_corpus():
    return [gen_random(2, [0.3, 0.5, 0.7][s % 3], False, s) for s in range(200)]


def test_criterion_1_figure_fidelity():
    start = time.perf_counter()
    add5, _ = gen_figure("fig5", "additive")
    fig6, _ = gen_figure("fig6")
    sym6, _ = gen_figure("fig6-symmetric")
    mu1 = Matching.from_triples([(0, 1, 0), (2, 3, 1)])
    mu2 = Matching.from_triples([(1, 2, 0), (0, 3, 1)])
    r5 = max_welfare(add5, ADDITIVE)
    r6 = max_welfare(fig6, ADDITIVE)
    rs = max_welfare(sym6, ADDITIVE)
    elapsed = time.perf_counter() - start
    ok = (r5.max_welfare == 2 and r6.max_welfare == 2 and {mu1, mu2} <= set(r6.witnesses)
          and rs.max_welfare == 3 and elapsed < 1)
    record(1, "figure oracle values", ok,
           f"fig5={r5.max_welfare} fig6={r6.max_welfare} fig6-sym={rs.max_welfare}", elapsed)
    assert ok


def _instances_with_few_ones(limit: int):
    cells = [("v", i, j) for i in range(4) for j in range(4) if i != j] + \
            [("vh", i, r) for i in range(4) for r in range(2)]
    for k in range(limit + 1):
        for ones in itertools.combinations(cells, k):
            v = [[0] * 4 for _ in range(4)]
            vh = [[0] * 2 for _ in range(4)]
            for kind, a, b in ones:
                (v if kind == "v" else vh)[a][b] = 1
            yield Instance(2, v, vh)


def test_criterion_2_optimal_mechanisms_agree():
    start = time.perf_counter()
    sigmas = list(itertools.permutations(range(4)))
    rng = random.Random(2)
    cases = [(inst, sigmas[k % 24]) for k, inst in enumerate(_instances_with_few_ones(6))]
    exhaustive = len(cases)
    for s in range(500):
        n = 3 + s % 2
        sigma = list(range(2 * n))
        rng.shuffle(sigma)
        cases.append((gen_random(n, rng.choice([0.2, 0.35, 0.5]), False, 1000 + s), sigma))
    bad = 0
    for inst, sigma in cases:
        best = max_welfare(inst, LEONTIEF).max_welfare
        a = welfare_set_reduction(inst, LEONTIEF, sigma)
        b = precedence_search(inst, sigma)
        if not (a.welfare == b.welfare == best and a.satisfied() == b.satisfied()):
            bad += 1
    elapsed = time.perf_counter() - start
    ok = bad == 0 and elapsed < 300
    record(2, "set reduction and precedence search agree with the optimum", ok,
           f"{exhaustive} exhaustive + 500 random, {bad} disagreements", elapsed)
    assert ok


def test_criterion_3_strategyproofness():
    start = time.perf_counter()
    corpus = sp_corpus()
    sigmas = list(itertools.permutations(range(4)))
    found = {}
    for name in ("triangle-then-l", "welfare-set-reduction", "precedence-search"):
        found[name] = sum(audit(name, inst, LEONTIEF, BinaryAll).witness is not None
                          for inst in corpus)
    found["lt-sd"] = sum(audit("lt-sd", inst, LEONTIEF, BinaryAll, sigma=s).witness is not None
                         for inst in corpus for s in sigmas)
    fixture, _ = parity_fixture()
    parity = audit("parity", fixture, LEONTIEF, BinaryAll).witness is not None
    elapsed = time.perf_counter() - start
    ok = not any(found.values()) and parity and elapsed < 300
    record(3, "no profitable misreport on the n=2 corpus", ok,
           ", ".join(f"{k}={v}" for k, v in found.items()) + f", parity witness={parity}",
           elapsed)
    assert ok


def _bound_settings():
    sym_rng = random.Random(4)

    def sigma_for(n, seed):
        s = list(range(2 * n))
        random.Random(seed).shuffle(s)
        return s

    return [
        ("triangle-then-l leontief", LEONTIEF, False, Fraction(1, 3), lambda i, s: triangle_then_l(i, LEONTIEF)),
        ("triangle-then-l additive", ADDITIVE, False, Fraction(1, 3), lambda i, s: triangle_then_l(i, ADDITIVE)),
        ("lt-maximal", LEONTIEF, False, Fraction(1, 6), lambda i, s: lt_maximal(i)),
        ("wp-sd", ADDITIVE, False, Fraction(1, 7),
         lambda i, s: welfare_prioritized_sd(i, sigma_for(i.n, s), ADDITIVE)),
        ("wp-sd symmetric", ADDITIVE, True, Fraction(1, 6),
         lambda i, s: welfare_prioritized_sd(i, sigma_for(i.n, s), ADDITIVE)),
        ("naive-maximal", ADDITIVE, False, Fraction(1, 4),
         lambda i, s: naive_maximal(i, model=ADDITIVE)),
    ]


def test_criterion_4_approximation_bounds():
    start = time.perf_counter()
    violations = {}
    worst = {}
    optima: dict = {}
    for label, model, symmetric, bound, mech in _bound_settings():
        violations[label] = 0
        worst[label] = Fraction(1)
        for seed in range(500):
            n = 1 + seed % 4
            density = [0.2, 0.4, 0.6, 0.8][(seed // 4) % 4]
            key = (n, density, symmetric, seed, model)
            if key not in optima:
                inst = gen_random(n, density, symmetric, seed)
                optima[key] = (inst, max_welfare(inst, model).max_welfare)
            inst, best = optima[key]
            got = mech(inst, seed).welfare
            r = Fraction(1) if best == 0 else Fraction(got) / best
            worst[label] = min(worst[label], r)
            violations[label] += r < bound
    elapsed = time.perf_counter() - start
    ok = not any(violations.values())
    record(4, "approximation bounds on random corpora", ok,
           ", ".join(f"{k} worst={worst[k]} violations={violations[k]}" for k in worst), elapsed)
    assert ok


def test_criterion_5_tightness():
    start = time.perf_counter()
    results = {}
    inst, exp = gen_figure("fig3")
    res = naive_maximal(inst, EdgePickPolicy.scripted(exp["script"]), ADDITIVE)
    results["fig3"] = Fraction(res.welfare) / max_welfare(inst, ADDITIVE).max_welfare
    inst, exp = gen_figure("fig4")
    res = lt_maximal(inst, EdgePickPolicy.scripted(exp["script"]), LEONTIEF)
    results["fig4"] = Fraction(res.welfare) / max_welfare(inst, LEONTIEF).max_welfare
    inst, exp = gen_figure("fig2")
    res = naive_maximal(inst, EdgePickPolicy.scripted(exp["script"]), LEONTIEF)
    results["fig2"] = Fraction(res.welfare) / max_welfare(inst, LEONTIEF).max_welfare
    want = {"fig3": Fraction(1, 4), "fig4": Fraction(1, 6), "fig2": Fraction(0)}
    for k in (1, 2, 3):
        inst, exp = gen_figure("bad-sd", k=k, validate=False)
        best, _ = max_welfare_packing(inst, ADDITIVE)
        sd = serial_dictatorship(inst, ADDITIVE, exp["sigma"])
        results[f"bad-sd k={k}"] = Fraction(sd.welfare) / best
        want[f"bad-sd k={k}"] = Fraction(3, 6 * k + 3)
    elapsed = time.perf_counter() - start
    ok = results == want
    record(5, "tightness witnesses", ok,
           ", ".join(f"{k}={v}" for k, v in results.items()), elapsed)
    assert ok


def test_criterion_6_impossibility():
    start = time.perf_counter()
    checks = {}
    for alpha in (Fraction(1), Fraction(1, 2), Fraction(1, 4)):
        rep = reproduce_impossibility("fig5", alpha, ADDITIVE)
        checks[f"fig5 alpha={alpha}"] = rep.verified and all(
            len({mu.pairs() for mu in d.passing}) == 1 for d in rep.deviations)
    inst, _ = gen_figure("fig6")
    rep = reproduce_impossibility("fig6", 1)
    mu1 = Matching.from_triples([(0, 1, 0), (2, 3, 1)])
    lied = inst.with_report(0, inst.v[0], (1, 0))
    res = max_welfare(lied, ADDITIVE)
    checks["fig6"] = rep.verified and res.max_welfare == 3 and res.witnesses == (mu1,)
    elapsed = time.perf_counter() - start
    ok = all(checks.values())
    record(6, "impossibility constructions", ok,
           ", ".join(f"{k}: {'ok' if v else 'failed'}" for k, v in checks.items()), elapsed)
    assert ok


def test_criterion_7_hardness_gadget():
    start = time.perf_counter()
    suite = all_small_cnfs(3, 2)
    failures = []
    for cnf in suite:
        inst, rmap = from_3sat(cnf)
        want = 3 * len(cnf.clauses) + sat_max_clauses(cnf)
        if inst.n <= 5:
            res = max_welfare(inst, LEONTIEF)
            value, witnesses = res.max_welfare, res.witnesses
        else:
            value, mu = max_welfare_packing(inst, LEONTIEF)
            witnesses = (mu,)
        if value != want or value != expected_optimum(cnf) or max_triple_weight(inst) > 1 \
                or not all(gadget_consistent(inst, rmap, mu) for mu in witnesses):
            failures.append(cnf.to_json())
    elapsed = time.perf_counter() - start
    ok = len(suite) >= 20 and not failures and elapsed < 600
    record(7, "3-SAT gadget soundness", ok, f"{len(suite)} formulas, {len(failures)} failures",
           elapsed)
    assert ok


def test_criterion_8_set_packing_equivalence():
    start = time.perf_counter()
    mismatches = 0
    for seed in range(500):
        n = 1 + seed % 4
        inst = gen_random(n, [0.3, 0.5, 0.7][seed % 3], seed % 2 == 1, 5000 + seed)
        for model in (LEONTIEF, ADDITIVE):
            spi = reduce(inst, model)
            value, packing = solve_max_weight(spi, n)
            mu = Matching.from_triples(
                (a, b, c - 2 * n) for a, b, c, _ in (spi.sets[k] for k in packing.chosen))
            if value != max_welfare(inst, model).max_welfare or welfare(inst, model, mu) != value:
                mismatches += 1
    elapsed = time.perf_counter() - start
    ok = mismatches == 0
    record(8, "set packing equals the oracle", ok, f"1000 solves, {mismatches} mismatches",
           elapsed)
    assert ok


def test_criterion_9_observation_1():
    start = time.perf_counter()
    corpus = sp_corpus()
    matchings = list(enumerate_matchings(2))
    checked = failed = 0
    for inst in corpus:
        for i in range(4):
            for report in BinaryAll.reports(inst, i):
                for mu in matchings:
                    checked += 1
                    failed += not check_observation_1(inst, i, mu, report)
    elapsed = time.perf_counter() - start
    ok = failed == 0
    record(9, "misreports move perceived welfare one way only", ok,
           f"{checked} checks, {failed} failures", elapsed)
    assert ok
