from __future__ import annotations

import itertools
from fractions import Fraction

import pytest

from roommatch import Instance, Matching


def brute_matchings(n: int):
    """Independent enumeration: slot agents into rooms via permutations, then dedupe."""
    seen = set()
    for perm in itertools.permutations(range(2 * n)):
        triples = tuple(sorted(((min(perm[2 * r], perm[2 * r + 1]),
                                 max(perm[2 * r], perm[2 * r + 1]), r) for r in range(n)),
                               key=lambda t: t[2]))
        if triples not in seen:
            seen.add(triples)
            yield triples


def brute_welfare(inst: Instance, model: str, triples) -> Fraction:
    total = Fraction(0)
    for a, b, r in triples:
        for i, j in ((a, b), (b, a)):
            x, y = inst.v[i][j], inst.v_hat[i][r]
            total += min(x, y) if model == "leontief" else x + y
    return total


def brute_max(inst: Instance, model: str):
    best, arg = None, []
    for ts in brute_matchings(inst.n):
        w = brute_welfare(inst, model, ts)
        if best is None or w > best:
            best, arg = w, [ts]
        elif w == best:
            arg.append(ts)
    return best, {Matching.from_triples(t) for t in arg}


@pytest.fixture
def fig5_add():
    from roommatch.generators import gen_figure
    return gen_figure("fig5", "additive")[0]


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
