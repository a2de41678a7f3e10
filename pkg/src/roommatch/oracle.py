"""Brute-force enumeration of all roommate matchings and the exact optimum."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

from .instance import (Instance, InstanceError, Matching, Triple, UtilityModel, Value,
                       format_value, welfare)

DEFAULT_CAP = 6


class CapExceeded(InstanceError):
    """The requested size is above the configured enumeration cap."""


def _check_cap(n: int, cap: int | None) -> None:
    if n < 1:
        raise InstanceError(f"n must be >= 1, got {n}")
    limit = DEFAULT_CAP if cap is None else cap
    if n > limit:
        raise CapExceeded(f"n={n} exceeds the enumeration cap of {limit}")


def count_matchings(n: int) -> int:
    """(2n)! / (2^n n!) pairings times n! room assignments."""
    pairings = 1
    for k in range(1, 2 * n, 2):
        pairings *= k
    perms = 1
    for k in range(2, n + 1):
        perms *= k
    return pairings * perms


def pairings(agents: tuple[int, ...]) -> Iterator[tuple[tuple[int, int], ...]]:
    """Perfect pairings; the smallest unpaired agent is paired with each larger one in turn."""
    if not agents:
        yield ()
        return
    first, rest = agents[0], agents[1:]
    for k, other in enumerate(rest):
        remaining = rest[:k] + rest[k + 1:]
        for tail in pairings(remaining):
            yield ((first, other),) + tail


def _raw_matchings(n: int) -> Iterator[tuple[Triple, ...]]:
    perms = list(itertools.permutations(range(n)))
    for pairing in pairings(tuple(range(2 * n))):
        for perm in perms:
            ts = [None] * n
            for (a, b), r in zip(pairing, perm):
                ts[r] = Triple(a, b, r)
            yield tuple(ts)


def enumerate_matchings(n: int, cap: int | None = None) -> Iterator[Matching]:
    """Every complete matching of ``2n`` agents and ``n`` rooms, exactly once.

    Order: pairings as produced by :func:`pairings`, and for each pairing the
    room permutations in lexicographic order.
    """
    _check_cap(n, cap)
    for ts in _raw_matchings(n):
        yield Matching._trusted(ts)


@dataclass(frozen=True)
class OracleResult:
    max_welfare: Value
    witnesses: tuple[Matching, ...]

    def to_json(self) -> dict:
        return {"max_welfare": format_value(self.max_welfare),
                "witnesses": [m.to_json()["triples"] for m in self.witnesses]}


def max_welfare(inst: Instance, model: UtilityModel, cap: int | None = None) -> OracleResult:
    """Exact maximum welfare and every matching attaining it (sorted canonically)."""
    _check_cap(inst.n, cap)
    w = inst.triple_weight_table(model)
    best = None
    witnesses: list[tuple[Triple, ...]] = []
    for ts in _raw_matchings(inst.n):
        total = 0
        for t in ts:
            total += w[t]
        if best is None or total > best:
            best = total
            witnesses = [ts]
        elif total == best:
            witnesses.append(ts)
    witnesses.sort()
    return OracleResult(best, tuple(Matching._trusted(ts) for ts in witnesses))


def ratio(inst: Instance, model: UtilityModel, mu: Matching,
          cap: int | None = None, optimum: Value | None = None) -> Fraction:
    """``welfare(mu) / max welfare``; defined as 1 when the optimum is 0."""
    if optimum is None:
        optimum = max_welfare(inst, model, cap).max_welfare
    if optimum == 0:
        return Fraction(1)
    return Fraction(welfare(inst, model, mu)) / Fraction(optimum)
