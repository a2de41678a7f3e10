"""Welfare maximization as weighted 3-set packing, with exact solvers.

Universe elements ``0 .. 2n-1`` are the agents and ``2n .. 3n-1`` the rooms.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .instance import (Instance, InstanceError, Matching, Triple, UtilityModel, Value,
                       to_value, value_to_json)


class InfeasiblePacking(ValueError):
    """No packing with the required number of sets exists."""


@dataclass(frozen=True)
class SetPackingInstance:
    universe_size: int
    sets: tuple[tuple[int, int, int, Value], ...]

    def __post_init__(self):
        clean = []
        for s in self.sets:
            a, b, c, w = s
            if len({a, b, c}) != 3:
                raise InstanceError(f"set elements must be distinct: {s}")
            if not all(0 <= e < self.universe_size for e in (a, b, c)):
                raise InstanceError(f"set element out of range: {s}")
            clean.append((a, b, c, to_value(w)))
        object.__setattr__(self, "sets", tuple(clean))

    def to_json(self) -> dict:
        return {"universe": self.universe_size,
                "sets": [[a, b, c, value_to_json(w)] for a, b, c, w in self.sets]}

    @classmethod
    def from_json(cls, data) -> "SetPackingInstance":
        return cls(data["universe"], tuple(tuple(s) for s in data["sets"]))

    def dumps(self) -> str:
        return json.dumps(self.to_json())


@dataclass(frozen=True)
class Packing:
    chosen: tuple[int, ...]


def reduce(inst: Instance, model: UtilityModel) -> SetPackingInstance:
    """One set per (i < j, room) triple, weighted by both agents' utilities."""
    m = 2 * inst.n
    w = inst.triple_weight_table(model)
    sets = tuple((i, j, m + r, w[Triple(i, j, r)])
                 for i in range(m) for j in range(i + 1, m) for r in range(inst.n))
    return SetPackingInstance(m + inst.n, sets)


def packing_to_matching(inst: Instance, spi: SetPackingInstance, packing: Packing) -> Matching:
    m = 2 * inst.n
    return Matching.from_triples((a, b, c - m) for a, b, c, _ in
                                 (spi.sets[k] for k in packing.chosen))


def _index(universe: int, sets: Sequence[tuple[int, int, int]]) -> list[list[int]]:
    by_elem = [[] for _ in range(universe)]
    for k, (a, b, c) in enumerate(sets):
        by_elem[min(a, b, c)].append(k)
    return by_elem


def _masks(sets: Sequence[tuple[int, int, int]]) -> list[int]:
    return [(1 << a) | (1 << b) | (1 << c) for a, b, c in sets]


def _search(universe: int, sets: Sequence[tuple[int, int, int]], weights: Sequence[Value] | None,
            required: int, lower: Value | None = None, shares=None, by_weight: bool = False,
            target: Value | None = None):
    """Depth-first search over packings of exactly ``required`` sets.

    Branches on the smallest uncovered element: either one of the sets whose
    smallest element it is, or leaving it uncovered while slack allows.  With
    ``weights is None`` this returns the first feasible packing.  Otherwise it
    returns the first packing of maximum weight in search order, pruning with
    the smaller of two admissible bounds: the heaviest remaining compatible
    sets, and the sum over uncovered elements of their best compatible share.
    Each entry of ``shares`` is one way to split every set's weight over its
    three elements (equal thirds by default); the smallest resulting bound
    is used.  ``by_weight`` tries heavier sets first, which finds
    the optimum value sooner but changes which witness is reported.  With a
    known ``target`` the search stops at the first packing reaching it.
    """
    slack = universe - 3 * required
    if slack < 0 or required < 0:
        return None
    masks = _masks(sets)
    first_of = _index(universe, sets)
    weighted = weights is not None
    if weighted:
        if shares is None:
            shares = [[(Fraction(w, 3),) * 3 for w in weights]]
        # per split and element: (share, mask) of every set touching it, best first
        splits = []
        for split in shares:
            best_share = [[] for _ in range(universe)]
            for k, (elems, sh) in enumerate(zip(sets, split)):
                for e, x in zip(elems, sh):
                    if x > 0:
                        best_share[e].append((x, masks[k]))
            for lst in best_share:
                lst.sort(key=lambda p: -p[0])
            splits.append(best_share)
        order = sorted(range(len(sets)), key=lambda k: (-weights[k], k))
        if by_weight:
            first_of = [sorted(ks, key=lambda k: (-weights[k], k)) for ks in first_of]

    best_val = lower
    best_sol = None
    chosen: list[int] = []

    def bound(used: int, k_left: int) -> Value:
        top = 0
        taken = 0
        for k in order:
            if taken == k_left:
                break
            if not masks[k] & used:
                top += weights[k]
                taken += 1
        for best_share in splits:
            share = 0
            for e in range(universe):
                if used >> e & 1:
                    continue
                for x, mk in best_share[e]:
                    if not mk & used:
                        share += x
                        break
                if share >= top:
                    break
            if share < top:
                top = share
        return top

    def dfs(used: int, e: int, k_left: int, skipped: int, value: Value) -> bool:
        nonlocal best_val, best_sol
        if k_left == 0:
            if not weighted:
                best_sol = tuple(chosen)
                return True
            if (best_sol is None and (best_val is None or value >= best_val)) or \
                    (best_val is not None and value > best_val):
                best_val, best_sol = value, tuple(chosen)
                return target is not None and value >= target
            return False
        while e < universe and used >> e & 1:
            e += 1
        if e >= universe or universe - e < 3 * k_left:
            return False
        if weighted and best_val is not None:
            b = value + bound(used, k_left)
            if b < best_val or (best_sol is not None and b <= best_val):
                return False
        for k in first_of[e]:
            if masks[k] & used:
                continue
            chosen.append(k)
            done = dfs(used | masks[k], e + 1, k_left - 1, skipped,
                       value + (weights[k] if weighted else 0))
            chosen.pop()
            if done:
                return True
        if skipped < slack:
            return dfs(used | (1 << e), e + 1, k_left, skipped + 1, value)
        return False

    dfs(0, 0, required, 0, 0)
    if best_sol is None:
        return None
    return best_val, best_sol


def greedy_packing(spi: SetPackingInstance, required: int) -> tuple[Value, Packing] | None:
    """Heaviest-first disjoint sets, ties by index; a baseline, not an approximation guarantee."""
    used = 0
    chosen = []
    total = 0
    masks = _masks([s[:3] for s in spi.sets])
    for k in sorted(range(len(spi.sets)), key=lambda k: (-spi.sets[k][3], k)):
        if len(chosen) == required:
            break
        if not masks[k] & used:
            used |= masks[k]
            chosen.append(k)
            total += spi.sets[k][3]
    if len(chosen) < required:
        return None
    return total, Packing(tuple(sorted(chosen)))


def solve_max_weight(spi: SetPackingInstance, required: int,
                     shares: Sequence[Sequence[tuple[Value, Value, Value]]] | None = None
                     ) -> tuple[Value, Packing]:
    """Exact maximum total weight over packings of exactly ``required`` disjoint sets.

    The witness is the first maximum packing in index-order search.  Optional
    ``shares`` are extra ways of splitting each set's weight over its
    elements; they only tighten pruning and must sum to the set's weight.
    """
    sets = [s[:3] for s in spi.sets]
    weights = [s[3] for s in spi.sets]
    for split in shares or ():
        if len(split) != len(sets) or any(sum(sh) != w for sh, w in zip(split, weights)):
            raise InstanceError("shares must split each set's weight exactly")
    shares = [list(split) for split in shares] if shares else None
    seed = greedy_packing(spi, required)
    lower = seed[0] if seed else None
    # find the optimum value with heavy sets first, then the canonical witness
    found = _search(spi.universe_size, sets, weights, required, lower, shares, by_weight=True)
    if found is None:
        raise InfeasiblePacking(f"no packing of {required} disjoint sets")
    found = _search(spi.universe_size, sets, weights, required, found[0], shares,
                    target=found[0])
    value, chosen = found
    return value, Packing(tuple(sorted(chosen)))


def solve_feasibility(universe_size: int, sets: Iterable[Sequence[int]],
                      required: int) -> Packing | None:
    """First packing of exactly ``required`` disjoint sets in search order, or None."""
    sets = [tuple(s[:3]) for s in sets]
    for s in sets:
        if len(set(s)) != 3 or not all(0 <= e < universe_size for e in s):
            raise InstanceError(f"bad set {s}")
    if required == 0:
        return Packing(())
    found = _search(universe_size, sets, None, required)
    if found is None:
        return None
    return Packing(tuple(sorted(found[1])))


def max_welfare_packing(inst: Instance, model: UtilityModel) -> tuple[Value, Matching]:
    """Optimum welfare via the set-packing route, with a witness matching."""
    spi = reduce(inst, model)
    u = inst.utility_table(model)
    m = 2 * inst.n
    # each agent contributes its own utility, rooms contribute nothing
    by_agent = [(u[a][b][c - m], u[b][a][c - m], 0) for a, b, c, _ in spi.sets]
    # or let the room carry the whole weight of its triple
    by_room = [(0, 0, w) for *_, w in spi.sets]
    value, packing = solve_max_weight(spi, inst.n, [by_agent, by_room])
    return value, packing_to_matching(inst, spi, packing)
