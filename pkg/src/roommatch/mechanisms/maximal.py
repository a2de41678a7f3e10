"""Maximal-matching style mechanisms driven by an edge-pick policy.

The naive procedure grows partial groups (an agent pair, an agent-room pair,
or a full triple) one preference edge at a time.  An edge is available when
merging its endpoints still fits in one triple and the leftover rooms can
still host every agent pair built so far.  Without that second condition the
process can strand a pair with no room.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import NamedTuple, Sequence

from ..instance import (LEONTIEF, Instance, InstanceError, Matching, Triple, UtilityModel,
                        require_binary)
from .base import MechanismResult, TraceRecord, complete, make_result


class Edge(NamedTuple):
    """Directed preference edge from agent ``src`` to an agent or a room."""

    src: int
    target: int
    to_room: bool = False

    def vertex(self, n: int) -> int:
        return 2 * n + self.target if self.to_room else self.target

    def __str__(self) -> str:
        return f"a{self.src + 1}->{'r' if self.to_room else 'a'}{self.target + 1}"


class PolicyKind(enum.Enum):
    INDEX_ORDER = "index-order"
    AGENT_EDGES_FIRST = "agent-edges-first"
    SCRIPTED = "scripted"


@dataclass(frozen=True)
class EdgePickPolicy:
    """How the next edge (or triple) is chosen.

    ``script`` holds :class:`Edge` values for :func:`naive_maximal` and
    triples for :func:`lt_maximal`; once exhausted, picking falls back to
    index order.
    """

    kind: PolicyKind = PolicyKind.INDEX_ORDER
    script: tuple = ()

    @classmethod
    def index_order(cls) -> "EdgePickPolicy":
        return cls(PolicyKind.INDEX_ORDER)

    @classmethod
    def agent_edges_first(cls) -> "EdgePickPolicy":
        return cls(PolicyKind.AGENT_EDGES_FIRST)

    @classmethod
    def scripted(cls, script: Sequence) -> "EdgePickPolicy":
        return cls(PolicyKind.SCRIPTED, tuple(script))


IndexOrder = EdgePickPolicy.index_order()
AgentEdgesFirst = EdgePickPolicy.agent_edges_first()


class _Groups:
    """Union of partial groups over agent vertices ``0..2n-1`` and room vertices ``2n..3n-1``."""

    def __init__(self, n: int):
        self.n = n
        self.group_of: dict[int, int] = {}
        self.members: dict[int, set[int]] = {}
        self.next_id = 0

    def _group(self, x: int) -> set[int]:
        g = self.group_of.get(x)
        return self.members[g] if g is not None else {x}

    def _shape(self, vs) -> tuple[int, int]:
        rooms = sum(1 for x in vs if x >= 2 * self.n)
        return len(vs) - rooms, rooms

    def counts(self) -> tuple[int, int]:
        """(agent pairs lacking a room, rooms in no group)."""
        pairs = sum(1 for g in self.members.values() if self._shape(g) == (2, 0))
        grouped_rooms = sum(1 for x in self.group_of if x >= 2 * self.n)
        return pairs, self.n - grouped_rooms

    def complete_groups(self) -> list[set[int]]:
        return [g for g in self.members.values() if len(g) == 3]

    def is_free(self, x: int) -> bool:
        return x not in self.group_of

    def can_merge(self, x: int, y: int) -> bool:
        gx, gy = self._group(x), self._group(y)
        if x in gy or len(gx) == 3 or len(gy) == 3:
            return False
        agents, rooms = self._shape(gx | gy)
        if agents > 2 or rooms > 1:
            return False
        pairs, free_rooms = self.counts()
        for g in (gx, gy):
            if self._shape(g) == (2, 0):
                pairs -= 1
            if len(g) == 1 and next(iter(g)) >= 2 * self.n:
                free_rooms -= 1
        if (agents, rooms) == (2, 0):
            pairs += 1
        return pairs <= free_rooms

    def merge(self, x: int, y: int) -> set[int]:
        merged = self._group(x) | self._group(y)
        for g in (self.group_of.get(x), self.group_of.get(y)):
            if g is not None:
                self.members.pop(g, None)
        gid = self.next_id
        self.next_id += 1
        self.members[gid] = merged
        for z in merged:
            self.group_of[z] = gid
        return merged


def _edges(inst: Instance) -> list[Edge]:
    m = 2 * inst.n
    out = []
    for i in range(m):
        out.extend(Edge(i, j) for j in range(m) if inst.v[i][j] > 0)
        out.extend(Edge(i, r, True) for r in range(inst.n) if inst.v_hat[i][r] > 0)
    return out


def _finish(n: int, groups: _Groups) -> tuple[list[Triple], list[TraceRecord]]:
    m = 2 * n
    triples = []
    for g in groups.complete_groups():
        a, b = sorted(x for x in g if x < m)
        triples.append(Triple(a, b, max(g) - m))
    used = set(groups.group_of)
    free_agents = [a for a in range(m) if a not in used]
    free_rooms = [r for r in range(n) if m + r not in used]
    trace = []
    partial = [sorted(g) for g in groups.members.values() if len(g) < 3]
    pairs = sorted(g for g in partial if g[-1] < m)
    with_room = sorted((g[1] - m, g[0]) for g in partial if g[-1] >= m)
    for a, b in pairs:
        t = Triple(a, b, free_rooms.pop(0))
        triples.append(t)
        trace.append(TraceRecord("complete-pair", t))
    for r, a in with_room:
        t = Triple.of(a, free_agents.pop(0), r)
        triples.append(t)
        trace.append(TraceRecord("complete-room", t))
    triples, rest = complete(n, triples, free_agents, free_rooms)
    return triples, trace + rest


def naive_maximal(inst: Instance, policy: EdgePickPolicy = IndexOrder,
                  model: UtilityModel = LEONTIEF) -> MechanismResult:
    """Pick available preference edges until none is left, then complete.

    Index order sorts edges by source agent, then target vertex (agents before
    rooms).  Agent-edges-first takes an agent edge only together with a free
    room that one of the two agents likes, so every such triple satisfies
    someone; when no such combination is left it continues in index order.
    """
    require_binary(inst, "naive_maximal")
    n = inst.n
    edges = _edges(inst)
    groups = _Groups(n)
    trace: list[TraceRecord] = []

    def available(e: Edge) -> bool:
        return groups.can_merge(e.src, e.vertex(n))

    def take(e: Edge, rule: str) -> None:
        merged = groups.merge(e.src, e.vertex(n))
        trace.append(TraceRecord(rule, None, 0, f"{e} -> group {sorted(merged)}"))

    script = list(policy.script) if policy.kind is PolicyKind.SCRIPTED else []
    for e in script:
        e = Edge(*e)
        if e not in edges:
            raise InstanceError(f"scripted edge {e} is not a preference edge")
        if not available(e):
            raise InstanceError(f"scripted edge {e} is not available")
        take(e, "scripted")

    while True:
        pick = None
        if policy.kind is PolicyKind.AGENT_EDGES_FIRST:
            combo = next(((e, f) for e in edges if not e.to_room and available(e)
                          for f in edges if f.to_room and f.src in (e.src, e.target)
                          and groups.is_free(f.vertex(n))), None)
            if combo is not None:
                take(combo[0], "agent-edge")
                take(combo[1], "pair-room")
                continue
        pick = next((e for e in edges if available(e)), None)
        if pick is None:
            break
        take(pick, "index")

    triples, rest = _finish(n, groups)
    return make_result(inst, model, Matching.from_triples(triples), trace + rest)


def _positive_triples(inst: Instance) -> list[Triple]:
    u = inst.utility_table(LEONTIEF)
    m = 2 * inst.n
    return [Triple(i, j, r) for i in range(m) for j in range(i + 1, m) for r in range(inst.n)
            if u[i][j][r] > 0 or u[j][i][r] > 0]


def lt_maximal(inst: Instance, policy: EdgePickPolicy = IndexOrder,
               model: UtilityModel = LEONTIEF) -> MechanismResult:
    """Maximal set of disjoint triples in which some agent likes both partner and room.

    Index order scans triples lexicographically.  A scripted policy lists
    triples to take first.  Leftovers are completed in index order.
    """
    require_binary(inst, "lt_maximal")
    if policy.kind is PolicyKind.AGENT_EDGES_FIRST:
        raise InstanceError("lt_maximal supports index-order and scripted policies only")
    candidates = _positive_triples(inst)
    used_a: set[int] = set()
    used_r: set[int] = set()
    chosen: list[Triple] = []
    trace: list[TraceRecord] = []

    def free(t: Triple) -> bool:
        return t.lo not in used_a and t.hi not in used_a and t.room not in used_r

    def take(t: Triple, rule: str) -> None:
        chosen.append(t)
        used_a.update((t.lo, t.hi))
        used_r.add(t.room)
        trace.append(TraceRecord(rule, t))

    if policy.kind is PolicyKind.SCRIPTED:
        for raw in policy.script:
            t = Triple.of(*raw)
            if t not in candidates:
                raise InstanceError(f"scripted triple {tuple(t)} has no satisfied agent")
            if not free(t):
                raise InstanceError(f"scripted triple {tuple(t)} overlaps an earlier pick")
            take(t, "scripted")
    for t in candidates:
        if free(t):
            take(t, "index")
    triples, rest = complete(inst.n, chosen)
    return make_result(inst, model, Matching.from_triples(triples), trace + rest)
