from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from ..instance import (Instance, InstanceError, Matching, Triple, UtilityModel, Value,
                        agent_utilities, format_value)


@dataclass(frozen=True)
class TraceRecord:
    """One decision taken by a mechanism."""

    rule: str
    triple: Triple | None = None
    tie_size: int = 0
    detail: str = ""

    def to_json(self) -> dict:
        out = {"rule": self.rule, "tie_size": self.tie_size}
        if self.triple is not None:
            out["triple"] = list(self.triple)
        if self.detail:
            out["detail"] = self.detail
        return out


@dataclass(frozen=True)
class MechanismResult:
    matching: Matching
    per_agent_utility: tuple[Value, ...]
    welfare: Value
    trace: tuple[TraceRecord, ...] = field(default=(), compare=True)

    def to_json(self) -> dict:
        return {"matching": self.matching.to_json()["triples"],
                "per_agent_utility": [format_value(u) for u in self.per_agent_utility],
                "welfare": format_value(self.welfare),
                "trace": [t.to_json() for t in self.trace]}

    def satisfied(self) -> frozenset[int]:
        """Agents with positive utility."""
        return frozenset(i for i, u in enumerate(self.per_agent_utility) if u > 0)


def make_result(inst: Instance, model: UtilityModel, mu: Matching,
                trace: Sequence[TraceRecord] = ()) -> MechanismResult:
    utils = agent_utilities(inst, model, mu)
    return MechanismResult(mu, utils, sum(utils), tuple(trace))


def check_sigma(inst: Instance, sigma: Sequence[int] | None) -> tuple[int, ...]:
    """Validate an agent ordering; ``None`` means index order."""
    m = 2 * inst.n
    if sigma is None:
        return tuple(range(m))
    sigma = tuple(int(a) for a in sigma)
    if sorted(sigma) != list(range(m)):
        raise InstanceError(f"sigma must be a permutation of 0..{m - 1}, got {list(sigma)}")
    return sigma


def complete(n: int, triples: Sequence[Triple], free_agents: Sequence[int] | None = None,
             free_rooms: Sequence[int] | None = None) -> tuple[list[Triple], list[TraceRecord]]:
    """Pair the leftover agents in index order with the leftover rooms in index order."""
    used_a = {a for t in triples for a in (t.lo, t.hi)}
    used_r = {t.room for t in triples}
    agents = sorted(free_agents) if free_agents is not None else \
        [a for a in range(2 * n) if a not in used_a]
    rooms = sorted(free_rooms) if free_rooms is not None else \
        [r for r in range(n) if r not in used_r]
    out = list(triples)
    trace = []
    for k, r in enumerate(rooms):
        t = Triple(agents[2 * k], agents[2 * k + 1], r)
        out.append(t)
        trace.append(TraceRecord("complete", t))
    return out, trace
