"""Instances, matchings, utilities and welfare for roommate-room matching.

Values are kept exact: integral values are stored as ``int`` and everything
else as :class:`fractions.Fraction`, so welfare ties are always decided
exactly.
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, NamedTuple, Sequence, Union

Value = Union[int, Fraction]


class InstanceError(ValueError):
    """Raised for malformed instances, matchings or out-of-range indices."""


def to_value(x) -> Value:
    """Parse ``x`` (int, Fraction or ``"p/q"`` string) into an exact value >= 0."""
    if isinstance(x, bool):
        raise InstanceError(f"boolean is not a valuation: {x!r}")
    if isinstance(x, float):
        raise InstanceError(f"floats are not accepted, use 'p/q': {x!r}")
    try:
        q = Fraction(x)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise InstanceError(f"cannot parse value {x!r}") from exc
    if q < 0:
        raise InstanceError(f"valuations must be non-negative, got {x!r}")
    return int(q) if q.denominator == 1 else q


def value_to_json(x: Value) -> Union[int, str]:
    q = Fraction(x)
    return q.numerator if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def format_value(x: Value) -> str:
    q = Fraction(x)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


class UtilityModel(enum.Enum):
    LEONTIEF = "leontief"
    ADDITIVE = "additive"

    def combine(self, agent_value: Value, room_value: Value) -> Value:
        if self is UtilityModel.LEONTIEF:
            return agent_value if agent_value < room_value else room_value
        return agent_value + room_value

    @classmethod
    def parse(cls, name: Union[str, "UtilityModel"]) -> "UtilityModel":
        if isinstance(name, cls):
            return name
        try:
            return cls(str(name).lower())
        except ValueError:
            raise InstanceError(f"unknown utility model {name!r}") from None


LEONTIEF = UtilityModel.LEONTIEF
ADDITIVE = UtilityModel.ADDITIVE


class Triple(NamedTuple):
    """Two agents sharing a room; always stored with ``lo < hi``."""

    lo: int
    hi: int
    room: int

    @classmethod
    def of(cls, i: int, j: int, r: int) -> "Triple":
        if i == j:
            raise InstanceError(f"a triple needs two distinct agents, got {i} twice")
        return cls(i, j, r) if i < j else cls(j, i, r)


@dataclass(frozen=True, order=True)
class Matching:
    """A complete roommate matching in canonical form (triples sorted by room).

    Matchings compare by their canonical form, so ``min`` over a set of
    matchings picks the canonical-smallest one.
    """

    triples: tuple[Triple, ...]

    def __post_init__(self):
        ts = tuple(sorted((Triple.of(*t) for t in self.triples), key=lambda t: t.room))
        object.__setattr__(self, "triples", ts)
        n = len(ts)
        agents = sorted(a for t in ts for a in (t.lo, t.hi))
        rooms = [t.room for t in ts]
        if agents != list(range(2 * n)) or rooms != list(range(n)):
            raise InstanceError(
                f"not a complete matching: agents {agents}, rooms {rooms}")

    @classmethod
    def _trusted(cls, triples: tuple[Triple, ...]) -> "Matching":
        # caller guarantees canonical, valid triples sorted by room
        obj = object.__new__(cls)
        object.__setattr__(obj, "triples", triples)
        return obj

    @classmethod
    def from_triples(cls, triples: Iterable[Sequence[int]]) -> "Matching":
        return cls(tuple(Triple.of(*t) for t in triples))

    @property
    def n(self) -> int:
        return len(self.triples)

    @cached_property
    def partner(self) -> tuple[int, ...]:
        out = [0] * (2 * self.n)
        for lo, hi, _ in self.triples:
            out[lo], out[hi] = hi, lo
        return tuple(out)

    @cached_property
    def room_of(self) -> tuple[int, ...]:
        out = [0] * (2 * self.n)
        for lo, hi, r in self.triples:
            out[lo] = out[hi] = r
        return tuple(out)

    def pairs(self) -> frozenset[tuple[int, int]]:
        """The agent pairing, forgetting rooms."""
        return frozenset((t.lo, t.hi) for t in self.triples)

    def to_json(self) -> dict:
        return {"triples": [list(t) for t in self.triples]}

    @classmethod
    def from_json(cls, data: Mapping) -> "Matching":
        try:
            return cls.from_triples(data["triples"])
        except (KeyError, TypeError) as exc:
            raise InstanceError(f"bad matching JSON: {exc}") from exc

    def __str__(self) -> str:
        return "{" + ", ".join(f"({t.lo},{t.hi},r{t.room})" for t in self.triples) + "}"


class ShapeKind(enum.Enum):
    TRIANGLE = "T"
    L = "L"
    OTHER = "other"


class TripleShape(NamedTuple):
    kind: ShapeKind
    satisfied: int | None = None  # the agent who likes the room, for L only


@dataclass(frozen=True)
class PreferenceGraph:
    """Directed graph over agents and rooms of a binary instance.

    Agent vertices are ``("a", i)`` and room vertices ``("r", r)``; an edge
    goes from an agent to every agent or room it values.
    """

    n: int
    agent_edges: frozenset[tuple[int, int]]
    room_edges: frozenset[tuple[int, int]]

    def edges(self) -> list[tuple[tuple[str, int], tuple[str, int]]]:
        out = [(("a", i), ("a", j)) for i, j in sorted(self.agent_edges)]
        out += [(("a", i), ("r", r)) for i, r in sorted(self.room_edges)]
        return out


@dataclass(frozen=True)
class Instance:
    """``2n`` agents, ``n`` rooms, compatibility values ``v`` and room values ``v_hat``."""

    n: int
    v: tuple[tuple[Value, ...], ...]
    v_hat: tuple[tuple[Value, ...], ...]
    labels: Mapping[str, tuple[str, ...]] | None = field(default=None, compare=False)

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise InstanceError(f"n must be a positive integer, got {self.n!r}")
        m = 2 * self.n
        v = tuple(tuple(to_value(x) for x in row) for row in self.v)
        vh = tuple(tuple(to_value(x) for x in row) for row in self.v_hat)
        if len(v) != m or any(len(row) != m for row in v):
            raise InstanceError(f"v must be {m}x{m}")
        if len(vh) != m or any(len(row) != self.n for row in vh):
            raise InstanceError(f"v_hat must be {m}x{self.n}")
        for i in range(m):
            if v[i][i] != 0:
                raise InstanceError(f"v[{i}][{i}] must be 0")
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "v_hat", vh)
        if self.labels is not None:
            labels = {k: tuple(vals) for k, vals in dict(self.labels).items()}
            if len(labels.get("agents", ())) not in (0, m):
                raise InstanceError("need one label per agent")
            if len(labels.get("rooms", ())) not in (0, self.n):
                raise InstanceError("need one label per room")
            object.__setattr__(self, "labels", labels)

    @property
    def num_agents(self) -> int:
        return 2 * self.n

    @classmethod
    def zeros(cls, n: int) -> "Instance":
        return cls(n, tuple((0,) * (2 * n) for _ in range(2 * n)),
                   tuple((0,) * n for _ in range(2 * n)))

    @classmethod
    def from_edges(cls, n: int, agent_edges: Iterable[tuple[int, int]] = (),
                   room_edges: Iterable[tuple[int, int]] = (), *,
                   symmetric: bool = False, labels=None) -> "Instance":
        """Binary instance from directed edges ``i -> j`` and ``i -> room``."""
        m = 2 * n
        v = [[0] * m for _ in range(m)]
        vh = [[0] * n for _ in range(m)]
        for i, j in agent_edges:
            v[i][j] = 1
            if symmetric:
                v[j][i] = 1
        for i, r in room_edges:
            vh[i][r] = 1
        return cls(n, tuple(map(tuple, v)), tuple(map(tuple, vh)), labels)

    def agent_label(self, i: int) -> str:
        if self.labels and self.labels.get("agents"):
            return self.labels["agents"][i]
        return f"a{i + 1}"

    def room_label(self, r: int) -> str:
        if self.labels and self.labels.get("rooms"):
            return self.labels["rooms"][r]
        return f"r{r + 1}"

    def check_agent(self, i: int) -> None:
        if not 0 <= i < 2 * self.n:
            raise InstanceError(f"agent index {i} out of range")

    def check_room(self, r: int) -> None:
        if not 0 <= r < self.n:
            raise InstanceError(f"room index {r} out of range")

    def with_report(self, i: int, v_row: Sequence, v_hat_row: Sequence) -> "Instance":
        """Copy of the instance in which agent ``i`` reports the given rows."""
        self.check_agent(i)
        v_row = tuple(to_value(x) for x in v_row)
        v_hat_row = tuple(to_value(x) for x in v_hat_row)
        if len(v_row) != 2 * self.n or len(v_hat_row) != self.n:
            raise InstanceError("reported rows have the wrong length")
        if v_row[i] != 0:
            raise InstanceError(f"agent {i} cannot value itself")
        v = list(self.v)
        vh = list(self.v_hat)
        v[i] = v_row
        vh[i] = v_hat_row
        # the other rows are already validated
        out = object.__new__(Instance)
        for name, val in (("n", self.n), ("v", tuple(v)), ("v_hat", tuple(vh)),
                          ("labels", self.labels)):
            object.__setattr__(out, name, val)
        return out

    @cached_property
    def binary(self) -> bool:
        return all(x in (0, 1) for row in self.v for x in row) and \
            all(x in (0, 1) for row in self.v_hat for x in row)

    @cached_property
    def symmetric(self) -> bool:
        m = 2 * self.n
        return all(self.v[i][j] == self.v[j][i] for i in range(m) for j in range(i + 1, m))

    def utility_table(self, model: UtilityModel) -> list[list[list[Value]]]:
        """``table[i][j][r]`` is agent ``i``'s utility for partner ``j`` and room ``r``."""
        return self._tables[model]

    @cached_property
    def _tables(self) -> dict:
        m, n = 2 * self.n, self.n
        out = {}
        for model in UtilityModel:
            out[model] = [[[model.combine(self.v[i][j], self.v_hat[i][r]) if i != j else 0
                            for r in range(n)] for j in range(m)] for i in range(m)]
        return out

    def triple_weight_table(self, model: UtilityModel) -> dict[Triple, Value]:
        """Combined utility of both agents for every triple."""
        return self._weights[model]

    @cached_property
    def _weights(self) -> dict:
        m, n = 2 * self.n, self.n
        out = {}
        for model in UtilityModel:
            u = self._tables[model]
            out[model] = {Triple(i, j, r): u[i][j][r] + u[j][i][r]
                          for i in range(m) for j in range(i + 1, m) for r in range(n)}
        return out

    def to_json(self) -> dict:
        out = {"n": self.n,
               "v": [[value_to_json(x) for x in row] for row in self.v],
               "v_hat": [[value_to_json(x) for x in row] for row in self.v_hat]}
        if self.labels:
            out["labels"] = {k: list(vals) for k, vals in self.labels.items()}
        return out

    @classmethod
    def from_json(cls, data: Mapping) -> "Instance":
        try:
            return cls(data["n"], data["v"], data["v_hat"], data.get("labels"))
        except (KeyError, TypeError) as exc:
            raise InstanceError(f"bad instance JSON: {exc}") from exc

    def dumps(self) -> str:
        return json.dumps(self.to_json())

    @classmethod
    def loads(cls, text: str) -> "Instance":
        return cls.from_json(json.loads(text))


def utility(inst: Instance, model: UtilityModel, i: int, j: int, r: int) -> Value:
    """Utility of agent ``i`` when sharing room ``r`` with agent ``j``."""
    inst.check_agent(i)
    inst.check_agent(j)
    inst.check_room(r)
    if i == j:
        raise InstanceError("an agent cannot be its own roommate")
    return model.combine(inst.v[i][j], inst.v_hat[i][r])


def check_matching(inst: Instance, mu: Matching) -> None:
    if mu.n != inst.n:
        raise InstanceError(f"matching has {mu.n} triples, instance has {inst.n} rooms")


def agent_utilities(inst: Instance, model: UtilityModel, mu: Matching) -> tuple[Value, ...]:
    check_matching(inst, mu)
    u = inst.utility_table(model)
    out = [0] * (2 * inst.n)
    for lo, hi, r in mu.triples:
        out[lo] = u[lo][hi][r]
        out[hi] = u[hi][lo][r]
    return tuple(out)


def welfare(inst: Instance, model: UtilityModel, mu: Matching) -> Value:
    """Utilitarian social welfare: the sum of all agents' utilities."""
    check_matching(inst, mu)
    w = inst.triple_weight_table(model)
    return sum(w[t] for t in mu.triples)


def is_binary(inst: Instance) -> bool:
    return inst.binary


def is_symmetric(inst: Instance) -> bool:
    return inst.symmetric


def require_binary(inst: Instance, what: str = "this operation") -> None:
    if not inst.binary:
        raise InstanceError(f"{what} requires binary valuations")


def classify(inst: Instance, i: int, j: int, r: int) -> TripleShape:
    require_binary(inst, "classify")
    inst.check_agent(i)
    inst.check_agent(j)
    inst.check_room(r)
    if i == j:
        raise InstanceError("a triple needs two distinct agents")
    if not (inst.v[i][j] and inst.v[j][i]):
        return TripleShape(ShapeKind.OTHER)
    ri, rj = inst.v_hat[i][r], inst.v_hat[j][r]
    if ri and rj:
        return TripleShape(ShapeKind.TRIANGLE)
    if ri or rj:
        return TripleShape(ShapeKind.L, i if ri else j)
    return TripleShape(ShapeKind.OTHER)


def preference_graph(inst: Instance) -> PreferenceGraph:
    require_binary(inst, "preference_graph")
    m = 2 * inst.n
    agent_edges = frozenset((i, j) for i in range(m) for j in range(m) if inst.v[i][j])
    room_edges = frozenset((i, r) for i in range(m) for r in range(inst.n) if inst.v_hat[i][r])
    return PreferenceGraph(inst.n, agent_edges, room_edges)


def relabel(inst: Instance, agent_perm: Sequence[int], room_perm: Sequence[int]) -> Instance:
    """Instance in which old agent ``i`` becomes ``agent_perm[i]`` and room ``r`` becomes ``room_perm[r]``."""
    m, n = 2 * inst.n, inst.n
    v = [[0] * m for _ in range(m)]
    vh = [[0] * n for _ in range(m)]
    for i in range(m):
        for j in range(m):
            v[agent_perm[i]][agent_perm[j]] = inst.v[i][j]
        for r in range(n):
            vh[agent_perm[i]][room_perm[r]] = inst.v_hat[i][r]
    return Instance(n, tuple(map(tuple, v)), tuple(map(tuple, vh)))


def relabel_matching(mu: Matching, agent_perm: Sequence[int], room_perm: Sequence[int]) -> Matching:
    return Matching.from_triples((agent_perm[a], agent_perm[b], room_perm[r])
                                 for a, b, r in mu.triples)
