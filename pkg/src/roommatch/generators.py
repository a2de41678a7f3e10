"""Instance constructors: random corpora, the worst-case figure families, and the 3SAT gadget."""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .instance import (ADDITIVE, LEONTIEF, Instance, InstanceError, Matching, Triple,
                       UtilityModel, agent_utilities, to_value, welfare)
from .oracle import max_welfare
from .setpacking import max_welfare_packing

# --------------------------------------------------------------------------- random


def gen_random(n: int, density: float | Fraction, symmetric: bool = False,
               seed: int = 0) -> Instance:
    """Binary instance where each value is 1 independently with probability ``density``."""
    if not 0 <= density <= 1:
        raise InstanceError(f"density must lie in [0, 1], got {density}")
    if n < 1:
        raise InstanceError(f"n must be >= 1, got {n}")
    rng = random.Random(seed)
    m = 2 * n
    v = [[0] * m for _ in range(m)]
    for i in range(m):
        for j in range(m):
            if i == j or (symmetric and j < i):
                continue
            v[i][j] = int(rng.random() < density)
            if symmetric:
                v[j][i] = v[i][j]
    vh = [[int(rng.random() < density) for _ in range(n)] for _ in range(m)]
    return Instance(n, v, vh)


def gen_random_weighted(n: int, values: Sequence = (0, 1, 2, 4, 8), seed: int = 0,
                        symmetric: bool = False) -> Instance:
    """Instance with every value drawn uniformly from ``values``."""
    rng = random.Random(seed)
    m = 2 * n
    values = [to_value(x) for x in values]
    v = [[0] * m for _ in range(m)]
    for i in range(m):
        for j in range(m):
            if i == j or (symmetric and j < i):
                continue
            v[i][j] = rng.choice(values)
            if symmetric:
                v[j][i] = v[i][j]
    vh = [[rng.choice(values) for _ in range(n)] for _ in range(m)]
    return Instance(n, v, vh)


# --------------------------------------------------------------------------- figures

FAMILIES = ("fig2", "fig3", "fig4", "fig5", "fig6", "fig6-symmetric", "bad-sd",
            "parity-fixture")


class FigureMismatch(AssertionError):
    """A figure instance does not reproduce its transcribed welfare values."""


def _optimum(inst: Instance, model: UtilityModel) -> tuple[Fraction, Matching]:
    if inst.n <= 5:
        res = max_welfare(inst, model)
        return res.max_welfare, res.witnesses[0]
    return max_welfare_packing(inst, model)


def _labels(agents: Iterable[str], rooms: Iterable[str]) -> dict:
    return {"agents": tuple(agents), "rooms": tuple(rooms)}


def _three_triangles(extra_agent=(), extra_room=(), symmetric=False) -> Instance:
    # a1a2 in r1, a3a4 in r2, a5a6 in r3: mutual pairs who both like their room
    agent_edges = [(0, 1), (2, 3), (4, 5)]
    room_edges = [(0, 0), (1, 0), (2, 1), (3, 1), (4, 2), (5, 2)]
    return Instance.from_edges(3, [e for a, b in agent_edges for e in ((a, b), (b, a))]
                               + list(extra_agent), room_edges + list(extra_room),
                               symmetric=symmetric)


def fig2() -> tuple[Instance, dict]:
    """Three satisfied triangles plus a1 -> a3 and a3 -> r3; Leontief.

    Picking a1 -> a3 and then a3 -> r3 builds a triple worth nothing and
    breaks all three triangles."""
    inst = _three_triangles(extra_agent=[(0, 2)], extra_room=[(2, 2)])
    return inst, {"model": "leontief", "oracle_max": 6,
                  "script": [(0, 2, False), (2, 2, True)], "scripted_welfare": 0}


def fig3() -> tuple[Instance, dict]:
    """Additive: picking a1 -> r3 and a3 -> r3 yields 2 against an optimum of 8."""
    agent_edges = [(0, 1), (1, 0), (2, 3), (3, 2)]
    room_edges = [(0, 0), (0, 2), (2, 1), (2, 2), (4, 2), (5, 2)]
    inst = Instance.from_edges(3, agent_edges, room_edges)
    return inst, {"model": "additive", "oracle_max": 8,
                  "script": [(0, 2, True), (2, 2, True)], "scripted_welfare": 2}


def fig4() -> tuple[Instance, dict]:
    """Symmetric Leontief: three triangles plus a1 - a3 and a3 -> r3.

    The L (a1, a3, r3) satisfies only a3 and blocks all three triangles."""
    inst = _three_triangles(extra_agent=[(0, 2), (2, 0)], extra_room=[(2, 2)])
    return inst, {"model": "leontief", "oracle_max": 6,
                  "script": [(0, 2, 2)], "scripted_welfare": 1}


def fig5(model: UtilityModel | str = ADDITIVE) -> tuple[Instance, dict]:
    """Four agents in a directed cycle a1 -> a2 -> a3 -> a4 -> a1, two rooms.

    Every room is worth 0 under additive utilities and 1 under Leontief."""
    model = UtilityModel.parse(model)
    k = 0 if model is ADDITIVE else 1
    inst = Instance.from_edges(2, [(0, 1), (1, 2), (2, 3), (3, 0)],
                               [(i, r) for i in range(4) for r in range(2)] if k else [])
    return inst, {"model": model.value, "oracle_max": 2,
                  "zero_pairing": [(0, 2), (1, 3)]}


_MU1 = ((0, 1, 0), (2, 3, 1))
_MU2 = ((1, 2, 0), (0, 3, 1))


def fig6() -> tuple[Instance, dict]:
    """Additive: a1 and a3 like a2, a2 likes r1, a4 likes nothing.

    Exactly two matchings reach welfare 2; a1 reporting a liking for r1
    makes the one pairing it with a2 the unique optimum."""
    inst = Instance.from_edges(2, [(0, 1), (2, 1)], [(1, 0)])
    return inst, {"model": "additive", "oracle_max": 2, "witnesses": [_MU1, _MU2],
                  "misreport_max": 3}


def fig6_symmetric() -> tuple[Instance, dict]:
    """The symmetric variant: a2 also likes a1 and a3."""
    inst = Instance.from_edges(2, [(0, 1), (2, 1)], [(1, 0)], symmetric=True)
    return inst, {"model": "additive", "oracle_max": 3, "witnesses": [_MU1, _MU2],
                  "misreport_max": 4}


@dataclass(frozen=True)
class BadSDLayout:
    """Agent and room indices of the bad serial-dictatorship family."""

    k: int
    d: tuple[int, int]
    a: tuple[tuple[int, int], ...]
    b: tuple[tuple[int, int], ...]
    c: tuple[tuple[int, int], ...]
    r_star: int
    rooms: tuple[tuple[int, int, int], ...]

    def adversarial_sigma(self) -> tuple[int, ...]:
        head = [self.d[0]] + [x for pair in self.a for x in pair] + [self.d[1]]
        rest = [x for x in range(6 * self.k + 2) if x not in head]
        return tuple(head + rest)


def bad_sd_layout(k: int) -> BadSDLayout:
    # Indices are chosen so that the lowest-index tie-break of plain serial
    # dictatorship reproduces the adversarial picks: a_i1 takes c_i1 and r_i2,
    # a_i2 takes b_i1 and r_i3.
    if k < 1:
        raise InstanceError(f"k must be >= 1, got {k}")
    d = (0, 1)
    c1 = [2 + 2 * i for i in range(k)]
    b1 = [3 + 2 * i for i in range(k)]
    a = [(2 + 2 * k + 2 * i, 3 + 2 * k + 2 * i) for i in range(k)]
    b2 = [2 + 4 * k + 2 * i for i in range(k)]
    c2 = [3 + 4 * k + 2 * i for i in range(k)]
    r2 = [1 + 2 * i for i in range(k)]
    r3 = [2 + 2 * i for i in range(k)]
    r1 = [1 + 2 * k + i for i in range(k)]
    return BadSDLayout(k, d, tuple(a), tuple(zip(b1, b2)), tuple(zip(c1, c2)), 0,
                       tuple(zip(r1, r2, r3)))


def bad_sd(k: int) -> tuple[Instance, dict]:
    """6k+2 agents and 3k+1 rooms where plain serial dictatorship can end with welfare 3.

    Additive.  For each i: b_i1, b_i2 like each other, as do c_i1, c_i2;
    b_i1 likes r_i2 and c_i1 likes r_i3; a_i1, a_i2 like only r*.  d1 likes
    d2 and r*, and d2 likes r*.  The optimum is 6k+3, but if d1 moves first
    (taking d2 and r*) followed by the a-agents, each a-agent has nothing left
    to gain and wastes two agents and a room.
    """
    lay = bad_sd_layout(k)
    agent_edges = [(lay.d[0], lay.d[1])]
    room_edges = [(lay.d[0], lay.r_star), (lay.d[1], lay.r_star)]
    for i in range(k):
        (b1, b2), (c1, c2), (a1, a2) = lay.b[i], lay.c[i], lay.a[i]
        _, r2, r3 = lay.rooms[i]
        agent_edges += [(b1, b2), (b2, b1), (c1, c2), (c2, c1)]
        room_edges += [(b1, r2), (c1, r3), (a1, lay.r_star), (a2, lay.r_star)]
    names = [""] * (6 * k + 2)
    names[0], names[1] = "d1", "d2"
    for i in range(k):
        for g, pair in (("a", lay.a[i]), ("b", lay.b[i]), ("c", lay.c[i])):
            names[pair[0]], names[pair[1]] = f"{g}{i + 1}1", f"{g}{i + 1}2"
    rooms = [""] * (3 * k + 1)
    rooms[0] = "r*"
    for i, trio in enumerate(lay.rooms):
        for s, r in enumerate(trio, 1):
            rooms[r] = f"r{i + 1}{s}"
    inst = Instance.from_edges(3 * k + 1, agent_edges, room_edges, labels=_labels(names, rooms))
    return inst, {"model": "additive", "oracle_max": 6 * k + 3, "sd_welfare": 3,
                  "sigma": list(lay.adversarial_sigma()),
                  "ratio": Fraction(3, 6 * k + 3)}


def parity_fixture() -> tuple[Instance, dict]:
    """Leontief: a1 and a2 like each other, a1 likes r1 and a2 likes r2.

    Two matchings are optimal, an even count, so the parity mechanism hands
    a1 the one where it gets nothing.  By also claiming to like a4, a1 makes
    the count odd and is then favoured."""
    inst = Instance.from_edges(2, [(0, 1), (1, 0)], [(0, 0), (1, 1)])
    return inst, {"model": "leontief", "oracle_max": 1, "optima": 2, "agent": 0,
                  "witnesses": [((0, 1, 0), (2, 3, 1)), ((2, 3, 0), (0, 1, 1))]}


def _validate(inst: Instance, expected: dict) -> None:
    model = UtilityModel.parse(expected["model"])
    value, _ = _optimum(inst, model)
    if value != expected["oracle_max"]:
        raise FigureMismatch(f"optimum {value}, expected {expected['oracle_max']}")
    if "witnesses" in expected:
        found = set(max_welfare(inst, model).witnesses)
        want = {Matching.from_triples(mu) for mu in expected["witnesses"]}
        if found != want:
            raise FigureMismatch(f"optima {sorted(found)}, expected {sorted(want)}")


def gen_figure(family: str, model: UtilityModel | str | None = None, k: int = 1,
               validate: bool = True) -> tuple[Instance, dict]:
    """Build a named worst-case family and its expected values.

    ``model`` applies to ``fig5`` only and ``k`` to ``bad-sd`` only.  With
    ``validate`` the optimum is recomputed and compared before returning.
    """
    family = family.lower().replace("_", "-")
    if family == "fig2":
        inst, exp = fig2()
    elif family == "fig3":
        inst, exp = fig3()
    elif family == "fig4":
        inst, exp = fig4()
    elif family == "fig5":
        inst, exp = fig5(model or ADDITIVE)
    elif family == "fig6":
        inst, exp = fig6()
    elif family in ("fig6-symmetric", "fig6symmetric"):
        inst, exp = fig6_symmetric()
    elif family in ("bad-sd", "badsd"):
        inst, exp = bad_sd(k)
    elif family == "parity-fixture":
        inst, exp = parity_fixture()
    else:
        raise InstanceError(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")
    if validate:
        _validate(inst, exp)
    return inst, exp


# --------------------------------------------------------------------------- 3SAT gadget

Literal = tuple[int, bool]


@dataclass(frozen=True)
class Cnf3:
    """CNF over variables ``0..num_vars-1``; a literal is ``(variable, is_positive)``.

    Clauses have exactly three distinct variables unless ``relaxed`` is set,
    which admits one to three (used for small illustrative fixtures).
    """

    num_vars: int
    clauses: tuple[tuple[Literal, ...], ...]
    relaxed: bool = False

    def __post_init__(self):
        clauses = tuple(tuple((int(v), bool(p)) for v, p in c) for c in self.clauses)
        object.__setattr__(self, "clauses", clauses)
        for c in clauses:
            if not self.relaxed and len(c) != 3:
                raise InstanceError(f"clause {c} does not have exactly 3 literals")
            if not 1 <= len(c) <= 3:
                raise InstanceError(f"clause {c} must have 1 to 3 literals")
            names = [v for v, _ in c]
            if len(set(names)) != len(names):
                raise InstanceError(f"clause {c} repeats a variable")
            if any(not 0 <= v < self.num_vars for v in names):
                raise InstanceError(f"clause {c} uses an unknown variable")
        used = {v for c in clauses for v, _ in c}
        if used != set(range(self.num_vars)):
            raise InstanceError("every variable must occur in some clause")

    @classmethod
    def from_dimacs(cls, num_vars: int, clauses: Iterable[Iterable[int]],
                    relaxed: bool = False) -> "Cnf3":
        """Literals as nonzero ints: ``k`` is variable ``k-1``, ``-k`` its negation."""
        return cls(num_vars, tuple(tuple((abs(x) - 1, x > 0) for x in c) for c in clauses),
                   relaxed)

    def occurrences(self, var: int) -> list[tuple[int, bool]]:
        """(clause index, polarity) for each occurrence of ``var``, in clause order."""
        return [(j, p) for j, c in enumerate(self.clauses) for v, p in c if v == var]

    def satisfied(self, assignment: Sequence[bool]) -> int:
        return sum(any(assignment[v] == p for v, p in c) for c in self.clauses)

    def to_json(self) -> dict:
        return {"num_vars": self.num_vars,
                "clauses": [[(v + 1) * (1 if p else -1) for v, p in c] for c in self.clauses],
                "relaxed": self.relaxed}

    @classmethod
    def from_json(cls, data) -> "Cnf3":
        return cls.from_dimacs(data["num_vars"], data["clauses"], data.get("relaxed", False))


def sat_max_clauses(cnf: Cnf3) -> int:
    """Largest number of simultaneously satisfiable clauses, by trying every assignment."""
    if cnf.num_vars > 20:
        raise InstanceError("sat_max_clauses supports at most 20 variables")
    if not cnf.clauses:
        return 0
    return max(cnf.satisfied(a) for a in itertools.product((False, True), repeat=cnf.num_vars))


@dataclass(frozen=True)
class VariableGadget:
    a_agents: tuple[int, ...]
    b_agents: tuple[int, ...]  # b_1 .. b_2d; odd tags at even positions of this tuple
    rooms: tuple[int, ...]

    @property
    def odd(self) -> tuple[int, ...]:
        return self.b_agents[0::2]

    @property
    def even(self) -> tuple[int, ...]:
        return self.b_agents[1::2]


@dataclass(frozen=True)
class ReductionMap:
    cnf: Cnf3
    clause_agents: tuple[int, ...]
    clause_rooms: tuple[int, ...]
    gadgets: tuple[VariableGadget, ...]
    dummy_rooms: tuple[int, ...]
    dummy_agents: tuple[int, ...] = field(default=())

    def to_json(self) -> dict:
        return {"cnf": self.cnf.to_json(),
                "clause_agents": list(self.clause_agents),
                "clause_rooms": list(self.clause_rooms),
                "gadgets": [{"a": list(g.a_agents), "b": list(g.b_agents), "rooms": list(g.rooms)}
                            for g in self.gadgets],
                "dummy_rooms": list(self.dummy_rooms),
                "dummy_agents": list(self.dummy_agents)}

    @classmethod
    def from_json(cls, data) -> "ReductionMap":
        return cls(Cnf3.from_json(data["cnf"]), tuple(data["clause_agents"]),
                   tuple(data["clause_rooms"]),
                   tuple(VariableGadget(tuple(g["a"]), tuple(g["b"]), tuple(g["rooms"]))
                         for g in data["gadgets"]),
                   tuple(data["dummy_rooms"]), tuple(data.get("dummy_agents", ())))

    def literal_agent(self, clause: int, var: int) -> int:
        """The b-agent that serves ``var``'s literal in ``clause``."""
        for t, (j, positive) in enumerate(self.cnf.occurrences(var)):
            if j == clause:
                g = self.gadgets[var]
                return g.b_agents[2 * t] if positive else g.b_agents[2 * t + 1]
        raise InstanceError(f"variable {var} does not occur in clause {clause}")


def from_3sat(cnf: Cnf3) -> tuple[Instance, ReductionMap]:
    """Binary symmetric Leontief instance whose optimum encodes MAX-SAT on ``cnf``.

    Each clause gets an agent that likes a room of its own.  A variable with d
    occurrences gets a-agents a_1..a_d, b-agents b_1..b_2d and rooms r_1..r_d:
    b_{2t-1} and b_{2t} like r_t, b_{2t} and b_{2t+1} like a_t (b_2d and b_1
    like a_d).  The t-th occurrence wires b_{2t-1} (positive literal) or
    b_{2t} (negative literal) to its clause agent.  Rooms nobody values pad
    the instance so that there are half as many rooms as agents.
    """
    m = len(cnf.clauses)
    next_agent = 0
    next_room = 0

    def agents(count):
        nonlocal next_agent
        out = tuple(range(next_agent, next_agent + count))
        next_agent += count
        return out

    def rooms(count):
        nonlocal next_room
        out = tuple(range(next_room, next_room + count))
        next_room += count
        return out

    clause_agents = agents(m)
    clause_rooms = rooms(m)
    gadgets = []
    for var in range(cnf.num_vars):
        d = len(cnf.occurrences(var))
        gadgets.append(VariableGadget(agents(d), agents(2 * d), rooms(d)))
    dummy_agents = agents(1) if next_agent % 2 else ()
    dummy_rooms = rooms(next_agent // 2 - next_room)
    rmap = ReductionMap(cnf, clause_agents, clause_rooms, tuple(gadgets), dummy_rooms,
                        dummy_agents)

    agent_edges = []
    room_edges = [(c, r) for c, r in zip(clause_agents, clause_rooms)]
    for var, g in enumerate(gadgets):
        d = len(g.a_agents)
        b = g.b_agents
        for t in range(d):
            room_edges += [(b[2 * t], g.rooms[t]), (b[2 * t + 1], g.rooms[t])]
            agent_edges += [(b[2 * t + 1], g.a_agents[t]),
                            (b[(2 * t + 2) % (2 * d)], g.a_agents[t])]
        for t, (clause, positive) in enumerate(cnf.occurrences(var)):
            agent_edges.append((b[2 * t] if positive else b[2 * t + 1], clause_agents[clause]))
    n = next_agent // 2
    names = [""] * next_agent
    rnames = [""] * n
    for j, (c, r) in enumerate(zip(clause_agents, clause_rooms)):
        names[c], rnames[r] = f"c{j + 1}", f"rc{j + 1}"
    for var, g in enumerate(gadgets):
        for t, x in enumerate(g.a_agents):
            names[x] = f"a{var + 1}_{t + 1}"
        for t, x in enumerate(g.b_agents):
            names[x] = f"b{var + 1}_{t + 1}"
        for t, r in enumerate(g.rooms):
            rnames[r] = f"r{var + 1}_{t + 1}"
    for s, x in enumerate(dummy_agents):
        names[x] = f"dummy{s + 1}"
    for s, r in enumerate(dummy_rooms):
        rnames[r] = f"rdummy{s + 1}"
    inst = Instance.from_edges(n, agent_edges, room_edges, symmetric=True,
                               labels=_labels(names, rnames))
    return inst, rmap


def expected_optimum(cnf: Cnf3) -> int:
    """One satisfied b-agent per occurrence plus one per satisfiable clause."""
    return sum(len(c) for c in cnf.clauses) + sat_max_clauses(cnf)


def matching_from_assignment(inst: Instance, rmap: ReductionMap,
                             assignment: Sequence[bool]) -> Matching:
    """The matching with welfare (occurrences + satisfied clauses) built from an assignment.

    In a true variable's gadget the even b-agents take the rooms with the
    a-agents they like, leaving the odd ones free for positive literals;
    a false variable does the opposite.
    """
    cnf = rmap.cnf
    if len(assignment) != cnf.num_vars:
        raise InstanceError("assignment length must equal the number of variables")
    triples = []
    free_b: list[int] = []
    for var, g in enumerate(rmap.gadgets):
        d = len(g.a_agents)
        b = g.b_agents
        for t in range(d):
            if assignment[var]:
                triples.append(Triple.of(b[2 * t + 1], g.a_agents[t], g.rooms[t]))
            else:
                triples.append(Triple.of(b[2 * t], g.a_agents[t - 1], g.rooms[t]))
        free_b += list(g.odd if assignment[var] else g.even)
    for j, clause in enumerate(cnf.clauses):
        served = next((rmap.literal_agent(j, v) for v, p in clause
                       if assignment[v] == p and rmap.literal_agent(j, v) in free_b), None)
        partner = served if served is not None else free_b[0]
        free_b.remove(partner)
        triples.append(Triple.of(rmap.clause_agents[j], partner, rmap.clause_rooms[j]))
    rest = free_b + list(rmap.dummy_agents)
    for s, r in enumerate(rmap.dummy_rooms):
        triples.append(Triple.of(rest[2 * s], rest[2 * s + 1], r))
    return Matching.from_triples(triples)


def assignment_from_matching(inst: Instance, rmap: ReductionMap, mu: Matching) -> list[bool]:
    """Read a truth value per gadget: true when its even b-agents are satisfied.

    Gadgets where neither parity is satisfied default to true.
    """
    utils = _leontief_utils(inst, mu)
    out = []
    for g in rmap.gadgets:
        odd = sum(utils[x] for x in g.odd)
        even = sum(utils[x] for x in g.even)
        out.append(not (odd > even))
    return out


def _leontief_utils(inst: Instance, mu: Matching) -> tuple:
    return agent_utilities(inst, LEONTIEF, mu)


def gadget_consistent(inst: Instance, rmap: ReductionMap, mu: Matching) -> bool:
    """Within every variable gadget, satisfied b-agents are all odd or all even."""
    utils = _leontief_utils(inst, mu)
    for g in rmap.gadgets:
        if any(utils[x] for x in g.odd) and any(utils[x] for x in g.even):
            return False
    return True


def max_triple_weight(inst: Instance, model: UtilityModel = LEONTIEF):
    return max(inst.triple_weight_table(model).values())


def reduction_welfare(inst: Instance, mu: Matching):
    return welfare(inst, LEONTIEF, mu)


def all_small_cnfs(max_vars: int = 3, max_clauses: int = 2) -> list[Cnf3]:
    """Every 3-CNF (clauses as sorted literal sets, in a fixed order) within the size limits
    in which all variables occur, up to reordering of clauses."""
    out = []
    for nv in range(3, max_vars + 1):
        lits = []
        for vars_ in itertools.combinations(range(nv), 3):
            for pol in itertools.product((True, False), repeat=3):
                lits.append(tuple(zip(vars_, pol)))
        for mc in range(1, max_clauses + 1):
            for clauses in itertools.combinations_with_replacement(lits, mc):
                used = {v for c in clauses for v, _ in c}
                if used == set(range(nv)):
                    out.append(Cnf3(nv, clauses))
    return out


FIG7_CNF = Cnf3(2, (((0, False), (1, True)), ((0, True), (1, False))), relaxed=True)
