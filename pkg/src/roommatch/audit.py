"""Exhaustive search for profitable misreports, and checks of the impossibility constructions."""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable, Iterator, Sequence

from .instance import (ADDITIVE, LEONTIEF, Instance, InstanceError, Matching, UtilityModel,
                       Value, agent_utilities, format_value, require_binary, to_value,
                       value_to_json, welfare)
from .mechanisms import MechanismResult, make_runner
from .oracle import CapExceeded, enumerate_matchings, max_welfare

DEFAULT_AUDIT_CAP = 3
DEFAULT_GRID = (0, 1, 2, 4, 8)


class DomainKind(enum.Enum):
    BINARY_ALL = "binary-all"
    BINARY_SYMMETRIC = "binary-symmetric"
    RATIONAL_GRID = "grid"


@dataclass(frozen=True)
class MisreportDomain:
    """The reports an agent may switch to.

    ``binary-all`` allows any 0/1 rows.  ``binary-symmetric`` keeps the
    agent's compatibility row equal to what the others report about it, so
    only room values change.  ``grid`` draws every entry from ``values``; it
    can exhibit manipulations but never certifies their absence.
    """

    kind: DomainKind = DomainKind.BINARY_ALL
    values: tuple[Value, ...] = DEFAULT_GRID

    @classmethod
    def parse(cls, name: str, values: Sequence | None = None) -> "MisreportDomain":
        try:
            kind = DomainKind(name)
        except ValueError:
            raise InstanceError(f"unknown domain {name!r}") from None
        vals = tuple(to_value(x) for x in values) if values is not None else DEFAULT_GRID
        return cls(kind, vals)

    def check(self, inst: Instance) -> None:
        if self.kind is not DomainKind.RATIONAL_GRID:
            require_binary(inst, f"the {self.kind.value} domain")
        if self.kind is DomainKind.BINARY_SYMMETRIC and not inst.symmetric:
            raise InstanceError("the binary-symmetric domain needs a symmetric instance")

    def size(self, n: int) -> int:
        if self.kind is DomainKind.BINARY_ALL:
            return 2 ** (3 * n - 1)
        if self.kind is DomainKind.BINARY_SYMMETRIC:
            return 2 ** n
        return len(self.values) ** (3 * n - 1)

    def reports(self, inst: Instance, i: int) -> Iterator[tuple[tuple, tuple]]:
        """All (v row, v_hat row) reports of agent ``i`` in lexicographic order."""
        m, n = 2 * inst.n, inst.n
        if self.kind is DomainKind.BINARY_SYMMETRIC:
            v_row = tuple(inst.v[j][i] for j in range(m))
            for vh in itertools.product((0, 1), repeat=n):
                yield v_row, vh
            return
        alphabet = (0, 1) if self.kind is DomainKind.BINARY_ALL else self.values
        for combo in itertools.product(alphabet, repeat=m - 1 + n):
            others = combo[:m - 1]
            yield others[:i] + (0,) + others[i:], combo[m - 1:]


BinaryAll = MisreportDomain(DomainKind.BINARY_ALL)
BinarySymmetric = MisreportDomain(DomainKind.BINARY_SYMMETRIC)


def RationalGrid(values: Sequence = DEFAULT_GRID) -> MisreportDomain:
    return MisreportDomain(DomainKind.RATIONAL_GRID, tuple(to_value(x) for x in values))


@dataclass(frozen=True)
class ManipulationWitness:
    agent: int
    misreport_v: tuple[Value, ...]
    misreport_vhat: tuple[Value, ...]
    honest_utility: Value
    deviating_utility: Value
    honest_matching: Matching
    deviating_matching: Matching

    def to_json(self) -> dict:
        return {"agent": self.agent,
                "misreport_v": [value_to_json(x) for x in self.misreport_v],
                "misreport_vhat": [value_to_json(x) for x in self.misreport_vhat],
                "honest_utility": format_value(self.honest_utility),
                "deviating_utility": format_value(self.deviating_utility),
                "honest_matching": self.honest_matching.to_json()["triples"],
                "deviating_matching": self.deviating_matching.to_json()["triples"]}


@dataclass(frozen=True)
class AuditReport:
    mechanism: str
    domain: str
    witness: ManipulationWitness | None
    searched: int

    def to_json(self) -> dict:
        return {"mechanism": self.mechanism,
                "witness": self.witness.to_json() if self.witness else None,
                "domain": self.domain,
                "searched": self.searched}


Mechanism = Callable[[Instance], MechanismResult]


def audit(mechanism: str | Mechanism, inst: Instance, model: UtilityModel,
          domain: MisreportDomain = BinaryAll, sigma: Sequence[int] | None = None,
          cap: int | None = None, agents: Sequence[int] | None = None,
          oracle_cap: int | None = None, fixture_agent: int = 0) -> AuditReport:
    """Try every report of every agent and return the first profitable one.

    ``mechanism`` is a registered id or any callable from instance to result.
    Utilities are always measured with the true valuations.  Agents are
    tried in index order and reports in lexicographic order.
    """
    limit = DEFAULT_AUDIT_CAP if cap is None else cap
    if inst.n > limit:
        raise CapExceeded(f"n={inst.n} exceeds the audit cap of {limit}")
    domain.check(inst)
    if isinstance(mechanism, str):
        name = mechanism
        run = make_runner(mechanism, model, sigma, agent=fixture_agent, oracle_cap=oracle_cap)
    else:
        name = getattr(mechanism, "__name__", "custom")
        run = mechanism
    honest = run(inst)
    honest_u = honest.per_agent_utility
    searched = 0
    for i in (range(2 * inst.n) if agents is None else agents):
        inst.check_agent(i)
        truthful = (inst.v[i], inst.v_hat[i])
        for v_row, vh_row in domain.reports(inst, i):
            searched += 1
            if (v_row, vh_row) == truthful:
                continue
            dev = run(inst.with_report(i, v_row, vh_row))
            gained = agent_utilities(inst, model, dev.matching)[i]
            if gained > honest_u[i]:
                w = ManipulationWitness(i, tuple(v_row), tuple(vh_row), honest_u[i], gained,
                                        honest.matching, dev.matching)
                return AuditReport(name, domain.kind.value, w, searched)
    return AuditReport(name, domain.kind.value, None, searched)


def verify_witness(mechanism: str | Mechanism, inst: Instance, model: UtilityModel,
                   witness: ManipulationWitness, sigma: Sequence[int] | None = None,
                   fixture_agent: int = 0) -> bool:
    """Re-run both reports and confirm the deviation strictly pays under true values."""
    run = make_runner(mechanism, model, sigma, agent=fixture_agent) \
        if isinstance(mechanism, str) else mechanism
    honest = agent_utilities(inst, model, run(inst).matching)[witness.agent]
    lied = inst.with_report(witness.agent, witness.misreport_v, witness.misreport_vhat)
    gained = agent_utilities(inst, model, run(lied).matching)[witness.agent]
    return gained > honest and gained == witness.deviating_utility \
        and honest == witness.honest_utility


def check_observation_1(inst: Instance, i: int, mu: Matching,
                        misreport: tuple[Sequence, Sequence],
                        model: UtilityModel = LEONTIEF) -> bool:
    """Under binary Leontief utilities a misreport moves perceived welfare one way only.

    If agent ``i`` truly gets 1 in ``mu`` the perceived welfare of ``mu`` cannot
    exceed the true welfare; if it truly gets 0 it cannot fall below it.
    """
    require_binary(inst, "check_observation_1")
    lied = inst.with_report(i, *misreport)
    require_binary(lied, "check_observation_1")
    true_w = welfare(inst, model, mu)
    seen_w = welfare(lied, model, mu)
    if agent_utilities(inst, model, mu)[i] == 1:
        return seen_w <= true_w
    return seen_w >= true_w


# --------------------------------------------------------------------------- impossibility


@dataclass(frozen=True)
class Deviation:
    agent: int
    misreport_v: tuple[Value, ...]
    misreport_vhat: tuple[Value, ...]
    perceived_max: Value
    passing: tuple[Matching, ...]
    honest_utility: Value
    deviating_utility: Value
    holds: bool

    def to_json(self) -> dict:
        return {"agent": self.agent,
                "misreport_v": [value_to_json(x) for x in self.misreport_v],
                "misreport_vhat": [value_to_json(x) for x in self.misreport_vhat],
                "perceived_max": format_value(self.perceived_max),
                "passing": [m.to_json()["triples"] for m in self.passing],
                "honest_utility": format_value(self.honest_utility),
                "deviating_utility": format_value(self.deviating_utility),
                "holds": self.holds}


@dataclass(frozen=True)
class ImpossibilityReport:
    family: str
    model: UtilityModel
    alpha: Fraction
    honest_max: Value
    honest_optima: tuple[Matching, ...]
    deviations: tuple[Deviation, ...]
    verified: bool
    notes: tuple[str, ...] = field(default=())

    def to_json(self) -> dict:
        return {"family": self.family, "model": self.model.value,
                "alpha": format_value(self.alpha),
                "honest_max": format_value(self.honest_max),
                "honest_optima": [m.to_json()["triples"] for m in self.honest_optima],
                "deviations": [d.to_json() for d in self.deviations],
                "verified": self.verified, "notes": list(self.notes)}


def _passing(inst: Instance, model: UtilityModel, alpha: Fraction) -> tuple[Value, list[Matching]]:
    best = max_welfare(inst, model).max_welfare
    ok = [mu for mu in enumerate_matchings(inst.n)
          if welfare(inst, model, mu) >= alpha * best]
    return best, ok


def _deviation(inst: Instance, model: UtilityModel, alpha: Fraction, agent: int,
               v_row, vh_row, target_pairs: frozenset, honest_mu: Matching) -> Deviation:
    lied = inst.with_report(agent, v_row, vh_row)
    best, ok = _passing(lied, model, alpha)
    honest_u = agent_utilities(inst, model, honest_mu)[agent]
    gains = {agent_utilities(inst, model, mu)[agent] for mu in ok}
    holds = bool(ok) and all(mu.pairs() == target_pairs for mu in ok) \
        and min(gains) > honest_u
    return Deviation(agent, tuple(lied.v[agent]), tuple(lied.v_hat[agent]), best, tuple(ok),
                     honest_u, min(gains) if gains else 0, holds)


def reproduce_impossibility(family: str, alpha, model: UtilityModel | str = ADDITIVE
                            ) -> ImpossibilityReport:
    """Replay the two-step deviation argument on the small impossibility instances.

    ``fig5`` works for any ``0 < alpha <= 1`` in either model: starting from
    either optimal pairing, one agent of the other pairing inflates its value
    for a partner (and, under Leontief, its room values) to ``2/alpha``, which
    leaves the pairing it prefers as the only one within ``alpha`` of the
    optimum.  ``fig6`` (``alpha > 2/3``) and ``fig6-symmetric``
    (``alpha > 3/4``) are additive; there the deviating agent claims to like
    the first room.
    """
    from .generators import gen_figure

    alpha = Fraction(to_value(alpha))
    family = family.lower().replace("_", "-")
    model = UtilityModel.parse(model)
    if family == "fig5":
        if not 0 < alpha <= 1:
            raise InstanceError("fig5 needs 0 < alpha <= 1")
        inst, _ = gen_figure("fig5", model)
    elif family == "fig6":
        if not Fraction(2, 3) < alpha <= 1:
            raise InstanceError("fig6 needs 2/3 < alpha <= 1")
        model = ADDITIVE
        inst, _ = gen_figure("fig6")
    elif family in ("fig6-symmetric", "fig6symmetric"):
        if not Fraction(3, 4) < alpha <= 1:
            raise InstanceError("fig6-symmetric needs 3/4 < alpha <= 1")
        model = ADDITIVE
        inst, _ = gen_figure("fig6-symmetric")
    else:
        raise InstanceError(f"no impossibility construction for {family!r}")

    honest = max_welfare(inst, model)
    optima = honest.witnesses
    notes = []
    deviations = []
    if family == "fig5":
        # inflated value beta = 2/alpha - 1 + 1 (slack of one above the threshold)
        beta = 2 / alpha
        notes.append(f"beta = {format_value(to_value(beta))}")
        plan = [
            # from the pairing {a1a2, a3a4}: a2 gains by going with a3
            (1, 2, frozenset({(0, 3), (1, 2)}), frozenset({(0, 1), (2, 3)})),
            # from the pairing {a1a4, a2a3}: a1 gains by going with a2
            (0, 1, frozenset({(0, 1), (2, 3)}), frozenset({(0, 3), (1, 2)})),
        ]
        for agent, partner, target, start in plan:
            start_mu = min(mu for mu in optima if mu.pairs() == start)
            v_row = list(inst.v[agent])
            v_row[partner] = beta
            vh_row = inst.v_hat[agent] if model is ADDITIVE else (beta,) * inst.n
            deviations.append(_deviation(inst, model, alpha, agent, v_row, vh_row, target,
                                         start_mu))
        expected_optima = {frozenset({(0, 1), (2, 3)}), frozenset({(0, 3), (1, 2)})}
        optima_ok = {mu.pairs() for mu in optima} == expected_optima and honest.max_welfare == 2
    else:
        mu1 = Matching.from_triples(((0, 1, 0), (2, 3, 1)))
        mu2 = Matching.from_triples(((1, 2, 0), (0, 3, 1)))
        # under mu2 a1 misses a2; under mu1 a3 misses a2
        for agent, start, target in ((0, mu2, mu1), (2, mu1, mu2)):
            vh_row = list(inst.v_hat[agent])
            vh_row[0] = 1
            deviations.append(_deviation(inst, model, alpha, agent, inst.v[agent], vh_row,
                                         target.pairs(), start))
            lied = inst.with_report(agent, inst.v[agent], vh_row)
            res = max_welfare(lied, model)
            if res.witnesses != (target,):
                notes.append(f"agent {agent}: optimum not unique to the target matching")
                deviations[-1] = replace(deviations[-1], holds=False)
        want = 2 if family == "fig6" else 3
        optima_ok = set(optima) == {mu1, mu2} and honest.max_welfare == want
    verified = optima_ok and all(d.holds for d in deviations)
    return ImpossibilityReport(family, model, alpha, honest.max_welfare, optima,
                               tuple(deviations), verified, tuple(notes))
