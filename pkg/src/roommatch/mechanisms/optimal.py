"""Welfare-optimal mechanisms that pick among optimal matchings by agent priority."""
from __future__ import annotations

import itertools
from typing import Sequence

from ..instance import LEONTIEF, Instance, InstanceError, Matching, Triple, UtilityModel, \
    agent_utilities, require_binary
from ..oracle import max_welfare
from ..setpacking import solve_feasibility
from .base import MechanismResult, TraceRecord, check_sigma, make_result


def reduction_chain(inst: Instance, model: UtilityModel, sigma: Sequence[int] | None = None,
                    cap: int | None = None) -> list[tuple[Matching, ...]]:
    """The shrinking candidate sets: all optima, then one filter per agent in ``sigma``."""
    sigma = check_sigma(inst, sigma)
    current = max_welfare(inst, model, cap).witnesses
    chain = [current]
    for j in sigma:
        utils = [agent_utilities(inst, model, mu)[j] for mu in current]
        best = max(utils)
        current = tuple(mu for mu, x in zip(current, utils) if x == best)
        chain.append(current)
    return chain


def welfare_set_reduction(inst: Instance, model: UtilityModel, sigma: Sequence[int] | None = None,
                          cap: int | None = None) -> MechanismResult:
    """Among the welfare-optimal matchings, let each agent in ``sigma`` keep only its favourites.

    The smallest matching in canonical order is returned from the final set.
    """
    chain = reduction_chain(inst, model, sigma, cap)
    trace = [TraceRecord("optima", None, len(chain[0]))]
    trace += [TraceRecord("filter", None, len(s), f"agent {j}")
              for j, s in zip(check_sigma(inst, sigma), chain[1:])]
    return make_result(inst, model, min(chain[-1]), trace)


def _satisfaction_masks(inst: Instance) -> list[tuple[Triple, int, int]]:
    """Each triple with the bitmask of its two agents and of those it satisfies."""
    u = inst.utility_table(LEONTIEF)
    m = 2 * inst.n
    out = []
    for i in range(m):
        for j in range(i + 1, m):
            pair = (1 << i) | (1 << j)
            for r in range(inst.n):
                sat = (u[i][j][r] == 1) << i | (u[j][i][r] == 1) << j
                out.append((Triple(i, j, r), pair, sat))
    return out


def precedence_search(inst: Instance, sigma: Sequence[int] | None = None,
                      model: UtilityModel = LEONTIEF) -> MechanismResult:
    """Find the largest set of satisfied agents, preferring agents early in ``sigma``.

    Candidate sets are tried from largest to smallest.  Within one size they
    are visited in lexicographic order of their members' positions in
    ``sigma``, so a set wins over another when the first agent (in ``sigma``)
    on which they differ belongs to it.  For a candidate set, only triples
    that satisfy exactly its members are allowed, and an exact cover by such
    triples is searched for.  Binary Leontief valuations only.
    """
    require_binary(inst, "precedence_search")
    if model is not LEONTIEF:
        raise InstanceError("precedence_search is defined for the Leontief model")
    sigma = check_sigma(inst, sigma)
    n, m = inst.n, 2 * inst.n
    table = _satisfaction_masks(inst)
    can_satisfy = 0
    for _, _, sat in table:
        can_satisfy |= sat
    order = [a for a in sigma if can_satisfy >> a & 1]
    trace = []
    tried = 0
    for k in range(len(order), 0, -1):
        for members in itertools.combinations(order, k):
            mask = 0
            for a in members:
                mask |= 1 << a
            tried += 1
            allowed = [t for t, pair, sat in table if sat == mask & pair]
            sets = [(t.lo, t.hi, m + t.room) for t in allowed]
            packing = solve_feasibility(m + n, sets, n)
            if packing is not None:
                trace.append(TraceRecord("found", None, tried, f"satisfied {sorted(members)}"))
                mu = Matching.from_triples(allowed[k] for k in packing.chosen)
                return make_result(inst, model, mu, trace)
    trace.append(TraceRecord("fallback", None, tried))
    mu = Matching.from_triples(Triple(2 * r, 2 * r + 1, r) for r in range(n))
    return make_result(inst, model, mu, trace)


def parity_mechanism(inst: Instance, model: UtilityModel, agent: int = 0,
                     cap: int | None = None) -> MechanismResult:
    """Welfare-optimal but manipulable: the parity of the number of optima decides
    whether ``agent`` is favoured (odd) or disfavoured (even)."""
    inst.check_agent(agent)
    optima = max_welfare(inst, model, cap).witnesses
    favoured = len(optima) % 2 == 1
    pool = [mu for mu in optima
            if (agent_utilities(inst, model, mu)[agent] > 0) == favoured]
    chosen = min(pool) if pool else min(optima)
    trace = [TraceRecord("parity", None, len(optima), "odd" if favoured else "even")]
    return make_result(inst, model, chosen, trace)
