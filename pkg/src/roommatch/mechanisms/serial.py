"""Serial-dictatorship variants: agents act one at a time in the order ``sigma``."""
from __future__ import annotations

from typing import Sequence

from ..instance import ADDITIVE, LEONTIEF, Instance, Matching, Triple, UtilityModel, require_binary
from .base import MechanismResult, TraceRecord, check_sigma, complete, make_result


def lt_serial_dictatorship(inst: Instance, sigma: Sequence[int] | None = None,
                           model: UtilityModel = LEONTIEF) -> MechanismResult:
    """Each unmatched agent in turn takes the smallest (partner, room) it likes both of.

    Only the acting agent's own report matters, so the partner need not like
    it back.  Agents with no such option are skipped and completed at the end.
    """
    require_binary(inst, "lt_serial_dictatorship")
    sigma = check_sigma(inst, sigma)
    m, n = 2 * inst.n, inst.n
    free_a = set(range(m))
    free_r = set(range(n))
    chosen = []
    trace = []
    for i in sigma:
        if i not in free_a:
            continue
        options = [(j, r) for j in sorted(free_a) if j != i and inst.v[i][j] == 1
                   for r in sorted(free_r) if inst.v_hat[i][r] == 1]
        if not options:
            trace.append(TraceRecord("skip", None, 0, f"agent {i}"))
            continue
        j, r = options[0]
        t = Triple.of(i, j, r)
        chosen.append(t)
        free_a -= {i, j}
        free_r.discard(r)
        trace.append(TraceRecord("pick", t, len(options), f"agent {i}"))
    triples, rest = complete(n, chosen)
    return make_result(inst, model, Matching.from_triples(triples), trace + rest)


def welfare_prioritized_sd(inst: Instance, sigma: Sequence[int] | None = None,
                           model: UtilityModel = ADDITIVE) -> MechanismResult:
    """Serial dictatorship that sets aside agents with nothing left to gain.

    An agent whose best remaining (partner, room) is worth zero is parked: it
    loses its turn but stays available as a partner, and whoever is still
    parked at the end is matched with the leftover rooms.  Otherwise it takes
    its best pair; ties prefer the partner that comes next in ``sigma`` after
    the chooser, then the lowest room index.
    """
    sigma = check_sigma(inst, sigma)
    m = len(sigma)
    pos = {a: k for k, a in enumerate(sigma)}
    u = inst.utility_table(model)
    queue = list(sigma)
    free_r = list(range(inst.n))
    parked: list[int] = []
    chosen = []
    trace = []
    while queue:
        i = queue.pop(0)
        best = None
        ties = 0
        for j in queue + parked:
            # ties favour the agents following i in sigma, wrapping around
            after = (pos[j] - pos[i]) % m
            for r in free_r:
                key = (u[i][j][r], -after, -r)
                if best is None or key > best[0]:
                    best, ties = (key, j, r), 1
                elif key[0] == best[0][0]:
                    ties += 1
        if best is None or best[0][0] == 0:
            parked.append(i)
            trace.append(TraceRecord("park", None, 0, f"agent {i}"))
            continue
        _, j, r = best
        t = Triple.of(i, j, r)
        chosen.append(t)
        (queue if j in queue else parked).remove(j)
        free_r.remove(r)
        trace.append(TraceRecord("pick", t, ties, f"agent {i}"))
    triples, rest = complete(inst.n, chosen, parked, free_r)
    return make_result(inst, model, Matching.from_triples(triples), trace + rest)


def serial_dictatorship(inst: Instance, model: UtilityModel, sigma: Sequence[int] | None = None,
                        skip_valueless: bool = True) -> MechanismResult:
    """Plain serial dictatorship over (partner, room) bundles.

    Each unmatched agent takes its favourite remaining bundle, ties broken by
    the lowest partner index and then the lowest room index.  With
    ``skip_valueless`` agents that value nothing at all do not get a turn.
    Leftovers are completed in index order.
    """
    sigma = check_sigma(inst, sigma)
    m, n = 2 * inst.n, inst.n
    u = inst.utility_table(model)
    free_a = set(range(m))
    free_r = set(range(n))
    chosen = []
    trace = []
    for i in sigma:
        if i not in free_a or len(free_a) < 2:
            continue
        if skip_valueless and not (any(inst.v[i]) or any(inst.v_hat[i])):
            continue
        best = max(((u[i][j][r], -j, -r) for j in free_a if j != i for r in free_r))
        t = Triple.of(i, -best[1], -best[2])
        chosen.append(t)
        free_a -= {t.lo, t.hi}
        free_r.discard(t.room)
        trace.append(TraceRecord("pick", t, 0, f"agent {i}"))
    triples, rest = complete(n, chosen)
    return make_result(inst, model, Matching.from_triples(triples), trace + rest)
