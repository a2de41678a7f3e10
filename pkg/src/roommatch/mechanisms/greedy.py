from __future__ import annotations

from ..instance import Instance, Matching, UtilityModel
from .base import MechanismResult, TraceRecord, make_result


def triangle_then_l(inst: Instance, model: UtilityModel) -> MechanismResult:
    """Repeatedly take the free triple with the largest combined utility.

    Weights never change, so one pass over the triples sorted by
    (-weight, lo, hi, room) reproduces the repeated argmax with
    lexicographic tie-breaking.
    """
    weights = inst.triple_weight_table(model)
    ranked = sorted(weights, key=lambda t: (-weights[t], t))
    used_a: set[int] = set()
    used_r: set[int] = set()
    chosen = []
    trace = []
    for k, t in enumerate(ranked):
        if t.lo in used_a or t.hi in used_a or t.room in used_r:
            continue
        w = weights[t]
        ties = 1
        for s in ranked[k + 1:]:
            if weights[s] != w:
                break
            if not (s.lo in used_a or s.hi in used_a or s.room in used_r):
                ties += 1
        chosen.append(t)
        used_a.update((t.lo, t.hi))
        used_r.add(t.room)
        trace.append(TraceRecord("max-weight", t, ties))
        if len(chosen) == inst.n:
            break
    return make_result(inst, model, Matching.from_triples(chosen), trace)
