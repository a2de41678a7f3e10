"""Matching mechanisms and a name-based registry used by the CLI and the audit."""
from __future__ import annotations

from typing import Callable, Sequence

from ..instance import ADDITIVE, LEONTIEF, Instance, InstanceError, UtilityModel
from .base import MechanismResult, TraceRecord, check_sigma, make_result
from .greedy import triangle_then_l
from .maximal import (AgentEdgesFirst, Edge, EdgePickPolicy, IndexOrder, PolicyKind, lt_maximal,
                      naive_maximal)
from .optimal import (parity_mechanism, precedence_search, reduction_chain,
                      welfare_set_reduction)
from .serial import lt_serial_dictatorship, serial_dictatorship, welfare_prioritized_sd

Runner = Callable[[Instance], MechanismResult]

MECHANISM_IDS = (
    "naive-maximal",
    "naive-maximal-agent-first",
    "lt-maximal",
    "triangle-then-l",
    "lt-sd",
    "wp-sd",
    "welfare-set-reduction",
    "precedence-search",
    "parity",
)

# worst-case welfare ratio each mechanism guarantees, keyed by (id, model)
BOUNDS = {
    ("triangle-then-l", LEONTIEF): (1, 3),
    ("triangle-then-l", ADDITIVE): (1, 3),
    ("lt-maximal", LEONTIEF): (1, 6),
    ("naive-maximal", ADDITIVE): (1, 4),
    ("naive-maximal-agent-first", ADDITIVE): (1, 4),
    ("wp-sd", ADDITIVE): (1, 7),
    ("welfare-set-reduction", LEONTIEF): (1, 1),
    ("welfare-set-reduction", ADDITIVE): (1, 1),
    ("precedence-search", LEONTIEF): (1, 1),
    ("parity", LEONTIEF): (1, 1),
    ("parity", ADDITIVE): (1, 1),
}


def make_runner(name: str, model: UtilityModel, sigma: Sequence[int] | None = None,
                agent: int = 0, oracle_cap: int | None = None) -> Runner:
    """Bind a mechanism id to a model and ordering, giving ``instance -> result``."""
    if name == "naive-maximal":
        return lambda inst: naive_maximal(inst, IndexOrder, model)
    if name == "naive-maximal-agent-first":
        return lambda inst: naive_maximal(inst, AgentEdgesFirst, model)
    if name == "lt-maximal":
        return lambda inst: lt_maximal(inst, IndexOrder, model)
    if name == "triangle-then-l":
        return lambda inst: triangle_then_l(inst, model)
    if name == "lt-sd":
        return lambda inst: lt_serial_dictatorship(inst, sigma, model)
    if name == "wp-sd":
        return lambda inst: welfare_prioritized_sd(inst, sigma, model)
    if name == "welfare-set-reduction":
        return lambda inst: welfare_set_reduction(inst, model, sigma, oracle_cap)
    if name == "precedence-search":
        return lambda inst: precedence_search(inst, sigma, model)
    if name == "parity":
        return lambda inst: parity_mechanism(inst, model, agent, oracle_cap)
    raise InstanceError(f"unknown mechanism {name!r}; choose from {', '.join(MECHANISM_IDS)}")


def run(name: str, inst: Instance, model: UtilityModel, sigma: Sequence[int] | None = None,
        **kwargs) -> MechanismResult:
    return make_runner(name, model, sigma, **kwargs)(inst)


__all__ = [
    "AgentEdgesFirst", "BOUNDS", "Edge", "EdgePickPolicy", "IndexOrder", "MECHANISM_IDS",
    "MechanismResult", "PolicyKind", "TraceRecord", "check_sigma", "lt_maximal",
    "lt_serial_dictatorship", "make_result", "make_runner", "naive_maximal", "parity_mechanism",
    "precedence_search", "reduction_chain", "run", "serial_dictatorship", "triangle_then_l",
    "welfare_prioritized_sd", "welfare_set_reduction",
]
