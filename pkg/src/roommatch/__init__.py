"""Roommate matching: pairing 2n agents into n rooms under Leontief or additive utilities.

Exact welfare optimum by enumeration or set packing, approximation and
strategyproof mechanisms, manipulation audits, and instance generators.
"""
from .instance import (ADDITIVE, LEONTIEF, Instance, InstanceError, Matching, ShapeKind, Triple,
                       TripleShape, UtilityModel, agent_utilities, classify, preference_graph,
                       relabel, utility, welfare)
from .oracle import CapExceeded, OracleResult, enumerate_matchings, max_welfare

__all__ = [
    "ADDITIVE", "LEONTIEF", "CapExceeded", "Instance", "InstanceError", "Matching",
    "OracleResult", "ShapeKind", "Triple", "TripleShape", "UtilityModel", "agent_utilities",
    "classify", "enumerate_matchings", "max_welfare", "preference_graph", "relabel", "utility",
    "welfare",
]
