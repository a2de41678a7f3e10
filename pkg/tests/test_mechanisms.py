from __future__ import annotations

import functools
import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from roommatch import ADDITIVE, LEONTIEF, Instance, InstanceError, Matching, max_welfare
from roommatch.generators import gen_figure, gen_random, gen_random_weighted
from roommatch.instance import ShapeKind, classify
from roommatch.mechanisms import (BOUNDS, MECHANISM_IDS, AgentEdgesFirst, Edge, EdgePickPolicy,
                                  IndexOrder, check_sigma, lt_maximal, lt_serial_dictatorship,
                                  make_runner, naive_maximal, parity_mechanism,
                                  precedence_search, reduction_chain, serial_dictatorship,
                                  triangle_then_l, welfare_prioritized_sd,
                                  welfare_set_reduction)


def test_sigma_validation():
    inst = Instance.zeros(1)
    assert check_sigma(inst, None) == (0, 1)
    with pytest.raises(InstanceError):
        check_sigma(inst, [0, 0])


def test_unknown_mechanism():
    with pytest.raises(InstanceError):
        make_runner("nope", LEONTIEF)


@pytest.mark.parametrize("name", MECHANISM_IDS)
def test_every_mechanism_returns_consistent_result(name):
    inst = gen_random(2, 0.5, seed=11)
    res = make_runner(name, LEONTIEF)(inst)
    assert res.welfare == sum(res.per_agent_utility)
    assert res.matching == Matching(res.matching.triples)
    assert res == make_runner(name, LEONTIEF)(inst)
    assert "welfare" in res.to_json()


# ---------------------------------------------------------------- naive maximal

def test_naive_empty_graph():
    res = naive_maximal(Instance.zeros(2))
    assert res.welfare == 0
    assert res.matching == Matching.from_triples([(0, 1, 0), (2, 3, 1)])


def test_naive_fig2_scripted():
    inst, exp = gen_figure("fig2")
    res = naive_maximal(inst, EdgePickPolicy.scripted(exp["script"]), LEONTIEF)
    assert res.welfare == 0 and exp["oracle_max"] == 6


def test_naive_fig3_scripted():
    inst, exp = gen_figure("fig3")
    res = naive_maximal(inst, EdgePickPolicy.scripted(exp["script"]), ADDITIVE)
    assert res.welfare == 2 and exp["oracle_max"] == 8


def test_naive_rejects_bad_scripts():
    inst, _ = gen_figure("fig2")
    with pytest.raises(InstanceError):
        naive_maximal(inst, EdgePickPolicy.scripted([(0, 3, False)]))
    with pytest.raises(InstanceError):
        naive_maximal(gen_random_weighted(1, seed=1, values=(2,)))


def test_agent_first_fig3_takes_pair_with_room():
    inst, _ = gen_figure("fig3")
    res = naive_maximal(inst, AgentEdgesFirst, ADDITIVE)
    assert res.trace[0].rule == "agent-edge" and res.trace[1].rule == "pair-room"
    assert res.welfare == 8


def test_edge_str():
    assert str(Edge(0, 2, True)) == "a1->r3"


# ---------------------------------------------------------------- L/T maximal

def test_lt_single_triangle():
    inst = Instance.from_edges(2, [(1, 2)], [(1, 1), (2, 1)], symmetric=True)
    res = lt_maximal(inst)
    assert (1, 2, 1) in res.matching.triples and res.welfare == 2


def test_lt_fig4_scripted():
    inst, exp = gen_figure("fig4")
    res = lt_maximal(inst, EdgePickPolicy.scripted(exp["script"]))
    assert res.welfare == 1 and exp["oracle_max"] == 6


def test_lt_no_triples():
    inst = Instance.from_edges(2, [(0, 1)], [(2, 0)])
    assert lt_maximal(inst).welfare == 0
    assert max_welfare(inst, LEONTIEF).max_welfare == 0


def test_lt_agent_first_unsupported():
    with pytest.raises(InstanceError):
        lt_maximal(Instance.zeros(1), AgentEdgesFirst)


@pytest.mark.parametrize("seed", range(40))
def test_lt_output_is_maximal(seed):
    inst = gen_random(3, 0.5, symmetric=True, seed=seed)
    res = lt_maximal(inst)
    picked = {t for t in res.matching.triples
              if any(r.rule in ("index", "scripted") and r.triple == t for r in res.trace)}
    used_a = {a for t in picked for a in t[:2]}
    used_r = {t.room for t in picked}
    for i, j in itertools.combinations(range(6), 2):
        for r in range(3):
            if i in used_a or j in used_a or r in used_r:
                continue
            assert classify(inst, i, j, r).kind is ShapeKind.OTHER


# ---------------------------------------------------------------- triangle-then-L

def test_ttl_unique_triangle_first():
    inst = Instance.from_edges(2, [(0, 3)], [(0, 1), (3, 1)], symmetric=True)
    res = triangle_then_l(inst, LEONTIEF)
    assert res.trace[0].triple == (0, 3, 1)


def test_ttl_fig5_leontief():
    inst, _ = gen_figure("fig5", "leontief")
    res = triangle_then_l(inst, LEONTIEF)
    weights = inst.triple_weight_table(LEONTIEF)
    assert weights[res.trace[0].triple] == 1
    assert res.welfare == 2 == max_welfare(inst, LEONTIEF).max_welfare


@pytest.mark.parametrize("seed", range(30))
def test_ttl_weights_non_increasing(seed):
    inst = gen_random_weighted(3, seed=seed)
    res = triangle_then_l(inst, ADDITIVE)
    w = inst.triple_weight_table(ADDITIVE)
    picks = [w[r.triple] for r in res.trace]
    assert picks == sorted(picks, reverse=True)


# ---------------------------------------------------------------- serial dictatorships

def test_lt_sd_first_agent_gets_pair():
    inst = Instance.from_edges(2, [(2, 0)], [(2, 1)])
    res = lt_serial_dictatorship(inst, [2, 0, 1, 3])
    assert res.per_agent_utility[2] == 1
    assert res.trace[0].triple == (0, 2, 1)


def test_lt_sd_everyone_skipped():
    res = lt_serial_dictatorship(Instance.zeros(2), [3, 1, 2, 0])
    assert res.welfare == 0 and all(r.rule != "pick" for r in res.trace)


def test_lt_sd_requires_binary():
    with pytest.raises(InstanceError):
        lt_serial_dictatorship(gen_random_weighted(1, values=(3,)))


def test_wpsd_parks_agent_with_nothing_left():
    # a1 likes only a2, who leaves first with a3; a1 values no room
    inst = Instance.from_edges(2, [(0, 1), (1, 2)], [(1, 0)])
    res = welfare_prioritized_sd(inst, [1, 0, 2, 3])
    assert res.trace[0].triple == (1, 2, 0)
    assert res.trace[1].rule == "park"


def test_wpsd_parked_agent_is_still_a_partner():
    inst = Instance.from_edges(2, [(3, 0)], [])
    res = welfare_prioritized_sd(inst, [0, 1, 2, 3])
    assert res.welfare == 1 and res.matching.partner[3] == 0


def test_wpsd_prefers_next_agent_in_sigma():
    inst = Instance.from_edges(2, [(0, 1), (0, 3)], [])
    assert welfare_prioritized_sd(inst, [0, 3, 1, 2]).matching.partner[0] == 3
    assert welfare_prioritized_sd(inst, [0, 1, 3, 2]).matching.partner[0] == 1


def test_plain_sd_bad_family():
    inst, exp = gen_figure("bad-sd", k=1)
    res = serial_dictatorship(inst, ADDITIVE, exp["sigma"])
    assert res.welfare == exp["sd_welfare"] == 3


# ---------------------------------------------------------------- optimal mechanisms

def test_wsr_fig5_example():
    inst, _ = gen_figure("fig5", "leontief")
    chain = reduction_chain(inst, LEONTIEF, [0, 1, 2, 3])
    assert all(mu.pairs() == {(0, 1), (2, 3)} for mu in chain[-1])
    assert len(chain[-1]) == 2
    res = welfare_set_reduction(inst, LEONTIEF, [0, 1, 2, 3])
    assert res.matching.partner[0] == 1
    res = welfare_set_reduction(inst, LEONTIEF, [1, 0, 2, 3])
    assert res.matching.partner[1] == 2


def test_wsr_unique_optimum():
    inst = Instance.from_edges(2, [(0, 1), (2, 3)], [(0, 0), (1, 0), (2, 1), (3, 1)],
                               symmetric=True)
    results = {welfare_set_reduction(inst, LEONTIEF, s).matching
               for s in itertools.permutations(range(4))}
    assert results == {Matching.from_triples([(0, 1, 0), (2, 3, 1)])}


@pytest.mark.parametrize("seed", range(20))
def test_wsr_chain_shrinks(seed):
    inst = gen_random(2, 0.5, seed=seed)
    chain = reduction_chain(inst, LEONTIEF, [3, 1, 0, 2])
    assert all(set(b) <= set(a) and b for a, b in zip(chain, chain[1:]))


def test_precedence_fallback_and_scope():
    res = precedence_search(Instance.zeros(2))
    assert res.welfare == 0 and res.matching == Matching.from_triples([(0, 1, 0), (2, 3, 1)])
    with pytest.raises(InstanceError):
        precedence_search(Instance.zeros(1), model=ADDITIVE)


@pytest.mark.parametrize("seed", range(30))
def test_precedence_search_is_optimal(seed):
    inst = gen_random(3, 0.5, seed=seed)
    res = precedence_search(inst, list(reversed(range(6))))
    assert res.welfare == max_welfare(inst, LEONTIEF).max_welfare


def _precedes(sigma, a, b):
    pos = {x: k for k, x in enumerate(sigma)}
    diff = set(a) ^ set(b)
    return -1 if min(diff, key=pos.get) in a else 1


@settings(max_examples=80, deadline=None)
@given(sigma=st.permutations(range(6)), k=st.integers(1, 6))
def test_combination_order_is_precedence_order(sigma, k):
    combos = list(itertools.combinations(sigma, k))
    ranked = sorted(combos, key=functools.cmp_to_key(
        lambda a, b: 0 if set(a) == set(b) else _precedes(sigma, a, b)))
    assert combos == ranked


def test_parity_mechanism_fixture():
    inst, exp = gen_figure("parity-fixture")
    res = parity_mechanism(inst, LEONTIEF)
    assert res.welfare == exp["oracle_max"]
    assert res.per_agent_utility[0] == 0


def test_bounds_table_keys():
    assert all(name in MECHANISM_IDS for name, _ in BOUNDS)
