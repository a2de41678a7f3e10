from __future__ import annotations

from fractions import Fraction

import pytest

from roommatch import ADDITIVE, LEONTIEF, CapExceeded, Instance, InstanceError, Matching
from roommatch.audit import (BinaryAll, BinarySymmetric, MisreportDomain, RationalGrid, audit,
                             check_observation_1, reproduce_impossibility, verify_witness)
from roommatch.generators import gen_figure, gen_random


def test_domain_sizes_and_reports():
    inst = gen_random(2, 0.5, symmetric=True, seed=2)
    reports = list(BinaryAll.reports(inst, 1))
    assert len(reports) == BinaryAll.size(2) == 32
    assert all(v[1] == 0 for v, _ in reports)
    assert len(set(reports)) == 32
    sym = list(BinarySymmetric.reports(inst, 1))
    assert len(sym) == 4
    assert all(v == tuple(inst.v[j][1] for j in range(4)) for v, _ in sym)
    assert len(list(RationalGrid((0, 1, 2)).reports(inst, 0))) == 3 ** 5


def test_domain_checks():
    with pytest.raises(InstanceError):
        BinarySymmetric.check(gen_figure("fig6")[0])
    with pytest.raises(InstanceError):
        MisreportDomain.parse("everything")
    assert MisreportDomain.parse("grid", ["1/2", 3]).values == (Fraction(1, 2), 3)


def test_ttl_fig5_leontief_has_no_witness():
    inst, _ = gen_figure("fig5", "leontief")
    rep = audit("triangle-then-l", inst, LEONTIEF)
    assert rep.witness is None and rep.searched == 4 * 32


def test_parity_fixture_witness_reverifies():
    inst, exp = gen_figure("parity-fixture")
    rep = audit("parity", inst, LEONTIEF)
    w = rep.witness
    assert w is not None and w.agent == exp["agent"]
    assert w.deviating_utility > w.honest_utility
    assert verify_witness("parity", inst, LEONTIEF, w)
    assert rep.to_json()["witness"]["agent"] == 0


def test_symmetric_domain_is_a_subset():
    inst = Instance.from_edges(2, [(0, 1)], [(0, 0), (1, 1)], symmetric=True)
    full = audit("parity", inst, LEONTIEF, BinaryAll)
    sym = audit("parity", inst, LEONTIEF, BinarySymmetric)
    assert sym.searched < full.searched
    if sym.witness is not None:
        assert full.witness is not None


def test_custom_callable_mechanism():
    inst = Instance.from_edges(2, [(0, 1)], [(0, 0)])

    def grumpy(report: Instance):
        from roommatch.mechanisms import make_result
        # rewards agent 0 for claiming to like room 1
        ts = [(0, 1, 0), (2, 3, 1)] if report.v_hat[0][1] else [(0, 2, 0), (1, 3, 1)]
        return make_result(report, LEONTIEF, Matching.from_triples(ts))

    rep = audit(grumpy, inst, LEONTIEF, agents=[0])
    assert rep.mechanism == "grumpy" and rep.witness.misreport_vhat[1] == 1


def test_grid_domain_search():
    inst = Instance(1, ((0, 1), (1, 0)), ((1,), (2,)))
    rep = audit("triangle-then-l", inst, ADDITIVE, RationalGrid((0, 1)))
    assert rep.witness is None and rep.searched == 8


def test_audit_cap():
    with pytest.raises(CapExceeded):
        audit("triangle-then-l", Instance.zeros(4), LEONTIEF)


def test_observation_1_examples():
    inst = Instance.from_edges(2, [(0, 1), (1, 0)], [(0, 0), (1, 0)])
    mu = Matching.from_triples([(0, 1, 0), (2, 3, 1)])
    # agent 0 is satisfied; hiding its interest can only lower perceived welfare
    assert check_observation_1(inst, 0, mu, ((0, 0, 0, 0), (0, 0)))
    other = Matching.from_triples([(0, 2, 0), (1, 3, 1)])
    assert check_observation_1(inst, 0, other, ((0, 0, 1, 0), (1, 1)))
    with pytest.raises(InstanceError):
        check_observation_1(inst, 0, mu, ((0, 2, 0, 0), (0, 0)))


@pytest.mark.parametrize("alpha", [1, Fraction(1, 2), Fraction(1, 4)])
@pytest.mark.parametrize("model", ["additive", "leontief"])
def test_fig5_impossibility(alpha, model):
    rep = reproduce_impossibility("fig5", alpha, model)
    assert rep.verified
    assert rep.honest_max == 2
    assert all(len({mu.pairs() for mu in d.passing}) == 1 for d in rep.deviations)


@pytest.mark.parametrize("family, perceived", [("fig6", 3), ("fig6-symmetric", 4)])
def test_fig6_impossibility(family, perceived):
    rep = reproduce_impossibility(family, 1)
    assert rep.verified
    assert all(d.perceived_max == perceived and len(d.passing) == 1 for d in rep.deviations)
    assert rep.to_json()["verified"] is True


def test_impossibility_alpha_ranges():
    with pytest.raises(InstanceError):
        reproduce_impossibility("fig6", Fraction(1, 2))
    with pytest.raises(InstanceError):
        reproduce_impossibility("fig5", 0)
    with pytest.raises(InstanceError):
        reproduce_impossibility("fig9", 1)
