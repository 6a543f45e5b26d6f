from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from matroid_fairdiv.algorithms import alg_mms, alg_pmms
from matroid_fairdiv.errors import CapabilityError, ContractError
from matroid_fairdiv.fairness import (
    as_fraction,
    certify_no_mms_allocation,
    fixture,
    fixtures,
    is_ef1,
    is_envy_free,
    is_mms,
    is_pmms,
    replay_violation,
)
from matroid_fairdiv.oracles import exhaustive_max_welfare
from matroid_fairdiv.shares import brute_shares_for_instance, shares_for_instance
from matroid_fairdiv.valuations import (
    ExplicitMatroid,
    Instance,
    PartitionMatroid,
    UniformMatroid,
)

from _support import one_based, seeded_instance


@pytest.fixture
def appd():
    return fixture("ef1-not-pmms")


def all_allocations(m, n):
    for labels in product(range(n), repeat=m):
        yield tuple(frozenset(g for g in range(m) if labels[g] == a) for a in range(n))


def test_envy_free_examples(appd):
    same = Instance(4, (UniformMatroid(4, 4),) * 2)
    assert is_envy_free(same, [{0, 1}, {2, 3}])
    assert is_envy_free(appd.instance, appd.reference_allocation)
    inst = Instance(1, (UniformMatroid(1, 1),) * 2)
    verdict = is_envy_free(inst, [set(), {0}])
    assert not verdict
    assert verdict.witness["agent"] == 0 and verdict.witness["envied"] == 1
    assert replay_violation(inst, [set(), {0}], verdict)


def test_ef1_examples(appd):
    assert is_ef1(appd.instance, appd.reference_allocation)
    additive = Instance(2, (UniformMatroid(2, 2),) * 2)
    verdict = is_ef1(additive, [set(), {0, 1}])
    assert not verdict
    assert replay_violation(additive, [set(), {0, 1}], verdict)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32), n=st.integers(1, 3), m=st.integers(0, 6), data=st.data())
def test_envy_free_implies_ef1(seed, n, m, data):
    inst = seeded_instance(seed, n, max(m, 1))
    labels = data.draw(st.lists(st.integers(0, n - 1), min_size=inst.m, max_size=inst.m))
    bundles = [frozenset(g for g, a in enumerate(labels) if a == k) for k in range(n)]
    if is_envy_free(inst, bundles):
        assert is_ef1(inst, bundles)
    for pred in (is_envy_free, is_ef1):
        v = pred(inst, bundles)
        assert v.holds or replay_violation(inst, bundles, v)


def test_mms_examples():
    xos = fixture("xos-4").instance
    shares = brute_shares_for_instance(xos)
    assert shares.values == [2, 2]
    assert not any(is_mms(xos, a, shares=shares) for a in all_allocations(4, 2))
    single = Instance(3, (UniformMatroid(3, 2),))
    assert is_mms(single, [{0, 1, 2}], shares=shares_for_instance(single))


def test_mms_alpha_is_exact():
    inst = Instance(3, (UniformMatroid(3, 3),) * 2)
    shares = shares_for_instance(inst)  # both 1
    bundles = [set(), {0, 1, 2}]
    assert not is_mms(inst, bundles, Fraction(1, 3), shares)
    v = is_mms(inst, bundles, 1, shares)
    assert v.witness == {"agent": 0, "value": 0, "share": 1, "alpha": Fraction(1)}
    assert replay_violation(inst, bundles, v)
    with pytest.raises(ContractError):
        as_fraction(0)
    with pytest.raises(ContractError):
        as_fraction(Fraction(3, 2))
    with pytest.raises(ContractError):
        is_mms(inst, bundles)


def test_pmms_examples(appd):
    inst = appd.instance
    verdict = is_pmms(inst, appd.reference_allocation)
    assert not verdict
    assert verdict.witness["agent"] == 0
    assert verdict.witness["value"] == 2 and verdict.witness["share"] == 3
    assert replay_violation(inst, appd.reference_allocation, verdict)
    assert is_pmms(inst, alg_pmms(inst).allocation)
    single = Instance(2, (UniformMatroid(2, 1),))
    assert is_pmms(single, [{0}])


def test_pmms_brute_agrees_with_fast(appd):
    inst = appd.instance
    for a in all_allocations(6, 2):
        assert bool(is_pmms(inst, a)) == bool(is_pmms(inst, a, brute=True))


def test_pmms_implies_ef1_on_fixture(appd):
    inst = appd.instance
    for a in all_allocations(6, 2):
        if is_pmms(inst, a):
            assert is_ef1(inst, a)


def test_certify_examples():
    xos = certify_no_mms_allocation(fixture("xos-4").instance)
    assert xos.holds and xos.witness == {"shares": [2, 2], "allocations": 16}
    wrank = certify_no_mms_allocation(fixture("wrank-4").instance)
    assert wrank.holds and wrank.witness["shares"] == [3, 3]
    single = certify_no_mms_allocation(Instance(3, (UniformMatroid(3, 2),)))
    assert not single.holds
    assert single.witness["allocation"] == [[0, 1, 2]]
    found = certify_no_mms_allocation(fixture("ef1-not-pmms").instance)
    assert not found.holds


def test_certify_caps():
    with pytest.raises(CapabilityError):
        certify_no_mms_allocation(Instance(11, (UniformMatroid(11, 1),)))
    with pytest.raises(CapabilityError):
        certify_no_mms_allocation(Instance(2, (UniformMatroid(2, 1),) * 4))


def test_xos_welfare_gap():
    assert exhaustive_max_welfare(fixture("xos-4").instance)[0] == 3


def test_fixtures_listing():
    names = [f.name for f in fixtures()]
    assert names == ["xos-4", "wrank-4", "ef1-not-pmms"]
    inst = fixture("ef1-not-pmms").instance
    # agent 1: one of {1,2}, one of {3,4}, and both 5 and 6
    m1 = inst.valuations[0]
    assert m1.value(one_based(1, 2, 3, 4, 5, 6)) == 4
    assert m1.value(one_based(1, 2)) == 1 and m1.value(one_based(5, 6)) == 2
    assert inst.valuations[1].value(range(6)) == 6
    with pytest.raises(ContractError):
        fixture("nope")


def test_fixture_queries_start_at_zero():
    inst = fixture("ef1-not-pmms").instance
    alg_mms(inst)
    assert fixture("ef1-not-pmms").instance.query_count() == 0


def test_replay_rejects_holding_verdict(appd):
    v = is_ef1(appd.instance, appd.reference_allocation)
    assert not replay_violation(appd.instance, appd.reference_allocation, v)


def test_non_matroid_explicit_family_still_checks():
    v = ExplicitMatroid(2, [[0], [1]])
    inst = Instance(2, (v, PartitionMatroid(2, [[0, 1]], [2])))
    assert is_ef1(inst, [{0}, {1}])
