import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from matroid_fairdiv.algorithms import alg_mms, alg_pmms, welfare
from matroid_fairdiv.errors import CapabilityError, ContractError
from matroid_fairdiv.fairness import fixture, is_ef1, is_mms, is_pmms
from matroid_fairdiv.oracles import exhaustive_max_welfare, exhaustive_mms
from matroid_fairdiv.shares import brute_shares_for_instance
from matroid_fairdiv.valuations import (
    GraphicMatroid,
    Instance,
    is_independent,
    max_independent_subset,
    rank,
)

from _support import one_based, seeded_instance


@pytest.fixture
def appd():
    return fixture("ef1-not-pmms").instance


def test_welfare_examples(appd):
    assert welfare(appd, [frozenset(), frozenset()]) == 0
    assert welfare(appd, [one_based(5, 6), one_based(1, 2, 3, 4)]) == 6
    assert welfare(fixture("xos-4").instance, [one_based(1, 2), one_based(3, 4)]) == 3
    with pytest.raises(ContractError):
        welfare(appd, [one_based(1), one_based(1)])


def test_single_agent():
    inst = seeded_instance(5, 1, 7, "graphic")
    v = inst.valuations[0]
    mms = alg_mms(inst)
    assert mms.allocation.bundles == (frozenset(range(7)),)
    assert mms.values == [rank(v, range(7))]
    pmms = alg_pmms(inst)
    assert pmms.allocation.bundles == (max_independent_subset(v, range(7)),)
    assert pmms.steps == 0


def test_alg_mms_on_fixture(appd):
    rep = alg_mms(appd)
    assert rep.welfare == 6
    assert all(x >= 3 for x in rep.values)
    assert rep.shares.values == [3, 3]
    assert not rep.unassigned


def test_alg_pmms_on_fixture(appd):
    rep = alg_pmms(appd)
    assert rep.values == [3, 3]
    sizes = [len(b) for b in rep.allocation.bundles]
    assert abs(sizes[0] - sizes[1]) <= 1
    assert is_pmms(appd, rep.allocation.bundles, brute=True)


def test_non_rank_instance_refused():
    with pytest.raises(CapabilityError):
        alg_mms(fixture("xos-4").instance)
    with pytest.raises(CapabilityError):
        alg_pmms(fixture("wrank-4").instance)


@pytest.mark.parametrize("seed", range(5))
def test_alg_mms_partition_instance_is_mms(seed):
    inst = seeded_instance(100 + seed, 3, 8, "partition")
    rep = alg_mms(inst)
    assert is_mms(inst, rep.allocation.bundles, shares=brute_shares_for_instance(inst))


@pytest.mark.parametrize("seed", range(5))
def test_alg_pmms_graphic_instance_is_pmms(seed):
    inst = seeded_instance(200 + seed, 2, 8, "graphic")
    rep = alg_pmms(inst)
    assert is_pmms(inst, rep.allocation.bundles, brute=True)


def test_alg_pmms_moves_goods_from_big_bundle():
    # a star and a triangle on shared vertices: the welfare-max start is lopsided
    edges = [(0, 1), (0, 2), (0, 3), (0, 4), (1, 2), (2, 3)]
    inst = Instance(6, (GraphicMatroid(edges), GraphicMatroid(edges)))
    rep = alg_pmms(inst)
    assert is_pmms(inst, rep.allocation.bundles, brute=True)
    assert rep.welfare == exhaustive_max_welfare(inst)[0]


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32), n=st.integers(1, 4), m=st.integers(1, 8))
def test_alg_mms_properties(seed, n, m):
    inst = seeded_instance(seed, n, m)
    rep = alg_mms(inst)
    assert rep.steps <= n * m
    assert rep.welfare == sum(rep.values) == exhaustive_max_welfare(inst)[0]
    assert rep.allocation.assigned == frozenset(range(m))
    for v, x in zip(inst.valuations, rep.values):
        assert x >= exhaustive_mms(v, n)
    # each transfer closes the total shortfall by one
    mu = rep.shares.values
    start = [len(b) for b in alg_mms_start(inst)]
    gap = sum(max(0, a - b) for a, b in zip(mu, start))
    for entry in rep.trace:
        gap -= 1
        assert entry["shortfall"] == gap
    assert gap == 0


def alg_mms_start(inst):
    from matroid_fairdiv.union import max_welfare_allocation

    return max_welfare_allocation(inst).bundles


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32), n=st.integers(1, 4), m=st.integers(1, 8))
def test_alg_pmms_properties(seed, n, m):
    inst = seeded_instance(seed, n, m)
    rep = alg_pmms(inst)
    assert rep.steps <= m * m
    assert rep.welfare == exhaustive_max_welfare(inst)[0]
    for v, b in zip(inst.valuations, rep.allocation.bundles):
        assert is_independent(v, b)
    pots = [e["potential"] for e in rep.trace]
    assert all(a > b for a, b in zip(pots, pots[1:]))
    assert is_pmms(inst, rep.allocation.bundles, brute=True)
    assert is_ef1(inst, rep.allocation.bundles)


def test_query_budget_two_agents_six_goods():
    # measured maximum 277 over seeds 0..49, frozen as a regression bound
    for seed in range(20):
        inst = seeded_instance(seed, 2, 6)
        alg_mms(inst)
        assert inst.query_count() <= 400
