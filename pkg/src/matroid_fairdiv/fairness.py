"""Fairness predicates over arbitrary monotone valuations, plus the three
named counterexample instances.

Approximation factors are exact ``Fraction`` values; ``v >= alpha * mu`` is
checked as ``v * q >= p * mu``.  Agents and goods are 0-indexed, so the
fixture goods ``1..m`` from their original statements appear as ``0..m-1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Any

from .errors import CapabilityError, ContractError
from .oracles import (
    MAX_MMS_GOODS,
    exhaustive_allocation_scan,
    exhaustive_mms,
    exhaustive_mms_witness,
)
from .limits import goods_cap
from .shares import SharesTable, mms_fast
from .union import PartialAllocation
from .valuations import (
    BinaryXOSValuation,
    ExplicitMatroid,
    Instance,
    WeightedRankValuation,
)

MAX_CERTIFY_AGENTS = 3
MAX_CERTIFY_GOODS = 10


@dataclass(frozen=True)
class FairnessVerdict:
    predicate: str
    holds: bool
    witness: dict | None = None

    def __bool__(self) -> bool:
        return self.holds

    def to_dict(self) -> dict:
        return {"predicate": self.predicate, "holds": self.holds, "witness": _plain(self.witness)}


def _plain(x: Any) -> Any:
    if isinstance(x, (set, frozenset)):
        return sorted(x)
    if isinstance(x, dict):
        return {k: _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    return x


def as_fraction(alpha) -> Fraction:
    a = Fraction(alpha)
    if not 0 < a <= 1:
        raise ContractError(f"alpha must lie in (0, 1], got {a}")
    return a


def _bundles(inst: Instance, alloc) -> tuple:
    if not isinstance(alloc, PartialAllocation):
        alloc = PartialAllocation(inst.m, tuple(alloc))
    if alloc.n != inst.n:
        raise ContractError(f"allocation has {alloc.n} bundles for {inst.n} agents")
    return alloc.bundles


def is_envy_free(inst: Instance, alloc) -> FairnessVerdict:
    bundles = _bundles(inst, alloc)
    for i, v in enumerate(inst.valuations):
        own = v.value(bundles[i])
        for j, b in enumerate(bundles):
            if i != j and v.value(b) > own:
                return FairnessVerdict("ef", False, {"agent": i, "envied": j,
                                                     "own": own, "other": v.value(b)})
    return FairnessVerdict("ef", True)


def is_ef1(inst: Instance, alloc) -> FairnessVerdict:
    bundles = _bundles(inst, alloc)
    for i, v in enumerate(inst.valuations):
        own = v.value(bundles[i])
        for j, b in enumerate(bundles):
            if i == j or not b:
                continue
            if all(v.value(b - {g}) > own for g in sorted(b)):
                return FairnessVerdict("ef1", False, {"agent": i, "envied": j, "own": own})
    return FairnessVerdict("ef1", True)


def is_mms(inst: Instance, alloc, alpha=1, shares: SharesTable | None = None) -> FairnessVerdict:
    """``v_i(A_i) >= alpha * mu_i`` for every agent, using the supplied shares."""
    if shares is None:
        raise ContractError("is_mms needs a shares table")
    a = as_fraction(alpha)
    bundles = _bundles(inst, alloc)
    if len(shares) != inst.n:
        raise ContractError(f"shares table has {len(shares)} entries for {inst.n} agents")
    for i, v in enumerate(inst.valuations):
        val, mu = v.value(bundles[i]), shares[i]
        if val * a.denominator < a.numerator * mu:
            return FairnessVerdict("mms", False, {"agent": i, "value": val, "share": mu,
                                                  "alpha": a})
    return FairnessVerdict("mms", True)


def pair_share(v, union: frozenset) -> int:
    """``mu(2, union)`` by the fast path for rank valuations, else exhaustively."""
    if v.is_matroid_rank:
        return mms_fast(v, 2, union)[0]
    if len(union) > goods_cap(MAX_MMS_GOODS):
        raise CapabilityError(
            f"pairwise share of {v.kind} valuation on {len(union)} goods is beyond the brute-force limit"
        )
    return exhaustive_mms(v, 2, union)


def is_pmms(inst: Instance, alloc, alpha=1, *, brute: bool = False) -> FairnessVerdict:
    """``v_i(A_i) >= alpha * mu_i(2, A_i | A_j)`` for every ordered pair ``i != j``.

    Unassigned goods play no part.  ``brute=True`` forces exhaustive shares.
    """
    a = as_fraction(alpha)
    bundles = _bundles(inst, alloc)
    for i, v in enumerate(inst.valuations):
        own = v.value(bundles[i])
        for j in range(inst.n):
            if i == j:
                continue
            union = bundles[i] | bundles[j]
            mu = exhaustive_mms(v, 2, union) if brute else pair_share(v, union)
            if own * a.denominator < a.numerator * mu:
                return FairnessVerdict("pmms", False, {"agent": i, "other": j, "value": own,
                                                       "share": mu, "alpha": a})
    return FairnessVerdict("pmms", True)


def certify_no_mms_allocation(inst: Instance) -> FairnessVerdict:
    """Exhaustively decide whether any complete allocation meets every brute share.

    ``holds`` is True when nonexistence is certified; the witness then
    carries the shares.  Otherwise the witness is a satisfying allocation.
    """
    if inst.n > MAX_CERTIFY_AGENTS or inst.m > goods_cap(MAX_CERTIFY_GOODS):
        raise CapabilityError(
            f"certify_no_mms_allocation is limited to {MAX_CERTIFY_AGENTS} agents and "
            f"{goods_cap(MAX_CERTIFY_GOODS)} goods"
        )
    shares = [exhaustive_mms(v, inst.n) for v in inst.valuations]
    vals = inst.valuations

    def meets(bundles):
        return all(v.value(b) >= mu for v, b, mu in zip(vals, bundles, shares))

    found = exhaustive_allocation_scan(inst, meets)
    if found is None:
        return FairnessVerdict("no-mms", True, {"shares": shares, "allocations": inst.n ** inst.m})
    return FairnessVerdict("no-mms", False, {"shares": shares, "allocation": [sorted(b) for b in found]})


@dataclass(frozen=True)
class Fixture:
    name: str
    instance: Instance
    reference_allocation: PartialAllocation | None = None
    note: str = ""


def _shift(sets):
    return [[g - 1 for g in s] for s in sets]


def _xos4() -> Fixture:
    m = 4
    v1 = BinaryXOSValuation(m, _shift([[1, 2], [3, 4]]))
    v2 = BinaryXOSValuation(m, _shift([[1, 3], [2, 4]]))
    return Fixture("xos-4", Instance(m, (v1, v2)),
                   note="binary XOS agents; every allocation has welfare below mu_1 + mu_2 = 4")


def _wrank4() -> Fixture:
    m = 4
    pairs = [[a, b] for a in range(1, 5) for b in range(a + 1, 5)]
    fam1 = [p for p in pairs if p not in ([1, 3], [2, 4])]
    fam2 = [p for p in pairs if p not in ([1, 4], [2, 3])]
    weights = [2, 2, 1, 1]
    v1 = WeightedRankValuation(ExplicitMatroid(m, _shift(fam1)), weights)
    v2 = WeightedRankValuation(ExplicitMatroid(m, _shift(fam2)), weights)
    return Fixture("wrank-4", Instance(m, (v1, v2)),
                   note="weighted rank agents (weights 2,2,1,1); no MMS allocation exists")


def _ef1_not_pmms() -> Fixture:
    m = 6
    # |X & {1,2}| <= 1 and |X & {3,4}| <= 1: bases pick one of each pair plus 5 and 6
    bases = [[a, b, 5, 6] for a in (1, 2) for b in (3, 4)]
    v1 = ExplicitMatroid(m, _shift(bases))
    v2 = ExplicitMatroid(m, _shift([[1, 2, 3, 4, 5, 6]]))
    ref = PartialAllocation(m, (frozenset({4, 5}), frozenset({0, 1, 2, 3})))
    return Fixture("ef1-not-pmms", Instance(m, (v1, v2)), ref,
                   note="reference allocation is envy-free but neither MMS nor PMMS")


_BUILDERS = {"xos-4": _xos4, "wrank-4": _wrank4, "ef1-not-pmms": _ef1_not_pmms}


def fixtures() -> list[Fixture]:
    """Fresh copies of the named instances (query counters start at zero)."""
    return [build() for build in _BUILDERS.values()]


def fixture(name: str) -> Fixture:
    try:
        return _BUILDERS[name]()
    except KeyError:
        raise ContractError(f"unknown fixture {name!r}; known: {sorted(_BUILDERS)}") from None


def replay_violation(inst: Instance, alloc, verdict: FairnessVerdict) -> bool:
    """Re-derive a false verdict's violation from raw value queries."""
    if verdict.holds or verdict.witness is None:
        return False
    bundles = _bundles(inst, alloc)
    w = verdict.witness
    if verdict.predicate == "ef":
        v = inst.valuations[w["agent"]]
        return v.value(bundles[w["envied"]]) > v.value(bundles[w["agent"]])
    if verdict.predicate == "ef1":
        v = inst.valuations[w["agent"]]
        own, other = v.value(bundles[w["agent"]]), bundles[w["envied"]]
        return bool(other) and all(v.value(other - {g}) > own for g in other)
    if verdict.predicate == "mms":
        a = w["alpha"]
        v = inst.valuations[w["agent"]]
        return v.value(bundles[w["agent"]]) * a.denominator < a.numerator * w["share"]
    if verdict.predicate == "pmms":
        a = w["alpha"]
        i, j = w["agent"], w["other"]
        v = inst.valuations[i]
        mu, parts = exhaustive_mms_witness(v, 2, bundles[i] | bundles[j])
        return (mu == w["share"] and min(v.value(p) for p in parts) == mu
                and v.value(bundles[i]) * a.denominator < a.numerator * mu)
    raise ContractError(f"cannot replay predicate {verdict.predicate!r}")
