"""Maximin shares for matroid-rank valuations.

``mms_fast`` takes a maximum independent set of the ``k``-fold union of the
agent's matroid, split into ``k`` independent parts, and then moves goods
from the largest part to the smallest until part sizes differ by at most
one.  The smallest part size is then the maximin share.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .errors import CapabilityError, ContractError, InvariantError
from .oracles import exhaustive_mms, exhaustive_mms_witness
from .union import kfold_union_rank
from .valuations import Instance, MatroidRank, Valuation, subset


def balance_parts(v: MatroidRank, parts: Iterable[frozenset]) -> tuple[tuple, int]:
    """Rebalance independent parts so their sizes differ by at most one.

    Donor is the largest part, recipient the smallest (lowest index on
    ties), and the moved good is the lowest-index good of the donor that
    keeps the recipient independent.  Returns the parts and the move count.
    """
    parts = [set(p) for p in parts]
    moves = 0
    limit = sum(len(p) for p in parts) ** 2 + 1
    while True:
        sizes = [len(p) for p in parts]
        big, small = max(sizes), min(sizes)
        if big - small <= 1:
            return tuple(frozenset(p) for p in parts), moves
        donor, recipient = sizes.index(big), sizes.index(small)
        target = parts[recipient]
        for g in sorted(parts[donor]):
            if v.value(target | {g}) == len(target) + 1:
                break
        else:
            raise InvariantError(
                f"no good of part {donor} extends part {recipient}; augmentation property violated"
            )
        parts[donor].discard(g)
        target.add(g)
        moves += 1
        if moves > limit:
            raise InvariantError("balancing did not converge within the squared-size bound")


def mms_fast(v: Valuation, k: int, goods: Iterable[int] | None = None) -> tuple[int, tuple]:
    """Maximin share ``mu(k, goods)`` of a matroid-rank valuation, with witness parts.

    The witness is ``k`` disjoint independent subsets of ``goods`` whose
    smallest has exactly ``mu`` goods.
    """
    if not v.is_matroid_rank:
        raise CapabilityError(f"mms_fast needs a matroid rank valuation, got {v.kind}")
    if not isinstance(k, int) or k < 1:
        raise ContractError(f"k must be a positive integer, got {k!r}")
    s = v.ground if goods is None else subset(goods, v.m)
    _, parts = kfold_union_rank(v, k, s)
    parts, _ = balance_parts(v, parts)
    return min(len(p) for p in parts), parts


def mms_brute(v: Valuation, k: int, goods: Iterable[int] | None = None) -> int:
    """Maximin share by exhaustive enumeration; any monotone valuation."""
    return exhaustive_mms(v, k, goods)


@dataclass
class SharesTable:
    """``mu_i(k, goods)`` for every agent, with a witness partition each."""

    k: int
    goods: frozenset
    values: list[int]
    witnesses: list[tuple] = field(default_factory=list)

    def __getitem__(self, agent: int) -> int:
        if not 0 <= agent < len(self.values):
            raise ContractError(f"no share entry for agent {agent}")
        return self.values[agent]

    def __len__(self) -> int:
        return len(self.values)

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "goods": sorted(self.goods),
            "values": list(self.values),
            "witnesses": [[sorted(p) for p in w] for w in self.witnesses],
        }


def shares_for_instance(inst: Instance, k: int | None = None,
                        goods: Iterable[int] | None = None) -> SharesTable:
    """Fast shares for every agent; ``k`` defaults to the number of agents."""
    inst.require_rank()
    k = inst.n if k is None else k
    s = inst.goods if goods is None else subset(goods, inst.m)
    values, witnesses = [], []
    for v in inst.valuations:
        mu, parts = mms_fast(v, k, s)
        values.append(mu)
        witnesses.append(parts)
    return SharesTable(k, s, values, witnesses)


def brute_shares_for_instance(inst: Instance, k: int | None = None,
                              goods: Iterable[int] | None = None) -> SharesTable:
    """Shares for every agent by exhaustive enumeration (any valuation class)."""
    k = inst.n if k is None else k
    s = inst.goods if goods is None else subset(goods, inst.m)
    values, witnesses = [], []
    for v in inst.valuations:
        mu, parts = exhaustive_mms_witness(v, k, s)
        values.append(mu)
        witnesses.append(parts)
    return SharesTable(k, s, values, witnesses)
