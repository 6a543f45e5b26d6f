"""Exhaustive reference computations.

Nothing here imports the augmentation or balancing code; the oracles see
valuations only through value queries.  Every routine enforces a hard size
cap instead of silently approximating.  Enumeration orders are fixed, so a
"first witness" is deterministic: allocations are labelings of the goods
(ascending) by agents, read lexicographically with the lowest good most
significant.
"""

from __future__ import annotations

from typing import Callable, Iterable, Iterator, Sequence

import numpy as np

from .errors import CapabilityError, ContractError
from .limits import goods_cap, overridden, require_goods
from .valuations import Instance, Valuation, subset

MAX_WELFARE_GOODS = 10
MAX_WELFARE_AGENTS = 4
MAX_CONVOLUTION_GOODS = 16
MAX_MMS_GOODS = 12
MAX_MMS_PARTS = 4
MAX_SCAN_LABELINGS = 10**6


def value_table(v: Valuation, goods: Sequence[int]) -> np.ndarray:
    """``table[mask]`` is the value of the goods selected by ``mask`` from ``goods``."""
    size = len(goods)
    table = np.empty(1 << size, dtype=np.int64)
    for mask in range(1 << size):
        table[mask] = v.value(goods[p] for p in range(size) if mask >> p & 1)
    return table


def _goods_and_agents(inst: Instance, goods, agents) -> tuple[list[int], list[int]]:
    s = sorted(inst.goods if goods is None else subset(goods, inst.m))
    a = list(range(inst.n)) if agents is None else sorted(set(agents))
    if not a:
        raise ContractError("need at least one agent")
    for i in a:
        if not 0 <= i < inst.n:
            raise ContractError(f"agent {i} is outside 0..{inst.n - 1}")
    return s, a


def _labelings(n: int, size: int) -> np.ndarray:
    """All ``n**size`` labelings, row ``r`` being ``r`` written in base ``n``
    with the first good as the most significant digit."""
    idx = np.arange(n**size, dtype=np.int64)
    cols = [(idx // n ** (size - 1 - p)) % n for p in range(size)]
    if not cols:
        return np.zeros((1, 0), dtype=np.int64)
    return np.stack(cols, axis=1)


def exhaustive_max_welfare(inst: Instance, goods: Iterable[int] | None = None,
                           agents: Iterable[int] | None = None) -> tuple[int, tuple]:
    """Best welfare over all complete allocations of ``goods`` to ``agents``.

    Returns the welfare and the first optimal allocation, as a tuple of
    bundles indexed like ``agents``.
    """
    s, a = _goods_and_agents(inst, goods, agents)
    require_goods("exhaustive_max_welfare", len(s), MAX_WELFARE_GOODS)
    if len(a) > MAX_WELFARE_AGENTS and not overridden():
        raise CapabilityError(
            f"exhaustive_max_welfare: {len(a)} agents exceeds the limit of {MAX_WELFARE_AGENTS}"
        )
    n, size = len(a), len(s)
    labels = _labelings(n, size)
    weights = np.int64(1) << np.arange(size, dtype=np.int64)
    total = np.zeros(labels.shape[0], dtype=np.int64)
    for pos, i in enumerate(a):
        masks = ((labels == pos) * weights).sum(axis=1)
        total += value_table(inst.valuations[i], s)[masks]
    best = int(np.argmax(total))
    row = labels[best]
    bundles = tuple(frozenset(s[p] for p in range(size) if row[p] == pos) for pos in range(n))
    return int(total[best]), bundles


def convolution_rank(inst: Instance, goods: Iterable[int] | None = None,
                     agents: Iterable[int] | None = None) -> tuple[int, frozenset]:
    """``min_T |S - T| + sum_i v_i(T)`` over every ``T`` contained in ``S``.

    Returns the minimum and the first minimizing ``T`` (smallest mask).
    """
    s, a = _goods_and_agents(inst, goods, agents)
    require_goods("convolution_rank", len(s), MAX_CONVOLUTION_GOODS)
    size = len(s)
    masks = np.arange(1 << size, dtype=np.int64)
    popcount = np.zeros_like(masks)
    for p in range(size):
        popcount += masks >> p & 1
    total = size - popcount
    for i in a:
        total = total + value_table(inst.valuations[i], s)
    best = int(np.argmin(total))
    return int(total[best]), frozenset(s[p] for p in range(size) if best >> p & 1)


def set_partitions(size: int, max_blocks: int) -> Iterator[list[int]]:
    """Restricted growth strings of length ``size`` using at most ``max_blocks`` labels.

    ``a[0] = 0`` and ``a[p] <= 1 + max(a[:p])``; each string names one set
    partition of ``range(size)`` with blocks unordered.  Yields a shared
    list, mutated in place between iterations.
    """
    if size == 0:
        yield []
        return
    if max_blocks < 1:
        return
    a = [0] * size
    hi = [0] * size  # hi[p] = max(a[:p+1])
    while True:
        yield a
        p = size - 1
        while p > 0 and (a[p] > hi[p - 1] or a[p] + 1 >= max_blocks):
            p -= 1
        if p == 0:
            return
        a[p] += 1
        hi[p] = max(hi[p - 1], a[p])
        for q in range(p + 1, size):
            a[q] = 0
            hi[q] = hi[p]


def exhaustive_mms_witness(v: Valuation, k: int, goods: Iterable[int] | None = None) -> tuple[int, tuple]:
    """Maximin share of ``v`` for ``k`` parts of ``goods``, with an optimal partition.

    Parts may be empty, so ``k > |goods|`` yields ``v(empty)``.  The parts of
    one valuation are interchangeable, so only set partitions (restricted
    growth strings) are visited.
    """
    if not isinstance(k, int) or k < 1:
        raise ContractError(f"k must be a positive integer, got {k!r}")
    s = sorted(v.ground if goods is None else subset(goods, v.m))
    require_goods("exhaustive_mms", len(s), MAX_MMS_GOODS)
    if k > MAX_MMS_PARTS and not overridden():
        raise CapabilityError(f"exhaustive_mms: k={k} exceeds the limit of {MAX_MMS_PARTS}")
    table = value_table(v, s).tolist()
    size = len(s)
    best, best_parts = None, None
    for labels in set_partitions(size, k):
        blocks = [0] * k
        for p, b in enumerate(labels):
            blocks[b] |= 1 << p
        score = min(table[b] for b in blocks)
        if best is None or score > best:
            best = score
            best_parts = list(blocks)
    assert best is not None
    parts = tuple(frozenset(s[p] for p in range(size) if blk >> p & 1) for blk in best_parts)
    return best, parts


def exhaustive_mms(v: Valuation, k: int, goods: Iterable[int] | None = None) -> int:
    return exhaustive_mms_witness(v, k, goods)[0]


def exhaustive_allocation_scan(inst: Instance, predicate: Callable[[tuple], bool],
                               goods: Iterable[int] | None = None) -> tuple | None:
    """First complete allocation (in labeling order) accepted by ``predicate``.

    ``predicate`` receives the bundles as a tuple of frozensets, one per agent.
    """
    s = sorted(inst.goods if goods is None else subset(goods, inst.m))
    n = inst.n
    if overridden():
        require_goods("exhaustive_allocation_scan", len(s), goods_cap(len(s)))
    elif n ** len(s) > MAX_SCAN_LABELINGS:
        raise CapabilityError(
            f"exhaustive_allocation_scan: {n}^{len(s)} allocations exceeds the limit of "
            f"{MAX_SCAN_LABELINGS}"
        )
    size = len(s)
    for row in range(n**size):
        labels = []
        r = row
        for _ in range(size):
            labels.append(r % n)
            r //= n
        labels.reverse()
        bundles = tuple(frozenset(s[p] for p in range(size) if labels[p] == i) for i in range(n))
        if predicate(bundles):
            return bundles
    return None
