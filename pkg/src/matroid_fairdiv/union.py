"""Matroid union via exchange-graph augmentation.

A partial allocation whose bundles are all independent is grown one good at
a time along shortest exchange-graph paths until no unassigned good can be
reached; the result is a maximum-size independent set of the union matroid,
i.e. a welfare-maximizing partial allocation.  The same path machinery
drives the transfer step of the maximin-share algorithm.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import ContractError, InvariantError
from .valuations import Instance, MatroidRank, free_goods, is_independent, subset


@dataclass(frozen=True)
class PartialAllocation:
    """Pairwise-disjoint bundles over goods ``0..m-1``; leftovers are unassigned."""

    m: int
    bundles: tuple

    def __post_init__(self):
        bundles = tuple(subset(b, self.m) for b in self.bundles)
        object.__setattr__(self, "bundles", bundles)
        seen: set[int] = set()
        for i, b in enumerate(bundles):
            clash = seen.intersection(b)
            if clash:
                raise ContractError(f"bundle {i} overlaps earlier bundles on goods {sorted(clash)}")
            seen.update(b)

    @classmethod
    def empty(cls, m: int, n: int) -> "PartialAllocation":
        return cls(m, tuple(frozenset() for _ in range(n)))

    @property
    def n(self) -> int:
        return len(self.bundles)

    @property
    def assigned(self) -> frozenset:
        return frozenset().union(*self.bundles)

    @property
    def unassigned(self) -> frozenset:
        return frozenset(range(self.m)) - self.assigned

    def owner(self, g: int) -> int | None:
        for i, b in enumerate(self.bundles):
            if g in b:
                return i
        return None

    def owners(self) -> dict[int, int]:
        return {g: i for i, b in enumerate(self.bundles) for g in b}

    def replace(self, changes: dict[int, frozenset]) -> "PartialAllocation":
        bundles = list(self.bundles)
        for i, b in changes.items():
            bundles[i] = frozenset(b)
        return PartialAllocation(self.m, tuple(bundles))

    def as_lists(self) -> list[list[int]]:
        return [sorted(b) for b in self.bundles]

    def __len__(self) -> int:
        return sum(len(b) for b in self.bundles)


def check_independent(valuations: Sequence[MatroidRank], alloc: PartialAllocation) -> None:
    for i, (v, b) in enumerate(zip(valuations, alloc.bundles)):
        if not is_independent(v, b):
            raise ContractError(f"bundle {i} = {sorted(b)} is not independent for agent {i}")


class ExchangeGraph:
    """Directed graph on goods; ``(g, h)`` is an edge when ``A_i - g + h`` stays
    independent for the owner ``i`` of ``g``.

    Out-neighbourhoods are computed on first request, so a breadth-first
    search that stops early never pays for the vertices it did not reach.
    Unassigned goods have no out-edges.
    """

    def __init__(self, valuations: Sequence[MatroidRank], alloc: PartialAllocation,
                 goods: Iterable[int] | None = None):
        self.valuations = tuple(valuations)
        self.alloc = alloc
        self.vertices = tuple(sorted(range(alloc.m) if goods is None else set(goods)))
        self.owner = alloc.owners()
        self._succ: dict[int, tuple[int, ...]] = {}

    def successors(self, g: int) -> tuple[int, ...]:
        out = self._succ.get(g)
        if out is not None:
            return out
        i = self.owner.get(g)
        if i is None:
            out = ()
        else:
            bundle = self.alloc.bundles[i]
            v = self.valuations[i]
            base = bundle - {g}
            size = len(bundle)
            out = tuple(h for h in self.vertices
                        if h not in bundle and v.value(base | {h}) == size)
        self._succ[g] = out
        return out

    def edges(self) -> list[tuple[int, int]]:
        return [(g, h) for g in self.vertices for h in self.successors(g)]


def build_exchange_graph(valuations: Sequence[MatroidRank] | Instance, alloc: PartialAllocation,
                         goods: Iterable[int] | None = None) -> ExchangeGraph:
    if isinstance(valuations, Instance):
        valuations = valuations.valuations
    check_independent(valuations, alloc)
    return ExchangeGraph(valuations, alloc, goods)


@dataclass(frozen=True)
class AugmentingPath:
    goods: tuple
    source_agent: int
    kind: str  # "growth" or "transfer"
    target_agent: int | None = None

    @property
    def first(self) -> int:
        return self.goods[0]

    @property
    def last(self) -> int:
        return self.goods[-1]


def shortest_path(graph: ExchangeGraph, sources: Iterable[int], targets: Iterable[int]) -> tuple | None:
    """Fewest-edge path from ``sources`` to ``targets`` by breadth-first search.

    Sources and neighbours are visited in ascending index order and the
    search stops at the first target reached, so only the last vertex of
    the returned path is a target.
    """
    targets = frozenset(targets)
    starts = sorted(set(sources))
    for s in starts:
        if s in targets:
            return (s,)
    parent: dict[int, int | None] = {s: None for s in starts}
    queue = deque(starts)
    while queue:
        g = queue.popleft()
        for h in graph.successors(g):
            if h in parent:
                continue
            parent[h] = g
            if h in targets:
                path = [h]
                while parent[path[-1]] is not None:
                    path.append(parent[path[-1]])
                return tuple(reversed(path))
            queue.append(h)
    return None


def _swap_along(alloc: PartialAllocation, path: Sequence[int]) -> list[set]:
    """Apply ``A_k <- A_k xor {g_l, g_l+1 : g_l in A_k}`` to every bundle."""
    owners = alloc.owners()
    bundles = [set(b) for b in alloc.bundles]
    for a, b in zip(path, path[1:]):
        k = owners.get(a)
        if k is None:
            raise ContractError(f"path leaves unassigned good {a}")
        bundles[k].symmetric_difference_update((a, b))
    return bundles


def _finish(valuations, alloc, bundles, expect_sizes) -> PartialAllocation:
    try:
        out = PartialAllocation(alloc.m, tuple(frozenset(b) for b in bundles))
    except ContractError as exc:
        raise InvariantError(f"augmentation broke disjointness: {exc}") from None
    for k, (v, b) in enumerate(zip(valuations, out.bundles)):
        if len(b) != expect_sizes[k]:
            raise InvariantError(f"bundle {k} has size {len(b)}, expected {expect_sizes[k]}")
        if not is_independent(v, b):
            raise InvariantError(
                f"bundle {k} = {sorted(b)} became dependent; the path was not shortest"
            )
    return out


def augment_transfer(valuations: Sequence[MatroidRank] | Instance, alloc: PartialAllocation,
                     path: Sequence[int] | AugmentingPath, i: int, j: int) -> PartialAllocation:
    """Agent ``i`` gains one good, agent ``j`` loses its endpoint ``g_t``."""
    if isinstance(valuations, Instance):
        valuations = valuations.valuations
    goods = path.goods if isinstance(path, AugmentingPath) else tuple(path)
    if i == j:
        raise ContractError("transfer needs two distinct agents")
    if not goods:
        raise ContractError("empty path")
    g1, gt = goods[0], goods[-1]
    if gt not in alloc.bundles[j]:
        raise ContractError(f"path endpoint {gt} is not owned by agent {j}")
    if any(g in alloc.bundles[j] for g in goods[:-1]):
        raise ContractError(f"path meets agent {j}'s bundle before its endpoint")
    if g1 in alloc.bundles[i]:
        raise ContractError(f"path start {g1} already belongs to agent {i}")
    bundles = _swap_along(alloc, goods)
    bundles[i].add(g1)
    bundles[j].discard(gt)
    sizes = [len(b) for b in alloc.bundles]
    sizes[i] += 1
    sizes[j] -= 1
    return _finish(valuations, alloc, bundles, sizes)


def augment_growth(valuations: Sequence[MatroidRank] | Instance, alloc: PartialAllocation,
                   path: Sequence[int] | AugmentingPath, i: int) -> PartialAllocation:
    """Agent ``i`` gains one good and the unassigned endpoint becomes assigned."""
    if isinstance(valuations, Instance):
        valuations = valuations.valuations
    goods = path.goods if isinstance(path, AugmentingPath) else tuple(path)
    if not goods:
        raise ContractError("empty path")
    if alloc.owner(goods[-1]) is not None:
        raise ContractError(f"growth path must end at an unassigned good, {goods[-1]} is assigned")
    if goods[0] in alloc.bundles[i]:
        raise ContractError(f"path start {goods[0]} already belongs to agent {i}")
    bundles = _swap_along(alloc, goods)
    bundles[i].add(goods[0])
    sizes = [len(b) for b in alloc.bundles]
    sizes[i] += 1
    return _finish(valuations, alloc, bundles, sizes)


def growth_step(valuations: Sequence[MatroidRank], alloc: PartialAllocation,
                goods: Iterable[int] | None = None) -> AugmentingPath | None:
    """Shortest path from any agent's free goods to an unassigned good, if one exists."""
    pool = frozenset(range(alloc.m)) if goods is None else frozenset(goods)
    targets = pool - alloc.assigned
    if not targets:
        return None
    free = [free_goods(v, b) & pool for v, b in zip(valuations, alloc.bundles)]
    sources = frozenset().union(*free)
    if not sources:
        return None
    graph = ExchangeGraph(valuations, alloc, pool)
    path = shortest_path(graph, sources, targets)
    if path is None:
        return None
    agent = next(i for i, f in enumerate(free) if path[0] in f)
    return AugmentingPath(path, agent, "growth")


def max_welfare_allocation(inst: Instance | Sequence[MatroidRank], goods: Iterable[int] | None = None,
                           trace: list | None = None) -> PartialAllocation:
    """Welfare-maximizing partial allocation with independent bundles.

    Restricted to ``goods`` when given.  Each growth path is appended to
    ``trace`` if one is supplied.
    """
    valuations = inst.valuations if isinstance(inst, Instance) else tuple(inst)
    if isinstance(inst, Instance):
        inst.require_rank()
    else:
        Instance(valuations[0].m, valuations).require_rank()
    m = valuations[0].m
    pool = frozenset(range(m)) if goods is None else subset(goods, m)
    alloc = PartialAllocation.empty(m, len(valuations))
    for _ in range(len(pool) + 1):
        step = growth_step(valuations, alloc, pool)
        if step is None:
            return alloc
        alloc = augment_growth(valuations, alloc, step, step.source_agent)
        if trace is not None:
            trace.append(step)
    raise InvariantError("more growth augmentations than goods")


def union_rank(inst: Instance, goods: Iterable[int] | None = None,
               agents: Iterable[int] | None = None) -> int:
    """Rank of ``goods`` in the union of the chosen agents' matroids."""
    idx = range(inst.n) if agents is None else sorted(set(agents))
    if not idx:
        raise ContractError("union rank needs at least one agent")
    vals = [inst.valuations[i] for i in idx]
    return len(max_welfare_allocation(vals, goods))


def kfold_union_rank(v: MatroidRank, k: int, goods: Iterable[int] | None = None) -> tuple[int, tuple]:
    """Rank of ``goods`` in the ``k``-fold union of ``v``'s matroid, with the
    independent parts ``(J_1, ..., J_k)`` of a maximum set.

    The ``k`` copies are views of the same oracle, so queries count against ``v``.
    """
    if not isinstance(k, int) or k < 1:
        raise ContractError(f"k must be a positive integer, got {k!r}")
    alloc = max_welfare_allocation([v] * k, goods)
    return len(alloc), alloc.bundles
