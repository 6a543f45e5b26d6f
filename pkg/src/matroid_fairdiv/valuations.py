"""Valuation oracles over a ground set of goods ``0..m-1``.

Every valuation answers integer value queries on subsets of goods and counts
how many queries it has answered.  The matroid-rank families additionally
set ``is_matroid_rank`` so that algorithms restricted to rank valuations can
refuse anything else.

Subsets are ``frozenset`` objects of good indices.  Greedy scans always
visit goods in ascending index order, which keeps every output
deterministic.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import CapabilityError, ContractError
from .limits import require_goods

Subset = frozenset

MAX_AXIOM_GOODS = 14


def subset(goods: Iterable[int], m: int) -> frozenset:
    """Return ``goods`` as a frozenset after checking every index is in range."""
    s = frozenset(goods)
    for g in s:
        if not isinstance(g, int) or isinstance(g, bool) or not 0 <= g < m:
            raise ContractError(f"good {g!r} is outside the ground set 0..{m - 1}")
    return s


def to_mask(goods: Iterable[int]) -> int:
    mask = 0
    for g in goods:
        mask |= 1 << g
    return mask


def from_mask(mask: int) -> frozenset:
    out = []
    g = 0
    while mask:
        if mask & 1:
            out.append(g)
        mask >>= 1
        g += 1
    return frozenset(out)


class Valuation:
    """Value oracle over subsets of ``range(m)``.

    Subclasses implement ``_value`` on a validated frozenset.  With
    ``cache=True`` answers are memoized; cached hits still count as queries
    unless ``count_cached=False``.
    """

    kind = "abstract"
    is_matroid_rank = False

    def __init__(self, m: int, *, cache: bool = False, count_cached: bool = True):
        if not isinstance(m, int) or m < 1:
            raise ContractError(f"ground set size must be a positive integer, got {m!r}")
        self.m = m
        self._cache: dict | None = {} if cache else None
        self._count_cached = count_cached
        self._queries = 0
        self._lock = threading.Lock()

    @property
    def ground(self) -> frozenset:
        return frozenset(range(self.m))

    def value(self, goods: Iterable[int]) -> int:
        s = subset(goods, self.m)
        cache = self._cache
        if cache is not None and s in cache:
            if self._count_cached:
                self._bump()
            return cache[s]
        self._bump()
        val = self._value(s)
        if cache is not None:
            cache[s] = val
        return val

    __call__ = value

    def _bump(self) -> None:
        with self._lock:
            self._queries += 1

    @property
    def query_count(self) -> int:
        return self._queries

    def reset_queries(self) -> None:
        with self._lock:
            self._queries = 0

    def _value(self, s: frozenset) -> int:
        raise NotImplementedError

    def to_spec(self) -> dict:
        """Parameters of this valuation in the instance-file schema."""
        raise NotImplementedError

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.to_spec()!r})"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Valuation):
            return NotImplemented
        return self.m == other.m and self.to_spec() == other.to_spec()

    def __hash__(self) -> int:
        return hash((self.m, self.kind))


class MatroidRank(Valuation):
    """Base for valuations that are rank functions of a matroid."""

    is_matroid_rank = True


class UniformMatroid(MatroidRank):
    kind = "uniform"

    def __init__(self, m: int, k: int, **kw):
        super().__init__(m, **kw)
        if not isinstance(k, int) or k < 0:
            raise ContractError(f"uniform capacity must be a non-negative integer, got {k!r}")
        self.k = k

    def _value(self, s):
        return min(len(s), self.k)

    def to_spec(self):
        return {"kind": self.kind, "k": self.k}


class PartitionMatroid(MatroidRank):
    """Rank ``sum_b min(|S & b|, cap_b)``; the blocks must partition the goods."""

    kind = "partition"

    def __init__(self, m: int, blocks: Sequence[Iterable[int]], caps: Sequence[int], **kw):
        super().__init__(m, **kw)
        blocks = [sorted(subset(b, m)) for b in blocks]
        caps = list(caps)
        if len(blocks) != len(caps):
            raise ContractError(f"{len(blocks)} blocks but {len(caps)} capacities")
        seen: set[int] = set()
        for b in blocks:
            overlap = seen.intersection(b)
            if overlap:
                raise ContractError(f"partition blocks overlap on goods {sorted(overlap)}")
            seen.update(b)
        if len(seen) != m:
            missing = sorted(set(range(m)) - seen)
            raise ContractError(f"partition blocks do not cover goods {missing}")
        for c in caps:
            if not isinstance(c, int) or c < 0:
                raise ContractError(f"block capacity must be a non-negative integer, got {c!r}")
        self.blocks = blocks
        self.caps = caps
        self._block_of = {g: b for b, block in enumerate(blocks) for g in block}

    def _value(self, s):
        counts = [0] * len(self.blocks)
        for g in s:
            counts[self._block_of[g]] += 1
        return sum(min(c, cap) for c, cap in zip(counts, self.caps))

    def to_spec(self):
        return {"kind": self.kind, "blocks": [list(b) for b in self.blocks], "caps": list(self.caps)}


class GraphicMatroid(MatroidRank):
    """Good ``g`` is the edge ``edges[g]``; rank is the size of a spanning forest."""

    kind = "graphic"

    def __init__(self, edges: Sequence[Sequence[int]], **kw):
        edges = [tuple(e) for e in edges]
        super().__init__(len(edges), **kw)
        for e in edges:
            if len(e) != 2 or any(not isinstance(x, int) or x < 0 for x in e):
                raise ContractError(f"graphic edge must be a pair of vertex ids, got {e!r}")
        self.edges = edges

    def _value(self, s):
        parent: dict[int, int] = {}

        def find(x):
            root = x
            while parent.get(root, root) != root:
                root = parent[root]
            while x != root:
                parent[x], x = root, parent.get(x, x)
            return root

        rank = 0
        for g in sorted(s):
            u, v = self.edges[g]
            ru, rv = find(u), find(v)
            if ru != rv:
                parent[ru] = rv
                rank += 1
        return rank

    def to_spec(self):
        return {"kind": self.kind, "edges": [list(e) for e in self.edges]}


class TransversalMatroid(MatroidRank):
    """Rank is a maximum matching between the chosen goods and ``slots`` slots."""

    kind = "transversal"

    def __init__(self, slots: int, adjacency: Sequence[Iterable[int]], **kw):
        super().__init__(len(adjacency), **kw)
        if not isinstance(slots, int) or slots < 0:
            raise ContractError(f"slot count must be a non-negative integer, got {slots!r}")
        adj = []
        for g, row in enumerate(adjacency):
            row = sorted(set(row))
            if any(not isinstance(x, int) or not 0 <= x < slots for x in row):
                raise ContractError(f"good {g} is adjacent to a slot outside 0..{slots - 1}")
            adj.append(row)
        self.slots = slots
        self.adjacency = adj

    def _value(self, s):
        match_of_slot: dict[int, int] = {}

        def try_assign(g, seen):
            for slot in self.adjacency[g]:
                if slot in seen:
                    continue
                seen.add(slot)
                other = match_of_slot.get(slot)
                if other is None or try_assign(other, seen):
                    match_of_slot[slot] = g
                    return True
            return False

        return sum(1 for g in sorted(s) if try_assign(g, set()))

    def to_spec(self):
        return {"kind": self.kind, "slots": self.slots, "adjacency": [list(r) for r in self.adjacency]}


class LinearMatroidGF2(MatroidRank):
    """Good ``g`` is the bit-vector ``columns[g]``; rank is taken over GF(2)."""

    kind = "linear-gf2"

    def __init__(self, columns: Sequence[int], **kw):
        super().__init__(len(columns), **kw)
        for c in columns:
            if not isinstance(c, int) or c < 0:
                raise ContractError(f"GF(2) column must be a non-negative integer bitmask, got {c!r}")
        self.columns = list(columns)

    def _value(self, s):
        basis: dict[int, int] = {}  # leading bit -> row
        for g in sorted(s):
            x = self.columns[g]
            while x:
                lead = x.bit_length() - 1
                if lead not in basis:
                    basis[lead] = x
                    break
                x ^= basis[lead]
        return len(basis)

    def to_spec(self):
        return {"kind": self.kind, "columns": list(self.columns)}


def _maximal_sets(family: Iterable[frozenset]) -> list[frozenset]:
    sets = sorted(set(family), key=lambda x: (-len(x), sorted(x)))
    kept: list[frozenset] = []
    for x in sets:
        if not any(x < y for y in kept):
            kept.append(x)
    return sorted(kept, key=lambda x: (len(x), sorted(x)))


class ExplicitMatroid(MatroidRank):
    """Independence family given explicitly; only its maximal sets are stored.

    The family is closed downward implicitly.  Pass ``validate=True`` to run
    the exhaustive axiom check at construction time.
    """

    kind = "explicit"

    def __init__(self, m: int, family: Iterable[Iterable[int]], *, validate: bool = False, **kw):
        super().__init__(m, **kw)
        fam = [subset(x, m) for x in family]
        if not fam:
            raise ContractError("explicit independence family must be nonempty")
        self.maximal = _maximal_sets(fam)
        if validate:
            bad = matroid_axiom_violation(self)
            if bad is not None:
                raise ContractError(f"explicit family is not a matroid: {bad}")
            self.reset_queries()

    def _value(self, s):
        return max(len(s & b) for b in self.maximal)

    def to_spec(self):
        return {"kind": self.kind, "family": [sorted(b) for b in self.maximal]}


class BinaryXOSValuation(Valuation):
    """``v(S) = max_{X in family} |S & X|``."""

    kind = "binary-xos"

    def __init__(self, m: int, family: Iterable[Iterable[int]], **kw):
        super().__init__(m, **kw)
        fam = sorted({subset(x, m) for x in family}, key=lambda x: (len(x), sorted(x)))
        if not fam:
            raise ContractError("binary XOS family must be nonempty")
        self.family = fam

    def _value(self, s):
        return max(len(s & x) for x in self.family)

    def to_spec(self):
        return {"kind": self.kind, "family": [sorted(x) for x in self.family]}


class WeightedRankValuation(Valuation):
    """Maximum total weight of an independent subset of a matroid.

    Computed by the matroid greedy algorithm (heaviest goods first, ties by
    ascending index), which is exact on matroids.
    """

    kind = "weighted-rank"

    def __init__(self, matroid: MatroidRank, weights: Sequence[int], **kw):
        super().__init__(matroid.m, **kw)
        if not matroid.is_matroid_rank:
            raise ContractError("weighted rank needs an underlying matroid rank valuation")
        if len(weights) != matroid.m:
            raise ContractError(f"{len(weights)} weights for {matroid.m} goods")
        for w in weights:
            if not isinstance(w, int) or w < 0:
                raise ContractError(f"weights must be non-negative integers, got {w!r}")
        self.matroid = matroid
        self.weights = list(weights)

    def _value(self, s):
        chosen: list[int] = []
        total = 0
        for g in sorted(s, key=lambda g: (-self.weights[g], g)):
            if self.weights[g] == 0:
                break
            if self.matroid.value(chosen + [g]) == len(chosen) + 1:
                chosen.append(g)
                total += self.weights[g]
        return total

    def to_spec(self):
        return {"kind": self.kind, "matroid": self.matroid.to_spec(), "weights": list(self.weights)}


def _require_rank(v: Valuation) -> None:
    if not v.is_matroid_rank:
        raise CapabilityError(f"{v.kind} valuation is not a matroid rank function")


def rank(v: MatroidRank, goods: Iterable[int]) -> int:
    _require_rank(v)
    return v.value(goods)


def is_independent(v: MatroidRank, goods: Iterable[int]) -> bool:
    s = subset(goods, v.m)
    return rank(v, s) == len(s)


def free_goods(v: MatroidRank, goods: Iterable[int]) -> frozenset:
    """Goods outside ``goods`` whose addition keeps it independent."""
    a = subset(goods, v.m)
    if not is_independent(v, a):
        raise ContractError(f"free_goods needs an independent set, {sorted(a)} is dependent")
    size = len(a)
    return frozenset(g for g in range(v.m) if g not in a and v.value(a | {g}) == size + 1)


def max_independent_subset(v: MatroidRank, goods: Iterable[int]) -> frozenset:
    _require_rank(v)
    chosen: set[int] = set()
    for g in sorted(subset(goods, v.m)):
        if v.value(chosen | {g}) == len(chosen) + 1:
            chosen.add(g)
    return frozenset(chosen)


def marginal(v: Valuation, goods: Iterable[int], g: int) -> int:
    s = subset(goods, v.m)
    subset([g], v.m)
    if g in s:
        raise ContractError(f"good {g} is already in the set")
    return v.value(s | {g}) - v.value(s)


def value_query_count(v: Valuation) -> int:
    return v.query_count


def matroid_axiom_violation(v: Valuation) -> str | None:
    """Exhaustively check the independence family induced by ``v``.

    A set is independent when ``v(S) == |S|``.  Returns ``None`` for a
    matroid, otherwise a message naming the failed axiom with a witness.
    The augmentation check uses the fact that a hereditary family fails
    augmentation exactly when some independent ``J`` is maximal inside
    its closure ``cl(J)`` while ``cl(J)`` holds a larger independent set.
    """
    m = v.m
    require_goods("validate_matroid_axioms", m, MAX_AXIOM_GOODS)
    full = 1 << m
    indep = [v.value(from_mask(mask)) == mask.bit_count() for mask in range(full)]
    if not indep[0]:
        return "nonempty: the empty set is not independent"
    for mask in range(full):
        if not indep[mask]:
            continue
        bits = mask
        while bits:
            low = bits & -bits
            if not indep[mask ^ low]:
                return (
                    f"hereditary: {sorted(from_mask(mask))} is independent "
                    f"but {sorted(from_mask(mask ^ low))} is not"
                )
            bits ^= low
    # best[mask]: a maximum independent subset of mask, as a mask
    best = [0] * full
    for mask in range(1, full):
        if indep[mask]:
            best[mask] = mask
            continue
        bits = mask
        top = 0
        while bits:
            low = bits & -bits
            cand = best[mask ^ low]
            if cand.bit_count() > top.bit_count():
                top = cand
            bits ^= low
        best[mask] = top
    for j in range(full):
        if not indep[j]:
            continue
        closure = j
        for g in range(m):
            bit = 1 << g
            if not j & bit and not indep[j | bit]:
                closure |= bit
        big = best[closure]
        if big.bit_count() > j.bit_count():
            return (
                f"augmentation: no good of {sorted(from_mask(big))} extends "
                f"{sorted(from_mask(j))}"
            )
    return None


def validate_matroid_axioms(v: Valuation) -> bool:
    return matroid_axiom_violation(v) is None


@dataclass(frozen=True)
class Instance:
    """``n`` agents with valuations over a shared ground set of ``m`` goods."""

    m: int
    valuations: tuple

    def __post_init__(self):
        object.__setattr__(self, "valuations", tuple(self.valuations))
        if not self.valuations:
            raise ContractError("an instance needs at least one agent")
        for i, v in enumerate(self.valuations):
            if v.m != self.m:
                raise ContractError(f"agent {i} valuation has {v.m} goods, instance has {self.m}")

    @property
    def n(self) -> int:
        return len(self.valuations)

    @property
    def goods(self) -> frozenset:
        return frozenset(range(self.m))

    @property
    def all_rank(self) -> bool:
        return all(v.is_matroid_rank for v in self.valuations)

    @property
    def kind(self) -> str:
        return "all-rank" if self.all_rank else "general"

    def query_count(self) -> int:
        return sum(v.query_count for v in self.valuations)

    def reset_queries(self) -> None:
        for v in self.valuations:
            v.reset_queries()

    def require_rank(self) -> None:
        for i, v in enumerate(self.valuations):
            if not v.is_matroid_rank:
                raise CapabilityError(f"agent {i} has a {v.kind} valuation; a matroid rank is required")
