"""Welfare-maximizing MMS and PMMS allocations for matroid-rank valuations.

Both algorithms start from the same deterministic welfare-maximizing
partial allocation with independent bundles (``max_welfare_allocation``).

``alg_mms`` repeatedly takes the lowest-index agent below its share and
augments along a shortest exchange-graph path from its free goods into the
bundles of agents strictly above their shares.  Each step moves one unit of
value, so welfare is unchanged and the total shortfall drops by one.
Leftover goods go to the first agent at the end.

``alg_pmms`` scans agent pairs lexicographically and, for the first pair
violating the pairwise share, moves the lowest-index good of ``A_j`` that
agent ``i`` can add independently.  The sum of squared values strictly
decreases with every move.  Leftovers stay unassigned.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ContractError, InvariantError
from .shares import SharesTable, mms_fast, shares_for_instance
from .union import (
    AugmentingPath,
    ExchangeGraph,
    PartialAllocation,
    augment_transfer,
    max_welfare_allocation,
    shortest_path,
)
from .valuations import Instance, free_goods

__all__ = ["Instance", "SolveReport", "alg_mms", "alg_pmms", "welfare"]


@dataclass
class SolveReport:
    algorithm: str
    allocation: PartialAllocation
    welfare: int
    values: list[int]
    shares: SharesTable | None
    steps: int
    # per step: dict with the agents touched, the path or good moved, and the potential after
    trace: list[dict] = field(default_factory=list)
    pair_shares: dict = field(default_factory=dict)

    @property
    def unassigned(self) -> frozenset:
        return self.allocation.unassigned

    def to_dict(self) -> dict:
        out = {
            "algorithm": self.algorithm,
            "m": self.allocation.m,
            "n": self.allocation.n,
            "bundles": self.allocation.as_lists(),
            "values": list(self.values),
            "welfare": self.welfare,
            "unassigned": sorted(self.unassigned),
            "steps": self.steps,
            "shares": None if self.shares is None else self.shares.to_dict(),
            "trace": self.trace,
        }
        if self.pair_shares:
            out["pair_shares"] = [
                {"i": i, "j": j, "mu": mu} for (i, j), mu in sorted(self.pair_shares.items())
            ]
        return out


def welfare(inst: Instance, alloc: PartialAllocation | tuple) -> int:
    if not isinstance(alloc, PartialAllocation):
        alloc = PartialAllocation(inst.m, tuple(alloc))
    if alloc.n != inst.n:
        raise ContractError(f"allocation has {alloc.n} bundles for {inst.n} agents")
    return sum(v.value(b) for v, b in zip(inst.valuations, alloc.bundles))


def alg_mms(inst: Instance) -> SolveReport:
    inst.require_rank()
    n, m = inst.n, inst.m
    vals = inst.valuations
    alloc = max_welfare_allocation(inst)
    shares = shares_for_instance(inst, n)
    mu = shares.values
    value = [len(b) for b in alloc.bundles]
    below = {i for i in range(n) if value[i] < mu[i]}
    above = {i for i in range(n) if value[i] > mu[i]}
    trace = []
    steps = 0
    while below:
        if steps >= n * m:
            raise InvariantError(f"more than n*m = {n * m} augmentations")
        i = min(below)
        targets = frozenset().union(*(alloc.bundles[j] for j in above))
        graph = ExchangeGraph(vals, alloc)
        path = shortest_path(graph, free_goods(vals[i], alloc.bundles[i]), targets)
        if path is None:
            raise InvariantError(
                f"agent {i} is below its share but no exchange path reaches an agent above its own"
            )
        j = alloc.owner(path[-1])
        alloc = augment_transfer(vals, alloc, AugmentingPath(path, i, "transfer", j), i, j)
        value[i] += 1
        value[j] -= 1
        steps += 1
        for k in (i, j):
            below.discard(k)
            above.discard(k)
            if value[k] < mu[k]:
                below.add(k)
            elif value[k] > mu[k]:
                above.add(k)
        trace.append({
            "from": j,
            "to": i,
            "path": list(path),
            "shortfall": sum(mu[k] - value[k] for k in below),
        })
    leftovers = alloc.unassigned
    if leftovers:
        alloc = alloc.replace({0: alloc.bundles[0] | leftovers})
    final_values = [v.value(b) for v, b in zip(vals, alloc.bundles)]
    return SolveReport("mms", alloc, sum(final_values), final_values, shares, steps, trace)


def alg_pmms(inst: Instance) -> SolveReport:
    inst.require_rank()
    n, m = inst.n, inst.m
    vals = inst.valuations
    alloc = max_welfare_allocation(inst)
    memo: dict[tuple[int, frozenset], int] = {}

    def pair_share(i, j):
        union = alloc.bundles[i] | alloc.bundles[j]
        key = (i, union)
        if key not in memo:
            memo[key] = mms_fast(vals[i], 2, union)[0]
        return memo[key]

    def first_violation():
        for i in range(n):
            for j in range(n):
                if i != j and len(alloc.bundles[i]) < pair_share(i, j):
                    return i, j
        return None

    trace = []
    steps = 0
    potential = sum(len(b) ** 2 for b in alloc.bundles)
    while (bad := first_violation()) is not None:
        i, j = bad
        if steps >= m * m:
            raise InvariantError(f"more than m^2 = {m * m} transfers")
        a_i, a_j = alloc.bundles[i], alloc.bundles[j]
        if len(a_i) + 2 > len(a_j):
            raise InvariantError(f"pair ({i}, {j}) violates the share but |A_i| + 2 > |A_j|")
        movable = sorted(a_j & free_goods(vals[i], a_i))
        if not movable:
            raise InvariantError(f"no good of agent {j} extends agent {i}'s bundle independently")
        g = movable[0]
        alloc = alloc.replace({i: a_i | {g}, j: a_j - {g}})
        steps += 1
        after = sum(len(b) ** 2 for b in alloc.bundles)
        if after >= potential:
            raise InvariantError("sum of squared values did not decrease")
        potential = after
        trace.append({"from": j, "to": i, "good": g, "potential": potential})
    values = [v.value(b) for v, b in zip(vals, alloc.bundles)]
    for k, (v, b) in enumerate(zip(vals, alloc.bundles)):
        if values[k] != len(b):
            raise InvariantError(f"bundle {k} is not independent after the transfers")
    pairs = {(i, j): pair_share(i, j) for i in range(n) for j in range(n) if i != j}
    return SolveReport("pmms", alloc, sum(values), values, None, steps, trace, pairs)
