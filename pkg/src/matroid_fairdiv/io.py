"""Instance and allocation files, and seeded random instance generation.

Instance file (JSON)::

    {
      "agents": [
        {"k": 2, "kind": "uniform"},
        {"blocks": [[0, 1], [2, 3]], "caps": [1, 1], "kind": "partition"}
      ],
      "m": 4,
      "schema": 1
    }

Agent records by ``kind`` (goods are 0-indexed):

``uniform``        ``k``
``partition``      ``blocks`` (disjoint, covering ``0..m-1``), ``caps``
``graphic``        ``edges``: one ``[u, v]`` vertex pair per good
``transversal``    ``slots``, ``adjacency``: one list of slots per good
``linear-gf2``     ``columns``: one non-negative integer bit-vector per good
``explicit``       ``family``: independent sets (closed downward implicitly)
``binary-xos``     ``family``: value is the largest overlap with a member
``weighted-rank``  ``matroid`` (a nested rank record), ``weights``

Allocation file: ``{"bundles": [[...], ...], "m": 6, "schema": 1}`` (``m`` optional).

Serialization is canonical: sorted keys, one agent record per line.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations
from typing import Any

from .errors import ContractError, ValidationError
from .union import PartialAllocation
from .valuations import (
    BinaryXOSValuation,
    ExplicitMatroid,
    GraphicMatroid,
    Instance,
    LinearMatroidGF2,
    PartitionMatroid,
    TransversalMatroid,
    UniformMatroid,
    Valuation,
    WeightedRankValuation,
    matroid_axiom_violation,
)

SCHEMA_VERSION = 1
RANK_KINDS = ("uniform", "partition", "graphic", "transversal", "linear-gf2", "explicit")
KINDS = RANK_KINDS + ("binary-xos", "weighted-rank")


def _field(rec: dict, key: str, where: str) -> Any:
    if key not in rec:
        raise ValidationError(f"{where}: missing field {key!r}")
    return rec[key]


def _int_list(x, where: str) -> list[int]:
    if not isinstance(x, list) or any(not isinstance(e, int) or isinstance(e, bool) for e in x):
        raise ValidationError(f"{where}: expected a list of integers")
    return x


def _set_list(x, where: str) -> list[list[int]]:
    if not isinstance(x, list):
        raise ValidationError(f"{where}: expected a list of lists")
    return [_int_list(e, f"{where}[{p}]") for p, e in enumerate(x)]


def _per_good(x: list, m: int, where: str) -> list:
    if len(x) != m:
        raise ValidationError(f"{where}: expected {m} entries (one per good), got {len(x)}")
    return x


def valuation_from_spec(rec: Any, m: int, where: str = "agent") -> Valuation:
    if not isinstance(rec, dict):
        raise ValidationError(f"{where}: expected an object")
    kind = _field(rec, "kind", where)
    try:
        if kind == "uniform":
            return UniformMatroid(m, _field(rec, "k", where))
        if kind == "partition":
            return PartitionMatroid(m, _set_list(_field(rec, "blocks", where), f"{where}.blocks"),
                                    _int_list(_field(rec, "caps", where), f"{where}.caps"))
        if kind == "graphic":
            edges = _per_good(_set_list(_field(rec, "edges", where), f"{where}.edges"), m,
                              f"{where}.edges")
            return GraphicMatroid(edges)
        if kind == "transversal":
            adj = _per_good(_set_list(_field(rec, "adjacency", where), f"{where}.adjacency"), m,
                            f"{where}.adjacency")
            return TransversalMatroid(_field(rec, "slots", where), adj)
        if kind == "linear-gf2":
            cols = _per_good(_int_list(_field(rec, "columns", where), f"{where}.columns"), m,
                             f"{where}.columns")
            return LinearMatroidGF2(cols)
        if kind == "explicit":
            return ExplicitMatroid(m, _set_list(_field(rec, "family", where), f"{where}.family"))
        if kind == "binary-xos":
            return BinaryXOSValuation(m, _set_list(_field(rec, "family", where), f"{where}.family"))
        if kind == "weighted-rank":
            inner = valuation_from_spec(_field(rec, "matroid", where), m, f"{where}.matroid")
            if not inner.is_matroid_rank:
                raise ValidationError(f"{where}.matroid: must be a matroid rank record")
            return WeightedRankValuation(inner, _int_list(_field(rec, "weights", where),
                                                          f"{where}.weights"))
    except ContractError as exc:
        raise ValidationError(f"{where}: {exc}") from None
    raise ValidationError(f"{where}: unknown kind {kind!r} (expected one of {', '.join(KINDS)})")


def _load_json(text: str, what: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{what}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def _check_schema(doc: Any, what: str) -> None:
    if not isinstance(doc, dict):
        raise ValidationError(f"{what}: top level must be an object")
    version = doc.get("schema", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ValidationError(f"{what}: unsupported schema version {version!r}")


def instance_from_dict(doc: Any, *, validate: bool = False) -> Instance:
    _check_schema(doc, "instance")
    m = _field(doc, "m", "instance")
    if not isinstance(m, int) or isinstance(m, bool) or m < 1:
        raise ValidationError(f"instance.m: expected a positive integer, got {m!r}")
    agents = _field(doc, "agents", "instance")
    if not isinstance(agents, list) or not agents:
        raise ValidationError("instance.agents: expected a nonempty list")
    vals = [valuation_from_spec(rec, m, f"agents[{i}]") for i, rec in enumerate(agents)]
    if validate:
        for i, v in enumerate(vals):
            checks = [v] if v.is_matroid_rank else [getattr(v, "matroid", None)]
            for target in filter(None, checks):
                bad = matroid_axiom_violation(target)
                if bad is not None:
                    raise ValidationError(f"agents[{i}]: not a matroid, {bad}")
                target.reset_queries()
    return Instance(m, tuple(vals))


def parse_instance(text: str, *, validate: bool = False) -> Instance:
    return instance_from_dict(_load_json(text, "instance"), validate=validate)


def instance_to_dict(inst: Instance) -> dict:
    return {"schema": SCHEMA_VERSION, "m": inst.m, "agents": [v.to_spec() for v in inst.valuations]}


def serialize_instance(inst: Instance) -> str:
    agents = ",\n".join("    " + json.dumps(v.to_spec(), sort_keys=True) for v in inst.valuations)
    return (
        "{\n"
        f'  "agents": [\n{agents}\n  ],\n'
        f'  "m": {inst.m},\n'
        f'  "schema": {SCHEMA_VERSION}\n'
        "}\n"
    )


def parse_allocation(text: str, m: int | None = None) -> PartialAllocation:
    doc = _load_json(text, "allocation")
    _check_schema(doc, "allocation")
    bundles = _set_list(_field(doc, "bundles", "allocation"), "allocation.bundles")
    size = doc.get("m", m)
    if size is None:
        size = max((g for b in bundles for g in b), default=-1) + 1
    try:
        return PartialAllocation(size, tuple(frozenset(b) for b in bundles))
    except ContractError as exc:
        raise ValidationError(f"allocation: {exc}") from None


def serialize_allocation(alloc: PartialAllocation) -> str:
    return json.dumps({"bundles": alloc.as_lists(), "m": alloc.m, "schema": SCHEMA_VERSION},
                      sort_keys=True) + "\n"


class SplitMix64:
    """SplitMix64 generator.

    ``state = (state + 0x9E3779B97F4A7C15) mod 2**64``, then the output is
    ``z = state``; ``z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9``;
    ``z = (z ^ (z >> 27)) * 0x94D049BB133111EB``; ``z ^ (z >> 31)``, with
    every product taken mod 2**64.  ``below(n)`` is ``next() % n``.
    """

    MASK = (1 << 64) - 1

    def __init__(self, seed: int):
        self.state = seed & self.MASK

    def next(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & self.MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & self.MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & self.MASK
        return z ^ (z >> 31)

    def below(self, n: int) -> int:
        if n < 1:
            raise ContractError("below() needs a positive bound")
        return self.next() % n


FAMILIES = ("uniform", "partition", "graphic", "transversal", "linear-gf2", "explicit", "mixed")
MAX_EXPLICIT_GOODS = 14


@dataclass(frozen=True)
class GeneratorConfig:
    seed: int
    family: str
    n: int
    m: int
    blocks: int | None = None
    vertices: int | None = None
    slots: int | None = None
    dim: int | None = None
    density: int = 40  # percent, transversal adjacency

    def check(self) -> None:
        if self.family not in FAMILIES:
            raise ContractError(f"unknown family {self.family!r}; expected one of {', '.join(FAMILIES)}")
        if self.n < 1 or self.m < 1:
            raise ContractError("n and m must be positive")
        if self.blocks is not None and not 1 <= self.blocks <= self.m:
            raise ContractError(f"blocks must be in 1..m, got {self.blocks}")
        if self.vertices is not None and self.vertices < 1:
            raise ContractError("vertices must be positive")
        if self.slots is not None and self.slots < 1:
            raise ContractError("slots must be positive")
        if self.dim is not None and not 1 <= self.dim <= 62:
            raise ContractError("dim must be in 1..62")
        if not 0 <= self.density <= 100:
            raise ContractError("density is a percentage in 0..100")
        if self.family in ("explicit", "mixed") and self.m > MAX_EXPLICIT_GOODS:
            raise ContractError(f"explicit matroids are generated only for m <= {MAX_EXPLICIT_GOODS}")


def _gen_partition(cfg: GeneratorConfig, rng: SplitMix64) -> PartitionMatroid:
    b = cfg.blocks or 1 + rng.below(cfg.m)
    label = [rng.below(b) for _ in range(cfg.m)]
    blocks = [[g for g in range(cfg.m) if label[g] == t] for t in range(b)]
    blocks = [blk for blk in blocks if blk]
    caps = [rng.below(len(blk) + 1) for blk in blocks]
    return PartitionMatroid(cfg.m, blocks, caps)


def _gen_one(family: str, cfg: GeneratorConfig, rng: SplitMix64) -> Valuation:
    m = cfg.m
    if family == "uniform":
        return UniformMatroid(m, 1 + rng.below(m))
    if family == "partition":
        return _gen_partition(cfg, rng)
    if family == "graphic":
        nv = cfg.vertices or max(2, (m + 1) // 2 + 1)
        return GraphicMatroid([(rng.below(nv), rng.below(nv)) for _ in range(m)])
    if family == "transversal":
        s = cfg.slots or max(1, m // 2 + 1)
        adj = [[t for t in range(s) if rng.below(100) < cfg.density] for _ in range(m)]
        return TransversalMatroid(s, adj)
    if family == "linear-gf2":
        d = cfg.dim or max(1, m // 2 + 1)
        return LinearMatroidGF2([rng.below(1 << d) for _ in range(m)])
    if family == "explicit":
        base = _gen_partition(cfg, rng)
        r = base.value(range(m))
        bases = [c for c in combinations(range(m), r) if base.value(c) == r]
        return ExplicitMatroid(m, bases)
    raise ContractError(f"unknown family {family!r}")


def generate(cfg: GeneratorConfig) -> Instance:
    """Deterministic instance for ``cfg``; agents are drawn in order from one stream."""
    cfg.check()
    rng = SplitMix64(cfg.seed)
    rank_families = FAMILIES[:-1]
    vals = []
    for _ in range(cfg.n):
        family = cfg.family
        if family == "mixed":
            family = rank_families[rng.below(len(rank_families))]
        vals.append(_gen_one(family, cfg, rng))
    return Instance(cfg.m, tuple(vals))


__all__ = [
    "GeneratorConfig",
    "SplitMix64",
    "generate",
    "instance_from_dict",
    "instance_to_dict",
    "parse_allocation",
    "parse_instance",
    "serialize_allocation",
    "serialize_instance",
    "valuation_from_spec",
]
