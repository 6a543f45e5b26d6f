"""Welfare-maximizing maximin-share allocations under matroid-rank valuations."""

from .algorithms import SolveReport, alg_mms, alg_pmms, welfare
from .errors import CapabilityError, ContractError, InvariantError, ValidationError
from .fairness import (
    FairnessVerdict,
    certify_no_mms_allocation,
    fixture,
    fixtures,
    is_ef1,
    is_envy_free,
    is_mms,
    is_pmms,
)
from .shares import SharesTable, mms_brute, mms_fast, shares_for_instance
from .union import (
    ExchangeGraph,
    PartialAllocation,
    augment_growth,
    augment_transfer,
    build_exchange_graph,
    kfold_union_rank,
    max_welfare_allocation,
    shortest_path,
    union_rank,
)
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
    free_goods,
    is_independent,
    marginal,
    max_independent_subset,
    rank,
    validate_matroid_axioms,
    value_query_count,
)

__version__ = "0.1.0"

__all__ = [
    "BinaryXOSValuation",
    "CapabilityError",
    "ContractError",
    "ExchangeGraph",
    "ExplicitMatroid",
    "FairnessVerdict",
    "GraphicMatroid",
    "Instance",
    "InvariantError",
    "LinearMatroidGF2",
    "PartialAllocation",
    "PartitionMatroid",
    "SharesTable",
    "SolveReport",
    "TransversalMatroid",
    "UniformMatroid",
    "ValidationError",
    "Valuation",
    "WeightedRankValuation",
    "alg_mms",
    "alg_pmms",
    "augment_growth",
    "augment_transfer",
    "build_exchange_graph",
    "certify_no_mms_allocation",
    "fixture",
    "fixtures",
    "free_goods",
    "is_ef1",
    "is_envy_free",
    "is_independent",
    "is_mms",
    "is_pmms",
    "kfold_union_rank",
    "marginal",
    "max_independent_subset",
    "max_welfare_allocation",
    "mms_brute",
    "mms_fast",
    "rank",
    "shares_for_instance",
    "shortest_path",
    "union_rank",
    "validate_matroid_axioms",
    "value_query_count",
    "welfare",
    "__version__",
]
