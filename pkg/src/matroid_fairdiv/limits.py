"""Size caps for the exhaustive (brute-force) code paths."""

import os

from .errors import CapabilityError, ContractError

ENV_VAR = "MATROID_FAIRDIV_MAX_BRUTE"


def goods_cap(default: int) -> int:
    """Largest number of goods a brute-force path may enumerate.

    ``MATROID_FAIRDIV_MAX_BRUTE`` replaces the per-operation default when set.
    """
    raw = os.environ.get(ENV_VAR)
    if raw is None or raw.strip() == "":
        return default
    try:
        cap = int(raw)
    except ValueError:
        raise ContractError(f"{ENV_VAR} must be an integer, got {raw!r}") from None
    if cap < 0:
        raise ContractError(f"{ENV_VAR} must be non-negative, got {cap}")
    return cap


def overridden() -> bool:
    return bool(os.environ.get(ENV_VAR, "").strip())


def require_goods(op: str, size: int, default: int) -> None:
    cap = goods_cap(default)
    if size > cap:
        raise CapabilityError(
            f"{op}: {size} goods exceeds the brute-force limit of {cap} "
            f"(set {ENV_VAR} to override)"
        )
