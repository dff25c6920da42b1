"""Moebius function by divisor recursion, cross-checked and put through its statistical paces."""

from .core_mu import (
    MertensSeries,
    MuTable,
    OmegaTable,
    Provenance,
    build_mu_recursive,
    build_mu_sieve,
    mertens_prefix,
    mu_recursive_naive,
    mu_root_of_unity,
    running_mean,
)
from .errors import CacheFormatError, InvalidArgument, MoebiusLabError, NumericalFailure, ResourceError

__version__ = "0.1.0"

__all__ = [
    "CacheFormatError",
    "InvalidArgument",
    "MertensSeries",
    "MoebiusLabError",
    "MuTable",
    "NumericalFailure",
    "OmegaTable",
    "Provenance",
    "ResourceError",
    "build_mu_recursive",
    "build_mu_sieve",
    "mertens_prefix",
    "mu_recursive_naive",
    "mu_root_of_unity",
    "running_mean",
]
