"""Matching-vector families over Z_m^n: oracles, the Fourier reduction engine and the MV code."""

from .bounds import bound_eval, rate_check
from .family import (
    MVFamily,
    RespectWitness,
    canonical_family,
    respects,
    subfamily,
    unit_family,
    verify_mv,
    zero_block_check,
)
from .fourier import FBudget, ResidueDistribution, bias_at, check_f_budget, find_biased_character
from .modular import Partition, character_order, inner_product, validate_partition, vdiv, vmod
from .reduction import audit_trace, drive, reduce_once, reduce_once_distinct_primes
from .search import brute_force_mv

__version__ = "0.1.0"
