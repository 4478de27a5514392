"""Exact computations with mod-p filtered Breuil-Kisin modules."""
from .coeffs import CoefficientRing, ProductElement, embed_k, frobenius_shift
from .hodge import HodgeType, d_multiset, d_pair
from .modf import FilteredBKModule, ModFMorphism, ExactSequence, direct_sum, validate
from .sd import hodge_type, sd_basis, sd_check_criterion, sd_check_definition, split_surjection
from .extcalc import chi_formula, h0_dim, h1_dim, hom_k_profile, verify_extdim, verify_niceform
from .generate import gen_random_sd, gen_random_valid

__all__ = [
    "CoefficientRing", "ProductElement", "embed_k", "frobenius_shift",
    "HodgeType", "d_multiset", "d_pair",
    "FilteredBKModule", "ModFMorphism", "ExactSequence", "direct_sum", "validate",
    "hodge_type", "sd_basis", "sd_check_criterion", "sd_check_definition", "split_surjection",
    "chi_formula", "h0_dim", "h1_dim", "hom_k_profile", "verify_extdim", "verify_niceform",
    "gen_random_sd", "gen_random_valid",
]
__version__ = "0.1.0"
