"""Admissible subgroups of G wr S2, reduced Schur multipliers, marked
central extensions, braid orbits and Euler-product heuristics."""

from .abelian import AbelianInvariants
from .cocycle import reduced_schur, schur_multiplier
from .dirichlet import euler_coeffs, f_k_coeffs, genus_oracle_k1, logpow_fit, mb_series
from .groups import FiniteGroup, Subgroup, direct_product, from_permutations
from .hurwitz import braid_orbits, component_invariant, enumerate_tuples, stratum_reports
from .iso import automorphisms, find_isomorphism, is_isomorphic
from .marked import MarkedUniversalGroup, todd_coxeter
from .named import parse_group
from .wreath import (AdmissibleType, conjectured_averages, count_twist_pairs, enumerate_admissible,
                     mb_growth, wreath_square)

__version__ = "0.1.0"

__all__ = [
    "AbelianInvariants", "AdmissibleType", "FiniteGroup", "MarkedUniversalGroup", "Subgroup",
    "automorphisms", "braid_orbits", "component_invariant", "conjectured_averages", "count_twist_pairs",
    "direct_product", "enumerate_admissible", "enumerate_tuples", "euler_coeffs", "f_k_coeffs",
    "find_isomorphism", "from_permutations", "genus_oracle_k1", "is_isomorphic", "logpow_fit",
    "mb_growth", "mb_series", "parse_group", "reduced_schur", "schur_multiplier", "stratum_reports",
    "todd_coxeter", "wreath_square",
]
