"""Gowers norms over coset progressions, dual functions, concatenation checks and pattern averages."""

from .bessel import BesselReport, bessel_scan, counterexample_pair
from .dualnorm import DualWitness, dual_norm_lower_bound, dual_norm_oracle_tiny
from .errors import ArgumentError, GowersLabError, ResourceError, StructuralError
from .funcspace import (
    FunctionTable,
    Spectrum,
    autocorrelation_values,
    dft,
    idft,
    invariant_projection,
    mobius_table,
)
from .gowers import (
    NormResult,
    box_norm,
    box_norm_exact,
    box_norm_mc,
    dual_function,
    gowers_inner_product,
    uniformity_norm,
)
from .group import GroupElement, GroupSpec, SubgroupSpec, enumerate_subgroup
from .patterns import (
    MultiplicityProfile,
    PatternAverage,
    local_norm_chain,
    mobius_experiment,
    multiplicity_profile,
    pattern_average,
)
from .polyrank import PolyCertificate, PolyFunction, concat_property_test, degree_check, rank_check
from .progression import CosetProgression, IndexSpace, Multiset, dilate, progression_sum, sample

__version__ = "0.1.0"

__all__ = [
    "ArgumentError",
    "BesselReport",
    "CosetProgression",
    "DualWitness",
    "FunctionTable",
    "GowersLabError",
    "GroupElement",
    "GroupSpec",
    "IndexSpace",
    "MultiplicityProfile",
    "Multiset",
    "NormResult",
    "PatternAverage",
    "PolyCertificate",
    "PolyFunction",
    "ResourceError",
    "Spectrum",
    "StructuralError",
    "SubgroupSpec",
    "autocorrelation_values",
    "bessel_scan",
    "box_norm",
    "box_norm_exact",
    "box_norm_mc",
    "concat_property_test",
    "counterexample_pair",
    "degree_check",
    "dft",
    "dilate",
    "dual_function",
    "dual_norm_lower_bound",
    "dual_norm_oracle_tiny",
    "enumerate_subgroup",
    "gowers_inner_product",
    "idft",
    "invariant_projection",
    "local_norm_chain",
    "mobius_experiment",
    "mobius_table",
    "multiplicity_profile",
    "pattern_average",
    "progression_sum",
    "rank_check",
    "sample",
    "uniformity_norm",
]
