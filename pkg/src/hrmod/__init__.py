"""Hüsler-Reiss variograms, the set functions m_HR and sigma2, extremal
conditional independence, and the geometry of the Hüsler-Reiss elliptope."""

__version__ = "0.1.0"

from .errors import (
    CriterionDisagreement,
    HRModError,
    SingularBlock,
    UnsupportedSize,
    ValidationError,
)
from .graphs import MarkovGraph, parse_graph, separates
from .independence import (
    CIStatement,
    CIVerdict,
    Verdict,
    check_global_markov,
    ci_general_mhr,
    ci_sigma2,
    ci_singleton,
    four_cycle_q,
    is_emtp2,
    pairwise_markov_graph,
    spanning_trees,
)
from .model import (
    FiedlerBapatBlock,
    Variogram,
    cayley_menger,
    conditional_gaussian,
    exponent_density,
    fiedler_bapat,
    marginal_block_via_schur,
    validate_variogram,
    variogram_from_precision,
)
from .setfunctions import Modularity, ModularityReport, m_hr, m_hr_rep, modularity_gap, sigma2, sigma2_rep

__all__ = [
    "CIStatement",
    "CIVerdict",
    "CriterionDisagreement",
    "FiedlerBapatBlock",
    "HRModError",
    "MarkovGraph",
    "Modularity",
    "ModularityReport",
    "SingularBlock",
    "UnsupportedSize",
    "ValidationError",
    "Variogram",
    "Verdict",
    "cayley_menger",
    "check_global_markov",
    "ci_general_mhr",
    "ci_sigma2",
    "ci_singleton",
    "conditional_gaussian",
    "exponent_density",
    "fiedler_bapat",
    "four_cycle_q",
    "is_emtp2",
    "m_hr",
    "m_hr_rep",
    "marginal_block_via_schur",
    "modularity_gap",
    "pairwise_markov_graph",
    "parse_graph",
    "separates",
    "sigma2",
    "sigma2_rep",
    "spanning_trees",
    "validate_variogram",
    "variogram_from_precision",
]
