"""Formula AST, parser, rewrites and the gadget formula library."""

from .ast import Dialect, Formula, Sort, Var
from .library import LIBRARY_NAMES, formula_library
from .parser import FormulaSortError, FormulaSyntaxError, check_formula, parse_formula
from .printer import format_formula, format_node
from .transform import (
    TranslationError,
    compute_r,
    desugar_counting,
    formula_r,
    mso2_to_mso1,
    quantifier_counts,
)

__all__ = [
    "Dialect",
    "Formula",
    "FormulaSortError",
    "FormulaSyntaxError",
    "LIBRARY_NAMES",
    "Sort",
    "TranslationError",
    "Var",
    "check_formula",
    "compute_r",
    "desugar_counting",
    "format_formula",
    "format_node",
    "formula_library",
    "formula_r",
    "mso2_to_mso1",
    "parse_formula",
    "quantifier_counts",
]
