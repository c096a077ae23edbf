"""Validity and uniform interpolation for modal logics K, D, T, and S5.

Nested sequents drive terminating proof search and the constructive
interpolant algorithm for K, D, and T; hypersequents do the same for S5.
Finite Kripke models, bisimulations up to an atom, and model surgeries
verify the interpolants semantically.
"""

from .formulas import (
    Atom,
    And,
    BOT,
    Bot,
    Box,
    Dia,
    Formula,
    NegAtom,
    Or,
    TOP,
    Top,
    ParseError,
    implies,
    modal_depth,
    negate,
    parse_formula,
    print_formula,
    vars_of,
)
from .interpolation import ap, exists_p, forall_p, refute
from .models import KripkeModel, enumerate_models, find_bisim, satisfies, validate_class
from .prover import Derivable, Refutable, countermodel, derivable, prove
from .s5 import Hypersequent, ap_s5, derivable_s5, parse_hypersequent, prove_s5
from .sequents import NestedSequent, interpret, labels, parse_sequent, print_sequent

__all__ = [
    "And",
    "Atom",
    "BOT",
    "Bot",
    "Box",
    "Derivable",
    "Dia",
    "Formula",
    "Hypersequent",
    "KripkeModel",
    "NegAtom",
    "NestedSequent",
    "Or",
    "ParseError",
    "Refutable",
    "TOP",
    "Top",
    "ap",
    "ap_s5",
    "countermodel",
    "derivable",
    "derivable_s5",
    "enumerate_models",
    "exists_p",
    "find_bisim",
    "forall_p",
    "implies",
    "interpret",
    "labels",
    "modal_depth",
    "negate",
    "parse_formula",
    "parse_hypersequent",
    "parse_sequent",
    "print_formula",
    "print_sequent",
    "prove",
    "prove_s5",
    "satisfies",
    "validate_class",
    "vars_of",
]
