"""Reflection groups of string Coxeter diagrams reduced modulo odd primes."""

from .fp import FieldCtx, FpMatrix, QuadClass, form_invariants, quadratic_character, radical_basis
from .diagram import BasicSystem, StringDiagram, parse_diagram, parse_system, reflection_generators
from .matgroup import BsgsGroup, build_bsgs, evaluate_word

__version__ = "0.1.0"

__all__ = ["FieldCtx", "FpMatrix", "QuadClass", "form_invariants", "quadratic_character", "radical_basis",
           "BasicSystem", "StringDiagram", "parse_diagram", "parse_system", "reflection_generators",
           "BsgsGroup", "build_bsgs", "evaluate_word"]
