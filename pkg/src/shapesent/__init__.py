"""Strand-space skeletons, shape analysis sentences, and security goals."""

from .algebra import (
    Enc, Invk, Nat, Pair, Sort, SortError, Var, apply, atoms_of, canonicalize,
    carried_by, compose, match, sort_of,
)
from .homomorphism import Homomorphism, HomomorphismError, verify
from .logic import (
    Goal, Outcome, ShapeAnalysis, Verdict, check_goal, enumerate_assignments,
    characterization_check, eval_atom, shape_analysis_sentence, skeleton_formula,
)
from .frontend import parse
from .sexpr import ParseError
from .skeleton import Protocol, Role, Skeleton, check_wellformed

__version__ = "0.1.0"
