"""Automaton groups acting on regular rooted trees and their Basilica groups."""

from .errors import Inconclusive, InputError, ParseError, ResourceError
from .tree_core import (
    Automorphism,
    GroupSpec,
    Machine,
    Portrait,
    act,
    canonicalize,
    commutator,
    compose,
    decompose,
    from_recursion,
    from_wreath,
    identity,
    inverse,
    is_identity,
    label,
    portrait,
    power,
    rooted,
    section,
)

__version__ = "0.1.0"
