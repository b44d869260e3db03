"""Exact-arithmetic flat-surface toolkit: cylinder decompositions and the
permutation action of parabolic twists on symmetry-fixed marked points."""

__version__ = "1.0.0"

from .qfield import QuadExpr, qe
from .prototypes import Prototype
from .surface import FlatSurface, make_P, make_L, make_Aplus, make_Aminus, make_Z
from .cylinders import decompose, twist_permutation
from .groups import Perm, generate, iso_class

__all__ = [
    "QuadExpr",
    "qe",
    "Prototype",
    "FlatSurface",
    "make_P",
    "make_L",
    "make_Aplus",
    "make_Aminus",
    "make_Z",
    "decompose",
    "twist_permutation",
    "Perm",
    "generate",
    "iso_class",
]
