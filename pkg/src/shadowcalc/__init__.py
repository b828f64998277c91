"""Shadow calculus for 3- and 4-manifolds.

Boundary-decorated simple polyhedra with gleams, the local move calculus,
shadow construction from link diagrams and from triangulations, and the
Z/2 characteristic-class machinery.
"""

from .halfint import HalfInt
from .poly import (
    BNode,
    Edge,
    Pass,
    Region,
    Shadow,
    ShadowError,
    Vertex,
    gleam_weight,
    stats,
    validate,
    z2_gleam_cochain,
    z2_gleam_direct,
)
from .polyio import FormatError, parse_shadow, serialize_shadow

__all__ = [
    "BNode", "Edge", "FormatError", "HalfInt", "Pass", "Region", "Shadow",
    "ShadowError", "Vertex", "gleam_weight", "parse_shadow",
    "serialize_shadow", "stats", "validate", "z2_gleam_cochain",
    "z2_gleam_direct",
]
