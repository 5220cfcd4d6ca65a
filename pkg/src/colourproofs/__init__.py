"""Graph colouring unsatisfiability toolkit.

Encodes k-colouring as polynomial systems (0/1 and roots-of-unity variants)
and integer inequalities, reduces constrained pigeon-hole instances to
colouring instances via injectivity gadgets, searches for bounded-degree
Nullstellensatz certificates and polynomial-calculus refutations, builds
explicit cutting-planes refutations of the reduced instances, and checks all
three kinds of proof objects against brute-force oracles.
"""

from .fields import FieldElement, FieldSpec, field_with_kth_root
from .graphs import FphpInstance, Graph
from .polynomials import Polynomial

__all__ = [
    "FieldElement",
    "FieldSpec",
    "field_with_kth_root",
    "FphpInstance",
    "Graph",
    "Polynomial",
]
