"""Exact computations with scissors congruence groups of fields.

Smith normal forms over the integers, finite fields and rational square
classes, presentations of pre-Bloch and refined scissors congruence groups,
residue maps over Q, and replays of the lemma chain describing the
character components of RP+(Q).
"""
from .algebra import CharacterFq, CharacterQ, FqContext, RationalField, SquareClassQ, field_of_order, fq_make
from .linalg import (
    AbGroupStructure,
    Cokernel,
    EchelonLattice,
    IntMatrix,
    SmithDecomposition,
    class_order,
    cokernel,
    member_zhalf,
    odd_localize,
    smith,
)
from .scissors import (
    INF,
    ZERO,
    Flavor,
    ModuleElement,
    Presentation,
    bloch_structure,
    build_presentation,
    c_const,
    five_term,
    psi1,
    psi2,
    structure,
)
from .snfcache import SnfCache

__version__ = "0.1.0"

__all__ = [
    "AbGroupStructure", "CharacterFq", "CharacterQ", "Cokernel", "EchelonLattice", "Flavor", "FqContext",
    "INF", "IntMatrix", "ModuleElement", "Presentation", "RationalField", "SmithDecomposition", "SnfCache",
    "SquareClassQ", "ZERO", "bloch_structure", "build_presentation", "c_const", "class_order", "cokernel",
    "field_of_order", "five_term", "fq_make", "member_zhalf", "odd_localize", "psi1", "psi2", "smith",
    "structure",
]
