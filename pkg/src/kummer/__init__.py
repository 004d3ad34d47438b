"""Exact lattice computations for Fourier-Mukai partners and Kummer structures
of abelian surfaces."""

from .bqf import BinaryForm, class_group, fundamental_unit
from .fmcount import count_embedding_classes, kummer_structure_count
from .lattice import EvenLattice, discriminant_form, hyperbolic_U3, rescale
from .pipeline import construct_examples, scan_sequence, verify_construction

__all__ = [
    "BinaryForm",
    "EvenLattice",
    "class_group",
    "construct_examples",
    "count_embedding_classes",
    "discriminant_form",
    "fundamental_unit",
    "hyperbolic_U3",
    "kummer_structure_count",
    "rescale",
    "scan_sequence",
    "verify_construction",
]

__version__ = "0.1.0"
