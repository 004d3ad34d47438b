"""Counting embedding classes of the transcendental lattice into ``U^3``.

The number of G-equivalence classes of primitive embeddings is the sum,
over the isomorphism classes ``S_j`` in the genus of the Neron-Severi
lattice, of the double-coset counts ``|O(S_j) \\ O(A_{S_j}) / G|``.  Each
class corresponds to at most two Fourier-Mukai partners ``{B, B^}``, so the
partner count (equivalently the number of Kummer structures on ``Km A``)
lies in ``[p_count, 2 p_count]``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from . import bqf
from .discform import (
    SubgroupOfUnits,
    cyclic_from_lattice,
    double_coset_count,
    image_of_lattice_isometries,
    isomorphic_forms,
    orthogonal_group,
)
from .embed import nikulin_unique_genus
from .errors import NotHyperbolic, UnsupportedLattice
from .lattice import EvenLattice, discriminant_form, min_generators
from .primes import is_squarefree

GENERATION_NOTE = (
    "image of O(S_j) in O(A_S_j) computed from -1, the Pell automorph and, "
    "for ambiguous classes, one improper isometry; these are assumed to "
    "generate O(S_j)"
)


@dataclass
class FmCountReport:
    ns_gram: list
    method: str
    genus_reps: list = field(default_factory=list)
    per_class_cosets: list = field(default_factory=list)
    p_count: int = 0
    g_units: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    kummer_note: str = ""

    @property
    def fm_bound_low(self) -> int:
        return self.p_count

    @property
    def fm_bound_high(self) -> int:
        return 2 * self.p_count

    def to_json(self) -> dict:
        return {
            "ns_gram": self.ns_gram,
            "method": self.method,
            "genus_reps": self.genus_reps,
            "per_class_cosets": self.per_class_cosets,
            "p_count": self.p_count,
            "fm_bounds": [self.fm_bound_low, self.fm_bound_high],
            "g_units": self.g_units,
            "notes": self.notes,
            "kummer_note": self.kummer_note,
        }


def default_g(m: int) -> SubgroupOfUnits:
    """``{±1}`` in ``(Z/m)^x``: the generic Hodge-isometry image."""
    if m == 1:
        return SubgroupOfUnits(1, frozenset({0}))
    return SubgroupOfUnits(m, frozenset({1, m - 1}))


def _form_of(gram) -> bqf.BinaryForm:
    return bqf.BinaryForm(gram[0][0] // 2, gram[0][1], gram[1][1] // 2)


def genus_classes(form: bqf.BinaryForm) -> list:
    """Isomorphism classes of rank-2 even lattices in the genus of ``form``.

    Members are the GL2-classes of discriminant ``D`` whose discriminant
    form is isomorphic to that of ``form`` (same signature is automatic).
    Each class is given by its smallest reduced representative.
    """
    D = form.discriminant
    cg = bqf.cached_class_group(D)
    target = cyclic_from_lattice(EvenLattice(form.gram()))
    out = []
    for pair in bqf.gl2_classes(cg):
        rep = min(cg.reps[i] for i in pair)
        if isomorphic_forms(cyclic_from_lattice(EvenLattice(rep.gram())), target):
            out.append(rep)
    return sorted(out)


def count_embedding_classes(ns: EvenLattice, g_subgroup: SubgroupOfUnits | None = None) -> FmCountReport:
    if not ns.is_hyperbolic():
        raise NotHyperbolic(f"signature {ns.signature} is not hyperbolic")
    if ns.rank == 2:
        return _count_rank2(ns, g_subgroup)
    if ns.rank in (3, 4):
        disc = discriminant_form(ns)
        l = min_generators(disc)
        if not nikulin_unique_genus(ns):
            raise UnsupportedLattice(f"rank {ns.rank} < 2 + l(A) = {2 + l}")
        return FmCountReport(
            ns_gram=ns.tolist(),
            method="nikulin",
            genus_reps=[ns.tolist()],
            per_class_cosets=[1],
            p_count=1,
            notes=[f"rank {ns.rank} >= 2 + l(A_NS) = {2 + l}: genus is a single class "
                   "and O(NS) -> O(A_NS) is surjective"],
        )
    raise UnsupportedLattice(f"rank {ns.rank} is outside the supported range 2..4")


def _count_rank2(ns: EvenLattice, g_subgroup) -> FmCountReport:
    D = -ns.det
    if D == 1:
        # ns is U: unimodular, alone in its genus, trivial discriminant group
        return FmCountReport(ns_gram=ns.tolist(), method="rank2", genus_reps=[ns.tolist()],
                             per_class_cosets=[1], p_count=1, g_units=[0],
                             notes=["unimodular: genus {U}"])
    if not is_squarefree(D):
        raise UnsupportedLattice(f"|det| = {D} is not squarefree")
    form = _form_of(ns.gram)
    m = abs(D)
    g = g_subgroup if g_subgroup is not None else default_g(m)
    if g.m != m:
        raise ValueError(f"G must be a subgroup of units mod {m}")
    reps = genus_classes(form)
    counts = []
    for rep in reps:
        full = orthogonal_group(cyclic_from_lattice(EvenLattice(rep.gram())))
        left = image_of_lattice_isometries(rep)
        counts.append(double_coset_count(left, full, g))
    return FmCountReport(
        ns_gram=ns.tolist(),
        method="rank2",
        genus_reps=[[list(r) for r in rep.gram()] for rep in reps],
        per_class_cosets=counts,
        p_count=sum(counts),
        g_units=g.tolist(),
        notes=[GENERATION_NOTE],
    )


def kummer_structure_count(ns: EvenLattice, g_subgroup: SubgroupOfUnits | None = None,
                           product_type: bool = False) -> FmCountReport:
    """Same count, annotated for Kummer structures: ``|K(Km A)| = |FM(A)|``."""
    rep = count_embedding_classes(ns, g_subgroup)
    lo, hi = rep.fm_bound_low, rep.fm_bound_high
    if rep.p_count == 1:
        note = "K(X) = {A, A^}; further collapses to {A} iff A ≅ A^"
        if product_type and ns.rank == 4:
            note += "; rank 4 forces A ≅ E x F, hence A ≅ A^ and K(X) = {A}"
    else:
        note = (f"{lo} <= |K(X)| = |FM(A)| <= {hi}; each embedding class carries "
                "{B, B^}, which may coincide")
    rep.kummer_note = note
    return rep
