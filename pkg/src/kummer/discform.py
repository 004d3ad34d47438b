"""Cyclic discriminant forms, their orthogonal groups and double cosets.

A cyclic form of order ``m`` is determined by ``q(1)``, the value on a
generator; automorphisms of ``Z/m`` are multiplications by units, so
``O(A)`` and all subgroups in play are sets of units mod ``m``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from . import linalg as la
from .bqf import (
    REFLECTION,
    BinaryForm,
    _ext_gcd,
    automorph_generators,
    cycle,
    divisors,
    reduce,
    sl2_transform_between,
)
from .errors import NotCyclic, NotSubgroup
from .lattice import EvenLattice, complement_basis, discriminant_form
from .primes import factorize


def _mod2(x: Fraction) -> Fraction:
    return x - 2 * (x // 2)


@dataclass(frozen=True)
class CyclicForm:
    m: int
    q_gen: Fraction

    def __post_init__(self):
        q = Fraction(self.q_gen)
        if self.m < 1:
            raise ValueError("order must be positive")
        # q(x + m) = q(x) needs m q in Z and m^2 q in 2Z
        if (self.m * q).denominator != 1 or (self.m * self.m * q) % 2:
            raise ValueError(f"q(1) = {q} is not well defined on Z/{self.m}")
        object.__setattr__(self, "q_gen", _mod2(q))

    def q(self, x: int) -> Fraction:
        return _mod2(self.q_gen * x * x)

    def negate(self) -> "CyclicForm":
        return CyclicForm(self.m, -self.q_gen)

    def to_json(self) -> dict:
        return {"m": self.m, "q_gen": str(self.q_gen)}


@dataclass(frozen=True)
class SubgroupOfUnits:
    m: int
    elements: frozenset

    def __post_init__(self):
        object.__setattr__(self, "elements", frozenset(u % self.m if self.m > 1 else 0
                                                       for u in self.elements))

    def __len__(self):
        return len(self.elements)

    def __contains__(self, u):
        return (u % self.m if self.m > 1 else 0) in self.elements

    def is_subgroup(self) -> bool:
        els = self.elements
        one = 1 % self.m if self.m > 1 else 0
        if one not in els:
            return False
        return all((x * y) % max(self.m, 1) in els for x in els for y in els)

    def tolist(self) -> list:
        return sorted(self.elements)


def generated_subgroup(m: int, gens) -> SubgroupOfUnits:
    if m == 1:
        return SubgroupOfUnits(1, frozenset({0}))
    els = {1}
    frontier = [1]
    gens = [g % m for g in gens]
    while frontier:
        x = frontier.pop()
        for g in gens:
            y = x * g % m
            if y not in els:
                els.add(y)
                frontier.append(y)
    return SubgroupOfUnits(m, frozenset(els))


def cyclic_from_lattice(lat: EvenLattice) -> CyclicForm:
    f = discriminant_form(lat)
    if len(f.orders) == 0:
        return CyclicForm(1, Fraction(0))
    if len(f.orders) > 1:
        raise NotCyclic(f"discriminant group has invariants {f.orders}")
    return CyclicForm(f.orders[0], f.values[0][0])


def _units(m: int):
    return (u for u in range(1, m) if math.gcd(u, m) == 1)


def isomorphic_forms(f: CyclicForm, g: CyclicForm) -> bool:
    if f.m != g.m:
        return False
    if f.m == 1:
        return True
    # u^2 q_f == q_g (mod 2), cleared to a common denominator
    den = math.lcm(f.q_gen.denominator, g.q_gen.denominator)
    a = f.q_gen.numerator * (den // f.q_gen.denominator)
    b = g.q_gen.numerator * (den // g.q_gen.denominator)
    mod = 2 * den
    return any((u * u * a - b) % mod == 0 for u in _units(f.m))


def _square_roots_of_one(n: int) -> list:
    """All ``u`` mod ``n`` with ``u^2 = 1`` (CRT over the prime powers of ``n``)."""
    roots, mod = [0 if n == 1 else 1], 1
    for p, e in factorize(n).items():
        pe = p ** e
        if p != 2:
            local = [1, pe - 1]
        elif e == 1:
            local = [1]
        elif e == 2:
            local = [1, 3]
        else:
            half = pe // 2
            local = [1, pe - 1, half - 1, half + 1]
        inv = pow(mod, -1, pe)
        roots = [r + mod * ((l - r) * inv % pe) for r in roots for l in local]
        mod *= pe
    return sorted(roots)


def orthogonal_group(f: CyclicForm) -> SubgroupOfUnits:
    """Units ``u`` mod ``m`` with ``(u^2 - 1) q(1) = 0`` in ``Q/2Z``."""
    if f.m == 1:
        return SubgroupOfUnits(1, frozenset({0}))
    k, den = f.q_gen.numerator, f.q_gen.denominator
    # (u^2 - 1) k = 0 mod 2 den  <=>  u^2 = 1 mod M
    M = 2 * den // math.gcd(k, 2 * den)
    g = math.gcd(M, f.m)
    residues = {r % g for r in _square_roots_of_one(M)}
    if g == f.m:
        cands = residues
    else:
        cands = (u for u in range(1, f.m) if u % g in residues)
    els = {u for u in cands if math.gcd(u, f.m) == 1 and ((u * u - 1) * k) % (2 * den) == 0}
    return SubgroupOfUnits(f.m, frozenset(els))


def induced_unit(lat: EvenLattice, g) -> int:
    """The unit by which the isometry ``g`` (acting on coordinate columns)
    multiplies the generator of the cyclic discriminant group.
    """
    f = discriminant_form(lat)
    if len(f.orders) != 1:
        raise NotCyclic(f"discriminant group has invariants {f.orders}")
    image = la.matvec(g, f.generators[0])
    return f.element_coordinates(image)[0]


def image_of_lattice_isometries(form: BinaryForm) -> SubgroupOfUnits:
    """Image of ``O(S) -> O(A_S)`` for the rank-2 lattice ``S`` of ``form``."""
    lat = EvenLattice(form.gram())
    cf = cyclic_from_lattice(lat)
    if cf.m == 1:
        return SubgroupOfUnits(1, frozenset({0}))
    units = [induced_unit(lat, g) for g in automorph_generators(form)]
    return generated_subgroup(cf.m, units)


def double_cosets(left: SubgroupOfUnits, full: SubgroupOfUnits, right: SubgroupOfUnits) -> list:
    """Orbits of ``left x right`` on ``full`` acting by ``x -> l x r``, each sorted."""
    m = full.m
    if left.m != m or right.m != m:
        raise NotSubgroup("subgroups live modulo different integers")
    if not (left.elements <= full.elements and right.elements <= full.elements):
        raise NotSubgroup("left/right are not contained in the full group")
    for grp in (left, right, full):
        if not grp.is_subgroup():
            raise NotSubgroup(f"{grp.tolist()} is not closed under multiplication")
    mod = max(m, 1)
    remaining = set(full.elements)
    orbits = []
    while remaining:
        x = min(remaining)
        orb = {(l * x * r) % mod for l, r in product(left.elements, right.elements)}
        if m == 1:
            orb = {0}
        remaining -= orb
        orbits.append(sorted(orb))
    return orbits


def double_coset_count(left: SubgroupOfUnits, full: SubgroupOfUnits, right: SubgroupOfUnits) -> int:
    return len(double_cosets(left, full, right))


def product_subgroup(a: SubgroupOfUnits, b: SubgroupOfUnits) -> SubgroupOfUnits:
    mod = max(a.m, 1)
    return SubgroupOfUnits(a.m, frozenset((x * y) % mod for x in a.elements for y in b.elements))


def _gl2_transform(f: BinaryForm, g: BinaryForm):
    """Some ``m`` with ``det m = ±1`` and ``f.transform(m) == g``, or ``None``."""
    m = sl2_transform_between(f, g)
    if m is not None:
        return m
    m = sl2_transform_between(f.opposite(), g)
    if m is not None:
        return la.matmul(REFLECTION, m)
    return None


def _gl2_canonical(f: BinaryForm) -> BinaryForm:
    r = reduce(f)
    return min(set(cycle(r)) | set(cycle(r.opposite())))


def _solve_dot_one(w) -> tuple:
    """Integer ``x`` with ``w · x = 1`` for a primitive vector ``w``."""
    g, coeffs = w[0], [1] + [0] * (len(w) - 1)
    for i in range(1, len(w)):
        d, s, t = _ext_gcd(g, w[i])
        coeffs = [c * s for c in coeffs]
        coeffs[i] = t
        g = d
    if g < 0:
        coeffs = [-c for c in coeffs]
    return tuple(coeffs)


def _isotropic_vectors(form: BinaryForm, k: int):
    """Isotropic ``x + alpha e + beta f`` in ``L ⊕ U`` with ``x`` in the box
    ``[-k, k]^2`` of ``L``: exactly the solutions of ``alpha beta = -Q(x)``."""
    for x, y in product(range(-k, k + 1), repeat=2):
        n = -form.evaluate(x, y)
        if n == 0:
            pairs = [(a, 0) for a in range(-k, k + 1) if a] + [(0, b) for b in range(-k, k + 1) if b]
        else:
            pairs = []
            for dv in divisors(abs(n)):
                for s in (1, -1):
                    pairs.append((s * dv, n // (s * dv)))
        for a, b in pairs:
            yield (x, y, a, b)


def plane_isometry_units(form: BinaryForm, max_bound: int = 4) -> SubgroupOfUnits:
    """Units of ``O(A)`` realized by explicit isometries of ``L ⊕ U``.

    ``L`` is the lattice of ``form``.  Starting from the image of ``O(L)``,
    the search moves the hyperbolic plane: each primitive isotropic ``e``
    with ``(e, L ⊕ U) = Z`` extends to a plane ``U'`` whose complement is
    a binary lattice ``L''``.  Identifying ``L''`` with the reduced
    representative ``R`` of its GL2-class gives an isometry
    ``phi: R ⊕ U -> L ⊕ U``; two of them with the same ``R`` differ by an
    isometry of ``L ⊕ U`` whose unit is the ratio of their generator
    images.  Every ``phi`` is checked with ``phi^T G phi``.  The ``L``-part
    of ``e`` ranges over a growing box until the full group is reached or
    the box reaches ``max_bound``; the result is always a subgroup of the
    true image.
    """
    G = la.block_diag(form.gram(), ((0, 1), (1, 0)))
    lat = EvenLattice(G)
    fq = discriminant_form(lat)
    if not fq.orders:
        return SubgroupOfUnits(1, frozenset({0}))
    if len(fq.orders) > 1:
        raise NotCyclic(f"discriminant group has invariants {fq.orders}")
    m = fq.orders[0]
    full = orthogonal_group(CyclicForm(m, fq.values[0][0]))
    units = {1, m - 1} | set(image_of_lattice_isometries(form).elements)
    group = generated_subgroup(m, units)
    first: dict = {}
    gens: dict = {}
    seen: set = set()
    for k in range(1, max_bound + 1):
        for e in _isotropic_vectors(form, k):
            if group == full:
                return group
            if e in seen:
                continue
            seen.add(e)
            Ge = la.matvec(G, e)
            if math.gcd(*Ge) != 1:
                continue
            f0 = _solve_dot_one(Ge)
            half = la.bilinear(G, f0, f0) // 2
            f = tuple(a - half * b for a, b in zip(f0, e))
            C = complement_basis(lat, (e, f))
            cg = la.congruent(G, la.transpose(C))
            other = BinaryForm(cg[0][0] // 2, cg[0][1], cg[1][1] // 2)
            rep = _gl2_canonical(other)
            M = _gl2_transform(rep, other)
            # basis of R inside L'': columns of M^-1 applied to C
            Mi = la.inverse_rational(M)
            l1 = tuple(int(Mi[0][0]) * x + int(Mi[1][0]) * y for x, y in zip(*C))
            l2 = tuple(int(Mi[0][1]) * x + int(Mi[1][1]) * y for x, y in zip(*C))
            phi = la.transpose((l1, l2, e, f))
            GR = la.block_diag(rep.gram(), ((0, 1), (1, 0)))
            if la.congruent(G, phi) != GR:
                raise AssertionError("plane swap did not produce an isometry")
            if rep not in gens:
                gens[rep] = discriminant_form(EvenLattice(GR)).generators[0]
            c = fq.element_coordinates(la.matvec(phi, gens[rep]))[0]
            if rep not in first:
                first[rep] = c
                new = set(image_of_lattice_isometries(rep).elements)
            else:
                new = {c * pow(first[rep], -1, m) % m}
            if not new <= group.elements:
                units |= new
                group = generated_subgroup(m, units)
    return group
