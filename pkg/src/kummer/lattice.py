"""Even integral lattices given by Gram matrices, and their discriminant forms."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import linalg as la
from .errors import DegenerateInput, OddResult


def _mod(x: Fraction, n: int) -> Fraction:
    return x - n * (x // n)


@dataclass(frozen=True)
class EvenLattice:
    gram: tuple

    def __post_init__(self):
        g = la.as_matrix(self.gram)
        object.__setattr__(self, "gram", g)
        if len(g) and len(g[0]) != len(g):
            raise ValueError("Gram matrix must be square")
        if not la.is_symmetric(g):
            raise ValueError("Gram matrix must be symmetric")
        if any(g[i][i] % 2 for i in range(len(g))):
            raise OddResult("Gram matrix has an odd diagonal entry")
        if la.det(g) == 0:
            raise DegenerateInput("Gram matrix is degenerate")

    @property
    def rank(self) -> int:
        return len(self.gram)

    @property
    def det(self) -> int:
        return la.det(self.gram)

    @property
    def signature(self) -> tuple[int, int]:
        return la.signature(self.gram)

    def is_hyperbolic(self) -> bool:
        return self.signature == (1, self.rank - 1)

    def is_indefinite(self) -> bool:
        pos, neg = self.signature
        return pos > 0 and neg > 0

    def tolist(self) -> list:
        return [list(r) for r in self.gram]

    @classmethod
    def from_json(cls, data) -> "EvenLattice":
        if not isinstance(data, list) or not all(isinstance(r, list) for r in data):
            raise ValueError("Gram matrix must be a JSON array of arrays")
        if not all(isinstance(x, int) and not isinstance(x, bool) for r in data for x in r):
            raise ValueError("Gram entries must be integers")
        return cls(data)


def rescale(lat: EvenLattice, m: int) -> EvenLattice:
    """The lattice ``L(m)``: same group, form multiplied by ``m``."""
    if m == 0:
        raise ValueError("rescaling factor must be nonzero")
    return EvenLattice(tuple(tuple(m * x for x in row) for row in lat.gram))


U = ((0, 1), (1, 0))


def hyperbolic_plane() -> EvenLattice:
    return EvenLattice(U)


def hyperbolic_U3() -> EvenLattice:
    """``U ⊕ U ⊕ U`` in the basis ``e1, f1, e2, f2, e3, f3``."""
    return EvenLattice(la.block_diag(U, U, U))


@dataclass(frozen=True)
class FiniteQuadraticForm:
    """Discriminant form ``(L*/L, q_L)`` of an even lattice.

    ``orders`` are the nontrivial invariant factors ``m_1 | m_2 | ...``.
    ``generators`` are dual-lattice vectors (rational coordinates in the
    lattice basis) whose classes generate the cyclic factors.
    ``values[i][i]`` is ``q(g_i)`` reduced into ``[0, 2)`` and
    ``values[i][j]`` (``i != j``) is ``b(g_i, g_j)`` reduced into ``[0, 1)``.

    ``coords`` maps a dual vector to its coordinates on the generators:
    row ``k`` of ``coords`` applied to ``gram · x`` gives the ``k``-th
    coordinate modulo ``orders[k]``.
    """

    orders: tuple
    values: tuple
    generators: tuple = field(default=(), compare=False)
    coords: tuple = field(default=(), compare=False)
    gram: tuple = field(default=(), compare=False)

    @property
    def order(self) -> int:
        n = 1
        for m in self.orders:
            n *= m
        return n

    @property
    def denominator(self) -> int:
        """Common denominator of the stored values: twice the group exponent."""
        return 2 * (self.orders[-1] if self.orders else 1)

    def q(self, x: Sequence[int]) -> Fraction:
        """``q`` of the element with coordinates ``x`` on the generators, in ``[0, 2)``."""
        k = len(self.orders)
        total = Fraction(0)
        for i in range(k):
            total += x[i] * x[i] * self.values[i][i]
            for j in range(i + 1, k):
                total += 2 * x[i] * x[j] * self.values[i][j]
        return _mod(total, 2)

    def b(self, x: Sequence[int], y: Sequence[int]) -> Fraction:
        k = len(self.orders)
        total = Fraction(0)
        for i in range(k):
            for j in range(k):
                v = self.values[i][j] if i != j else self.values[i][i]
                total += x[i] * y[j] * v
        return _mod(total, 1)

    def element_coordinates(self, dual_vector: Sequence) -> tuple:
        """Coordinates on the generators of the class of a dual vector."""
        w = la.matvec(self.gram, dual_vector)
        out = []
        for row, m in zip(self.coords, self.orders):
            c = la.dot(row, w)
            if Fraction(c).denominator != 1:
                raise ValueError("vector is not in the dual lattice")
            out.append(int(c) % m)
        return tuple(out)

    def elements(self):
        """Iterate over all coordinate tuples of the group."""
        from itertools import product
        return product(*(range(m) for m in self.orders))


def discriminant_form(lat: EvenLattice) -> FiniteQuadraticForm:
    """Discriminant group ``L*/L`` with its ``Q/2Z``-valued form.

    With ``u · G · v = diag(d)``, the dual lattice is ``G^{-1} Z^n`` and
    ``v · diag(d)^{-1} e_i`` generates the ``i``-th cyclic factor.
    """
    g = lat.gram
    snf = la.smith_normal_form(g)
    idx = [i for i, d in enumerate(snf.d) if d > 1]
    gens = []
    for i in idx:
        col = [snf.v[r][i] for r in range(len(g))]
        gens.append(tuple(Fraction(c, snf.d[i]) for c in col))
    k = len(gens)
    values = []
    for i in range(k):
        row = []
        for j in range(k):
            val = la.bilinear(g, gens[i], gens[j])
            row.append(_mod(val, 2) if i == j else _mod(val, 1))
        values.append(tuple(row))
    return FiniteQuadraticForm(
        orders=tuple(snf.d[i] for i in idx),
        values=tuple(values),
        generators=tuple(gens),
        coords=tuple(snf.u[i] for i in idx),
        gram=g,
    )


def negate_form(f: FiniteQuadraticForm) -> FiniteQuadraticForm:
    k = len(f.orders)
    values = tuple(
        tuple(_mod(-f.values[i][j], 2 if i == j else 1) for j in range(k)) for i in range(k)
    )
    return FiniteQuadraticForm(f.orders, values, f.generators, f.coords, f.gram)


def min_generators(f: FiniteQuadraticForm) -> int:
    return len(f.orders)


def orthogonal_complement(ambient: EvenLattice, image_basis) -> EvenLattice:
    """Saturated orthogonal complement of the span of ``image_basis`` rows.

    The returned lattice carries the Gram matrix in the Hermite-normal
    basis of the complement; use :func:`complement_basis` for the basis.
    """
    basis = complement_basis(ambient, image_basis)
    return EvenLattice(la.matmul(la.matmul(basis, ambient.gram), la.transpose(basis)))


def complement_basis(ambient: EvenLattice, image_basis) -> tuple:
    b = la.as_matrix(image_basis)
    if la.rank(b) != len(b):
        raise DegenerateInput("image basis rows are linearly dependent")
    return la.kernel_saturation(la.matmul(ambient.gram, la.transpose(b)))


def is_primitive_embedding(ambient: EvenLattice, image_basis) -> bool:
    b = la.as_matrix(image_basis)
    d = la.smith_normal_form(b).d
    return len(d) == len(b) and all(x == 1 for x in d)
