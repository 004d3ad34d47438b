"""Explicit primitive embeddings of rank-2 even lattices into ``U^3``."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import linalg as la
from .errors import NonPrimitive
from .lattice import (
    EvenLattice,
    FiniteQuadraticForm,
    complement_basis,
    discriminant_form,
    hyperbolic_U3,
    is_primitive_embedding,
    min_generators,
)


@dataclass(frozen=True)
class EmbeddingMatrix:
    """Images of the two basis vectors in the basis ``e1, f1, e2, f2, e3, f3``."""

    rows: tuple

    def __post_init__(self):
        rows = la.as_matrix(self.rows)
        if la.shape(rows) != (2, 6):
            raise ValueError("embedding matrix must be 2 x 6")
        object.__setattr__(self, "rows", rows)

    def pullback_gram(self) -> tuple:
        return la.matmul(la.matmul(self.rows, hyperbolic_U3().gram), la.transpose(self.rows))

    def is_primitive(self) -> bool:
        return is_primitive_embedding(hyperbolic_U3(), self.rows)

    def tolist(self) -> list:
        return [list(r) for r in self.rows]


def standard_embedding(form) -> EmbeddingMatrix:
    """``v1 -> e1 + a f1``, ``v2 -> b f1 + e2 + c f2`` for the form ``(a, b, c)``.

    Works for any integer triple; the pullback Gram is ``((2a, b), (b, 2c))``
    and the identity minor in the ``e1, e2`` columns makes it primitive.
    """
    a, b, c = form
    return EmbeddingMatrix(((1, a, 0, 0, 0, 0), (0, b, 1, c, 0, 0)))


def complement_lattice(e: EmbeddingMatrix) -> EvenLattice:
    return complement_with_basis(e)[0]


def complement_with_basis(e: EmbeddingMatrix):
    if not e.is_primitive():
        raise NonPrimitive("embedding is not primitive")
    ambient = hyperbolic_U3()
    basis = complement_basis(ambient, e.rows)
    gram = la.matmul(la.matmul(basis, ambient.gram), la.transpose(basis))
    return EvenLattice(gram), basis


def nikulin_unique_genus(lat: EvenLattice) -> bool:
    """Indefinite and ``rank >= 2 + l(A_L)``: single class in the genus,
    and ``O(L) -> O(A_L)`` onto.
    """
    if not lat.is_indefinite():
        return False
    return lat.rank >= 2 + min_generators(discriminant_form(lat))


def _solve_integral(m, rhs) -> tuple:
    """Some integer ``y`` with ``y · m == rhs``, via the Smith form of ``m^T``."""
    snf = la.smith_normal_form(la.transpose(m))
    # m^T = u^-1 diag(d) v^-1, so diag(d) z = u rhs and y = v z
    urhs = la.matvec(snf.u, rhs)
    z = [0] * len(snf.v)
    for i, r in enumerate(urhs):
        d = snf.d[i] if i < len(snf.d) else 0
        if d == 0:
            if r:
                raise NonPrimitive("no integral solution")
        elif r % d:
            raise NonPrimitive("no integral solution")
        else:
            z[i] = r // d
    return la.matvec(snf.v, z)


@dataclass(frozen=True)
class GlueMap:
    """The anti-isometry ``A_S -> A_T`` induced by ``S ⊕ T ⊂ U^3``.

    ``images[k]`` are the coordinates (on the generators of ``A_T``) of the
    image of the ``k``-th generator of ``A_S``.
    """

    source: FiniteQuadraticForm
    target: FiniteQuadraticForm
    images: tuple

    def is_anti_isometry(self) -> bool:
        s, t = self.source, self.target
        if s.order != t.order:
            return False
        k = len(s.orders)
        for i in range(k):
            if t.q(self.images[i]) != (-s.values[i][i]) % 2:
                return False
            for j in range(i + 1, k):
                if t.b(self.images[i], self.images[j]) != (-s.values[i][j]) % 1:
                    return False
            # the image of a generator of order m must be killed by m
            if any((s.orders[i] * c) % o for c, o in zip(self.images[i], t.orders)):
                return False
        return self.image_order() == t.order

    def image_order(self) -> int:
        """Size of the subgroup of ``A_T`` generated by the images."""
        t = self.target
        if not t.orders:
            return 1
        rows = [list(img) for img in self.images]
        rows += [[o if i == j else 0 for j in range(len(t.orders))] for i, o in enumerate(t.orders)]
        snf_d = la.smith_normal_form(la.as_matrix(rows)).d
        index = 1
        for d in snf_d:
            index *= d
        return t.order // index


def glue_map(e: EmbeddingMatrix) -> GlueMap:
    """For ``x`` in ``S*``, pick ``y`` in ``U^3`` with ``(y, s) = (x, s)`` for
    ``s`` in ``S``; then ``y - x`` lies in ``T*`` and ``x + S -> (y - x) + T``
    is the gluing anti-isometry.
    """
    ambient = hyperbolic_U3().gram
    S = EvenLattice(e.pullback_gram())
    T, kbasis = complement_with_basis(e)
    fs = discriminant_form(S)
    ft = discriminant_form(T)
    GB = la.matmul(ambient, la.transpose(e.rows))  # 6 x 2
    GK = la.matmul(ambient, la.transpose(kbasis))  # 6 x 4
    images = []
    for x in fs.generators:
        X = la.vecmat(x, e.rows)  # rational 6-vector in the ambient
        rhs = la.vecmat(X, GB)
        if any(Fraction(r).denominator != 1 for r in rhs):
            raise ValueError("generator is not a dual vector")
        y = _solve_integral(GB, tuple(int(r) for r in rhs))
        diff = tuple(yi - Xi for yi, Xi in zip(y, X))
        # coordinates w of diff in the complement basis: w · Gram_T = diff · G · K^T
        w = la.solve_rational(la.transpose(T.gram), la.vecmat(diff, GK))
        images.append(ft.element_coordinates(w))
    return GlueMap(source=fs, target=ft, images=tuple(images))


def split_complement(e: EmbeddingMatrix):
    """Write the complement of an embedding supported on ``e1, f1, e2, f2``
    as ``L ⊕ U`` with ``U = <e3, f3>``.

    Returns ``(form, basis)``: ``form`` is a reduced binary form for ``L``
    and ``basis`` lists ``l1, l2, e3, f3`` in ambient coordinates.  The
    basis is checked to span the same lattice as :func:`complement_basis`.
    """
    from .bqf import BinaryForm, reduce_with_transform

    rows = e.rows
    if any(r[4] or r[5] for r in rows):
        raise ValueError("embedding must avoid the third hyperbolic plane")
    u2 = la.block_diag(((0, 1), (1, 0)), ((0, 1), (1, 0)))
    inner = complement_basis(EvenLattice(u2), tuple(r[:4] for r in rows))
    g = la.congruent(u2, la.transpose(inner))
    red, m = reduce_with_transform(BinaryForm(g[0][0] // 2, g[0][1], g[1][1] // 2))
    l1 = tuple(m[0][0] * x + m[1][0] * y for x, y in zip(*inner)) + (0, 0)
    l2 = tuple(m[0][1] * x + m[1][1] * y for x, y in zip(*inner)) + (0, 0)
    basis = (l1, l2, (0, 0, 0, 0, 1, 0), (0, 0, 0, 0, 0, 1))
    full = complement_with_basis(e)[1]
    if la.hermite_normal_form(basis) != la.hermite_normal_form(full):
        raise AssertionError("split basis does not span the complement")
    gram = la.congruent(hyperbolic_U3().gram, la.transpose(basis))
    if gram != la.block_diag(red.gram(), ((0, 1), (1, 0))):
        raise AssertionError("split basis has the wrong Gram matrix")
    return red, basis
