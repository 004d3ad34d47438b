"""Indefinite binary quadratic forms and narrow class groups.

A form ``(a, b, c)`` stands for ``a x^2 + b x y + c y^2`` and for the even
rank-2 lattice with Gram matrix ``((2a, b), (b, 2c))``.  Proper (SL2)
equivalence is decided by reduction cycles; nothing here uses floating
point except the reporting-only decimal expansion of the fundamental unit.
"""
from __future__ import annotations

import math
from array import array
from dataclasses import dataclass, field
from decimal import Decimal, localcontext
from functools import lru_cache

from . import linalg as la
from .errors import (
    DiscriminantMismatch,
    NotFundamental,
    NotPrimitive,
    SquareDiscriminant,
    UnsupportedDiscriminant,
)
from .primes import factorize

UNIT_DIGITS = 50


@dataclass(frozen=True, order=True)
class BinaryForm:
    a: int
    b: int
    c: int

    def __post_init__(self):
        d = self.discriminant
        if d <= 0:
            raise ValueError(f"form {tuple(self)} is not indefinite (D = {d})")
        r = math.isqrt(d)
        if r * r == d:
            raise SquareDiscriminant(f"discriminant {d} is a perfect square")

    def __iter__(self):
        return iter((self.a, self.b, self.c))

    @property
    def discriminant(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def gram(self) -> tuple:
        return ((2 * self.a, self.b), (self.b, 2 * self.c))

    def opposite(self) -> "BinaryForm":
        """``(a, -b, c)``: the inverse class, and the image under ``(x, y) -> (x, -y)``."""
        return BinaryForm(self.a, -self.b, self.c)

    def evaluate(self, x: int, y: int) -> int:
        return self.a * x * x + self.b * x * y + self.c * y * y

    def content(self) -> int:
        return math.gcd(math.gcd(self.a, self.b), self.c)

    def transform(self, m) -> "BinaryForm":
        """The form with Gram ``m^T · G · m`` (substitute ``(x, y) -> m (x, y)``)."""
        g = la.congruent(self.gram(), m)
        return BinaryForm(g[0][0] // 2, g[0][1], g[1][1] // 2)

    def is_reduced(self) -> bool:
        s = math.isqrt(self.discriminant)
        a2 = 2 * abs(self.a)
        return 0 < self.b <= s and a2 + self.b > s and a2 - self.b <= s

    def tolist(self) -> list:
        return [self.a, self.b, self.c]


def principal_form(D: int) -> BinaryForm:
    s = D % 2
    return BinaryForm(1, s, (s - D) // 4)


def _check_disc(D: int):
    if D <= 0:
        raise ValueError("discriminant must be positive")
    r = math.isqrt(D)
    if r * r == D:
        raise SquareDiscriminant(f"discriminant {D} is a perfect square")
    if D % 4 not in (0, 1):
        raise ValueError(f"{D} is not a discriminant (must be 0 or 1 mod 4)")


def _rho_step(f: BinaryForm):
    """One reduction step ``(a, b, c) -> (c, r, (r^2 - D) / 4c)`` and its matrix."""
    D = f.discriminant
    s = math.isqrt(D)
    c = f.c
    ac = abs(c)
    two_c = 2 * ac
    # r = -b (mod 2c)
    if ac > s:
        # -|c| < r <= |c|
        r = (-f.b) % two_c
        if r > ac:
            r -= two_c
    else:
        # sqrt(D) - 2|c| < r < sqrt(D)
        r = s - ((s + f.b) % two_c)
    k = (r + f.b) // (2 * c)
    m = ((0, -1), (1, k))
    g = BinaryForm(c, r, (r * r - D) // (4 * c))
    return g, m


def rho(f: BinaryForm) -> BinaryForm:
    return _rho_step(f)[0]


def _mat2mul(x, y):
    return ((x[0][0] * y[0][0] + x[0][1] * y[1][0], x[0][0] * y[0][1] + x[0][1] * y[1][1]),
            (x[1][0] * y[0][0] + x[1][1] * y[1][0], x[1][0] * y[0][1] + x[1][1] * y[1][1]))


def _mat2inv_sl(x):
    (p, q), (r, s) = x
    d = p * s - q * r
    if d == 1:
        return ((s, -q), (-r, p))
    if d == -1:
        return ((-s, q), (r, -p))
    raise ValueError("matrix is not unimodular")


IDENTITY2 = ((1, 0), (0, 1))


def reduce_with_transform(f: BinaryForm):
    """Reduced form ``g`` and ``M`` in SL2(Z) with ``f.transform(M) == g``."""
    m = IDENTITY2
    g = f
    while not g.is_reduced():
        g, step = _rho_step(g)
        m = _mat2mul(m, step)
    return g, m


def reduce(f: BinaryForm) -> BinaryForm:
    """A reduced form properly equivalent to ``f``.

    Reduced means ``0 < b < sqrt(D)`` and ``sqrt(D) - b < 2|a| < sqrt(D) + b``.
    """
    return reduce_with_transform(f)[0]


def cycle(f: BinaryForm) -> list:
    """The rho-cycle of reduced forms through ``reduce(f)``."""
    start = reduce(f)
    out = [start]
    g = rho(start)
    while g != start:
        out.append(g)
        g = rho(g)
    return out


def _same_disc(f: BinaryForm, g: BinaryForm):
    if f.discriminant != g.discriminant:
        raise DiscriminantMismatch(f"{f.discriminant} != {g.discriminant}")


def equivalent_sl2(f: BinaryForm, g: BinaryForm) -> bool:
    _same_disc(f, g)
    return reduce(g) in set(cycle(f))


def equivalent_gl2(f: BinaryForm, g: BinaryForm) -> bool:
    """Lattice isomorphism of the associated rank-2 even lattices."""
    _same_disc(f, g)
    cyc = set(cycle(f))
    return reduce(g) in cyc or reduce(g.opposite()) in cyc


def sl2_transform_between(f: BinaryForm, g: BinaryForm):
    """``M`` in SL2(Z) with ``f.transform(M) == g``, or ``None`` if inequivalent."""
    _same_disc(f, g)
    rf, mf = reduce_with_transform(f)
    rg, mg = reduce_with_transform(g)
    walk = IDENTITY2
    h = rf
    while h != rg:
        h, step = _rho_step(h)
        walk = _mat2mul(walk, step)
        if h == rf:
            return None
    return _mat2mul(_mat2mul(mf, walk), _mat2inv_sl(mg))


def _ext_gcd(a: int, b: int):
    if b == 0:
        return (a, 1, 0) if a >= 0 else (-a, -1, 0)
    g, x, y = _ext_gcd(b, a % b)
    return g, y, x - (a // b) * y


def _coprime_representation(f: BinaryForm, modulus: int):
    """An SL2-equivalent form whose leading coefficient is coprime to ``modulus``."""
    if math.gcd(f.a, modulus) == 1:
        return f
    bound = 1
    while True:
        for x in range(-bound, bound + 1):
            for y in range(0, bound + 1):
                if math.gcd(x, y) != 1:
                    continue
                v = f.evaluate(x, y)
                if v != 0 and math.gcd(v, modulus) == 1:
                    _, z, w = _ext_gcd(x, y)
                    # x*z + y*w = 1, so the matrix [[x, -w], [y, z]] is in SL2(Z)
                    g = f.transform(((x, -w), (y, z)))
                    assert g.a == v
                    return g
        bound += 1


def compose(f: BinaryForm, g: BinaryForm) -> BinaryForm:
    """Gauss composition via Dirichlet's united forms; result is reduced.

    ``g`` is first moved within its class to a form whose leading
    coefficient is coprime to ``f.a``; then a common middle coefficient
    ``B`` is found by CRT and the composite is ``(a1 a2, B, (B^2 - D)/4 a1 a2)``.
    """
    _same_disc(f, g)
    if f.content() != 1 or g.content() != 1:
        raise NotPrimitive("composition is defined here for primitive forms only")
    D = f.discriminant
    g = _coprime_representation(g, f.a)
    a1, a2 = f.a, g.a
    A1, A2 = abs(a1), abs(a2)
    if A2 == 1:
        B = f.b
    else:
        inv = pow(A1, -1, A2)
        k = inv * ((g.b - f.b) // 2) % A2
        B = f.b + 2 * A1 * k
    a3 = a1 * a2
    num = B * B - D
    assert num % (4 * a3) == 0
    return reduce(BinaryForm(a3, B, num // (4 * a3)))


def is_fundamental(D: int) -> bool:
    if D % 4 == 1:
        return all(e == 1 for e in factorize(D).values())
    if D % 4 == 0:
        m = D // 4
        return m % 4 in (2, 3) and all(e == 1 for e in factorize(m).values())
    return False


# divisor enumeration backed by a smallest-prime-factor sieve
_SPF_CAP = 1 << 23
_spf = array("i", [0, 1])


def _ensure_spf(n: int):
    global _spf
    if len(_spf) > n:
        return
    size = max(n + 1, 2 * len(_spf))
    spf = array("i", range(size))
    for i in range(2, math.isqrt(size - 1) + 1):
        if spf[i] == i:
            for j in range(i * i, size, i):
                if spf[j] == j:
                    spf[j] = i
    _spf = spf


def _factor_small(n: int) -> dict:
    if n >= _SPF_CAP:
        return factorize(n)
    _ensure_spf(n)
    out: dict = {}
    while n > 1:
        p = _spf[n]
        out[p] = out.get(p, 0) + 1
        n //= p
    return out


def divisors(n: int) -> list:
    divs = [1]
    for p, e in _factor_small(n).items():
        divs = [d * p ** k for d in divs for k in range(e + 1)]
    return divs


def reduced_forms(D: int) -> list:
    """All reduced forms of discriminant ``D``, sorted."""
    _check_disc(D)
    s = math.isqrt(D)
    out = []
    for b in range(2 - D % 2, s + 1, 2):
        n = (D - b * b) // 4
        lo, hi = s - b, s + b  # need lo < 2d <= hi
        for d in divisors(n):
            if lo < 2 * d <= hi:
                c = n // d
                out.append(BinaryForm(d, b, -c))
                out.append(BinaryForm(-d, b, c))
    return sorted(out)


def _class_key(cyc) -> BinaryForm:
    return min(g for g in cyc if g.a > 0)


@dataclass
class ClassGroup:
    """Narrow class group of a fundamental discriminant.

    ``reps[i]`` is the lexicographically smallest form with ``a > 0`` in
    the ``i``-th reduction cycle; classes are ordered by ``reps``, so the
    principal class is index 0.
    """

    D: int
    reps: list
    cycles: list
    index: dict = field(repr=False)
    _table: list = field(default=None, repr=False)

    @property
    def h_plus(self) -> int:
        return len(self.reps)

    def class_of(self, f: BinaryForm) -> int:
        if f.discriminant != self.D:
            raise DiscriminantMismatch(f"{f.discriminant} != {self.D}")
        return self.index[reduce(f)]

    def inverse(self, i: int) -> int:
        return self.class_of(self.reps[i].opposite())

    def mul(self, i: int, j: int) -> int:
        if self._table is not None:
            return self._table[i][j]
        return self.class_of(compose(self.reps[i], self.reps[j]))

    @property
    def table(self) -> list:
        if self._table is None:
            h = self.h_plus
            self._table = [[self.class_of(compose(self.reps[i], self.reps[j])) for j in range(h)]
                           for i in range(h)]
        return self._table

    def to_json(self, genera=None) -> dict:
        out = {"D": self.D, "h_plus": self.h_plus, "reps": [f.tolist() for f in self.reps]}
        if genera is not None:
            out["genera"] = genera
        return out


def class_group(D: int) -> ClassGroup:
    _check_disc(D)
    if not is_fundamental(D):
        raise NotFundamental(f"{D} is not a fundamental discriminant")
    forms = reduced_forms(D)
    index: dict = {}
    seen: set = set()
    cycles = []
    for f in forms:
        if f in seen:
            continue
        cyc = cycle(f)
        seen.update(cyc)
        cycles.append(cyc)
    cycles.sort(key=_class_key)
    for i, cyc in enumerate(cycles):
        for g in cyc:
            index[g] = i
    assert len(index) == len(forms)
    return ClassGroup(D=D, reps=[_class_key(c) for c in cycles], cycles=cycles, index=index)


def _legendre(a: int, p: int) -> int:
    r = pow(a % p, (p - 1) // 2, p)
    return -1 if r == p - 1 else r


def genus_character(f: BinaryForm, p: int) -> int:
    """``(m / p)`` for any value ``m`` of ``f`` coprime to the odd prime ``p``."""
    bound = 1
    while True:
        for x in range(-bound, bound + 1):
            for y in range(0, bound + 1):
                if math.gcd(x, y) == 1:
                    v = f.evaluate(x, y)
                    if v % p:
                        return _legendre(v, p)
        bound += 1


def genus_split(cg: ClassGroup) -> list:
    """Partition class indices into genera by the characters at the primes of ``D``.

    Genera are listed in order of their smallest class index.
    """
    D = cg.D
    if D % 2 == 0:
        raise UnsupportedDiscriminant("even discriminants are outside the supported setting")
    primes = sorted(factorize(D))
    if len(primes) > 2:
        raise UnsupportedDiscriminant(f"{D} has more than two prime factors")
    groups: dict = {}
    for i, f in enumerate(cg.reps):
        key = tuple(genus_character(f, p) for p in primes)
        groups.setdefault(key, []).append(i)
    return sorted(groups.values(), key=lambda g: g[0])


def gl2_classes(cg: ClassGroup, indices=None) -> list:
    """Group SL2-classes into GL2-classes (a class joins its inverse).

    Returns sorted lists of class indices, each list being one isomorphism
    class of rank-2 even lattices.
    """
    idx = range(cg.h_plus) if indices is None else indices
    seen = set()
    out = []
    for i in idx:
        if i in seen:
            continue
        j = cg.inverse(i)
        pair = sorted({i, j})
        seen.update(pair)
        out.append(pair)
    return out


# --------------------------------------------------------------------------
# units and automorphs


@dataclass(frozen=True)
class UnitData:
    """Fundamental unit ``(t + u sqrt(D)) / 2`` with ``t^2 - D u^2 = 4 * norm_sign``."""

    D: int
    t: int
    u: int
    norm_sign: int

    @property
    def epsilon_approx(self) -> Decimal:
        return unit_decimal(self.D, self.t, self.u)

    def squared(self) -> tuple:
        """``(t, u)`` of the square, which always has norm +1."""
        return (self.t * self.t + self.D * self.u * self.u) // 2, self.t * self.u

    def to_json(self) -> dict:
        return {"t": self.t, "u": self.u, "norm_sign": self.norm_sign,
                "epsilon": str(self.epsilon_approx)}


def unit_decimal(D: int, t: int, u: int, digits: int = UNIT_DIGITS) -> Decimal:
    with localcontext() as ctx:
        ctx.prec = digits + 10
        val = (Decimal(t) + Decimal(u) * Decimal(D).sqrt()) / 2
        ctx.prec = digits
        return +val


def fundamental_unit(D: int) -> UnitData:
    """Smallest unit ``> 1`` of the order of discriminant ``D``.

    Walks the continued fraction of ``w = (s + sqrt(D)) / 2`` (``s = D mod 2``)
    as ``(P + sqrt(D)) / Q`` with exact integer recurrences.  Each
    convergent ``p/q`` gives a candidate ``p - q w'`` = ``(2p - s q + q sqrt(D)) / 2``;
    the first candidate of norm ``±1`` is the fundamental unit.
    """
    _check_disc(D)
    r = math.isqrt(D)
    s = D % 2
    P, Q = s, 2
    p_prev, p_cur = 0, 1
    q_prev, q_cur = 1, 0
    while True:
        if Q > 0:
            a = (P + r) // Q
        else:
            a = -((P + r) // (-Q)) - 1
        p_prev, p_cur = p_cur, a * p_cur + p_prev
        q_prev, q_cur = q_cur, a * q_cur + q_prev
        t = 2 * p_cur - s * q_cur
        u = q_cur
        n = t * t - D * u * u
        if u > 0 and t > 0 and n in (4, -4):
            return UnitData(D=D, t=t, u=u, norm_sign=n // 4)
        P = a * Q - P
        Q = (D - P * P) // Q


def quadratic_sign(x: int, y: int, D: int) -> int:
    """Sign of ``x + y sqrt(D)`` for non-square ``D > 0``, exactly."""
    if x >= 0 and y >= 0:
        return 0 if x == 0 and y == 0 else 1
    if x <= 0 and y <= 0:
        return -1
    lhs, rhs = x * x, y * y * D
    if x > 0:
        return 1 if lhs > rhs else -1
    return 1 if rhs > lhs else -1


def pell_plus(D: int) -> tuple:
    """Minimal ``(t, u)`` with ``t^2 - D u^2 = 4``, ``u > 0``."""
    unit = fundamental_unit(D)
    return (unit.t, unit.u) if unit.norm_sign == 1 else unit.squared()


def proper_automorph(f: BinaryForm, t: int, u: int):
    a, b, c = f
    return (((t - b * u) // 2, -c * u), (a * u, (t + b * u) // 2))


REFLECTION = ((1, 0), (0, -1))


def automorph_generators(f: BinaryForm) -> list:
    """Generators of the isometry group of the lattice of ``f``.

    ``-1``, the proper automorph from the minimal ``t^2 - D u^2 = 4``
    solution, and, when ``f`` is properly equivalent to its opposite, one
    improper isometry.
    """
    gens = [((-1, 0), (0, -1))]
    t, u = pell_plus(f.discriminant)
    gens.append(proper_automorph(f, t, u))
    m = sl2_transform_between(f, f.opposite())
    if m is not None:
        gens.append(_mat2mul(m, REFLECTION))
    G = f.gram()
    for g in gens:
        assert la.congruent(G, g) == G
    return gens


@lru_cache(maxsize=4096)
def cached_class_group(D: int) -> ClassGroup:
    return class_group(D)
