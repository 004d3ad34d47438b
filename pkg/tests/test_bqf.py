import math
import random

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from kummer import bqf, linalg as la
from kummer.bqf import BinaryForm
from kummer.discform import cyclic_from_lattice, isomorphic_forms
from kummer.errors import (
    DiscriminantMismatch,
    NotFundamental,
    SquareDiscriminant,
    UnsupportedDiscriminant,
)
from kummer.lattice import EvenLattice
import oracles

FUNDAMENTAL = [D for D in range(5, 700) if bqf.is_fundamental(D) and math.isqrt(D) ** 2 != D]


def random_sl2(rng, steps=6):
    m = ((1, 0), (0, 1))
    for _ in range(steps):
        k = rng.randint(-3, 3)
        step = ((1, k), (0, 1)) if rng.random() < 0.5 else ((1, 0), (k, 1))
        m = la.matmul(m, step)
    return m


forms = st.tuples(st.integers(-30, 30), st.integers(-30, 30), st.integers(-30, 30)).filter(
    lambda t: t[1] ** 2 - 4 * t[0] * t[2] > 0 and math.isqrt(t[1] ** 2 - 4 * t[0] * t[2]) ** 2
    != t[1] ** 2 - 4 * t[0] * t[2]
)


def test_validation():
    with pytest.raises(ValueError):
        BinaryForm(1, 0, 1)
    with pytest.raises(SquareDiscriminant):
        BinaryForm(1, 0, -4)
    with pytest.raises(NotFundamental):
        bqf.class_group(45)
    with pytest.raises(DiscriminantMismatch):
        bqf.class_group(5).class_of(BinaryForm(1, 1, -4))


def test_gram_and_opposite():
    f = BinaryForm(1, 1, -1)
    assert f.gram() == ((2, 1), (1, -2))
    assert EvenLattice(f.gram()).det == -f.discriminant
    assert f.opposite() == BinaryForm(1, -1, -1)
    assert f.is_reduced()


@given(forms)
@settings(max_examples=200)
def test_reduce_with_transform(t):
    f = BinaryForm(*t)
    g, m = bqf.reduce_with_transform(f)
    assert g.is_reduced()
    assert la.det(m) == 1
    assert f.transform(m) == g
    assert g.discriminant == f.discriminant


def test_reduction_examples():
    assert bqf.reduce(BinaryForm(1, 1, -1)) == BinaryForm(1, 1, -1)
    assert bqf.reduce(BinaryForm(1, 3, 1)) in bqf.cycle(BinaryForm(1, 1, -1))
    assert bqf.reduce(BinaryForm(-1, 1, 1)) in bqf.cycle(BinaryForm(1, 1, -1))
    assert set(bqf.cycle(bqf.principal_form(5))) == {BinaryForm(1, 1, -1), BinaryForm(-1, 1, 1)}


@pytest.mark.parametrize("D", FUNDAMENTAL)
def test_reduced_forms_and_class_number_oracle(D):
    assert [f.tolist() for f in bqf.reduced_forms(D)] == [list(x) for x in oracles.reduced_forms(D)]
    assert bqf.class_group(D).h_plus == oracles.narrow_class_number(D)


@pytest.mark.parametrize("D,h", [(5, 1), (17, 1), (37, 1), (65, 2), (145, 4), (401, 5)])
def test_class_numbers(D, h):
    cg = bqf.class_group(D)
    assert cg.h_plus == h
    assert cg.reps[0] == min(f for f in bqf.cycle(bqf.principal_form(D)) if f.a > 0)


def test_cycles_partition_reduced_forms():
    for D in (65, 145, 221):
        cg = bqf.class_group(D)
        flat = [f for c in cg.cycles for f in c]
        assert sorted(flat) == bqf.reduced_forms(D)
        for c in cg.cycles:
            assert all(bqf.rho(f) in c for f in c)


@given(forms, st.integers(0, 10**6))
@settings(max_examples=100)
def test_sl2_equivalence_is_invariant(t, seed):
    f = BinaryForm(*t)
    g = f.transform(random_sl2(random.Random(seed)))
    assert bqf.equivalent_sl2(f, g)
    m = bqf.sl2_transform_between(f, g)
    assert la.det(m) == 1 and f.transform(m) == g


def test_sl2_against_box_search():
    rng = random.Random(7)
    for D in (65, 145, 221, 401):
        reps = bqf.class_group(D).reps
        for f in reps:
            for g in reps:
                found = oracles.sl2_transform_in_box(tuple(f), tuple(g), 3)
                if found is not None:
                    assert bqf.equivalent_sl2(f, g)
                if f != g:
                    assert not bqf.equivalent_sl2(f, g)
        f = reps[-1]
        assert bqf.equivalent_sl2(f, f.transform(random_sl2(rng)))


def test_gl2_equivalence():
    f = bqf.principal_form(5)
    assert bqf.equivalent_gl2(f, f.opposite())
    cg = bqf.class_group(145)
    for pair in bqf.gl2_classes(cg):
        for i in pair:
            assert bqf.equivalent_gl2(cg.reps[pair[0]], cg.reps[i])
    pairs = bqf.gl2_classes(cg)
    for p in pairs:
        for q in pairs:
            if p != q:
                assert not bqf.equivalent_gl2(cg.reps[p[0]], cg.reps[q[0]])


@pytest.mark.parametrize("D", [65, 145, 221, 401, 577, 1297, 2501])
def test_group_axioms(D):
    cg = bqf.class_group(D)
    h = cg.h_plus
    T = cg.table
    for i in range(h):
        assert T[0][i] == i
        assert T[i][cg.inverse(i)] == 0
        for j in range(h):
            assert T[i][j] == T[j][i]
            for k in range(h):
                assert T[T[i][j]][k] == T[i][T[j][k]]


def test_d65_group_of_order_two():
    cg = bqf.class_group(65)
    assert cg.mul(1, 1) == 0


@given(st.sampled_from([D for D in FUNDAMENTAL if D % 2]), st.integers(0, 10**6))
@settings(max_examples=60)
def test_compose_is_well_defined_on_classes(D, seed):
    # composing arbitrary representatives lands in the class given by the table
    rng = random.Random(seed)
    cg = bqf.class_group(D)
    i, j = rng.randrange(cg.h_plus), rng.randrange(cg.h_plus)
    f = cg.reps[i].transform(random_sl2(rng))
    g = cg.reps[j].transform(random_sl2(rng))
    h = bqf.compose(f, g)
    assert h.discriminant == D and h.content() == 1
    assert cg.class_of(h) == cg.table[i][j]


@pytest.mark.parametrize("D", [65, 145, 221, 445, 901, 2501])
def test_compose_represents_products(D):
    # f(x1, y1) g(x2, y2) is a value of f*g
    cg = bqf.class_group(D)
    f, g = cg.reps[-1], cg.reps[len(cg.reps) // 2]
    h = bqf.compose(f, g)
    values = {h.evaluate(x, y) for x in range(-60, 61) for y in range(-60, 61)}
    for x1, y1, x2, y2 in [(1, 0, 1, 0), (1, 1, 0, 1), (2, -1, 1, 1)]:
        assert f.evaluate(x1, y1) * g.evaluate(x2, y2) in values


@pytest.mark.parametrize("D", [65, 145, 221, 445, 901, 2501, 3601])
def test_genera_match_discriminant_forms(D):
    cg = bqf.class_group(D)
    genera = bqf.genus_split(cg)
    assert len({len(g) for g in genera}) == 1
    disc = [cyclic_from_lattice(EvenLattice(f.gram())) for f in cg.reps]
    for i in range(cg.h_plus):
        for j in range(cg.h_plus):
            same = any(i in g and j in g for g in genera)
            assert same == isomorphic_forms(disc[i], disc[j])


def test_genus_split_examples():
    assert bqf.genus_split(bqf.class_group(5)) == [[0]]
    assert bqf.genus_split(bqf.class_group(65)) == [[0], [1]]
    assert [len(g) for g in bqf.genus_split(bqf.class_group(145))] == [2, 2]
    with pytest.raises(UnsupportedDiscriminant):
        bqf.genus_split(bqf.class_group(8))
    with pytest.raises(UnsupportedDiscriminant):
        bqf.genus_split(bqf.class_group(1105))


@pytest.mark.parametrize("D", FUNDAMENTAL[:80])
def test_fundamental_unit_against_bruteforce(D):
    unit = bqf.fundamental_unit(D)
    brute = oracles.pell_bruteforce(D)
    if brute is not None:
        assert (unit.t, unit.u, unit.norm_sign) == brute
    assert unit.t ** 2 - D * unit.u ** 2 == 4 * unit.norm_sign


def test_unit_examples():
    u5 = bqf.fundamental_unit(5)
    assert (u5.t, u5.u, u5.norm_sign) == (1, 1, -1)
    assert str(u5.epsilon_approx).startswith("1.6180339887498948482")
    u17 = bqf.fundamental_unit(17)
    assert (u17.t, u17.u, u17.norm_sign) == (8, 2, -1)
    assert bqf.pell_plus(5) == (3, 1)


@pytest.mark.parametrize("n", range(2, 40))
def test_unit_of_pipeline_shape(n):
    D = 4 * n * n + 1
    unit = bqf.fundamental_unit(D)
    assert unit.norm_sign == -1
    # epsilon <= 2n + sqrt(D) < D
    assert bqf.quadratic_sign(4 * n - unit.t, 2 - unit.u, D) >= 0


@given(st.integers(-1000, 1000), st.integers(-1000, 1000), st.integers(2, 5000))
def test_quadratic_sign(x, y, D):
    assume(math.isqrt(D) ** 2 != D)
    from decimal import Decimal, getcontext
    getcontext().prec = 60
    val = Decimal(x) + Decimal(y) * Decimal(D).sqrt()
    assert bqf.quadratic_sign(x, y, D) == (val > 0) - (val < 0)


@pytest.mark.parametrize("D", [5, 13, 17, 65, 145, 221, 401])
def test_automorph_generators(D):
    for f in bqf.class_group(D).reps:
        G = f.gram()
        gens = bqf.automorph_generators(f)
        for g in gens:
            assert la.congruent(G, g) == G
        improper = [g for g in gens if la.det(g) == -1]
        ambiguous = bqf.equivalent_sl2(f, f.opposite())
        assert bool(improper) == ambiguous


def test_automorphs_in_box_are_generated():
    # every small automorph of x^2 + xy - y^2 lies in the group generated
    f = BinaryForm(1, 1, -1)
    gens = bqf.automorph_generators(f)
    group = {((1, 0), (0, 1))}
    frontier = list(group)
    while frontier:
        x = frontier.pop()
        for g in gens:
            y = la.matmul(x, g)
            if max(abs(v) for row in y for v in row) <= 40 and y not in group:
                group.add(y)
                frontier.append(y)
    for g in oracles.automorphs_in_box(tuple(f), 3):
        assert g in group
