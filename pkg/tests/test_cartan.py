from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from grslice.cartan import AWeightForm, CartanDatum, Chamber, Coweight, pairing


A1 = CartanDatum("A", 1)
A2 = CartanDatum("A", 2)
B2 = CartanDatum("B", 2)
C2 = CartanDatum("C", 2)


def forms(*vecs):
    return {AWeightForm(v) for v in vecs}


def cows(*vecs):
    return {Coweight(v) for v in vecs}


# ---------------------------------------------------------------- pairing

def test_pairing_dual_bases():
    for datum in (A1, A2, B2, C2, CartanDatum("D", 4)):
        for i in range(1, datum.rank + 1):
            for j in range(1, datum.rank + 1):
                got = datum.pairing(datum.fundamental_coweight(i), datum.simple_root_form(j))
                assert got == (1 if i == j else 0)


def test_pairing_rank1():
    omega = A1.fundamental_coweight(1)
    alpha_check = A1.simple_root_form(1)
    assert A1.pairing(omega, alpha_check) == 1
    assert A1.pairing(A1.simple_coroot(1), alpha_check) == 2


def test_pairing_rank2_offdiagonal():
    # <alpha_1, alphacheck_2> on the rank-2 type A datum
    assert A2.pairing(A2.simple_coroot(1), A2.simple_root_form(2)) == -1


def test_pairing_rank_mismatch():
    with pytest.raises(ValueError):
        pairing(Coweight([1]), AWeightForm([1, 0]))


# ---------------------------------------------------------------- inner / sharp

def test_inner_rank1():
    alpha = A1.simple_coroot(1)
    omega = A1.fundamental_coweight(1)
    assert A1.inner(alpha, alpha) == 2
    assert A1.inner(omega, omega) == Fraction(1, 2)
    assert A1.inner(alpha, A1.zero_coweight()) == 0


def test_sharp_rank1():
    alpha = A1.simple_coroot(1)
    omega = A1.fundamental_coweight(1)
    assert A1.sharp(alpha) == A1.simple_root_form(1)
    assert A1.sharp(omega) == AWeightForm([Fraction(1, 2)])
    assert A1.sharp(A1.zero_coweight()) == AWeightForm([0])


def test_inner_shortest_coroot_normalization():
    # min over simple coroots of (alpha_j, alpha_j) is exactly 2 in every type
    for datum in (A1, A2, B2, C2, CartanDatum("D", 4), CartanDatum("G", 2), CartanDatum("F", 4)):
        norms = [datum.inner(datum.simple_coroot(j), datum.simple_coroot(j))
                 for j in range(1, datum.rank + 1)]
        assert min(norms) == 2
        assert norms == [2 * d for d in datum.symmetrizers]


# ---------------------------------------------------------------- orbits

def test_orbit_rank1():
    omega = A1.fundamental_coweight(1)
    assert A1.weyl_orbit(omega) == cows([1], [-1])
    assert A1.weyl_orbit(A1.zero_coweight()) == cows([0])


def test_orbit_rank2_typeA():
    orbit = A2.weyl_orbit(A2.fundamental_coweight(1))
    assert len(orbit) == 3
    total = A2.zero_coweight()
    for v in orbit:
        total = total + v
    assert total.is_zero()


def test_orbit_B2_spin():
    orbit = B2.weyl_orbit(B2.fundamental_coweight(2))
    assert orbit == cows((0, 1), (1, -1), (-1, 1), (0, -1))


def test_orbit_C2_vector():
    orbit = C2.weyl_orbit(C2.fundamental_coweight(1))
    assert orbit == cows((1, 0), (-1, 1), (1, -1), (-1, 0))


# ---------------------------------------------------------------- matrices, symmetrizers

def test_hardcoded_rank2_matrices():
    assert B2.cartan_matrix == ((2, -1), (-2, 2))
    assert C2.cartan_matrix == ((2, -2), (-1, 2))
    assert CartanDatum("G", 2).cartan_matrix == ((2, -3), (-1, 2))
    f4 = CartanDatum("F", 4).cartan_matrix
    assert f4[1][2] == -1 and f4[2][1] == -2


def test_symmetrizers():
    assert B2.symmetrizers == (2, 1)
    assert C2.symmetrizers == (1, 2)
    assert CartanDatum("B", 3).symmetrizers == (2, 2, 1)
    assert CartanDatum("C", 3).symmetrizers == (1, 1, 2)
    assert CartanDatum("F", 4).symmetrizers == (2, 2, 1, 1)
    assert CartanDatum("G", 2).symmetrizers == (1, 3)
    assert CartanDatum("D", 4).symmetrizers == (1, 1, 1, 1)


def test_invalid_ranks():
    for letter, rank in (("B", 1), ("C", 1), ("D", 2), ("E", 5), ("E", 9), ("F", 3), ("G", 3), ("H", 2)):
        with pytest.raises(ValueError):
            CartanDatum(letter, rank)


# ---------------------------------------------------------------- roots

def test_root_counts():
    table = {
        ("A", 1): 2, ("A", 2): 6, ("A", 3): 12, ("A", 4): 20,
        ("B", 2): 8, ("B", 3): 18, ("C", 2): 8, ("C", 3): 18,
        ("D", 3): 12, ("D", 4): 24, ("D", 5): 40,
        ("E", 6): 72, ("E", 7): 126, ("E", 8): 240,
        ("F", 4): 48, ("G", 2): 12,
    }
    for (letter, rank), count in table.items():
        assert len(CartanDatum(letter, rank).root_list) == count


def test_root_list_closed_under_negation_and_reflection():
    for datum in (A2, B2, C2, CartanDatum("D", 4), CartanDatum("G", 2)):
        roots = set(datum.root_list)
        for f in roots:
            assert -f in roots
            for j in range(1, datum.rank + 1):
                assert datum.reflect_form(j, f) in roots


def test_positive_roots_B2_C2():
    assert set(B2.positive_roots(Chamber.dominant(B2))) == forms((1, 0), (0, 1), (1, 1), (2, 1))
    assert set(C2.positive_roots(Chamber.dominant(C2))) == forms((1, 0), (0, 1), (1, 1), (1, 2))


def test_positive_roots_rank2_typeA():
    assert set(A2.positive_roots(Chamber.dominant(A2))) == forms((1, 0), (0, 1), (1, 1))
    assert set(A1.positive_roots(Chamber.dominant(A1))) == forms((1,))


def test_coroot_of_root():
    for datum in (A1, A2, B2, C2, CartanDatum("D", 4), CartanDatum("G", 2)):
        for f, c in datum.coroot_of_root.items():
            assert datum.pairing(c, f) == 2
            # sharp(coroot) is proportional to the root with a positive ratio
            s = datum.sharp(c)
            ratio = {Fraction(a, b) for a, b in zip(s.coords, f.coords) if b != 0}
            assert len(ratio) == 1 and ratio.pop() > 0
        for j in range(1, datum.rank + 1):
            assert datum.coroot_of_root[datum.simple_root_form(j)] == datum.simple_coroot(j)


def test_two_rho_check_rank1():
    assert A1.two_rho_check == AWeightForm([1])
    assert A2.two_rho_check == AWeightForm([2, 2])


# ---------------------------------------------------------------- minuscule table

def test_minuscule_indices():
    assert CartanDatum("A", 4).minuscule_indices == {1, 2, 3, 4}
    assert CartanDatum("B", 3).minuscule_indices == {3}
    assert CartanDatum("C", 3).minuscule_indices == {1}
    assert CartanDatum("D", 5).minuscule_indices == {1, 4, 5}
    assert CartanDatum("E", 6).minuscule_indices == {1, 6}
    assert CartanDatum("E", 7).minuscule_indices == {7}
    assert CartanDatum("E", 8).minuscule_indices == frozenset()
    assert CartanDatum("F", 4).minuscule_indices == frozenset()
    assert CartanDatum("G", 2).minuscule_indices == frozenset()


def test_minuscule_orbit_pairings():
    # a fundamental coweight is listed as minuscule exactly when all its
    # orbit pairings against roots stay within {0, +-1}
    for datum in (A2, B2, C2, CartanDatum("D", 4), CartanDatum("G", 2)):
        for i in range(1, datum.rank + 1):
            orbit = datum.weyl_orbit(datum.fundamental_coweight(i))
            small = all(
                datum.pairing(v, f) in (-1, 0, 1) for v in orbit for f in datum.root_list
            )
            assert small == (i in datum.minuscule_indices)


# ---------------------------------------------------------------- chambers

def test_chamber_equality_by_sign_vector():
    assert Chamber(A2, Coweight([1, 2])) == Chamber.dominant(A2)
    assert Chamber.dominant(A2) != Chamber.antidominant(A2)
    assert -Chamber.dominant(A2) == Chamber.antidominant(A2)
    assert Chamber.dominant(A2) != Chamber.dominant(A1)


def test_chamber_rejects_wall_witness():
    with pytest.raises(ValueError):
        Chamber(A2, Coweight([0, 1]))
    with pytest.raises(ValueError):
        Chamber(A2, Coweight([1, -1]))  # on the hyperplane of alphacheck_1+alphacheck_2


def test_positive_roots_halving():
    for datum in (A2, B2, C2, CartanDatum("D", 4)):
        for witness in (Coweight([1] * datum.rank), Coweight([Fraction(7, 2)] + [1] * (datum.rank - 1))):
            ch = Chamber(datum, witness)
            pos = datum.positive_roots(ch)
            assert len(pos) == len(datum.root_list) // 2
            neg = datum.positive_roots(-ch)
            assert {-f for f in pos} == set(neg)


# ---------------------------------------------------------------- property tests

_DATA = [A1, A2, B2, C2, CartanDatum("A", 3), CartanDatum("D", 4)]


@st.composite
def datum_and_coweights(draw, count):
    datum = draw(st.sampled_from(_DATA))
    vecs = [
        Coweight(draw(st.lists(st.integers(-4, 4), min_size=datum.rank, max_size=datum.rank)))
        for _ in range(count)
    ]
    word = draw(st.lists(st.integers(1, datum.rank), max_size=8))
    return datum, vecs, word


@settings(max_examples=100, deadline=None)
@given(datum_and_coweights(count=2))
def test_inner_weyl_invariance(data):
    datum, (c1, c2), word = data
    w1, w2 = c1, c2
    for j in word:
        w1 = datum.reflect_coweight(j, w1)
        w2 = datum.reflect_coweight(j, w2)
    assert datum.inner(w1, w2) == datum.inner(c1, c2)


@settings(max_examples=100, deadline=None)
@given(datum_and_coweights(count=2))
def test_sharp_intertwines_pairing(data):
    datum, (c1, c2), _ = data
    assert datum.pairing(c2, datum.sharp(c1)) == datum.inner(c1, c2)
    assert datum.inner(c1, c2) == datum.inner(c2, c1)


@settings(max_examples=60, deadline=None)
@given(datum_and_coweights(count=1))
def test_reflection_preserves_pairing_with_reflected_form(data):
    datum, (c,), word = data
    for f in datum.root_list[:6]:
        w, g = c, f
        for j in word:
            w = datum.reflect_coweight(j, w)
            g = datum.reflect_form(j, g)
        assert datum.pairing(w, g) == datum.pairing(c, f)
