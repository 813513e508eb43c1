from math import comb

import pytest

from grslice.cartan import AWeightForm, CartanDatum, Chamber, Coweight
from grslice.slices import (
    FixedPoint,
    InvalidSlice,
    NonMinusculeUnsupported,
    SliceSpec,
    WeightMultiset,
    adjacent_transposition,
    dimension,
    enumerate_fixed_points,
    euler_class,
    euler_class_a,
    flip_sign,
    project_to_wall_slice,
    same_wall_component,
    split_attract_repel,
    tangent_weights,
    validate_point,
)
from grslice.symalg import Polynomial

from helpers import oracle_down_crossings, oracle_up_crossings, random_minuscule_specs

A1 = CartanDatum("A", 1)
A2 = CartanDatum("A", 2)


def a1_spec(l, k):
    return SliceSpec(A1, [1] * l, Coweight([k]))


def point(*vals):
    return FixedPoint(Coweight([v]) for v in vals)


TSTAR_P1 = a1_spec(2, 0)
DUVAL_A4 = a1_spec(5, 3)
TSTAR_FL3 = SliceSpec(A2, [1, 1, 1], Coweight([0, 0]))

E1 = Coweight([1, 0])
E2 = Coweight([-1, 1])
E3 = Coweight([0, -1])


# ---------------------------------------------------------------- validation

def test_minuscule_gate():
    B2 = CartanDatum("B", 2)
    with pytest.raises(NonMinusculeUnsupported):
        SliceSpec(B2, [1], Coweight([1, 0]))
    SliceSpec(B2, [2], Coweight([0, 1]))  # omega_2 is minuscule in type B


def test_mu_below_lambda_gate():
    with pytest.raises(InvalidSlice):
        a1_spec(1, 0)  # lambda - mu = omega is not in the coroot lattice
    with pytest.raises(InvalidSlice):
        a1_spec(2, 4)  # mu above lambda
    with pytest.raises(InvalidSlice):
        SliceSpec(A2, [1], Coweight([2, -2]))  # below lambda but not a weight


def test_zero_slots_allowed():
    spec = SliceSpec(A1, [1, 0, 1], Coweight([0]))
    pts = enumerate_fixed_points(spec)
    assert pts == [point(-1, 0, 1), point(1, 0, -1)]


# ---------------------------------------------------------------- enumeration

def test_enumerate_rank1_basic():
    assert enumerate_fixed_points(TSTAR_P1) == [point(-1, 1), point(1, -1)]


def test_enumerate_duval():
    pts = enumerate_fixed_points(DUVAL_A4)
    assert len(pts) == 5
    # lex order puts the single -omega in slot 1, then slot 2, ..
    for i, p in enumerate(pts):
        assert p.delta[i] == Coweight([-1])
        assert sum(1 for d in p.delta if d == Coweight([-1])) == 1


def test_enumerate_full_flag():
    pts = enumerate_fixed_points(TSTAR_FL3)
    assert len(pts) == 6
    for p in pts:
        assert sorted(p.delta) == sorted([E1, E2, E3])


def test_enumerate_binomial_counts():
    for l in range(1, 8):
        for k in range(-l, l + 1):
            if (l + k) % 2:
                continue
            assert len(enumerate_fixed_points(a1_spec(l, k))) == comb(l, (l + k) // 2)


def test_validate_point():
    validate_point(TSTAR_P1, point(-1, 1))
    with pytest.raises(ValueError):
        validate_point(TSTAR_P1, point(1, 1))
    with pytest.raises(ValueError):
        validate_point(TSTAR_P1, point(-1, 1, 1))


# ---------------------------------------------------------------- dimension

def test_dimension():
    assert dimension(DUVAL_A4) == 2
    assert dimension(TSTAR_FL3) == 6
    assert dimension(SliceSpec(A2, [2], A2.fundamental_coweight(2))) == 0
    assert dimension(TSTAR_P1) == 2


def test_dimension_nondominant_target():
    # reflecting mu across a wall leaves the tangent totals unchanged,
    # so the dimension must use the dominant representative
    assert dimension(a1_spec(4, -2)) == dimension(a1_spec(4, 2)) == 2
    assert dimension(a1_spec(3, -3)) == 0
    b2 = CartanDatum("B", 2)
    spec = SliceSpec(b2, [2, 2, 2], Coweight((2, -1)))
    assert dimension(spec) == 2
    for p in enumerate_fixed_points(spec):
        assert tangent_weights(spec, p).total() == 2


# ---------------------------------------------------------------- tangent weights

def duval_points(n):
    return enumerate_fixed_points(a1_spec(n + 1, n - 1))


def test_tangent_weights_duval_golden():
    # surface slices: tangent weights at p_i are alpha+(i-1)h and -(alpha+ih)
    alpha = AWeightForm([1])
    for n in range(1, 5):
        spec = a1_spec(n + 1, n - 1)
        for i, p in enumerate(duval_points(n)):
            ws = tangent_weights(spec, p)
            assert ws == WeightMultiset(1, {(alpha, i - 1): 1, (-alpha, -i): 1})


def test_tangent_weights_point_slice():
    spec = SliceSpec(A2, [2], A2.fundamental_coweight(2))
    (p,) = enumerate_fixed_points(spec)
    assert tangent_weights(spec, p).total() == 0


def test_tangent_weights_full_flag_golden():
    a1f, a2f, a3f = AWeightForm([1, 0]), AWeightForm([0, 1]), AWeightForm([1, 1])
    ws = tangent_weights(TSTAR_FL3, FixedPoint([E1, E2, E3]))
    assert ws == WeightMultiset(
        2,
        {
            (a1f, 0): 1, (a2f, 0): 1, (a3f, 0): 1,
            (-a1f, -1): 1, (-a2f, -1): 1, (-a3f, -1): 1,
        },
    )
    ws2 = tangent_weights(TSTAR_FL3, FixedPoint([E2, E1, E3]))
    assert ws2 == WeightMultiset(
        2,
        {
            (a1f, -1): 1, (-a1f, 0): 1,
            (a2f, 0): 1, (-a2f, -1): 1,
            (a3f, 0): 1, (-a3f, -1): 1,
        },
    )


def test_tangent_weights_against_crossing_oracles():
    for spec in random_minuscule_specs(40, seed=20260814):
        for p in enumerate_fixed_points(spec):
            ws = tangent_weights(spec, p)
            assert ws.entries == oracle_up_crossings(spec, p)
            assert ws.entries == oracle_down_crossings(spec, p)


def test_tangent_weights_sum_and_duality():
    for spec in random_minuscule_specs(40, seed=9):
        dim = dimension(spec)
        for p in enumerate_fixed_points(spec):
            ws = tangent_weights(spec, p)
            assert ws.total() == dim
            for (root, n), m in ws.entries.items():
                assert ws.multiplicity(-root, -n - 1) == m


# ---------------------------------------------------------------- euler classes

def test_euler_class_examples():
    a = Polynomial.gen(2, 0)
    h = Polynomial.gen(2, 1)
    alpha = AWeightForm([1])
    ws = WeightMultiset(1, {(alpha, -1): 1, (-alpha, 0): 1})
    assert euler_class(ws) == -(a**2) + a * h
    assert euler_class(WeightMultiset(1, {})) == Polynomial.one(2)
    assert euler_class(WeightMultiset(1, {(-alpha, -1): 2})) == (a + h) ** 2
    assert euler_class_a(ws) == -(a**2)


def test_split_attract_repel():
    spec = DUVAL_A4
    p0 = enumerate_fixed_points(spec)[0]
    dom = Chamber.dominant(A1)
    ws = tangent_weights(spec, p0)
    att, rep = split_attract_repel(ws, dom)
    alpha = AWeightForm([1])
    assert att == WeightMultiset(1, {(alpha, -1): 1})
    assert rep == WeightMultiset(1, {(-alpha, 0): 1})
    att2, rep2 = split_attract_repel(ws, -dom)
    assert (att2, rep2) == (rep, att)


# ---------------------------------------------------------------- flip signs

def test_flip_sign_examples():
    spec = DUVAL_A4
    p0 = enumerate_fixed_points(spec)[0]
    dom = Chamber.dominant(A1)
    assert flip_sign(spec, p0, dom, dom) == 1
    assert flip_sign(spec, p0, dom, -dom) == -1


def test_flip_sign_transitive_and_witness_independent():
    chambers = [
        Chamber(A2, Coweight([1, 1])),
        Chamber(A2, Coweight([1, -2])),
        Chamber(A2, Coweight([-3, 1])),
        Chamber(A2, Coweight([-1, -1])),
    ]
    for p in enumerate_fixed_points(TSTAR_FL3):
        for c1 in chambers:
            for c2 in chambers:
                s12 = flip_sign(TSTAR_FL3, p, c1, c2)
                assert s12 == flip_sign(TSTAR_FL3, p, c2, c1)
                for c3 in chambers:
                    assert (
                        s12 * flip_sign(TSTAR_FL3, p, c2, c3)
                        == flip_sign(TSTAR_FL3, p, c1, c3)
                    )
    # same chamber, different witnesses
    w1 = Chamber(A2, Coweight([1, 1]))
    w2 = Chamber(A2, Coweight([5, 3]))
    assert w1 == w2
    for p in enumerate_fixed_points(TSTAR_FL3):
        assert flip_sign(TSTAR_FL3, p, w1, -w1) == flip_sign(TSTAR_FL3, p, w2, -w2)


# ---------------------------------------------------------------- walls

def test_same_wall_component_examples():
    p = FixedPoint([E1, E2, E3])
    q = FixedPoint([E2, E1, E3])
    assert same_wall_component(TSTAR_FL3, p, q) == AWeightForm([1, 0])
    r = FixedPoint([E3, E1, E2])
    assert same_wall_component(TSTAR_FL3, p, r) is None
    s1, s2 = enumerate_fixed_points(TSTAR_P1)
    assert same_wall_component(TSTAR_P1, s1, s2) == AWeightForm([1])
    with pytest.raises(ValueError):
        same_wall_component(TSTAR_P1, s1, s1)


def test_project_to_wall_slice():
    p = FixedPoint([E1, E2, E3])
    wall_spec, image = project_to_wall_slice(TSTAR_FL3, p, AWeightForm([1, 0]))
    assert wall_spec.lambda_seq == (1, 1, 0)
    assert wall_spec.mu == Coweight([0])
    assert image == point(1, -1, 0)
    validate_point(wall_spec, image)
    # rank-1 projection along its own root is the identity
    s1 = point(-1, 1)
    sp, im = project_to_wall_slice(TSTAR_P1, s1, AWeightForm([1]))
    assert sp == TSTAR_P1 and im == s1
    # target pairing: m = <mu, root>
    spec = SliceSpec(A2, [1, 1, 2], Coweight([1, 0]))
    for q in enumerate_fixed_points(spec):
        wsp, _ = project_to_wall_slice(spec, q, AWeightForm([1, 0]))
        assert wsp.mu == Coweight([1])


def test_projected_point_is_fixed_point_of_wall_slice():
    for spec in random_minuscule_specs(25, seed=31):
        pts = enumerate_fixed_points(spec)
        for p in pts[:6]:
            for root in spec.cartan.root_list[:4]:
                wall_spec, image = project_to_wall_slice(spec, p, root)
                validate_point(wall_spec, image)


# ---------------------------------------------------------------- transpositions

def test_adjacent_transposition():
    p = point(-1, 1)
    assert adjacent_transposition(p, 1) == point(1, -1)
    assert adjacent_transposition(adjacent_transposition(p, 1), 1) == p
    q = point(1, 1, -1)
    assert adjacent_transposition(q, 1) == q
    with pytest.raises(IndexError):
        adjacent_transposition(p, 2)
    with pytest.raises(IndexError):
        adjacent_transposition(p, 0)


# ---------------------------------------------------------------- serialization

def test_fixed_point_json_round_trip():
    p = FixedPoint([E1, E2, E3])
    assert FixedPoint.from_json(p.to_json()) == p
    assert p.to_json() == [[1, 0], [-1, 1], [0, -1]]


def test_weight_multiset_json_round_trip():
    ws = tangent_weights(TSTAR_FL3, FixedPoint([E1, E2, E3]))
    assert WeightMultiset.from_json(ws.to_json(), 2) == ws
    for entry in ws.to_json():
        assert set(entry) == {"root", "n", "mult"}


def test_point_labels():
    assert point(-1, 1).label() == "(-w,w)"
    assert point(1, 0, -1).label() == "(w,0,-w)"
    assert FixedPoint([E1, E2]).label() == "([1,0],[-1,1])"
