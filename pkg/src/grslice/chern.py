"""Divisor-class multiplication operators in the stable basis.

The slice carries tautological line bundles L_0, ..., L_l (L_0 trivial) and
successive quotients E_i = L_i / L_{i-1}.  Multiplying the stable basis by
the first Chern class of any of these acts through an upper-triangular
matrix: a diagonal family of linear equivariant weights plus strictly
triangular corrections supported on adjacent fixed-point pairs.  The module
builds these matrices from the combinatorial formula and, in rank one,
recomputes them by equivariant localization against the exact restriction
matrices, so the two routes can be compared entry by entry.
"""

from __future__ import annotations

from collections import Counter
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

from .cartan import AWeightForm, Chamber, Coweight, pairing
from .slices import (
    FixedPoint,
    SliceSpec,
    enumerate_fixed_points,
    euler_class_a,
    split_attract_repel,
    tangent_weights,
)
from .stab_a1 import normalize_polarization, stab_matrix
from .stab_general import sigma_sign, stab_mod_h2
from .symalg import NonDivisible, Polynomial, RationalFunction, _canonical_linear, exact_div


class NonPolynomialEntry(RuntimeError):
    """A localization sum failed to reduce to a degree-one polynomial."""


class EquivariantLinearForm:
    """Restriction of a line-bundle class: a linear form plus a multiple of h."""

    __slots__ = ("a_part", "h_coeff")

    def __init__(self, a_part: AWeightForm, h_coeff):
        self.a_part = a_part
        self.h_coeff = Fraction(h_coeff)

    def to_polynomial(self) -> Polynomial:
        return Polynomial.linear_form(self.a_part.coords, self.h_coeff)

    def __add__(self, other: "EquivariantLinearForm") -> "EquivariantLinearForm":
        return EquivariantLinearForm(self.a_part + other.a_part, self.h_coeff + other.h_coeff)

    def __sub__(self, other: "EquivariantLinearForm") -> "EquivariantLinearForm":
        return EquivariantLinearForm(self.a_part - other.a_part, self.h_coeff - other.h_coeff)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, EquivariantLinearForm)
            and self.a_part == other.a_part
            and self.h_coeff == other.h_coeff
        )

    def __hash__(self):
        return hash((self.a_part, self.h_coeff))

    def __repr__(self):
        return f"EquivariantLinearForm({self.a_part!r}, {self.h_coeff})"


BundleTag = Union[str, Tuple[str, int]]


def parse_bundle(spec: SliceSpec, bundle: BundleTag) -> Tuple[str, int]:
    """Normalize a bundle tag to ("L", k) with 0 <= k <= l or ("E", i) with 1 <= i <= l."""
    if isinstance(bundle, str):
        kind, digits = bundle[:1], bundle[1:]
        if not digits.isdigit():
            raise ValueError(f"malformed bundle tag {bundle!r}")
        idx = int(digits)
    else:
        kind, idx = bundle
    kind = kind.upper()
    l = spec.length
    if kind == "L" and 0 <= idx <= l:
        return kind, idx
    if kind == "E" and 1 <= idx <= l:
        return kind, idx
    raise ValueError(f"bundle {kind}{idx} out of range for a length-{l} slice")


def line_bundle_weight(spec: SliceSpec, p: FixedPoint, i: int) -> EquivariantLinearForm:
    """Torus weight of L_i at the fixed point p, for 0 <= i <= l."""
    if not 0 <= i <= spec.length:
        raise ValueError(f"line bundle index {i} out of range")
    sigma = p.sigma()[i]
    return EquivariantLinearForm(
        spec.cartan.sharp(sigma), Fraction(spec.cartan.inner(sigma, sigma), 2)
    )


def e_bundle_weight(spec: SliceSpec, p: FixedPoint, i: int) -> EquivariantLinearForm:
    """Torus weight of E_i = L_i / L_{i-1} at p, for 1 <= i <= l."""
    if not 1 <= i <= spec.length:
        raise ValueError(f"quotient bundle index {i} out of range")
    return line_bundle_weight(spec, p, i) - line_bundle_weight(spec, p, i - 1)


def bundle_weight(spec: SliceSpec, p: FixedPoint, bundle: BundleTag) -> EquivariantLinearForm:
    kind, idx = parse_bundle(spec, bundle)
    if kind == "L":
        return line_bundle_weight(spec, p, idx)
    return e_bundle_weight(spec, p, idx)


class OperatorMatrix:
    """Matrix of an operator in the stable basis.

    Column p lists the coefficients over rows q: the operator sends the basis
    element at p to sum_q entries[q][p] times the basis element at q.
    """

    __slots__ = ("spec", "chamber", "basis", "entries", "label")

    def __init__(
        self,
        spec: SliceSpec,
        chamber: Optional[Chamber],
        basis: Sequence[FixedPoint],
        entries: List[List[Polynomial]],
        label: Optional[str] = None,
    ):
        self.spec = spec
        self.chamber = chamber
        self.basis = list(basis)
        self.entries = entries
        self.label = label

    def index(self, p: FixedPoint) -> int:
        return self.basis.index(p)

    def entry(self, q: FixedPoint, p: FixedPoint) -> Polynomial:
        return self.entries[self.index(q)][self.index(p)]

    def validate(self) -> None:
        """Diagonal entries are degree-one; off-diagonal ones rational multiples of h."""
        n = len(self.basis)
        for qi in range(n):
            for pi in range(n):
                e = self.entries[qi][pi]
                if qi == pi:
                    if e.deg_a() > 1 or e.h_degree() > 1 or e.total_degree() > 1:
                        raise AssertionError(f"diagonal entry at {self.basis[pi]} not linear")
                elif not e.is_zero():
                    if e.h_degree() != 1 or not (e.div_h().total_degree() == 0):
                        raise AssertionError(
                            f"off-diagonal entry ({self.basis[qi]}, {self.basis[pi]}) "
                            "is not a rational multiple of h"
                        )

    def _combine(self, other: "OperatorMatrix", op) -> "OperatorMatrix":
        if self.spec != other.spec or self.basis != other.basis:
            raise ValueError("operator matrices live on different bases")
        rows = [
            [op(a, b) for a, b in zip(ra, rb)]
            for ra, rb in zip(self.entries, other.entries)
        ]
        chamber = self.chamber if self.chamber == other.chamber else None
        return OperatorMatrix(self.spec, chamber, self.basis, rows)

    def __add__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        return self._combine(other, lambda a, b: a + b)

    def __sub__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        return self._combine(other, lambda a, b: a - b)

    def __matmul__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        if self.spec != other.spec or self.basis != other.basis:
            raise ValueError("operator matrices live on different bases")
        n = len(self.basis)
        nv = self.spec.cartan.rank + 1
        rows = []
        for qi in range(n):
            row = []
            for pi in range(n):
                total = Polynomial.zero(nv)
                for ri in range(n):
                    a = self.entries[qi][ri]
                    b = other.entries[ri][pi]
                    if not a.is_zero() and not b.is_zero():
                        total = total + a * b
                row.append(total)
            rows.append(row)
        chamber = self.chamber if self.chamber == other.chamber else None
        return OperatorMatrix(self.spec, chamber, self.basis, rows)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, OperatorMatrix)
            and self.spec == other.spec
            and self.basis == other.basis
            and self.entries == other.entries
        )

    def to_json(self) -> dict:
        return {
            "basis": [p.to_json() for p in self.basis],
            "bundle": self.label,
            "entries": [[e.to_json() for e in row] for row in self.entries],
        }


def _zero_rows(nvars: int, n: int) -> List[List[Polynomial]]:
    return [[Polynomial.zero(nvars) for _ in range(n)] for _ in range(n)]


def h_operator(spec: SliceSpec, i: int) -> OperatorMatrix:
    """Diagonal operator with eigenvalue sharp(delta_i) + (h/2) (delta_i, mu) at p."""
    if not 1 <= i <= spec.length:
        raise ValueError(f"slot index {i} out of range")
    points = enumerate_fixed_points(spec)
    nv = spec.cartan.rank + 1
    rows = _zero_rows(nv, len(points))
    for pi, p in enumerate(points):
        d = p.delta[i - 1]
        form = EquivariantLinearForm(
            spec.cartan.sharp(d), Fraction(spec.cartan.inner(d, spec.mu), 2)
        )
        rows[pi][pi] = form.to_polynomial()
    return OperatorMatrix(spec, None, points, rows, label=f"H{i}")


def _moved_point(p: FixedPoint, i: int, j: int, coroot: Coweight) -> FixedPoint:
    """p with slot i lowered and slot j raised by the coroot (1-based slots)."""
    delta = list(p.delta)
    delta[i - 1] = delta[i - 1] - coroot
    delta[j - 1] = delta[j - 1] + coroot
    return FixedPoint(delta)


def omega_zero(spec: SliceSpec, i: int, j: int) -> OperatorMatrix:
    """Diagonal pairing operator: eigenvalue (delta_i, delta_j) at p."""
    if not (1 <= i <= spec.length and 1 <= j <= spec.length):
        raise ValueError("slot index out of range")
    points = enumerate_fixed_points(spec)
    nv = spec.cartan.rank + 1
    rows = _zero_rows(nv, len(points))
    for pi, p in enumerate(points):
        val = spec.cartan.inner(p.delta[i - 1], p.delta[j - 1])
        rows[pi][pi] = Polynomial.constant(nv, Fraction(val))
    return OperatorMatrix(spec, None, points, rows)


def omega_root(
    spec: SliceSpec,
    i: int,
    j: int,
    root: AWeightForm,
    ch: Chamber,
    polarization_signs=None,
) -> OperatorMatrix:
    """Single-root lowering operator between slots i < j.

    Sends p to sigma_{p,q} (alpha, alpha)/2 times q whenever slot i pairs to
    +1 and slot j to -1 against the root; q lowers slot i and raises slot j
    by the coroot.
    """
    if not 1 <= i < j <= spec.length:
        raise ValueError("slots must satisfy 1 <= i < j <= l")
    coroot = spec.cartan.coroot_of_root.get(root)
    if coroot is None:
        raise ValueError(f"{root} is not a root of the datum")
    points = enumerate_fixed_points(spec)
    nv = spec.cartan.rank + 1
    rows = _zero_rows(nv, len(points))
    index = {p: m for m, p in enumerate(points)}
    half_len = Fraction(spec.cartan.inner(coroot, coroot), 2)
    for pi, p in enumerate(points):
        if pairing(p.delta[i - 1], root) != 1 or pairing(p.delta[j - 1], root) != -1:
            continue
        q = _moved_point(p, i, j, coroot)
        sign = sigma_sign(spec, p, q, root, ch, polarization_signs, samples=1)
        rows[index[q]][pi] = Polynomial.constant(nv, sign * half_len)
    return OperatorMatrix(spec, ch, points, rows)


def omega_operators(
    spec: SliceSpec,
    i: int,
    j: int,
    ch: Chamber,
    polarization_signs=None,
) -> OperatorMatrix:
    """Chamber operator between slots: half the pairing part plus all positive-root parts."""
    if not 1 <= i < j <= spec.length:
        raise ValueError("slots must satisfy 1 <= i < j <= l")
    points = enumerate_fixed_points(spec)
    nv = spec.cartan.rank + 1
    rows = _zero_rows(nv, len(points))
    index = {p: m for m, p in enumerate(points)}
    half = Fraction(1, 2)
    for pi, p in enumerate(points):
        val = spec.cartan.inner(p.delta[i - 1], p.delta[j - 1])
        rows[pi][pi] = Polynomial.constant(nv, half * Fraction(val))
    for p, q, si, sj, root, coroot, sign in _pair_table(spec, ch, polarization_signs):
        if (si, sj) != (i, j):
            continue
        half_len = Fraction(spec.cartan.inner(coroot, coroot), 2)
        prev = rows[index[q]][index[p]]
        rows[index[q]][index[p]] = prev + Polynomial.constant(nv, sign * half_len)
    return OperatorMatrix(spec, ch, points, rows)


_PAIR_CACHE: Dict[tuple, list] = {}


def _signs_key(points: Sequence[FixedPoint], polarization_signs) -> tuple:
    signs = normalize_polarization(points, polarization_signs)
    return tuple(signs[p] for p in points)


def _pair_table(spec: SliceSpec, ch: Chamber, polarization_signs=None) -> list:
    """All lowering moves: tuples (p, q, i, j, root, coroot, sigma) with slots 1-based."""
    points = enumerate_fixed_points(spec)
    key = (spec, ch, _signs_key(points, polarization_signs))
    cached = _PAIR_CACHE.get(key)
    if cached is not None:
        return cached
    table = []
    roots = [(f, spec.cartan.coroot_of_root[f]) for f in spec.cartan.positive_roots(ch)]
    for p in points:
        for root, coroot in roots:
            ups = [m + 1 for m in range(spec.length) if pairing(p.delta[m], root) == 1]
            downs = [m + 1 for m in range(spec.length) if pairing(p.delta[m], root) == -1]
            for i in ups:
                for j in downs:
                    if i >= j:
                        continue
                    q = _moved_point(p, i, j, coroot)
                    sign = sigma_sign(spec, p, q, root, ch, polarization_signs, samples=1)
                    table.append((p, q, i, j, root, coroot, sign))
    _PAIR_CACHE[key] = table
    return table


def _mult_l(spec: SliceSpec, k: int, ch: Chamber, polarization_signs=None) -> OperatorMatrix:
    """Matrix of multiplication by c_1(L_k): sum of the slot operators up to k
    minus h times the chamber operators across the cut at k."""
    points = enumerate_fixed_points(spec)
    nv = spec.cartan.rank + 1
    rows = _zero_rows(nv, len(points))
    index = {p: m for m, p in enumerate(points)}
    for pi, p in enumerate(points):
        a_part = spec.cartan.sharp(spec.cartan.zero_coweight())
        h_coeff = Fraction(0)
        for i in range(1, k + 1):
            d = p.delta[i - 1]
            a_part = a_part + spec.cartan.sharp(d)
            h_coeff += Fraction(spec.cartan.inner(d, spec.mu), 2)
        for i in range(1, k + 1):
            for j in range(k + 1, spec.length + 1):
                h_coeff -= Fraction(spec.cartan.inner(p.delta[i - 1], p.delta[j - 1]), 2)
        rows[pi][pi] = EquivariantLinearForm(a_part, h_coeff).to_polynomial()
    for p, q, i, j, root, coroot, sign in _pair_table(spec, ch, polarization_signs):
        if not i <= k < j:
            continue
        half_len = Fraction(spec.cartan.inner(coroot, coroot), 2)
        prev = rows[index[q]][index[p]]
        correction = Polynomial.linear_form([0] * (nv - 1), -sign * half_len)
        rows[index[q]][index[p]] = prev + correction
    return OperatorMatrix(spec, ch, points, rows, label=f"L{k}")


def mult_matrix(
    spec: SliceSpec,
    bundle: BundleTag,
    ch: Chamber,
    polarization_signs=None,
) -> OperatorMatrix:
    """Matrix of multiplication by c_1 of the bundle in the stable basis for ch."""
    kind, idx = parse_bundle(spec, bundle)
    if kind == "L":
        mat = _mult_l(spec, idx, ch, polarization_signs)
    else:
        mat = _mult_l(spec, idx, ch, polarization_signs) - _mult_l(
            spec, idx - 1, ch, polarization_signs
        )
        mat.label = f"E{idx}"
        mat.chamber = ch
    mat.validate()
    return mat


def _as_vector(
    points: Sequence[FixedPoint], v: Union[Mapping, Sequence]
) -> Dict[FixedPoint, Polynomial]:
    if isinstance(v, Mapping):
        return {p: v[p] for p in points if p in v and not v[p].is_zero()}
    if len(v) != len(points):
        raise ValueError("vector length does not match the fixed-point count")
    return {p: e for p, e in zip(points, v) if not e.is_zero()}


def localization_pair(spec: SliceSpec, v1, v2) -> RationalFunction:
    """Sum over fixed points of v1(x) v2(x) / e_T(T_x), as a rational function."""
    points = enumerate_fixed_points(spec)
    nv = spec.cartan.rank + 1
    a = _as_vector(points, v1)
    b = _as_vector(points, v2)
    total = RationalFunction.from_polynomial(Polynomial.zero(nv))
    for x in points:
        if x not in a or x not in b:
            continue
        factors = []
        for (root, n), mult in tangent_weights(spec, x).items():
            factors.extend([Polynomial.linear_form(root.coords, n)] * mult)
        total = total + RationalFunction(a[x] * b[x], factors)
    return total


def _euler_factor_counter(spec: SliceSpec, x: FixedPoint) -> Tuple[Counter, Fraction]:
    """Canonical linear factors of e_T(T_x) with the extracted scalar."""
    counts: Counter = Counter()
    scalar = Fraction(1)
    for (root, n), mult in tangent_weights(spec, x).items():
        canon, s = _canonical_linear(Polynomial.linear_form(root.coords, n))
        counts[canon] += mult
        scalar *= Fraction(s) ** mult
    return counts, scalar


def mult_matrix_via_localization(
    spec: SliceSpec,
    bundle: BundleTag,
    ch: Chamber,
    polarization_signs=None,
) -> OperatorMatrix:
    """Multiplication matrix recomputed by localization against exact restrictions.

    Expands c_1 of the bundle times the stable class of p in the dual stable
    basis for the opposite chamber; each coefficient is a localization sum
    that must collapse to a degree-one polynomial.  Only available where the
    exact restriction matrices are (rank one).
    """
    kind, idx = parse_bundle(spec, bundle)
    plus = stab_matrix(spec, ch, polarization_signs)
    minus = stab_matrix(spec, -ch, polarization_signs)
    points = plus.points
    nv = spec.cartan.rank + 1

    lcm_counts: Counter = Counter()
    per_point = {}
    for x in points:
        counts, scalar = _euler_factor_counter(spec, x)
        per_point[x] = (counts, scalar)
        for f, c in counts.items():
            lcm_counts[f] = max(lcm_counts[f], c)
    lcm_poly = Polynomial.one(nv)
    for f, c in lcm_counts.items():
        for _ in range(c):
            lcm_poly = lcm_poly * f
    cofactor = {}
    for x in points:
        counts, scalar = per_point[x]
        cof = Polynomial.constant(nv, Fraction(1) / scalar)
        for f, c in lcm_counts.items():
            for _ in range(c - counts[f]):
                cof = cof * f
        cofactor[x] = cof

    weight_poly = {x: bundle_weight(spec, x, (kind, idx)).to_polynomial() for x in points}
    rows = _zero_rows(nv, len(points))
    for pi, p in enumerate(points):
        for qi, q in enumerate(points):
            total = Polynomial.zero(nv)
            for x in points:
                up = plus.entry(p, x)
                if up.is_zero():
                    continue
                down = minus.entry(q, x)
                if down.is_zero():
                    continue
                total = total + down * weight_poly[x] * up * cofactor[x]
            if total.is_zero():
                continue
            try:
                entry = exact_div(total, lcm_poly)
            except NonDivisible as exc:
                raise NonPolynomialEntry(
                    f"localization entry ({q}, {p}) is not polynomial"
                ) from exc
            if entry.total_degree() > 1:
                raise NonPolynomialEntry(
                    f"localization entry ({q}, {p}) has degree above one"
                )
            rows[qi][pi] = entry
    label = f"{kind}{idx}"
    return OperatorMatrix(spec, ch, points, rows, label=label)


def reconstruct_coefficient(
    spec: SliceSpec,
    ch: Chamber,
    p: FixedPoint,
    q: FixedPoint,
    bundle: BundleTag,
    polarization_signs=None,
) -> Fraction:
    """Off-diagonal multiplication coefficient recovered from restriction data.

    Divides the h-linear restriction of the stable class of p at q, scaled by
    the difference of the bundle weights at q and p, by the polarization at q;
    exactness of the division pins the coefficient of h in the matrix entry.
    """
    entries = stab_mod_h2(spec, ch, polarization_signs)
    entry = entries.get((p, q))
    if entry is None or entry.is_zero():
        return Fraction(0)
    points = enumerate_fixed_points(spec)
    signs = normalize_polarization(points, polarization_signs)
    nv = spec.cartan.rank + 1
    diff = bundle_weight(spec, q, bundle).a_part - bundle_weight(spec, p, bundle).a_part
    diff_poly = Polynomial.linear_form(diff.coords, 0)
    _, repel = split_attract_repel(tangent_weights(spec, q), ch)
    eps_q = Polynomial.constant(nv, Fraction(signs[q])) * euler_class_a(repel)
    quotient = exact_div(entry.div_h() * diff_poly, eps_q)
    if quotient.total_degree() > 0:
        raise AssertionError("reconstructed coefficient is not a constant")
    return Fraction(quotient.constant_term())
