"""Exact stable-envelope restriction matrices for rank-1 slices.

Entries Stab[p]|_q are built by a raising recursion on reduced rows (entry
divided by the polarization), starting from the chamber-minimal fixed point;
the recursion coefficients are linear forms a + n*h read off the sigma path.
Diagonals always come from tangent Euler classes, every row reachable along
two transposition paths is cross-checked, and the localization pairing with
the opposite chamber provides an independent verification of the result.
"""

from __future__ import annotations

from collections import Counter
from fractions import Fraction
from typing import Dict, List, Mapping, Tuple

from .cartan import AWeightForm, Chamber, pairing
from .slices import (
    FixedPoint,
    SliceSpec,
    dimension,
    enumerate_fixed_points,
    euler_class,
    euler_class_a,
    split_attract_repel,
    tangent_weights,
)
from .symalg import (
    NonDivisible,
    Polynomial,
    RationalFunction,
    _canonical_linear,
    exact_div,
)


class NotA1(ValueError):
    """Operation requires a rank-1 slice."""


class PathInconsistency(RuntimeError):
    """Two transposition paths produced different rows."""


class ExactDivisionFailure(RuntimeError):
    """A reduced entry failed to clear its denominator; implementation bug."""


class InvariantViolation(RuntimeError):
    """A computed matrix breaks a restriction-matrix invariant."""


_NVARS = 2  # variables a, h
_A = Polynomial.gen(_NVARS, 0)
_H = Polynomial.gen(_NVARS, 1)
# the fixed positive root, i.e. the torus character written as the variable a;
# chambers only choose the recursion direction and the polarization side
_ALPHA = AWeightForm((1,))


def _require_a1(spec: SliceSpec) -> None:
    if spec.cartan.type_letter != "A" or spec.cartan.rank != 1:
        raise NotA1(
            f"requires a rank-1 slice, got type "
            f"{spec.cartan.type_letter}{spec.cartan.rank}"
        )


def _chamber_root(ch: Chamber) -> AWeightForm:
    """The positive root of a rank-1 chamber."""
    if ch.datum.rank != 1:
        raise NotA1("chamber does not belong to a rank-1 datum")
    return next(f for f in ch.datum.root_list if ch.is_positive(f))


def minimal_point(spec: SliceSpec, ch: Chamber) -> FixedPoint:
    """The chamber-minimal fixed point: all -omega_ch increments first."""
    _require_a1(spec)
    alpha = _chamber_root(ch)
    omega = spec.cartan.fundamental_coweight(1)
    if pairing(omega, alpha) < 0:
        omega = -omega
    k = pairing(spec.mu, alpha)
    free = [i for i in range(spec.length) if spec.lambda_seq[i] != 0]
    n_plus, rem = divmod(len(free) + k, 2)
    # SliceSpec construction guarantees a nonempty fixed locus
    assert rem == 0 and 0 <= n_plus <= len(free)
    delta = [spec.cartan.zero_coweight()] * spec.length
    for pos, slot in enumerate(free):
        delta[slot] = omega if pos >= len(free) - n_plus else -omega
    return FixedPoint(delta)


def weight_stat(p: FixedPoint, ch: Chamber) -> Fraction:
    """Half-sum of the sigma heights against the chamber-positive root."""
    alpha = _chamber_root(ch)
    return Fraction(sum(pairing(s, alpha) for s in p.sigma()), 2)


def _move_pairs(spec: SliceSpec) -> List[Tuple[int, int]]:
    """1-based slot pairs that adjacent-transpose the nonfrozen subword."""
    free = [i + 1 for i in range(spec.length) if spec.lambda_seq[i] != 0]
    return list(zip(free, free[1:]))


def _swap(p: FixedPoint, i: int, j: int) -> FixedPoint:
    d = list(p.delta)
    d[i - 1], d[j - 1] = d[j - 1], d[i - 1]
    return FixedPoint(d)


def recursion_step(
    row: Mapping[FixedPoint, RationalFunction], i: int
) -> Dict[FixedPoint, RationalFunction]:
    """Reduced row of p -> reduced row of r_i(p), swapping increments i, i+1.

    The relation is involutive, so one formula serves both raising and
    lowering; the caller must have r_i(p) != p.
    """
    return _recursion_step_pair(row, i, i + 1)


def _recursion_step_pair(row, i, j):
    # slots strictly between i and j must be frozen, so that the swap is an
    # adjacent transposition of the nonfrozen subword
    out: Dict[FixedPoint, RationalFunction] = {}
    for q, val in row.items():
        rq = _swap(q, i, j)
        if rq == q:
            out[q] = val
            continue
        if rq not in row:
            raise ValueError(f"transposition ({i},{j}) leaves the fixed locus")
        sigma = q.sigma()
        d_i = pairing(q.delta[i - 1], _ALPHA)
        s_prev = pairing(sigma[i - 1], _ALPHA)
        s_cur = pairing(sigma[i], _ALPHA)
        inv = RationalFunction.reciprocal(_NVARS, [_A + s_prev * _H])
        out[q] = ((-d_i) * _H * inv) * val + ((_A + s_cur * _H) * inv) * row[rq]
    return out


def _repelling_data(spec, p, ch) -> Tuple[Polynomial, Polynomial]:
    """(e_T, e_A) of the chamber-repelling tangent half at p."""
    _, repel = split_attract_repel(tangent_weights(spec, p), ch)
    return euler_class(repel), euler_class_a(repel)


def _scalar_axis_power(poly: Polynomial) -> Tuple[Fraction, int]:
    """Write a one-term polynomial as c * a^m."""
    ((exp, coeff),) = poly.terms.items()
    assert exp[-1] == 0
    return Fraction(coeff), exp[0]


def normalize_polarization(points, polarization_signs) -> Dict[FixedPoint, int]:
    """Resolve None (all +1), a mapping, or a sequence aligned with points."""
    if polarization_signs is None:
        signs = {p: 1 for p in points}
    elif isinstance(polarization_signs, Mapping):
        signs = {p: int(polarization_signs[p]) for p in points}
    else:
        seq = list(polarization_signs)
        if len(seq) != len(points):
            raise ValueError("one polarization sign per fixed point required")
        signs = {p: int(s) for p, s in zip(points, seq)}
    if any(s not in (-1, 1) for s in signs.values()):
        raise ValueError("polarization signs must be +1 or -1")
    return signs


class RestrictionMatrix:
    """Sparse matrix of restrictions Stab[p]|_q over the fixed points.

    entries[(p, q)] = Stab_{ch,eps}[p]|_q with eps|_p = sign(p) * e_A of the
    repelling half; zero entries are not stored.
    """

    __slots__ = ("spec", "chamber", "polarization_signs", "points", "entries",
                 "epsilons", "_stats")

    def __init__(self, spec, chamber, polarization_signs, points, entries,
                 epsilons):
        self.spec = spec
        self.chamber = chamber
        self.polarization_signs = dict(polarization_signs)
        self.points = list(points)
        self.entries = {k: v for k, v in entries.items() if not v.is_zero()}
        self.epsilons = dict(epsilons)
        self._stats = {p: weight_stat(p, chamber) for p in self.points}

    def entry(self, p: FixedPoint, q: FixedPoint) -> Polynomial:
        return self.entries.get((p, q), Polynomial.zero(_NVARS))

    def row(self, p: FixedPoint) -> Dict[FixedPoint, Polynomial]:
        return {q: self.entry(p, q) for q in self.points}

    def validate(self) -> None:
        """Triangularity, Euler diagonals, h-divisibility, degree bounds."""
        half_dim = dimension(self.spec) // 2
        for p in self.points:
            e_t, _ = _repelling_data(self.spec, p, self.chamber)
            if self.entry(p, p) != self.polarization_signs[p] * e_t:
                raise InvariantViolation(
                    f"diagonal at {p.label()} is not the repelling Euler class"
                )
        downsets: Dict[FixedPoint, set] = {}
        for (p, q), val in self.entries.items():
            if p == q:
                continue
            if not self._stats[q] < self._stats[p] or q not in self._downset(p, downsets):
                raise InvariantViolation(
                    f"triangularity violated at ({p.label()}, {q.label()})"
                )
            if not val.drop_h().is_zero():
                raise InvariantViolation(
                    f"({p.label()}, {q.label()}) is not divisible by h"
                )
            if not val.deg_a() < half_dim:
                raise InvariantViolation(
                    f"a-degree bound violated at ({p.label()}, {q.label()})"
                )

    def _downset(self, p: FixedPoint, cache: Dict[FixedPoint, set]) -> set:
        if p not in cache:
            moves = _move_pairs(self.spec)
            seen = {p}
            stack = [p]
            while stack:
                x = stack.pop()
                for i, j in moves:
                    y = _swap(x, i, j)
                    if y != x and y not in seen and self._stats[y] < self._stats[x]:
                        seen.add(y)
                        stack.append(y)
            cache[p] = seen
        return cache[p]

    def to_json(self) -> dict:
        index = {p: i for i, p in enumerate(self.points)}
        keys = sorted(
            self.entries, key=lambda pq: (index[pq[0]], index[pq[1]])
        )
        return {
            "points": [p.to_json() for p in self.points],
            "chamber": list(self.chamber.sign_vector),
            "entries": {
                f"{index[p]},{index[q]}": self.entries[(p, q)].to_json()
                for p, q in keys
            },
        }


def stab_matrix(spec: SliceSpec, ch: Chamber,
                polarization_signs=None) -> RestrictionMatrix:
    """All restrictions Stab[p]|_q by the raising recursion from the minimum."""
    _require_a1(spec)
    if ch.datum != spec.cartan:
        raise ValueError("chamber does not belong to the slice's Cartan datum")
    points = enumerate_fixed_points(spec)
    signs = normalize_polarization(points, polarization_signs)
    stats = {p: weight_stat(p, ch) for p in points}
    moves = _move_pairs(spec)

    p0 = minimal_point(spec, ch)
    e_t0, e_a0 = _repelling_data(spec, p0, ch)
    c0, m0 = _scalar_axis_power(e_a0)
    zero = RationalFunction.from_polynomial(Polynomial.zero(_NVARS))
    base = {q: zero for q in points}
    base[p0] = RationalFunction(e_t0 * (Fraction(1) / c0), (_A,) * m0)
    reduced = {p0: base}

    for p in sorted((q for q in points if q != p0),
                    key=lambda q: (stats[q], q.key())):
        candidates = []
        for i, j in moves:
            prev = _swap(p, i, j)
            if prev != p and stats[prev] < stats[p]:
                candidates.append(_recursion_step_pair(reduced[prev], i, j))
        if not candidates:
            raise PathInconsistency(
                f"{p.label()} is unreachable by raising transpositions"
            )
        first = candidates[0]
        for other in candidates[1:]:
            if any(first[q] != other[q] for q in points):
                raise PathInconsistency(
                    f"transposition paths to {p.label()} disagree"
                )
        reduced[p] = first

    entries: Dict[Tuple[FixedPoint, FixedPoint], Polynomial] = {}
    epsilons: Dict[FixedPoint, Polynomial] = {}
    for p in points:
        _, e_a = _repelling_data(spec, p, ch)
        epsilons[p] = signs[p] * e_a
        for q in points:
            val = reduced[p][q]
            if val.is_zero():
                continue
            try:
                entries[(p, q)] = (val * epsilons[p]).to_polynomial()
            except NonDivisible as exc:
                raise ExactDivisionFailure(
                    f"entry ({p.label()}, {q.label()}) is not polynomial"
                ) from exc
    matrix = RestrictionMatrix(spec, ch, signs, points, entries, epsilons)
    matrix.validate()
    return matrix


def stab_offdiag_mod_h2(
    spec: SliceSpec, ch: Chamber, polarization_signs=None
) -> Dict[Tuple[FixedPoint, FixedPoint], Polynomial]:
    """Closed-form off-diagonal restrictions mod h^2.

    The entry h * eps|_p / a_ch appears exactly when q is p with one +omega_ch
    increment (slot i) traded against a later -omega_ch increment (slot j);
    every other off-diagonal restriction vanishes mod h^2.
    """
    _require_a1(spec)
    points = enumerate_fixed_points(spec)
    signs = normalize_polarization(points, polarization_signs)
    alpha = _chamber_root(ch)
    alpha_poly = Polynomial.linear_form(alpha.coords, 0)
    out: Dict[Tuple[FixedPoint, FixedPoint], Polynomial] = {}
    for p in points:
        heights = [pairing(d, alpha) for d in p.delta]
        if 1 not in heights or -1 not in heights:
            continue
        _, e_a = _repelling_data(spec, p, ch)
        entry = exact_div(signs[p] * e_a * _H, alpha_poly)
        for i, hi in enumerate(heights):
            if hi != 1:
                continue
            for j in range(i + 1, len(heights)):
                if heights[j] == -1:
                    out[(p, _swap(p, i + 1, j + 1))] = entry
    return out


def _epsilon_ratio(e1: Polynomial, e2: Polynomial) -> Fraction:
    c1, m1 = _scalar_axis_power(e1)
    c2, m2 = _scalar_axis_power(e2)
    assert m1 == m2
    ratio = c1 / c2
    assert ratio in (1, -1)
    return ratio


def theta_action(
    spec: SliceSpec, i: int, matrix: RestrictionMatrix
) -> Dict[Tuple[FixedPoint, FixedPoint], Polynomial]:
    """Action of the i-th transposition correspondence on the rows of matrix.

    Computed two independent ways: on rows, -Stab[p] + (eps_p/eps_{r_i p})
    Stab[r_i p]; on columns, the prefactor (a + <alpha, sigma_q^i> h) /
    (a + <alpha, sigma_q^{i-1}> h) applied to -entry(p, q) + entry(p, r_i q).
    A mismatch raises AssertionError.
    """
    _require_a1(spec)
    if not 1 <= i < spec.length:
        raise IndexError(f"correspondence index {i} out of range")
    if spec.lambda_seq[i - 1] != spec.lambda_seq[i]:
        raise ValueError("transposition crosses a frozen slot")
    points = matrix.points
    left: Dict[Tuple[FixedPoint, FixedPoint], Polynomial] = {}
    for p in points:
        rp = _swap(p, i, i + 1)
        if rp == p:
            continue  # -Stab[p] + Stab[p] = 0
        ratio = _epsilon_ratio(matrix.epsilons[p], matrix.epsilons[rp])
        for q in points:
            val = -matrix.entry(p, q) + ratio * matrix.entry(rp, q)
            if not val.is_zero():
                left[(p, q)] = val
    for p in points:
        for q in points:
            sigma = q.sigma()
            s_prev = pairing(sigma[i - 1], _ALPHA)
            s_cur = pairing(sigma[i], _ALPHA)
            rq = _swap(q, i, i + 1)
            right = RationalFunction(
                (_A + s_cur * _H) * (-matrix.entry(p, q) + matrix.entry(p, rq)),
                [_A + s_prev * _H],
            )
            expected = left.get((p, q), Polynomial.zero(_NVARS))
            if right != RationalFunction.from_polynomial(expected):
                raise AssertionError(
                    f"theta action mismatch at ({p.label()}, {q.label()})"
                )
    return left


def verify_duality(spec: SliceSpec, ch: Chamber,
                   polarization_signs=None) -> dict:
    """Localization pairing of opposite-chamber envelopes against this one.

    Expect the identity matrix.  The dual polarization (-1)^(dim/2) eps comes
    for free by passing the same sign map with the opposite chamber: the two
    repelling halves differ by one sign per weight line, dim/2 in total.
    Denominators are cleared by the least common multiple of the tangent
    Euler classes, so the check is exact polynomial arithmetic.
    """
    plus = stab_matrix(spec, ch, polarization_signs)
    minus = stab_matrix(spec, -ch, polarization_signs)
    points = plus.points

    factor_counts: Dict[FixedPoint, Counter] = {}
    scalars: Dict[FixedPoint, Fraction] = {}
    for x in points:
        counts: Counter = Counter()
        scalar = Fraction(1)
        for (root, n), mult in tangent_weights(spec, x).items():
            canon, s = _canonical_linear(Polynomial.linear_form(root.coords, n))
            counts[canon] += mult
            scalar *= s**mult
        factor_counts[x] = counts
        scalars[x] = scalar
    lcm: Counter = Counter()
    for counts in factor_counts.values():
        lcm |= counts
    lcm_poly = Polynomial.one(_NVARS)
    for f, k in lcm.items():
        lcm_poly = lcm_poly * f**k
    cofactor = {}
    for x in points:
        poly = Polynomial.constant(_NVARS, Fraction(1) / scalars[x])
        for f, k in (lcm - factor_counts[x]).items():
            poly = poly * f**k
        cofactor[x] = poly

    failures = []
    for q in points:
        for p in points:
            total = Polynomial.zero(_NVARS)
            for x in points:
                mv = minus.entry(q, x)
                pv = plus.entry(p, x)
                if mv.is_zero() or pv.is_zero():
                    continue
                total = total + mv * pv * cofactor[x]
            expected = lcm_poly if p == q else Polynomial.zero(_NVARS)
            if total != expected:
                failures.append({"p": p.label(), "q": q.label()})
    return {"ok": not failures, "pairs": len(points) ** 2, "failures": failures}
