"""Fixed points, tangent weights, Euler classes, and wall components of
resolved slices.

A slice is specified by a Cartan datum, a sequence of minuscule fundamental
coweight indices lambda_1..lambda_l, and a target coweight mu.  A torus-fixed
point is the increment sequence delta (each delta_i in the Weyl orbit of
lambda_i, summing to mu); sigma denotes the partial-sum path.

Index 0 is allowed in lambda_seq and denotes a frozen zero slot (orbit {0});
these arise when a slice is projected onto a wall and keep slot positions
aligned with the ambient slice.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Tuple

from .cartan import AWeightForm, CartanDatum, Chamber, Coweight, pairing
from .symalg import Polynomial


class NonMinusculeUnsupported(ValueError):
    """lambda_seq contains a fundamental coweight outside the minuscule set."""


class InvalidSlice(ValueError):
    """Slice parameters violate mu <= lambda or admit no fixed point."""


class SliceSpec:
    """Resolved slice data: cartan datum, minuscule lambda indices, target mu."""

    __slots__ = ("cartan", "lambda_seq", "mu", "_orbits", "_suffix_sums")

    def __init__(self, cartan: CartanDatum, lambda_seq: Iterable[int], mu: Coweight):
        lambda_seq = tuple(int(i) for i in lambda_seq)
        if not lambda_seq:
            raise InvalidSlice("lambda sequence must be nonempty")
        for i in lambda_seq:
            if i == 0:
                continue
            if i < 1 or i > cartan.rank:
                raise InvalidSlice(f"fundamental coweight index {i} out of range")
            if i not in cartan.minuscule_indices:
                raise NonMinusculeUnsupported(
                    f"omega_{i} is not minuscule in type {cartan.type_letter}{cartan.rank}"
                )
        if len(mu) != cartan.rank or not mu.is_integral():
            raise InvalidSlice("mu must be an integral coweight of matching rank")
        self.cartan = cartan
        self.lambda_seq = lambda_seq
        self.mu = mu

        # mu <= lambda: lambda - mu must be a nonnegative integer combination
        # of simple coroots, i.e. A^-1 (lambda - mu) has nonnegative integer
        # entries.  Solved by pairing against fundamental weight forms of the
        # dual basis: c = A^-1 diff where diff is in the omega-basis.
        diff = self.lambda_total() - mu
        coeffs = _solve_coroot_coordinates(cartan, diff)
        if coeffs is None or any(c < 0 for c in coeffs):
            raise InvalidSlice("mu is not below lambda in the coroot order")

        self._orbits = tuple(
            tuple(sorted(cartan.weyl_orbit(self._slot_coweight(i))))
            for i in range(len(lambda_seq))
        )
        # suffix_sums[i] = set of possible values of delta_i + .. + delta_l
        sums = [{cartan.zero_coweight()}]
        for orbit in reversed(self._orbits):
            prev = sums[-1]
            sums.append({d + s for d in orbit for s in prev})
        self._suffix_sums = tuple(reversed(sums))
        if mu not in self._suffix_sums[0]:
            raise InvalidSlice("no fixed point: mu is not a weight of the lambda sequence")

    def _slot_coweight(self, slot0: int) -> Coweight:
        idx = self.lambda_seq[slot0]
        return self.cartan.zero_coweight() if idx == 0 else self.cartan.fundamental_coweight(idx)

    @property
    def length(self) -> int:
        return len(self.lambda_seq)

    def lambda_total(self) -> Coweight:
        total = self.cartan.zero_coweight()
        for i in range(len(self.lambda_seq)):
            total = total + self._slot_coweight(i)
        return total

    def __eq__(self, other):
        return (
            isinstance(other, SliceSpec)
            and other.cartan == self.cartan
            and other.lambda_seq == self.lambda_seq
            and other.mu == self.mu
        )

    def __hash__(self):
        return hash((self.cartan, self.lambda_seq, self.mu))

    def __repr__(self):
        return (
            f"SliceSpec({self.cartan.type_letter}{self.cartan.rank}, "
            f"lambda={list(self.lambda_seq)}, mu={list(self.mu.coords)})"
        )


def _solve_coroot_coordinates(cartan: CartanDatum, cw: Coweight):
    """Coordinates of cw in the simple-coroot basis, or None if non-integral."""
    n = cartan.rank
    # Gaussian solve A c = cw over Fraction (columns of A are the coroots)
    from fractions import Fraction

    aug = [[Fraction(cartan.cartan_matrix[i][j]) for j in range(n)] + [Fraction(cw.coords[i])]
           for i in range(n)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if piv is None:
            return None
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [x * inv for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    coeffs = [row[n] for row in aug]
    if any(c.denominator != 1 for c in coeffs):
        return None
    return [int(c) for c in coeffs]


class FixedPoint:
    """Torus-fixed point of a resolved slice: the increment sequence delta."""

    __slots__ = ("delta",)

    def __init__(self, delta: Iterable[Coweight]):
        self.delta = tuple(delta)

    def sigma(self) -> Tuple[Coweight, ...]:
        """Partial sums sigma_0 = 0, sigma_i = delta_1 + .. + delta_i."""
        out = [Coweight([0] * len(self.delta[0]))]
        for d in self.delta:
            out.append(out[-1] + d)
        return tuple(out)

    def key(self):
        return tuple(d.coords for d in self.delta)

    def __eq__(self, other):
        return isinstance(other, FixedPoint) and other.delta == self.delta

    def __hash__(self):
        return hash(self.delta)

    def __lt__(self, other):
        return self.key() < other.key()

    def to_json(self) -> list:
        return [list(d.coords) for d in self.delta]

    @classmethod
    def from_json(cls, obj: list) -> "FixedPoint":
        return cls(Coweight(v) for v in obj)

    def label(self) -> str:
        """Human-readable delta string, e.g. '(-w,w,w)' in rank 1."""
        def one(d: Coweight) -> str:
            if len(d) == 1:
                v = d.coords[0]
                if v == 1:
                    return "w"
                if v == -1:
                    return "-w"
                if v == 0:
                    return "0"
                return f"{v}w"
            return "[" + ",".join(str(c) for c in d.coords) + "]"

        return "(" + ",".join(one(d) for d in self.delta) + ")"

    def __repr__(self):
        return f"FixedPoint{self.label()}"


def validate_point(spec: SliceSpec, p: FixedPoint) -> None:
    if len(p.delta) != spec.length:
        raise ValueError("fixed point length does not match the slice")
    for i, d in enumerate(p.delta):
        if d not in spec._orbits[i]:
            raise ValueError(f"delta_{i + 1} = {d} is not a weight of slot {i + 1}")
    if p.sigma()[-1] != spec.mu:
        raise ValueError("increments do not sum to mu")


def enumerate_fixed_points(spec: SliceSpec) -> List[FixedPoint]:
    """All increment sequences, in lexicographic order of coordinate vectors."""
    result: List[FixedPoint] = []
    prefix: List[Coweight] = []

    def descend(slot: int, partial: Coweight):
        if slot == spec.length:
            result.append(FixedPoint(list(prefix)))
            return
        remaining_target = spec.mu - partial
        for d in spec._orbits[slot]:
            if (remaining_target - d) in spec._suffix_sums[slot + 1]:
                prefix.append(d)
                descend(slot + 1, partial + d)
                prefix.pop()

    descend(0, spec.cartan.zero_coweight())
    result.sort()
    return result


def dominant_representative(cartan: CartanDatum, c: Coweight) -> Coweight:
    """The dominant coweight in the Weyl orbit of c."""
    v = c
    while True:
        j = next((i for i, x in enumerate(v.coords) if x < 0), None)
        if j is None:
            return v
        v = cartan.reflect_coweight(j + 1, v)


def dimension(spec: SliceSpec) -> int:
    """<lambda - mu, sum of positive roots>, with mu taken to its dominant
    Weyl representative; even and nonnegative.

    The dominant representative matters: the path model accepts any target
    mu below lambda, and the tangent multiplicity total at every fixed point
    is invariant under replacing mu by a Weyl conjugate.
    """
    mu_plus = dominant_representative(spec.cartan, spec.mu)
    d = pairing(spec.lambda_total() - mu_plus, spec.cartan.two_rho_check)
    assert d >= 0 and d % 2 == 0
    return int(d)


class WeightMultiset:
    """Multiset of torus weights root + n*h with positive multiplicities."""

    __slots__ = ("rank", "entries")

    def __init__(self, rank: int, entries: Dict[Tuple[AWeightForm, int], int]):
        self.rank = rank
        self.entries = {k: int(m) for k, m in entries.items() if m}
        for (root, n), m in self.entries.items():
            if m < 0:
                raise ValueError("negative multiplicity")
            if root.is_zero():
                raise ValueError("zero A-part is not allowed in a tangent multiset")

    def total(self) -> int:
        return sum(self.entries.values())

    def items(self):
        return sorted(self.entries.items(), key=lambda kv: (kv[0][0].coords, kv[0][1]))

    def multiplicity(self, root: AWeightForm, n: int) -> int:
        return self.entries.get((root, n), 0)

    def filter(self, keep) -> "WeightMultiset":
        return WeightMultiset(
            self.rank, {k: m for k, m in self.entries.items() if keep(k[0], k[1])}
        )

    def __eq__(self, other):
        return (
            isinstance(other, WeightMultiset)
            and other.rank == self.rank
            and other.entries == self.entries
        )

    def to_json(self) -> list:
        return [
            {"root": list(root.coords), "n": n, "mult": m}
            for (root, n), m in self.items()
        ]

    @classmethod
    def from_json(cls, obj: list, rank: int) -> "WeightMultiset":
        return cls(
            rank,
            {(AWeightForm(e["root"]), int(e["n"])): int(e["mult"]) for e in obj},
        )

    def __repr__(self):
        inner = ", ".join(
            f"{root.coords}+{n}h x{m}" for (root, n), m in self.items()
        )
        return f"WeightMultiset({inner})"


def tangent_weights(spec: SliceSpec, p: FixedPoint) -> WeightMultiset:
    """Tangent weight multiset at p by the half-integer crossing rule.

    For each root beta and each segment of the height path h_i = <sigma_i,
    beta>, a level c = n + 1/2 strictly between the segment endpoints counts
    toward beta + n*h iff the segment moves toward the origin half-space:
    c > 0 with h decreasing, or c < 0 with h increasing.
    """
    sigma = p.sigma()
    entries: Dict[Tuple[AWeightForm, int], int] = {}
    for root in spec.cartan.root_list:
        heights = [pairing(s, root) for s in sigma]
        for a, b in zip(heights, heights[1:]):
            if a == b:
                continue
            lo, hi = (a, b) if a < b else (b, a)
            decreasing = b < a
            # half-integer levels strictly between lo and hi: n + 1/2 with
            # lo < n + 1/2 < hi
            for n in range(lo, hi):
                c2 = 2 * n + 1  # 2c, to stay integral
                if c2 > 0 and decreasing or c2 < 0 and not decreasing:
                    key = (root, n)
                    entries[key] = entries.get(key, 0) + 1
    return WeightMultiset(spec.cartan.rank, entries)


def euler_class(ws: WeightMultiset) -> Polynomial:
    """Product over the multiset of the linear forms root + n*h."""
    out = Polynomial.one(ws.rank + 1)
    for (root, n), m in ws.items():
        out = out * Polynomial.linear_form(root.coords, n) ** m
    return out


def euler_class_a(ws: WeightMultiset) -> Polynomial:
    """Product of the A-parts only (h set to 0)."""
    out = Polynomial.one(ws.rank + 1)
    for (root, n), m in ws.items():
        out = out * Polynomial.linear_form(root.coords, 0) ** m
    return out


def split_attract_repel(ws: WeightMultiset, ch: Chamber) -> Tuple[WeightMultiset, WeightMultiset]:
    """Partition by the sign of the root against the chamber witness."""
    attract = ws.filter(lambda root, n: ch.is_positive(root))
    repel = ws.filter(lambda root, n: not ch.is_positive(root))
    assert attract.total() + repel.total() == ws.total()
    return attract, repel


def flip_sign(spec: SliceSpec, p: FixedPoint, ch1: Chamber, ch2: Chamber) -> int:
    """Parity of tangent weights that are ch1-repelling but ch2-attracting.

    This equals the sign of e_A(repelling part, ch2) / e_A(repelling part,
    ch1): each line of weights that changes side contributes one sign flip
    per weight on it.
    """
    ws = tangent_weights(spec, p)
    count = sum(
        m
        for (root, n), m in ws.entries.items()
        if (not ch1.is_positive(root)) and ch2.is_positive(root)
    )
    return -1 if count % 2 else 1


def same_wall_component(spec: SliceSpec, p: FixedPoint, q: FixedPoint) -> Optional[AWeightForm]:
    """The root (up to sign) whose wall keeps p and q connected, if any.

    p and q lie in one component of the fixed locus of the wall subtorus
    ker(root) exactly when every sigma difference is an integer multiple of
    the coroot; the root class is then unique.  Returns the positive root.
    """
    if p == q:
        raise ValueError("same_wall_component expects distinct points")
    sp, sq = p.sigma(), q.sigma()
    diffs = [a - b for a, b in zip(sp, sq)]
    for root in spec.cartan.root_list:
        if sum(root.coords) < 0:
            continue
        coroot = spec.cartan.coroot_of_root[root]
        if _all_integer_multiples(diffs, coroot):
            return root
    return None


def _all_integer_multiples(diffs: List[Coweight], coroot: Coweight) -> bool:
    lead = next(i for i, c in enumerate(coroot.coords) if c != 0)
    for d in diffs:
        if d.is_zero():
            continue
        ratio = Fraction(d.coords[lead], coroot.coords[lead])
        if ratio.denominator != 1 or d != int(ratio) * coroot:
            return False
    return True


def project_to_wall_slice(
    spec: SliceSpec, p: FixedPoint, root: AWeightForm
) -> Tuple[SliceSpec, FixedPoint]:
    """Project p onto the wall ker(root): a rank-1 slice with 0-slots retained.

    Slot i carries k_i = |<delta_i, root>| in {0, 1}; the image point is
    delta'_i = <delta_i, root> omega; the new target is <mu, root> omega.
    """
    if root not in spec.cartan.coroot_of_root:
        raise ValueError(f"{root} is not a root")
    a1 = CartanDatum("A", 1)
    lam, delta = [], []
    for d in p.delta:
        v = pairing(d, root)
        if v not in (-1, 0, 1):
            raise AssertionError("non-minuscule pairing in wall projection")
        lam.append(abs(int(v)))
        delta.append(Coweight([v]))
    mu1 = Coweight([pairing(spec.mu, root)])
    wall_spec = SliceSpec(a1, lam, mu1)
    return wall_spec, FixedPoint(delta)


def adjacent_transposition(p: FixedPoint, i: int) -> FixedPoint:
    """Swap delta_i and delta_{i+1} (1-based); identity when they are equal."""
    if not 1 <= i < len(p.delta):
        raise IndexError(f"slot index {i} out of range")
    d = list(p.delta)
    d[i - 1], d[i] = d[i], d[i - 1]
    return FixedPoint(d)
