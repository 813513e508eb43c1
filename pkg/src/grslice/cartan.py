"""Root-system engine for the simple types A-G.

Coordinate conventions used throughout the package:

  * A ``Coweight`` is a vector in the fundamental-coweight basis
    ``omega_1 .. omega_rank``.  The j-th simple coroot ``alpha_j`` is
    column j of the Cartan matrix in this basis.
  * An ``AWeightForm`` is a linear functional on coweights, written in the
    simple-root basis ``alphacheck_1 .. alphacheck_rank``.  Roots live here.
  * ``pairing(coweight, form)`` is the plain dot product of coordinates,
    so <omega_i, alphacheck_j> = delta_ij.
  * The invariant form on coweights is normalized so that the shortest
    simple coroot has squared length exactly 2.

Cartan matrices follow Bourbaki numbering with
A[i][j] = <alpha_j, alphacheck_i>.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Iterable, Tuple


def _norm_scalar(x):
    # ints stay ints, integral Fractions collapse; floats are banned to keep
    # every computation exact.
    if isinstance(x, float):
        raise TypeError(f"exact arithmetic only, got float {x!r}")
    f = Fraction(x)
    return int(f) if f.denominator == 1 else f


class _Vector:
    """Immutable exact coordinate vector; base for Coweight/AWeightForm."""

    __slots__ = ("coords",)

    def __init__(self, coords: Iterable):
        self.coords = tuple(_norm_scalar(c) for c in coords)

    def __len__(self):
        return len(self.coords)

    def __iter__(self):
        return iter(self.coords)

    def __getitem__(self, i):
        return self.coords[i]

    def _check(self, other):
        if type(other) is not type(self):
            raise TypeError(f"cannot combine {type(self).__name__} with {type(other).__name__}")
        if len(other.coords) != len(self.coords):
            raise ValueError("rank mismatch")

    def __add__(self, other):
        self._check(other)
        return type(self)(a + b for a, b in zip(self.coords, other.coords))

    def __sub__(self, other):
        self._check(other)
        return type(self)(a - b for a, b in zip(self.coords, other.coords))

    def __neg__(self):
        return type(self)(-a for a in self.coords)

    def __mul__(self, scalar):
        return type(self)(a * _norm_scalar(scalar) for a in self.coords)

    __rmul__ = __mul__

    def __eq__(self, other):
        return type(other) is type(self) and self.coords == other.coords

    def __hash__(self):
        return hash((type(self).__name__, self.coords))

    def __lt__(self, other):
        self._check(other)
        return self.coords < other.coords

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    def is_integral(self) -> bool:
        return all(isinstance(c, int) for c in self.coords)

    def __repr__(self):
        return f"{type(self).__name__}({', '.join(str(c) for c in self.coords)})"


class Coweight(_Vector):
    """Vector in the fundamental-coweight basis."""


class AWeightForm(_Vector):
    """Linear functional on coweights, in the simple-root basis."""


def pairing(c: Coweight, f: AWeightForm):
    """Exact pairing <c, f>; integer whenever both vectors are integral."""
    if len(c) != len(f):
        raise ValueError("rank mismatch")
    return sum(a * b for a, b in zip(c.coords, f.coords))


def _invert_rational(rows):
    """Gauss-Jordan inverse of a square matrix over Fraction."""
    n = len(rows)
    aug = [[Fraction(rows[i][j]) for j in range(n)] + [Fraction(int(i == j)) for j in range(n)]
           for i in range(n)]
    for col in range(n):
        piv = next(r for r in range(col, n) if aug[r][col] != 0)
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [x * inv for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                factor = aug[r][col]
                aug[r] = [x - factor * y for x, y in zip(aug[r], aug[col])]
    return tuple(tuple(row[n:]) for row in aug)


def _build_cartan_matrix(letter: str, rank: int):
    n = rank
    if letter == "A":
        ok = n >= 1
        edges = {}
    elif letter == "B":
        ok = n >= 2
        edges = {(n - 1, n): -1, (n, n - 1): -2}
    elif letter == "C":
        ok = n >= 2
        edges = {(n - 1, n): -2, (n, n - 1): -1}
    elif letter == "D":
        ok = n >= 3
        edges = {}
    elif letter == "E":
        ok = n in (6, 7, 8)
        edges = {}
    elif letter == "F":
        ok = n == 4
        edges = {(2, 3): -1, (3, 2): -2}
    elif letter == "G":
        ok = n == 2
        edges = {(1, 2): -3, (2, 1): -1}
    else:
        raise ValueError(f"unknown type letter {letter!r}")
    if not ok:
        raise ValueError(f"rank {rank} is not valid for type {letter}")

    # 1-based adjacency of the Dynkin diagram.
    if letter in ("A", "B", "C", "F", "G"):
        bonds = [(i, i + 1) for i in range(1, n)]
    elif letter == "D":
        bonds = [(i, i + 1) for i in range(1, n - 1)] + [(n - 2, n)]
    else:  # E: chain 1-3-4-5-..-n with node 2 hanging off node 4
        bonds = [(1, 3), (3, 4), (2, 4)] + [(i, i + 1) for i in range(4, n)]

    a = [[0] * n for _ in range(n)]
    for i in range(n):
        a[i][i] = 2
    for (i, j) in bonds:
        a[i - 1][j - 1] = edges.get((i, j), -1)
        a[j - 1][i - 1] = edges.get((j, i), -1)
    return tuple(tuple(row) for row in a)


_ROOT_COUNT = {
    "A": lambda n: n * (n + 1),
    "B": lambda n: 2 * n * n,
    "C": lambda n: 2 * n * n,
    "D": lambda n: 2 * n * (n - 1),
    "E": lambda n: {6: 72, 7: 126, 8: 240}[n],
    "F": lambda n: 48,
    "G": lambda n: 12,
}


def _minuscule_indices(letter: str, rank: int) -> frozenset:
    if letter == "A":
        return frozenset(range(1, rank + 1))
    if letter == "B":
        return frozenset({rank})
    if letter == "C":
        return frozenset({1})
    if letter == "D":
        return frozenset({1, rank - 1, rank})
    if letter == "E" and rank == 6:
        return frozenset({1, 6})
    if letter == "E" and rank == 7:
        return frozenset({7})
    return frozenset()


class CartanDatum:
    """Immutable root-system database for one simple type.

    Public indices (simple roots, fundamental coweights, minuscule set) are
    1-based, matching the usual numbering of Dynkin diagrams.
    """

    def __init__(self, type_letter: str, rank: int):
        self.type_letter = type_letter
        self.rank = rank
        self.cartan_matrix = _build_cartan_matrix(type_letter, rank)
        a = self.cartan_matrix
        n = rank

        for i in range(n):
            assert a[i][i] == 2
            for j in range(n):
                if i != j:
                    assert a[i][j] in (0, -1, -2, -3)

        # symmetrizers: d_i * A[i][j] = d_j * A[j][i], normalized min(2 d_i)=2
        d = [None] * n
        d[0] = Fraction(1)
        todo = [0]
        while todo:
            i = todo.pop()
            for j in range(n):
                if a[i][j] != 0 and i != j and d[j] is None:
                    d[j] = d[i] * Fraction(a[i][j], a[j][i])
                    todo.append(j)
        scale = min(d)
        self.symmetrizers = tuple(_norm_scalar(x / scale) for x in d)
        for i in range(n):
            for j in range(n):
                assert self.symmetrizers[i] * a[i][j] == self.symmetrizers[j] * a[j][i]

        # gram matrix of the invariant form: inner(c, c') = c^T (D A^-1) c'
        ainv = _invert_rational(a)
        self._gram = tuple(
            tuple(self.symmetrizers[i] * ainv[i][j] for j in range(n)) for i in range(n)
        )

        # roots and their coroots via simultaneous reflection closure
        seen: Dict[AWeightForm, Coweight] = {}
        queue = [
            (self.simple_root_form(j), self.simple_coroot(j)) for j in range(1, n + 1)
        ]
        while queue:
            form, cow = queue.pop()
            if form in seen:
                continue
            seen[form] = cow
            for k in range(1, n + 1):
                queue.append((self.reflect_form(k, form), self.reflect_coweight(k, cow)))
        self.root_list: Tuple[AWeightForm, ...] = tuple(sorted(seen, key=lambda f: f.coords))
        self.coroot_of_root: Dict[AWeightForm, Coweight] = {f: seen[f] for f in self.root_list}
        assert len(self.root_list) == _ROOT_COUNT[type_letter](rank)
        for f in self.root_list:
            assert -f in self.coroot_of_root

        self.minuscule_indices = _minuscule_indices(type_letter, rank)
        self.two_rho_check = self._sum_positive_forms()

    def _sum_positive_forms(self) -> AWeightForm:
        total = AWeightForm([0] * self.rank)
        for f in self.root_list:
            if sum(f.coords) > 0:
                total = total + f
        return total

    # -- basis elements (1-based indices) --------------------------------

    def fundamental_coweight(self, i: int) -> Coweight:
        return Coweight(int(j == i - 1) for j in range(self.rank))

    def simple_coroot(self, j: int) -> Coweight:
        return Coweight(self.cartan_matrix[i][j - 1] for i in range(self.rank))

    def simple_root_form(self, j: int) -> AWeightForm:
        return AWeightForm(int(k == j - 1) for k in range(self.rank))

    def zero_coweight(self) -> Coweight:
        return Coweight([0] * self.rank)

    # -- pairings and the invariant form ---------------------------------

    def pairing(self, c: Coweight, f: AWeightForm):
        if len(c) != self.rank or len(f) != self.rank:
            raise ValueError("rank mismatch")
        return pairing(c, f)

    def inner(self, c1: Coweight, c2: Coweight):
        """Weyl-invariant form; shortest simple coroot has (x,x) = 2."""
        if len(c1) != self.rank or len(c2) != self.rank:
            raise ValueError("rank mismatch")
        return sum(
            c1.coords[i] * self._gram[i][j] * c2.coords[j]
            for i in range(self.rank)
            for j in range(self.rank)
            if c1.coords[i] != 0 and c2.coords[j] != 0
        )

    def sharp(self, c: Coweight) -> AWeightForm:
        """The functional (c, -) as a weight form: <c', sharp(c)> = inner(c, c')."""
        return AWeightForm(
            sum(self._gram[i][j] * c.coords[i] for i in range(self.rank))
            for j in range(self.rank)
        )

    # -- Weyl group -------------------------------------------------------

    def reflect_coweight(self, j: int, c: Coweight) -> Coweight:
        """Simple reflection s_j on coweights: c - <c, alphacheck_j> alpha_j."""
        t = c.coords[j - 1]
        if t == 0:
            return c
        return Coweight(
            c.coords[i] - t * self.cartan_matrix[i][j - 1] for i in range(self.rank)
        )

    def reflect_form(self, j: int, f: AWeightForm) -> AWeightForm:
        """Simple reflection s_j on weight forms (dual action)."""
        t = sum(f.coords[i] * self.cartan_matrix[i][j - 1] for i in range(self.rank))
        if t == 0:
            return f
        return AWeightForm(
            f.coords[k] - (t if k == j - 1 else 0) for k in range(self.rank)
        )

    def weyl_orbit(self, c: Coweight) -> frozenset:
        if not c.is_integral():
            raise ValueError("weyl_orbit expects an integral coweight")
        seen = set()
        queue = [c]
        while queue:
            v = queue.pop()
            if v in seen:
                continue
            seen.add(v)
            for j in range(1, self.rank + 1):
                w = self.reflect_coweight(j, v)
                if w not in seen:
                    queue.append(w)
        return frozenset(seen)

    def positive_roots(self, ch: "Chamber"):
        """Roots beta-check with <witness, beta-check> > 0; half of root_list."""
        return [f for f in self.root_list if ch.is_positive(f)]

    def __eq__(self, other):
        return (
            isinstance(other, CartanDatum)
            and other.type_letter == self.type_letter
            and other.rank == self.rank
        )

    def __hash__(self):
        return hash((self.type_letter, self.rank))

    def __repr__(self):
        return f"CartanDatum({self.type_letter!r}, {self.rank})"


class Chamber:
    """Connected component of the coweight space minus all root hyperplanes.

    Determined by any witness vector with nonzero pairing against every
    root; equality compares the sign pattern, not the witness.
    """

    def __init__(self, datum: CartanDatum, witness: Coweight):
        if len(witness) != datum.rank:
            raise ValueError("rank mismatch")
        signs = []
        for f in datum.root_list:
            v = pairing(witness, f)
            if v == 0:
                raise ValueError(f"chamber witness lies on the root hyperplane of {f}")
            signs.append(1 if v > 0 else -1)
        self.datum = datum
        self.witness = witness
        self.sign_vector = tuple(signs)

    @classmethod
    def dominant(cls, datum: CartanDatum) -> "Chamber":
        return cls(datum, Coweight([1] * datum.rank))

    @classmethod
    def antidominant(cls, datum: CartanDatum) -> "Chamber":
        return cls(datum, Coweight([-1] * datum.rank))

    def __neg__(self):
        return Chamber(self.datum, -self.witness)

    def is_positive(self, f: AWeightForm) -> bool:
        return pairing(self.witness, f) > 0

    def __eq__(self, other):
        return (
            isinstance(other, Chamber)
            and other.datum == self.datum
            and other.sign_vector == self.sign_vector
        )

    def __hash__(self):
        return hash((self.datum, self.sign_vector))

    def __repr__(self):
        return f"Chamber({self.datum!r}, witness={self.witness!r})"
