"""Exact finite algebra: monoids, abelian groups, and endomorphisms of A x A.

Everything is a dense integer table over a fixed element enumeration, so all
arithmetic is exact, deterministic, and cheap at the group orders this
package targets (a few hundred elements at most).  Values are immutable after
construction and safe to share between threads.
"""

from __future__ import annotations

import itertools
from math import gcd
from typing import Callable, Sequence


class AssociativityViolation(ValueError):
    """A multiplication table failed (x*y)*z == x*(y*z); carries a witness."""

    def __init__(self, x: int, y: int, z: int):
        super().__init__(f"associativity fails at triple ({x}, {y}, {z})")
        self.witness = (x, y, z)


class IdentityViolation(ValueError):
    """The claimed identity does not act trivially on some element."""

    def __init__(self, x: int):
        super().__init__(f"identity law fails at element {x}")
        self.witness = x


class BaseMismatch(ValueError):
    """Operands live over different base structures."""


class NotInvertible(ValueError):
    """An inverse was requested of something that has none."""


class FiniteMonoid:
    """A finite monoid given by a dense multiplication table.

    Elements are the indices ``0 .. size-1``; ``table[x][y]`` is the product
    x*y.  The table is validated on construction: the identity law and
    associativity are checked exhaustively, raising `IdentityViolation` or
    `AssociativityViolation` with a witness on failure.
    """

    __slots__ = ("size", "table", "identity", "names", "_is_group")

    def __init__(
        self,
        table: Sequence[Sequence[int]],
        identity: int,
        names: Sequence[str] | None = None,
    ):
        size = len(table)
        if size == 0:
            raise ValueError("monoid table must be nonempty")
        rows = []
        for row in table:
            if len(row) != size:
                raise ValueError("monoid table must be square")
            row = tuple(int(x) for x in row)
            if any(x < 0 or x >= size for x in row):
                raise ValueError("monoid table entry out of range")
            rows.append(row)
        self.table: tuple[tuple[int, ...], ...] = tuple(rows)
        if not 0 <= identity < size:
            raise ValueError("identity index out of range")
        self.size = size
        self.identity = identity
        if names is None:
            names = tuple(str(i) for i in range(size))
        else:
            names = tuple(str(n) for n in names)
            if len(names) != size or len(set(names)) != size:
                raise ValueError("names must be distinct and match the size")
        self.names = names
        self._is_group: bool | None = None
        self._validate()

    def _validate(self) -> None:
        t = self.table
        e = self.identity
        for x in range(self.size):
            if t[e][x] != x or t[x][e] != x:
                raise IdentityViolation(x)
        rng = range(self.size)
        for x in rng:
            tx = t[x]
            for y in rng:
                txy = t[tx[y]]
                ty = t[y]
                for z in rng:
                    if txy[z] != tx[ty[z]]:
                        raise AssociativityViolation(x, y, z)

    def op(self, x: int, y: int) -> int:
        return self.table[x][y]

    def elements(self) -> range:
        return range(self.size)

    def is_group(self) -> bool:
        if self._is_group is None:
            e = self.identity
            self._is_group = all(
                any(self.table[x][y] == e and self.table[y][x] == e for y in self.elements())
                for x in self.elements()
            )
        return self._is_group

    def inverse(self, x: int) -> int:
        e = self.identity
        for y in self.elements():
            if self.table[x][y] == e and self.table[y][x] == e:
                return y
        raise NotInvertible(f"element {x} has no two-sided inverse")

    def is_commutative(self) -> bool:
        return all(
            self.table[x][y] == self.table[y][x]
            for x in self.elements()
            for y in range(x)
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FiniteMonoid):
            return NotImplemented
        return self.table == other.table and self.identity == other.identity

    def __hash__(self) -> int:
        return hash((self.table, self.identity))

    def __repr__(self) -> str:
        return f"FiniteMonoid(size={self.size})"


def monoid_from_table(
    table: Sequence[Sequence[int]],
    identity: int,
    names: Sequence[str] | None = None,
) -> FiniteMonoid:
    """Validate a raw table (e.g. parsed from JSON) into a `FiniteMonoid`."""
    return FiniteMonoid(table, identity, names)


class FiniteAbelianGroup:
    """A finite abelian group presented by invariant factors.

    Elements are tuples of residues, one per factor, enumerated
    lexicographically and addressed by their index in that enumeration.
    Index 0 is the zero element.  All operations work on indices.
    """

    __slots__ = (
        "invariant_factors",
        "order",
        "exponent",
        "_tuples",
        "_index",
        "_add",
        "_pair_add",
        "_pair_scale_tables",
        "_monoid",
    )

    def __init__(self, invariant_factors: Sequence[int]):
        factors = tuple(int(n) for n in invariant_factors)
        if not factors:
            raise ValueError("at least one invariant factor is required")
        if any(n < 2 for n in factors):
            raise ValueError("every invariant factor must be >= 2 (non-trivial group)")
        self.invariant_factors = factors
        order = 1
        for n in factors:
            order *= n
        self.order = order
        exponent = 1
        for n in factors:
            exponent = exponent * n // gcd(exponent, n)
        self.exponent = exponent
        self._tuples = tuple(itertools.product(*(range(n) for n in factors)))
        self._index = {t: i for i, t in enumerate(self._tuples)}
        self._add: list[int] | None = None
        self._pair_add: list[int] | None = None
        self._pair_scale_tables: dict[int, list[int]] = {}
        self._monoid: FiniteMonoid | None = None

    # -- element arithmetic ------------------------------------------------

    def element(self, index: int) -> tuple[int, ...]:
        return self._tuples[index]

    def index(self, residues: Sequence[int]) -> int:
        key = tuple(r % n for r, n in zip(residues, self.invariant_factors))
        if len(key) != len(self.invariant_factors):
            raise ValueError("wrong number of residues")
        return self._index[key]

    def add(self, i: int, j: int) -> int:
        return self.add_table()[i * self.order + j]

    def neg(self, i: int) -> int:
        t = self._tuples[i]
        return self._index[tuple((-r) % n for r, n in zip(t, self.invariant_factors))]

    def scale(self, i: int, c: int) -> int:
        t = self._tuples[i]
        return self._index[tuple((c * r) % n for r, n in zip(t, self.invariant_factors))]

    def elements(self) -> range:
        return range(self.order)

    def name(self, i: int) -> str:
        t = self._tuples[i]
        if len(t) == 1:
            return str(t[0])
        return "(" + ",".join(str(r) for r in t) + ")"

    def add_table(self) -> list[int]:
        if self._add is None:
            order = self.order
            idx = self._index
            facs = self.invariant_factors
            table = [0] * (order * order)
            for i, ti in enumerate(self._tuples):
                base = i * order
                for j, tj in enumerate(self._tuples):
                    table[base + j] = idx[tuple((a + b) % n for a, b, n in zip(ti, tj, facs))]
            self._add = table
        return self._add

    def as_monoid(self) -> FiniteMonoid:
        """The additive monoid view (it is of course a group)."""
        if self._monoid is None:
            add = self.add_table()
            rows = [
                add[i * self.order : (i + 1) * self.order] for i in self.elements()
            ]
            names = [self.name(i) for i in self.elements()]
            self._monoid = FiniteMonoid(rows, 0, names)
        return self._monoid

    # -- the group A x A, addressed by pair indices ------------------------
    #
    # pair index of (a, b) is a*order + b; this is the lexicographic
    # enumeration of A x A used by endomorphism tables and series.

    @property
    def pair_count(self) -> int:
        return self.order * self.order

    def pair(self, ia: int, ib: int) -> int:
        return ia * self.order + ib

    def pair_split(self, p: int) -> tuple[int, int]:
        return divmod(p, self.order)

    def pair_add(self, p: int, q: int) -> int:
        return self.pair_add_table()[p * self.pair_count + q]

    def pair_neg(self, p: int) -> int:
        ia, ib = divmod(p, self.order)
        return self.neg(ia) * self.order + self.neg(ib)

    def pair_scale(self, p: int, c: int) -> int:
        return self.pair_scale_table(c)[p]

    def pair_scale_table(self, c: int) -> list[int]:
        """Dense table of p -> c*p on pair indices; scaling is periodic in
        the group exponent, so at most `exponent` tables ever exist."""
        c %= self.exponent
        table = self._pair_scale_tables.get(c)
        if table is None:
            order = self.order
            scale = self.scale
            table = [
                scale(ia, c) * order + scale(ib, c)
                for ia in range(order)
                for ib in range(order)
            ]
            self._pair_scale_tables[c] = table
        return table

    def pair_name(self, p: int) -> str:
        ia, ib = divmod(p, self.order)
        return f"({self.name(ia)},{self.name(ib)})"

    def pair_add_table(self) -> list[int]:
        if self._pair_add is None:
            order = self.order
            add = self.add_table()
            pc = self.pair_count
            table = [0] * (pc * pc)
            for p in range(pc):
                pa, pb = divmod(p, order)
                base = p * pc
                rowa = pa * order
                rowb = pb * order
                for q in range(pc):
                    qa, qb = divmod(q, order)
                    table[base + q] = add[rowa + qa] * order + add[rowb + qb]
            self._pair_add = table
        return self._pair_add

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FiniteAbelianGroup):
            return NotImplemented
        return self.invariant_factors == other.invariant_factors

    def __hash__(self) -> int:
        return hash(self.invariant_factors)

    def __repr__(self) -> str:
        return "Z" + "xZ".join(f"/{n}" for n in self.invariant_factors)


def make_cyclic_product(factors: Sequence[int]) -> FiniteAbelianGroup:
    """Build the direct product of cyclic groups Z/n for n in `factors`."""
    return FiniteAbelianGroup(factors)


class Endo:
    """An additive endomorphism of A x A as a dense table on pair indices.

    Addition is pointwise, multiplication is composition:
    ``(e1 * e2)(p) == e1(e2(p))``.  Tables produced by the named
    constructors and by ring operations are additive by construction;
    `endo_from_callable` can verify additivity exhaustively.
    """

    __slots__ = ("base", "table")

    def __init__(self, base: FiniteAbelianGroup, table: Sequence[int]):
        self.base = base
        self.table: tuple[int, ...] = tuple(table)
        if len(self.table) != base.pair_count:
            raise ValueError("endomorphism table has wrong length")

    def __call__(self, p: int) -> int:
        return self.table[p]

    def _require_same_base(self, other: "Endo") -> None:
        if self.base != other.base:
            raise BaseMismatch("endomorphisms over different groups")

    def __add__(self, other: "Endo") -> "Endo":
        self._require_same_base(other)
        padd = self.base.pair_add_table()
        pc = self.base.pair_count
        t2 = other.table
        return Endo(
            self.base, [padd[a * pc + t2[p]] for p, a in enumerate(self.table)]
        )

    def __neg__(self) -> "Endo":
        neg = self.base.pair_neg
        return Endo(self.base, [neg(a) for a in self.table])

    def __sub__(self, other: "Endo") -> "Endo":
        return self + (-other)

    def __mul__(self, other: "Endo") -> "Endo":
        self._require_same_base(other)
        t1 = self.table
        return Endo(self.base, [t1[b] for b in other.table])

    def __pow__(self, n: int) -> "Endo":
        if n < 0:
            return self.inverse() ** (-n)
        result = identity_endo(self.base)
        for _ in range(n):
            result = result * self
        return result

    def scaled(self, c: int) -> "Endo":
        tbl = self.base.pair_scale_table(c)
        return Endo(self.base, [tbl[a] for a in self.table])

    def is_zero(self) -> bool:
        return all(a == 0 for a in self.table)

    def is_invertible(self) -> bool:
        return len(set(self.table)) == len(self.table)

    def inverse(self) -> "Endo":
        if not self.is_invertible():
            raise NotInvertible("endomorphism table is not a bijection")
        inv = [0] * len(self.table)
        for p, q in enumerate(self.table):
            inv[q] = p
        return Endo(self.base, inv)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Endo):
            return NotImplemented
        return self.base == other.base and self.table == other.table

    def __hash__(self) -> int:
        return hash((self.base, self.table))

    def __repr__(self) -> str:
        return f"Endo({self.base!r}, {list(self.table)})"


def identity_endo(A: FiniteAbelianGroup) -> Endo:
    return Endo(A, range(A.pair_count))


def zero_endo(A: FiniteAbelianGroup) -> Endo:
    return Endo(A, [0] * A.pair_count)


def scalar_endo(A: FiniteAbelianGroup, c: int) -> Endo:
    """Multiplication by the integer c; central in the endomorphism ring."""
    return Endo(A, [A.pair_scale(p, c) for p in range(A.pair_count)])


def xi(A: FiniteAbelianGroup) -> Endo:
    """The automorphism (a, b) -> (a, a + b)."""
    order = A.order
    add = A.add_table()
    table = [0] * A.pair_count
    for p in range(A.pair_count):
        ia, ib = divmod(p, order)
        table[p] = ia * order + add[ia * order + ib]
    return Endo(A, table)


def zeta(A: FiniteAbelianGroup) -> Endo:
    """The idempotent (a, b) -> (b, b); not injective for |A| >= 2."""
    order = A.order
    table = [0] * A.pair_count
    for p in range(A.pair_count):
        ib = p % order
        table[p] = ib * order + ib
    return Endo(A, table)


def endo_from_callable(
    A: FiniteAbelianGroup,
    fn: Callable[[int], int],
    check: bool = True,
) -> Endo:
    """Tabulate ``fn`` on pair indices; verify additivity unless check=False."""
    table = [fn(p) for p in range(A.pair_count)]
    e = Endo(A, table)
    if check:
        check_additive(e)
    return e


def check_additive(e: Endo) -> None:
    """Exhaustively verify e(p + q) == e(p) + e(q); raise ValueError if not."""
    A = e.base
    padd = A.pair_add_table()
    pc = A.pair_count
    t = e.table
    if t[0] != 0:
        raise ValueError("endomorphism does not fix zero")
    for p in range(pc):
        tp = t[p]
        for q in range(pc):
            if t[padd[p * pc + q]] != padd[tp * pc + t[q]]:
                raise ValueError(f"additivity fails at pair indices ({p}, {q})")


def _component_orders(A: FiniteAbelianGroup) -> tuple[int, ...]:
    return A.invariant_factors + A.invariant_factors


def _pair_components(A: FiniteAbelianGroup, p: int) -> tuple[int, ...]:
    ia, ib = divmod(p, A.order)
    return A.element(ia) + A.element(ib)


def _pair_from_components(A: FiniteAbelianGroup, comps: Sequence[int]) -> int:
    k = len(A.invariant_factors)
    return A.pair(A.index(comps[:k]), A.index(comps[k:]))


def random_endo(A: FiniteAbelianGroup, rng) -> Endo:
    """A uniformly random additive endomorphism of A x A.

    Drawn by choosing, independently for each cyclic generator of A x A of
    order m, a uniformly random image in the m-torsion subgroup.
    """
    orders = _component_orders(A)
    n_gens = len(orders)
    images = []
    for m in orders:
        comps = []
        for mj in orders:
            g = gcd(m, mj)
            comps.append((mj // g) * rng.randrange(g))
        images.append(_pair_from_components(A, comps))
    padd = A.pair_add_table()
    pc = A.pair_count
    table = [0] * pc
    for p in range(pc):
        comps = _pair_components(A, p)
        acc = 0
        for c, img in zip(comps, images):
            acc = padd[acc * pc + A.pair_scale(img, c)]
        table[p] = acc
    return Endo(A, table)


def random_unit_endo(A: FiniteAbelianGroup, rng) -> Endo:
    """A random invertible endomorphism of A x A (rejection sampling)."""
    while True:
        e = random_endo(A, rng)
        if e.is_invertible():
            return e

