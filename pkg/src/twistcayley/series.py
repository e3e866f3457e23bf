"""Exact series arithmetic over the endomorphism ring of A x A.

Polynomials in a central variable t with coefficients in End(A x A) act on
polynomials with coefficients in A x A.  Rational forms carry denominators
that are powers of (1 - t); these are the only denominators ever needed,
because (1 - t) has central integer coefficients and every series handled
here is a sum of terms p(t) / (1 - t)^k.  Canonical forms cancel removable
(1 - t) factors via the remainder test p(1) == 0, so equality of rational
forms is structural equality.

On top of that sit the affine maps f -> g*f + h (g a unit rational series,
h a rational pair series).  Translation-only maps (g = 1) and
multiplication-only maps (h = 0) compose by

    (g1, h1) o (g2, h2) == (g1*g2, g1*h2 + h1)

which in particular conjugates a translation by a unit into the translation
by the scaled series.  The machine bridge: state a of the twisted Cayley
machine of A acts on words exactly as the affine map with g the shift unit
`gamma` and h the constant diagonal series of a.
"""

from __future__ import annotations

import functools
from math import comb
from typing import Sequence

from .algebra import (
    BaseMismatch,
    Endo,
    FiniteAbelianGroup,
    identity_endo,
    xi,
    zero_endo,
    zeta,
)
from . import mealy


class NotAUnit(ValueError):
    """The constant series coefficient is not invertible."""


class PairPoly:
    """Polynomial with coefficients in A x A (as pair indices), trailing
    zeros trimmed; the empty coefficient list is the zero polynomial."""

    __slots__ = ("base", "coeffs")

    def __init__(self, base: FiniteAbelianGroup, coeffs: Sequence[int]):
        self.base = base
        coeffs = list(coeffs)
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        self.coeffs: tuple[int, ...] = tuple(coeffs)

    @classmethod
    def zero(cls, base: FiniteAbelianGroup) -> "PairPoly":
        return cls(base, ())

    @classmethod
    def constant(cls, base: FiniteAbelianGroup, p: int) -> "PairPoly":
        return cls(base, (p,))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, n: int) -> int:
        return self.coeffs[n] if n < len(self.coeffs) else 0

    def _require_same_base(self, other) -> None:
        if self.base != other.base:
            raise BaseMismatch("polynomials over different groups")

    def __add__(self, other: "PairPoly") -> "PairPoly":
        self._require_same_base(other)
        padd = self.base.pair_add
        n = max(len(self.coeffs), len(other.coeffs))
        return PairPoly(self.base, [padd(self.coeff(i), other.coeff(i)) for i in range(n)])

    def __neg__(self) -> "PairPoly":
        pneg = self.base.pair_neg
        return PairPoly(self.base, [pneg(c) for c in self.coeffs])

    def __sub__(self, other: "PairPoly") -> "PairPoly":
        return self + (-other)

    def shifted(self, k: int) -> "PairPoly":
        """Multiply by t**k."""
        if self.is_zero():
            return self
        return PairPoly(self.base, (0,) * k + self.coeffs)

    def scaled(self, c: int) -> "PairPoly":
        pscale = self.base.pair_scale
        return PairPoly(self.base, [pscale(x, c) for x in self.coeffs])

    def times_one_minus_t_pow(self, k: int) -> "PairPoly":
        if k == 0 or self.is_zero():
            return self
        padd = self.base.pair_add
        pscale = self.base.pair_scale
        out = [0] * (len(self.coeffs) + k)
        for j in range(k + 1):
            c = (-1) ** j * comb(k, j)
            for i, x in enumerate(self.coeffs):
                out[i + j] = padd(out[i + j], pscale(x, c))
        return PairPoly(self.base, out)

    def divided_by_one_minus_t(self) -> "PairPoly":
        """Exact quotient by (1 - t); requires eval_at_one() == 0."""
        if self.is_zero():
            return self
        padd = self.base.pair_add
        partial = 0
        out = []
        for c in self.coeffs:
            partial = padd(partial, c)
            out.append(partial)
        if out[-1] != 0:
            raise ValueError("(1 - t) does not divide: value at t=1 is nonzero")
        return PairPoly(self.base, out[:-1])

    def eval_at_one(self) -> int:
        """Sum of all coefficients (t = 1 is central)."""
        padd = self.base.pair_add
        acc = 0
        for c in self.coeffs:
            acc = padd(acc, c)
        return acc

    def render(self) -> str:
        if self.is_zero():
            return "0"
        parts = []
        for n, c in enumerate(self.coeffs):
            if c == 0:
                continue
            name = self.base.pair_name(c)
            parts.append(name if n == 0 else f"{name}*t^{n}" if n > 1 else f"{name}*t")
        return " + ".join(parts)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PairPoly):
            return NotImplemented
        return self.base == other.base and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash((self.base, self.coeffs))

    def __repr__(self) -> str:
        return f"PairPoly<{self.render()}>"


class EndoPoly:
    """Polynomial with endomorphism coefficients; t is central, so integer
    multiples of the identity (in particular powers of (1 - t)) commute
    with everything."""

    __slots__ = ("base", "coeffs")

    def __init__(self, base: FiniteAbelianGroup, coeffs: Sequence[Endo]):
        self.base = base
        coeffs = list(coeffs)
        while coeffs and coeffs[-1].is_zero():
            coeffs.pop()
        for c in coeffs:
            if c.base != base:
                raise BaseMismatch("coefficient over a different group")
        self.coeffs: tuple[Endo, ...] = tuple(coeffs)

    @classmethod
    def zero(cls, base: FiniteAbelianGroup) -> "EndoPoly":
        return cls(base, ())

    @classmethod
    def one(cls, base: FiniteAbelianGroup) -> "EndoPoly":
        return cls(base, (identity_endo(base),))

    @classmethod
    def constant(cls, e: Endo) -> "EndoPoly":
        return cls(e.base, (e,))

    @classmethod
    def one_minus_t(cls, base: FiniteAbelianGroup) -> "EndoPoly":
        one = identity_endo(base)
        return cls(base, (one, -one))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, n: int) -> Endo:
        if n < len(self.coeffs):
            return self.coeffs[n]
        return zero_endo(self.base)

    def _require_same_base(self, other) -> None:
        if self.base != other.base:
            raise BaseMismatch("polynomials over different groups")

    def __add__(self, other: "EndoPoly") -> "EndoPoly":
        self._require_same_base(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return EndoPoly(self.base, [self.coeff(i) + other.coeff(i) for i in range(n)])

    def __neg__(self) -> "EndoPoly":
        return EndoPoly(self.base, [-c for c in self.coeffs])

    def __sub__(self, other: "EndoPoly") -> "EndoPoly":
        return self + (-other)

    def __mul__(self, other: "EndoPoly") -> "EndoPoly":
        self._require_same_base(other)
        if self.is_zero() or other.is_zero():
            return EndoPoly.zero(self.base)
        out = [zero_endo(self.base) for _ in range(len(self.coeffs) + len(other.coeffs) - 1)]
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return EndoPoly(self.base, out)

    def shifted(self, k: int) -> "EndoPoly":
        if self.is_zero():
            return self
        return EndoPoly(self.base, (zero_endo(self.base),) * k + self.coeffs)

    def times_one_minus_t_pow(self, k: int) -> "EndoPoly":
        if k == 0 or self.is_zero():
            return self
        out = [zero_endo(self.base) for _ in range(len(self.coeffs) + k)]
        for j in range(k + 1):
            c = (-1) ** j * comb(k, j)
            for i, x in enumerate(self.coeffs):
                out[i + j] = out[i + j] + x.scaled(c)
        return EndoPoly(self.base, out)

    def divided_by_one_minus_t(self) -> "EndoPoly":
        if self.is_zero():
            return self
        partial = None
        out = []
        for c in self.coeffs:
            partial = c if partial is None else partial + c
            out.append(partial)
        if not out[-1].is_zero():
            raise ValueError("(1 - t) does not divide: value at t=1 is nonzero")
        return EndoPoly(self.base, out[:-1])

    def eval_at_one(self) -> Endo:
        acc = zero_endo(self.base)
        for c in self.coeffs:
            acc = acc + c
        return acc

    def apply(self, f: PairPoly) -> PairPoly:
        """Module action on a pair polynomial: (g*f)_n = sum g_j(f_{n-j})."""
        if self.base != f.base:
            raise BaseMismatch("operands over different groups")
        if self.is_zero() or f.is_zero():
            return PairPoly.zero(self.base)
        padd = self.base.pair_add
        out = [0] * (len(self.coeffs) + len(f.coeffs) - 1)
        for j, g in enumerate(self.coeffs):
            table = g.table
            for i, x in enumerate(f.coeffs):
                out[i + j] = padd(out[i + j], table[x])
        return PairPoly(self.base, out)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, EndoPoly):
            return NotImplemented
        return self.base == other.base and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash((self.base, self.coeffs))

    def __repr__(self) -> str:
        return f"EndoPoly(degree={self.degree})"


def _geometric_coeff(n: int, k: int) -> int:
    """Coefficient of t**n in 1/(1-t)**k (k >= 0)."""
    if k == 0:
        return 1 if n == 0 else 0
    return comb(n + k - 1, k - 1)


class RationalEndoSeries:
    """A series num(t) / (1 - t)**denom_pow over End(A x A), kept canonical:
    denom_pow == 0 or num(1) != 0."""

    __slots__ = ("num", "denom_pow", "_expansions")

    def __init__(self, num: EndoPoly, denom_pow: int = 0):
        if denom_pow < 0:
            raise ValueError("denominator power must be nonnegative")
        while denom_pow > 0 and num.eval_at_one().is_zero():
            num = num.divided_by_one_minus_t()
            denom_pow -= 1
        if num.is_zero():
            denom_pow = 0
        self.num = num
        self.denom_pow = denom_pow
        self._expansions: dict[int, tuple[Endo, ...]] = {}

    @property
    def base(self) -> FiniteAbelianGroup:
        return self.num.base

    @classmethod
    def one(cls, base: FiniteAbelianGroup) -> "RationalEndoSeries":
        return cls(EndoPoly.one(base))

    @classmethod
    def zero(cls, base: FiniteAbelianGroup) -> "RationalEndoSeries":
        return cls(EndoPoly.zero(base))

    @classmethod
    def from_endo(cls, e: Endo) -> "RationalEndoSeries":
        return cls(EndoPoly.constant(e))

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def constant_coeff(self) -> Endo:
        """The degree-0 coefficient of the expanded series."""
        return self.num.coeff(0)

    def is_unit(self) -> bool:
        return self.constant_coeff().is_invertible()

    def _require_same_base(self, other) -> None:
        if self.base != other.base:
            raise BaseMismatch("series over different groups")

    def __add__(self, other: "RationalEndoSeries") -> "RationalEndoSeries":
        self._require_same_base(other)
        k = max(self.denom_pow, other.denom_pow)
        num = self.num.times_one_minus_t_pow(k - self.denom_pow) + other.num.times_one_minus_t_pow(k - other.denom_pow)
        return RationalEndoSeries(num, k)

    def __neg__(self) -> "RationalEndoSeries":
        return RationalEndoSeries(-self.num, self.denom_pow)

    def __sub__(self, other: "RationalEndoSeries") -> "RationalEndoSeries":
        return self + (-other)

    def __mul__(self, other: "RationalEndoSeries") -> "RationalEndoSeries":
        self._require_same_base(other)
        return RationalEndoSeries(self.num * other.num, self.denom_pow + other.denom_pow)

    def __pow__(self, n: int) -> "RationalEndoSeries":
        if n < 0:
            raise ValueError("negative powers have no (1-t)-power rational form")
        result = RationalEndoSeries.one(self.base)
        for _ in range(n):
            result = result * self
        return result

    def act_on(self, h: "RationalPairSeries") -> "RationalPairSeries":
        if self.base != h.base:
            raise BaseMismatch("operands over different groups")
        return RationalPairSeries(self.num.apply(h.num), self.denom_pow + h.denom_pow)

    def expand(self, depth: int) -> list[Endo]:
        """First depth+1 coefficients of the series (memoized per value)."""
        cached = self._expansions.get(depth)
        if cached is not None:
            return list(cached)
        coeffs = self.num.coeffs
        k = self.denom_pow
        out = []
        for n in range(depth + 1):
            acc = None
            for j, g in enumerate(coeffs):
                if j > n:
                    break
                term = g.scaled(_geometric_coeff(n - j, k))
                acc = term if acc is None else acc + term
            if acc is None:
                acc = zero_endo(self.base)
            out.append(acc)
        self._expansions[depth] = tuple(out)
        return out

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RationalEndoSeries):
            return NotImplemented
        return self.num == other.num and self.denom_pow == other.denom_pow

    def __hash__(self) -> int:
        return hash((self.num, self.denom_pow))

    def __repr__(self) -> str:
        return f"RationalEndoSeries(degree={self.num.degree}, denom_pow={self.denom_pow})"


class RationalPairSeries:
    """A series num(t) / (1 - t)**denom_pow over A x A, canonical like
    `RationalEndoSeries`."""

    __slots__ = ("num", "denom_pow", "_expansions")

    def __init__(self, num: PairPoly, denom_pow: int = 0):
        if denom_pow < 0:
            raise ValueError("denominator power must be nonnegative")
        while denom_pow > 0 and num.eval_at_one() == 0:
            num = num.divided_by_one_minus_t()
            denom_pow -= 1
        if num.is_zero():
            denom_pow = 0
        self.num = num
        self.denom_pow = denom_pow
        self._expansions: dict[int, tuple[int, ...]] = {}

    @property
    def base(self) -> FiniteAbelianGroup:
        return self.num.base

    @classmethod
    def zero(cls, base: FiniteAbelianGroup) -> "RationalPairSeries":
        return cls(PairPoly.zero(base))

    @classmethod
    def geometric(cls, base: FiniteAbelianGroup, p: int) -> "RationalPairSeries":
        """The series p + p*t + p*t^2 + ... == p / (1 - t)."""
        return cls(PairPoly.constant(base, p), 1)

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def _require_same_base(self, other) -> None:
        if self.base != other.base:
            raise BaseMismatch("series over different groups")

    def __add__(self, other: "RationalPairSeries") -> "RationalPairSeries":
        self._require_same_base(other)
        k = max(self.denom_pow, other.denom_pow)
        num = self.num.times_one_minus_t_pow(k - self.denom_pow) + other.num.times_one_minus_t_pow(k - other.denom_pow)
        return RationalPairSeries(num, k)

    def __neg__(self) -> "RationalPairSeries":
        return RationalPairSeries(-self.num, self.denom_pow)

    def __sub__(self, other: "RationalPairSeries") -> "RationalPairSeries":
        return self + (-other)

    def expand(self, depth: int) -> list[int]:
        cached = self._expansions.get(depth)
        if cached is not None:
            return list(cached)
        coeffs = self.num.coeffs
        k = self.denom_pow
        padd = self.base.pair_add
        pscale = self.base.pair_scale
        out = []
        for n in range(depth + 1):
            acc = 0
            for j, p in enumerate(coeffs):
                if j > n:
                    break
                acc = padd(acc, pscale(p, _geometric_coeff(n - j, k)))
            out.append(acc)
        self._expansions[depth] = tuple(out)
        return out

    def render(self) -> str:
        num = self.num.render()
        if self.denom_pow == 0:
            return num
        expo = "" if self.denom_pow == 1 else f"^{self.denom_pow}"
        return f"({num}) / (1-t){expo}"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RationalPairSeries):
            return NotImplemented
        return self.num == other.num and self.denom_pow == other.denom_pow

    def __hash__(self) -> int:
        return hash((self.num, self.denom_pow))

    def __repr__(self) -> str:
        return f"RationalPairSeries<{self.render()}>"


@functools.lru_cache(maxsize=None)
def gamma(A: FiniteAbelianGroup) -> RationalEndoSeries:
    """The shift unit (xi + (zeta - xi) t) / (1 - t); its expansion is
    xi, zeta, zeta, zeta, ... and its constant coefficient is invertible."""
    x = xi(A)
    z = zeta(A)
    return RationalEndoSeries(EndoPoly(A, (x, z - x)), 1)


def unit_inverse_trunc(g: RationalEndoSeries, depth: int) -> list[Endo]:
    """Coefficients c_0..c_depth with g * c == 1 mod t**(depth+1).

    Standard recursion: c_0 = g_0^{-1}, c_n = -g_0^{-1} * sum_{j>=1} g_j c_{n-j}.
    Raises NotAUnit when g_0 is not invertible.
    """
    g_coeffs = g.expand(depth)
    g0 = g_coeffs[0]
    if not g0.is_invertible():
        raise NotAUnit("constant coefficient is not invertible")
    g0_inv = g0.inverse()
    out = [g0_inv]
    for n in range(1, depth + 1):
        acc = None
        for j in range(1, n + 1):
            term = g_coeffs[j] * out[n - j]
            acc = term if acc is None else acc + term
        out.append(g0_inv * (-acc) if acc is not None else g0_inv)
    return out


class AffineSeriesMap:
    """The bijection f -> g*f + h of (A x A)[[t]], with g a unit.

    Translations are (g = 1, h); unit multiplications are (g, h = 0); the
    group they generate is exactly the maps of this shape, composed by
    (g1, h1) o (g2, h2) == (g1*g2, g1*h2 + h1).
    """

    __slots__ = ("g", "h")

    def __init__(self, g: RationalEndoSeries, h: RationalPairSeries):
        if g.base != h.base:
            raise BaseMismatch("components over different groups")
        if not g.is_unit():
            raise NotAUnit("multiplicative part must have invertible g_0")
        self.g = g
        self.h = h

    @property
    def base(self) -> FiniteAbelianGroup:
        return self.g.base

    @classmethod
    def identity(cls, A: FiniteAbelianGroup) -> "AffineSeriesMap":
        return cls(RationalEndoSeries.one(A), RationalPairSeries.zero(A))

    def compose(self, other: "AffineSeriesMap") -> "AffineSeriesMap":
        """self after other (function composition)."""
        if self.base != other.base:
            raise BaseMismatch("maps over different groups")
        return AffineSeriesMap(self.g * other.g, self.g.act_on(other.h) + self.h)

    def apply_trunc(self, f: Sequence[int], depth: int) -> list[int]:
        """First depth+1 coefficients of g*f + h (f zero-padded)."""
        g_coeffs = self.g.expand(depth)
        h_coeffs = self.h.expand(depth)
        padd = self.base.pair_add
        out = []
        for n in range(depth + 1):
            acc = h_coeffs[n]
            for j in range(min(n, len(f) - 1) + 1):
                acc = padd(acc, g_coeffs[n - j].table[f[j]])
            out.append(acc)
        return out

    def apply_inverse_trunc(self, f: Sequence[int], depth: int) -> list[int]:
        """First depth+1 coefficients of g^{-1} * (f - h); the inverse of a
        unit rational series is in general not rational, so this is the
        truncated inverse map."""
        ginv = unit_inverse_trunc(self.g, depth)
        h_coeffs = self.h.expand(depth)
        padd = self.base.pair_add
        pneg = self.base.pair_neg
        shifted = [
            padd(f[n] if n < len(f) else 0, pneg(h_coeffs[n])) for n in range(depth + 1)
        ]
        out = []
        for n in range(depth + 1):
            acc = 0
            for j in range(n + 1):
                acc = padd(acc, ginv[n - j].table[shifted[j]])
            out.append(acc)
        return out

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AffineSeriesMap):
            return NotImplemented
        return self.g == other.g and self.h == other.h

    def __hash__(self) -> int:
        return hash((self.g, self.h))

    def __repr__(self) -> str:
        return f"AffineSeriesMap(g={self.g!r}, h={self.h!r})"


def alpha_of(A: FiniteAbelianGroup, a: int) -> AffineSeriesMap:
    """Translation by the constant diagonal series (a,a) / (1 - t)."""
    return AffineSeriesMap(
        RationalEndoSeries.one(A),
        RationalPairSeries.geometric(A, A.pair(a, a)),
    )


def mu_of(g: RationalEndoSeries) -> AffineSeriesMap:
    """Left multiplication by the unit series g."""
    return AffineSeriesMap(g, RationalPairSeries.zero(g.base))


@functools.lru_cache(maxsize=None)
def generator_map(A: FiniteAbelianGroup, a: int) -> AffineSeriesMap:
    """The map realizing state a of the twisted Cayley machine of A:
    translation by (a,a)/(1-t) after multiplication by `gamma`."""
    return alpha_of(A, a).compose(mu_of(gamma(A)))


class SeriesCheck:
    """Outcome of comparing a machine state action with its series map."""

    __slots__ = ("ok", "mismatches")

    def __init__(self, mismatches: Sequence[tuple]):
        self.mismatches = tuple(mismatches)
        self.ok = not self.mismatches

    def __bool__(self) -> bool:
        return self.ok

    def __repr__(self) -> str:
        if self.ok:
            return "SeriesCheck(ok)"
        return f"SeriesCheck({len(self.mismatches)} mismatches: {self.mismatches[:3]}...)"


def check_series_realization(
    A: FiniteAbelianGroup,
    a: int,
    word: Sequence[int],
    machine: "mealy.MealyMachine | None" = None,
) -> SeriesCheck:
    """Compare the machine action of state a on a word against the affine
    series map, coefficient by coefficient, and check that the head and tail
    of the series output follow the twisted Cayley recursion.

    Letters of the twisted Cayley machine over A are pair indices, so the
    word doubles as the coefficient prefix of a series.  Mismatches are
    reported as (kind, position, got, expected) tuples; `machine` may be an
    override (e.g. a file under test) with |A| states and |A|^2 letters.
    """
    if not word:
        raise ValueError("word must be nonempty")
    if machine is None:
        machine = mealy.twisted_cayley_machine(A.as_monoid())
    if machine.n_states != A.order or machine.n_letters != A.pair_count:
        raise ValueError("machine shape does not match the group")
    n = len(word)
    machine_out = mealy.act(machine, a, word)
    series_out = generator_map(A, a).apply_trunc(word, n - 1)
    mismatches = []
    for i in range(n):
        if machine_out[i] != series_out[i]:
            mismatches.append(("output", i, machine_out[i], series_out[i]))
    b, c = A.pair_split(word[0])
    ab = A.add(a, b)
    head = A.pair(ab, A.add(ab, c))
    if series_out[0] != head:
        mismatches.append(("head", 0, series_out[0], head))
    if n > 1:
        next_state = A.add(a, c)
        tail = generator_map(A, next_state).apply_trunc(word[1:], n - 2)
        for i, expected in enumerate(tail):
            if series_out[i + 1] != expected:
                mismatches.append(("tail", i + 1, series_out[i + 1], expected))
    return SeriesCheck(mismatches)
