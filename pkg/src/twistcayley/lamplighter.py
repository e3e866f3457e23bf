"""The restricted wreath product A wr Z and its series certificates.

Elements are exact normal forms (finitely many lamps: position -> nonzero
A element, plus an integer shift).  The generator assignment sends the
machine generator for a in A to the element "lamp a at 0, then shift by 1",
matching the composition order of `mealy.act_word` (rightmost acts first).

A pure lamp configuration k with positions >= 0 maps to the translation
part h(k) = sum over lamps of gamma^position applied to (a,a)/(1-t), an
exact rational form.  The configuration is in the kernel of the generator
assignment exactly when h(k) is the zero form; clearing the denominator
and evaluating at t = 1 recovers the diagonal pair of the highest lamp, so
nonzero configurations can never cancel.  Checking kernel triviality on
pure lamp configurations suffices: a normal subgroup of A wr Z is trivial
iff it meets the lamp subgroup trivially, which is classical wreath-product
group theory, not code; the functions below therefore only accept lamp
configurations.
"""

from __future__ import annotations

from typing import Iterable, Mapping, Sequence

from .algebra import BaseMismatch, FiniteAbelianGroup
from .series import RationalPairSeries, gamma

# A generator word is a sequence of (a, exponent) with a an element index of
# A and exponent +1 or -1; it denotes the composition of the corresponding
# machine state actions, rightmost first, exactly as in `mealy.act_word`.
GeneratorWord = tuple[tuple[int, int], ...]

LampConfig = Mapping[int, int]


class NegativePosition(ValueError):
    """Series certificates need lamp positions >= 0; translate first."""


class EmptyConfig(ValueError):
    """The operation needs at least one lamp."""


class LamplighterElement:
    """An element of A wr Z: finitely many lamps and an integer shift.

    `lamps` maps integer positions to nonzero element indices of A; the
    stored form is a sorted tuple of (position, value) pairs, so elements
    are hashable and equality is normal-form equality.  The product
    translates the right factor's lamps by the left factor's shift:

        (k1, n1) * (k2, n2) == (k1 + translate(k2, n1), n1 + n2)
    """

    __slots__ = ("base", "lamps", "shift")

    def __init__(self, base: FiniteAbelianGroup, lamps: LampConfig | Iterable[tuple[int, int]], shift: int = 0):
        items = lamps.items() if isinstance(lamps, Mapping) else lamps
        cleaned = []
        for pos, val in items:
            if not 0 <= val < base.order:
                raise ValueError(f"lamp value {val} out of range")
            if val != 0:
                cleaned.append((int(pos), val))
        cleaned.sort()
        positions = [p for p, _ in cleaned]
        if len(set(positions)) != len(positions):
            raise ValueError("duplicate lamp positions")
        self.base = base
        self.lamps: tuple[tuple[int, int], ...] = tuple(cleaned)
        self.shift = int(shift)

    @classmethod
    def identity(cls, base: FiniteAbelianGroup) -> "LamplighterElement":
        return cls(base, (), 0)

    @classmethod
    def shift_generator(cls, base: FiniteAbelianGroup, n: int = 1) -> "LamplighterElement":
        return cls(base, (), n)

    def lamp_dict(self) -> dict[int, int]:
        return dict(self.lamps)

    def is_identity(self) -> bool:
        return not self.lamps and self.shift == 0

    def translated(self, n: int) -> "LamplighterElement":
        """Conjugate by the shift generator: move every lamp by +n."""
        return LamplighterElement(self.base, [(p + n, v) for p, v in self.lamps], self.shift)

    def _require_same_base(self, other: "LamplighterElement") -> None:
        if self.base != other.base:
            raise BaseMismatch("elements over different lamp groups")

    def __mul__(self, other: "LamplighterElement") -> "LamplighterElement":
        self._require_same_base(other)
        add = self.base.add
        merged = dict(self.lamps)
        for p, v in other.lamps:
            p += self.shift
            s = add(merged.get(p, 0), v)
            if s == 0:
                merged.pop(p, None)
            else:
                merged[p] = s
        return LamplighterElement(self.base, merged, self.shift + other.shift)

    def inverse(self) -> "LamplighterElement":
        neg = self.base.neg
        return LamplighterElement(
            self.base,
            [(p - self.shift, neg(v)) for p, v in self.lamps],
            -self.shift,
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LamplighterElement):
            return NotImplemented
        return self.base == other.base and self.lamps == other.lamps and self.shift == other.shift

    def __hash__(self) -> int:
        return hash((self.base, self.lamps, self.shift))

    def __repr__(self) -> str:
        lamps = ",".join(f"{p}:{v}" for p, v in self.lamps)
        return f"LamplighterElement({{{lamps}}}, shift={self.shift})"


def generator(A: FiniteAbelianGroup, a: int) -> LamplighterElement:
    """Image of the machine generator for a: lamp a at 0, then shift by 1."""
    lamps = ((0, a),) if a != 0 else ()
    return LamplighterElement(A, lamps, 1)


def word_to_lamplighter(A: FiniteAbelianGroup, word: Sequence[tuple[int, int]]) -> LamplighterElement:
    """Evaluate a generator word left to right, so that the result is the
    image of the composed action computed by `mealy.act_word`."""
    result = LamplighterElement.identity(A)
    for a, e in word:
        g = generator(A, a)
        result = result * (g if e == 1 else g.inverse())
    return result


def shift_to_origin(lamps: LampConfig) -> tuple[dict[int, int], int]:
    """Translate a lamp configuration so its minimum position is 0.

    Returns (translated config, offset); conjugating by the shift generator
    does not change kernel membership, so certificates may normalize freely.
    """
    if not lamps:
        return {}, 0
    offset = min(lamps)
    return {p - offset: v for p, v in lamps.items()}, offset


def lamp_config_series(A: FiniteAbelianGroup, lamps: LampConfig) -> RationalPairSeries:
    """The exact translation series of a pure lamp configuration:
    sum of gamma^position applied to (value,value)/(1-t).

    Positions must be >= 0 (normalize with `shift_to_origin` first); after
    canonicalization the denominator power is at most max position + 1.
    """
    total = RationalPairSeries.zero(A)
    g = gamma(A)
    for pos in sorted(lamps):
        val = lamps[pos]
        if pos < 0:
            raise NegativePosition(f"lamp position {pos} < 0")
        if not 0 <= val < A.order:
            raise ValueError(f"lamp value {val} out of range")
        if val == 0:
            continue
        term = (g**pos).act_on(RationalPairSeries.geometric(A, A.pair(val, val)))
        total = total + term
    return total


def kernel_test(A: FiniteAbelianGroup, lamps: LampConfig) -> bool:
    """True iff the configuration's translation series is exactly zero,
    i.e. the configuration acts trivially.  Only the empty configuration
    ever passes; the exhaustive checks in the test suite confirm that."""
    return lamp_config_series(A, lamps).is_zero()


def leading_lamp_recovery(A: FiniteAbelianGroup, lamps: LampConfig) -> int:
    """Clear the denominator by (1 - t)^(max position + 1) and evaluate the
    resulting polynomial at t = 1.

    For a nonzero configuration this returns the pair index of
    (a_max, a_max) where a_max is the lamp at the highest position, which is
    nonzero; hence the configuration is not in the kernel.
    """
    nonzero = {p: v for p, v in lamps.items() if v != 0}
    if not nonzero:
        raise EmptyConfig("no lamps to recover from")
    top = max(nonzero)
    if min(nonzero) < 0:
        raise NegativePosition("normalize positions to be >= 0 first")
    h = lamp_config_series(A, nonzero)
    cleared = h.num.times_one_minus_t_pow(top + 1 - h.denom_pow)
    return cleared.eval_at_one()


def parse_lamp_config(text: str) -> tuple[dict[int, int], int]:
    """Parse the literal syntax "pos:val,pos:val@shift=n" (shift optional).

    Returns (lamps, shift); an empty lamp part is written "" or "-".
    """
    text = text.strip()
    shift = 0
    if "@" in text:
        lamp_part, _, shift_part = text.partition("@")
        shift_part = shift_part.strip()
        if not shift_part.startswith("shift="):
            raise ValueError(f"expected '@shift=N' suffix, got {shift_part!r}")
        shift = int(shift_part[len("shift=") :])
    else:
        lamp_part = text
    lamp_part = lamp_part.strip()
    lamps: dict[int, int] = {}
    if lamp_part and lamp_part != "-":
        for chunk in lamp_part.split(","):
            pos_text, sep, val_text = chunk.partition(":")
            if not sep:
                raise ValueError(f"expected 'pos:val', got {chunk!r}")
            pos = int(pos_text)
            if pos in lamps:
                raise ValueError(f"duplicate lamp position {pos}")
            lamps[pos] = int(val_text)
    return lamps, shift


def format_lamp_config(lamps: LampConfig, shift: int = 0) -> str:
    body = ",".join(f"{p}:{lamps[p]}" for p in sorted(lamps) if lamps[p] != 0) or "-"
    if shift:
        return f"{body}@shift={shift}"
    return body
