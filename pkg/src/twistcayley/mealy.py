"""Mealy machines and their letter-to-letter word actions.

Provides the invertible / reversible / bireversible predicates, the Cayley
and twisted Cayley constructions over a finite monoid, inverse and dual
machines, state-word actions on finite words, canonical depth-d portraits
of those actions, and DOT / JSON serialization.
"""

from __future__ import annotations

import functools
import hashlib
import json
from typing import Sequence

from .algebra import FiniteMonoid, NotInvertible

# Portraits enumerate (implicitly) the action on all |L|**d words; refuse
# depths beyond this cap unless the caller raises it.
DEFAULT_PORTRAIT_CAP = 4**8

# A state word is a sequence of (state index, exponent) pairs with exponent
# +1 or -1; the rightmost entry acts first.  The empty word is the identity.
StateWord = tuple[tuple[int, int], ...]


class DepthTooLarge(ValueError):
    """A portrait would enumerate more than the configured cap of words."""


class MachineFormatError(ValueError):
    """A machine file or JSON object is malformed."""


class MealyMachine:
    """A letter-to-letter transducer (states, letters, output, transition).

    ``output[q][l]`` is the letter emitted and ``transition[q][l]`` the next
    state when state q reads letter l.  Instances are immutable.
    """

    __slots__ = ("state_names", "letter_names", "output", "transition")

    def __init__(
        self,
        state_names: Sequence[str],
        letter_names: Sequence[str],
        output: Sequence[Sequence[int]],
        transition: Sequence[Sequence[int]],
    ):
        self.state_names = tuple(str(s) for s in state_names)
        self.letter_names = tuple(str(l) for l in letter_names)
        nq, nl = len(self.state_names), len(self.letter_names)
        if nq == 0 or nl == 0:
            raise MachineFormatError("machine needs at least one state and letter")
        if len(set(self.state_names)) != nq:
            raise MachineFormatError("duplicate state names")
        if len(set(self.letter_names)) != nl:
            raise MachineFormatError("duplicate letter names")
        self.output = self._check_table(output, nq, nl, nl, "output")
        self.transition = self._check_table(transition, nq, nl, nq, "transition")

    @staticmethod
    def _check_table(table, nq, nl, bound, what) -> tuple[tuple[int, ...], ...]:
        if len(table) != nq:
            raise MachineFormatError(f"{what} table must have one row per state")
        rows = []
        for row in table:
            if len(row) != nl:
                raise MachineFormatError(f"{what} table row has wrong length")
            row = tuple(int(x) for x in row)
            if any(x < 0 or x >= bound for x in row):
                raise MachineFormatError(f"{what} table entry out of range")
            rows.append(row)
        return tuple(rows)

    @property
    def n_states(self) -> int:
        return len(self.state_names)

    @property
    def n_letters(self) -> int:
        return len(self.letter_names)

    def state_index(self, name: str) -> int:
        return self.state_names.index(name)

    def letter_index(self, name: str) -> int:
        return self.letter_names.index(name)

    def delta(self, q: int, l: int) -> tuple[int, int]:
        """The combined map (q, l) -> (output letter, next state)."""
        return self.output[q][l], self.transition[q][l]

    def is_invertible(self) -> bool:
        """Every output row is a permutation of the letters."""
        full = set(range(self.n_letters))
        return all(set(row) == full for row in self.output)

    def is_reversible(self) -> bool:
        """Every transition column is a permutation of the states."""
        full = set(range(self.n_states))
        return all(
            {self.transition[q][l] for q in range(self.n_states)} == full
            for l in range(self.n_letters)
        )

    def is_bireversible(self) -> bool:
        """Invertible, reversible, and (q,l) -> (out, next) is a bijection."""
        if not (self.is_invertible() and self.is_reversible()):
            return False
        seen = set()
        for q in range(self.n_states):
            for l in range(self.n_letters):
                seen.add(self.delta(q, l))
        return len(seen) == self.n_states * self.n_letters

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MealyMachine):
            return NotImplemented
        return (
            self.state_names == other.state_names
            and self.letter_names == other.letter_names
            and self.output == other.output
            and self.transition == other.transition
        )

    def __hash__(self) -> int:
        return hash((self.state_names, self.letter_names, self.output, self.transition))

    def __repr__(self) -> str:
        return f"MealyMachine({self.n_states} states, {self.n_letters} letters)"


def cayley_machine(M: FiniteMonoid) -> MealyMachine:
    """States = letters = M; both output and transition are m1*m2.

    For a nontrivial abelian group this machine generates the lamplighter
    group over it, but it is never bireversible; the twisted construction
    below repairs that while generating the same group.
    """
    table = M.table
    return MealyMachine(M.names, M.names, table, table)


def twisted_cayley_machine(M: FiniteMonoid) -> MealyMachine:
    """States = M, letters = M x M (lexicographic); output (a,(b,c)) is
    (a*b, a*b*c) and transition is a*c."""
    n = M.size
    op = M.table
    letter_names = [f"({M.names[b]},{M.names[c]})" for b in range(n) for c in range(n)]
    output = []
    transition = []
    for a in range(n):
        out_row = []
        tr_row = []
        for b in range(n):
            ab = op[a][b]
            for c in range(n):
                out_row.append(ab * n + op[ab][c])
                tr_row.append(op[a][c])
        output.append(out_row)
        transition.append(tr_row)
    return MealyMachine(M.names, letter_names, output, transition)


@functools.lru_cache(maxsize=None)
def inverse_machine(m: MealyMachine) -> MealyMachine:
    """The machine computing the inverse of every state action.

    State q of the result undoes state q of ``m``: its output row is the
    inverse permutation of m's, and it transitions on letter l the way m
    transitions on the preimage of l.
    """
    if not m.is_invertible():
        raise NotInvertible("machine has a non-bijective output row")
    output = []
    transition = []
    for q in range(m.n_states):
        row = m.output[q]
        inv_out = [0] * m.n_letters
        inv_tr = [0] * m.n_letters
        for l_in, l_out in enumerate(row):
            inv_out[l_out] = l_in
            inv_tr[l_out] = m.transition[q][l_in]
        output.append(inv_out)
        transition.append(inv_tr)
    return MealyMachine(m.state_names, m.letter_names, output, transition)


def dual_machine(m: MealyMachine) -> MealyMachine:
    """Swap the roles of states and letters through the combined map."""
    output = [[m.transition[q][l] for q in range(m.n_states)] for l in range(m.n_letters)]
    transition = [[m.output[q][l] for q in range(m.n_states)] for l in range(m.n_letters)]
    return MealyMachine(m.letter_names, m.state_names, output, transition)


def act(m: MealyMachine, q: int, word: Sequence[int]) -> tuple[int, ...]:
    """Run the machine from state q over a word of letter indices."""
    out = []
    output, transition = m.output, m.transition
    for l in word:
        out.append(output[q][l])
        q = transition[q][l]
    return tuple(out)


def act_word(m: MealyMachine, sw: Sequence[tuple[int, int]], word: Sequence[int]) -> tuple[int, ...]:
    """Apply a state word to a letter word; the rightmost entry acts first.

    Exponent -1 uses the inverse machine and requires invertibility.
    """
    result = tuple(word)
    minv: MealyMachine | None = None
    for q, e in reversed(list(sw)):
        if e == 1:
            result = act(m, q, result)
        elif e == -1:
            if minv is None:
                minv = inverse_machine(m)
            result = act(minv, q, result)
        else:
            raise ValueError(f"state-word exponent must be +1 or -1, got {e}")
    return result


class PortraitCalculator:
    """Canonical fingerprints for depth-d restrictions of state-word actions.

    Fingerprints are sha256 digests over the full action tree: two state
    words receive the same fingerprint exactly when they act identically on
    every word of the given length.  Memoization is shared across queries,
    so enumerating a ball of words is cheap.
    """

    _LEAF = b"leaf"

    def __init__(self, m: MealyMachine, cap: int = DEFAULT_PORTRAIT_CAP):
        self.machine = m
        self.cap = cap
        self._minv = inverse_machine(m) if m.is_invertible() else None
        self._step_memo: dict[tuple[StateWord, int], tuple[int, StateWord]] = {}
        self._fp_memo: dict[tuple[StateWord, int], bytes] = {}

    def check_depth(self, depth: int) -> None:
        if depth < 0:
            raise ValueError("depth must be nonnegative")
        if self.machine.n_letters**depth > self.cap:
            raise DepthTooLarge(
                f"{self.machine.n_letters}**{depth} words exceeds cap {self.cap}"
            )

    def _step(self, sw: StateWord, letter: int) -> tuple[int, StateWord]:
        """One letter through the whole state word: output letter and the
        residual state word acting on the remaining suffix."""
        key = (sw, letter)
        hit = self._step_memo.get(key)
        if hit is not None:
            return hit
        m, minv = self.machine, self._minv
        residual = [None] * len(sw)
        l = letter
        for i in range(len(sw) - 1, -1, -1):
            q, e = sw[i]
            if e == 1:
                out, nxt = m.output[q][l], m.transition[q][l]
            else:
                if minv is None:
                    raise NotInvertible("inverse exponents need an invertible machine")
                out, nxt = minv.output[q][l], minv.transition[q][l]
            residual[i] = (nxt, e)
            l = out
        value = (l, tuple(residual))
        self._step_memo[key] = value
        return value

    def _fp(self, sw: StateWord, depth: int) -> bytes:
        if depth == 0:
            return self._LEAF
        key = (sw, depth)
        hit = self._fp_memo.get(key)
        if hit is not None:
            return hit
        parts = []
        for letter in range(self.machine.n_letters):
            out, residual = self._step(sw, letter)
            parts.append(out.to_bytes(4, "big"))
            parts.append(self._fp(residual, depth - 1))
        digest = hashlib.sha256(b"".join(parts)).digest()
        self._fp_memo[key] = digest
        return digest

    def fingerprint(self, sw: Sequence[tuple[int, int]], depth: int) -> str:
        self.check_depth(depth)
        return self._fp(tuple(sw), depth).hex()

    def identity_fingerprint(self, depth: int) -> str:
        return self.fingerprint((), depth)

    def separating_depth(self, sw: Sequence[tuple[int, int]], max_depth: int) -> int | None:
        """Least depth at which sw acts differently from the identity, or
        None if it agrees with the identity up to max_depth."""
        sw = tuple(sw)
        for d in range(1, max_depth + 1):
            if self._fp(sw, d) != self._fp((), d):
                return d
        return None


def portrait(
    m: MealyMachine,
    sw: Sequence[tuple[int, int]],
    depth: int,
    cap: int = DEFAULT_PORTRAIT_CAP,
) -> str:
    """Fingerprint of the depth-d action of a state word (fresh memo)."""
    return PortraitCalculator(m, cap).fingerprint(sw, depth)


def _dot_quote(name: str) -> str:
    return '"' + name.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(m: MealyMachine) -> str:
    """Graphviz digraph: one node per state, edge q -> transition(q,l)
    labeled "l | output(q,l)", in deterministic order."""
    lines = ["digraph mealy {"]
    for name in m.state_names:
        lines.append(f"    {_dot_quote(name)};")
    for q in range(m.n_states):
        for l in range(m.n_letters):
            src = _dot_quote(m.state_names[q])
            dst = _dot_quote(m.state_names[m.transition[q][l]])
            label = _dot_quote(f"{m.letter_names[l]} | {m.letter_names[m.output[q][l]]}")
            lines.append(f"    {src} -> {dst} [label={label}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def machine_to_json(m: MealyMachine) -> str:
    """Canonical JSON: sorted keys, two-space indent, trailing newline."""
    obj = {
        "states": list(m.state_names),
        "letters": list(m.letter_names),
        "delta": [
            [
                {"out": m.output[q][l], "next": m.transition[q][l]}
                for l in range(m.n_letters)
            ]
            for q in range(m.n_states)
        ],
    }
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def machine_from_json(text: str) -> MealyMachine:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MachineFormatError(f"invalid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise MachineFormatError("machine JSON must be an object")
    try:
        states = obj["states"]
        letters = obj["letters"]
        delta = obj["delta"]
    except KeyError as exc:
        raise MachineFormatError(f"missing key {exc}") from exc
    if not isinstance(delta, list) or any(not isinstance(row, list) for row in delta):
        raise MachineFormatError("delta must be a list of rows")
    try:
        output = [[cell["out"] for cell in row] for row in delta]
        transition = [[cell["next"] for cell in row] for row in delta]
    except (TypeError, KeyError) as exc:
        raise MachineFormatError("delta cells must be {out, next} objects") from exc
    try:
        return MealyMachine(states, letters, output, transition)
    except MachineFormatError:
        raise
    except (TypeError, ValueError) as exc:
        raise MachineFormatError(str(exc)) from exc


def machine_fingerprint(m: MealyMachine) -> str:
    return hashlib.sha256(machine_to_json(m).encode()).hexdigest()
