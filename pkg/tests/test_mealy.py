"""Machine constructions, predicates, actions, portraits, serialization."""

import itertools
import re

import pytest

from twistcayley.algebra import NotInvertible, make_cyclic_product, monoid_from_table
from twistcayley.mealy import (
    DepthTooLarge,
    MachineFormatError,
    MealyMachine,
    PortraitCalculator,
    act,
    act_word,
    cayley_machine,
    dual_machine,
    inverse_machine,
    machine_from_json,
    machine_to_json,
    portrait,
    to_dot,
    twisted_cayley_machine,
)

Z2 = make_cyclic_product([2])
Z3 = make_cyclic_product([3])

TC2 = twisted_cayley_machine(Z2.as_monoid())
TC3 = twisted_cayley_machine(Z3.as_monoid())

IDENTITY_MACHINE = MealyMachine(["q"], ["a", "b"], [[0, 1]], [[0, 0]])


def parse_dot(text):
    """Minimal structural parser for the DOT subset we emit: digraph with
    quoted node statements and quoted edges carrying a label attribute.
    Returns (nodes, edges) where edges are (src, dst, label)."""
    lines = [line.strip() for line in text.strip().splitlines()]
    assert re.fullmatch(r"digraph\s+\w+\s*\{", lines[0]), lines[0]
    assert lines[-1] == "}"
    quoted = r'"((?:[^"\\]|\\.)*)"'
    node_re = re.compile(rf"{quoted};")
    edge_re = re.compile(rf"{quoted}\s*->\s*{quoted}\s*\[label={quoted}\];")
    nodes, edges = [], []
    for line in lines[1:-1]:
        m = edge_re.fullmatch(line)
        if m:
            edges.append((m.group(1), m.group(2), m.group(3)))
            continue
        m = node_re.fullmatch(line)
        assert m, f"unparseable DOT line: {line!r}"
        nodes.append(m.group(1))
    return nodes, edges


class TestPredicates:
    def test_twisted_machines_bireversible(self):
        for A in (Z2, Z3, make_cyclic_product([4]), make_cyclic_product([2, 2]), make_cyclic_product([6])):
            m = twisted_cayley_machine(A.as_monoid())
            assert m.is_invertible()
            assert m.is_reversible()
            assert m.is_bireversible()

    def test_cayley_machines_not_bireversible(self):
        for A in (Z2, Z3):
            c = cayley_machine(A.as_monoid())
            assert c.is_invertible()
            assert c.is_reversible()
            assert not c.is_bireversible()

    def test_identity_machine_bireversible(self):
        assert IDENTITY_MACHINE.is_bireversible()

    def test_constant_output_row_not_invertible(self):
        m = MealyMachine(["p"], ["a", "b"], [[0, 0]], [[0, 0]])
        assert not m.is_invertible()

    def test_state_independent_transition_not_reversible(self):
        m = MealyMachine(["p", "q"], ["a"], [[0], [0]], [[0], [0]])
        assert not m.is_reversible()

    def test_non_group_monoid_constructs(self):
        # min(x, y) with identity 1: predicates run, nothing asserted about truth
        m = monoid_from_table([[0, 0], [0, 1]], 1)
        tc = twisted_cayley_machine(m)
        assert tc.n_states == 2 and tc.n_letters == 4
        assert isinstance(tc.is_bireversible(), bool)


class TestConstructions:
    def test_cayley_trivial(self):
        m = cayley_machine(monoid_from_table([[0]], 0))
        assert m.n_states == m.n_letters == 1
        assert m.output == ((0,),) and m.transition == ((0,),)

    def test_cayley_z2_entry(self):
        c = cayley_machine(Z2.as_monoid())
        assert c.output[1][1] == 0 and c.transition[1][1] == 0

    def test_twisted_sizes(self, corpus_groups):
        for g in corpus_groups:
            tc = twisted_cayley_machine(g)
            assert tc.n_states == g.size
            assert tc.n_letters == g.size**2

    def test_twisted_z2_entries(self):
        # output(1,(1,1)) = (0,1); transition(1,(1,1)) = 0
        l11 = Z2.pair(1, 1)
        assert TC2.output[1][l11] == Z2.pair(0, 1)
        assert TC2.transition[1][l11] == 0

    def test_twisted_state_zero_not_identity(self):
        # state 0 maps (b,c) to (b, b+c): not the identity transformation
        for b in range(2):
            for c in range(2):
                letter = Z2.pair(b, c)
                assert TC2.output[0][letter] == Z2.pair(b, (b + c) % 2)
                assert TC2.transition[0][letter] == c
        assert TC2.output[0][Z2.pair(1, 1)] != Z2.pair(1, 1)

    def test_letter_enumeration_lexicographic(self):
        assert TC2.letter_names == ("(0,0)", "(0,1)", "(1,0)", "(1,1)")


class TestInverseMachine:
    def test_inverse_formula_for_groups(self, corpus_groups):
        # output of the inverse at state a maps (b,c) to (a^-1 b, b^-1 c)
        for g in corpus_groups:
            tc = twisted_cayley_machine(g)
            inv = inverse_machine(tc)
            n = g.size
            for a in range(n):
                a_inv = g.inverse(a)
                for b in range(n):
                    b_inv = g.inverse(b)
                    for c in range(n):
                        letter = b * n + c
                        expected = g.op(a_inv, b) * n + g.op(b_inv, c)
                        assert inv.output[a][letter] == expected

    def test_identity_machine_self_inverse(self):
        assert inverse_machine(IDENTITY_MACHINE) == IDENTITY_MACHINE

    def test_round_trip_exhaustive_z2(self):
        # exhaustive for |L| = 4 up to length 5
        inv = inverse_machine(TC2)
        for q in range(TC2.n_states):
            for length in range(6):
                for w in itertools.product(range(TC2.n_letters), repeat=length):
                    assert act(inv, q, act(TC2, q, w)) == w
                    assert act(TC2, q, act(inv, q, w)) == w

    def test_round_trip_sampled_z3(self):
        import random

        rng = random.Random(11)
        inv = inverse_machine(TC3)
        for _ in range(200):
            q = rng.randrange(TC3.n_states)
            w = tuple(rng.randrange(TC3.n_letters) for _ in range(rng.randrange(6)))
            assert act(inv, q, act(TC3, q, w)) == w

    def test_not_invertible(self):
        m = MealyMachine(["p"], ["a", "b"], [[0, 0]], [[0, 0]])
        with pytest.raises(NotInvertible):
            inverse_machine(m)


class TestDualMachine:
    def test_involution(self):
        for m in (TC2, TC3, IDENTITY_MACHINE):
            assert dual_machine(dual_machine(m)) == m

    def test_dual_of_bireversible_is_invertible_and_reversible(self, corpus_groups):
        for g in corpus_groups:
            d = dual_machine(twisted_cayley_machine(g))
            assert d.is_invertible()
            assert d.is_reversible()

    def test_dual_identity_machine(self):
        d = dual_machine(IDENTITY_MACHINE)
        assert d.n_states == 2 and d.n_letters == 1
        # self-loops with identity output, up to the role swap
        assert d.output == ((0,), (0,))


class TestAct:
    def test_two_step_action_from_state_one(self):
        w = (Z2.pair(1, 0), Z2.pair(0, 0))
        assert act(TC2, 1, w) == (Z2.pair(0, 0), Z2.pair(1, 1))

    def test_two_step_action_from_state_zero(self):
        w = (Z2.pair(1, 0), Z2.pair(0, 0))
        assert act(TC2, 0, w) == (Z2.pair(1, 1), Z2.pair(0, 0))

    def test_empty_word(self):
        assert act(TC2, 0, ()) == ()
        assert act_word(TC2, [(1, 1), (0, -1)], ()) == ()

    def test_act_word_rightmost_first(self):
        w = (Z2.pair(0, 0),)
        # [(1,+1),(0,+1)] applies state 0 first, then state 1
        inner = act(TC2, 0, w)
        assert act_word(TC2, [(1, 1), (0, 1)], w) == act(TC2, 1, inner) == (Z2.pair(1, 1),)

    def test_act_word_empty_stateword(self):
        w = (1, 2, 3)
        assert act_word(TC2, (), w) == w

    def test_act_word_inverse_cancels(self):
        for q in range(2):
            for length in range(7):
                for w in itertools.islice(
                    itertools.product(range(4), repeat=length), 64
                ):
                    assert act_word(TC2, [(q, 1), (q, -1)], w) == w
                    assert act_word(TC2, [(q, -1), (q, 1)], w) == w


class TestPortrait:
    def test_identity_equals_cancelling_word(self):
        for d in range(4):
            assert portrait(TC2, (), d) == portrait(TC2, [(0, 1), (0, -1)], d)

    def test_states_differ_at_depth_one(self):
        assert portrait(TC2, [(0, 1)], 1) != portrait(TC2, [(1, 1)], 1)

    def test_commutation_pair_matches_brute_force(self):
        # fingerprint equality must coincide with actionwise equality
        left, right = [(0, 1), (1, 1)], [(1, 1), (0, 1)]
        depth = 3
        same_fp = portrait(TC2, left, depth) == portrait(TC2, right, depth)
        same_action = all(
            act_word(TC2, left, w) == act_word(TC2, right, w)
            for w in itertools.product(range(4), repeat=depth)
        )
        assert same_fp == same_action

    def test_fingerprint_equality_matches_action_equality(self):
        import random

        rng = random.Random(2)
        calc = PortraitCalculator(TC2)
        words = [
            tuple((rng.randrange(2), rng.choice([1, -1])) for _ in range(rng.randrange(4)))
            for _ in range(30)
        ]
        depth = 3
        all_inputs = list(itertools.product(range(4), repeat=depth))
        for u in words:
            for v in words:
                same_fp = calc.fingerprint(u, depth) == calc.fingerprint(v, depth)
                same_action = all(act_word(TC2, u, w) == act_word(TC2, v, w) for w in all_inputs)
                assert same_fp == same_action

    def test_refinement(self):
        import random

        rng = random.Random(4)
        calc = PortraitCalculator(TC2)
        words = [
            tuple((rng.randrange(2), rng.choice([1, -1])) for _ in range(rng.randrange(5)))
            for _ in range(40)
        ]
        for d in range(1, 4):
            for u in words:
                for v in words:
                    if calc.fingerprint(u, d) != calc.fingerprint(v, d):
                        assert calc.fingerprint(u, d + 1) != calc.fingerprint(v, d + 1)

    def test_depth_cap(self):
        with pytest.raises(DepthTooLarge):
            portrait(TC2, [(0, 1)], 9)  # 4**9 > 4**8
        # explicit cap override allows it
        assert portrait(TC2, [(0, 1)], 9, cap=4**9)

    def test_deterministic_across_calculators(self):
        a = PortraitCalculator(TC2).fingerprint([(1, 1), (0, -1)], 4)
        b = PortraitCalculator(TC2).fingerprint([(1, 1), (0, -1)], 4)
        assert a == b


class TestDot:
    def test_identity_machine_self_loops(self):
        nodes, edges = parse_dot(to_dot(IDENTITY_MACHINE))
        assert nodes == ["q"]
        assert len(edges) == 2
        assert all(src == dst == "q" for src, dst, _ in edges)

    def test_tc2_counts(self):
        nodes, edges = parse_dot(to_dot(TC2))
        assert len(nodes) == 2
        assert len(edges) == 8

    def test_labels_pair_input_output(self):
        _, edges = parse_dot(to_dot(TC2))
        src, dst, label = edges[0]
        assert " | " in label

    def test_quoting(self):
        m = MealyMachine(['a"b', "c"], ["x"], [[0], [0]], [[0], [1]])
        nodes, _ = parse_dot(to_dot(m))
        assert nodes == ['a\\"b', "c"]

    def test_deterministic(self):
        assert to_dot(TC3) == to_dot(twisted_cayley_machine(Z3.as_monoid()))


class TestJson:
    def test_round_trip_byte_identical(self):
        text = machine_to_json(TC3)
        again = machine_to_json(machine_from_json(text))
        assert text == again

    def test_round_trip_equality(self, corpus_groups):
        for g in corpus_groups:
            m = twisted_cayley_machine(g)
            assert machine_from_json(machine_to_json(m)) == m

    def test_malformed(self):
        with pytest.raises(MachineFormatError):
            machine_from_json("not json")
        with pytest.raises(MachineFormatError):
            machine_from_json('{"states": ["a"], "letters": ["x"]}')
        with pytest.raises(MachineFormatError):
            machine_from_json('{"states": ["a"], "letters": ["x"], "delta": [[{"out": 5, "next": 0}]]}')
        with pytest.raises(MachineFormatError):
            machine_from_json('{"states": ["a", "a"], "letters": ["x"], "delta": [[{"out": 0, "next": 0}], [{"out": 0, "next": 0}]]}')


class TestValidation:
    def test_table_shape_checked(self):
        with pytest.raises(MachineFormatError):
            MealyMachine(["p"], ["a", "b"], [[0]], [[0, 0]])
        with pytest.raises(MachineFormatError):
            MealyMachine(["p"], ["a"], [[0]], [[1]])
