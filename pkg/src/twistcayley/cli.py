"""Command-line surface: build, check, verify, ball, export.

Exit codes: 0 success / verified, 1 predicate false, 2 input error,
3 resource cap exceeded, 4 verification contradiction.  All commands are
deterministic given their inputs and --seed; reports serialize with sorted
keys and are byte-stable, so timing goes to stderr, never into a report.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time
from typing import Sequence

from . import __version__
from .algebra import FiniteAbelianGroup, FiniteMonoid, make_cyclic_product, random_unit_endo, random_endo
from .lamplighter import (
    LamplighterElement,
    generator,
    kernel_test,
    leading_lamp_recovery,
)
from .mealy import (
    DEFAULT_PORTRAIT_CAP,
    DepthTooLarge,
    MachineFormatError,
    MealyMachine,
    PortraitCalculator,
    cayley_machine,
    machine_fingerprint,
    machine_from_json,
    machine_to_json,
    to_dot,
    twisted_cayley_machine,
)
from .series import (
    AffineSeriesMap,
    EndoPoly,
    PairPoly,
    RationalEndoSeries,
    RationalPairSeries,
    check_series_realization,
    mu_of,
)

EXIT_OK = 0
EXIT_PREDICATE_FALSE = 1
EXIT_INPUT = 2
EXIT_CAP = 3
EXIT_CONTRADICTION = 4

DEFAULT_WINDOW_CAP = 4096
DEFAULT_WORD_CAP = 200_000
CONJUGATION_DEPTH = 8


class InputError(ValueError):
    """Bad command input: group spec, file, or format."""


def parse_group_spec(spec: str) -> FiniteAbelianGroup:
    """Parse "n1xn2x...xnk" into a product of cyclic groups."""
    parts = spec.strip().lower().split("x")
    try:
        factors = [int(p) for p in parts]
    except ValueError as exc:
        raise InputError(f"invalid group spec {spec!r}: {exc}") from exc
    try:
        return make_cyclic_product(factors)
    except ValueError as exc:
        raise InputError(f"invalid group spec {spec!r}: {exc}") from exc


def canonical_group_spec(A: FiniteAbelianGroup) -> str:
    return "x".join(str(n) for n in A.invariant_factors)


def load_monoid_json(path: str) -> FiniteMonoid:
    """Load a monoid from JSON: either a bare array-of-arrays (identity is
    found by scanning) or {"table": ..., "identity": ..., "names": ...}."""
    try:
        with open(path, encoding="utf-8") as fh:
            obj = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read monoid file {path}: {exc}") from exc
    names = None
    if isinstance(obj, dict):
        table = obj.get("table")
        identity = obj.get("identity")
        names = obj.get("names")
    else:
        table = obj
        identity = None
    if not isinstance(table, list):
        raise InputError("monoid JSON must be an array-of-arrays or {table: ...}")
    if identity is None:
        identity = _find_identity(table)
    try:
        return FiniteMonoid(table, identity, names)
    except ValueError as exc:
        raise InputError(f"invalid monoid table: {exc}") from exc


def _find_identity(table: list) -> int:
    n = len(table)
    for e in range(n):
        try:
            if all(table[e][x] == x and table[x][e] == x for x in range(n)):
                return e
        except (TypeError, IndexError) as exc:
            raise InputError(f"malformed monoid table: {exc}") from exc
    raise InputError("monoid table has no two-sided identity")


def load_machine(path: str) -> MealyMachine:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read machine file {path}: {exc}") from exc
    try:
        return machine_from_json(text)
    except MachineFormatError as exc:
        raise InputError(f"bad machine file {path}: {exc}") from exc


def render_report(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def write_report(report: dict, path: str | None) -> None:
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(render_report(report))


def _bool_str(b: bool) -> str:
    return "true" if b else "false"


# -- build -------------------------------------------------------------


def cmd_build(args) -> int:
    if args.monoid:
        monoid = load_monoid_json(args.monoid)
        label = f"monoid:{args.monoid}"
    else:
        A = parse_group_spec(args.group)
        monoid = A.as_monoid()
        label = canonical_group_spec(A)
    machine = twisted_cayley_machine(monoid) if args.kind == "twisted" else cayley_machine(monoid)
    text = machine_to_json(machine)
    # keep stdout pure JSON when no --out is given
    info = sys.stdout if args.out else sys.stderr
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    print(f"built {args.kind} machine for {label}", file=sys.stderr)
    print(f"states: {machine.n_states}", file=info)
    print(f"letters: {machine.n_letters}", file=info)
    return EXIT_OK


# -- check -------------------------------------------------------------


def cmd_check(args) -> int:
    machine = load_machine(args.machine)
    inv = machine.is_invertible()
    rev = machine.is_reversible()
    bir = machine.is_bireversible()
    print(f"invertible: {_bool_str(inv)}")
    print(f"reversible: {_bool_str(rev)}")
    print(f"bireversible: {_bool_str(bir)}")
    report = {
        "schema": 1,
        "command": "check",
        "tool_version": __version__,
        "machine_fingerprint": machine_fingerprint(machine),
        "predicates": {"invertible": inv, "reversible": rev, "bireversible": bir},
    }
    write_report(report, args.report)
    return EXIT_OK if bir else EXIT_PREDICATE_FALSE


# -- verify ------------------------------------------------------------


def _iter_words(n_letters: int, length: int):
    word = [0] * length
    while True:
        yield tuple(word)
        i = length - 1
        while i >= 0 and word[i] == n_letters - 1:
            word[i] = 0
            i -= 1
        if i < 0:
            return
        word[i] += 1


def _verify_recursion(A, machine, depth: int, samples: int, rng, cap: int) -> dict:
    n_letters = machine.n_letters
    total_words = sum(n_letters**k for k in range(1, depth + 1))
    exhaustive = total_words <= cap
    failures = []
    checked = 0
    for length in range(1, depth + 1):
        if exhaustive:
            words = _iter_words(n_letters, length)
        else:
            words = (
                tuple(rng.randrange(n_letters) for _ in range(length))
                for _ in range(samples)
            )
        for word in words:
            for a in A.elements():
                result = check_series_realization(A, a, word, machine)
                checked += 1
                if not result.ok and len(failures) < 5:
                    failures.append(
                        {
                            "state": a,
                            "word": list(word),
                            "diffs": [list(m) for m in result.mismatches[:4]],
                        }
                    )
    return {
        "mode": "exhaustive" if exhaustive else "sampled",
        "max_word_length": depth,
        "words_checked": checked,
        "failures": failures,
        "ok": not failures,
    }


def _random_rational_endo(A, rng) -> RationalEndoSeries:
    degree = rng.randrange(3)
    coeffs = [random_unit_endo(A, rng)]
    coeffs.extend(random_endo(A, rng) for _ in range(degree))
    return RationalEndoSeries(EndoPoly(A, coeffs), rng.randrange(3))


def _random_rational_pair(A, rng) -> RationalPairSeries:
    degree = rng.randrange(4)
    coeffs = [rng.randrange(A.pair_count) for _ in range(degree + 1)]
    return RationalPairSeries(PairPoly(A, coeffs), rng.randrange(3))


def _verify_conjugation(A, samples: int, rng, depth: int = CONJUGATION_DEPTH) -> dict:
    failures = 0
    for _ in range(samples):
        g = _random_rational_endo(A, rng)
        h = _random_rational_pair(A, rng)
        f = [rng.randrange(A.pair_count) for _ in range(depth + 1)]
        mu = mu_of(g)
        translated = AffineSeriesMap(RationalEndoSeries.one(A), h)
        step1 = mu.apply_inverse_trunc(f, depth)
        step2 = translated.apply_trunc(step1, depth)
        left = mu.apply_trunc(step2, depth)
        scaled = AffineSeriesMap(RationalEndoSeries.one(A), g.act_on(h))
        right = scaled.apply_trunc(f, depth)
        if left != right:
            failures += 1
    return {"samples": samples, "depth": depth, "failures": failures, "ok": failures == 0}


def _iter_lamp_configs(A, window: int):
    """All lamp configurations supported on positions 0..window."""
    order = A.order
    for word in _iter_words(order, window + 1):
        yield {pos: val for pos, val in enumerate(word) if val != 0}


def _verify_kernel(A, window: int) -> dict:
    failures = []
    configs = 0
    for lamps in _iter_lamp_configs(A, window):
        configs += 1
        in_kernel = kernel_test(A, lamps)
        if not lamps:
            if not in_kernel:
                failures.append({"lamps": {}, "reason": "empty config not in kernel"})
            continue
        if in_kernel:
            failures.append({"lamps": dict(lamps), "reason": "nonzero config in kernel"})
            continue
        top = max(lamps)
        expected = A.pair(lamps[top], lamps[top])
        got = leading_lamp_recovery(A, lamps)
        if got != expected:
            failures.append(
                {"lamps": dict(lamps), "reason": "recovery mismatch", "got": got, "expected": expected}
            )
    return {
        "window": [0, window],
        "configs": configs,
        "failures": failures[:5],
        "ok": not failures,
    }


def cmd_verify(args) -> int:
    A = parse_group_spec(args.group)
    if args.machine:
        machine = load_machine(args.machine)
        if machine.n_states != A.order or machine.n_letters != A.pair_count:
            raise InputError(
                f"machine shape ({machine.n_states} states, {machine.n_letters} letters)"
                f" does not match group {canonical_group_spec(A)}"
            )
    else:
        machine = twisted_cayley_machine(A.as_monoid())
    if machine.n_letters**args.depth > args.cap:
        print(
            f"cap exceeded: {machine.n_letters}**{args.depth} > {args.cap};"
            " lower --depth or raise --cap",
            file=sys.stderr,
        )
        return EXIT_CAP
    if A.order ** (args.window + 1) > args.window_cap:
        print(
            f"cap exceeded: {A.order}**{args.window + 1} > {args.window_cap};"
            " lower --window or raise --window-cap",
            file=sys.stderr,
        )
        return EXIT_CAP

    started = time.perf_counter()
    rng = random.Random(args.seed)
    predicates = {
        "invertible": machine.is_invertible(),
        "reversible": machine.is_reversible(),
        "bireversible": machine.is_bireversible(),
    }
    recursion = _verify_recursion(A, machine, args.depth, args.samples, rng, args.cap)
    conjugation = _verify_conjugation(A, args.samples, rng)
    kernel = _verify_kernel(A, args.window)
    ok = all(predicates.values()) and recursion["ok"] and conjugation["ok"] and kernel["ok"]
    report = {
        "schema": 1,
        "command": "verify",
        "tool_version": __version__,
        "group": canonical_group_spec(A),
        "machine_fingerprint": machine_fingerprint(machine),
        "machine_override": bool(args.machine),
        "seed": args.seed,
        "predicates": predicates,
        "recursion": recursion,
        "conjugation": conjugation,
        "kernel": kernel,
        "ok": ok,
    }
    write_report(report, args.report)
    elapsed = time.perf_counter() - started
    for section in ("predicates", "recursion", "conjugation", "kernel"):
        value = report[section]
        good = all(value.values()) if section == "predicates" else value["ok"]
        print(f"{section}: {'pass' if good else 'FAIL'}")
    print(f"verified: {_bool_str(ok)}")
    print(f"wall_clock_s: {elapsed:.3f}", file=sys.stderr)
    return EXIT_OK if ok else EXIT_CONTRADICTION


# -- ball --------------------------------------------------------------


def _ball_survey(A, radius: int, depth: int, cap: int, word_cap: int) -> tuple[dict, int]:
    machine = twisted_cayley_machine(A.as_monoid())
    calc = PortraitCalculator(machine, cap)
    calc.check_depth(depth)

    gens = [(a, e) for a in A.elements() for e in (1, -1)]
    gen_elements = {sig: generator(A, sig[0]) if sig[1] == 1 else generator(A, sig[0]).inverse() for sig in gens}

    fp_to_ll: dict[str, LamplighterElement] = {}
    ll_to_fp: dict[LamplighterElement, str] = {}
    disagreements = []
    separating: dict[int, int] = {}
    total_words = 0

    identity = LamplighterElement.identity(A)
    frontier: list[tuple[tuple, LamplighterElement]] = [((), identity)]
    spheres: dict[int, int] = {}
    for level in range(radius + 1):
        new_classes = 0
        next_frontier = []
        for word, element in frontier:
            total_words += 1
            if total_words > word_cap:
                return {"error": "word cap exceeded"}, EXIT_CAP
            fp = calc.fingerprint(word, depth)
            known_ll = fp_to_ll.get(fp)
            known_fp = ll_to_fp.get(element)
            if known_ll is None and known_fp is None:
                fp_to_ll[fp] = element
                ll_to_fp[element] = fp
                new_classes += 1
                if not element.is_identity():
                    d = calc.separating_depth(word, depth)
                    if d is not None:
                        separating[d] = separating.get(d, 0) + 1
            else:
                if known_ll is not None and known_ll != element:
                    disagreements.append(
                        {"word": [list(g) for g in word], "kind": "portrait merges distinct elements"}
                    )
                if known_fp is not None and known_fp != fp:
                    disagreements.append(
                        {"word": [list(g) for g in word], "kind": "element has two portraits"}
                    )
            if level < radius:
                last = word[-1] if word else None
                for sig in gens:
                    if last is not None and last[0] == sig[0] and last[1] == -sig[1]:
                        continue
                    next_frontier.append((word + (sig,), element * gen_elements[sig]))
        spheres[level] = new_classes
        frontier = next_frontier

    oracle = _element_bfs(A, radius)
    sphere_match = all(spheres.get(k, 0) == oracle.get(k, 0) for k in range(radius + 1))

    agreement = not disagreements and sphere_match
    report = {
        "schema": 1,
        "command": "ball",
        "tool_version": __version__,
        "group": canonical_group_spec(A),
        "machine_fingerprint": machine_fingerprint(machine),
        "radius": radius,
        "depth": depth,
        "spheres": {str(k): spheres.get(k, 0) for k in range(radius + 1)},
        "oracle_spheres": {str(k): oracle.get(k, 0) for k in range(radius + 1)},
        "classes": len(fp_to_ll),
        "separating_depths": {str(k): v for k, v in sorted(separating.items())},
        "disagreements": disagreements[:5],
        "agreement": agreement,
    }
    return report, EXIT_OK if agreement else EXIT_CONTRADICTION


def _element_bfs(A, radius: int) -> dict[int, int]:
    """Independent sphere sizes by BFS over lamplighter normal forms."""
    gens = []
    for a in A.elements():
        gens.append(generator(A, a))
        gens.append(generator(A, a).inverse())
    identity = LamplighterElement.identity(A)
    visited = {identity}
    frontier = {identity}
    spheres = {0: 1}
    for level in range(1, radius + 1):
        nxt = set()
        for v in frontier:
            for g in gens:
                w = v * g
                if w not in visited:
                    nxt.add(w)
        visited |= nxt
        spheres[level] = len(nxt)
        frontier = nxt
    return spheres


def cmd_ball(args) -> int:
    A = parse_group_spec(args.group)
    started = time.perf_counter()
    try:
        report, code = _ball_survey(A, args.radius, args.depth, args.cap, args.word_cap)
    except DepthTooLarge as exc:
        print(f"cap exceeded: {exc}; raise --cap or lower --depth", file=sys.stderr)
        return EXIT_CAP
    if code == EXIT_CAP:
        print("cap exceeded: too many words in the ball; raise --word-cap", file=sys.stderr)
        return EXIT_CAP
    write_report(report, args.report)
    elapsed = time.perf_counter() - started
    for k in range(args.radius + 1):
        print(f"sphere {k}: {report['spheres'][str(k)]}")
    print(f"agreement: {_bool_str(report['agreement'])}")
    print(f"wall_clock_s: {elapsed:.3f}", file=sys.stderr)
    return code


# -- export ------------------------------------------------------------


def cmd_export(args) -> int:
    machine = load_machine(args.machine)
    if args.format == "dot":
        text = to_dot(machine)
    elif args.format == "json":
        text = machine_to_json(machine)
    else:
        raise InputError(f"unknown format {args.format!r}")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


# -- argument plumbing ---------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="twistcayley",
        description="Build Cayley-style Mealy machines and verify the lamplighter structure of their groups.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="construct a machine and write it as JSON")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--group", help="abelian group spec, e.g. 2 or 2x3")
    group.add_argument("--monoid", help="path to a monoid multiplication table (JSON)")
    p.add_argument("--kind", choices=["cayley", "twisted"], default="twisted")
    p.add_argument("--out", help="output path (stdout if omitted)")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("check", help="run the three reversibility predicates")
    p.add_argument("--machine", required=True, help="machine JSON path")
    p.add_argument("--report", help="write a JSON report here")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("verify", help="verify series realization, conjugation, and kernel triviality")
    p.add_argument("--group", required=True)
    p.add_argument("--machine", help="override the twisted Cayley machine under test")
    p.add_argument("--depth", type=int, default=4, help="max word length for the recursion check")
    p.add_argument("--window", type=int, default=3, help="kernel window is positions 0..WINDOW")
    p.add_argument("--samples", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cap", type=int, default=DEFAULT_PORTRAIT_CAP)
    p.add_argument("--window-cap", type=int, default=DEFAULT_WINDOW_CAP)
    p.add_argument("--report", help="write a JSON report here")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("ball", help="compare word portraits against lamplighter normal forms on a ball")
    p.add_argument("--group", required=True)
    p.add_argument("--radius", type=int, default=4)
    p.add_argument("--depth", type=int, default=6, help="portrait depth")
    p.add_argument("--cap", type=int, default=DEFAULT_PORTRAIT_CAP)
    p.add_argument("--word-cap", type=int, default=DEFAULT_WORD_CAP)
    p.add_argument("--report", help="write a JSON report here")
    p.set_defaults(func=cmd_ball)

    p = sub.add_parser("export", help="print a machine as DOT or canonical JSON")
    p.add_argument("--machine", required=True)
    p.add_argument("--format", choices=["dot", "json"], default="dot")
    p.add_argument("--out", help="output path (stdout if omitted)")
    p.set_defaults(func=cmd_export)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except DepthTooLarge as exc:
        print(f"cap exceeded: {exc}", file=sys.stderr)
        return EXIT_CAP


def entrypoint() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entrypoint()
