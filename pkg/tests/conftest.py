"""Shared fixtures: the group corpus (abelian by invariant factors,
nonabelian by explicit tables) used across the suite."""

from __future__ import annotations

import itertools

import pytest
from hypothesis import HealthCheck, settings

from twistcayley.algebra import FiniteMonoid, make_cyclic_product

settings.register_profile(
    "det", derandomize=True, max_examples=50, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("det")


ABELIAN_CORPUS = [
    [2],
    [3],
    [4],
    [2, 2],
    [5],
    [6],
    [2, 2, 2],
    [8],
    [2, 4],
]


def monoid_from_permutations(perms: list[tuple[int, ...]], names=None) -> FiniteMonoid:
    """Group table from a closed set of permutations; composition applies
    the right factor first."""
    perms = sorted(set(perms))
    index = {p: i for i, p in enumerate(perms)}
    n = len(perms[0])
    identity = index[tuple(range(n))]
    table = [
        [index[tuple(p[q[x]] for x in range(n))] for q in perms]
        for p in perms
    ]
    return FiniteMonoid(table, identity, names)


def symmetric_group_3() -> FiniteMonoid:
    perms = [tuple(p) for p in itertools.permutations(range(3))]
    return monoid_from_permutations(perms)


def dihedral_group_4() -> FiniteMonoid:
    """Symmetries of the square as vertex permutations (order 8)."""
    perms = []
    for k in range(4):
        perms.append(tuple((x + k) % 4 for x in range(4)))
        perms.append(tuple((k - x) % 4 for x in range(4)))
    return monoid_from_permutations(perms)


def quaternion_group() -> FiniteMonoid:
    """The quaternion units {+-1, +-i, +-j, +-k}; index = 2*axis + sign bit."""
    # axis 0 is the scalar 1; axes 1..3 are i, j, k
    cross = {
        (1, 2): (1, 3),
        (2, 3): (1, 1),
        (3, 1): (1, 2),
        (2, 1): (-1, 3),
        (3, 2): (-1, 1),
        (1, 3): (-1, 2),
    }

    def mul(x, y):
        sx, ax = x
        sy, ay = y
        if ax == 0:
            return (sx * sy, ay)
        if ay == 0:
            return (sx * sy, ax)
        if ax == ay:
            return (-sx * sy, 0)
        s, az = cross[(ax, ay)]
        return (s * sx * sy, az)

    elements = [(s, a) for a in range(4) for s in (1, -1)]
    index = {e: i for i, e in enumerate(elements)}
    table = [[index[mul(x, y)] for y in elements] for x in elements]
    names = ["1", "-1", "i", "-i", "j", "-j", "k", "-k"]
    return FiniteMonoid(table, index[(1, 0)], names)


def nonabelian_corpus() -> list[FiniteMonoid]:
    return [symmetric_group_3(), dihedral_group_4(), quaternion_group()]


def group_corpus() -> list[FiniteMonoid]:
    """All corpus groups of order <= 8 as monoids."""
    corpus = [make_cyclic_product(f).as_monoid() for f in ABELIAN_CORPUS]
    corpus.extend(nonabelian_corpus())
    return corpus


@pytest.fixture(scope="session")
def corpus_groups() -> list[FiniteMonoid]:
    return group_corpus()


@pytest.fixture(scope="session")
def abelian_groups():
    return [make_cyclic_product(f) for f in ABELIAN_CORPUS]
