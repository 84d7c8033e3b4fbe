"""Shared fixtures: reference systems and a deterministic random corpus."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

import pytest

from freedecomp import (
    FactorSystem,
    IndexBoundExceeded,
    Word,
    build_core,
    canonicalize,
    complete_graph,
    cyclic,
    make_system,
    normalize,
    parse_word,
    sym,
)
from freedecomp.covgraph import CoreGraph

Z2 = cyclic(2)
Z3 = cyclic(3)
Z4 = cyclic(4)
S3 = sym(3)
TRIV = cyclic(1)


def sign_map_s3() -> list[int]:
    perms = sorted(itertools.permutations(range(3)))
    return [sum(1 for i in range(3) for j in range(i + 1, 3) if p[i] > p[j]) % 2 for p in perms]


@pytest.fixture(scope="session")
def sys_a() -> FactorSystem:
    """G = Z2 * Z2, B = Z2 * 1, first map identity, second trivial."""
    return make_system([Z2, Z2], [Z2, TRIV], [[0, 1], [0, 0]])


@pytest.fixture(scope="session")
def sys_a_gens(sys_a) -> list[Word]:
    return [parse_word(sys_a, "G", "0:1"), parse_word(sys_a, "G", "1:1 0:1 1:1")]


@pytest.fixture(scope="session")
def sys_b() -> FactorSystem:
    """G = Z2 * Z3 with the identity system on the B side."""
    return make_system([Z2, Z3], [Z2, Z3], [[0, 1], [0, 1, 2]])


@pytest.fixture(scope="session")
def sys_b_gens(sys_b) -> list[Word]:
    # kernel of G -> Z3 (a |-> 0, b |-> 1)
    return [parse_word(sys_b, "G", w) for w in ("0:1", "1:1 0:1 1:2", "1:2 0:1 1:1")]


@pytest.fixture(scope="session")
def sys_phase2() -> FactorSystem:
    """Same shape as sys_a; paired with an index-3 subgroup that forces the
    transversal search past single kernel edges."""
    return make_system([Z2, Z2], [Z2, TRIV], [[0, 1], [0, 0]])


@pytest.fixture(scope="session")
def sys_phase2_gens(sys_phase2) -> list[Word]:
    return [parse_word(sys_phase2, "G", "0:1"), parse_word(sys_phase2, "G", "1:1 0:1 1:1 0:1 1:1")]


@dataclass(frozen=True)
class Instance:
    system: FactorSystem
    gens: tuple[Word, ...]
    graph: CoreGraph  # complete, canonical


def _theta_options(g):
    opts = [(g, list(range(g.order))), (TRIV, [0] * g.order)]
    if g.name == "Z4":
        opts.append((Z2, [0, 1, 0, 1]))
    if g.name == "S3":
        opts.append((Z2, sign_map_s3()))
    return opts


def _random_raw_word(rnd: random.Random, factors, maxlen: int):
    length = rnd.randint(1, maxlen)
    syls = []
    prev = -1
    for _ in range(length):
        lam = rnd.choice([i for i in range(len(factors)) if i != prev or len(factors) == 1])
        syls.append((lam, rnd.randint(1, factors[lam].order - 1)))
        prev = lam
    return syls


def make_corpus(seed: int, count: int, max_index: int = 12) -> list[Instance]:
    """Deterministic corpus of systems with finite-index subgroups.

    Factors are drawn from {Z2, Z3, Z4, S3} with at most three factors; the
    factor maps mix identities, collapses and proper quotients.  Systems
    whose subgroup exceeds ``max_index`` are resampled.
    """
    pool = [Z2, Z2, Z2, Z3, Z3, Z4, S3]
    rnd = random.Random(seed)
    out: list[Instance] = []
    while len(out) < count:
        nf = rnd.randint(1, 3)
        factors = [rnd.choice(pool) for _ in range(nf)]
        if sum(g.order - 1 for g in factors) > 10:
            continue
        picks = [rnd.choice(_theta_options(g)) for g in factors]
        system = make_system(factors, [p[0] for p in picks], [p[1] for p in picks])
        k = rnd.randint(1, 3)
        gens = tuple(
            w for w in (normalize(system, "G", _random_raw_word(rnd, factors, 4)) for _ in range(k)) if w
        )
        try:
            graph = complete_graph(system, build_core(system, gens), 5 * max_index)
        except IndexBoundExceeded:
            continue
        if graph.vertex_count > max_index:
            continue
        out.append(Instance(system=system, gens=gens, graph=canonicalize(graph)))
    return out


@pytest.fixture(scope="session")
def corpus() -> list[Instance]:
    return make_corpus(seed=20250810, count=210)


@pytest.fixture(scope="session")
def small_corpus(corpus) -> list[Instance]:
    return corpus[:40]


def enumerate_ball(system: FactorSystem, maxlen: int):
    """All normal-form words over G of syllable length <= maxlen."""
    factors = system.factors_g
    yield ()
    frontier: list[Word] = [()]
    for _ in range(maxlen):
        nxt = []
        for w in frontier:
            last = w[-1][0] if w else -1
            for lam in range(len(factors)):
                if lam == last:
                    continue
                for e in range(1, factors[lam].order):
                    nw = w + ((lam, e),)
                    nxt.append(nw)
                    yield nw
        frontier = nxt
