"""Independent verification of decomposition certificates.

Checks C1-C6 are exact; C7 searches for free-product relations up to a
letter bound and is reported as bounded evidence, not proof.  The
double-coset and membership oracles here deliberately avoid the spanning
tree and Schreier machinery: orbits are computed directly on the coset
graph and membership by breadth-first search over generator products.
"""

from __future__ import annotations

import random
import time
from collections import deque
from dataclasses import dataclass
from typing import TYPE_CHECKING

from .covgraph import (
    CoreGraph,
    GraphNotComplete,
    IndexBoundExceeded,
    build_core,
    canonical_encoding,
    canonicalize,
    complete_graph,
    membership,
    trace,
)
from .fingroup import subgroup_closure
from .freeprod import EMPTY, FactorSystem, Word, invert, is_normal_form, multiply, theta_word
from .kurosh import kurosh_decompose, kurosh_invariants, merge_invariants

if TYPE_CHECKING:  # pragma: no cover
    from .conjecture import ConjectureCertificate


class MalformedCertificate(ValueError):
    pass


@dataclass(frozen=True)
class CheckResult:
    name: str
    status: str  # "pass" | "fail" | "skipped"
    details: str
    elapsed_ms: float


@dataclass(frozen=True)
class VerificationReport:
    checks: tuple[CheckResult, ...]
    verdict: bool

    def summary(self) -> str:
        lines = [
            f"{c.name}: {c.status} ({c.elapsed_ms:.1f} ms) {c.details}".rstrip()
            for c in self.checks
        ]
        lines.append(f"verdict: {'pass' if self.verdict else 'FAIL'}")
        return "\n".join(lines)


def brute_force_double_cosets(sys: FactorSystem, graph: CoreGraph, lam: int) -> list[tuple[int, ...]]:
    """Orbits of the factor-lam action on the cosets of the complete graph.

    Orbits are in bijection with the double cosets of the factor against the
    subgroup; returned sorted by smallest vertex, so indices are canonical ids.
    """
    if not graph.complete:
        raise GraphNotComplete("double-coset orbits need the full coset graph")
    group = sys.factors_g[lam]
    seen = set()
    orbits = []
    for start in range(graph.vertex_count):
        if start in seen:
            continue
        orbit = [start]
        seen.add(start)
        qi = 0
        while qi < len(orbit):
            u = orbit[qi]
            qi += 1
            for g in range(1, group.order):
                v = graph.action[u][(lam, g)]
                if v not in seen:
                    seen.add(v)
                    orbit.append(v)
        orbits.append(tuple(sorted(orbit)))
    return orbits


def brute_force_members(
    sys: FactorSystem,
    h_gens,
    limit: int | None = None,
    *,
    length_cap: int | None = None,
    state_budget: int = 1_000_000,
    targets=None,
) -> tuple[frozenset[Word], bool]:
    """Products of at most ``limit`` generators/inverses, as normal forms.

    ``length_cap`` prunes products whose normal form grows beyond the cap
    (making the closure finite even without a depth limit), ``targets`` stops
    the search early once every target word has appeared.  Returns the set
    and whether the search ran to completion within the state budget.
    """
    letters = []
    for w in h_gens:
        w = tuple(w)
        if w and w not in letters:
            letters.append(w)
        wi = invert(sys, "G", w)
        if wi and wi not in letters:
            letters.append(wi)
    found = {EMPTY}
    frontier = [EMPTY]
    remaining = set(targets) - found if targets is not None else None
    exhausted = True
    depth = 0
    while frontier and (limit is None or depth < limit):
        if remaining is not None and not remaining:
            break
        nxt = []
        for u in frontier:
            for a in letters:
                v = multiply(sys, "G", u, a)
                if length_cap is not None and len(v) > length_cap:
                    continue
                if v not in found:
                    found.add(v)
                    nxt.append(v)
                    if remaining is not None:
                        remaining.discard(v)
            if len(found) > state_budget:
                exhausted = False
                break
        if not exhausted:
            break
        frontier = nxt
        depth += 1
    return frozenset(found), exhausted


def brute_force_membership(sys: FactorSystem, h_gens, w: Word, limit: int) -> bool:
    """True iff ``w`` equals some product of at most ``limit`` generators."""
    w = tuple(w)
    if w == EMPTY:
        return True
    members, _ = brute_force_members(sys, h_gens, limit, targets={w})
    return w in members


def generation_check(sys: FactorSystem, reference: CoreGraph, words, max_cosets: int) -> tuple[bool, str]:
    """Do ``words`` generate exactly the subgroup of ``reference``?"""
    try:
        regraph = complete_graph(sys, build_core(sys, tuple(words)), max_cosets)
    except IndexBoundExceeded:
        return False, "regenerated subgroup exceeds the coset bound"
    same = canonical_encoding(regraph) == canonical_encoding(reference)
    return same, "" if same else "regenerated coset graph differs"


def additivity_check(sys: FactorSystem, graph: CoreGraph, per_lambda_words) -> tuple[bool, str]:
    """Compare the decomposition fingerprint of the whole subgroup with the
    merged fingerprints of the per-factor subgroups."""
    whole = kurosh_invariants(sys, kurosh_decompose(sys, graph))
    parts = []
    for words in per_lambda_words:
        if not words:
            continue
        core = canonicalize(build_core(sys, tuple(words)))
        parts.append(kurosh_invariants(sys, kurosh_decompose(sys, core)))
    merged = merge_invariants(parts)
    if whole == merged:
        return True, ""
    return False, f"fingerprints differ: whole={whole} merged={merged}"


def freeness_search(
    sys: FactorSystem,
    parts: list[tuple[str, list[Word]]],
    max_letters: int,
    budget: int = 200_000,
    seed: int = 0,
    samples: int = 2_000,
) -> tuple[list[Word] | None, bool, int]:
    """Search for an alternating product of nontrivial part elements that
    collapses to the identity.

    Breadth-first over (last part, running product) states with
    deduplication; exhaustive for products of up to ``max_letters`` letters
    when the budget is not hit, otherwise topped up with seeded random
    sampling.  Returns (witness letters or None, exhaustive?, states explored).
    """
    for pid, letters in parts:
        for w in letters:
            if not w:
                return [w], True, 0  # a trivial letter is itself a relation
    letter_sets = []
    for pid, letters in parts:
        unique = []
        for w in letters:
            if w not in unique:
                unique.append(w)
        letter_sets.append((pid, unique))
    start: list[tuple[int, Word, tuple[Word, ...]]] = []
    for i, (_, letters) in enumerate(letter_sets):
        for w in letters:
            start.append((i, w, (w,)))
    seen: set[tuple[int, Word]] = set()
    queue = deque()
    for i, w, hist in start:
        if (i, w) not in seen:
            seen.add((i, w))
            queue.append((i, w, 1, hist))
    exhaustive = True
    while queue:
        i, prod, depth, hist = queue.popleft()
        if prod == EMPTY:
            return list(hist), True, len(seen)
        if depth >= max_letters:
            continue
        for j, (_, letters) in enumerate(letter_sets):
            if j == i:
                continue
            for w in letters:
                nprod = multiply(sys, "G", prod, w)
                if nprod == EMPTY:
                    return list(hist) + [w], True, len(seen)
                if (j, nprod) in seen:
                    continue
                seen.add((j, nprod))
                queue.append((j, nprod, depth + 1, hist + (w,)))
                if len(seen) > budget:
                    exhaustive = False
                    queue.clear()
                    break
            if not exhaustive:
                break
        if not exhaustive:
            break
    if not exhaustive:
        rng = random.Random(seed)
        nonempty = [i for i, (_, letters) in enumerate(letter_sets) if letters]
        if len(nonempty) >= 2:
            for _ in range(samples):
                length = rng.randint(2, max_letters)
                prod = EMPTY
                hist = []
                last = -1
                for _ in range(length):
                    j = rng.choice([k for k in nonempty if k != last])
                    w = rng.choice(letter_sets[j][1])
                    prod = multiply(sys, "G", prod, w)
                    hist.append(w)
                    last = j
                    if prod == EMPTY:
                        return hist, False, len(seen)
    return None, exhaustive, len(seen)


def _free_part_letters(sys: FactorSystem, w: Word) -> list[Word]:
    """Letters representing a free-basis part: the element and its square,
    with inverses (exponents past +-2 are left to the sampling stage)."""
    wi = invert(sys, "G", w)
    w2 = multiply(sys, "G", w, w)
    wi2 = invert(sys, "G", w2)
    letters = [w, wi]
    if w2 not in (EMPTY,):
        letters.extend([w2, wi2])
    return letters


def _structural_validation(sys: FactorSystem, cert: "ConjectureCertificate") -> None:
    from .conjecture import system_hash

    if cert.system_hash != system_hash(sys):
        raise MalformedCertificate("certificate was issued for a different system")
    if len(cert.factors) != sys.num_factors:
        raise MalformedCertificate("certificate factor count mismatch")
    for i, fc in enumerate(cert.factors):
        if fc.lam != i:
            raise MalformedCertificate(f"factor entry {i} labeled {fc.lam}")
        n = len(fc.beta_primes)
        if not (len(fc.g_corrections) == len(fc.reps) == len(fc.vertex_groups) == n):
            raise MalformedCertificate(f"factor {fc.lam}: piece lists have inconsistent lengths")
        for w in list(fc.beta_list) + list(fc.beta_primes) + list(fc.reps) + list(fc.f_basis) + list(
            fc.h_lambda_gens
        ) + [x for vg in fc.vertex_groups for x in vg] + list(fc.g_corrections):
            if not is_normal_form(sys, "G", w):
                raise MalformedCertificate(f"factor {fc.lam}: word {w!r} is not in normal form")
        for g in fc.g_corrections:
            if any(l != fc.lam for l, _ in g):
                raise MalformedCertificate(f"factor {fc.lam}: correction {g!r} outside its factor")


def verify_certificate(
    sys: FactorSystem,
    h_gens,
    cert: "ConjectureCertificate",
    *,
    max_cosets: int = 10_000,
    free_test_len: int = 8,
    freeness_budget: int = 200_000,
    seed: int = 0,
) -> VerificationReport:
    """Run checks C1-C7 against an independently rebuilt coset graph."""
    _structural_validation(sys, cert)
    h_gens = tuple(tuple(w) for w in h_gens)
    graph = canonicalize(complete_graph(sys, build_core(sys, h_gens), max_cosets))

    checks: list[CheckResult] = []

    def run(name, fn):
        t0 = time.perf_counter()
        ok, details = fn()
        dt = (time.perf_counter() - t0) * 1000.0
        checks.append(CheckResult(name=name, status="pass" if ok else "fail", details=details, elapsed_ms=dt))

    def c1():
        bad = []
        for fc in cert.factors:
            for x in fc.reps:
                if theta_word(sys, x) != EMPTY:
                    bad.append(f"rep {x} of factor {fc.lam} has nontrivial image")
            for b in fc.beta_list:
                if theta_word(sys, b) != EMPTY:
                    bad.append(f"beta {b} of factor {fc.lam} has nontrivial image")
            for g, bp, x in zip(fc.g_corrections, fc.beta_primes, fc.reps):
                if multiply(sys, "G", invert(sys, "G", g), bp) != x:
                    bad.append(f"factor {fc.lam}: rep != correction^-1 * beta'")
        for t in cert.tree_transversal:
            if theta_word(sys, t) != EMPTY:
                bad.append("transversal word with nontrivial image")
        return (not bad, "; ".join(bad[:3]))

    def c2():
        bad = []
        for fc in cert.factors:
            group_b = sys.factors_b[fc.lam]
            elems = set()
            for w in fc.h_lambda_gens:
                img = theta_word(sys, w)
                if any(l != fc.lam for l, _ in img):
                    bad.append(f"factor {fc.lam}: generator image leaves B_{fc.lam}")
                    continue
                e = 0
                for _, x in img:
                    e = group_b.mul[e][x]
                elems.add(e)
            if subgroup_closure(group_b, elems) != frozenset(range(group_b.order)):
                bad.append(f"factor {fc.lam}: images do not generate the target factor")
        return (not bad, "; ".join(bad[:3]))

    def c3():
        bad = []
        for fc in cert.factors:
            group = sys.factors_g[fc.lam]
            for mu, (x, vg) in enumerate(zip(fc.reps, fc.vertex_groups)):
                xinv = invert(sys, "G", x)
                computed = set()
                for g in range(1, group.order):
                    w = multiply(sys, "G", multiply(sys, "G", xinv, ((fc.lam, g),)), x)
                    if membership(sys, graph, w):
                        computed.add(w)
                if computed != set(vg):
                    bad.append(f"factor {fc.lam} piece {mu}: vertex group differs from exhaustive intersection")
        return (not bad, "; ".join(bad[:3]))

    def c4():
        bad = []
        for fc in cert.factors:
            group = sys.factors_g[fc.lam]
            orbits = brute_force_double_cosets(sys, graph, fc.lam)
            vertex_orbit = {}
            for i, orbit in enumerate(orbits):
                for v in orbit:
                    vertex_orbit[v] = i
            rep_orbits = []
            for x in fc.reps:
                v = trace(graph, invert(sys, "G", x), graph.base)
                rep_orbits.append(vertex_orbit[v])
            if len(set(rep_orbits)) != len(rep_orbits):
                bad.append(f"factor {fc.lam}: two representatives share a double coset")
            nontrivial = {i for i, orbit in enumerate(orbits) if len(orbit) < group.order}
            if set(rep_orbits) != nontrivial:
                bad.append(f"factor {fc.lam}: representatives do not match the nontrivial double cosets")
            base_has_stab = any(
                graph.action[graph.base].get((fc.lam, g)) == graph.base for g in range(1, group.order)
            )
            if base_has_stab and EMPTY not in fc.reps:
                bad.append(f"factor {fc.lam}: trivial representative missing")
        return (not bad, "; ".join(bad[:3]))

    def c5():
        words = []
        for fc in cert.factors:
            for vg in fc.vertex_groups:
                words.extend(vg)
            words.extend(fc.f_basis)
        stray = [
            w
            for fc in cert.factors
            for w in list(fc.h_lambda_gens) + [x for vg in fc.vertex_groups for x in vg] + list(fc.f_basis)
            if not membership(sys, graph, w)
        ]
        if stray:
            return False, f"{len(stray)} certificate words are outside the subgroup"
        ok, details = generation_check(sys, graph, words, max_cosets)
        return ok, details

    def c6():
        return additivity_check(sys, graph, [fc.h_lambda_gens for fc in cert.factors])

    def c7():
        parts: list[tuple[str, list[Word]]] = []
        for fc in cert.factors:
            for mu, vg in enumerate(fc.vertex_groups):
                parts.append((f"vg[{fc.lam},{mu}]", list(vg)))
            for j, w in enumerate(fc.f_basis):
                parts.append((f"fb[{fc.lam},{j}]", _free_part_letters(sys, w)))
        for fc in cert.factors:
            for w in fc.f_basis:
                power = EMPTY
                for k in range(free_test_len):
                    power = multiply(sys, "G", power, w)
                    if power == EMPTY:
                        return False, f"free-basis element has order {k + 1}"
        if len(parts) < 2:
            return True, "exhaustive trivially: fewer than two parts"
        for _, letters in parts:
            for w in letters:
                if not membership(sys, graph, w):
                    return False, "part letter outside the subgroup"
        witness, exhaustive, explored = freeness_search(
            sys, parts, free_test_len, budget=freeness_budget, seed=seed
        )
        if witness is not None:
            return False, f"relation witness of {len(witness)} letters found"
        mode = "exhaustive" if exhaustive else "budget-bounded plus sampling"
        return True, f"no relation up to {free_test_len} letters ({mode}, {explored} states)"

    run("C1 image-trivial representatives", c1)
    run("C2 factor image generation", c2)
    run("C3 vertex groups", c3)
    run("C4 double cosets", c4)
    run("C5 generation", c5)
    run("C6 decomposition fingerprint additivity", c6)
    run("C7 bounded freeness", c7)

    verdict = all(c.status == "pass" for c in checks if c.status != "skipped")
    return VerificationReport(checks=tuple(checks), verdict=verdict)
