"""Factor-wise free decomposition pipeline with image-trivial representatives.

Pipeline: complete the coset graph of H, choose an image-trivial
transversal, split H into per-factor subgroups H_lam, decompose each H_lam
into vertex-group pieces plus a free part, then correct each piece
representative beta' by a factor element g with equal image so that
x = g^-1 beta' dies in B while conjugating the factor identically.  The
result is a certificate carrying every intermediate object, which the
verify module re-checks from scratch.

The transversal choice is a heuristic; the pipeline validates each
candidate (cross-factor pieces, intersection equalities, generation,
fingerprint additivity, bounded freeness) and retries with permuted edge
orders before giving up.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

from .covgraph import CoreGraph, build_core, canonicalize, complete_graph, membership
from .fingroup import solve_preimage
from .freeprod import EMPTY, FactorSystem, Word, invert, multiply, syllable_word, theta_word
from .higgins import ThetaTree, TreeBoundExceeded, build_theta_tree, higgins_decompose
from .kurosh import KuroshDecomposition, kurosh_decompose
from .verify import _free_part_letters, additivity_check, freeness_search, generation_check


class ThetaNotSurjectiveOntoB(RuntimeError):
    """The subgroup's image does not generate all of B."""


class CrossFactorPieceNontrivial(RuntimeError):
    """A per-factor subgroup produced a piece that contradicts the expected
    shape (foreign factor, or smaller than the full intersection with H)."""


class BetaImageNotInFactor(RuntimeError):
    """A piece representative's image is not a single factor element."""


class _TreeRejected(Exception):
    def __init__(self, reason: RuntimeError):
        super().__init__(str(reason))
        self.reason = reason


@dataclass(frozen=True)
class Bounds:
    max_cosets: int = 10_000
    tree_word_bound: int = 12
    tree_extension_bound: int = 64
    tree_retries: int = 8
    free_test_len: int = 8
    freeness_budget: int = 200_000
    seed: int = 0


@dataclass(frozen=True)
class FactorCertificate:
    """Everything the pipeline produced for one factor index."""

    lam: int
    beta_list: tuple[Word, ...]
    beta_primes: tuple[Word, ...]
    g_corrections: tuple[Word, ...]
    reps: tuple[Word, ...]
    vertex_groups: tuple[tuple[Word, ...], ...]
    f_basis: tuple[Word, ...]
    h_lambda_gens: tuple[Word, ...]


@dataclass(frozen=True)
class ConjectureCertificate:
    system_hash: str
    h_generators: tuple[Word, ...]
    factors: tuple[FactorCertificate, ...]
    tree_transversal: tuple[Word, ...]


def system_hash(sys: FactorSystem) -> str:
    payload = json.dumps(sys.description(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(payload.encode("ascii")).hexdigest()


def canonical_generators(h_gens) -> tuple[Word, ...]:
    unique = {tuple(w) for w in h_gens if tuple(w)}
    return tuple(sorted(unique, key=lambda w: (len(w), w)))


def check_h_theta_surjective(sys: FactorSystem, h_gens, max_cosets: int) -> None:
    """Raise unless the generator images generate all of B.

    B is itself a free product of finite groups, so the question reduces to
    an index-1 test with the same graph machinery on the B side.
    """
    images = canonical_generators(theta_word(sys, w) for w in h_gens)
    bsys = sys.b_identity_system()
    bgraph = complete_graph(bsys, build_core(bsys, images), max_cosets)
    if bgraph.vertex_count != 1:
        raise ThetaNotSurjectiveOntoB(
            f"generator images have index {bgraph.vertex_count} in B, expected 1"
        )


def conjecture_decompose(sys: FactorSystem, h_gens, bounds: Bounds | None = None) -> ConjectureCertificate:
    """Full decomposition of the subgroup generated by ``h_gens``.

    Raises IndexBoundExceeded / TreeBoundExceeded on bound violations,
    ThetaNotSurjectiveOntoB when the image precheck fails, and
    CrossFactorPieceNontrivial / BetaImageNotInFactor with diagnostics when
    every transversal retry was rejected.
    """
    bounds = bounds or Bounds()
    gens = canonical_generators(h_gens)
    graph = canonicalize(complete_graph(sys, build_core(sys, gens), bounds.max_cosets))
    check_h_theta_surjective(sys, gens, bounds.max_cosets)

    last_error: RuntimeError | None = None
    for order_seed in range(bounds.tree_retries):
        try:
            tree = build_theta_tree(
                sys,
                graph,
                word_bound=bounds.tree_word_bound,
                extension_bound=bounds.tree_extension_bound,
                order_seed=order_seed,
            )
        except TreeBoundExceeded as exc:
            last_error = exc
            continue
        try:
            return _assemble(sys, graph, tree, bounds)
        except _TreeRejected as exc:
            last_error = exc.reason
            continue
    assert last_error is not None
    raise last_error


def _assemble(sys: FactorSystem, graph: CoreGraph, tree: ThetaTree, bounds: Bounds) -> ConjectureCertificate:
    hd = higgins_decompose(sys, graph, tree)
    factor_certs: list[FactorCertificate] = []

    for lam in range(sys.num_factors):
        fd = hd.factors[lam]
        if fd.gens:
            core_l = canonicalize(build_core(sys, fd.gens))
            kd = kurosh_decompose(sys, core_l)
        else:
            kd = KuroshDecomposition(pieces=(), free_basis=(), free_rank=0)

        group = sys.factors_g[lam]
        beta_primes: list[Word] = []
        g_corrections: list[Word] = []
        reps: list[Word] = []
        vertex_groups: list[tuple[Word, ...]] = []
        for piece in kd.pieces:
            if piece.lam != lam:
                raise _TreeRejected(
                    CrossFactorPieceNontrivial(
                        f"H_{lam} has a nontrivial piece in factor {piece.lam}: rep {piece.rep}"
                    )
                )
            beta_prime = piece.rep
            bp_inv = invert(sys, "G", beta_prime)
            intersection = {
                g
                for g in range(1, group.order)
                if membership(sys, graph, multiply(sys, "G", multiply(sys, "G", bp_inv, ((lam, g),)), beta_prime))
            }
            if intersection != set(piece.stabilizer) - {0}:
                raise _TreeRejected(
                    CrossFactorPieceNontrivial(
                        f"H_{lam} piece at {beta_prime} is smaller than the intersection with the whole subgroup"
                    )
                )
            image = theta_word(sys, beta_prime)
            if image == EMPTY:
                g_word: Word = EMPTY
                g_elem = 0
            elif len(image) == 1 and image[0][0] == lam:
                g_elem = solve_preimage(sys.theta[lam], image[0][1])
                g_word = syllable_word(lam, g_elem)
            else:
                raise _TreeRejected(
                    BetaImageNotInFactor(f"image of {beta_prime} is {image}, not inside factor {lam}")
                )
            x = multiply(sys, "G", invert(sys, "G", g_word), beta_prime)
            assert theta_word(sys, x) == EMPTY
            ginv = group.inv[g_elem]
            conj_stab = sorted(group.mul[group.mul[ginv][s]][g_elem] for s in piece.stabilizer)
            xinv = invert(sys, "G", x)
            vg = tuple(
                multiply(sys, "G", multiply(sys, "G", xinv, ((lam, s),)), x) for s in conj_stab if s
            )
            assert set(vg) == set(piece.vertex_group_gens)
            beta_primes.append(beta_prime)
            g_corrections.append(g_word)
            reps.append(x)
            vertex_groups.append(vg)

        factor_certs.append(
            FactorCertificate(
                lam=lam,
                beta_list=fd.betas,
                beta_primes=tuple(beta_primes),
                g_corrections=tuple(g_corrections),
                reps=tuple(reps),
                vertex_groups=tuple(vertex_groups),
                f_basis=kd.free_basis,
                h_lambda_gens=fd.gens,
            )
        )

    # tree-quality gates: generation, fingerprint additivity, bounded freeness
    all_words: list[Word] = []
    for fc in factor_certs:
        for vg in fc.vertex_groups:
            all_words.extend(vg)
        all_words.extend(fc.f_basis)
    ok, details = generation_check(sys, graph, all_words, bounds.max_cosets)
    if not ok:
        raise _TreeRejected(CrossFactorPieceNontrivial(f"pieces fail to regenerate the subgroup: {details}"))
    ok, details = additivity_check(sys, graph, [fc.h_lambda_gens for fc in factor_certs])
    if not ok:
        raise _TreeRejected(CrossFactorPieceNontrivial(f"decomposition fingerprints do not add up: {details}"))
    parts = []
    for fc in factor_certs:
        for mu, vg in enumerate(fc.vertex_groups):
            parts.append((f"vg[{fc.lam},{mu}]", list(vg)))
        for j, w in enumerate(fc.f_basis):
            parts.append((f"fb[{fc.lam},{j}]", _free_part_letters(sys, w)))
    if len(parts) >= 2:
        witness, _, _ = freeness_search(
            sys, parts, bounds.free_test_len, budget=bounds.freeness_budget, seed=bounds.seed
        )
        if witness is not None:
            raise _TreeRejected(
                CrossFactorPieceNontrivial(f"free-product relation of {len(witness)} letters found")
            )

    h_generators = canonical_generators(all_words)
    return ConjectureCertificate(
        system_hash=system_hash(sys),
        h_generators=h_generators,
        factors=tuple(factor_certs),
        tree_transversal=tree.transversal,
    )
