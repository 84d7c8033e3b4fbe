import pytest

from freedecomp import (
    GraphNotComplete,
    TreeBoundExceeded,
    build_core,
    build_theta_tree,
    canonicalize,
    complete_graph,
    higgins_decompose,
    membership,
    subgroup_closure,
    theta_word,
)
from freedecomp.freeprod import EMPTY, invert, make_system, multiply, parse_word

from conftest import Z2


def w(sys, text):
    return parse_word(sys, "G", text)


def complete_canon(sys, gens, bound=200):
    return canonicalize(complete_graph(sys, build_core(sys, gens), bound))


def test_whole_group_identity_theta(sys_b):
    gens = [w(sys_b, "0:1"), w(sys_b, "1:1")]
    g = complete_canon(sys_b, gens)
    tree = build_theta_tree(sys_b, g)
    assert tree.transversal == (EMPTY,)
    hd = higgins_decompose(sys_b, g, tree)
    # one canonical generator per undirected loop edge
    assert hd.factors[0].gens == (w(sys_b, "0:1"),)
    assert hd.factors[1].gens == (w(sys_b, "1:1"),)
    assert subgroup_closure(sys_b.factors_g[1], {1}) == frozenset({0, 1, 2})
    assert hd.factors[0].betas == (EMPTY,)


def test_sys_a_tree_uses_kernel_edge(sys_a, sys_a_gens):
    g = complete_canon(sys_a, sys_a_gens)
    tree = build_theta_tree(sys_a, g)
    assert tree.transversal == (EMPTY, ((1, 1),))
    assert theta_word(sys_a, tree.transversal[1]) == EMPTY


def test_sys_a_decomposition(sys_a, sys_a_gens):
    g = complete_canon(sys_a, sys_a_gens)
    hd = higgins_decompose(sys_a, g, build_theta_tree(sys_a, g))
    assert set(hd.factors[0].gens) == {w(sys_a, "0:1"), w(sys_a, "1:1 0:1 1:1")}
    assert hd.factors[0].betas == (EMPTY, ((1, 1),))
    assert hd.factors[1].gens == ()
    assert hd.factors[1].betas == (EMPTY,)


def test_phase2_transversal(sys_phase2, sys_phase2_gens):
    # index 3; vertex 2 is only reachable image-trivially through a mixed word
    g = complete_canon(sys_phase2, sys_phase2_gens)
    tree = build_theta_tree(sys_phase2, g)
    assert tree.transversal[0] == EMPTY
    assert tree.transversal[1] == w(sys_phase2, "1:1")
    assert tree.transversal[2] == w(sys_phase2, "0:1 1:1 0:1")
    for word in tree.transversal:
        assert theta_word(sys_phase2, word) == EMPTY


def test_phase2_decomposition(sys_phase2, sys_phase2_gens):
    g = complete_canon(sys_phase2, sys_phase2_gens)
    hd = higgins_decompose(sys_phase2, g, build_theta_tree(sys_phase2, g))
    assert hd.factors[0].gens == (w(sys_phase2, "0:1"),)
    assert hd.factors[1].gens == (w(sys_phase2, "0:1 1:1 0:1 1:1 0:1 1:1 0:1"),)


def test_tree_bound_exceeded_when_image_proper():
    sys = make_system([Z2, Z2], [Z2, Z2], [[0, 1], [0, 1]])
    gens = [w(sys, "0:1"), w(sys, "1:1 0:1 1:1")]
    g = complete_canon(sys, gens)
    with pytest.raises(TreeBoundExceeded):
        build_theta_tree(sys, g)


def test_requires_complete_graph(sys_a):
    core = build_core(sys_a, [w(sys_a, "0:1")])
    with pytest.raises(GraphNotComplete):
        build_theta_tree(sys_a, core)


def test_transversal_words_are_image_trivial_and_readable(corpus):
    from freedecomp.conjecture import check_h_theta_surjective, ThetaNotSurjectiveOntoB
    from freedecomp.covgraph import trace

    for inst in corpus[:30]:
        try:
            check_h_theta_surjective(inst.system, inst.gens, 200)
        except ThetaNotSurjectiveOntoB:
            continue
        tree = build_theta_tree(inst.system, inst.graph)
        for v, word in enumerate(tree.transversal):
            assert theta_word(inst.system, word) == EMPTY
            assert trace(inst.graph, word, 0) == v


def test_factor_images_generate_targets(corpus):
    from freedecomp.conjecture import check_h_theta_surjective, ThetaNotSurjectiveOntoB

    for inst in corpus[:30]:
        sys = inst.system
        try:
            check_h_theta_surjective(sys, inst.gens, 200)
        except ThetaNotSurjectiveOntoB:
            continue
        hd = higgins_decompose(sys, inst.graph, build_theta_tree(sys, inst.graph))
        for fd in hd.factors:
            group_b = sys.factors_b[fd.lam]
            elems = set()
            for word in fd.gens:
                img = theta_word(sys, word)
                assert all(l == fd.lam for l, _ in img)
                e = 0
                for _, x in img:
                    e = group_b.mul[e][x]
                elems.add(e)
            assert subgroup_closure(group_b, elems) == frozenset(range(group_b.order))


def test_inclusion_of_conjugated_stabilizers(corpus):
    # every element of the intersection at a component representative lies in
    # the subgroup generated by that factor's Schreier elements
    from freedecomp.conjecture import check_h_theta_surjective, ThetaNotSurjectiveOntoB
    from freedecomp import lambda_components

    for inst in corpus[:20]:
        sys = inst.system
        try:
            check_h_theta_surjective(sys, inst.gens, 200)
        except ThetaNotSurjectiveOntoB:
            continue
        tree = build_theta_tree(sys, inst.graph)
        hd = higgins_decompose(sys, inst.graph, tree)
        for fd in hd.factors:
            if not fd.gens:
                continue
            core = build_core(sys, fd.gens)
            for beta, root in zip(fd.betas, fd.roots):
                p_root = tree.transversal[root]
                for comp in lambda_components(sys, inst.graph, fd.lam):
                    if comp.root != root:
                        continue
                    for s in sorted(comp.stabilizer):
                        if s == 0:
                            continue
                        word = multiply(
                            sys,
                            "G",
                            multiply(sys, "G", p_root, ((fd.lam, s),)),
                            invert(sys, "G", p_root),
                        )
                        assert membership(sys, core, word)


def test_tree_word_bound_zero(sys_phase2, sys_phase2_gens):
    # with no image budget, only kernel-edge paths remain; vertex 2 of the
    # index-3 example then has no image-trivial word
    g = complete_canon(sys_phase2, sys_phase2_gens)
    with pytest.raises(TreeBoundExceeded):
        build_theta_tree(sys_phase2, g, word_bound=0)


def test_retry_loop_raises_after_exhaustion(sys_phase2, sys_phase2_gens):
    from freedecomp.conjecture import Bounds, conjecture_decompose

    with pytest.raises(TreeBoundExceeded):
        conjecture_decompose(
            sys_phase2, sys_phase2_gens, Bounds(max_cosets=100, tree_word_bound=0, tree_retries=3)
        )


def test_tree_determinism(sys_phase2, sys_phase2_gens):
    g = complete_canon(sys_phase2, sys_phase2_gens)
    t1 = build_theta_tree(sys_phase2, g, order_seed=0)
    t2 = build_theta_tree(sys_phase2, g, order_seed=0)
    assert t1 == t2
    t3 = build_theta_tree(sys_phase2, g, order_seed=3)
    for word in t3.transversal:
        assert theta_word(sys_phase2, word) == EMPTY
