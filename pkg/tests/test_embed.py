import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from confalg.constructions import abelian, affinize, heis3, loop_algebra, sl2
from confalg.core import LIE, Element, Presentation, element_locality, nth_product
from confalg.embed import (Bounds, EmbedContext, HypothesisViolated, InconclusiveDegree,
                           PipelineBudgetError, basis_B, build_enveloping,
                           check_associativity_in_A, check_embedded_brackets,
                           find_admissible_r, hypothesis_scan, ideal_I_membership,
                           torsion_ideal_T, verify_embedding, weight_degree_table)
from confalg.envelope import ConfWord, WExpansion, ordered_words, random_tree
from confalg.linalg import rank

SL2 = loop_algebra(sl2())
AFF = affinize(sl2())
HEIS = loop_algebra(heis3())

# (presentation, weights, r) triples that pass the hypothesis scan
CONFIGS = {
    "heis_w1_r3": (HEIS, [1, 1, 1], 3),
    "heis_mixed_r3": (HEIS, [1, 1, 0], 3),
    "heis_w0_r1": (HEIS, [0, 0, 0], 1),
    "sl2_w0_r1": (SL2, [0, 0, 0], 1),
    "affine_c1_r2": (AFF, [0, 0, 0, 1], 2),
    "affine_w0_r2": (AFF, [0, 0, 0, 0], 2),
    "abelian_w1_r2": (loop_algebra(abelian(2)), [1, 1], 2),
}

_ENVS = {}


def env_for(name, fast=False):
    key = (name, fast)
    if key not in _ENVS:
        p, w, r = CONFIGS[name]
        _ENVS[key] = build_enveloping(p, w, r, fast=fast)
    return _ENVS[key]


# ---------------------------------------------------------------------------
# hypothesis scan

def test_scan_reports_generator_as_witness_for_r0():
    res = hypothesis_scan(SL2, 0)
    assert not res.ok and res.witness == "e"
    with pytest.raises(HypothesisViolated) as exc:
        build_enveloping(SL2, None, 0)
    assert exc.value.witness == "e"


def test_scan_finds_nonzero_heavy_word():
    res = hypothesis_scan(SL2.with_weights(1), 3)
    assert not res.ok and res.weight >= 3
    assert res.witness == "e[0](e[0]f)"


def test_loop_sl2_with_weight_one_has_no_admissible_r():
    r, attempts = find_admissible_r(SL2.with_weights(1), 6)
    assert r is None and len(attempts) == 7


def test_admissible_r_for_heis():
    assert find_admissible_r(HEIS.with_weights(1), 6)[0] == 3
    assert find_admissible_r(HEIS.with_weights(0), 6)[0] == 1


def test_word_spans_are_graded():
    res = hypothesis_scan(HEIS.with_weights([1, 1, 0]), 3)
    dims = {w: len(b) for w, b in res.spans.items()}
    assert dims == {0: 1, 1: 2, 2: 1}


# ---------------------------------------------------------------------------
# degrees and bases

def test_degree_tables():
    dp, deg, spans = weight_degree_table(AFF, [0, 0, 0, 1], 2)
    assert dp == {"e": 0, "f": 0, "h": 0, "c": 1}
    assert deg["c"] == math.inf and deg["e"] == 0
    dp, deg, _ = weight_degree_table(HEIS, [1, 1, 0], 3)
    assert dp["z"] == 2 and deg["z"] == 2


def test_degree_of_derivatives_drops_by_one():
    ctx = EmbedContext(HEIS, 3, weights=[1, 1, 1])
    for k in range(4):
        assert ctx.degree(HEIS.gen("x", k)) == 1 - k
        assert ctx.dprime(HEIS.gen("z", k)) == 2 - k


@pytest.mark.parametrize("name", ["heis_w1_r3", "heis_mixed_r3", "affine_c1_r2", "sl2_w0_r1"])
def test_degree_superadditive_on_products(name):
    p, w, r = CONFIGS[name]
    ctx = EmbedContext(p, r, weights=w)
    basis = [b for bs in basis_B(ctx).values() for b in bs]
    for a in basis:
        for b in basis:
            for n in range(element_locality(ctx.p, a, b)):
                x = nth_product(ctx.p, a, b, n)
                bound = ctx.degree(a) + ctx.degree(b) + n
                assert ctx.degree(x) >= bound
                if bound >= r:
                    assert ctx.degree(x) == math.inf or not x


def test_bases_B_and_C():
    ctx = EmbedContext(AFF, 2, weights=[0, 0, 0, 1])
    B = basis_B(ctx)
    assert [AFF.fmt(b) for b in B[0]] == ["e", "f", "h"] and B[1] == []
    free, tors = torsion_ideal_T(ctx)
    assert free == [] and tors == [AFF.gen("c")]
    ctx = EmbedContext(HEIS, 3, weights=[1, 1, 0])
    B = basis_B(ctx)
    assert {i: [HEIS.fmt(b) for b in bs] for i, bs in B.items()} == \
        {0: [], 1: ["x", "y"], 2: ["z"]}


def test_L_is_kD_generated_by_weight_zero_part():
    for name in ("heis_mixed_r3", "affine_c1_r2"):
        p, w, r = CONFIGS[name]
        ctx = EmbedContext(p, r, weights=w)
        layer0 = ctx.layer(0)
        for g in range(ctx.p.rank):
            # every generator lies in the k[D]-span of L_0
            vecs = [ctx.p.derive(v, k)._terms for v in layer0 for k in range(3)]
            assert rank(vecs + [Element.gen(g)._terms]) == rank(vecs)


def test_inconclusive_degree_with_tiny_window():
    with pytest.raises(InconclusiveDegree):
        EmbedContext(HEIS, 3, Bounds(n_d=2), weights=[1, 1, 1]).degree(HEIS.gen("x"))


def test_span_budget():
    with pytest.raises(PipelineBudgetError):
        hypothesis_scan(HEIS.with_weights(1), 3, Bounds(max_span_dim=1))


# ---------------------------------------------------------------------------
# the enveloping algebra

@pytest.mark.parametrize("name", sorted(CONFIGS))
def test_expansion_round_trip(name):
    env = env_for(name)
    rb = env.rebased
    for g in range(env.p.rank):
        for k in range(3):
            e = env.p.gen(g, k)
            assert rb.to_old(rb.to_new(e)) == e
    for k in range(rb.pb.rank):
        x = Element.gen(k)
        assert rb.to_new(rb.to_old(x)) == x


def test_zero_algebra_is_vacuous():
    z = Presentation(LIE, (), {}, {})
    env = build_enveloping(z, [], 1)
    assert env.rebased.pb.rank == 0
    assert verify_embedding(env).passed


def test_abelian_products_vanish():
    env = env_for("abelian_w1_r2")
    a = [env.embed(env.p.gen(g)) for g in range(2)]
    for x in a:
        for y in a:
            for n in range(4):
                assert not env.product(x, y, n)


def test_I_membership_boundaries():
    env = env_for("heis_w1_r3")
    U = env.U
    assert not ideal_I_membership(U, env.embed(env.p.gen("x")))
    # x(1)y has length 2 and degree 1 + 1 + 1 = 3 = r
    w = ConfWord((1, 0), (1,))
    assert ideal_I_membership(U, WExpansion({(0, w): 1}))
    w = ConfWord((1, 0), (0,))
    assert not ideal_I_membership(U, WExpansion({(0, w): 1}))


@pytest.mark.parametrize("name", ["heis_w1_r3", "heis_mixed_r3", "affine_c1_r2"])
def test_I_is_an_ideal(name):
    env = env_for(name)
    U = env.U
    gens = range(env.rebased.pb.rank)
    heavy = [w for w in ordered_words(env.rebased.pb, gens, 2, 3)
             if U.is_I_term(0, w)][:12]
    assert heavy
    for w in heavy:
        X = WExpansion({(0, w): 1})
        for g in gens:
            G = WExpansion({(0, ConfWord.single(g)): 1})
            for n in range(3):
                assert ideal_I_membership(U, U.product(G, X, n))
                assert ideal_I_membership(U, U.product(X, G, n))


@pytest.mark.parametrize("name", ["heis_w1_r3", "heis_mixed_r3", "affine_c1_r2", "sl2_w0_r1"])
def test_products_of_basis_letters_fall_into_I(name):
    env = env_for(name)
    U, degs = env.U, env.rebased.degrees
    for a in range(env.rebased.nB):
        for b in range(env.rebased.nB):
            A = WExpansion({(0, ConfWord.single(a)): 1})
            B = WExpansion({(0, ConfWord.single(b)): 1})
            start = max(0, env.r - degs[a] - degs[b])
            for n in range(start, start + 3):
                assert ideal_I_membership(U, U.product(A, B, n))


@pytest.mark.parametrize("name", ["heis_w1_r3", "affine_c1_r2", "sl2_w0_r1"])
@settings(max_examples=10, deadline=None)
@given(seed=st.integers(0, 10 ** 6))
def test_early_pruning_agrees_with_late_reduction(name, seed):
    rng = random.Random(seed)
    exact, fast = env_for(name), env_for(name, fast=True)
    tree = random_tree(rng, exact.p, rng.randint(2, 4), 3, dpow_max=1)
    assert exact.evaluate(tree) == fast.evaluate(tree)
    # reducing only at the end gives the same normal form
    assert exact.reduce(exact.U.rewrite(tree)) == exact.evaluate(tree)


@pytest.mark.parametrize("name", ["heis_w1_r3", "affine_c1_r2", "sl2_w0_r1"])
def test_associativity_in_A(name):
    rep = check_associativity_in_A(env_for(name), 2, 2)
    assert rep.passed, rep.witness()


@pytest.mark.parametrize("name", sorted(CONFIGS))
def test_injectivity_and_heavy_words(name):
    rep = verify_embedding(env_for(name), window=3)
    assert rep.checks["a_injectivity"].passed
    assert rep.checks["b_heavy_words"].passed
    assert rep.checks["d_locality"].passed


def test_nilpotency_index_kept_with_positive_weights():
    rep = verify_embedding(env_for("heis_w1_r3"), window=3)
    assert rep.checks["c_nilpotency"].params["index"] == 3
    assert rep.checks["c_nilpotency"].passed


def test_nilpotency_index_lost_with_weight_zero():
    rep = verify_embedding(env_for("heis_w0_r1"), window=3)
    c = rep.checks["c_nilpotency"]
    assert not c.passed
    assert c.violations[0]["word"] == "x(0)(x(0)x)"


def test_commutator_in_A_drops_the_infinite_tail():
    # in A the commutator keeps only x(0)y - y(0)x; the terms D^(s)(y(s)x), s >= 1,
    # that would complete it to z all lie in I
    env = env_for("heis_w1_r3")
    x, y = env.embed(HEIS.gen("x")), env.embed(HEIS.gen("y"))
    got = env.lie_bracket(x, y, 0)
    assert got == env.product(x, y, 0) - env.product(y, x, 0)
    assert got != env.embed(HEIS.gen("z"))
    for s in range(1, 4):
        assert ideal_I_membership(env.U, env.U.product(y, x, s))
    assert not check_embedded_brackets(env).passed


def test_brackets_match_when_all_products_vanish():
    assert check_embedded_brackets(env_for("abelian_w1_r2")).passed


def test_heisenberg_bases_for_weight_zero_and_one():
    # weight 0, r = 1: z = x[0]y also has weight 0, so B_0 holds all three
    ctx = EmbedContext(HEIS, 1, weights=[0, 0, 0])
    assert [HEIS.fmt(b) for b in basis_B(ctx)[0]] == ["x", "y", "z"]
    assert torsion_ideal_T(ctx) == ([], [])
    # weight 1, r = 4: z has degree 2 < r, so T = 0
    ctx = EmbedContext(HEIS, 4, weights=[1, 1, 1])
    B = basis_B(ctx)
    assert {i: [HEIS.fmt(b) for b in bs] for i, bs in B.items()} == \
        {0: [], 1: ["x", "y"], 2: ["z"], 3: []}
    assert torsion_ideal_T(ctx) == ([], [])


def test_abelian_rank_one_basis():
    p = loop_algebra(abelian(1))
    ctx = EmbedContext(p, 2, weights=[1])
    assert basis_B(ctx) == {0: [], 1: [p.gen(0)]}
    assert torsion_ideal_T(ctx) == ([], [])
