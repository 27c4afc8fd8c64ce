import random
from fractions import Fraction

from hypothesis import given, settings, strategies as st

from confalg.constructions import abelian, affinize, commutator_algebra, heis3, loop_algebra, sl2
from confalg.core import nth_product
from confalg.locality import (dong_bound, dong_bound_check, fill_shape, format_word,
                              index_tuples, locality_function, structural_index_bound,
                              tree_shapes)

from conftest import random_associative_presentation

SL2 = loop_algebra(sl2())
AFF = affinize(sl2())

CATALAN = [1, 1, 2, 5, 14, 42]


def test_tree_shapes_are_catalan():
    for l in range(1, 7):
        assert len(tree_shapes(l)) == CATALAN[l - 1]
    assert len(set(tree_shapes(5))) == 14


@given(st.integers(0, 4), st.integers(0, 6))
def test_index_tuples(k, total):
    got = list(index_tuples(k, total))
    assert all(len(t) == k and sum(t) == total for t in got)
    assert len(got) == len(set(got))
    if k:
        from math import comb
        assert len(got) == comb(total + k - 1, k - 1)


def test_format_word():
    w = fill_shape(tree_shapes(3)[0], [0, 1, 2], [0, 1])
    assert format_word(w, ["e", "f", "h"]) == "e(0)(f(1)h)"


def test_sl2_locality_is_one():
    for l in range(2, 6):
        v = locality_function(SL2, None, l)
        assert v.exact and v.S == 1


def test_affine_locality_is_two():
    for l in range(2, 5):
        assert locality_function(AFF, None, l).S == 2


def test_abelian_locality_is_zero():
    p = loop_algebra(abelian(2))
    for l in range(2, 5):
        assert locality_function(p, None, l).S == 0
    assert dong_bound_check(p).passed


def test_inconclusive_when_budget_too_small():
    v = locality_function(AFF, None, 3, n_budget=1)
    assert not v.exact and v.S is None and v.lower_bound == 2


def test_redundant_generators_change_s_by_at_most_l():
    extra = nth_product(SL2, SL2.gen("h"), SL2.gen("e"), 0)
    for l in (2, 3):
        base = locality_function(SL2, None, l).S
        more = locality_function(SL2, ["e", "f", "h", extra], l).S
        assert abs(base - more) <= l


@settings(max_examples=8, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(2, 3))
def test_span_scan_agrees_with_enumeration(seed, l):
    p = commutator_algebra(random_associative_presentation(random.Random(seed)))
    a = locality_function(p, None, l, n_budget=4)
    b = locality_function(p, None, l, n_budget=4, method="enumerate")
    assert (a.status, a.S, a.lower_bound) == (b.status, b.S, b.lower_bound)


def test_structural_bound_is_sound_for_heis():
    p = loop_algebra(heis3())
    for l in (2, 3):
        bound = structural_index_bound(p, None, l)
        v = locality_function(p, None, l, n_budget=bound + 3)
        assert v.lower_bound <= bound + 1


def test_dong_bound_formula():
    assert dong_bound(1, 3) == 1
    assert dong_bound(2, 3) == 4
    assert dong_bound(1, 2) == 0
    assert dong_bound(3, 4) == Fraction(15)


def test_dong_bound_holds_from_length_three():
    # the quadratic bound fails at l = 2, where S(2) = N
    for p in (SL2, AFF):
        rep = dong_bound_check(p, l_max=4)
        assert [v["l"] for v in rep.violations] == [2]
