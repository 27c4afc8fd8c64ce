from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, settings, strategies as st

from confalg.coeff import bracket_elements, element_coefficient
from confalg.constructions import affinize, heis3, loop_algebra, mat2, sl2
from confalg.core import (LIE, Element, GeneratorInfo, InputError, Presentation, binom,
                          check_conformal_associativity, check_conformal_jacobi,
                          check_quasi_symmetry, element_locality, is_central, nth_product,
                          preconf_identity_holds, validate_presentation)

SL2 = loop_algebra(sl2())
AFF = affinize(sl2())
HEIS = loop_algebra(heis3())


def elements(p, max_dpow=2):
    term = st.tuples(st.integers(0, p.rank - 1), st.integers(0, max_dpow))
    return st.dictionaries(term, st.integers(-2, 2), max_size=3).map(
        lambda d: sum((p.gen(g, k, c) for (g, k), c in d.items()), Element()))


def series_bracket_oracle(p, a, b, m, n):
    """[a(m), b(n)] from coefficients only; independent of the D rules."""
    return bracket_elements(p, element_coefficient(p, a, m), element_coefficient(p, b, n))


@pytest.mark.parametrize("p", [SL2, AFF, HEIS], ids=["sl2", "affine", "heis3"])
@settings(max_examples=40, deadline=None)
@given(data=st.data())
def test_nth_product_matches_coefficient_brackets(p, data):
    a = data.draw(elements(p))
    b = data.draw(elements(p))
    m = data.draw(st.integers(-3, 3))
    n = data.draw(st.integers(-3, 3))
    via_products = None
    for s in range(element_locality(p, a, b)):
        term = element_coefficient(p, nth_product(p, a, b, s), m + n - s) * binom(m, s)
        via_products = term if via_products is None else via_products + term
    oracle = series_bracket_oracle(p, a, b, m, n)
    if via_products is None:
        assert not oracle
    else:
        assert via_products == oracle


def test_left_derivative_rule_sign():
    # (D e)(2) f = -2 e(1) f; a (-1)^n sign would give +2 c
    De = AFF.gen("e", 1)
    got = nth_product(AFF, De, AFF.gen("f"), 2)
    assert got == AFF.gen("c") * -2
    # general rule (D^(k) a)(n) b = (-1)^k C(n, k) a(n-k) b
    for k in range(3):
        for n in range(5):
            lhs = nth_product(AFF, AFF.gen("e", k), AFF.gen("f"), n)
            rhs = nth_product(AFF, AFF.gen("e"), AFF.gen("f"), n - k) * ((-1) ** k * comb(n, k)) \
                if n >= k else Element()
            assert lhs == rhs


def test_right_derivative_rule():
    # a(n)(D^(k) b) = sum_s C(n, s) D^(k-s)(a(n-s) b)
    e, f = AFF.gen("e"), AFF.gen("f")
    for k in range(3):
        for n in range(4):
            lhs = nth_product(AFF, e, AFF.gen("f", k), n)
            rhs = Element()
            for s in range(min(n, k) + 1):
                rhs = rhs + AFF.derive(nth_product(AFF, e, f, n - s), k - s) * comb(n, s)
            assert lhs == rhs


def test_torsion_generators_are_killed_by_D():
    assert not AFF.gen("c", 1)
    assert not AFF.derive(AFF.gen("c"))


def test_loop_axioms():
    assert check_conformal_jacobi(SL2, 3, 3).passed
    assert check_quasi_symmetry(SL2, -1, 3).passed
    assert check_conformal_associativity(loop_algebra(mat2()), 3, 3).passed
    assert not check_quasi_symmetry(loop_algebra(mat2()), -1, 2).passed


def test_affine_c_is_central():
    assert is_central(AFF, AFF.gen("c"))
    assert not is_central(AFF, AFF.gen("h"))


def test_validate_flags_product_at_locality():
    p = Presentation(LIE, (GeneratorInfo("a"),), {(0, 0): 1},
                     {(0, 0, 1): Element.gen(0)})
    rep = validate_presentation(p)
    assert not rep.passed
    assert rep.witness()["kind"] == "product_beyond_locality"


def test_validate_flags_one_sided_locality():
    p = Presentation(LIE, (GeneratorInfo("a"), GeneratorInfo("b")), {(0, 1): 1}, {})
    assert any(v["kind"] == "locality_not_symmetric" for v in validate_presentation(p).violations)


def test_validate_flags_torsion_product():
    gens = (GeneratorInfo("a"), GeneratorInfo("c", 0, 1))
    p = Presentation(LIE, gens, {(0, 1): 1, (1, 0): 1}, {(1, 0, 0): Element.gen(0)})
    assert any(v["kind"] == "torsion_not_annihilating" for v in validate_presentation(p).violations)


def test_grading_check():
    assert validate_presentation(SL2, check_grading=True).passed
    assert not validate_presentation(SL2.with_weights([1, 1, 1]), check_grading=True).passed


def test_input_errors():
    with pytest.raises(InputError):
        GeneratorInfo("a", -1)
    with pytest.raises(InputError):
        GeneratorInfo("a", 0, 2)
    with pytest.raises(InputError):
        Presentation("jordan", ())
    with pytest.raises(InputError):
        SL2.index("nope")
    with pytest.raises(InputError):
        Element({(0, 0): 0.5})


def test_generalised_binomial():
    assert binom(-1, 3) == -1
    assert binom(-2, 2) == 3
    assert binom(5, 2) == 10
    assert binom(2, 5) == 0
    assert binom(3, -1) == 0


def test_preconf_identity_exhaustive():
    for m in range(9):
        for n in range(9):
            for i in range(m + 1):
                for j in range(i, n + m + 1):
                    assert preconf_identity_holds(m, n, i, j)


@given(st.integers(0, 15), st.integers(0, 15), st.integers(0, 15), st.integers(0, 30))
def test_preconf_identity_random(m, n, i, j):
    if i <= m and i <= j:
        assert preconf_identity_holds(m, n, i, j)


@given(elements(SL2), elements(SL2), st.integers(-3, 3))
def test_element_arithmetic(a, b, c):
    assert (a + b) - b == a
    assert (a * Fraction(c)) * 0 == Element()
    assert a + Element() == a
