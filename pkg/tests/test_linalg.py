from fractions import Fraction

from hypothesis import given, settings, strategies as st

from confalg.linalg import Echelon, kernel, preimage, rank, rref, span_basis

small = st.integers(-3, 3)
vectors = st.lists(st.dictionaries(st.integers(0, 4), small, max_size=5), max_size=6)


def dense(v, n=5):
    return [Fraction(v.get(i, 0)) for i in range(n)]


def dense_rank(rows):
    """Plain Gaussian elimination on lists, as an independent oracle."""
    m = [list(r) for r in rows]
    rk, col = 0, 0
    ncols = len(m[0]) if m else 0
    while rk < len(m) and col < ncols:
        piv = next((i for i in range(rk, len(m)) if m[i][col]), None)
        if piv is None:
            col += 1
            continue
        m[rk], m[piv] = m[piv], m[rk]
        for i in range(len(m)):
            if i != rk and m[i][col]:
                f = m[i][col] / m[rk][col]
                m[i] = [a - f * b for a, b in zip(m[i], m[rk])]
        rk += 1
        col += 1
    return rk


@given(vectors)
def test_rank_matches_dense_elimination(vs):
    assert rank(vs) == dense_rank([dense(v) for v in vs])


@given(vectors)
def test_kernel_vectors_are_relations(vs):
    for rel in kernel(vs):
        total = [Fraction(0)] * 5
        for i, c in rel.items():
            total = [a + c * b for a, b in zip(total, dense(vs[i]))]
        assert not any(total)
    assert len(kernel(vs)) == len(vs) - rank(vs)


@given(vectors)
def test_rref_spans_same_space_and_is_reduced(vs):
    rows = rref(vs)
    assert rank(rows) == len(rows) == rank(vs)
    assert rank(rows + vs) == rank(vs)
    pivots = [min(r) for r in rows]
    assert pivots == sorted(pivots)
    for p, r in zip(pivots, rows):
        assert r[p] == 1
        assert all(other.get(p, 0) == 0 for other in rows if other is not r)


@given(vectors)
def test_prefix_reduction_is_exact(vs):
    ech = Echelon()
    for v in vs:
        ech.add(v)
    for k in range(len(ech.rows) + 1):
        prefix = ech.basis()[:k]
        for v in vs:
            inside = not ech.reduce(v, limit=k)[0]
            assert inside == (rank(prefix + [v]) == rank(prefix))


@given(vectors, vectors)
@settings(max_examples=50)
def test_preimage(images, sub):
    for rel in preimage(images, sub):
        v = {}
        for i, c in rel.items():
            for k, x in images[i].items():
                v[k] = v.get(k, 0) + c * x
        assert rank(sub + [v]) == rank(sub)


def test_express_and_span_basis():
    ech = Echelon(track=True)
    ech.add({0: 1, 1: 1})
    ech.add({1: 1})
    assert ech.express({0: 2, 1: 5}) == {0: 2, 1: 3}
    assert ech.express({2: 1}) is None
    assert span_basis([{0: 1}, {0: 2}, {1: 1}]) == [{0: 1}, {1: 1}]
