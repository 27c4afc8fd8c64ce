import random

import pytest

from confalg.constructions import FiniteAlgebra, loop_algebra
from confalg.core import ASSOCIATIVE, Element, Presentation, apply_derivation, nth_product

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def record_criterion():
    def record(line):
        ACCEPTANCE_LINES.append(line)
        print(line)
    return record


# ---------------------------------------------------------------------------
# seeded random associative presentations

def _base_associative_algebras():
    """Small associative algebras given by structure constants."""
    out = []
    # k^3 with orthogonal idempotents
    out.append(FiniteAlgebra(("u", "v", "w"), {(i, i): {i: 1} for i in range(3)}, ASSOCIATIVE))
    # upper triangular 2x2: E11, E12, E22
    out.append(FiniteAlgebra(("p", "q", "s"), {(0, 0): {0: 1}, (0, 1): {1: 1},
                                               (1, 2): {1: 1}, (2, 2): {2: 1}}, ASSOCIATIVE))
    # k[x]/(x^3): 1, x, x^2
    out.append(FiniteAlgebra(("one", "x", "x2"), {(0, 0): {0: 1}, (0, 1): {1: 1}, (1, 0): {1: 1},
                                                  (0, 2): {2: 1}, (2, 0): {2: 1}, (1, 1): {2: 1}},
                             ASSOCIATIVE))
    # k[x]/(x^2) + k
    out.append(FiniteAlgebra(("one", "x", "z"), {(0, 0): {0: 1}, (0, 1): {1: 1}, (1, 0): {1: 1},
                                                 (2, 2): {2: 1}}, ASSOCIATIVE))
    # k[x]/(x^2)
    out.append(FiniteAlgebra(("one", "x"), {(0, 0): {0: 1}, (0, 1): {1: 1}, (1, 0): {1: 1}},
                             ASSOCIATIVE))
    # a null algebra
    out.append(FiniteAlgebra(("n1", "n2"), {}, ASSOCIATIVE))
    return out


def _rebase(p, new_in_old, old_in_new):
    """Presentation on new generators given both change-of-basis maps."""
    def to_new(e):
        out = Element()
        for (g, k), c in e.items():
            out = out + apply_derivation(old_in_new[g], k) * c
        return out

    r = p.rank
    locality, sc = {}, {}
    for a in range(r):
        for b in range(r):
            top = 0
            x, y = new_in_old[a], new_in_old[b]
            for n in range(8):
                v = to_new(nth_product(p, x, y, n))
                if v:
                    sc[(a, b, n)] = v
                    top = n + 1
            locality[(a, b)] = top
    return Presentation(p.kind, p.generators, locality, sc)


def random_associative_presentation(rng):
    """loop(R) for a small associative R, then a random unitriangular
    k[D]-change of generators g'_i = g_i + sum_{j<i} d_ij D g_j."""
    R = rng.choice(_base_associative_algebras())
    p = loop_algebra(R)
    r = p.rank
    d = {(i, j): rng.choice([0, 0, 1, -1, 2]) for i in range(r) for j in range(i)}
    new_in_old = []
    for i in range(r):
        e = Element.gen(i)
        for j in range(i):
            if d[(i, j)]:
                e = e + Element.gen(j, 1, d[(i, j)])
        new_in_old.append(e)
    # invert: g_i = g'_i - sum_{j<i} d_ij D g_j, recursively
    old_in_new = []
    for i in range(r):
        e = Element.gen(i)
        for j in range(i):
            if d[(i, j)]:
                e = e - apply_derivation(old_in_new[j], 1) * d[(i, j)]
        old_in_new.append(e)
    return _rebase(p, new_in_old, old_in_new)


@pytest.fixture
def random_assoc():
    return random_associative_presentation


def seeded(seed):
    return random.Random(seed)
