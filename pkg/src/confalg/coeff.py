"""The coefficient algebra: letters a(n), n in Z, and their products."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product as iproduct

from .core import CheckReport, Element, binom, element_locality, nth_product
from .linalg import Echelon


@dataclass(frozen=True, order=True)
class CoeffLetter:
    """The letter g(n).  Ordered by (index, generator), as in PBW words."""

    index: int
    gen: int

    def __repr__(self):
        return "L(%d,%d)" % (self.gen, self.index)


def letter(gen, index):
    return CoeffLetter(index, gen)


class CoeffElement:
    """A finite k-linear combination of letters (no zero coefficients)."""

    __slots__ = ("_terms",)

    def __init__(self, terms=None):
        self._terms = {k: Fraction(c) for k, c in (terms or {}).items() if c}

    def items(self):
        return sorted(self._terms.items())

    def __bool__(self):
        return bool(self._terms)

    def __eq__(self, other):
        if isinstance(other, CoeffElement):
            return self._terms == other._terms
        if other == 0:
            return not self._terms
        return NotImplemented

    def __hash__(self):
        return hash(tuple(self.items()))

    def __add__(self, other):
        d = dict(self._terms)
        for k, c in other._terms.items():
            d[k] = d.get(k, 0) + c
        return CoeffElement(d)

    def __sub__(self, other):
        return self + other * -1

    def __mul__(self, c):
        return CoeffElement({k: v * c for k, v in self._terms.items()})

    __rmul__ = __mul__

    def __repr__(self):
        return "CoeffElement(%s)" % self.items()

    def fmt(self, p):
        if not self._terms:
            return "0"
        return " + ".join("%s*%s(%d)" % (c, p.generators[x.gen].name, x.index)
                          for x, c in self.items())


def reduce_letter(p, g, k, n):
    """(D^(k) g)(n) rewritten as a multiple of g(n-k).

    From (Da)(n) = -n a(n-1): (D^(k)a)(n) = (-1)^k binom(n, k) a(n-k), with
    the generalised binomial for negative n.  Torsion generators only keep
    the letter c(-1).
    """
    if g in p.torsion:
        if k or n != -1:
            return CoeffElement()
        return CoeffElement({letter(g, -1): 1})
    c = (-1) ** k * binom(n, k)
    if not c:
        return CoeffElement()
    return CoeffElement({letter(g, n - k): c})


def element_coefficient(p, e, n):
    """The n-th coefficient of the series of an element of the conformal algebra."""
    d = {}
    for (g, k), c in e.items():
        for x, v in reduce_letter(p, g, k, n)._terms.items():
            d[x] = d.get(x, 0) + c * v
    return CoeffElement(d)


def coeff_bracket(p, x, y):
    """a(m) b(n) = sum_s binom(m, s) (a(s)b)(m+n-s) in the coefficient algebra."""
    a, m = x.gen, x.index
    b, n = y.gen, y.index
    if a in p.torsion and m != -1 or b in p.torsion and n != -1:
        return CoeffElement()
    out = CoeffElement()
    for s in range(p.N(a, b)):
        c = binom(m, s)
        if not c:
            continue
        val = p.product(a, b, s)
        if val:
            out = out + element_coefficient(p, val, m + n - s) * c
    return out


def bracket_elements(p, u, v):
    """Bilinear extension of coeff_bracket to CoeffElements."""
    out = CoeffElement()
    for x, a in u.items():
        for y, b in v.items():
            out = out + coeff_bracket(p, x, y) * (a * b)
    return out


def coeff_basis_probe(p, window, dpow=2):
    """Check on a finite window that the letters b(n) form a basis.

    The spanning symbols are (D^(k) g)(n) for k <= dpow with n - k in the
    window; the relations are (k+1) (D^(k+1)g)(n) + n (D^(k)g)(n-1) = 0 and
    (D c)(n) = 0 for torsion c.  The reduced letters must be independent
    modulo the relations.  Also checks that the product respects the
    relations: [(Da)(m), b(n)] computed from the products (Da)(s)b equals
    -m [a(m-1), b(n)].
    """
    lo, hi = window
    rep = CheckReport("coeff_basis", {"window": [lo, hi], "dpow": dpow})
    rel = Echelon()
    symbols = []
    for g in range(p.rank):
        ks = [0] if g in p.torsion else range(dpow + 1)
        for k in ks:
            for n in range(lo + k, hi + 1):
                symbols.append((g, k, n))
    symset = set(symbols)
    for g, k, n in symbols:
        if g in p.torsion:
            # (Dc)(n+1) = -(n+1) c(n) = 0
            if n != -1:
                rel.add({(g, 0, n): Fraction(n + 1)})
            continue
        if k >= 1 and (g, k - 1, n - 1) in symset:
            rel.add({(g, k, n): Fraction(k), (g, k - 1, n - 1): Fraction(n)})
    letters = [(g, 0, n) for g in range(p.rank) for n in range(lo, hi + 1)]
    expected = [x for x in letters if x[0] not in p.torsion or x[2] == -1]
    ech = Echelon()
    for v in rel.basis():
        ech.add(v)
    for x in expected:
        rep.checked += 1
        if not ech.add({x: Fraction(1)}):
            rep.violations.append({"kind": "dependent_letter",
                                   "letter": [p.names[x[0]], x[2]]})
    # the expected letters together with the relations must span all symbols
    if ech.rank != len(symbols):
        rep.violations.append({"kind": "letters_do_not_span",
                               "rank": ech.rank, "symbols": len(symbols)})
    for x in letters:
        if x not in expected and not rel.contains({x: Fraction(1)}):
            rep.violations.append({"kind": "torsion_letter_not_killed",
                                   "letter": [p.names[x[0]], x[2]]})
    # well-definedness of the product on the quotient
    for a, b in iproduct(range(p.rank), repeat=2):
        if a in p.torsion:
            continue
        da = p.derive(Element.gen(a), 1)
        for m, n in iproduct(range(lo + 1, hi + 1), repeat=2):
            rep.checked += 1
            direct = CoeffElement()
            for s in range(element_locality(p, da, Element.gen(b))):
                c = binom(m, s)
                if c:
                    val = nth_product(p, da, Element.gen(b), s)
                    direct = direct + element_coefficient(p, val, m + n - s) * c
            via = coeff_bracket(p, letter(a, m - 1), letter(b, n)) * (-m)
            if direct != via:
                rep.violations.append({"kind": "product_not_well_defined",
                                       "a": p.names[a], "b": p.names[b], "m": m, "n": n,
                                       "direct": direct.fmt(p), "reduced": via.fmt(p)})
    return rep


@dataclass
class LocalityResult:
    status: str          # "ok", "none" or "inconclusive"
    order: int = None
    witness: dict = None

    def to_dict(self):
        return {"status": self.status, "order": self.order, "witness": self.witness}


def series_locality_order(p, a, b, trial_N, window):
    """Least N <= trial_N with sum_s (-1)^s C(N,s) a(n-s) b(m+s) = 0 on the window.

    Products of letters are taken in the coefficient algebra (the
    commutator for Lie presentations).  A window narrower than trial_N + 2
    cannot separate candidate orders and yields "inconclusive".
    """
    if isinstance(a, str):
        a = p.index(a)
    if isinstance(b, str):
        b = p.index(b)
    lo, hi = window
    if hi - lo < trial_N + 1:
        return LocalityResult("inconclusive")
    witness = None
    for N in range(trial_N + 1):
        ok = True
        for n, m in iproduct(range(lo, hi + 1), repeat=2):
            tot = CoeffElement()
            for s in range(N + 1):
                tot = tot + coeff_bracket(p, letter(a, n - s), letter(b, m + s)) * (
                    (-1) ** s * binom(N, s))
            if tot:
                ok = False
                witness = {"N": N, "n": n, "m": m, "value": tot.fmt(p)}
                break
        if ok:
            return LocalityResult("ok", N)
    return LocalityResult("none", None, witness)
