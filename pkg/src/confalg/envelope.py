"""Enveloping algebra U(L) of the coefficient Lie algebra, and the
preconformal algebra of series it carries.

Two independent views of the same objects live here:

* the *series* view: an element of the preconformal algebra is a series
  with coefficients in U(L); its k-th coefficient is computed on demand
  from the series product and PBW straightening (``tree_coefficient``);
* the *symbolic* view: an element is a ``WExpansion``, a combination of
  ``D^(n) w`` over right-normed words ``w`` with nonincreasing letters,
  produced by deterministic rewriting (``rewrite_to_W``).

The first view is the oracle for the second.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product as iproduct
from math import comb

from .coeff import CoeffLetter, coeff_bracket, reduce_letter
from .core import LIE, CheckReport, Element, InputError, binom, nth_product
from .linalg import Echelon

DEFAULT_BUDGET = 10 ** 6


class BudgetExceeded(RuntimeError):
    """A rewriting or straightening run used more steps than allowed."""


def _acc(out, key, c):
    x = out.get(key, 0) + c
    if x:
        out[key] = x
    else:
        out.pop(key, None)


def _acc_all(out, d, scale=1):
    if scale:
        for key, c in d.items():
            _acc(out, key, scale * c)


# ---------------------------------------------------------------------------
# letters and PBW monomials

class LetterOrder:
    """a(m) < b(n) iff m < n, or m == n and a precedes b in generator order.

    ``CoeffLetter`` compares by (index, gen), which is exactly this order;
    the class exists to make the choice explicit and testable.
    """

    @staticmethod
    def key(x):
        return (x.index, x.gen)

    def less(self, x, y):
        return self.key(x) < self.key(y)

    def is_nonincreasing(self, letters):
        return all(not self.less(a, b) for a, b in zip(letters, letters[1:]))


ORDER = LetterOrder()


class UElement:
    """A finite combination of PBW monomials (tuples of nonincreasing letters)."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {m: Fraction(c) for m, c in (terms or {}).items() if c}

    def items(self):
        return sorted(self.terms.items(), key=lambda t: (len(t[0]), t[0]))

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, UElement):
            return self.terms == other.terms
        if other == 0:
            return not self.terms
        return NotImplemented

    def __hash__(self):
        return hash(tuple(self.items()))

    def __add__(self, other):
        d = dict(self.terms)
        _acc_all(d, other.terms)
        return UElement(d)

    def __sub__(self, other):
        d = dict(self.terms)
        _acc_all(d, other.terms, -1)
        return UElement(d)

    def __mul__(self, c):
        return UElement({m: v * c for m, v in self.terms.items()})

    __rmul__ = __mul__

    def __repr__(self):
        return "UElement(%s)" % self.items()

    def split(self, central):
        """(part without central letters, N-part with at least one)."""
        keep, npart = {}, {}
        for m, c in self.terms.items():
            (npart if any(x.gen in central for x in m) else keep)[m] = c
        return UElement(keep), UElement(npart)

    def fmt(self, p):
        if not self.terms:
            return "0"
        names = p.names
        return " + ".join(
            "%s*%s" % (c, "".join("%s(%d)" % (names[x.gen], x.index) for x in m))
            for m, c in self.items())


class UAlgebra:
    """PBW arithmetic in U(L), L the coefficient Lie algebra of ``p``.

    ``central`` lists generators whose letters span the ideal T; monomials
    containing them form the N-part.
    """

    def __init__(self, p, central=(), budget=DEFAULT_BUDGET):
        if p.kind != LIE:
            raise InputError("the enveloping algebra needs a Lie presentation")
        self.p = p
        self.central = frozenset(central)
        self.budget = budget
        self.steps = 0
        self._br = {}
        self._ml = {}

    def letter(self, g, n):
        """The reduced letter g(n), or None when it vanishes (torsion rule)."""
        if g in self.p.torsion and n != -1:
            return None
        return CoeffLetter(n, g)

    def bracket(self, x, y):
        key = (x, y)
        r = self._br.get(key)
        if r is None:
            r = dict(coeff_bracket(self.p, x, y)._terms)
            self._br[key] = r
        return r

    def _tick(self):
        self.steps += 1
        if self.steps > self.budget:
            raise BudgetExceeded("PBW straightening exceeded %d steps" % self.budget)

    def mul_letter(self, x, mono):
        """x * mono, straightened; ``mono`` is already nonincreasing."""
        if not mono or not ORDER.less(x, mono[0]):
            return {(x,) + mono: Fraction(1)}
        key = (x, mono)
        r = self._ml.get(key)
        if r is not None:
            return r
        self._tick()
        y, rest = mono[0], mono[1:]
        out = {}
        # x y rest = y (x rest) + [x, y] rest
        for m, c in self.mul_letter(x, rest).items():
            _acc_all(out, self.mul_letter(y, m), c)
        for z, c in self.bracket(x, y).items():
            _acc_all(out, self.mul_letter(z, rest), c)
        self._ml[key] = out
        return out

    def mul_mono(self, m1, m2):
        cur = {m2: Fraction(1)}
        for x in reversed(m1):
            nxt = {}
            for m, c in cur.items():
                _acc_all(nxt, self.mul_letter(x, m), c)
            cur = nxt
        return cur

    def mul(self, u, v):
        out = {}
        for m1, a in u.terms.items():
            for m2, b in v.terms.items():
                _acc_all(out, self.mul_mono(m1, m2), a * b)
        return UElement(out)

    def normal_form(self, word):
        """PBW normal form of an arbitrary sequence of letters."""
        cur = {(): Fraction(1)}
        for x in reversed(tuple(word)):
            if x.gen in self.p.torsion and x.index != -1:
                return UElement()
            nxt = {}
            for m, c in cur.items():
                _acc_all(nxt, self.mul_letter(x, m), c)
            cur = nxt
        return UElement(cur)


def pbw_normal_form(p, word, central=()):
    """Straighten a word of letters to a combination of nonincreasing monomials."""
    return UAlgebra(p, central).normal_form(word)


# ---------------------------------------------------------------------------
# conformal words and expression trees

@dataclass(frozen=True, order=True)
class ConfWord:
    """Right-normed word g_1(n_1)(g_2(n_2)(... g_l)); ``indices`` has l-1 entries."""

    gens: tuple
    indices: tuple = ()

    def __post_init__(self):
        if len(self.indices) != len(self.gens) - 1 or not self.gens:
            raise InputError("a word of length l needs l-1 indices")
        if any(n < 0 for n in self.indices):
            raise InputError("word indices must be nonnegative")

    @classmethod
    def single(cls, g):
        return cls((g,), ())

    def __len__(self):
        return len(self.gens)

    def head(self):
        return self.gens[0], self.indices[0]

    def tail(self):
        return ConfWord(self.gens[1:], self.indices[1:])

    def prepend(self, g, n):
        return ConfWord((g,) + self.gens, (n,) + self.indices)

    def index_letters(self):
        return [CoeffLetter(n, g) for g, n in zip(self.gens, self.indices)]

    def is_ordered(self):
        """The W-basis condition on letters 1..l-1."""
        return ORDER.is_nonincreasing(self.index_letters())

    def fmt(self, names):
        if len(self.gens) == 1:
            return names[self.gens[0]]
        inner = self.tail().fmt(names)
        if len(self.gens) > 2:
            inner = "(%s)" % inner
        return "%s(%d)%s" % (names[self.gens[0]], self.indices[0], inner)


@dataclass(frozen=True)
class Leaf:
    element: Element


@dataclass(frozen=True)
class Product:
    left: object
    right: object
    n: int


@dataclass(frozen=True)
class Derivative:
    inner: object
    k: int


def word_to_tree(p, word):
    """The expression tree of a ConfWord over plain generators."""
    tree = Leaf(p.gen(word.gens[-1]))
    for g, n in zip(reversed(word.gens[:-1]), reversed(word.indices)):
        tree = Product(Leaf(p.gen(g)), tree, n)
    return tree


def tree_length(t):
    if isinstance(t, Leaf):
        return 1
    if isinstance(t, Derivative):
        return tree_length(t.inner)
    return tree_length(t.left) + tree_length(t.right)


def random_tree(rng, p, length, n_max, dpow_max=0, gens=None):
    """A random parenthesised word with ``length`` leaves.

    Leaves are generators (free ones may carry a random D-power up to
    ``dpow_max``); products use indices in [0, n_max].
    """
    pool = list(range(p.rank)) if gens is None else list(gens)

    def build(l):
        if l == 1:
            g = rng.choice(pool)
            k = 0 if g in p.torsion or not dpow_max else rng.randint(0, dpow_max)
            return Leaf(p.gen(g, k))
        cut = rng.randint(1, l - 1)
        return Product(build(cut), build(l - cut), rng.randint(0, n_max))

    return build(length)


# ---------------------------------------------------------------------------
# the series oracle

def _leaf_coefficient(U, e, k):
    out = {}
    for (g, d), c in e.items():
        for x, v in reduce_letter(U.p, g, d, k)._terms.items():
            _acc(out, (x,), c * v)
    return UElement(out)


def tree_coefficient(U, tree, k, expand=None, _memo=None):
    """k-th coefficient of the series of an expression tree, in U(L).

    Products use (x(n)y)(k) = sum_s (-1)^s C(n,s) x(n-s) y(k+s), derivatives
    (D^(j) x)(k) = (-1)^j binom(k, j) x(k-j).  ``expand`` maps leaf elements
    into the presentation of ``U``.
    """
    memo = {} if _memo is None else _memo
    key = (tree, k)
    if key in memo:
        return memo[key]
    if isinstance(tree, Leaf):
        e = tree.element if expand is None else expand(tree.element)
        r = _leaf_coefficient(U, e, k)
    elif isinstance(tree, Derivative):
        c = (-1) ** tree.k * binom(k, tree.k)
        r = tree_coefficient(U, tree.inner, k - tree.k, expand, memo) * c if c else UElement()
    else:
        r = UElement()
        n = tree.n
        for s in range(n + 1):
            x = tree_coefficient(U, tree.left, n - s, expand, memo)
            if not x:
                continue
            y = tree_coefficient(U, tree.right, k + s, expand, memo)
            if y:
                r = r + U.mul(x, y) * ((-1) ** s * comb(n, s))
    memo[key] = r
    return r


def word_coefficient(U, w, k):
    """k-th coefficient of a conformal word, straightened in U(L)."""
    return tree_coefficient(U, word_to_tree(U.p, w), k)


def expansion_coefficient(U, X, k):
    """k-th coefficient of sum c D^(d) w."""
    out = UElement()
    for (d, w), c in X.items():
        f = (-1) ** d * binom(k, d)
        if f:
            out = out + word_coefficient(U, w, k - d) * (c * f)
    return out


# ---------------------------------------------------------------------------
# symbolic rewriting

class WExpansion:
    """sum k_{n,w} D^(n) w over right-normed ordered words.

    Terms whose word contains a letter of T (``ctx.central``) make up the
    N-part; they are kept, but are not claimed to be in normal form.
    """

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {k: Fraction(c) for k, c in (terms or {}).items() if c}

    def items(self):
        return sorted(self.terms.items(), key=lambda t: (len(t[0][1]), t[0]))

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, WExpansion):
            return self.terms == other.terms
        if other == 0:
            return not self.terms
        return NotImplemented

    def __hash__(self):
        return hash(tuple(self.items()))

    def __add__(self, other):
        d = dict(self.terms)
        _acc_all(d, other.terms)
        return WExpansion(d)

    def __sub__(self, other):
        d = dict(self.terms)
        _acc_all(d, other.terms, -1)
        return WExpansion(d)

    def __mul__(self, c):
        return WExpansion({k: v * c for k, v in self.terms.items()})

    __rmul__ = __mul__

    def __repr__(self):
        return "WExpansion(%s)" % self.items()

    def split(self, central):
        """(W-part, N-part)."""
        keep, npart = {}, {}
        for (d, w), c in self.terms.items():
            (npart if any(g in central for g in w.gens) else keep)[(d, w)] = c
        return WExpansion(keep), WExpansion(npart)

    def fmt(self, names):
        if not self.terms:
            return "0"
        out = []
        for (d, w), c in self.items():
            s = w.fmt(names)
            if d:
                s = "D^(%d)[%s]" % (d, s)
            out.append(s if c == 1 else "%s*%s" % (c, s))
        return " + ".join(out)


class RewriteContext:
    """Everything the rewriter needs: the basis B and T-basis C, degrees, r.

    ``pb`` is a Lie presentation whose generators are the B-basis followed
    by the C-basis; its structure constants are the brackets b[s]b' expanded
    in that basis.  ``source`` is the presentation leaf elements are written
    in and ``expansion`` maps each source generator to an element of ``pb``
    (identity by default).  With ``quotient=True`` every term of length at
    least 2 and degree at least ``r`` is deleted: this is the normal form in
    A = U/I.
    """

    def __init__(self, pb, degrees=None, central=(), source=None, expansion=None,
                 r=None, quotient=False, budget=DEFAULT_BUDGET, early_prune=True):
        if pb.kind != LIE:
            raise InputError("rewriting needs a Lie presentation")
        self.pb = pb
        self.deg = list(pb.weights) if degrees is None else list(degrees)
        if len(self.deg) != pb.rank:
            raise InputError("one degree per basis generator expected")
        self.central = frozenset(central)
        self.source = pb if source is None else source
        self.expansion = expansion
        if quotient and r is None:
            raise InputError("the quotient normal form needs r")
        self.r = r
        self.quotient = quotient
        self.early_prune = early_prune
        self.budget = budget
        self.steps = 0
        self._lw = {}

    @classmethod
    def plain(cls, p, degrees=None, **kw):
        """Context with B = free generators and C = torsion generators of ``p``."""
        return cls(p, degrees, central=p.torsion, **kw)

    def with_quotient(self, flag=True):
        return RewriteContext(self.pb, self.deg, self.central, self.source,
                              self.expansion, self.r, flag, self.budget, self.early_prune)

    # -- helpers --------------------------------------------------------

    def word_degree(self, w):
        return sum(self.deg[g] for g in w.gens) + sum(w.indices)

    def is_I_term(self, d, w):
        if len(w) < 2 or self.r is None:
            return False
        return self.word_degree(w) >= self.r or any(g in self.central for g in w.gens)

    def _tick(self):
        self.steps += 1
        if self.steps > self.budget:
            raise BudgetExceeded("rewriting exceeded %d steps" % self.budget)

    def _prune(self, d):
        if not self.quotient:
            return d
        return {k: c for k, c in d.items() if not self.is_I_term(*k)}

    def expand(self, e):
        """A source element as an element of ``pb``."""
        if self.expansion is None:
            return e
        out = Element()
        for (g, k), c in e.items():
            out = out + self.pb.derive(self.expansion[g], k) * c
        return out

    def element_expansion(self, e):
        """Single-letter expansion of a source element."""
        e = self.expand(e)
        return WExpansion({(k, ConfWord.single(g)): c for (g, k), c in e.items()})

    def _derive(self, d, k):
        if not k:
            return d
        out = {}
        tors = self.pb.torsion
        for (n, w), c in d.items():
            if len(w) == 1 and w.gens[0] in tors:
                continue
            _acc(out, (n + k, w), c * comb(n + k, k))
        return out

    # -- the rewriting rules ------------------------------------------

    def letter_times_word(self, b, p, w):
        """b(p) w for a basis letter b and an ordered word w, as a dict."""
        if b in self.pb.torsion:
            # every coefficient of b(p)X involves c(j) with j >= 0
            return {}
        if (self.quotient and self.early_prune and self.r is not None
                and (self.deg[b] + p + self.word_degree(w) >= self.r
                     or b in self.central or any(g in self.central for g in w.gens))):
            return {}
        if len(w) == 1:
            return {(0, w.prepend(b, p)): Fraction(1)}
        b1, q = w.head()
        if (p, b) >= (q, b1):
            return {(0, w.prepend(b, p)): Fraction(1)}
        key = (b, p, w)
        r = self._lw.get(key)
        if r is not None:
            return r
        self._tick()
        rest = w.tail()
        out = {}
        # b(p)(b1(q)X) = b1(q)(b(p)X) + sum_s C(p,s) (b[s]b1)(p+q-s) X
        inner = self.letter_times_word(b, p, rest)
        _acc_all(out, self._apply_letter(b1, q, inner))
        for s in range(min(p, self.pb.N(b, b1) - 1) + 1):
            e = self.pb.product(b, b1, s)
            if not e:
                continue
            M = p + q - s
            cs = comb(p, s)
            for (g, k), c in e.items():
                if k > M:
                    continue
                f = c * cs * (-1) ** k * comb(M, k)
                _acc_all(out, self.letter_times_word(g, M - k, rest), f)
        out = self._prune(out)
        self._lw[key] = out
        return out

    def _apply_letter(self, b, p, d):
        """b(p) applied to sum c D^(n) w (right D-rule, then letter_times_word)."""
        out = {}
        for (n, w), c in d.items():
            for t in range(min(p, n) + 1):
                sub = self.letter_times_word(b, p - t, w)
                if sub:
                    _acc_all(out, self._derive(sub, n - t), c * comb(p, t))
        return out

    def word_times_word(self, w1, m, w2):
        """w1(m) w2 for ordered words, via conformal associativity on w1."""
        if len(w1) == 1:
            return self.letter_times_word(w1.gens[0], m, w2)
        self._tick()
        b1, n1 = w1.head()
        rest = w1.tail()
        out = {}
        # (b1(n1)R)(m)Y = sum_s (-1)^s C(n1,s) b1(n1-s)(R(m+s)Y)
        for s in range(n1 + 1):
            inner = self.word_times_word(rest, m + s, w2)
            if inner:
                _acc_all(out, self._apply_letter(b1, n1 - s, inner), (-1) ** s * comb(n1, s))
        return self._prune(out)

    def product(self, X, Y, n):
        """X(n)Y for two expansions."""
        if n < 0:
            raise InputError("n-products need n >= 0")
        out = {}
        for (i, w1), a in X.terms.items():
            if i > n:
                continue
            m = n - i
            ca = a * (-1) ** i * comb(n, i)
            for (j, w2), b in Y.terms.items():
                for s in range(min(m, j) + 1):
                    sub = self.word_times_word(w1, m - s, w2)
                    if sub:
                        _acc_all(out, self._derive(sub, j - s), ca * b * comb(m, s))
        return WExpansion(self._prune(out))

    def derive(self, X, k):
        return WExpansion(self._prune(self._derive(X.terms, k)))

    def rewrite(self, tree):
        if isinstance(tree, Leaf):
            return self.element_expansion(tree.element)
        if isinstance(tree, Derivative):
            return self.derive(self.rewrite(tree.inner), tree.k)
        if isinstance(tree, Product):
            return self.product(self.rewrite(tree.left), self.rewrite(tree.right), tree.n)
        if isinstance(tree, ConfWord):
            return self.rewrite(word_to_tree(self.source, tree))
        raise InputError("not an expression tree: %r" % (tree,))

    def reduce(self, X):
        """Delete I-terms (normal form in A)."""
        return WExpansion({k: c for k, c in X.terms.items() if not self.is_I_term(*k)})

    def degree_guarantee(self, X):
        """min over terms of deg w - n (infinite for 0)."""
        return min((self.word_degree(w) - d for d, w in X.terms), default=math.inf)


def rewrite_to_W(ctx, expr):
    """Expansion of an expression tree (or a ConfWord) in the W-basis."""
    return ctx.rewrite(expr)


def preconf_product(ctx, x, y, n):
    return ctx.product(x, y, n)


# ---------------------------------------------------------------------------
# checks

def leading_term_report(p, words, n_values, central=()):
    """The triangularity behind the W-basis: for each word w and n, the
    minimal term among the longest PBW monomials of w(-n-1) (modulo N) is
    b_1(n_1)...b_{l-1}(n_{l-1}) b_l(-n-1); and all these coefficient
    vectors are linearly independent.
    """
    U = UAlgebra(p, central)
    rep = CheckReport("leading_term", {"words": len(words), "n": list(n_values)})
    ech = Echelon()
    names = p.names
    for w in words:
        for n in n_values:
            rep.checked += 1
            u, _ = word_coefficient(U, w, -n - 1).split(U.central)
            expected = tuple(w.index_letters()) + (CoeffLetter(-n - 1, w.gens[-1]),)
            lead = None
            if u:
                top = max(len(m) for m in u.terms)
                lead = min((m for m in u.terms if len(m) == top),
                           key=lambda m: tuple(ORDER.key(x) for x in reversed(m)))
            if lead != expected:
                rep.violations.append({
                    "kind": "wrong_leading_term", "word": w.fmt(names), "n": n,
                    "expected": UElement({expected: 1}).fmt(p),
                    "found": None if lead is None else UElement({lead: 1}).fmt(p)})
            if not ech.add(u.terms):
                rep.violations.append({"kind": "dependent", "word": w.fmt(names), "n": n})
    return rep


def ordered_words(p, gens, max_len, max_index):
    """All ordered words (W-basis shape) over ``gens`` up to the given bounds."""
    gens = sorted(gens)
    out = [ConfWord.single(g) for g in gens]
    frontier = list(out)
    for _ in range(max_len - 1):
        nxt = []
        for w in frontier:
            for g in gens:
                for n in range(max_index + 1):
                    if len(w) >= 2:
                        g1, n1 = w.head()
                        if (n, g) < (n1, g1):
                            continue
                    nxt.append(w.prepend(g, n))
        out.extend(nxt)
        frontier = nxt
    return out


def check_adconf(p, m_max, n_max, window, tails=None):
    """a(m)(b(n)X) - b(n)(a(m)X) = sum_s C(m,s) (a[s]b)(m+n-s)X, coefficientwise.

    Both sides are evaluated through the series oracle on the coefficient
    window, for generators a, b and tails X (generators by default).
    """
    U = UAlgebra(p)
    lo, hi = window
    if tails is None:
        tails = [Leaf(p.gen(g)) for g in range(p.rank)]
    rep = CheckReport("adconf", {"m_max": m_max, "n_max": n_max, "window": [lo, hi]})
    memo = {}
    for a, b in iproduct(range(p.rank), repeat=2):
        A, B = Leaf(p.gen(a)), Leaf(p.gen(b))
        for X in tails:
            for m, n in iproduct(range(m_max + 1), range(n_max + 1)):
                rep.checked += 1
                lhs_t = [(Product(A, Product(B, X, n), m), 1), (Product(B, Product(A, X, m), n), -1)]
                rhs_t = []
                for s in range(m + 1):
                    e = nth_product(p, p.gen(a), p.gen(b), s)
                    if e:
                        rhs_t.append((Product(Leaf(e), X, m + n - s), comb(m, s)))
                for k in range(lo, hi + 1):
                    lhs = UElement()
                    for t, c in lhs_t:
                        lhs = lhs + tree_coefficient(U, t, k, None, memo) * c
                    rhs = UElement()
                    for t, c in rhs_t:
                        rhs = rhs + tree_coefficient(U, t, k, None, memo) * c
                    if lhs != rhs:
                        rep.violations.append({
                            "a": p.names[a], "b": p.names[b], "m": m, "n": n, "k": k,
                            "lhs": lhs.fmt(p), "rhs": rhs.fmt(p)})
                        break
    return rep


def oracle_agreement(ctx, tree, window):
    """Compare the symbolic expansion of ``tree`` with its series coefficients.

    Returns a list of (k, symbolic, direct) mismatches (empty on success).
    """
    U = UAlgebra(ctx.pb, ctx.central)
    X = ctx.rewrite(tree)
    expand = ctx.expand if ctx.expansion is not None else None
    memo = {}
    bad = []
    lo, hi = window
    for k in range(lo, hi + 1):
        sym = expansion_coefficient(U, X, k)
        direct = tree_coefficient(U, tree, k, expand, memo)
        if sym != direct:
            bad.append((k, sym, direct))
    return bad
