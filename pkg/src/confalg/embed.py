"""Embedding a Lie conformal algebra whose heavy words vanish into an
associative conformal algebra A = U/I.

Pipeline, given weights on the generators and a threshold r:

1. ``hypothesis_scan``: spans P_w of all words of weight exactly w < r,
   and a certificate that every word of weight >= r is zero.
2. ``EmbedContext``: the filtration L'_i (span of D^m-shifted words of
   weight - m >= i), the degree deg' and deg, and the layers
   L_i = {a : D^n a in L'_{i-n} for some n}.
3. ``basis_B`` / ``torsion_ideal_T``: the graded basis B of L mod T and
   a k[D]-basis C of T = k[D] L_r.
4. ``build_enveloping``: the presentation rebased on B then C, the
   rewriting context, and the normal form of A (W-words of length >= 2
   and degree >= r deleted).
5. ``verify_embedding``: injectivity, vanishing of heavy words, the
   nilpotency index and the locality bound in A.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from itertools import product as iproduct
from math import comb

from .constructions import kd_submodule_basis
from .core import (LIE, CheckReport, Element, GeneratorInfo, InputError,
                   Presentation, apply_derivation, element_locality, is_central,
                   nth_product)
from .envelope import (DEFAULT_BUDGET, Leaf, Product, RewriteContext,
                       WExpansion)
from .linalg import Echelon, kernel, rref
from .locality import fill_shape, format_word, index_tuples, locality_function, tree_shapes


class InconclusiveDegree(RuntimeError):
    """A degree (a supremum over D-powers) did not stabilise within bounds."""


class PipelineBudgetError(RuntimeError):
    """A fixpoint or search exceeded its configured bound."""


class HypothesisViolated(Exception):
    """Some word of weight >= r is nonzero; carries the witness word."""

    def __init__(self, message, witness=None, weight=None):
        super().__init__(message)
        self.witness = witness
        self.weight = weight


@dataclass
class Bounds:
    n_d: int = 8             # D-powers scanned when computing deg
    window: int = 3          # consecutive equal values that certify stabilisation
    max_span_dim: int = 400  # total dimension allowed for the word spans
    max_rounds: int = 64     # fixpoint rounds for the word spans
    expand_dpow: int = 16    # largest D-power tried when rewriting in the new basis
    budget: int = DEFAULT_BUDGET

    def to_dict(self):
        return dict(self.__dict__)


def _lie_names(p, word):
    return format_word(word, p.names, "[]")


# ---------------------------------------------------------------------------
# 1. word spans and the hypothesis

@dataclass
class ScanResult:
    ok: bool
    r: int
    spans: dict                      # w -> list of (Element, witness word)
    witness: str = None
    weight: int = None
    checked: int = 0

    def to_dict(self):
        return {"ok": self.ok, "r": self.r, "witness": self.witness,
                "weight": self.weight, "checked": self.checked,
                "span_dims": {str(w): len(v) for w, v in self.spans.items()}}


def word_spans(p, r, bounds=None):
    """Bases of P_w, the span of Lie words of weight exactly w, for w < r.

    Words of weight w are generators of weight w and products u[n]v with
    wt u + wt v + n = w; the spans are grown to a fixpoint.  Each basis
    vector carries a witness word (a nested tuple over generator indices).
    """
    bounds = bounds or Bounds()
    weights = p.weights
    spans = {w: [] for w in range(max(r, 0))}
    echs = {w: Echelon() for w in spans}
    for g in range(p.rank):
        w = weights[g]
        if w < r and echs[w].add(Element.gen(g)._terms):
            spans[w].append((Element.gen(g), g))
    done = set()
    for _ in range(bounds.max_rounds):
        grew = False
        for w in range(r):
            for w1 in range(w + 1):
                for w2 in range(w - w1 + 1):
                    n = w - w1 - w2
                    for i, (u, wu) in enumerate(list(spans[w1])):
                        for j, (v, wv) in enumerate(list(spans[w2])):
                            key = (w1, i, w2, j, n)
                            if key in done:
                                continue
                            done.add(key)
                            if n >= element_locality(p, u, v):
                                continue
                            x = nth_product(p, u, v, n)
                            if x and echs[w].add(x._terms):
                                spans[w].append((x, (wu, n, wv)))
                                grew = True
            if sum(len(b) for b in spans.values()) > bounds.max_span_dim:
                raise PipelineBudgetError("word spans exceed dimension %d" % bounds.max_span_dim)
        if not grew:
            return spans
    raise PipelineBudgetError("word spans did not close in %d rounds" % bounds.max_rounds)


def hypothesis_scan(p, r, bounds=None):
    """Certify that every word of weight >= r vanishes.

    A nonzero word of weight >= r would have a top product u[n]v whose
    factors have weight < r (else recurse into the factor), so it suffices
    that generators all have weight < r and P_a[n]P_b = 0 whenever
    a, b < r <= a + b + n.
    """
    if r < 0:
        raise InputError("r must be nonnegative")
    for g, w in enumerate(p.weights):
        if w >= r:
            return ScanResult(False, r, {}, p.names[g], w, 1)
    spans = word_spans(p, r, bounds)
    checked = 0
    for w1, w2 in iproduct(range(r), repeat=2):
        for u, wu in spans[w1]:
            for v, wv in spans[w2]:
                for n in range(max(0, r - w1 - w2), element_locality(p, u, v)):
                    checked += 1
                    if nth_product(p, u, v, n):
                        return ScanResult(False, r, spans, _lie_names(p, (wu, n, wv)),
                                          w1 + w2 + n, checked)
    return ScanResult(True, r, spans, None, None, checked)


def find_admissible_r(p, r_max, bounds=None):
    """Smallest r <= r_max passing the scan, with the failed attempts."""
    attempts = []
    for r in range(r_max + 1):
        res = hypothesis_scan(p, r, bounds)
        attempts.append(res)
        if res.ok:
            return r, attempts
    return None, attempts


# ---------------------------------------------------------------------------
# 2. filtrations and degrees

class EmbedContext:
    """Filtration data for a weighted Lie presentation and a threshold r."""

    def __init__(self, p, r, bounds=None, weights=None):
        if p.kind != LIE:
            raise InputError("the embedding pipeline needs a Lie presentation")
        if weights is not None:
            p = p.with_weights(weights)
        self.p = p
        self.r = r
        self.bounds = bounds or Bounds()
        scan = hypothesis_scan(p, r, self.bounds)
        if not scan.ok:
            raise HypothesisViolated(
                "nonzero word of weight %s >= r=%d: %s" % (scan.weight, r, scan.witness),
                scan.witness, scan.weight)
        self.scan = scan
        self.spans = scan.spans
        self.free = [g for g in range(p.rank) if g not in p.torsion]
        self.dmax = max((u.max_dpow() for b in self.spans.values() for u, _ in b), default=0)
        # every free element of L_0 has D-degree at most r - 1 + dmax
        self.K = max(r - 1 + self.dmax, 0) + 1
        self.lowest = -(self.K + self.bounds.n_d + 2)
        self._build_filtration()
        self._layers = {}
        self._B = None
        self._C = None

    # -- L'_i --------------------------------------------------------------

    def _build_filtration(self):
        p = self.p
        self.ech = Echelon()
        self.level_end = {}
        for level in range(self.r - 1, self.lowest - 1, -1):
            for w in range(max(level, 0), self.r):
                for u, _ in self.spans[w]:
                    x = p.derive(u, w - level)
                    if x:
                        self.ech.add(x._terms, tag=level)
            self.level_end[level] = len(self.ech.rows)

    def _limit(self, level):
        if level >= self.r:
            return 0
        if level < self.lowest:
            raise InconclusiveDegree("filtration level %d below the computed window" % level)
        return self.level_end[level]

    def in_Lprime(self, x, level):
        return not self.ech.reduce(x._terms, limit=self._limit(level))[0]

    def dprime(self, x):
        """deg' x = max{i : x in L'_i}; infinite for 0."""
        res, _, last = self.ech.reduce(x._terms)
        if res:
            raise InconclusiveDegree("deg' of %s lies below level %d" % (self.p.fmt(x), self.lowest))
        if last < 0:
            return math.inf
        return self.ech.rows[last][3]

    def degree_profile(self, a):
        """n + deg'(D^n a) for n = 0..n_d (nondecreasing in n)."""
        out = []
        for n in range(self.bounds.n_d + 1):
            x = self.p.derive(a, n)
            out.append(math.inf if not x else n + self.dprime(x))
        return out

    def degree(self, a):
        """deg a = sup_n (n + deg' D^n a), certified by stabilisation."""
        if not a:
            return math.inf
        prof = self.degree_profile(a)
        if math.isinf(prof[-1]):
            return math.inf
        W, nd = self.bounds.window, self.bounds.n_d
        tail = prof[-W:]
        if len(tail) == W and len(set(tail)) == 1 and nd - W + 1 > nd // 2:
            return tail[-1]
        raise InconclusiveDegree("deg of %s did not stabilise: %s" % (self.p.fmt(a), prof))

    # -- L_i ---------------------------------------------------------------

    def window_basis(self):
        """The k-basis D^(k) g (k <= K) of the window V_K, torsion at k = 0."""
        out = []
        for g in range(self.p.rank):
            for k in range(1 if g in self.p.torsion else self.K + 2):
                out.append(Element.gen(g, k))
        return out

    def layer(self, i):
        """A basis of L_i (inside V_K), computed as the preimage of
        L'_{i-N} under D^N and certified stable in N."""
        if i in self._layers:
            return self._layers[i]
        V = self.window_basis()
        nd, W = self.bounds.n_d, self.bounds.window
        dims, ker = [], []
        for N in range(nd // 2, nd + 1):
            lim = self._limit(i - N)
            res = [self.ech.reduce(self.p.derive(v, N)._terms, limit=lim)[0] for v in V]
            ker = kernel(res)
            dims.append(len(ker))
        if len(dims) < W or len(set(dims[-W:])) != 1:
            raise InconclusiveDegree("layer L_%d did not stabilise: dims %s" % (i, dims))
        basis = []
        for rel in ker:
            e = Element()
            for idx, c in rel.items():
                e = e + V[idx] * c
            basis.append(e)
        basis = [Element(v) for v in rref([b._terms for b in basis], key=_nice_key)]
        self._layers[i] = basis
        return basis

    def dprime_table(self):
        return {self.p.names[g]: self.dprime(Element.gen(g)) for g in range(self.p.rank)}

    def degree_table(self):
        return {self.p.names[g]: self.degree(Element.gen(g)) for g in range(self.p.rank)}


def _nice_key(key):
    g, k = key
    return (k, g)


def weight_degree_table(p, weights, r, bounds=None):
    """(deg', deg) of every generator, plus deg' of the word-span bases."""
    ctx = EmbedContext(p, r, bounds, weights)
    dp = ctx.dprime_table()
    spans = {}
    for w, basis in ctx.spans.items():
        spans[w] = [(_lie_names(ctx.p, wit), ctx.dprime(u)) for u, wit in basis]
    return dp, ctx.degree_table(), spans


# ---------------------------------------------------------------------------
# 3. the bases B and C

def basis_B(ctx):
    """Graded sets B_i: a basis of L_i modulo L_{i+1} + D L_{i+1}, 0 <= i < r."""
    if ctx._B is not None:
        return ctx._B
    B = {}
    for i in range(ctx.r):
        lower = Echelon()
        for v in ctx.layer(i + 1):
            lower.add(v._terms)
            lower.add(ctx.p.derive(v, 1)._terms)
        B[i] = [v for v in ctx.layer(i) if lower.add(v._terms)]
    ctx._B = B
    return B


def torsion_ideal_T(ctx):
    """A k[D]-basis (free part, D-killed part) of T = k[D] L_r; checks centrality."""
    if ctx._C is not None:
        return ctx._C
    free, tors = kd_submodule_basis(ctx.p, ctx.layer(ctx.r))
    for c in free + tors:
        if not is_central(ctx.p, c):
            raise RuntimeError("element %s of T is not central" % ctx.p.fmt(c))
    ctx._C = (free, tors)
    return ctx._C


def _basis_name(p, e, prefix, k, used):
    items = e.items()
    if len(items) == 1 and items[0][0][1] == 0 and items[0][1] == 1:
        name = p.names[items[0][0][0]]
    else:
        name = "%s%d" % (prefix, k)
    while name in used:
        name += "'"
    used.add(name)
    return name


class Rebased:
    """L written in the basis B then C: presentation, degrees and the
    expansion of every original generator."""

    def __init__(self, ctx):
        p = ctx.p
        B = basis_B(ctx)
        Cf, Ct = torsion_ideal_T(ctx)
        elems, degs, infos = [], [], []
        used = set()
        for i in range(ctx.r):
            for b in B[i]:
                elems.append(b)
                degs.append(i)
                infos.append(GeneratorInfo(_basis_name(p, b, "b", len(elems), used), i, 0))
        self.nB = len(elems)
        for c in Cf:
            elems.append(c)
            d = ctx.degree(c)
            degs.append(d)
            infos.append(GeneratorInfo(_basis_name(p, c, "t", len(elems), used), ctx.r, 0))
        for c in Ct:
            elems.append(c)
            degs.append(math.inf)
            infos.append(GeneratorInfo(_basis_name(p, c, "t", len(elems), used), ctx.r, 1))
        self.elements = elems
        self.degrees = degs
        self.central = frozenset(range(self.nB, len(elems)))
        tors = frozenset(k for k, g in enumerate(infos) if g.torsion_order)
        self._tors = tors
        self.expansion = self._solve_expansion(ctx, elems, tors)
        locality, sc = {}, {}
        for a, xa in enumerate(elems):
            for b, xb in enumerate(elems):
                top = 0
                for n in range(element_locality(p, xa, xb)):
                    val = self.to_new(nth_product(p, xa, xb, n))
                    if val:
                        sc[(a, b, n)] = val
                        top = n + 1
                locality[(a, b)] = top
        self.pb = Presentation(LIE, tuple(infos), locality, sc)

    def _solve_expansion(self, ctx, elems, tors):
        p = ctx.p
        for E in range(1, ctx.bounds.expand_dpow + 1):
            ech = Echelon(track=True)
            tags = []
            for k, x in enumerate(elems):
                for n in range(1 if k in tors else E + 1):
                    v = p.derive(x, n)
                    tags.append((k, n))
                    if not ech.add(v._terms):
                        raise RuntimeError("B and C are dependent over k[D]: D^(%d)%s"
                                           % (n, p.fmt(x)))
            out = {}
            for g in range(p.rank):
                coords = ech.express(Element.gen(g)._terms)
                if coords is None:
                    break
                out[g] = Element({tags[i]: c for i, c in coords.items()})
            else:
                return out
        raise PipelineBudgetError("generators not expressible in B and C with D-powers <= %d"
                                  % ctx.bounds.expand_dpow)

    def to_new(self, e):
        """An element of L in the new basis."""
        out = Element()
        for (g, k), c in e.items():
            out = out + apply_derivation(self.expansion[g], k, self._tors) * c
        return out

    def to_old(self, e):
        out = Element()
        for (k, n), c in e.items():
            out = out + apply_derivation(self.elements[k], n, ()) * c
        return out


# ---------------------------------------------------------------------------
# 4. the enveloping algebra

def ideal_I_membership(ctx, x):
    """True iff every term of x is a word of length >= 2 of degree >= r
    (words carrying a letter of T count as degree >= r)."""
    return all(ctx.is_I_term(d, w) for d, w in x.terms)


class EnvelopingAlgebra:
    """A = U/I with normal-form n-products and the embedding of L.

    Products are computed in U by rewriting and then reduced modulo I.
    With ``fast=True`` the rewriter deletes heavy terms as it goes, which
    is equivalent when I is an ideal and the rewriting respects degrees.
    """

    def __init__(self, ctx, rebased, fast=False):
        self.ctx = ctx
        self.rebased = rebased
        self.p = ctx.p
        self.r = ctx.r
        self.fast = fast
        self.U = RewriteContext(rebased.pb, rebased.degrees, rebased.central,
                                ctx.p, rebased.expansion, ctx.r, quotient=False,
                                budget=ctx.bounds.budget)
        self.rw = self.U.with_quotient(True) if fast else self.U
        self._memo = {}

    @property
    def names(self):
        return self.rebased.pb.names

    def reduce(self, X):
        return self.U.reduce(X)

    def embed(self, e):
        return self.reduce(self.U.element_expansion(e))

    def product(self, X, Y, n):
        return self.reduce(self.rw.product(X, Y, n))

    def derive(self, X, k):
        return self.reduce(self.U.derive(X, k))

    def evaluate(self, tree):
        """Value in A of an expression tree over L, reducing at every node."""
        r = self._memo.get(tree)
        if r is not None:
            return r
        if isinstance(tree, Leaf):
            r = self.embed(tree.element)
        elif isinstance(tree, Product):
            r = self.product(self.evaluate(tree.left), self.evaluate(tree.right), tree.n)
        else:
            r = self.derive(self.evaluate(tree.inner), tree.k)
        self._memo[tree] = r
        return r

    def word(self, nested):
        """Value of a nested (left, n, right) word over generator indices."""
        return self.evaluate(_nested_to_tree(self.p, nested))

    def vanishing_index(self, X, Y):
        """An m with X(m')Y in I for all m' >= m, by degree counting."""
        g = self.U.degree_guarantee(X) + self.U.degree_guarantee(Y)
        if math.isinf(g):
            return 0
        return max(0, self.r - g)

    def lie_bracket(self, X, Y, n):
        """X[n]Y = X(n)Y - sum_s (-1)^(n+s) D^(s)(Y(n+s)X) in A."""
        out = self.product(X, Y, n)
        top = max(self.vanishing_index(Y, X), n + 1)
        for s in range(top - n):
            term = self.product(Y, X, n + s)
            if term:
                out = out - self.derive(term, s) * ((-1) ** (n + s))
        return out


def _nested_to_tree(p, nested):
    if not isinstance(nested, tuple):
        return Leaf(p.gen(nested))
    left, n, right = nested
    return Product(_nested_to_tree(p, left), _nested_to_tree(p, right), n)


def build_enveloping(p, weights=None, r=1, bounds=None, fast=False):
    """Run the whole pipeline; raises HypothesisViolated with a witness word
    when some word of weight >= r is nonzero."""
    ctx = EmbedContext(p, r, bounds, weights)
    return EnvelopingAlgebra(ctx, Rebased(ctx), fast)


# ---------------------------------------------------------------------------
# 5. verification

@dataclass
class EmbedReport:
    window: int
    checks: dict = field(default_factory=dict)
    info: dict = field(default_factory=dict)
    timing: dict = field(default_factory=dict)

    @property
    def passed(self):
        return all(c.passed for c in self.checks.values())

    def to_dict(self):
        return {"window": self.window, "passed": self.passed,
                "checks": {k: v.to_dict() for k, v in self.checks.items()},
                "info": self.info, "timing": self.timing}


def nilpotency_index(p, max_length):
    """Least k <= max_length with every word of length k zero, else None."""
    for k in range(1, max_length + 1):
        if k == 1:
            if p.rank == 0:
                return 1
            continue
        if locality_function(p, None, k).S == 0:
            return k
    return None


def _words(p, length, sums):
    gens = range(p.rank)
    for s in sums:
        for shape in tree_shapes(length):
            for leaves in iproduct(gens, repeat=length):
                for idx in index_tuples(length - 1, s):
                    yield fill_shape(shape, leaves, idx)


def verify_embedding(env, window=4, index_slack=1, nil_index="auto"):
    """Checks (a) injectivity, (b) heavy words vanish, (c) nilpotency index
    kept, (d) locality bound in A.  See EmbedReport."""
    p, r = env.p, env.r
    rep = EmbedReport(window)
    rep.info = {"r": r, "weights": p.weights,
                "B": [env.names[k] for k in range(env.rebased.nB)],
                "C": [env.names[k] for k in sorted(env.rebased.central)],
                "degrees": {env.names[k]: (None if math.isinf(d) else d)
                            for k, d in enumerate(env.rebased.degrees)}}
    wmin = min(p.weights, default=0)

    t0 = time.perf_counter()
    a = CheckReport("injectivity", {"window": window})
    ech = Echelon()
    family = []
    for k, x in enumerate(env.rebased.elements):
        for n in range(1 if k in env.rebased._tors else window + 1):
            family.append(("D^(%d)%s" % (n, env.names[k]), p.derive(x, n)))
    for g in range(p.rank):
        for n in range(1 if g in p.torsion else window + 1):
            family.append(("D^(%d)%s" % (n, p.names[g]), p.gen(g, n)))
    images = Echelon()
    for label, x in family:
        ech.add(x._terms)
    for label, x in family:
        a.checked += 1
        img = env.embed(x)
        if env.rebased.to_old(_single_letters(img)) != x:
            a.violations.append({"kind": "image_mismatch", "element": label})
        if any(env.U.is_I_term(d, w) for d, w in img.terms):
            a.violations.append({"kind": "image_in_I", "element": label})
    for label, x in family:
        images.add({(d, w): c for (d, w), c in env.embed(x).terms.items()})
    if images.rank != ech.rank:
        a.violations.append({"kind": "rank_drop", "domain": ech.rank, "image": images.rank})
    rep.checks["a_injectivity"] = a
    rep.timing["a"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    b = CheckReport("heavy_words_vanish", {"max_length": window, "index_slack": index_slack})
    for l in range(2, window + 1):
        need = max(0, r - l * wmin)
        for wd in _words(p, l, range(need, need + index_slack + 1)):
            weight = sum(p.weights[g] for g in _leaves(wd)) + _index_sum(wd)
            if weight < r:
                continue
            b.checked += 1
            val = env.word(wd)
            if val:
                b.violations.append({"word": format_word(wd, p.names), "weight": weight,
                                     "value": val.fmt(env.names)})
    rep.checks["b_heavy_words"] = b
    rep.timing["b"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    k = nilpotency_index(p, window + 1) if nil_index == "auto" else nil_index
    c = CheckReport("nilpotency_index", {"index": k})
    if k is not None and k >= 2:
        top = max(r, 1) + index_slack
        for wd in _words(p, k, range(top + 1)):
            c.checked += 1
            val = env.word(wd)
            if val:
                c.violations.append({"word": format_word(wd, p.names), "value": val.fmt(env.names)})
    rep.checks["c_nilpotency"] = c
    rep.timing["c"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    d = CheckReport("locality_in_A", {"max_length": window})
    table = {}
    for l in range(2, window + 1):
        K = max(0, r - l * wmin)
        best = None
        for wd in _words(p, l, range(K + index_slack + 1)):
            d.checked += 1
            if env.word(wd):
                s = _index_sum(wd)
                if best is None or s > best[0]:
                    best = (s, wd)
        S = 0 if best is None else best[0] + 1
        table[l] = {"S": S, "bound": K}
        if S > K:
            d.violations.append({"l": l, "S": S, "bound": K,
                                 "witness": format_word(best[1], p.names)})
    rep.info["locality_in_A"] = table
    rep.checks["d_locality"] = d
    rep.timing["d"] = time.perf_counter() - t0
    return rep


def _single_letters(X):
    """sum c D^(n) b over the length-1 terms, as an element of the new basis."""
    return Element({(w.gens[0], d): c for (d, w), c in X.terms.items() if len(w) == 1})


def _leaves(wd):
    if not isinstance(wd, tuple):
        return [wd]
    return _leaves(wd[0]) + _leaves(wd[2])


def _index_sum(wd):
    if not isinstance(wd, tuple):
        return 0
    return wd[1] + _index_sum(wd[0]) + _index_sum(wd[2])


def check_embedded_brackets(env, n_max=None):
    """Does A^(-) restricted to the image of L reproduce the brackets of L?"""
    p = env.p
    rep = CheckReport("embedded_brackets", {"n_max": n_max})
    for a, b in iproduct(range(p.rank), repeat=2):
        A, B = p.gen(a), p.gen(b)
        top = element_locality(p, A, B) if n_max is None else n_max + 1
        for n in range(top):
            rep.checked += 1
            lhs = env.lie_bracket(env.embed(A), env.embed(B), n)
            rhs = env.embed(nth_product(p, A, B, n))
            if lhs != rhs:
                rep.violations.append({"a": p.names[a], "b": p.names[b], "n": n,
                                       "in_A": lhs.fmt(env.names), "image": rhs.fmt(env.names)})
    return rep


def check_associativity_in_A(env, m_max=2, n_max=2):
    """(a(m)b)(n)c = sum_s (-1)^s C(m,s) a(m-s)(b(n+s)c) for generators, in A."""
    p = env.p
    rep = CheckReport("associativity_in_A", {"m_max": m_max, "n_max": n_max})
    gens = [env.embed(p.gen(g)) for g in range(p.rank)]
    for (i, x), (j, y), (k, z) in iproduct(list(enumerate(gens)), repeat=3):
        for m, n in iproduct(range(m_max + 1), range(n_max + 1)):
            rep.checked += 1
            lhs = env.product(env.product(x, y, m), z, n)
            rhs = WExpansion()
            for s in range(m + 1):
                rhs = rhs + env.product(x, env.product(y, z, n + s), m - s) * ((-1) ** s * comb(m, s))
            if lhs != rhs:
                rep.violations.append({"a": p.names[i], "b": p.names[j], "c": p.names[k],
                                       "m": m, "n": n, "lhs": lhs.fmt(env.names),
                                       "rhs": rhs.fmt(env.names)})
    return rep
