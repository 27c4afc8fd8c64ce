"""Locality functions S(l) of a generating set, and the Dong bound.

S(l) is the least S such that every word g_1(n_1)...(n_{l-1})g_l in the
generators, with any parenthesisation, vanishes once n_1 + ... + n_{l-1}
is at least S.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product as iproduct

from .core import CheckReport, Element, element_locality, nth_product
from .linalg import Echelon


# ---------------------------------------------------------------------------
# word shapes

@lru_cache(maxsize=None)
def tree_shapes(l):
    """All binary trees with l leaves, in Catalan order.

    A leaf is ``None``; an inner node is a pair (left, right).
    """
    if l == 1:
        return (None,)
    out = []
    for cut in range(1, l):
        for a in tree_shapes(cut):
            for b in tree_shapes(l - cut):
                out.append((a, b))
    return tuple(out)


def index_tuples(k, total):
    """All k-tuples of nonnegative integers with the given sum, in colex order."""
    if k == 0:
        if total == 0:
            yield ()
        return
    if k == 1:
        yield (total,)
        return
    for last in range(total + 1):
        for head in index_tuples(k - 1, total - last):
            yield head + (last,)


def fill_shape(shape, leaves, indices):
    """Attach leaves (left to right) and indices (preorder on inner nodes).

    Returns a nested tuple: a leaf value, or (left, n, right).
    """
    leaves = iter(leaves)
    indices = iter(indices)

    def go(s):
        if s is None:
            return next(leaves)
        n = next(indices)
        left = go(s[0])
        return (left, n, go(s[1]))

    return go(shape)


def format_word(word, names, bracket="()"):
    """``e(0)(f(1)h)`` style rendering of a filled shape over generator indices."""
    o, c = bracket

    def go(w, top):
        if not isinstance(w, tuple):
            return names[w]
        left, n, right = w
        s = "%s%s%d%s%s" % (go(left, False), o, n, c, go(right, False))
        return s if top else "(%s)" % s

    return go(word, True)


def evaluate_word(p, word, memo=None, values=None):
    """Value of a filled shape in the algebra, via nth_product.

    Leaves are generator indices, or positions in ``values`` when given.
    """
    if memo is not None and word in memo:
        return memo[word]
    if not isinstance(word, tuple):
        val = p.gen(word) if values is None else values[word]
    else:
        left, n, right = word
        a = evaluate_word(p, left, memo, values)
        val = Element()
        if a:
            b = evaluate_word(p, right, memo, values)
            if b and n < element_locality(p, a, b):
                val = nth_product(p, a, b, n)
    if memo is not None:
        memo[word] = val
    return val


# ---------------------------------------------------------------------------
# structural bound

def _sc_dpow(p):
    return max((e.max_dpow() for e in p.sc.values()), default=0)


def structural_index_bound(p, gens, l):
    """An s such that every length-l word with index sum > s is zero.

    A word u of length l carries D-powers at most delta(l); a product
    u(n)v of such words can only be nonzero for n < N + delta(u) + delta(v),
    N the largest locality among the generators involved.
    """
    vals, _ = _resolve(p, gens)
    gset = sorted({g for v in vals for g, _ in v.terms()})
    N = max((p.N(a, b) for a in gset for b in gset), default=0)
    if N == 0 or not vals:
        return -1
    d = _sc_dpow(p)
    delta = {1: max(v.max_dpow() for v in vals)}
    smax = {1: 0}
    for k in range(2, l + 1):
        best_s, best_d = -1, 0
        for cut in range(1, k):
            s = smax[cut] + smax[k - cut] + N - 1 + delta[cut] + delta[k - cut]
            best_s = max(best_s, s)
            best_d = max(best_d, delta[k - cut] + d)
        smax[k], delta[k] = best_s, best_d
    return smax[l]


# ---------------------------------------------------------------------------
# locality function

@dataclass
class LocalityValue:
    """S(l) for one length.  ``status`` is "exact" or "inconclusive"."""

    length: int
    status: str
    S: int = None
    lower_bound: int = 0
    witness: str = None
    budget: int = 0
    structural_bound: int = 0

    @property
    def exact(self):
        return self.status == "exact"

    def to_dict(self):
        return {"length": self.length, "status": self.status, "S": self.S,
                "lower_bound": self.lower_bound, "witness": self.witness,
                "n_budget": self.budget, "structural_bound": self.structural_bound}


def _resolve(p, gens):
    """(values, names) of a generating set given by names, indices or elements."""
    if gens is None:
        gens = range(p.rank)
    vals, names = [], []
    for g in gens:
        if isinstance(g, Element):
            vals.append(g)
            names.append("[%s]" % p.fmt(g))
        else:
            i = p.index(g) if isinstance(g, str) else g
            vals.append(p.gen(i))
            names.append(p.names[i])
    return vals, names


def locality_function(p, gens=None, l=2, n_budget=None, method="span", threads=None):
    """S(l) for the generators ``gens`` (all generators by default).

    ``method="span"`` builds the spans V(l, s) of all words of length l and
    index sum s from shorter ones; ``method="enumerate"`` evaluates every
    word shape one by one (the slow, independent oracle).  The result is
    exact when ``n_budget`` reaches the structural bound; otherwise it is
    marked inconclusive and carries the lower bound seen so far.
    """
    vals, names = _resolve(p, gens)
    bound = structural_index_bound(p, gens, l)
    budget = bound if n_budget is None else n_budget
    top = min(bound, budget)
    if method == "span":
        best, witness = _span_scan(p, vals, names, l, top)
    elif method == "enumerate":
        best, witness = _enumerate_scan(p, vals, names, l, top, threads)
    else:
        raise ValueError("unknown method %r" % (method,))
    S = best + 1 if best is not None else 0
    if budget >= bound:
        return LocalityValue(l, "exact", S, S, witness, budget, bound)
    return LocalityValue(l, "inconclusive", None, S, witness, budget, bound)


def _span_scan(p, vals, names, l, top):
    """Largest index sum <= top of a nonzero word of length l."""
    # spans[k][s] = list of (vector, witness) forming a basis of V(k, s)
    spans = {1: {0: []}}
    ech = Echelon()
    for i, v in enumerate(vals):
        if ech.add(v._terms):
            spans[1][0].append((v, i))
    for k in range(2, l + 1):
        layer = {}
        for s in range(top + 1):
            ech = Echelon()
            basis = []
            for cut in range(1, k):
                for s1, left in spans[cut].items():
                    for s2, right in spans[k - cut].items():
                        n = s - s1 - s2
                        if n < 0:
                            continue
                        for u, wu in left:
                            for v, wv in right:
                                if n >= element_locality(p, u, v):
                                    continue
                                x = nth_product(p, u, v, n)
                                if x and ech.add(x._terms):
                                    basis.append((x, (wu, n, wv)))
            if basis:
                layer[s] = basis
        spans[k] = layer
    if not spans[l]:
        return None, None
    s = max(spans[l])
    return s, format_word(spans[l][s][0][1], names)


def _enumerate_scan(p, vals, names, l, top, threads=None):
    if l == 1:
        return (0, names[0]) if any(vals) else (None, None)
    shapes = tree_shapes(l)
    tasks = [(shape, leaves) for shape in shapes
             for leaves in iproduct(range(len(vals)), repeat=l)]

    def run(task):
        shape, leaves = task
        memo = {}
        found = None
        for s in range(top, -1, -1):
            for idx in index_tuples(l - 1, s):
                w = fill_shape(shape, leaves, idx)
                if evaluate_word(p, w, memo, vals):
                    found = (s, w)
                    break
            if found:
                break
        return found

    if threads and threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            results = list(ex.map(run, tasks))
    else:
        results = [run(t) for t in tasks]
    best = None
    for r in results:
        if r and (best is None or r[0] > best[0]):
            best = r
    if best is None:
        return None, None
    return best[0], format_word(best[1], names)


def locality_table(p, gens=None, lengths=(2, 3, 4), n_budget=None, method="span"):
    return [locality_function(p, gens, l, n_budget, method) for l in lengths]


# ---------------------------------------------------------------------------
# Dong bound

def dong_bound(N, l):
    """(1/2) N l (l-1) - l + 1."""
    return Fraction(N * l * (l - 1), 2) - l + 1


def dong_bound_check(p, gens=None, N=None, l_max=4, n_budget=None):
    """Compare S(l) with the quadratic bound for 2 <= l <= l_max."""
    if N is None:
        vals, _ = _resolve(p, gens)
        N = max((element_locality(p, a, b) for a in vals for b in vals), default=0)
    rep = CheckReport("dong_bound", {"N": N, "l_max": l_max})
    for l in range(2, l_max + 1):
        rep.checked += 1
        val = locality_function(p, gens, l, n_budget)
        b = dong_bound(N, l)
        if not val.exact:
            rep.violations.append({"l": l, "kind": "inconclusive",
                                   "lower_bound": val.lower_bound, "bound": str(b)})
        elif val.S > b:
            rep.violations.append({"l": l, "S": val.S, "bound": str(b),
                                   "witness": val.witness})
    return rep
