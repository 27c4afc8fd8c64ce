"""Exact n-products on finitely presented conformal algebras.

An algebra is given by a :class:`Presentation`: a list of generators that form
a basis of the underlying k[D]-module (free generators, plus central torsion
generators ``c`` with ``Dc = 0``), a pairwise locality table and the structure
constants ``g(n)h`` for ``0 <= n < N(g, h)``.  Elements are finite sums of
``D^(k) g`` with divided powers ``D^(k) = D^k / k!``.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

LIE = "lie"
ASSOCIATIVE = "associative"


class InputError(ValueError):
    """Malformed input: unknown generator, negative index, bad presentation."""


def binom(n, k):
    """Binomial coefficient with an arbitrary integer top entry.

    ``binom(n, k) = n (n-1) ... (n-k+1) / k!`` for ``k >= 0`` and 0 for
    ``k < 0``; for ``n >= 0`` this is the usual one.
    """
    if k < 0:
        return 0
    if n >= 0:
        return comb(n, k) if k <= n else 0
    return (-1) ** k * comb(k - n - 1, k)


def to_fraction(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise InputError("floating point coefficients are not allowed: %r" % (x,))
    return Fraction(x)


class Element:
    """An immutable k-linear combination of ``D^(k) g``.

    Keys are ``(generator_index, dpow)``.  Zero coefficients are never
    stored and iteration is in canonical key order, so equality is
    structural.
    """

    __slots__ = ("_terms", "_items", "_hash")

    def __init__(self, terms=None):
        d = {}
        if terms:
            for key, c in dict(terms).items():
                c = to_fraction(c)
                if c:
                    g, k = key
                    if k < 0:
                        raise InputError("negative D-power in %r" % (key,))
                    d[(int(g), int(k))] = c
        self._terms = d
        self._items = tuple(sorted(d.items()))
        self._hash = None

    @classmethod
    def _raw(cls, d):
        e = cls.__new__(cls)
        e._terms = d
        e._items = tuple(sorted(d.items()))
        e._hash = None
        return e

    @classmethod
    def gen(cls, g, dpow=0, coeff=1):
        return cls({(g, dpow): coeff})

    def items(self):
        return self._items

    def terms(self):
        return dict(self._terms)

    def coeff(self, g, dpow=0):
        return self._terms.get((g, dpow), Fraction(0))

    def generators(self):
        return sorted({g for g, _ in self._terms})

    def max_dpow(self):
        return max((k for _, k in self._terms), default=-1)

    def __bool__(self):
        return bool(self._terms)

    def __len__(self):
        return len(self._terms)

    def __eq__(self, other):
        if isinstance(other, Element):
            return self._items == other._items
        if other == 0:
            return not self._terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self._items)
        return self._hash

    def __add__(self, other):
        d = dict(self._terms)
        for k, c in other._terms.items():
            x = d.get(k, 0) + c
            if x:
                d[k] = x
            else:
                d.pop(k, None)
        return Element._raw(d)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return Element._raw({k: -c for k, c in self._terms.items()})

    def __mul__(self, c):
        c = to_fraction(c)
        if not c:
            return Element._raw({})
        return Element._raw({k: c * x for k, x in self._terms.items()})

    __rmul__ = __mul__

    def __repr__(self):
        if not self._terms:
            return "Element(0)"
        return "Element(%s)" % (
            " + ".join("%s*D^(%d)g%d" % (c, k, g) for (g, k), c in self._items))


ZERO = Element()


def apply_derivation(e, k, torsion=()):
    """Apply ``D^(k)`` to ``e``.

    ``D^(k) D^(n) g = binom(n+k, k) D^(n+k) g``; terms on generators listed in
    ``torsion`` (``Dc = 0``) vanish once their D-power becomes positive.
    """
    if k < 0:
        raise InputError("negative derivation order %d" % k)
    if k == 0:
        return e
    d = {}
    for (g, n), c in e._terms.items():
        if g in torsion:
            continue
        d[(g, n + k)] = c * comb(n + k, k)
    return Element._raw(d)


@dataclass(frozen=True)
class GeneratorInfo:
    name: str
    weight: int = 0
    torsion_order: int = 0

    def __post_init__(self):
        if self.weight < 0:
            raise InputError("negative weight for %s" % self.name)
        if self.torsion_order not in (0, 1):
            raise InputError(
                "torsion_order %r for %s: only 0 (free) or 1 (Dc = 0) is supported"
                % (self.torsion_order, self.name))


@dataclass(frozen=True)
class Presentation:
    """Generators, locality bounds and structure constants of an algebra.

    ``locality[(i, j)]`` is N(g_i, g_j); a missing pair means 0.
    ``sc[(i, j, n)]`` is the Element g_i(n)g_j; missing entries are zero.
    """

    kind: str
    generators: tuple
    locality: dict = field(default_factory=dict)
    sc: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in (LIE, ASSOCIATIVE):
            raise InputError("unknown kind %r" % (self.kind,))
        names = [g.name for g in self.generators]
        if len(set(names)) != len(names):
            raise InputError("duplicate generator names")
        object.__setattr__(self, "generators", tuple(self.generators))
        object.__setattr__(self, "sc", {k: v for k, v in self.sc.items() if v})
        object.__setattr__(self, "_index", {n: i for i, n in enumerate(names)})
        object.__setattr__(
            self, "_torsion",
            frozenset(i for i, g in enumerate(self.generators) if g.torsion_order))

    @property
    def rank(self):
        return len(self.generators)

    @property
    def names(self):
        return [g.name for g in self.generators]

    @property
    def torsion(self):
        return self._torsion

    @property
    def weights(self):
        return [g.weight for g in self.generators]

    def index(self, name):
        try:
            return self._index[name]
        except KeyError:
            raise InputError("unknown generator %r" % (name,)) from None

    def gen(self, name, dpow=0, coeff=1):
        i = self.index(name) if isinstance(name, str) else name
        if i in self._torsion and dpow:
            return ZERO
        return Element.gen(i, dpow, coeff)

    def element(self, spec):
        """Build an element from ``{name: coeff}`` or ``{(name, dpow): coeff}``."""
        out = ZERO
        for key, c in spec.items():
            name, dpow = (key, 0) if not isinstance(key, tuple) else key
            out = out + self.gen(name, dpow, c)
        return out

    def N(self, i, j):
        return self.locality.get((i, j), 0)

    def product(self, i, j, n):
        if n < 0 or n >= self.N(i, j):
            return ZERO
        return self.sc.get((i, j, n), ZERO)

    def derive(self, e, k=1):
        return apply_derivation(e, k, self._torsion)

    def check_element(self, e):
        for g, k in e._terms:
            if not 0 <= g < self.rank:
                raise InputError("unknown generator index %d" % g)
            if k and g in self._torsion:
                raise InputError("term D^(%d) on torsion generator %s"
                                 % (k, self.generators[g].name))

    def with_weights(self, weights):
        if isinstance(weights, int):
            weights = [weights] * self.rank
        if len(weights) != self.rank:
            raise InputError("expected %d weights, got %d" % (self.rank, len(weights)))
        gens = tuple(GeneratorInfo(g.name, int(w), g.torsion_order)
                     for g, w in zip(self.generators, weights))
        return Presentation(self.kind, gens, dict(self.locality), dict(self.sc))

    def with_kind(self, kind):
        return Presentation(kind, self.generators, dict(self.locality), dict(self.sc))

    def fmt(self, e):
        """Human-readable form of an element."""
        if not e:
            return "0"
        parts = []
        for (g, k), c in e.items():
            name = self.generators[g].name
            mono = name if k == 0 else "D^(%d)%s" % (k, name)
            parts.append(mono if c == 1 else "%s*%s" % (c, mono))
        return " + ".join(parts)


def element_locality(p, a, b):
    """An n with a(n)b = 0 for all larger-or-equal indices, from the terms."""
    bound = 0
    for (g, k), _ in a.items():
        for (h, l), _ in b.items():
            N = p.N(g, h)
            if N:
                bound = max(bound, N + k + l)
    return bound


def nth_product(p, a, b, n):
    """The n-th product a(n)b.

    Left rule: (D^(k)a)(n)b = (-1)^k binom(n, k) a(n-k)b.
    Right rule: a(n)(D^(l)b) = sum_s binom(n, s) D^(l-s)(a(n-s)b).
    """
    if n < 0:
        raise InputError("n-products need n >= 0, got %d" % n)
    p.check_element(a)
    p.check_element(b)
    out = {}
    torsion = p.torsion
    for (g, k), ca in a.items():
        if k > n:
            continue
        m = n - k
        cl = ca * ((-1) ** k * comb(n, k))
        for (h, l), cb in b.items():
            N = p.N(g, h)
            if not N:
                continue
            c0 = cl * cb
            for s in range(min(m, l) + 1):
                idx = m - s
                if idx >= N:
                    continue
                val = p.sc.get((g, h, idx))
                if val is None:
                    continue
                c = c0 * comb(m, s)
                j = l - s
                for (f, d), cv in val._terms.items():
                    if j and f in torsion:
                        continue
                    key = (f, d + j)
                    x = out.get(key, 0) + c * cv * comb(d + j, j)
                    if x:
                        out[key] = x
                    else:
                        out.pop(key, None)
    return Element._raw(out)


def bracket(p, a, b, n):
    """Alias used where the products are Lie brackets a[n]b."""
    return nth_product(p, a, b, n)


@dataclass
class CheckReport:
    identity: str
    params: dict = field(default_factory=dict)
    violations: list = field(default_factory=list)
    checked: int = 0

    @property
    def passed(self):
        return not self.violations

    def witness(self):
        return self.violations[0] if self.violations else None

    def to_dict(self):
        return {
            "identity": self.identity,
            "params": self.params,
            "checked": self.checked,
            "passed": self.passed,
            "violations": self.violations,
        }


def _run_grid(fn, tasks, threads):
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            return list(ex.map(fn, tasks))
    return [fn(t) for t in tasks]


def _violation(p, inputs, lhs, rhs):
    return {"inputs": inputs, "lhs": p.fmt(lhs), "rhs": p.fmt(rhs)}


def validate_presentation(p, check_grading=False):
    """Structural checks; never raises, lists every violation found."""
    rep = CheckReport("presentation", {"check_grading": check_grading})
    names = p.names
    r = p.rank
    for (i, j), N in sorted(p.locality.items()):
        rep.checked += 1
        if not (0 <= i < r and 0 <= j < r):
            rep.violations.append({"kind": "locality_unknown_generator", "pair": [i, j]})
            continue
        if not isinstance(N, int) or N < 0:
            rep.violations.append({"kind": "locality_negative",
                                   "pair": [names[i], names[j]], "N": N})
        if (j, i) not in p.locality:
            rep.violations.append({"kind": "locality_not_symmetric",
                                   "pair": [names[i], names[j]]})
    for (i, j, n), val in sorted(p.sc.items()):
        rep.checked += 1
        if not (0 <= i < r and 0 <= j < r):
            rep.violations.append({"kind": "product_unknown_generator", "key": [i, j, n]})
            continue
        pair = [names[i], names[j], n]
        if n < 0 or n >= p.N(i, j):
            rep.violations.append({"kind": "product_beyond_locality", "key": pair,
                                   "N": p.N(i, j)})
        try:
            p.check_element(val)
        except InputError as exc:
            rep.violations.append({"kind": "invalid_result", "key": pair, "error": str(exc)})
            continue
        if val and (i in p.torsion or j in p.torsion):
            # 0 = (Dc)(m)g = -m c(m-1)g forces c(n)g = 0 for every n
            rep.violations.append({"kind": "torsion_not_annihilating", "key": pair,
                                   "value": p.fmt(val)})
        if check_grading:
            target = p.generators[i].weight + p.generators[j].weight + n
            for (f, k), _ in val.items():
                if p.generators[f].weight - k != target:
                    rep.violations.append({"kind": "not_graded", "key": pair,
                                           "term": [names[f], k], "expected": target})
    return rep


def check_conformal_associativity(p, m_max, n_max, threads=None):
    """(a(m)b)(n)c = sum_s (-1)^s binom(m, s) a(m-s)(b(n+s)c) on generators."""
    gens = [Element.gen(i) for i in range(p.rank)]
    tasks = list(itertools.product(range(p.rank), repeat=3))

    def run(t):
        i, j, k = t
        a, b, c = gens[i], gens[j], gens[k]
        bad = []
        for m in range(m_max + 1):
            ab = nth_product(p, a, b, m)
            for n in range(n_max + 1):
                lhs = nth_product(p, ab, c, n)
                rhs = ZERO
                for s in range(m + 1):
                    bc = nth_product(p, b, c, n + s)
                    if bc:
                        rhs = rhs + nth_product(p, a, bc, m - s) * ((-1) ** s * comb(m, s))
                if lhs != rhs:
                    bad.append(_violation(p, {"a": p.names[i], "b": p.names[j],
                                              "c": p.names[k], "m": m, "n": n}, lhs, rhs))
        return bad

    rep = CheckReport("assoc", {"m_max": m_max, "n_max": n_max})
    for bad in _run_grid(run, tasks, threads):
        rep.violations.extend(bad)
    rep.checked = len(tasks) * (m_max + 1) * (n_max + 1)
    return rep


def check_conformal_jacobi(p, m_max, n_max, threads=None):
    """(a[m]b)[n]c = sum_s (-1)^s binom(m,s) (a[m-s](b[n+s]c) - b[n+s](a[m-s]c))."""
    gens = [Element.gen(i) for i in range(p.rank)]
    tasks = list(itertools.product(range(p.rank), repeat=3))

    def run(t):
        i, j, k = t
        a, b, c = gens[i], gens[j], gens[k]
        bad = []
        for m in range(m_max + 1):
            ab = nth_product(p, a, b, m)
            for n in range(n_max + 1):
                lhs = nth_product(p, ab, c, n)
                rhs = ZERO
                for s in range(m + 1):
                    coef = (-1) ** s * comb(m, s)
                    bc = nth_product(p, b, c, n + s)
                    ac = nth_product(p, a, c, m - s)
                    term = nth_product(p, a, bc, m - s) - nth_product(p, b, ac, n + s)
                    rhs = rhs + term * coef
                if lhs != rhs:
                    bad.append(_violation(p, {"a": p.names[i], "b": p.names[j],
                                              "c": p.names[k], "m": m, "n": n}, lhs, rhs))
        return bad

    rep = CheckReport("jacobi", {"m_max": m_max, "n_max": n_max})
    for bad in _run_grid(run, tasks, threads):
        rep.violations.extend(bad)
    rep.checked = len(tasks) * (m_max + 1) * (n_max + 1)
    return rep


def quasi_symmetric_partner(p, a, b, n, sign):
    """sign * sum_s (-1)^(s+n) D^(s)(b(n+s)a), truncated by locality."""
    out = ZERO
    top = element_locality(p, b, a)
    for s in range(max(top - n, 0)):
        ba = nth_product(p, b, a, n + s)
        if ba:
            out = out + p.derive(ba, s) * ((-1) ** (s + n))
    return out * sign


def check_quasi_symmetry(p, sign, n_max, threads=None):
    if sign not in (1, -1):
        raise InputError("sign must be +1 or -1")
    tasks = list(itertools.product(range(p.rank), repeat=2))

    def run(t):
        i, j = t
        a, b = Element.gen(i), Element.gen(j)
        bad = []
        for n in range(n_max + 1):
            lhs = nth_product(p, a, b, n)
            rhs = quasi_symmetric_partner(p, a, b, n, sign)
            if lhs != rhs:
                bad.append(_violation(p, {"a": p.names[i], "b": p.names[j], "n": n},
                                      lhs, rhs))
        return bad

    rep = CheckReport("qs+" if sign == 1 else "qs-", {"n_max": n_max, "sign": sign})
    for bad in _run_grid(run, tasks, threads):
        rep.violations.extend(bad)
    rep.checked = len(tasks) * (n_max + 1)
    return rep


def is_central(p, e, n_max=None):
    """True iff e(n)g = 0 and g(n)e = 0 for every generator g, n <= n_max.

    With ``n_max=None`` the bound is taken from element localities, which
    makes the answer exact.
    """
    p.check_element(e)
    for i in range(p.rank):
        g = Element.gen(i)
        top = n_max
        if top is None:
            top = max(element_locality(p, e, g), element_locality(p, g, e))
        for n in range(top + 1):
            if nth_product(p, e, g, n) or nth_product(p, g, e, n):
                return False
    return True


def preconf_identity_holds(m, n, i, j):
    """The binomial identity behind coefficientwise conformal associativity.

    sum_{s=0}^{i} (-1)^(s+j) C(m,s) C(m-s,i-s) C(n+s,j-i+s) = (-1)^(i+j) C(m,i) C(n,j)
    """
    lhs = sum((-1) ** (s + j) * binom(m, s) * binom(m - s, i - s) * binom(n + s, j - i + s)
              for s in range(i + 1))
    return lhs == (-1) ** (i + j) * binom(m, i) * binom(n, j)
