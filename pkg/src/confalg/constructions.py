"""Standard conformal algebras built from finite-dimensional data."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import factorial

from .core import (
    ASSOCIATIVE,
    LIE,
    ZERO,
    Element,
    GeneratorInfo,
    InputError,
    Presentation,
    apply_derivation,
    element_locality,
    nth_product,
    to_fraction,
)


@dataclass(frozen=True)
class FiniteAlgebra:
    """A finite-dimensional algebra: e_i e_j = sum_k sc[(i, j)][k] e_k."""

    names: tuple
    sc: dict
    kind: str = LIE
    form: tuple = None

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))
        clean = {}
        for (i, j), row in self.sc.items():
            row = {k: to_fraction(c) for k, c in row.items() if c}
            if row:
                clean[(i, j)] = row
        object.__setattr__(self, "sc", clean)
        if self.form is not None:
            object.__setattr__(self, "form", tuple(tuple(to_fraction(x) for x in row)
                                                   for row in self.form))

    @property
    def dim(self):
        return len(self.names)

    def mul(self, u, v):
        """Product of vectors given as {index: coeff}."""
        out = {}
        for i, a in u.items():
            for j, b in v.items():
                for k, c in self.sc.get((i, j), {}).items():
                    out[k] = out.get(k, 0) + a * b * c
        return {k: c for k, c in out.items() if c}

    def pair(self, u, v):
        return sum((a * b * self.form[i][j] for i, a in u.items() for j, b in v.items()),
                   Fraction(0))

    def validate(self):
        """Raise InputError when the axioms of the declared kind fail."""
        d = self.dim
        for (i, j), row in self.sc.items():
            if not (0 <= i < d and 0 <= j < d) or any(not 0 <= k < d for k in row):
                raise InputError("structure constant index out of range")
        basis = [{i: Fraction(1)} for i in range(d)]
        add = _vadd
        if self.kind == LIE:
            for i, j in itertools.product(range(d), repeat=2):
                if add(self.mul(basis[i], basis[j]), self.mul(basis[j], basis[i])):
                    raise InputError("not antisymmetric at (%s, %s)"
                                     % (self.names[i], self.names[j]))
            for i, j, k in itertools.product(range(d), repeat=3):
                a, b, c = basis[i], basis[j], basis[k]
                lhs = self.mul(self.mul(a, b), c)
                rhs = add(self.mul(a, self.mul(b, c)), self.mul(b, self.mul(a, c)), -1)
                if add(lhs, rhs, -1):
                    raise InputError("Jacobi identity fails at (%s, %s, %s)"
                                     % (self.names[i], self.names[j], self.names[k]))
        elif self.kind == ASSOCIATIVE:
            for i, j, k in itertools.product(range(d), repeat=3):
                a, b, c = basis[i], basis[j], basis[k]
                if add(self.mul(self.mul(a, b), c), self.mul(a, self.mul(b, c)), -1):
                    raise InputError("not associative at (%s, %s, %s)"
                                     % (self.names[i], self.names[j], self.names[k]))
        else:
            raise InputError("unknown kind %r" % (self.kind,))
        if self.form is not None:
            if len(self.form) != d or any(len(row) != d for row in self.form):
                raise InputError("form has the wrong shape")
            for i, j in itertools.product(range(d), repeat=2):
                if self.form[i][j] != self.form[j][i]:
                    raise InputError("form is not symmetric")
            if not form_is_invariant(self, self.form):
                raise InputError("form is not invariant")
        return self


def _vadd(u, v, scale=1):
    out = dict(u)
    for k, c in v.items():
        out[k] = out.get(k, 0) + scale * c
    return {k: c for k, c in out.items() if c}


def form_is_invariant(g, form):
    d = g.dim
    basis = [{i: Fraction(1)} for i in range(d)]

    def pair(u, v):
        return sum((a * b * Fraction(form[i][j]) for i, a in u.items() for j, b in v.items()),
                   Fraction(0))

    for i, j, k in itertools.product(range(d), repeat=3):
        a, b, c = basis[i], basis[j], basis[k]
        if pair(g.mul(a, b), c) != pair(a, g.mul(b, c)):
            return False
    return True


def killing_form(g, scale=1):
    """scale * tr(ad a ad b) as a matrix of exact rationals."""
    d = g.dim
    ad = []
    for i in range(d):
        m = [[Fraction(0)] * d for _ in range(d)]
        for j in range(d):
            for k, c in g.sc.get((i, j), {}).items():
                m[k][j] += c
        ad.append(m)
    scale = to_fraction(scale)
    form = [[scale * sum(ad[a][i][j] * ad[b][j][i] for i in range(d) for j in range(d))
             for b in range(d)] for a in range(d)]
    return tuple(tuple(row) for row in form)


def sl2(form_scale=None):
    """sl2 with [e,f] = h, [h,e] = 2e, [h,f] = -2f.

    ``form_scale=None`` attaches the trace form (Killing / 4), so <e,f> = 1.
    """
    sc = {(0, 1): {2: 1}, (1, 0): {2: -1},
          (2, 0): {0: 2}, (0, 2): {0: -2},
          (2, 1): {1: -2}, (1, 2): {1: 2}}
    g = FiniteAlgebra(("e", "f", "h"), sc, LIE)
    scale = Fraction(1, 4) if form_scale is None else form_scale
    return FiniteAlgebra(g.names, g.sc, LIE, killing_form(g, scale))


def mat2():
    """2x2 matrices with matrix units E11, E12, E21, E22."""
    names = ("E11", "E12", "E21", "E22")
    unit = {(1, 1): 0, (1, 2): 1, (2, 1): 2, (2, 2): 3}
    sc = {}
    for (a, b), i in unit.items():
        for (c, d), j in unit.items():
            if b == c:
                sc[(i, j)] = {unit[(a, d)]: 1}
    return FiniteAlgebra(names, sc, ASSOCIATIVE)


def gl2():
    """gl2 = mat2 with the commutator bracket."""
    m = mat2()
    sc = {}
    for i, j in itertools.product(range(4), repeat=2):
        row = _vadd(m.sc.get((i, j), {}), m.sc.get((j, i), {}), -1)
        if row:
            sc[(i, j)] = row
    return FiniteAlgebra(m.names, sc, LIE)


def heis3():
    """The 3-dimensional Heisenberg algebra n3: [x, y] = z, z central."""
    return FiniteAlgebra(("x", "y", "z"), {(0, 1): {2: 1}, (1, 0): {2: -1}}, LIE)


def abelian(k, kind=LIE):
    names = tuple("a%d" % i for i in range(1, k + 1))
    form = tuple(tuple(Fraction(int(i == j)) for j in range(k)) for i in range(k))
    return FiniteAlgebra(names, {}, kind, form)


def builtin(name):
    """Built-in algebras: "sl2", "mat2", "gl2", "heis3", "abelian:k"."""
    if name == "sl2":
        return sl2()
    if name == "mat2":
        return mat2()
    if name == "gl2":
        return gl2()
    if name == "heis3":
        return heis3()
    if name.startswith("abelian:"):
        try:
            k = int(name.split(":", 1)[1])
        except ValueError:
            raise InputError("bad abelian rank in %r" % name) from None
        if k < 1:
            raise InputError("abelian rank must be positive")
        return abelian(k)
    raise InputError("unknown built-in algebra %r" % name)


def loop_algebra(g, weight=0):
    """Generators a~ per basis vector, N = 1, a~(0)b~ = (ab)~."""
    g.validate()
    gens = tuple(GeneratorInfo(n, weight) for n in g.names)
    d = g.dim
    locality = {(i, j): 1 for i in range(d) for j in range(d)}
    sc = {}
    for (i, j), row in g.sc.items():
        sc[(i, j, 0)] = Element({(k, 0): c for k, c in row.items()})
    return Presentation(g.kind, gens, locality, sc)


def affinize(g, form=None, central_name="c", weight=0, central_weight=None):
    """Affine Lie conformal algebra: a~(0)b~ = [a,b]~, a~(1)b~ = <a,b> c."""
    if g.kind != LIE:
        raise InputError("affinization needs a Lie algebra")
    form = g.form if form is None else tuple(tuple(to_fraction(x) for x in r) for r in form)
    if form is None:
        raise InputError("affinization needs an invariant form")
    g.validate()
    d = g.dim
    if len(form) != d or any(len(r) != d for r in form):
        raise InputError("form has the wrong shape")
    if any(form[i][j] != form[j][i] for i in range(d) for j in range(d)):
        raise InputError("form is not symmetric")
    if not form_is_invariant(g, form):
        raise InputError("form is not invariant")
    if central_name in g.names:
        raise InputError("central generator name %r clashes" % central_name)
    cw = weight if central_weight is None else central_weight
    gens = tuple(GeneratorInfo(n, weight) for n in g.names) + (
        GeneratorInfo(central_name, cw, 1),)
    locality = {(i, j): 2 for i in range(d) for j in range(d)}
    for i in range(d + 1):
        locality[(i, d)] = 0
        locality[(d, i)] = 0
    sc = {}
    for (i, j), row in g.sc.items():
        sc[(i, j, 0)] = Element({(k, 0): c for k, c in row.items()})
    for i in range(d):
        for j in range(d):
            if form[i][j]:
                sc[(i, j, 1)] = Element({(d, 0): form[i][j]})
    return Presentation(LIE, gens, locality, sc)


def commutator_algebra(p):
    """a[n]b = a(n)b - sum_s (-1)^(n+s) D^(s)(b(n+s)a), with N- = max(N(a,b), N(b,a))."""
    r = p.rank
    locality = {}
    sc = {}
    for i in range(r):
        for j in range(r):
            N = max(p.N(i, j), p.N(j, i))
            if (i, j) in p.locality or (j, i) in p.locality:
                locality[(i, j)] = N
            a, b = Element.gen(i), Element.gen(j)
            for n in range(N):
                val = nth_product(p, a, b, n)
                for s in range(max(p.N(j, i) - n, 0)):
                    ba = nth_product(p, b, a, n + s)
                    if ba:
                        val = val - p.derive(ba, s) * ((-1) ** (n + s))
                if val:
                    sc[(i, j, n)] = val
    return Presentation(LIE, p.generators, locality, sc)


class UnboundedIdealError(RuntimeError):
    """The ideal closure did not stabilise within the D-power bound."""


# --- polynomials in D (ordinary powers), used by the quotient construction ---

def _ptrim(a):
    a = list(a)
    while a and not a[-1]:
        a.pop()
    return a


def _padd(a, b, scale=1):
    n = max(len(a), len(b))
    out = [(a[i] if i < len(a) else 0) + scale * (b[i] if i < len(b) else 0)
           for i in range(n)]
    return _ptrim(out)


def _pmul(a, b):
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _ptrim(out)


def _pdivmod(a, b):
    a = _ptrim(a)
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    lead = b[-1]
    while len(a) >= len(b) and a:
        shift = len(a) - len(b)
        c = a[-1] / lead
        q[shift] = c
        a = _padd(a, [0] * shift + list(b), -c)
    return _ptrim(q), a


class _ModuleRows:
    """Submodule of k[D]^f (+) k^t, with k^t killed by D, in Hermite form.

    A row is (list of polynomials, one per free column; list of scalars,
    one per torsion column).  Multiplying a row by q(D) scales its torsion
    part by q(0).
    """

    def __init__(self, nfree, ntors):
        self.nfree = nfree
        self.ntors = ntors

    def zero(self):
        return [[] for _ in range(self.nfree)], [Fraction(0)] * self.ntors

    @staticmethod
    def nonzero(r):
        return any(r[0]) or any(r[1])

    @staticmethod
    def combine(r, piv, q):
        """r - q(D) * piv."""
        fr = [_padd(a, _pmul(q, b), -1) for a, b in zip(r[0], piv[0])]
        q0 = q[0] if q else 0
        return fr, [a - q0 * b for a, b in zip(r[1], piv[1])]

    def normalize(self, rows):
        rows = [r for r in rows if self.nonzero(r)]
        pivots = []
        for col in range(self.nfree):
            cand = [r for r in rows if r[0][col]]
            rest = [r for r in rows if not r[0][col]]
            if not cand:
                continue
            while len(cand) > 1:
                cand.sort(key=lambda r: len(r[0][col]))
                p0 = cand[0]
                nxt = [p0]
                for r in cand[1:]:
                    q, _ = _pdivmod(r[0][col], p0[0][col])
                    r = self.combine(r, p0, q)
                    if r[0][col]:
                        nxt.append(r)
                    elif self.nonzero(r):
                        rest.append(r)
                cand = nxt
            p0 = cand[0]
            inv = 1 / p0[0][col][-1]
            p0 = ([[inv * x for x in poly] for poly in p0[0]], [inv * x for x in p0[1]])
            pivots.append([col, p0])
            rows = rest
        tors = self._tors_rref([r[1] for r in rows])
        for j in range(len(pivots)):
            cj, rj = pivots[j]
            for i in range(j):
                ri = pivots[i][1]
                q, _ = _pdivmod(ri[0][cj], rj[0][cj])
                if q:
                    pivots[i][1] = self.combine(ri, rj, q)
        for entry in pivots:
            fr, tr = entry[1]
            for pc, row in tors:
                if tr[pc]:
                    c = tr[pc]
                    tr = [a - c * b for a, b in zip(tr, row)]
            entry[1] = (fr, tr)
        return [(c, r) for c, r in pivots], tors

    @staticmethod
    def _tors_rref(vecs):
        rows = []
        for v in vecs:
            v = list(v)
            for pc, row in rows:
                if v[pc]:
                    c = v[pc]
                    v = [a - c * b for a, b in zip(v, row)]
            nz = [i for i, x in enumerate(v) if x]
            if not nz:
                continue
            pc = nz[0]
            row = [x / v[pc] for x in v]
            rows = [(qc, [a - r[pc] * b for a, b in zip(r, row)]) for qc, r in rows]
            rows.append((pc, row))
        return sorted(rows)


class _Coords:
    """Rows of the module view of a presentation: ordinary powers of D per
    free generator, scalars per torsion generator."""

    def __init__(self, p):
        self.free = [i for i in range(p.rank) if i not in p.torsion]
        self.tors = [i for i in range(p.rank) if i in p.torsion]
        self.fpos = {g: k for k, g in enumerate(self.free)}
        self.tpos = {g: k for k, g in enumerate(self.tors)}

    def to_row(self, e):
        fr = [[] for _ in self.free]
        tr = [Fraction(0)] * len(self.tors)
        for (g, k), c in e.items():
            if g in self.tpos:
                tr[self.tpos[g]] += c
            else:
                poly = fr[self.fpos[g]]
                poly = poly + [Fraction(0)] * (k + 1 - len(poly))
                poly[k] += c / factorial(k)
                fr[self.fpos[g]] = _ptrim(poly)
        return fr, tr

    def to_element(self, row):
        fr, tr = row
        d = {}
        for col, poly in enumerate(fr):
            for k, c in enumerate(poly):
                if c:
                    d[(self.free[col], k)] = c * factorial(k)
        for col, c in enumerate(tr):
            if c:
                d[(self.tors[col], 0)] = c
        return Element(d)


def kd_submodule_basis(p, elements):
    """A k[D]-basis of the submodule generated by ``elements``.

    Returns (free, torsion): free elements are independent over k[D]
    modulo torsion, torsion elements are killed by D, and together they
    generate the submodule as a direct sum.
    """
    coords = _Coords(p)
    mod = _ModuleRows(len(coords.free), len(coords.tors))
    frows, trows = mod.normalize([coords.to_row(e) for e in elements if e])
    free = [coords.to_element(r) for _, r in frows]
    zero = [[] for _ in coords.free]
    return free, [coords.to_element((zero, row)) for _, row in trows]


def quotient(p, ideal_generators, d_bound=8, max_rounds=64):
    """Presentation of p modulo the ideal generated by the given elements.

    The ideal is the k[D]-submodule closed under products with generators
    on both sides.  The quotient must again be free plus D-killed torsion;
    other torsion is rejected.
    """
    coords = _Coords(p)
    free, tors = coords.free, coords.tors
    mod = _ModuleRows(len(free), len(tors))
    to_row, to_element = coords.to_row, coords.to_element

    rows = [to_row(e) for e in ideal_generators if e]
    gens = [Element.gen(i) for i in range(p.rank)]
    state = None
    for _ in range(max_rounds):
        frows, trows = mod.normalize(rows)
        for _, (fr, _) in frows:
            if any(len(poly) - 1 > d_bound for poly in fr):
                raise UnboundedIdealError("ideal needs D-powers beyond d_bound=%d" % d_bound)
        key = (repr(frows), repr(trows))
        if key == state:
            break
        state = key
        basis = [to_element(r) for _, r in frows]
        basis += [to_element(([[] for _ in free], row)) for _, row in trows]
        new = []
        for x in basis:
            for g in gens:
                for n in range(max(element_locality(p, x, g), element_locality(p, g, x))):
                    for y in (nth_product(p, x, g, n), nth_product(p, g, x, n)):
                        if y:
                            new.append(to_row(y))
        rows = [r for _, r in frows] + [([[] for _ in free], row) for _, row in trows] + new
    else:
        raise UnboundedIdealError("ideal closure did not stabilise in %d rounds" % max_rounds)

    for col, (fr, _) in frows:
        if len(fr[col]) != 1:
            raise InputError("quotient has torsion k[D]/(p(D)) with deg p = %d; unsupported"
                             % (len(fr[col]) - 1))
    kill_free = {free[col]: row for col, row in frows}
    kill_tors = {tors[pc]: row for pc, row in trows}
    keep = [g for g in range(p.rank) if g not in kill_free and g not in kill_tors]
    new_index = {g: k for k, g in enumerate(keep)}

    # substitution for each killed generator, as an element of the kept ones
    subst = {}
    for g, row in kill_free.items():
        subst[g] = -to_element(row) + Element.gen(g)
    for g, row in kill_tors.items():
        subst[g] = -to_element(([[] for _ in free], row)) + Element.gen(g)

    def project(e):
        out = ZERO
        for (g, k), c in e.items():
            if g in subst:
                out = out + apply_derivation(subst[g], k, p.torsion) * c
            else:
                out = out + Element.gen(g, k, c)
        d = {}
        for (g, k), c in out.items():
            if g in subst:
                raise InputError("quotient substitution did not close")
            d[(new_index[g], k)] = c
        return Element(d)

    newgens = tuple(p.generators[g] for g in keep)
    locality = {}
    sc = {}
    for a, g in enumerate(keep):
        for b, h in enumerate(keep):
            top = 0
            for n in range(p.N(g, h)):
                val = project(p.product(g, h, n))
                if val:
                    sc[(a, b, n)] = val
                    top = n + 1
            if (g, h) in p.locality:
                locality[(a, b)] = top
    q = Presentation(p.kind, newgens, locality, sc)
    return q, project
