"""Sparse exact linear algebra over the rationals.

Vectors are plain dicts mapping hashable, mutually comparable keys to
``Fraction`` values with no zero entries.  Everything here is exact.
"""

from __future__ import annotations

from fractions import Fraction


def vec_add(u, v, scale=1):
    """Return u + scale*v as a new dict."""
    out = dict(u)
    if not scale:
        return out
    for k, c in v.items():
        x = out.get(k, 0) + scale * c
        if x:
            out[k] = x
        else:
            out.pop(k, None)
    return out


def vec_iadd(u, v, scale=1):
    """In-place u += scale*v."""
    if not scale:
        return u
    for k, c in v.items():
        x = u.get(k, 0) + scale * c
        if x:
            u[k] = x
        else:
            u.pop(k, None)
    return u


def vec_scale(v, c):
    if not c:
        return {}
    return {k: c * x for k, x in v.items()}


class Echelon:
    """Incremental row echelon form with optional coordinate tracking.

    Rows are kept in insertion order.  Each new row is reduced against all
    earlier rows before it is stored, so reducing a vector by the rows in
    insertion order is exact: later rows never reintroduce earlier pivots.
    That property also makes prefix queries (``reduce(..., limit=k)``)
    exact, which is what filtration-level lookups rely on.

    With ``track=True`` every stored row remembers its expression as a
    combination of the vectors passed to :meth:`add`, indexed by insertion
    attempt, so dependent inputs yield kernel relations.
    """

    def __init__(self, track=False):
        self.track = track
        self.rows = []          # list of (pivot, row, coords, tag)
        self.pivots = {}        # pivot key -> position in self.rows
        self.count = 0          # number of add() calls so far

    def __len__(self):
        return len(self.rows)

    @property
    def rank(self):
        return len(self.rows)

    def reduce(self, vec, coords=None, limit=None):
        """Reduce ``vec`` by the stored rows (only the first ``limit`` if given).

        Returns ``(residue, coords, last)`` where ``last`` is the index of
        the last row used with a nonzero multiplier (or -1).
        """
        res = {k: c for k, c in vec.items() if c}
        last = -1
        rows = self.rows if limit is None else self.rows[:limit]
        for pos, (piv, row, rcoords, _tag) in enumerate(rows):
            c = res.get(piv)
            if c:
                vec_iadd(res, row, -c)
                if coords is not None:
                    vec_iadd(coords, rcoords, -c)
                last = pos
        return res, coords, last

    def add(self, vec, tag=None):
        """Insert ``vec``; return the residue (empty dict when dependent).

        When tracking, a dependent vector produces a kernel relation which is
        appended to ``self.relations``.
        """
        idx = self.count
        self.count += 1
        coords = {idx: Fraction(1)} if self.track else None
        res, coords, _ = self.reduce(vec, coords)
        if not res:
            if self.track:
                self.relations.append(coords)
            return res
        piv = min(res)
        inv = 1 / Fraction(res[piv])
        row = vec_scale(res, inv)
        if coords is not None:
            coords = vec_scale(coords, inv)
        self.pivots[piv] = len(self.rows)
        self.rows.append((piv, row, coords, tag))
        return res

    @property
    def relations(self):
        try:
            return self._relations
        except AttributeError:
            self._relations = []
            return self._relations

    def contains(self, vec):
        return not self.reduce(vec)[0]

    def express(self, vec):
        """Coordinates of ``vec`` in terms of the inserted vectors, or None."""
        if not self.track:
            raise ValueError("express() needs a tracking echelon")
        res, coords, _ = self.reduce(vec, {})
        if res:
            return None
        return {k: -c for k, c in coords.items()}

    def tags(self):
        return [tag for *_, tag in self.rows]

    def basis(self):
        return [row for _, row, _, _ in self.rows]


def rank(vectors):
    ech = Echelon()
    for v in vectors:
        ech.add(v)
    return ech.rank


def span_basis(vectors):
    """A basis (subset of the input, in order) of the span of ``vectors``."""
    ech = Echelon()
    out = []
    for v in vectors:
        if ech.add(v):
            out.append(v)
    return out


def kernel(images):
    """Kernel of the linear map sending the i-th unit vector to images[i].

    Returns kernel basis vectors as dicts {i: coeff}.
    """
    ech = Echelon(track=True)
    for im in images:
        ech.add(im)
    return list(ech.relations)


def preimage(images, subspace):
    """Basis of {x : sum x_i * images[i] lies in span(subspace)}.

    ``subspace`` is an :class:`Echelon` or an iterable of vectors.
    """
    if not isinstance(subspace, Echelon):
        ech = Echelon()
        for v in subspace:
            ech.add(v)
        subspace = ech
    residues = [subspace.reduce(im)[0] for im in images]
    return kernel(residues)


def rref(vectors, key=None):
    """Reduced row echelon basis of the span, sorted by pivot.

    The pivot of a row is its smallest key under ``key``; every pivot
    column is zero in all other rows.
    """
    key = key or (lambda k: k)
    rows = []
    for v in vectors:
        res = {k: c for k, c in v.items() if c}
        for piv, row in rows:
            c = res.get(piv)
            if c:
                vec_iadd(res, row, -c)
        if not res:
            continue
        piv = min(res, key=key)
        row = vec_scale(res, 1 / Fraction(res[piv]))
        for i, (q, r) in enumerate(rows):
            c = r.get(piv)
            if c:
                rows[i] = (q, vec_add(r, row, -c))
        rows.append((piv, row))
    rows.sort(key=lambda t: key(t[0]))
    return [r for _, r in rows]
