"""Bigraded ghost/anti-ghost algebra over the scalar ring.

Ghost generators xi^A (bi-degree (1,0)) and anti-ghost generators
xi*_B (bi-degree (0,1)) are both odd.  Canonical monomial order: all
ghosts ascending, then all anti-ghosts ascending; the merge sign of a
product is the parity of the sorting permutation, and a repeated index
annihilates the term.  Indices are 0-based internally and rendered
1-based.
"""

from fractions import Fraction

from .scalar import ScalarExpr


class GhostMonomial:
    __slots__ = ("g", "a")

    def __init__(self, g=(), a=()):
        self.g = tuple(g)
        self.a = tuple(a)
        assert all(x < y for x, y in zip(self.g, self.g[1:])), self.g
        assert all(x < y for x, y in zip(self.a, self.a[1:])), self.a

    def bidegree(self):
        return (len(self.g), len(self.a))

    def ghost_number(self):
        return len(self.g) - len(self.a)

    def parity(self):
        return (len(self.g) + len(self.a)) % 2

    def key(self):
        return (self.g, self.a)

    def __eq__(self, other):
        return isinstance(other, GhostMonomial) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __lt__(self, other):
        return self.key() < other.key()

    def __repr__(self):
        if not self.g and not self.a:
            return "1"
        bits = ["xi^%d" % (A + 1) for A in self.g]
        bits += ["xi*_%d" % (B + 1) for B in self.a]
        return " ".join(bits)


ONE_MONO = GhostMonomial()


def _merge_inversions(left, right):
    # number of pairs (x in left, y in right) out of order after sorting
    inv = 0
    for y in right:
        inv += sum(1 for x in left if x > y)
    return inv


def mono_mul(m1, m2):
    """Product of two monomials: (sign, GhostMonomial) or (0, None)."""
    if set(m1.g) & set(m2.g) or set(m1.a) & set(m2.a):
        return 0, None
    # word is  g1 a1 g2 a2 ; move the g2 block left across a1, then merge.
    inv = len(m1.a) * len(m2.g)
    inv += _merge_inversions(m1.g, m2.g)
    inv += _merge_inversions(m1.a, m2.a)
    sign = -1 if inv % 2 else 1
    return sign, GhostMonomial(tuple(sorted(m1.g + m2.g)),
                               tuple(sorted(m1.a + m2.a)))


class GradedFunction:
    """Element of the ghost algebra: finite map monomial -> ScalarExpr."""

    __slots__ = ("chart", "rank", "terms")

    def __init__(self, chart, rank, terms=None):
        self.chart = chart
        self.rank = rank
        self.terms = {}
        for mono, coeff in (terms or {}).items():
            if coeff.is_zero():
                continue
            assert all(0 <= A < rank for A in mono.g + mono.a), mono
            self.terms[mono] = coeff

    # -- constructors ------------------------------------------------

    @classmethod
    def zero(cls, chart, rank):
        return cls(chart, rank, {})

    @classmethod
    def scalar(cls, chart, rank, expr):
        return cls(chart, rank, {ONE_MONO: expr})

    @classmethod
    def one(cls, chart, rank):
        return cls.scalar(chart, rank, ScalarExpr.one(chart))

    @classmethod
    def ghost(cls, chart, rank, A):
        return cls(chart, rank, {GhostMonomial((A,), ()): ScalarExpr.one(chart)})

    @classmethod
    def antighost(cls, chart, rank, B):
        return cls(chart, rank, {GhostMonomial((), (B,)): ScalarExpr.one(chart)})

    # -- linear structure --------------------------------------------

    def is_zero(self):
        return not self.terms

    def __add__(self, other):
        assert self._like(other)
        terms = dict(self.terms)
        for m, c in other.terms.items():
            c0 = terms.get(m)
            c0 = c if c0 is None else c0 + c
            if c0.is_zero():
                terms.pop(m, None)
            else:
                terms[m] = c0
        return GradedFunction(self.chart, self.rank, terms)

    def __neg__(self):
        return GradedFunction(self.chart, self.rank,
                              {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, q):
        if isinstance(q, ScalarExpr):
            return GradedFunction(self.chart, self.rank,
                                  {m: c * q for m, c in self.terms.items()})
        return GradedFunction(self.chart, self.rank,
                              {m: c.scale(q) for m, c in self.terms.items()})

    def _like(self, other):
        return isinstance(other, GradedFunction) and \
            self.chart == other.chart and self.rank == other.rank

    def __eq__(self, other):
        return self._like(other) and self.terms == other.terms

    def __hash__(self):
        return hash((self.chart, self.rank,
                     tuple(sorted((m.key(), hash(c)) for m, c in self.terms.items()))))

    # -- algebra -----------------------------------------------------

    def ghost_mul(self, other):
        "Graded product; a Section argument returns a Section."
        if isinstance(other, Section):
            return Section(self.ghost_mul(other.fun))
        assert self._like(other)
        out = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                sign, m = mono_mul(m1, m2)
                if not sign:
                    continue
                c = (c1 * c2).scale(sign)
                c0 = out.get(m)
                c0 = c if c0 is None else c0 + c
                if c0.is_zero():
                    out.pop(m, None)
                else:
                    out[m] = c0
        return GradedFunction(self.chart, self.rank, out)

    def __mul__(self, other):
        if isinstance(other, (GradedFunction, Section)):
            return self.ghost_mul(other)
        return self.scale(other)

    def pr_bidegree(self, h, k):
        return GradedFunction(self.chart, self.rank,
                              {m: c for m, c in self.terms.items()
                               if m.bidegree() == (h, k)})

    def bidegrees(self):
        return sorted({m.bidegree() for m in self.terms})

    def left_deriv_ghost(self, A):
        "Left derivative along xi^A."
        out = {}
        for m, c in self.terms.items():
            if A not in m.g:
                continue
            pos = m.g.index(A)
            sign = -1 if pos % 2 else 1
            m2 = GhostMonomial(m.g[:pos] + m.g[pos + 1:], m.a)
            out[m2] = c.scale(sign)
        return GradedFunction(self.chart, self.rank, out)

    def left_deriv_antighost(self, A):
        "Left derivative along xi*_A."
        out = {}
        for m, c in self.terms.items():
            if A not in m.a:
                continue
            pos = m.a.index(A)
            sign = -1 if (len(m.g) + pos) % 2 else 1
            m2 = GhostMonomial(m.g, m.a[:pos] + m.a[pos + 1:])
            out[m2] = c.scale(sign)
        return GradedFunction(self.chart, self.rank, out)

    def partial(self, coord):
        return GradedFunction(self.chart, self.rank,
                              {m: c.partial(coord) for m, c in self.terms.items()})

    def restrict_to_section(self, mapping):
        "Substitute fiber coordinates in every coefficient."
        return GradedFunction(self.chart, self.rank,
                              {m: c.substitute(mapping) for m, c in self.terms.items()})

    def with_chart(self, chart):
        return GradedFunction(chart, self.rank,
                              {m: c.with_chart(chart) for m, c in self.terms.items()})

    def __str__(self):
        if not self.terms:
            return "0"
        order = sorted(self.terms, key=lambda m: (m.bidegree(), m.key()))
        return " + ".join("(%s) %s" % (self.terms[m], m) for m in order)

    def __repr__(self):
        return "<GradedFunction %s>" % self


class Section:
    """Element of the section module: a GradedFunction tensored with the
    fixed frame mu.  Kept nominally distinct from GradedFunction."""

    __slots__ = ("fun",)

    def __init__(self, fun):
        assert isinstance(fun, GradedFunction)
        self.fun = fun

    @classmethod
    def zero(cls, chart, rank):
        return cls(GradedFunction.zero(chart, rank))

    @classmethod
    def frame(cls, chart, rank):
        return cls(GradedFunction.one(chart, rank))

    @property
    def chart(self):
        return self.fun.chart

    @property
    def rank(self):
        return self.fun.rank

    def is_zero(self):
        return self.fun.is_zero()

    def __add__(self, other):
        assert isinstance(other, Section)
        return Section(self.fun + other.fun)

    def __neg__(self):
        return Section(-self.fun)

    def __sub__(self, other):
        return Section(self.fun - other.fun)

    def scale(self, q):
        return Section(self.fun.scale(q))

    def pr_bidegree(self, h, k):
        return Section(self.fun.pr_bidegree(h, k))

    def restrict_to_section(self, mapping):
        return Section(self.fun.restrict_to_section(mapping))

    def __eq__(self, other):
        return isinstance(other, Section) and self.fun == other.fun

    def __hash__(self):
        return hash(("section", self.fun))

    def __str__(self):
        if self.is_zero():
            return "0"
        order = sorted(self.fun.terms, key=lambda m: (m.bidegree(), m.key()))
        return " + ".join("(%s) %s mu" % (self.fun.terms[m], m) if (m.g or m.a)
                          else "(%s) mu" % self.fun.terms[m] for m in order)

    def __repr__(self):
        return "<Section %s>" % self


def shifted_parity(mono):
    "Parity of a monomial section in the shifted module L[1]."
    return (mono.parity() + 1) % 2
