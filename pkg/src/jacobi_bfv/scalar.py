"""Exact coefficient ring for the local model.

Elements are finite rational combinations of power products of atoms:
plain coordinates, sin/cos of angular coordinates, abstract function
symbols (base-coordinate dependence only), and formal partial-derivative
atoms of the abstract symbols.  The normal form is unique: monomials are
kept in a fixed sorted order, cos carries exponent <= 1 (cos^2 is
rewritten to 1 - sin^2 exhaustively), zero coefficients are dropped.
No floating point enters the ring; numeric evaluation exists only as a
test aid.
"""

from fractions import Fraction
import math


class Chart:
    """Coordinate names and roles, plus declared abstract function symbols.

    fiber coordinates index the ghost generators elsewhere; abstract
    functions may depend on base coordinates only (the BRST homotopy
    needs closed-form integration over fiber dependence).
    """

    __slots__ = ("coords", "angular", "fiber", "funcs", "_pos")

    def __init__(self, coords, angular=(), fiber=(), funcs=None):
        self.coords = tuple(coords)
        assert len(set(self.coords)) == len(self.coords), "coordinate name clash"
        self.angular = frozenset(angular)
        for a in self.angular:
            assert a in self.coords, a
        self.fiber = tuple(fiber)
        for y in self.fiber:
            assert y in self.coords, y
        assert not (self.angular & set(self.fiber)), \
            "fiber coordinates must be polynomial atoms"
        self.funcs = {}
        for name, deps in dict(funcs or {}).items():
            assert name not in self.coords, name
            deps = tuple(deps)
            for d in deps:
                assert d in self.coords and d not in self.fiber, \
                    "abstract functions depend on base coordinates only"
            self.funcs[name] = deps
        self._pos = {c: i for i, c in enumerate(self.coords)}

    @property
    def base(self):
        return tuple(c for c in self.coords if c not in self.fiber)

    def axis(self, name):
        return self._pos[name]

    def _key(self):
        return (self.coords, self.angular, self.fiber,
                tuple(sorted(self.funcs.items())))

    def __eq__(self, other):
        return isinstance(other, Chart) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        return "Chart(%r, angular=%r, fiber=%r)" % (
            list(self.coords), sorted(self.angular), list(self.fiber))

    def reduced(self):
        "The chart of the base alone (fiber coordinates removed)."
        return Chart(self.base, self.angular & set(self.base), (), self.funcs)


# Atom encodings.  All are tuples whose first entry names the kind, so
# mixed-kind comparison is well defined and the term order is total:
#   ("x", coord)           plain coordinate
#   ("sin", coord) / ("cos", coord)
#   ("fn", name)           abstract function symbol
#   ("dfn", name, multi)   formal partial derivative, multi = sorted tuple


def _atom_ok(atom, chart):
    kind = atom[0]
    if kind == "x":
        return atom[1] in chart._pos
    if kind in ("sin", "cos"):
        return atom[1] in chart.angular
    if kind == "fn":
        return atom[1] in chart.funcs
    if kind == "dfn":
        if atom[1] not in chart.funcs:
            return False
        deps = chart.funcs[atom[1]]
        return all(c in deps for c in atom[2]) and tuple(sorted(atom[2])) == atom[2]
    return False


def _mul_keys(k1, k2):
    exps = dict(k1)
    for atom, e in k2:
        exps[atom] = exps.get(atom, 0) + e
    return tuple(sorted(exps.items()))


def _reduce_terms(raw):
    # Exhaustive cos^2 -> 1 - sin^2 rewrite, then merge and drop zeros.
    out = {}
    stack = list(raw.items())
    while stack:
        key, c = stack.pop()
        if c == 0:
            continue
        hit = None
        for atom, e in key:
            if atom[0] == "cos" and e >= 2:
                hit = (atom, e)
                break
        if hit is None:
            c0 = out.get(key, Fraction(0)) + c
            if c0 == 0:
                out.pop(key, None)
            else:
                out[key] = c0
            continue
        atom, e = hit
        rest = tuple((a, x) for a, x in key if a != atom)
        if e > 2:
            rest = _mul_keys(rest, ((atom, e - 2),))
        stack.append((rest, c))
        stack.append((_mul_keys(rest, ((("sin", atom[1]), 2),)), -c))
    return out


class ScalarExpr:
    """Normal-form ring element over a fixed chart."""

    __slots__ = ("chart", "terms")

    def __init__(self, chart, terms=None):
        self.chart = chart
        self.terms = _reduce_terms(terms or {})

    # -- constructors ------------------------------------------------

    @classmethod
    def zero(cls, chart):
        return cls(chart, {})

    @classmethod
    def number(cls, chart, q):
        return cls(chart, {(): Fraction(q)})

    @classmethod
    def one(cls, chart):
        return cls.number(chart, 1)

    @classmethod
    def coord(cls, chart, name):
        assert name in chart._pos, name
        return cls(chart, {((("x", name), 1),): Fraction(1)})

    @classmethod
    def sin(cls, chart, name):
        assert name in chart.angular, name
        return cls(chart, {((("sin", name), 1),): Fraction(1)})

    @classmethod
    def cos(cls, chart, name):
        assert name in chart.angular, name
        return cls(chart, {((("cos", name), 1),): Fraction(1)})

    @classmethod
    def func(cls, chart, name):
        assert name in chart.funcs, name
        return cls(chart, {((("fn", name), 1),): Fraction(1)})

    # -- ring structure ----------------------------------------------

    def is_zero(self):
        return not self.terms

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = ScalarExpr.number(self.chart, other)
        assert self.chart == other.chart
        terms = dict(self.terms)
        for k, c in other.terms.items():
            c0 = terms.get(k, Fraction(0)) + c
            if c0 == 0:
                terms.pop(k, None)
            else:
                terms[k] = c0
        out = ScalarExpr.zero(self.chart)
        out.terms = terms
        return out

    __radd__ = __add__

    def __neg__(self):
        out = ScalarExpr.zero(self.chart)
        out.terms = {k: -c for k, c in self.terms.items()}
        return out

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = ScalarExpr.number(self.chart, other)
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        assert self.chart == other.chart
        raw = {}
        for k1, c1 in self.terms.items():
            for k2, c2 in other.terms.items():
                k = _mul_keys(k1, k2)
                raw[k] = raw.get(k, Fraction(0)) + c1 * c2
        return ScalarExpr(self.chart, raw)

    def __rmul__(self, other):
        return self.__mul__(other)

    def scale(self, q):
        q = Fraction(q)
        out = ScalarExpr.zero(self.chart)
        if q != 0:
            out.terms = {k: q * c for k, c in self.terms.items()}
        return out

    def __pow__(self, n):
        assert isinstance(n, int) and n >= 0
        out = ScalarExpr.one(self.chart)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = ScalarExpr.number(self.chart, other)
        return isinstance(other, ScalarExpr) and \
            self.chart == other.chart and self.terms == other.terms

    def __hash__(self):
        return hash((self.chart, tuple(sorted(self.terms.items()))))

    # -- calculus ----------------------------------------------------

    def partial(self, coord):
        assert coord in self.chart._pos, coord
        funcs = self.chart.funcs
        raw = {}
        for key, c in self.terms.items():
            for i, (atom, e) in enumerate(key):
                kind = atom[0]
                if kind == "x":
                    if atom[1] != coord:
                        continue
                    datoms = ()
                elif kind == "sin":
                    if atom[1] != coord:
                        continue
                    datoms = ((("cos", coord), 1),)
                elif kind == "cos":
                    if atom[1] != coord:
                        continue
                    datoms = None  # handled below with a sign
                elif kind == "fn":
                    if coord not in funcs[atom[1]]:
                        continue
                    datoms = ((("dfn", atom[1], (coord,)), 1),)
                else:  # dfn
                    if coord not in funcs[atom[1]]:
                        continue
                    multi = tuple(sorted(atom[2] + (coord,)))
                    datoms = ((("dfn", atom[1], multi), 1),)
                rest = key[:i] + ((atom, e - 1),) + key[i + 1:]
                rest = tuple((a, x) for a, x in rest if x > 0)
                coeff = c * e
                if kind == "cos":
                    coeff = -coeff
                    datoms = ((("sin", coord), 1),)
                k = _mul_keys(rest, datoms)
                raw[k] = raw.get(k, Fraction(0)) + coeff
        return ScalarExpr(self.chart, raw)

    def substitute(self, mapping):
        """Ring homomorphism sending fiber coordinates to given elements."""
        for name in mapping:
            assert name in self.chart.fiber, \
                "substitution is defined on fiber coordinates, got %r" % (name,)
        out = ScalarExpr.zero(self.chart)
        for key, c in self.terms.items():
            term = ScalarExpr.number(self.chart, c)
            for atom, e in key:
                if atom[0] == "x" and atom[1] in mapping:
                    term = term * (mapping[atom[1]] ** e)
                else:
                    term = term * ScalarExpr(self.chart, {((atom, e),): Fraction(1)})
            out = out + term
        return out

    def max_degree(self, names):
        "Largest total power of the named plain-coordinate atoms."
        names = set(names)
        best = 0
        for key in self.terms:
            d = sum(e for atom, e in key if atom[0] == "x" and atom[1] in names)
            best = max(best, d)
        return best

    def with_chart(self, chart):
        "Reinterpret over another chart declaring the same atoms."
        for key in self.terms:
            for atom, _ in key:
                assert _atom_ok(atom, chart), \
                    "atom %r not declared on target chart" % (atom,)
        out = ScalarExpr.zero(chart)
        out.terms = dict(self.terms)
        return out

    def atoms(self):
        seen = set()
        for key in self.terms:
            for atom, _ in key:
                seen.add(atom)
        return seen

    # -- numeric evaluation (test aid only) --------------------------

    def eval_num(self, point):
        total = 0.0
        for key, c in self.terms.items():
            v = float(c)
            for atom, e in key:
                kind = atom[0]
                if kind == "x":
                    v *= point[atom[1]] ** e
                elif kind == "sin":
                    v *= math.sin(point[atom[1]]) ** e
                elif kind == "cos":
                    v *= math.cos(point[atom[1]]) ** e
                else:
                    raise ValueError("abstract symbol %r has no numeric value" % (atom,))
            total += v
        return total

    # -- rendering ---------------------------------------------------

    @staticmethod
    def _atom_str(atom):
        kind = atom[0]
        if kind == "x":
            return atom[1]
        if kind in ("sin", "cos"):
            return "%s(%s)" % (kind, atom[1])
        if kind == "fn":
            return atom[1]
        return "%s;%s" % (atom[1], ",".join(atom[2]))

    def __str__(self):
        if not self.terms:
            return "0"
        bits = []
        for key, c in sorted(self.terms.items()):
            factors = []
            if abs(c) != 1 or not key:
                factors.append(str(abs(c)))
            for atom, e in key:
                s = self._atom_str(atom)
                factors.append(s if e == 1 else "%s^%d" % (s, e))
            bits.append(("-" if c < 0 else "+", "*".join(factors)))
        sign, first = bits[0]
        text = ("-" if sign == "-" else "") + first
        for sign, mono in bits[1:]:
            text += " %s %s" % (sign, mono)
        return text

    def __repr__(self):
        return "<ScalarExpr %s>" % self

    def __bool__(self):
        return bool(self.terms)
