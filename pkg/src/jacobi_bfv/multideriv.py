"""Multiderivations of the section module in word form.

An operator is a sum of terms  c * w1 w2 ... wn  acting on n section
arguments, optionally landing back in sections (frame flag).  The four
letter kinds and their actions on a section c' (coefficient of the
frame) are

    m        strip the frame:            c'
    d_i      coordinate derivative:      dc'/dx^i
    e_A      left derivative along xi^A
    f^A      left derivative along xi*_A

m and d_i are odd (internal degree 1), e_A has degree 0, f^A degree 2.
Words are kept sorted (m, then d in coordinate order, then e, then f);
transposing two odd letters costs a sign and a repeated odd letter
kills the term.

The Schouten-Jacobi bracket is computed in a cotangent realization:
letters become momenta on an odd cotangent space with one extra even
scale variable t, a term of frame flag fr, arity n and m-count eps
carries t-weight  w = fr - n + eps, and the odd Poisson bracket of
symbols is evaluated explicitly.  The letter content of the result is
read back off the momenta, and fr = w + n - eps is checked to land in
{0, 1}.  An independent composition-style evaluation oracle and a
probe-based reconstruction routine round out the module.
"""

from fractions import Fraction
from itertools import combinations, combinations_with_replacement, product as iproduct

from .scalar import ScalarExpr
from .ghost import (GhostMonomial, GradedFunction, Section, ONE_MONO,
                    mono_mul, shifted_parity)


# -- letters ---------------------------------------------------------

M = ("m",)


def d_letter(coord):
    return ("d", coord)


def e_letter(A):
    return ("e", A)


def f_letter(A):
    return ("f", A)


def letter_degree(ell):
    return {"m": 1, "d": 1, "e": 0, "f": 2}[ell[0]]


def letter_odd(ell):
    return ell[0] in ("m", "d")


def letter_bidegree(ell):
    if ell[0] == "e":
        return (-1, 0)
    if ell[0] == "f":
        return (0, -1)
    return (0, 0)


def _letter_key(ell, chart):
    kind = ell[0]
    if kind == "m":
        return (0, 0)
    if kind == "d":
        return (1, chart.axis(ell[1]))
    if kind == "e":
        return (2, ell[1])
    return (3, ell[1])


def sort_word(word, chart):
    """Bring a word to canonical order.  Returns (sign, word); the sign
    is the parity of odd-odd transpositions, and (0, None) signals a
    repeated odd letter."""
    w = list(word)
    sign = 1
    for i in range(1, len(w)):
        j = i
        while j > 0 and _letter_key(w[j - 1], chart) > _letter_key(w[j], chart):
            if letter_odd(w[j - 1]) and letter_odd(w[j]):
                sign = -sign
            w[j - 1], w[j] = w[j], w[j - 1]
            j -= 1
    for x, y in zip(w, w[1:]):
        if x == y and letter_odd(x):
            return 0, None
    return sign, tuple(w)


def word_parity(word):
    return sum(1 for ell in word if letter_odd(ell)) % 2


def _letter_str(ell):
    kind = ell[0]
    if kind == "m":
        return "m"
    if kind == "d":
        return "d_%s" % ell[1]
    if kind == "e":
        return "e_%d" % (ell[1] + 1)
    return "f^%d" % (ell[1] + 1)


# -- the operator class ----------------------------------------------

class MultiDerivation:
    """Finite sum of word terms; keys are (mono, word, fr)."""

    __slots__ = ("chart", "rank", "terms")

    def __init__(self, chart, rank, terms=None):
        self.chart = chart
        self.rank = rank
        self.terms = {}
        for (mono, word, fr), coeff in (terms or {}).items():
            if coeff.is_zero():
                continue
            assert fr in (0, 1)
            assert all(0 <= A < rank for A in mono.g + mono.a)
            s, canon = sort_word(word, chart)
            assert s == 1 and canon == word, "word %r is not canonical" % (word,)
            for ell in word:
                if ell[0] == "d":
                    assert ell[1] in chart._pos, ell
                elif ell[0] in ("e", "f"):
                    assert 0 <= ell[1] < rank, ell
            self.terms[(mono, word, fr)] = coeff

    # -- constructors ------------------------------------------------

    @classmethod
    def zero(cls, chart, rank):
        return cls(chart, rank, {})

    @classmethod
    def single(cls, chart, rank, word, coeff=None, mono=ONE_MONO, fr=1):
        coeff = ScalarExpr.one(chart) if coeff is None else coeff
        return cls(chart, rank, {(mono, tuple(word), fr): coeff})

    @classmethod
    def from_section(cls, sec):
        terms = {(mono, (), 1): c for mono, c in sec.fun.terms.items()}
        return cls(sec.chart, sec.rank, terms)

    @classmethod
    def from_function(cls, fun):
        terms = {(mono, (), 0): c for mono, c in fun.terms.items()}
        return cls(fun.chart, fun.rank, terms)

    def to_section(self):
        out = {}
        for (mono, word, fr), c in self.terms.items():
            assert word == () and fr == 1, "not an arity-0 section term"
            out[mono] = c
        return Section(GradedFunction(self.chart, self.rank, out))

    def to_function(self):
        out = {}
        for (mono, word, fr), c in self.terms.items():
            assert word == () and fr == 0
            out[mono] = c
        return GradedFunction(self.chart, self.rank, out)

    # -- linear structure --------------------------------------------

    def is_zero(self):
        return not self.terms

    def _like(self, other):
        return isinstance(other, MultiDerivation) and \
            self.chart == other.chart and self.rank == other.rank

    def __add__(self, other):
        assert self._like(other)
        terms = dict(self.terms)
        for k, c in other.terms.items():
            c0 = terms.get(k)
            c0 = c if c0 is None else c0 + c
            if c0.is_zero():
                terms.pop(k, None)
            else:
                terms[k] = c0
        out = MultiDerivation.zero(self.chart, self.rank)
        out.terms = terms
        return out

    def __neg__(self):
        out = MultiDerivation.zero(self.chart, self.rank)
        out.terms = {k: -c for k, c in self.terms.items()}
        return out

    def __sub__(self, other):
        return self + (-other)

    def scale(self, q):
        if isinstance(q, ScalarExpr):
            out = {}
            for k, c in self.terms.items():
                c0 = c * q
                if not c0.is_zero():
                    out[k] = c0
            o = MultiDerivation.zero(self.chart, self.rank)
            o.terms = out
            return o
        out = MultiDerivation.zero(self.chart, self.rank)
        if Fraction(q) != 0:
            out.terms = {k: c.scale(q) for k, c in self.terms.items()}
        return out

    def __eq__(self, other):
        return self._like(other) and self.terms == other.terms

    def __hash__(self):
        return hash((self.chart, self.rank,
                     tuple(sorted(((m.key(), w, fr), hash(c))
                                  for (m, w, fr), c in self.terms.items()))))

    # -- bookkeeping -------------------------------------------------

    def arity(self):
        ns = {len(w) for (_, w, _) in self.terms}
        assert len(ns) <= 1, "mixed arity: %r" % ns
        return ns.pop() if ns else None

    def frame(self):
        frs = {fr for (_, _, fr) in self.terms}
        assert len(frs) <= 1, "mixed frame flags"
        return frs.pop() if frs else None

    def term_tau(self, key):
        mono, word, fr = key
        return mono.ghost_number() + sum(letter_degree(l) for l in word) - 1 + fr

    def tau(self):
        ts = {self.term_tau(k) for k in self.terms}
        assert len(ts) <= 1, "not homogeneous: %r" % ts
        return ts.pop() if ts else None

    def homogeneous_components(self):
        "Split by total degree tau."
        parts = {}
        for k, c in self.terms.items():
            parts.setdefault(self.term_tau(k), {})[k] = c
        return {t: MultiDerivation(self.chart, self.rank, d)
                for t, d in sorted(parts.items())}

    def term_bidegree(self, key):
        mono, word, fr = key
        h, k = mono.bidegree()
        for ell in word:
            dh, dk = letter_bidegree(ell)
            h += dh
            k += dk
        return (h, k)

    def op_bidegrees(self):
        return sorted({self.term_bidegree(k) for k in self.terms})

    def pr_op_bidegree(self, h, k):
        return MultiDerivation(self.chart, self.rank,
                               {key: c for key, c in self.terms.items()
                                if self.term_bidegree(key) == (h, k)})

    def map_coeffs(self, f):
        "Apply f to every scalar coefficient (used for substitutions)."
        out = {}
        for key, c in self.terms.items():
            c0 = f(c)
            if not c0.is_zero():
                out[key] = c0
        o = MultiDerivation.zero(self.chart, self.rank)
        o.terms = out
        return o

    def __str__(self):
        if not self.terms:
            return "0"
        def keyfun(key):
            mono, word, fr = key
            return (len(word), tuple(_letter_key(l, self.chart) for l in word),
                    mono.key(), fr)
        bits = []
        for key in sorted(self.terms, key=keyfun):
            mono, word, fr = key
            pieces = ["(%s)" % self.terms[key]]
            if mono.g or mono.a:
                pieces.append(str(mono))
            pieces += [_letter_str(l) for l in word]
            if fr:
                pieces.append("[mu]")
            bits.append(" ".join(pieces))
        return " + ".join(bits)

    def __repr__(self):
        return "<MultiDerivation %s>" % self


def md_mul(D1, D2):
    """Graded product of word operators; at most one factor may carry
    the frame flag."""
    assert D1.chart == D2.chart and D1.rank == D2.rank
    chart, rank = D1.chart, D1.rank
    out = MultiDerivation.zero(chart, rank)
    terms = {}
    for (m1, w1, fr1), c1 in D1.terms.items():
        pw1 = word_parity(w1)
        for (m2, w2, fr2), c2 in D2.terms.items():
            assert fr1 + fr2 <= 1, "product of two frame-valued operators"
            sgn = -1 if (pw1 * m2.parity()) % 2 else 1
            s_m, mono = mono_mul(m1, m2)
            if not s_m:
                continue
            s_w, word = sort_word(w1 + w2, chart)
            if not s_w:
                continue
            c = (c1 * c2).scale(sgn * s_m * s_w)
            key = (mono, word, fr1 + fr2)
            c0 = terms.get(key)
            c0 = c if c0 is None else c0 + c
            if c0.is_zero():
                terms.pop(key, None)
            else:
                terms[key] = c0
    out.terms = terms
    return out


# -- evaluation ------------------------------------------------------

def _letter_apply(ell, fun):
    kind = ell[0]
    if kind == "m":
        return fun
    if kind == "d":
        return fun.partial(ell[1])
    if kind == "e":
        return fun.left_deriv_ghost(ell[1])
    return fun.left_deriv_antighost(ell[1])


def _peel(word, parts, chart, rank):
    # parts: [(GradedFunction, shifted parity)] for homogeneous pieces
    if not word:
        return GradedFunction.one(chart, rank)
    head, tail = word[0], word[1:]
    tail_par = word_parity(tail)
    out = GradedFunction.zero(chart, rank)
    for j, (fun, sig) in enumerate(parts):
        acted = _letter_apply(head, fun)
        if acted.is_zero():
            continue
        rest = parts[:j] + parts[j + 1:]
        expo = tail_par * sig + sum(parts[i][1] for i in range(j)) * sig
        term = acted.ghost_mul(_peel(tail, rest, chart, rank))
        if expo % 2:
            term = -term
        out = out + term
    return out


def evaluate(D, args):
    """Apply the operator to section arguments; returns a Section for a
    frame-valued operator, a GradedFunction otherwise (a Section when D
    has no terms at all)."""
    chart, rank = D.chart, D.rank
    split = []
    for lam in args:
        assert isinstance(lam, Section)
        parts = []
        for par in (0, 1):
            sel = {m: c for m, c in lam.fun.terms.items()
                   if shifted_parity(m) == par}
            if sel:
                parts.append((GradedFunction(chart, rank, sel), par))
        if not parts:
            parts.append((GradedFunction.zero(chart, rank), 0))
        split.append(parts)
    total = GradedFunction.zero(chart, rank)
    fr_flag = D.frame()
    for (mono, word, fr), coeff in D.terms.items():
        assert len(word) == len(args), "arity mismatch"
        cg = GradedFunction(chart, rank, {mono: coeff})
        for combo in iproduct(*split):
            val = _peel(word, list(combo), chart, rank)
            if not val.is_zero():
                total = total + cg.ghost_mul(val)
    if fr_flag == 0:
        return total
    return Section(total)


# -- the bracket in the cotangent realization ------------------------
#
# Symbol terms are keyed by (odd, pg, pa, w): the sequence of odd
# generators in canonical order (ghosts, anti-ghosts, pi_t, then the
# odd coordinate momenta), the even ghost/anti-ghost momenta as sorted
# multisets, and the integer t-weight.  Coefficients are ScalarExpr.

def _odd_item_key(item, chart):
    tag = item[0]
    if tag == "G":
        return (0, item[1])
    if tag == "A":
        return (1, item[1])
    if tag == "T":
        return (2, 0)
    return (3, chart.axis(item[1]))


def _symbol_mul(k1, c1, k2, c2, chart):
    odd1, pg1, pa1, w1 = k1
    odd2, pg2, pa2, w2 = k2
    if set(odd1) & set(odd2):
        return None, None
    inv = 0
    for it2 in odd2:
        key2 = _odd_item_key(it2, chart)
        inv += sum(1 for it1 in odd1 if _odd_item_key(it1, chart) > key2)
    odd = tuple(sorted(odd1 + odd2, key=lambda it: _odd_item_key(it, chart)))
    c = c1 * c2
    if inv % 2:
        c = -c
    key = (odd, tuple(sorted(pg1 + pg2)), tuple(sorted(pa1 + pa2)), w1 + w2)
    return key, c


def _to_symbols(D):
    out = {}
    for (mono, word, fr), c in D.terms.items():
        eps = 1 if M in word else 0
        odd = [("G", A) for A in mono.g] + [("A", B) for B in mono.a]
        if eps:
            odd.append(("T",))
        odd += [("X", ell[1]) for ell in word if ell[0] == "d"]
        pg = tuple(sorted(ell[1] for ell in word if ell[0] == "e"))
        pa = tuple(sorted(ell[1] for ell in word if ell[0] == "f"))
        key = (tuple(odd), pg, pa, fr - len(word) + eps)
        c0 = out.get(key)
        c0 = c if c0 is None else c0 + c
        if c0.is_zero():
            out.pop(key, None)
        else:
            out[key] = c0
    return out


def _from_symbols(sym, chart, rank):
    terms = {}
    for (odd, pg, pa, w), c in sym.items():
        gs = tuple(A for it in odd if it[0] == "G" for A in (it[1],))
        as_ = tuple(B for it in odd if it[0] == "A" for B in (it[1],))
        eps = 1 if any(it[0] == "T" for it in odd) else 0
        xs = [it[1] for it in odd if it[0] == "X"]
        word = ((M,) if eps else ()) + tuple(d_letter(x) for x in xs) \
            + tuple(e_letter(A) for A in pg) + tuple(f_letter(B) for B in pa)
        fr = w + len(word) - eps
        assert fr in (0, 1), \
            "symbol with t-weight %d does not come from an operator" % w
        key = (GhostMonomial(gs, as_), word, fr)
        c0 = terms.get(key)
        c0 = c if c0 is None else c0 + c
        if c0.is_zero():
            terms.pop(key, None)
        else:
            terms[key] = c0
    out = MultiDerivation.zero(chart, rank)
    out.terms = terms
    return out


def _dR_oddmom(key, c, item, chart):
    "Right derivative by an odd momentum; removes item with suffix sign."
    odd, pg, pa, w = key
    if item not in odd:
        return None
    pos = odd.index(item)
    after = len(odd) - pos - 1
    c2 = -c if after % 2 else c
    return (odd[:pos] + odd[pos + 1:], pg, pa, w), c2


def _dR_evenmom(key, c, A, which):
    odd, pg, pa, w = key
    bag = pg if which == "g" else pa
    k = bag.count(A)
    if not k:
        return None
    i = bag.index(A)
    bag2 = bag[:i] + bag[i + 1:]
    c2 = c.scale(k)
    if which == "g":
        return (odd, bag2, pa, w), c2
    return (odd, pg, bag2, w), c2


def _dL_oddgen(key, c, item):
    "Left derivative by a ghost or anti-ghost; prefix sign."
    odd, pg, pa, w = key
    if item not in odd:
        return None
    pos = odd.index(item)
    c2 = -c if pos % 2 else c
    return (odd[:pos] + odd[pos + 1:], pg, pa, w), c2


def _dL_t(key, c):
    odd, pg, pa, w = key
    if w == 0:
        return None
    return (odd, pg, pa, w - 1), c.scale(w)


def _dL_coord(key, c, coord):
    c2 = c.partial(coord)
    if c2.is_zero():
        return None
    return key, c2


def _half_bracket(F, G, chart, rank):
    "sum over u of (dR F / dpi_u)(dL G / du), as a symbol dict"
    out = {}
    pairs = []
    for kF, cF in F.items():
        for kG, cG in G.items():
            for coord in chart.coords:
                a = _dR_oddmom(kF, cF, ("X", coord), chart)
                if a:
                    b = _dL_coord(kG, cG, coord)
                    if b:
                        pairs.append((a, b))
            a = _dR_oddmom(kF, cF, ("T",), chart)
            if a:
                b = _dL_t(kG, cG)
                if b:
                    pairs.append((a, b))
            for A in range(rank):
                a = _dR_evenmom(kF, cF, A, "g")
                if a:
                    b = _dL_oddgen(kG, cG, ("G", A))
                    if b:
                        pairs.append((a, b))
                a = _dR_evenmom(kF, cF, A, "a")
                if a:
                    b = _dL_oddgen(kG, cG, ("A", A))
                    if b:
                        pairs.append((a, b))
    for (kA, cA), (kB, cB) in pairs:
        key, c = _symbol_mul(kA, cA, kB, cB, chart)
        if key is None:
            continue
        c0 = out.get(key)
        c0 = c if c0 is None else c0 + c
        if c0.is_zero():
            out.pop(key, None)
        else:
            out[key] = c0
    return out


def sj_bracket(D, E):
    """Schouten-Jacobi bracket of two word operators."""
    assert D.chart == E.chart and D.rank == E.rank
    chart, rank = D.chart, D.rank
    out = {}
    for tD, FD in _split_parity_symbols(D).items():
        for tE, FE in _split_parity_symbols(E).items():
            flip = -1 if ((tD + 1) * (tE + 1)) % 2 else 1
            part1 = _half_bracket(FD, FE, chart, rank)
            part2 = _half_bracket(FE, FD, chart, rank)
            for key, c in part1.items():
                c0 = out.get(key)
                c0 = c if c0 is None else c0 + c
                if c0.is_zero():
                    out.pop(key, None)
                else:
                    out[key] = c0
            for key, c in part2.items():
                c = c.scale(-flip)
                c0 = out.get(key)
                c0 = c if c0 is None else c0 + c
                if c0.is_zero():
                    out.pop(key, None)
                else:
                    out[key] = c0
    return _from_symbols(out, chart, rank)


def _split_parity_symbols(D):
    "Symbol dicts grouped by the parity of the odd sequence."
    groups = {}
    for key, c in _to_symbols(D).items():
        groups.setdefault(len(key[0]) % 2, {})[key] = c
    return groups


# -- evaluation oracle for the bracket -------------------------------

def _compose(D, E, args):
    """sum over unshuffles of D(E(first block), remaining), with the
    Koszul sign of the unshuffle on shifted parities."""
    nD, nE = D.arity(), E.arity()
    chart, rank = D.chart, D.rank
    if nD == 0:
        return None
    sig = []
    for lam in args:
        ps = {shifted_parity(m) for m in lam.fun.terms}
        assert len(ps) <= 1, "oracle arguments must be parity homogeneous"
        sig.append(ps.pop() if ps else 0)
    total = None
    for S in combinations(range(len(args)), nE):
        inS = set(S)
        expo = 0
        for s in S:
            for r in range(s):
                if r not in inS:
                    expo += sig[r] * sig[s]
        inner = evaluate(E, [args[i] for i in S])
        assert isinstance(inner, Section), "oracle needs frame-valued operators"
        rest = [args[i] for i in range(len(args)) if i not in inS]
        val = evaluate(D, [inner] + rest)
        if expo % 2:
            val = -val
        total = val if total is None else total + val
    return total


def gerstenhaber_eval_oracle(D, E, args):
    """Evaluate [[D, E]] on arguments without forming the bracket:
    alternating sum of unshuffle compositions."""
    nD, nE = D.arity(), E.arity()
    tD, tE = D.tau(), E.tau()
    chart, rank = D.chart, D.rank
    assert len(args) == nD + nE - 1
    first = _compose(D, E, args)
    second = _compose(E, D, args)
    flip = -1 if ((tD - 1) * (tE - 1)) % 2 else 1
    zero = Section.zero(chart, rank)
    first = zero if first is None else first
    second = zero if second is None else second
    return first - second.scale(flip)


# -- Jacobi structures ----------------------------------------------

class NotJacobiError(ValueError):
    def __init__(self, residual):
        super().__init__("the pair does not satisfy the Jacobi condition")
        self.residual = residual


def build_G(chart, rank):
    "The ghost pairing operator: sum over A of  e_A f^A  with frame."
    out = MultiDerivation.zero(chart, rank)
    for A in range(rank):
        out = out + MultiDerivation.single(chart, rank,
                                           (e_letter(A), f_letter(A)))
    return out


def is_jacobi(J):
    return sj_bracket(J, J).is_zero()


def jacobi_from_pair(chart, rank, biv, vec):
    """Operator of an ungraded pair: biv maps coordinate pairs (i, j),
    i before j in chart order, to coefficients; vec maps coordinates to
    coefficients.  Raises NotJacobiError when the induced bracket fails
    the Jacobi identity."""
    out = MultiDerivation.zero(chart, rank)
    for (i, j), c in sorted(biv.items(), key=lambda kv: (chart.axis(kv[0][0]),
                                                         chart.axis(kv[0][1]))):
        assert chart.axis(i) < chart.axis(j), (i, j)
        if isinstance(c, (int, Fraction)):
            c = ScalarExpr.number(chart, c)
        out = out + MultiDerivation.single(chart, rank,
                                           (d_letter(i), d_letter(j)), c)
    for i, c in sorted(vec.items(), key=lambda kv: chart.axis(kv[0])):
        if isinstance(c, (int, Fraction)):
            c = ScalarExpr.number(chart, c)
        out = out + MultiDerivation.single(chart, rank, (M, d_letter(i)), c)
    res = sj_bracket(out, out)
    if not res.is_zero():
        raise NotJacobiError(res)
    return out


def hamiltonian(lam, J):
    "The arity-1 operator [[J, lam]] of a section."
    return sj_bracket(J, MultiDerivation.from_section(lam))


def jacobi_bracket(l1, l2, J):
    """Bracket of two sections induced by a frame-valued biderivation:
    the first argument is fed piecewise with its shifted-parity sign."""
    chart, rank = l1.chart, l1.rank
    out = Section.zero(chart, rank)
    for mono, c in l1.fun.terms.items():
        piece = Section(GradedFunction(chart, rank, {mono: c}))
        val = evaluate(J, [piece, l2])
        if shifted_parity(mono):
            val = -val
        out = out + val
    return out


# -- reconstruction from probes --------------------------------------

def _probe_section(ell, chart, rank):
    kind = ell[0]
    one = GradedFunction.one(chart, rank)
    if kind == "m":
        return Section(one)
    if kind == "d":
        return Section(one.scale(ScalarExpr.coord(chart, ell[1])))
    if kind == "e":
        return Section(GradedFunction.ghost(chart, rank, ell[1]))
    return Section(GradedFunction.antighost(chart, rank, ell[1]))


def _as_number(expr):
    if expr.is_zero():
        return Fraction(0)
    assert set(expr.terms) == {()}, "expected a constant, got %s" % expr
    return expr.terms[()]


def reconstruct(chart, rank, arity, frame, probe, letters=None, verify=True):
    """Recover a word operator from evaluations on probe sections.

    Each letter has a dual probe (the frame for m, a bare coordinate
    for d_i, single generators for e/f); on the probe tuple of a word
    only the word itself, and words trading one letter for m, survive.
    m-words are fixed first, their pollution is subtracted, and each
    coefficient follows by dividing out a self-calibrating constant.
    """
    if letters is None:
        letters = [M] + [d_letter(c) for c in chart.coords] \
            + [e_letter(A) for A in range(rank)] \
            + [f_letter(A) for A in range(rank)]
    letters = sorted(set(letters), key=lambda l: _letter_key(l, chart))
    words = []
    for combo in combinations_with_replacement(letters, arity):
        if any(x == y and letter_odd(x) for x, y in zip(combo, combo[1:])):
            continue
        words.append(tuple(combo))

    def targets(word):
        return [_probe_section(ell, chart, rank) for ell in word]

    def value_fun(v):
        if isinstance(v, Section):
            assert frame == 1 or v.is_zero(), \
                "probe returned a section for a function-valued operator"
            return v.fun
        assert isinstance(v, GradedFunction)
        assert frame == 0 or v.is_zero(), \
            "probe returned a bare function for a frame-valued operator"
        return v

    def kappa(word):
        unit = MultiDerivation.single(chart, rank, word, fr=frame)
        val = value_fun(evaluate(unit, targets(word)))
        assert set(val.terms) == {ONE_MONO}
        k = _as_number(val.terms[ONE_MONO])
        assert k != 0
        return k

    rec = MultiDerivation.zero(chart, rank)
    m_words = [w for w in words if M in w]
    plain_words = [w for w in words if M not in w]
    for word in m_words:
        T = targets(word)
        coeff = value_fun(probe(tuple(T))).scale(Fraction(1) / kappa(word))
        for mono, c in coeff.terms.items():
            rec = rec + MultiDerivation(chart, rank, {(mono, word, frame): c})
    m_part = rec
    for word in plain_words:
        T = targets(word)
        val = value_fun(probe(tuple(T)))
        if not m_part.is_zero():
            val = val - value_fun(evaluate(m_part, T))
        coeff = val.scale(Fraction(1) / kappa(word))
        for mono, c in coeff.terms.items():
            rec = rec + MultiDerivation(chart, rank, {(mono, word, frame): c})
    if verify:
        checks = [targets(w) for w in words]
        if arity and letters:
            # the defining tuples are matched by construction; a sum
            # probe detects values outside the multiderivation span
            blend = Section.zero(chart, rank)
            for ell in letters:
                blend = blend + _probe_section(ell, chart, rank)
            checks.append([blend] * arity)
        for T in checks:
            want = value_fun(probe(tuple(T)))
            got = value_fun(evaluate(rec, T))
            if want != got:
                raise ValueError(
                    "probe values are inconsistent with a word operator "
                    "of arity %d" % arity)
    return rec
