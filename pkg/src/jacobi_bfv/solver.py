"""Order-by-order construction of Maurer-Cartan elements, and the
operations built on top of it.

The generic loop lives in obstruction_solve: given contraction data, a
filtration and a candidate Qbar, it corrects Qbar by half the homotopy
of the bracket residual until the residual vanishes.  The projected
residual is the one genuine obstruction; when it is nonzero the solve
stops with an ObstructionError carrying it.

Instantiations: lifting a Jacobi operator along a connection (the
corrections carry ghost/anti-ghost pairs), BRST charges over a lifting
(the corrections carry anti-ghosts), and the gauge automorphisms
intertwining two solutions, realized as composites of exponentials of
inner derivations.

The remaining operations assemble the BFV differential from a charge,
transfer it to the reduced side, and expose the derived bracket family
on the reduced side.
"""

from fractions import Fraction

from .scalar import ScalarExpr
from .ghost import GhostMonomial, GradedFunction, Section, ONE_MONO
from .multideriv import (d_letter, MultiDerivation, evaluate, sj_bracket,
                         build_G, is_jacobi, NotJacobiError, jacobi_bracket)
from .contraction import (ConnectionSpec, imm_i_nabla, proj_p,
                          homotopy_H_nabla, BrstContraction, hpl_deform)


class FiltrationSpec:
    """Decreasing filtration, described by the minimal filtration level
    of an element (None for zero).  N is the base index: the projection
    annihilates everything of level > N."""

    __slots__ = ("level", "N")

    def __init__(self, level, N):
        self.level = level
        self.N = N


def md_antighost_level(D):
    # anti-ghost generators count +1, anti-ghost derivations -1
    if D.is_zero():
        return None
    return min(len(mono.a) - sum(1 for ell in word if ell[0] == "f")
               for (mono, word, fr) in D.terms)


def section_antighost_level(lam):
    if lam.is_zero():
        return None
    return min(len(mono.a) for mono in lam.fun.terms) - 1


class MCProblem:
    "Bracket, candidate, filtration and contraction data for one solve."

    __slots__ = ("bracket", "Qbar", "filtration", "H", "P")

    def __init__(self, bracket, Qbar, filtration, H, P):
        self.bracket = bracket
        self.Qbar = Qbar
        self.filtration = filtration
        self.H = H
        self.P = P


class ObstructionError(ValueError):
    """The projected bracket residual does not vanish, so no correction
    can remove it.  obstruction holds the projected part, residual the
    full bracket."""

    def __init__(self, obstruction, residual):
        super().__init__("projected bracket residual does not vanish")
        self.obstruction = obstruction
        self.residual = residual


def obstruction_solve(prob, max_iter=64):
    """Deform prob.Qbar into an exact Maurer-Cartan element.

    Returns (Q, trace); the trace records one entry per correction with
    the residual, its filtration level and the correction added.
    Raises ObstructionError when the projected residual is nonzero.
    """
    filt = prob.filtration
    R = prob.bracket(prob.Qbar, prob.Qbar)
    if not R.is_zero():
        lev = filt.level(R)
        if lev < filt.N:
            raise ValueError("bracket residual escapes the filtration "
                             "(level %d < base %d)" % (lev, filt.N))
    Q = prob.Qbar
    trace = []
    for step in range(max_iter):
        R = prob.bracket(Q, Q)
        if R.is_zero():
            return Q, trace
        obs = prob.P(R)
        if not obs.is_zero():
            raise ObstructionError(obs, R)
        corr = prob.H(R).scale(Fraction(1, 2))
        if corr.is_zero():
            raise ValueError("nonzero residual with zero correction; "
                             "contraction data is inconsistent")
        assert filt.level(corr) >= filt.N + 1 + step
        Q = Q + corr
        trace.append({"step": step + 1,
                      "residual": R,
                      "level": filt.level(R),
                      "correction": corr})
    raise ValueError("no Maurer-Cartan element within %d corrections"
                     % max_iter)


def exp_ad(R, x, bracket, cap=64):
    "Exponential of the inner derivation [R, -], summed until it dies."
    out = x
    term = x
    for k in range(1, cap):
        term = bracket(R, term).scale(Fraction(1, k))
        if term.is_zero():
            return out
        out = out + term
    raise ValueError("exponential series did not terminate")


class GaugeAutomorphism:
    """Composite of exponentials of inner derivations, stored as the
    ordered generator list and applied lazily."""

    __slots__ = ("generators", "bracket")

    def __init__(self, generators, bracket):
        self.generators = list(generators)
        self.bracket = bracket

    def __call__(self, x):
        for R in self.generators:
            x = exp_ad(R, x, self.bracket)
        return x


def gauge_intertwine(Q0, Q1, prob, max_iter=64):
    """Automorphism phi with phi(Q0) = Q1, for two Maurer-Cartan
    elements agreeing below the filtration cut."""
    for Q in (Q0, Q1):
        if not prob.bracket(Q, Q).is_zero():
            raise ValueError("gauge endpoints must be Maurer-Cartan")
    diff = Q1 - Q0
    if not diff.is_zero() and not prob.P(diff).is_zero():
        raise ValueError("gauge endpoints differ in the projected part")
    gens = []
    cur = Q0
    for _ in range(max_iter):
        diff = Q1 - cur
        if diff.is_zero():
            return GaugeAutomorphism(gens, prob.bracket)
        R = prob.H(diff)
        if R.is_zero():
            raise ValueError("intertwining stalled: homotopy of the "
                             "difference vanishes")
        gens.append(R)
        cur = exp_ad(R, cur, prob.bracket)
    raise ValueError("no intertwiner within %d exponentials" % max_iter)


# -- lifting ---------------------------------------------------------

def lifting_problem(J, conn):
    G = build_G(J.chart, J.rank)
    return MCProblem(
        bracket=sj_bracket,
        Qbar=G + imm_i_nabla(J, conn),
        filtration=FiltrationSpec(md_antighost_level, 0),
        H=lambda X: homotopy_H_nabla(X, conn),
        P=proj_p)


def lift_jacobi(J, conn, max_iter=64):
    "Lift a Jacobi operator along a connection.  Returns (Jhat, trace)."
    if not is_jacobi(J):
        raise NotJacobiError(sj_bracket(J, J))
    return obstruction_solve(lifting_problem(J, conn), max_iter)


# -- BRST charges ----------------------------------------------------

def _section_tuple(chart, rank, section):
    vals = []
    for c in section:
        if isinstance(c, (int, Fraction)):
            c = ScalarExpr.number(chart, c)
        vals.append(c)
    assert len(vals) == rank
    return tuple(vals)


def omega_section(chart, rank, section):
    "The degree (1,0) candidate  sum_A (y_A - s_A) xi^A mu."
    section = _section_tuple(chart, rank, section)
    out = GradedFunction.zero(chart, rank)
    for A in range(rank):
        c = ScalarExpr.coord(chart, chart.fiber[A]) - section[A]
        out = out + GradedFunction.ghost(chart, rank, A).scale(c)
    return Section(out)


def brst_problem(Jhat, section):
    chart, rank = Jhat.chart, Jhat.rank
    con = BrstContraction(chart, rank, _section_tuple(chart, rank, section))
    return MCProblem(
        bracket=lambda a, b: jacobi_bracket(a, b, Jhat),
        Qbar=omega_section(chart, rank, con.section),
        filtration=FiltrationSpec(section_antighost_level, -1),
        H=con.homotopy,
        P=con.proj)


def brst_charge(Jhat, section, max_iter=64):
    """Charge over a lifting with prescribed restriction to the section.
    Returns (Omega, trace); a nonzero projected residual (the section
    fails to be coisotropic) raises ObstructionError."""
    return obstruction_solve(brst_problem(Jhat, section), max_iter)


def coisotropy_residual(Jhat, section):
    """Projected self-bracket of the candidate charge; vanishes exactly
    when the image of the section is coisotropic."""
    chart, rank = Jhat.chart, Jhat.rank
    con = BrstContraction(chart, rank, _section_tuple(chart, rank, section))
    om = omega_section(chart, rank, con.section)
    return con.proj(jacobi_bracket(om, om, Jhat))


def mc_check(Om, Jhat):
    "Self-bracket test of a charge.  Returns (flag, residual)."
    residual = jacobi_bracket(Om, Om, Jhat)
    return residual.is_zero(), residual


# -- BFV assembly ----------------------------------------------------

class BfvData:
    "Lifting, charge and differential of one model, bundled."

    __slots__ = ("chart", "rank", "J", "conn", "Jhat", "lift_trace",
                 "omega", "charge_trace", "op", "con")

    def __init__(self, chart, rank, J, conn, Jhat, lift_trace, omega,
                 charge_trace):
        self.chart = chart
        self.rank = rank
        self.J = J
        self.conn = conn
        self.Jhat = Jhat
        self.lift_trace = lift_trace
        self.omega = omega
        self.charge_trace = charge_trace
        self.op = sj_bracket(Jhat, MultiDerivation.from_section(omega))
        self.con = BrstContraction(chart, rank,
                                   tuple(0 for _ in range(rank)))

    def dif(self, lam):
        return evaluate(self.op, [lam])


def bfv_assemble(J, conn, max_iter=64):
    """Lift, solve for the charge over the zero section and form the
    differential.  The zero section must be coisotropic."""
    chart, rank = J.chart, J.rank
    Jhat, lift_trace = lift_jacobi(J, conn, max_iter)
    omega, charge_trace = brst_charge(Jhat, tuple(0 for _ in range(rank)),
                                      max_iter)
    return BfvData(chart, rank, J, conn, Jhat, lift_trace, omega,
                   charge_trace)


# -- reduced side ----------------------------------------------------

def v_immersion(red_sec, chart):
    """Right inverse of the canonical projection: a reduced monomial in
    the odd generators becomes the matching word of fiber derivatives."""
    rank = red_sec.rank
    terms = {}
    for mono, c in red_sec.fun.terms.items():
        assert not mono.a, "reduced sections carry no anti-ghosts"
        word = tuple(d_letter(chart.fiber[A]) for A in mono.g)
        terms[(ONE_MONO, word, 1)] = c.with_chart(chart)
    if not terms:
        return MultiDerivation.zero(chart, rank)
    return MultiDerivation(chart, rank, terms)


def v_projection(D):
    """Canonical projection onto the reduced side: keep the words made
    of distinct fiber derivatives, rename them to odd generators, and
    restrict coefficients to the zero section."""
    chart, rank = D.chart, D.rank
    red = chart.reduced()
    fibs = {d_letter(f): A for A, f in enumerate(chart.fiber)}
    zero = {f: ScalarExpr.zero(chart) for f in chart.fiber}
    out = GradedFunction.zero(red, rank)
    for (mono, word, fr), c in D.terms.items():
        if mono != ONE_MONO or fr != 1:
            continue
        if any(ell not in fibs for ell in word):
            continue
        if len(set(word)) != len(word):
            continue
        key = GhostMonomial(tuple(fibs[ell] for ell in word), ())
        out = out + GradedFunction(red, rank,
                                   {key: c.substitute(zero).with_chart(red)})
    return Section(out)


def de_rham_differential(J):
    """Differential on the reduced side induced directly by the plain
    operator, bypassing the charge and the transfer."""
    def d(red_sec):
        return v_projection(sj_bracket(J, v_immersion(red_sec, J.chart)))
    return d


def _generator_sections(chart, rank):
    red = chart.reduced()
    mur = Section.frame(red, rank)
    out = [mur]
    for nm in red.coords:
        c = ScalarExpr.coord(red, nm)
        out.append(Section(mur.fun.scale(c)))
        if nm in red.angular:
            out.append(Section(mur.fun.scale(ScalarExpr.sin(red, nm))))
    for A in range(rank):
        out.append(Section(GradedFunction.ghost(red, rank, A)))
    return out


class ReducedData:
    "Transferred differential plus the independent route to it."

    __slots__ = ("hpl", "de_rham")

    def __init__(self, hpl, de_rham):
        self.hpl = hpl
        self.de_rham = de_rham

    def dif(self, red_sec):
        return self.hpl.dif(red_sec)


def reduced_differential(bfv):
    """Transfer the differential to the reduced side and cross-check it
    on generators against the direct route."""
    con = bfv.con
    d0 = con.dif()

    def delta(lam):
        return bfv.dif(lam) - evaluate(d0, [lam])

    hpl = hpl_deform(con.imm, con.proj, con.homotopy, delta)
    dR = de_rham_differential(bfv.J)
    for g in _generator_sections(bfv.chart, bfv.rank):
        if hpl.dif(g) != dR(g):
            raise ValueError("transferred differential disagrees with "
                             "the direct one on %s" % g)
    return ReducedData(hpl, dR)


def derived_brackets(Jhat, k_max):
    """The multibracket family on the reduced side: nested brackets of
    the lifting against immersed arguments, projected back.  Returns a
    dict mapping each arity to a callable."""
    chart = Jhat.chart

    def make(k):
        def m_k(*args):
            assert len(args) == k
            cur = Jhat
            for g in args:
                cur = sj_bracket(cur, v_immersion(g, chart))
            return v_projection(cur)
        return m_k

    return {k: make(k) for k in range(1, k_max + 1)}
