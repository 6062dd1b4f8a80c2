"""Command line front end.

Loads a scenario (a chart, a bracket pair, a connection and a section,
all in a small JSON format with prefix-notation expressions), runs one
of the engine commands against it and prints a deterministic report.

Exit codes: 0 on success, 2 when an obstruction or a nonzero residual
blocks the requested construction, 1 on usage or scenario errors.
"""

import argparse
import json
import sys
from fractions import Fraction

from .scalar import Chart, ScalarExpr
from .ghost import GradedFunction, Section
from .multideriv import (M, d_letter, sort_word, MultiDerivation, evaluate,
                         sj_bracket, build_G, is_jacobi, jacobi_from_pair,
                         NotJacobiError)
from .contraction import ConnectionSpec, BrstContraction, proj_p
from .solver import (ObstructionError, lift_jacobi, lifting_problem,
                     brst_problem, brst_charge, omega_section,
                     coisotropy_residual, mc_check, bfv_assemble,
                     reduced_differential, derived_brackets, v_immersion,
                     v_projection, gauge_intertwine, exp_ad)
from .models import t5_contact

SCHEMA = "bfv-scenario/1"
COMMANDS = ("lift", "brst", "bfv", "residual", "reduce", "linf",
            "intertwine", "check")


class ScenarioError(ValueError):
    "Malformed scenario file or expression."


# -- expression syntax -----------------------------------------------

def _tokenize(src):
    out = src.replace("(", " ( ").replace(")", " ) ").split()
    if not out:
        raise ScenarioError("empty expression")
    return out


def _read(tokens, pos):
    tok = tokens[pos]
    if tok == "(":
        items = []
        pos += 1
        while pos < len(tokens) and tokens[pos] != ")":
            node, pos = _read(tokens, pos)
            items.append(node)
        if pos >= len(tokens):
            raise ScenarioError("unbalanced parentheses")
        return items, pos + 1
    if tok == ")":
        raise ScenarioError("unbalanced parentheses")
    return tok, pos + 1


def _number(tok):
    try:
        if "/" in tok:
            num, den = tok.split("/", 1)
            return Fraction(int(num), int(den))
        return Fraction(int(tok))
    except (ValueError, ZeroDivisionError):
        return None


def _build(node, chart):
    if isinstance(node, str):
        q = _number(node)
        if q is not None:
            return ScalarExpr.number(chart, q)
        if node in chart._pos:
            return ScalarExpr.coord(chart, node)
        if node in chart.funcs:
            return ScalarExpr.func(chart, node)
        raise ScenarioError("unknown symbol %r" % node)
    if not node or isinstance(node[0], list):
        raise ScenarioError("operator expected in %r" % (node,))
    op, args = node[0], node[1:]
    if op in ("sin", "cos"):
        if len(args) != 1 or not isinstance(args[0], str):
            raise ScenarioError("%s expects one coordinate name" % op)
        if args[0] not in chart.angular:
            raise ScenarioError("%s of a non-angular coordinate %r"
                                % (op, args[0]))
        return getattr(ScalarExpr, op)(chart, args[0])
    if op == "neg":
        if len(args) != 1:
            raise ScenarioError("neg expects one argument")
        return -_build(args[0], chart)
    if op == "+":
        out = ScalarExpr.zero(chart)
        for a in args:
            out = out + _build(a, chart)
        return out
    if op == "*":
        out = ScalarExpr.one(chart)
        for a in args:
            out = out * _build(a, chart)
        return out
    if op == "^":
        if len(args) != 2 or not isinstance(args[1], str):
            raise ScenarioError("^ expects a base and an integer")
        n = _number(args[1])
        if n is None or n.denominator != 1 or n < 0:
            raise ScenarioError("^ exponent must be a nonnegative integer")
        base = _build(args[0], chart)
        out = ScalarExpr.one(chart)
        for _ in range(int(n)):
            out = out * base
        return out
    raise ScenarioError("unknown operator %r" % op)


def parse_expr(src, chart):
    "Prefix syntax: symbols, rationals, (+ ...), (* ...), (^ x n), (neg x), (sin c), (cos c)."
    if isinstance(src, (int, float)):
        src = str(int(src))
    tokens = _tokenize(src)
    node, pos = _read(tokens, 0)
    if pos != len(tokens):
        raise ScenarioError("trailing tokens in %r" % src)
    return _build(node, chart)


# -- scenarios -------------------------------------------------------

class ScenarioSpec:
    __slots__ = ("name", "chart", "rank", "J", "conn", "conn2", "section",
                 "kmax", "max_iter")

    def __init__(self, name, chart, rank, J, conn, conn2, section,
                 kmax=3, max_iter=64):
        self.name = name
        self.chart = chart
        self.rank = rank
        self.J = J
        self.conn = conn
        self.conn2 = conn2
        self.section = section
        self.kmax = kmax
        self.max_iter = max_iter


def _builtin_t5():
    model = t5_contact()
    conn2 = ConnectionSpec(model.chart, model.rank,
                           vert={(0, 1): ScalarExpr.sin(model.chart, "phi3")})
    return ScenarioSpec(model.name, model.chart, model.rank, model.J,
                        model.flat, conn2, model.section)


def _parse_chart(obj):
    if not isinstance(obj, dict):
        raise ScenarioError("chart must be an object")
    stray = sorted(set(obj) - {"coords", "angular", "fiber", "funcs"})
    if stray:
        raise ScenarioError("unknown chart keys: %s" % ", ".join(stray))
    try:
        return Chart(list(obj["coords"]),
                     angular=list(obj.get("angular", [])),
                     fiber=list(obj["fiber"]),
                     funcs={k: tuple(v) for k, v in obj["funcs"].items()}
                     if obj.get("funcs") else None)
    except (KeyError, AssertionError, TypeError) as exc:
        raise ScenarioError("bad chart: %s" % exc)


def _parse_connection(obj, chart, rank):
    if obj in (None, "flat-trivial"):
        return ConnectionSpec(chart, rank)
    if not isinstance(obj, dict):
        raise ScenarioError("connection must be \"flat-trivial\" or an object")
    stray = sorted(set(obj) - {"vert", "coef"})
    if stray:
        raise ScenarioError("unknown connection keys: %s" % ", ".join(stray))
    vert = {}
    for item in obj.get("vert", []):
        A, B, src = item
        vert[(int(A), int(B))] = parse_expr(src, chart)
    coef = {}
    for item in obj.get("coef", []):
        i, A, B, src = item
        coef[(i, int(A), int(B))] = parse_expr(src, chart)
    try:
        return ConnectionSpec(chart, rank, vert, coef)
    except AssertionError as exc:
        raise ScenarioError("bad connection: %s" % exc)


def _jacobi_from_terms(items, chart, rank):
    """Explicit coefficient form of the structure operator.  Letters
    are "m" or "d:<coord>"; words hold at most two of them."""
    out = MultiDerivation.zero(chart, rank)
    for item in items:
        word_src, src = item
        word = []
        for tok in word_src:
            if tok == "m":
                word.append(M)
            elif isinstance(tok, str) and tok.startswith("d:") \
                    and tok[2:] in chart._pos:
                word.append(d_letter(tok[2:]))
            else:
                raise ScenarioError("bad letter %r in jacobi terms" % (tok,))
        if len(word) > 2:
            raise ScenarioError("jacobi terms carry at most two letters")
        sgn, canon = sort_word(tuple(word), chart)
        if not sgn:
            continue
        out = out + MultiDerivation.single(chart, rank, canon,
                                           parse_expr(src, chart).scale(sgn))
    res = sj_bracket(out, out)
    if not res.is_zero():
        raise NotJacobiError(res)
    return out


def parse_scenario(source):
    """Builtin name or path of a JSON scenario file.  Raises
    ScenarioError on malformed input and NotJacobiError when the pair
    fails the bracket condition."""
    if source in (None, "t5-contact"):
        return _builtin_t5()
    try:
        with open(source) as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise ScenarioError("cannot read scenario: %s" % exc)
    except json.JSONDecodeError as exc:
        raise ScenarioError("scenario is not valid JSON: %s" % exc)
    if obj.get("schema") != SCHEMA:
        raise ScenarioError("unsupported schema %r (expected %r)"
                            % (obj.get("schema"), SCHEMA))
    known = {"schema", "name", "chart", "rank", "jacobi", "connection",
             "connection2", "section", "options"}
    stray = sorted(set(obj) - known)
    if stray:
        raise ScenarioError("unknown scenario keys: %s" % ", ".join(stray))
    chart = _parse_chart(obj.get("chart"))
    rank = obj.get("rank")
    if rank != len(chart.fiber):
        raise ScenarioError("rank must equal the number of fiber "
                            "coordinates (%d)" % len(chart.fiber))
    jac = obj.get("jacobi") or {}
    stray = sorted(set(jac) - {"biv", "vec", "terms"})
    if stray:
        raise ScenarioError("unknown jacobi keys: %s" % ", ".join(stray))
    if "terms" in jac:
        if "biv" in jac or "vec" in jac:
            raise ScenarioError("jacobi takes either biv/vec or terms, "
                                "not both")
        J = _jacobi_from_terms(jac["terms"], chart, rank)
    else:
        biv = {}
        for item in jac.get("biv", []):
            ci, cj, src = item
            for c in (ci, cj):
                if c not in chart._pos:
                    raise ScenarioError("unknown coordinate %r in biv" % c)
            e = parse_expr(src, chart)
            if chart.axis(ci) > chart.axis(cj):
                ci, cj, e = cj, ci, -e
            if (ci, cj) in biv:
                e = biv[(ci, cj)] + e
            biv[(ci, cj)] = e
        vec = {}
        for c, src in sorted((jac.get("vec") or {}).items()):
            if c not in chart._pos:
                raise ScenarioError("unknown coordinate %r in vec" % c)
            vec[c] = parse_expr(src, chart)
        J = jacobi_from_pair(chart, rank, biv, vec)
    conn = _parse_connection(obj.get("connection"), chart, rank)
    conn2 = None
    if obj.get("connection2") is not None:
        conn2 = _parse_connection(obj["connection2"], chart, rank)
    raw_section = obj.get("section")
    if raw_section is None:
        raw_section = [0] * rank
    if len(raw_section) != rank:
        raise ScenarioError("section needs exactly %d components" % rank)
    section = tuple(parse_expr(src, chart) for src in raw_section)
    for c in section:
        if c.max_degree(chart.fiber) != 0:
            raise ScenarioError("section components must not involve "
                                "fiber coordinates")
    opts = obj.get("options") or {}
    return ScenarioSpec(obj.get("name", source), chart, rank, J, conn,
                        conn2, section,
                        kmax=int(opts.get("kmax", 3)),
                        max_iter=int(opts.get("max_iter", 64)))


# -- reports ---------------------------------------------------------

def _red_str(sec):
    "Reduced-side sections print with the eta naming for odd generators."
    return str(sec).replace("xi^", "eta^")


def _trace_rows(trace):
    return [{"step": rec["step"], "level": rec["level"],
             "residual": str(rec["residual"]),
             "correction": str(rec["correction"])} for rec in trace]


def _generator_probes(chart, rank):
    probes = []
    mu = Section.frame(chart, rank)
    probes.append(("mu", mu))
    for nm in chart.coords:
        probes.append(("%s mu" % nm,
                       Section(mu.fun.scale(ScalarExpr.coord(chart, nm)))))
    for A in range(rank):
        probes.append(("xi^%d" % (A + 1),
                       Section(GradedFunction.ghost(chart, rank, A))))
        probes.append(("xi*_%d mu" % (A + 1),
                       Section(GradedFunction.antighost(chart, rank, A)
                               .ghost_mul(mu.fun))))
    return probes


def _reduced_probes(chart, rank):
    red = chart.reduced()
    mur = Section.frame(red, rank)
    probes = [("mu", mur)]
    for nm in red.coords:
        probes.append(("%s mu" % nm,
                       Section(mur.fun.scale(ScalarExpr.coord(red, nm)))))
    for A in range(rank):
        probes.append(("eta^%d" % (A + 1),
                       Section(GradedFunction.ghost(red, rank, A))))
    return probes


def run(command, spec, trace=False):
    """Execute one command.  Returns (exit_code, report_dict)."""
    out = {"schema": "bfv-report/1", "scenario": spec.name,
           "command": command}
    code = 0

    if command == "lift":
        Jhat, tr = lift_jacobi(spec.J, spec.conn, spec.max_iter)
        out["J"] = str(spec.J)
        out["Jhat"] = str(Jhat)
        out["corrections"] = len(tr)
        out["mc"] = sj_bracket(Jhat, Jhat).is_zero()
        if trace:
            out["trace"] = _trace_rows(tr)

    elif command == "brst":
        Jhat, _ = lift_jacobi(spec.J, spec.conn, spec.max_iter)
        try:
            om, tr = brst_charge(Jhat, spec.section, spec.max_iter)
        except ObstructionError as exc:
            out["obstruction"] = _red_str(exc.obstruction)
            out["residual"] = str(exc.residual)
            return 2, out
        out["omega"] = str(om)
        out["corrections"] = len(tr)
        out["mc"] = mc_check(om, Jhat)[0]
        if trace:
            out["trace"] = _trace_rows(tr)

    elif command == "bfv":
        bfv = bfv_assemble(spec.J, spec.conn, spec.max_iter)
        out["Jhat"] = str(bfv.Jhat)
        out["omega"] = str(bfv.omega)
        out["d_bfv"] = str(bfv.op)
        out["generators"] = [[nm, str(bfv.dif(sec))]
                             for nm, sec in
                             _generator_probes(spec.chart, spec.rank)]
        if trace:
            out["trace"] = _trace_rows(bfv.lift_trace + bfv.charge_trace)

    elif command == "residual":
        Jhat, _ = lift_jacobi(spec.J, spec.conn, spec.max_iter)
        res = coisotropy_residual(Jhat, spec.section)
        out["residual"] = _red_str(res)
        out["coisotropic"] = res.is_zero()
        if not res.is_zero():
            code = 2

    elif command == "reduce":
        bfv = bfv_assemble(spec.J, spec.conn, spec.max_iter)
        red = reduced_differential(bfv)
        out["generators"] = [[nm, _red_str(red.dif(sec))]
                             for nm, sec in
                             _reduced_probes(spec.chart, spec.rank)]

    elif command == "linf":
        Jhat, _ = lift_jacobi(spec.J, spec.conn, spec.max_iter)
        mk = derived_brackets(Jhat, max(spec.kmax, 1))
        probes = _reduced_probes(spec.chart, spec.rank)
        out["m1"] = [[nm, _red_str(mk[1](sec))] for nm, sec in probes]
        if spec.kmax >= 2:
            out["m2"] = [[na, nb, _red_str(mk[2](sa, sb))]
                         for i, (na, sa) in enumerate(probes)
                         for nb, sb in probes[i:]]
        if spec.kmax >= 3:
            scalars = probes[:3]
            out["m3"] = [[scalars[0][0], scalars[1][0], scalars[2][0],
                          _red_str(mk[3](scalars[0][1], scalars[1][1],
                                         scalars[2][1]))]]

    elif command == "intertwine":
        if spec.conn2 is None:
            raise ScenarioError("intertwine needs a second connection "
                                "(connection2)")
        Q0, _ = lift_jacobi(spec.J, spec.conn, spec.max_iter)
        Q1, _ = lift_jacobi(spec.J, spec.conn2, spec.max_iter)
        prob = lifting_problem(spec.J, spec.conn)
        phi = gauge_intertwine(Q0, Q1, prob, spec.max_iter)
        out["lift_generators"] = [str(R) for R in phi.generators]
        out["lift_intertwined"] = phi(Q0) == Q1
        # a second charge, displaced inside the gauge group, and back
        om0, _ = brst_charge(Q0, spec.section, spec.max_iter)
        bprob = brst_problem(Q0, spec.section)
        gen = GradedFunction.one(spec.chart, spec.rank)
        for A in range(spec.rank):
            gen = gen.ghost_mul(GradedFunction.ghost(spec.chart,
                                                     spec.rank, A))
        for A in range(spec.rank):
            gen = gen.ghost_mul(GradedFunction.antighost(spec.chart,
                                                         spec.rank, A))
        ang = [c for c in spec.chart.coords if c in spec.chart.angular]
        if ang:
            gen = gen.scale(ScalarExpr.sin(spec.chart, ang[0]))
        om1 = exp_ad(Section(gen), om0, bprob.bracket)
        psi = gauge_intertwine(om0, om1, bprob, spec.max_iter)
        out["charge_generators"] = [str(R) for R in psi.generators]
        out["charge_intertwined"] = psi(om0) == om1

    elif command == "check":
        rows = []

        def row(name, flag):
            rows.append([name, "PASS" if flag else "FAIL"])

        row("jacobi", is_jacobi(spec.J))
        Jhat, _ = lift_jacobi(spec.J, spec.conn, spec.max_iter)
        row("lift-mc", sj_bracket(Jhat, Jhat).is_zero())
        row("lift-plain-part", proj_p(Jhat) == spec.J)
        try:
            om, _ = brst_charge(Jhat, spec.section, spec.max_iter)
            row("charge-mc", mc_check(om, Jhat)[0])
            row("charge-leading",
                om.pr_bidegree(1, 0) == omega_section(spec.chart, spec.rank,
                                                      spec.section))
        except ObstructionError as exc:
            rows.append(["charge-mc", "FAIL (obstruction %s)"
                         % _red_str(exc.obstruction)])
        bfv = bfv_assemble(spec.J, spec.conn, spec.max_iter)
        row("dif-squared", all(
            bfv.dif(bfv.dif(sec)).is_zero()
            for _, sec in _generator_probes(spec.chart, spec.rank)))
        try:
            reduced_differential(bfv)
            row("reduced-match", True)
        except ValueError:
            row("reduced-match", False)
        row("v-section-pair", all(
            v_projection(v_immersion(sec, spec.chart)) == sec
            for _, sec in _reduced_probes(spec.chart, spec.rank)))
        mk = derived_brackets(Jhat, 2)
        probes = _reduced_probes(spec.chart, spec.rank)
        sym = True
        for _, sa in probes[:3]:
            for _, sb in probes[:3]:
                if mk[2](sa, sb) != mk[2](sb, sa).scale(-1):
                    sym = False
        row("m2-antisymmetry-degree0", sym)
        out["checks"] = rows
        if any(not r[1].startswith("PASS") for r in rows):
            code = 2

    else:
        raise ScenarioError("unknown command %r" % command)

    return code, out


def _format_text(out):
    lines = []
    for key, val in out.items():
        if key == "schema":
            continue
        if isinstance(val, list):
            lines.append("%s:" % key)
            for item in val:
                if isinstance(item, dict):
                    lines.append("  step %d (level %s):" %
                                 (item["step"], item["level"]))
                    lines.append("    residual   %s" % item["residual"])
                    lines.append("    correction %s" % item["correction"])
                elif isinstance(item, list):
                    lines.append("  %s = %s" % (" , ".join(item[:-1]),
                                                item[-1]))
                else:
                    lines.append("  %s" % item)
        else:
            lines.append("%s: %s" % (key, val))
    return "\n".join(lines) + "\n"


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="jacobi-bfv",
        description="exact BFV/BRST constructions in a local model")
    parser.add_argument("--scenario", default="t5-contact",
                        help="builtin name or path of a JSON scenario")
    parser.add_argument("--command", default="check", choices=COMMANDS)
    parser.add_argument("--kmax", type=int, default=None)
    parser.add_argument("--max-iter", type=int, default=None)
    parser.add_argument("--trace", action="store_true")
    parser.add_argument("--format", default="text", choices=("text", "json"))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1

    try:
        spec = parse_scenario(args.scenario)
        if args.kmax is not None:
            spec.kmax = args.kmax
        if args.max_iter is not None:
            spec.max_iter = args.max_iter
        code, out = run(args.command, spec, trace=args.trace)
    except ScenarioError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1
    except NotJacobiError as exc:
        print("error: %s" % exc, file=sys.stderr)
        print("residual: %s" % exc.residual, file=sys.stderr)
        return 2
    except (ObstructionError, ValueError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2

    if args.format == "json":
        print(json.dumps(out, indent=2, sort_keys=True))
    else:
        sys.stdout.write(_format_text(out))
    return code


if __name__ == "__main__":
    sys.exit(main())
