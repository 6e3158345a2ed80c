"""``novikov-cone`` command line.

Exit codes: 0 success, 1 domain error (well-formed input the mathematics
rejects), 2 malformed input or usage error.  Reports always embed their
inputs, so a saved report is enough to rerun a computation.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import arith, documents as docs
from .arith import Poly
from .complexes import (Q, TruncatedPolynomialRing, betti, compose_triangle,
                        homology_dimensions, is_epimorphic, is_homology_equivalence,
                        lift_through, make_epimorphic, same_on_homology, validate)
from .cones import (FormFamily, TargetDirection, admissibility_witness, forms_from_dual,
                    frame_checks, perturb, regular_family)
from .errors import DocumentError, NovikovError
from .incidence import (DescentData, appendix_example, closed_form_check, convergence_radius,
                        detect_rational, growth_rate, incidence_series, is_symplectic,
                        lucas_sequence, monodromy_det)
from .pitcher import (homology_modules, inequality_report, novikov_betti, pitcher_numbers,
                      relative_betti)
from .series import j_n_project, mul_truncated, reduce_mod_ideal, twisted_mul_truncated

SIN2_TABLE = """\
angular tolerance as sin^2(eps), rational and slightly below the true value:
  eps = 0.1 deg  ->  1/328282
  eps = 1 deg    ->  1/3284
  eps = 5 deg    ->  1/132
  eps = 10 deg   ->  1/34
  eps = 30 deg   ->  1/4   (exact)
  eps = 45 deg   ->  1/2   (exact)
"""


# ---------------------------------------------------------------------------
# argument parsing helpers (all raise DocumentError on bad input)

def _vector(text: str, conv=docs.rational) -> list:
    if text is None or not text.strip():
        raise DocumentError("empty vector")
    return [conv(x.strip()) for x in text.split(",")]


def _int_vector(text: str) -> list[int]:
    return _vector(text, docs.integer)


def _rows(text: str) -> list[list[int]]:
    """``"1,0;0,1"`` -> ``[[1, 0], [0, 1]]``."""
    return [_int_vector(r) for r in text.split(";")]


def _frac(text: str) -> Fraction:
    return docs.rational(text)


# ---------------------------------------------------------------------------
# subcommands; each returns a report payload

def cmd_regular_family(args) -> dict:
    v = _vector(args.v)
    tol = _frac(args.tol_sin2)
    target_v = perturb(v) if args.perturb else v
    target = TargetDirection(target_v, tol)
    basis, trace = regular_family(target)
    forms = forms_from_dual(basis)
    return {
        "command": "regular-family",
        "input": {"v": v, "tol_sin2": tol, "perturb": args.perturb},
        "target": list(target.v),
        "basis": [list(u) for u in basis.vectors],
        "forms": [list(f) for f in forms.forms],
        "trace": [{"abs_det": s.abs_det, "point": None if s.point is None else list(s.point),
                   "replaced": s.replaced} for s in trace.steps],
        "trace_strictly_decreasing": trace.is_strictly_decreasing(),
        "checks": frame_checks(basis, target),
    }


def cmd_admissible(args) -> dict:
    if args.forms is not None:
        rows = _rows(args.forms)
    elif args.doc is not None:
        rows = docs.int_matrix(docs.field(docs.read_document(args.doc, "form-family"), "forms"))
    else:
        raise DocumentError("give --forms or --doc")
    g = FormFamily(rows)
    w = admissibility_witness(g)
    return {"command": "admissible", "input": {"forms": rows},
            "admissible": w is not None, "witness": None if w is None else list(w)}


def cmd_ring(args) -> dict:
    a = docs.series(docs.read_document(args.a, "series"))
    out = {"command": "ring", "op": args.op, "input": {"a": docs.dump_series(a)}}
    if args.op in ("mul", "twisted-mul"):
        if args.b is None:
            raise DocumentError(f"{args.op} needs a second series")
        b = docs.series(docs.read_document(args.b, "series"))
        out["input"]["b"] = docs.dump_series(b)
        if args.op == "mul":
            res = mul_truncated(a, b)
        else:
            if args.twist is None:
                raise DocumentError("twisted-mul needs --twist")
            tw_payload = docs.read_document(args.twist, "twist")
            tw = docs.twist(tw_payload)
            out["input"]["twist"] = tw_payload
            res = twisted_mul_truncated(a, b, tw)
        out["result"] = docs.dump_series(res)
        return out
    # jn-project
    if args.var is None:
        raise DocumentError("jn-project needs --var")
    if args.order is not None:
        a = reduce_mod_ideal(a, args.order)
    proj = j_n_project(a, args.var - 1)
    out["input"]["var"] = args.var
    out["input"]["order"] = a.n
    out["result"] = {"var": args.var, "n": proj.n,
                     "coefficients": {str(p): [[list(rest), docs.dump(c)]
                                               for rest, c in sorted(terms.items())]
                                      for p, terms in sorted(proj.coefficients.items())}}
    return out


def _pitcher_payload(c, morse) -> dict:
    decomps = homology_modules(c)
    numbers = pitcher_numbers(decomps)
    nb = novikov_betti(c, decomps)
    beta, checks = relative_betti(c, numbers)
    out = {
        "modules": [{"free_rank": m.a, "t_torsion": list(m.t_torsion),
                     "coprime_torsion": [docs.dump(g) for g in m.coprime_torsion]}
                    for m in decomps],
        "R": list(numbers.R), "S": list(numbers.S), "Q": list(numbers.Q),
        "novikov_betti": nb,
        "relative_betti": beta,
        "relative_betti_identity": checks,
    }
    if morse is not None:
        rep = inequality_report(morse, c)
        out["morse"] = list(rep.M)
        out["verdicts"] = docs.dump(rep.verdicts)
        out["all_hold"] = rep.holds()
        out["failures"] = rep.failures()
    return out


def cmd_pitcher(args) -> dict:
    payload = docs.read_document(args.complex, "complex")
    c = docs.complex_(payload)
    morse = _int_vector(args.morse) if args.morse else None
    out = {"command": "pitcher", "input": {"complex": docs.dump_complex(c), "morse": morse}}
    out.update(_pitcher_payload(c, morse))
    return out


def cmd_complex(args) -> dict:
    out = {"command": "complex", "action": args.action}
    if args.action in ("validate", "betti"):
        if len(args.docs) != 1:
            raise DocumentError(f"{args.action} takes one complex document")
        c = docs.complex_(docs.read_document(args.docs[0], "complex"), check=False)
        out["input"] = {"complex": docs.dump_complex(c)}
        out["valid"] = validate(c)
        if args.action == "betti" and out["valid"]:
            if c.ring == Q:
                out["betti"] = betti(c)
            elif isinstance(c.ring, TruncatedPolynomialRing):
                out["homology_dimensions"] = homology_dimensions(c)
            else:
                out.update(_pitcher_payload(c, None))
        return out
    need = {"lift": 2, "make-epi": 1, "triangle": 2}[args.action]
    if len(args.docs) != need:
        raise DocumentError(f"{args.action} takes {need} chain-map documents")
    maps = [docs.chain_map(docs.read_document(p, "chain-map")) for p in args.docs]
    out["input"] = {"maps": [docs.dump_chain_map(f) for f in maps]}
    if args.action == "lift":
        alpha, gamma = maps
        xi = lift_through(alpha, gamma)
        out["xi"] = docs.dump_chain_map(xi)
        out["checks"] = {"gamma_xi_equals_alpha": gamma.compose(xi) == alpha,
                         "chain_map": xi.is_chain_map()}
    elif args.action == "make-epi":
        (phi,) = maps
        epi = make_epimorphic(phi)
        out["summands"] = [{"degree": s.degree, "rank": s.rank} for s in epi.summands]
        out["phi_prime"] = docs.dump_chain_map(epi.phi_prime)
        out["checks"] = {"surjective": is_epimorphic(epi.phi_prime),
                         "chain_map": epi.phi_prime.is_chain_map()}
    else:
        alpha, beta = maps
        tri = compose_triangle(alpha, beta)
        out["gamma"] = docs.dump_chain_map(tri.gamma)
        out["homotopy"] = [docs.dump(h) for h in tri.homotopy]
        out["checks"] = {"homotopy_identity": tri.check_homotopy(alpha, beta),
                         "homology_commutes": same_on_homology(beta.compose(tri.gamma), alpha),
                         "gamma_homology_equivalence": is_homology_equivalence(tri.gamma)}
    return out


def _descent_from_args(args) -> tuple[DescentData, dict]:
    if args.appendix_q is not None:
        _, d = appendix_example(args.appendix_q, args.n0)
        if args.tau is not None or args.pairing is not None:
            d = DescentData.build(d.M, _int_vector(args.tau) if args.tau else d.tau,
                                  _int_vector(args.pairing) if args.pairing else d.pairing,
                                  args.n0)
        return d, {"appendix_q": args.appendix_q}
    if args.matrix is None:
        raise DocumentError("give --matrix FILE or --appendix-q Q")
    text = sys.stdin.read() if args.matrix == "-" else _read(args.matrix)
    doc = docs.loads(text)
    if isinstance(doc, dict) and doc.get("schema") == "descent":
        p = docs.unwrap(doc, "descent")
        m = docs.int_matrix(docs.field(p, "M"))
        tau = [docs.integer(x) for x in docs.field(p, "tau", [])]
        pairing = [docs.integer(x) for x in docs.field(p, "pairing", [])]
        n0 = docs.integer(docs.field(p, "n0", 0))
    else:
        m = docs.int_matrix(docs.unwrap(doc, "matrix"))
        tau = pairing = None
        n0 = 0
    if args.tau is not None:
        tau = _int_vector(args.tau)
    if args.pairing is not None:
        pairing = _int_vector(args.pairing)
    if args.n0:
        n0 = args.n0
    if tau is None or pairing is None:
        raise DocumentError("--tau and --pairing are required with a bare matrix")
    return DescentData.build(m, tau, pairing, n0), {"matrix": m}


def _read(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as e:
        raise DocumentError(f"cannot read {path}: {e}") from None


def _radius_payload(r, form) -> dict:
    if r.infinite:
        return {"infinite": True}
    out = {"infinite": False, "lower": r.lower, "upper": r.upper,
           "width": r.width, "approx": f"{float((r.lower + r.upper) / 2):.15g}"}
    if r.exact is not None:
        out["exact"] = str(r.exact)
    return out


def cmd_incidence(args) -> dict:
    if args.terms < 0:
        raise DocumentError("--terms must be nonnegative")
    d, source = _descent_from_args(args)
    s = incidence_series(d, max(args.terms - 1, 0)) if args.terms else None
    coeffs = list(s.coefficients) if s else []
    out = {"command": "incidence",
           "input": {**source, "M": [list(r) for r in d.M], "tau": list(d.tau),
                     "pairing": list(d.pairing), "n0": d.n0, "terms": args.terms},
           "coefficients": coeffs}
    checks = {}
    form = None
    if args.detect_rational or args.radius:
        form = detect_rational(coeffs) if len(coeffs) >= 4 else None
        out["rational_form"] = None if form is None else {
            "P": docs.dump(form.P), "Q": docs.dump(form.Q), "text": str(form)}
    if args.radius:
        out["radius"] = None if form is None else _radius_payload(convergence_radius(form), form)
    if args.appendix_q is not None:
        q = args.appendix_q
        monodromy, _ = appendix_example(q)
        checks["symplectic"] = is_symplectic(monodromy)
        checks["det_is_one"] = monodromy_det(q) == 1
        if args.terms >= 1 and d.tau == (0, 1, 0, -2) and d.pairing == (1, 0, 0, 0):
            want = [-4 * x for x in lucas_sequence(q, args.terms - 1)]
            checks["closed_form"] = coeffs[1:] == want and closed_form_check(q, max(args.terms - 2, 0))
        if form is not None:
            checks["denominator_is_1_minus_qt_plus_t2"] = form.Q == Poly([1, -q, 1])
        if args.radius and form is not None and form.Q.degree == 2:
            r = convergence_radius(form)
            a = growth_rate(q)
            checks["radius_times_growth_rate_is_one"] = r.exact * a == 1
            naive = Fraction(1, q)
            out["naive_radius"] = {"value": naive, "equals_exact": r.exact == naive,
                                   "exact_minus_naive_approx":
                                       f"{float(r.exact) - float(naive):.6g}"}
    out["checks"] = checks
    return out


# ---------------------------------------------------------------------------
# text rendering

def _text_lines(x, indent=0):
    pad = "  " * indent
    if isinstance(x, dict):
        for k, v in x.items():
            if isinstance(v, (dict, list)) and v and not _is_flat(v):
                yield f"{pad}{k}:"
                yield from _text_lines(v, indent + 1)
            else:
                yield f"{pad}{k}: {_flat(v)}"
    elif isinstance(x, list):
        for i, v in enumerate(x):
            if isinstance(v, (dict, list)) and not _is_flat(v):
                yield f"{pad}[{i}]"
                yield from _text_lines(v, indent + 1)
            else:
                yield f"{pad}[{i}] {_flat(v)}"


def _is_flat(v) -> bool:
    if isinstance(v, dict):
        return False
    return all(not isinstance(x, (list, dict)) for x in v)


def _flat(v) -> str:
    if isinstance(v, list):
        return "(" + ", ".join(_flat(x) for x in v) + ")"
    if v is None:
        return "-"
    return str(v).lower() if isinstance(v, bool) else str(v)


def _monomial(idx) -> str:
    parts = [f"t{i + 1}" + (f"^{e}" if e > 1 else "") for i, e in enumerate(idx) if e]
    return "*".join(parts) or "1"


def _pitcher_table(rep) -> list[str]:
    lines = ["  k |  M  beta   R   S   Q | alt(M) alt(beta) alt(Q)"]
    M, beta = rep.get("morse"), rep["relative_betti"]
    n = max(len(M or []), len(beta))
    pad = lambda s: list(s) + [0] * (n - len(s))
    M_, b_, R_, S_, Q_ = (pad(M or []), pad(beta), pad(rep["R"]), pad(rep["S"]), pad(rep["Q"]))
    alt = lambda s, k: sum((-1) ** (k - j) * s[j] for j in range(k + 1))
    for k in range(n):
        m = M_[k] if M is not None else "-"
        am = alt(M_, k) if M is not None else "-"
        lines.append(f"{k:3d} | {m!s:>2} {b_[k]:5d} {R_[k]:3d} {S_[k]:3d} {Q_[k]:3d} |"
                     f" {am!s:>6} {alt(b_, k):9d} {alt(Q_, k):6d}")
    return lines


def render_text(report: dict) -> str:
    cmd = report.get("command")
    lines = []
    if cmd == "ring" and "result" in report and "terms" in report["result"]:
        terms = report["result"]["terms"]
        body = " + ".join(f"({c})*{_monomial(i)}" for i, c in terms) or "0"
        lines.append(f"result mod order {report['result']['n']}: {body}")
    if cmd == "pitcher" or (cmd == "complex" and "R" in report):
        lines += _pitcher_table(report)
    if cmd == "incidence":
        co = report["coefficients"]
        lines.append("N(t) = " + (" + ".join(f"({c})*t^{i}" for i, c in enumerate(co) if c) or "0"))
    lines += list(_text_lines(report))
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# entry point

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="novikov-cone",
                                 description="Exact computations for conical Novikov homology.")
    ap.add_argument("--format", choices=("json", "text"), default="json")
    # also accepted after the subcommand name
    fmt = argparse.ArgumentParser(add_help=False)
    fmt.add_argument("--format", choices=("json", "text"), default=argparse.SUPPRESS)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("regular-family", parents=[fmt], help="unimodular frame around a rational direction",
                       epilog=SIN2_TABLE, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--v", required=True, help="comma-separated rationals, e.g. 610/1,987/1")
    p.add_argument("--tol-sin2", required=True, help="rational bound on sin^2 of the angle")
    p.add_argument("--perturb", action="store_true",
                   help="add a fixed tiny rational jitter to break lattice degeneracies")
    p.set_defaults(func=cmd_regular_family)

    p = sub.add_parser("admissible", parents=[fmt], help="is the cone of a family of forms solid?")
    p.add_argument("--forms", help="rows separated by ';', entries by ','")
    p.add_argument("--doc", help="form-family document")
    p.set_defaults(func=cmd_admissible)

    p = sub.add_parser("ring", parents=[fmt], help="truncated series arithmetic")
    p.add_argument("op", choices=("mul", "twisted-mul", "jn-project"))
    p.add_argument("a", help="series document ('-' for stdin)")
    p.add_argument("b", nargs="?", help="second series document")
    p.add_argument("--twist", help="twist document for twisted-mul")
    p.add_argument("--var", type=int, help="variable index (1-based) for jn-project")
    p.add_argument("--order", type=int, help="re-truncate to this order before projecting")
    p.set_defaults(func=cmd_ring)

    p = sub.add_parser("pitcher", parents=[fmt], help="Pitcher numbers and inequality report")
    p.add_argument("complex", help="complex document over Q[t]")
    p.add_argument("--morse", help="comma-separated Morse counts M_0,M_1,...")
    p.set_defaults(func=cmd_pitcher)

    p = sub.add_parser("complex", parents=[fmt], help="chain complex operations")
    p.add_argument("action", choices=("validate", "betti", "lift", "make-epi", "triangle"))
    p.add_argument("docs", nargs="+", help="complex or chain-map documents")
    p.set_defaults(func=cmd_complex)

    p = sub.add_parser("incidence", parents=[fmt], help="incidence-coefficient series")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--matrix", help="matrix or descent document")
    src.add_argument("--appendix-q", type=int, help="use the explicit example family")
    p.add_argument("--tau", help="comma-separated integer vector")
    p.add_argument("--pairing", help="comma-separated integer functional")
    p.add_argument("--n0", type=int, default=0, help="degree-zero coefficient (default 0)")
    p.add_argument("--terms", type=int, default=8, help="number of coefficients n_0..n_{K-1}")
    p.add_argument("--detect-rational", action="store_true")
    p.add_argument("--radius", action="store_true")
    p.set_defaults(func=cmd_incidence)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        arith.set_bit_limit(arith.bit_limit_from_env())
    except ValueError:
        print("error: NOVIKOV_CONE_MAX_BITS must be an integer", file=sys.stderr)
        return 2
    try:
        report = args.func(args)
    except DocumentError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (NovikovError, ValueError, ZeroDivisionError) as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 1
    finally:
        arith.set_bit_limit(None)
    payload = docs.dump(report)
    if args.format == "json":
        print(json.dumps(docs.wrap("report", payload), indent=2))
    else:
        print(render_text(payload))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
