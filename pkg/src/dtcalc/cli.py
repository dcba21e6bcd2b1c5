"""dtcalc command-line driver. Every report is canonical JSON on stdout.

Exit codes: 0 success, 2 domain error, 1 usage, parse or schema error.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import linalg
from .dcritical import (
    Transition,
    chart_lagrangians,
    clean_intersection_data,
    cocycle_check,
    embedding_quadform,
    maslov_consistency,
    quadratic_loop,
)
from .errors import DtcalcError, ParseError, SchemaError
from .monodromy import (
    MonodromyData,
    conjugate,
    eigen_decompose,
    eigenvalue_text,
    lattice_reduce,
    reduce_to_g,
    rh_inverse,
)
from .parser import parse_poly
from .poly import direct_sum
from .scalar import format_rational, parse_rational, parse_scalar
from .symplectic import (
    LagrangianSubspace,
    SymplecticSpace,
    backtrack_deletion_check,
    chain_composition_check,
    chain_map,
    maslov_form,
    standard_space,
)
from .torsor import QuadForm, TorsorElement
from .vanishing import (
    OrderParam,
    milnor_algebra,
    pv_data,
    qh_weights,
    spectrum,
    stabilize,
    sum_of_squares,
    thom_sebastiani,
    twisted_dr_operator,
    vanishing_monodromy,
)

SCHEMA = "dtcalc/1"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# --- input helpers --------------------------------------------------------------


def _read_text(arg: str, stdin) -> str:
    return stdin.read() if arg == "-" else arg


def _poly(text: str):
    return parse_poly(text.strip())


def read_data_file(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc.msg} (line {exc.lineno})") from None


def _matrix(obj, pointer, rows=None, cols=None):
    if not isinstance(obj, list) or not all(isinstance(r, list) for r in obj):
        raise SchemaError("expected a list of rows", pointer)
    out = []
    for i, row in enumerate(obj):
        new = []
        for j, x in enumerate(row):
            if isinstance(x, bool) or not isinstance(x, (str, int)):
                raise SchemaError("matrix entries must be scalar strings", f"{pointer}/{i}/{j}")
            try:
                new.append(parse_scalar(str(x)))
            except ParseError as exc:
                raise SchemaError(str(exc), f"{pointer}/{i}/{j}") from None
        out.append(new)
    if rows is not None and len(out) != rows:
        raise SchemaError(f"expected {rows} rows, got {len(out)}", pointer)
    width = cols if cols is not None else (len(out[0]) if out else 0)
    for i, row in enumerate(out):
        if len(row) != width:
            raise SchemaError(f"expected {width} columns, got {len(row)}", f"{pointer}/{i}")
    return out


def read_space(obj, pointer=""):
    if isinstance(obj, dict) and "standard" in obj:
        n = obj["standard"]
        if not isinstance(n, int) or n < 1:
            raise SchemaError("'standard' must be a positive integer", pointer + "/standard")
        return standard_space(n)
    if not isinstance(obj, dict) or "form" not in obj:
        raise SchemaError("expected {'form': matrix} or {'standard': n}", pointer)
    form = _matrix(obj["form"], pointer + "/form")
    n = len(form)
    if n == 0 or n % 2:
        raise SchemaError("form must be a nonempty matrix of even size", pointer + "/form")
    for i in range(n):
        if len(form[i]) != n:
            raise SchemaError("form must be square", f"{pointer}/form/{i}")
        for j in range(i, n):
            if form[i][j] != -form[j][i]:
                raise SchemaError(f"form is not antisymmetric: entry ({i}, {j}) vs ({j}, {i})", f"{pointer}/form/{i}/{j}")
    return SymplecticSpace(form)


def read_lagrangians(obj, space, pointer=""):
    items = obj.get("chain") if isinstance(obj, dict) else obj
    if not isinstance(items, list) or not items:
        raise SchemaError("expected a nonempty list of Lagrangians", pointer + "/chain")
    out = []
    for k, item in enumerate(items):
        here = f"{pointer}/chain/{k}"
        name = f"L{k + 1}"
        if isinstance(item, dict):
            name = str(item.get("name", name))
            item = item.get("basis")
            here += "/basis"
        basis = _matrix(item, here, space.half, space.dim)
        out.append(LagrangianSubspace(space, basis, name))
    return out


def _mat_json(M):
    return [[str(x) for x in row] for row in M]


def _fr(x):
    return format_rational(Fraction(x))


# --- subcommands -------------------------------------------------------------------


def cmd_milnor(args, ctx):
    f = _poly(_read_text(args.poly, ctx["stdin"]))
    ctx["inputs"]["poly"] = f.render()
    alg = milnor_algebra(f, args.degree_bound)
    basis = [_mono(f.variables, e) for e in alg.monomial_basis]
    return {"variables": list(f.variables), "mu": alg.mu, "basis": basis, "truncation_degree": alg.truncation}


def _mono(variables, e):
    parts = [v if k == 1 else f"{v}^{k}" for v, k in zip(variables, e) if k]
    return "*".join(parts) or "1"


def cmd_spectrum(args, ctx):
    f = _poly(_read_text(args.poly, ctx["stdin"]))
    ctx["inputs"]["poly"] = f.render()
    lam = Fraction(str(parse_rational(args.lam)))
    ctx["inputs"]["lambda"] = _fr(lam)
    sp = spectrum(f)
    D = twisted_dr_operator(f, lam)
    shift = Fraction(1, 2) - lam
    diag = sorted(Fraction(str(D[k][k].real_value())) for k in range(len(D)))
    off_diagonal = any(D[a][b] for a in range(len(D)) for b in range(len(D)) if a != b)
    return {
        "weights": [_fr(w) for w in qh_weights(f)],
        "mu": sp.mu,
        "spectrum": sp.to_json(),
        "symmetric": sp.is_symmetric(),
        "d_operator_diagonal": [_fr(x) for x in diag],
        "d_operator_is_diagonal": not off_diagonal,
        "oracle_agrees": diag == sorted(v + shift for v in sp.values),
    }


def cmd_monodromy(args, ctx):
    f = _poly(_read_text(args.poly, ctx["stdin"]))
    ctx["inputs"]["poly"] = f.render()
    m = vanishing_monodromy(f, ctx["convention"])
    out = {
        "monodromy": m.to_json(),
        "exponents": [_fr(r) for r in m.exponents()],
        "eigenvalues": [_eig(r, ctx) for r in m.exponents()],
    }
    if args.pv:
        pv = pv_data(f, ctx["convention"])
        out["pv"] = pv.to_json()
        out["pv"]["eigenvalues"] = [_eig(r, ctx) for r in pv.monodromy.exponents()]
    return out


def _eig(r, ctx):
    # under the conjugate convention T = exp(+2 pi i r)
    return eigenvalue_text(r if ctx["convention"] == "standard" else reduce_to_g(-r))


def cmd_ts(args, ctx):
    f = _poly(_read_text(args.f, ctx["stdin"]))
    g = _poly(args.g)
    fg = direct_sum(f, g)
    ctx["inputs"].update(f=f.render(), g=g.render())
    mu_f, mu_g, mu_fg = (milnor_algebra(p).mu for p in (f, g, fg))
    out = {"sum": fg.render(), "mu_f": mu_f, "mu_g": mu_g, "mu_sum": mu_fg, "mu_multiplicative": mu_fg == mu_f * mu_g}
    if all(qh_weights(p) is not None for p in (f, g, fg)):
        sf, sg, sfg = spectrum(f), spectrum(g), spectrum(fg)
        mink = thom_sebastiani(sf, sg)
        pf, pg, pfg = (pv_data(p, ctx["convention"]) for p in (f, g, fg))
        tensor = thom_sebastiani(pf, pg)
        out.update(
            spectrum_f=sf.to_json(), spectrum_g=sg.to_json(), spectrum_sum=sfg.to_json(),
            minkowski_sum=mink.to_json(), spectrum_additive=mink == sfg,
            pv_monodromy_sum=pfg.monodromy.to_json(), pv_monodromy_tensor=tensor.monodromy.to_json(),
            monodromy_multiplicative=tensor.monodromy == pfg.monodromy,
        )
    else:
        ctx["warnings"].append("spectra skipped: not every polynomial is quasi-homogeneous")
    return out


def cmd_stabilize(args, ctx):
    f = _poly(_read_text(args.poly, ctx["stdin"]))
    lam = OrderParam(Fraction(str(parse_rational(args.lam))))
    k = args.rank
    if k < 0:
        raise UsageError("--rank must be nonnegative")
    ctx["inputs"].update(poly=f.render(), rank=k, **{"lambda": _fr(lam.lam)})
    q = QuadForm.sum_of_squares(k)
    base = pv_data(f, ctx["convention"])
    stab = stabilize(base, q, lam)
    direct_poly = direct_sum(f, sum_of_squares(k)) if k else f
    direct = pv_data(direct_poly, ctx["convention"])
    return {
        "stabilized_poly": direct_poly.render(),
        "base": base.to_json(),
        "stabilized": stab.to_json(),
        "direct": direct.to_json(),
        "spectrum_matches_direct": stab.spectrum == direct.spectrum,
        "raw_monodromy_matches_direct": stab.raw == direct.raw,
        "pv_monodromy_invariant": stab.monodromy == base.monodromy == direct.monodromy,
        "tq_scale": _fr(stab.tq_scales[-1]) if stab.tq_scales else None,
    }


def cmd_maslov(args, ctx):
    space = read_space(read_data_file(args.space))
    Ls = read_lagrangians(read_data_file(args.chain), space)
    ctx["inputs"].update(space=args.space, chain=args.chain)
    C = chain_map(Ls)
    out = {"chain_length": len(Ls), "chain_map": _mat_json(C.matrix), "dual_flag": C.dual_flag}
    if len(Ls) == 3:
        q = maslov_form(*Ls)
        out["maslov_form"] = _mat_json(q.matrix)
        out["maslov_det"] = str(q.det())
    out["composition_checks"] = {str(k): chain_composition_check(Ls, k) for k in range(1, len(Ls) + 1, 2)}
    back = {}
    for k in range(1, len(Ls) - 1):
        if Ls[k - 1] == Ls[k + 1]:
            back[str(k)] = backtrack_deletion_check(Ls, k)
    out["backtrack_checks"] = back
    return out


def cmd_rh(args, ctx):
    data = read_data_file(args.monodromy)
    ctx["inputs"]["monodromy"] = args.monodromy
    if isinstance(data, dict) and "matrix" in data:
        m = eigen_decompose(_matrix(data["matrix"], "/matrix"), assume_quasi_unipotent=not args.numeric)
        if args.numeric:
            return {"numeric": m.to_json()}
    else:
        m = MonodromyData.from_json(data)
    if ctx["convention"] == "conjugate":
        m = conjugate(m)
    d = rh_inverse(m)
    out = {"monodromy": m.to_json(), "rank": d.rank, "D": _mat_json(linalg.as_matrix(d.constant_term()))}
    if args.roundtrip:
        back = lattice_reduce(d)
        out["roundtrip"] = back.to_json()
        out["roundtrip_ok"] = back == m
    return out


def cmd_chart(args, ctx):
    h = _poly(_read_text(args.h, ctx["stdin"]))
    lv = [v for v in args.lvars.split(",") if v]
    mv = [v for v in args.mvars.split(",") if v]
    ctx["inputs"].update(h=h.render(), lvars=lv, mvars=mv)
    emb = embedding_quadform(h, lv, mv)
    T_M, T_pi1, T_pi2 = chart_lagrangians(h, lv, mv)
    out = {"embedding": emb.to_json(), "maslov_form": _mat_json(maslov_form(T_M, T_pi1, T_pi2).matrix),
           "maslov_consistency": maslov_consistency(h, lv, mv)}
    qpoly = emb.q_xi.as_poly([f"{v}_q" for v in mv])
    pieces = {"h": emb.h, "f": emb.f, "q_xi": qpoly}
    if all(qh_weights(p) is not None for p in pieces.values()) and emb.f.degree() >= 2:
        sh, sf, sq = (spectrum(p) for p in pieces.values())
        out.update(spectrum_h=sh.to_json(), spectrum_f=sf.to_json(), spectrum_q=sq.to_json(),
                   spectrum_consistent=thom_sebastiani(sf, sq) == sh)
    else:
        ctx["warnings"].append("spectrum comparison skipped: h, f or q_xi is not quasi-homogeneous")
    ctx["warnings"].append("critical locus checked at the reduced origin only")
    return out


def cmd_clean(args, ctx):
    data = read_data_file(args.data)
    ctx["inputs"]["data"] = args.data
    if not isinstance(data, dict):
        raise SchemaError("expected an object")
    space = read_space(data.get("space", {"standard": _infer_half(data)}), "/space")
    TL = LagrangianSubspace(space, _matrix(data.get("TL"), "/TL", space.half, space.dim), "T_L")
    TM = LagrangianSubspace(space, _matrix(data.get("TM"), "/TM", space.half, space.dim), "T_M")
    K = _matrix(data.get("TLM", []), "/TLM", None, space.dim) if data.get("TLM") else []
    c = clean_intersection_data(TL, TM, K)
    swapped = clean_intersection_data(TM, TL, K)
    ctx["warnings"].append("L cap M and M cap L differ by order_sign; the order given is TL then TM")
    return {"scalar": str(c), "torsor": TorsorElement.base(c, "Q").to_json(), "intersection_dim": len(K),
            "swapped_scalar": str(swapped), "order_sign": 1 if swapped == c else -1}


def _infer_half(data):
    tl = data.get("TL")
    if isinstance(tl, list) and tl and isinstance(tl[0], list) and len(tl[0]) % 2 == 0 and tl[0]:
        return len(tl[0]) // 2
    raise SchemaError("cannot infer the space; give 'space'", "/TL")


def cmd_cocycle(args, ctx):
    data = read_data_file(args.loop)
    ctx["inputs"]["loop"] = args.loop
    if isinstance(data, dict) and "quadratic" in data:
        quad = data["quadratic"]
        H1 = _matrix(quad.get("H1"), "/quadratic/H1")
        H2 = _matrix(quad.get("H2"), "/quadratic/H2", len(H1), len(H1))
        flip = quad.get("flip")
        if flip is not None and flip not in (0, 1, 2):
            raise SchemaError("flip must be 0, 1 or 2", "/quadratic/flip")
        transitions = quadratic_loop(H1, H2, flip)
    elif isinstance(data, dict) and isinstance(data.get("transitions"), list):
        transitions = []
        for k, t in enumerate(data["transitions"]):
            here = f"/transitions/{k}"
            if not isinstance(t, dict) or not {"from", "to", "rep"} <= set(t):
                raise SchemaError("transition needs 'from', 'to' and 'rep'", here)
            rep = parse_scalar(str(t["rep"]))
            el = TorsorElement.from_rep(rep, f"{t['from']}->{t['to']}")
            if "target" in t and parse_scalar(str(t["target"])) != el.target:
                raise SchemaError("rep does not square to target", here + "/rep")
            transitions.append(Transition(str(t["from"]), str(t["to"]), el))
    else:
        raise SchemaError("expected {'quadratic': {...}} or {'transitions': [...]}")
    sign = cocycle_check(transitions)
    return {
        "sign": sign,
        "consistent": sign == 1,
        "transitions": [{"from": t.source, "to": t.target, **t.element.to_json()} for t in transitions],
    }


COMMANDS = {
    "milnor": cmd_milnor,
    "spectrum": cmd_spectrum,
    "monodromy": cmd_monodromy,
    "ts": cmd_ts,
    "stabilize": cmd_stabilize,
    "maslov": cmd_maslov,
    "rh": cmd_rh,
    "chart": cmd_chart,
    "clean": cmd_clean,
    "cocycle": cmd_cocycle,
}


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="dtcalc", description="Exact local data for Lagrangian intersections.")
    p.add_argument("--convention", choices=["standard", "conjugate"], default="standard",
                   help="monodromy sign convention (conjugate flips T = exp(-2 pi i D) to exp(2 pi i D))")
    p.add_argument("--batch", metavar="FILE", help="JSON list of argument lists, run in order")
    p.add_argument("--summary", action="store_true", help="also print a short human summary to stderr")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    s = sub.add_parser("milnor", help="Milnor algebra at the origin")
    s.add_argument("--poly", required=True)
    s.add_argument("--degree-bound", type=int, default=64)
    s = sub.add_parser("spectrum", help="spectrum of a quasi-homogeneous singularity")
    s.add_argument("--poly", required=True)
    s.add_argument("--lambda", dest="lam", default="1/2")
    s = sub.add_parser("monodromy", help="vanishing-cycle monodromy")
    s.add_argument("--poly", required=True)
    s.add_argument("--pv", action="store_true", help="apply the (-1)^n twist")
    s = sub.add_parser("ts", help="Thom-Sebastiani sum f(x) + g(y)")
    s.add_argument("--f", required=True)
    s.add_argument("--g", required=True)
    s = sub.add_parser("stabilize", help="stabilize by z1^2 + ... + zk^2")
    s.add_argument("--poly", required=True)
    s.add_argument("--rank", type=int, required=True)
    s.add_argument("--lambda", dest="lam", default="1/2")
    s = sub.add_parser("maslov", help="chain maps and Maslov forms")
    s.add_argument("--space", required=True)
    s.add_argument("--chain", required=True)
    s = sub.add_parser("rh", help="RH^-1 and the lattice round trip")
    s.add_argument("--monodromy", required=True)
    s.add_argument("--roundtrip", action="store_true")
    s.add_argument("--numeric", action="store_true", help="floating-point decomposition of a raw matrix")
    s = sub.add_parser("chart", help="chart embedding of a generating function h(l, m)")
    s.add_argument("--h", required=True)
    s.add_argument("--lvars", required=True)
    s.add_argument("--mvars", required=True)
    s = sub.add_parser("clean", help="clean intersection determinant")
    s.add_argument("--data", required=True)
    s = sub.add_parser("cocycle", help="sign of a torsor cocycle around a loop")
    s.add_argument("--loop", required=True)
    return p


def conventions(convention: str) -> dict:
    sign = "T = exp(-2*pi*i*D)" if convention == "standard" else "T = exp(+2*pi*i*D)"
    return {"monodromy": sign, "name": convention, "G": "-1 < Re r <= 0", "T_q_base_point": "alpha = 1"}


def _error(exc) -> dict:
    out = {"code": exc.code, "message": str(exc)}
    if isinstance(exc, SchemaError):
        out["pointer"] = exc.pointer or "/"
    if isinstance(exc, ParseError) and exc.offset is not None:
        out["offset"] = exc.offset
    return out


def _run_one(argv, stdin, convention=None):
    """Returns (exit code, report dict or None, usage message or None)."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        return 1, None, str(exc)
    if args.command is None and not args.batch:
        return 1, None, "a subcommand is required"
    conv = args.convention if convention is None or "--convention" in argv else convention
    ctx = {"inputs": {}, "warnings": [], "stdin": stdin, "convention": conv}
    report = {"schema": SCHEMA, "command": args.command, "conventions": conventions(conv)}
    try:
        results = COMMANDS[args.command](args, ctx)
    except UsageError as exc:
        return 1, None, str(exc)
    except (ParseError, SchemaError) as exc:
        report.update(inputs=ctx["inputs"], error=_error(exc), warnings=ctx["warnings"])
        return 1, report, None
    except DtcalcError as exc:
        report.update(inputs=ctx["inputs"], error=_error(exc), warnings=ctx["warnings"])
        return 2, report, None
    report.update(inputs=ctx["inputs"], results=results, warnings=ctx["warnings"])
    return 0, report, None


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _summary(report) -> str:
    if "error" in report:
        return f"{report['command']}: {report['error']['code']}: {report['error']['message']}"
    res = report["results"]
    keys = ", ".join(f"{k}={res[k]}" for k in sorted(res) if not isinstance(res[k], (dict, list)))
    return f"{report['command']}: {keys}"


def run(argv, stdin=None, stdout=None, stderr=None) -> int:
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        top, _ = parser.parse_known_args(argv)
    except UsageError as exc:
        stderr.write(f"dtcalc: error: {exc}\n")
        return 1
    if top.batch:
        try:
            entries = read_data_file(top.batch)
        except (UsageError, SchemaError) as exc:
            stderr.write(f"dtcalc: error: {exc}\n")
            return 1
        if not isinstance(entries, list) or not all(isinstance(e, list) and all(isinstance(x, str) for x in e)
                                                    for e in entries):
            stderr.write("dtcalc: error: batch file must be a JSON list of argument lists\n")
            return 1
        reports, worst = [], 0
        for entry in entries:
            code, report, msg = _run_one(entry, stdin, top.convention)
            worst = max(worst, code)
            reports.append(report if report is not None else {"argv": entry, "error": {"code": "UsageError", "message": msg}})
        stdout.write(dumps({"schema": SCHEMA, "batch": reports}))
        return worst
    code, report, msg = _run_one(argv, stdin)
    if report is None:
        stderr.write(f"dtcalc: error: {msg}\n")
        return code
    stdout.write(dumps(report))
    if top.summary:
        stderr.write(_summary(report) + "\n")
    return code


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
