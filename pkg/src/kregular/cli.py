"""Command-line front end.

Exit codes: 0 success, 1 internal error, 2 parse or validation error,
3 no regular branch up to the bound, 4 disagreement between a formula and
its independent check.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time
from fractions import Fraction

from . import __version__
from . import newton as nw
from .errors import (CapExceeded, DegenerateStrictTransform, FieldClash, KregError, NonzeroConstant,
                     ParseError, ShapeMismatch, Unsupported, ZeroMap)
from .iteration import analyze, greenberg_lower_bound, lift
from .polysys import PolyMap, curve_series, format_map, order, p_add, p_pow, p_var, parse, perturb
from .surds import fmt

EXIT_OK, EXIT_INTERNAL, EXIT_INPUT, EXIT_NOT_REGULAR, EXIT_DISAGREE = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


# -- serialization -----------------------------------------------------------------------

def _vec(v) -> list:
    return [fmt(x) for x in v]


def _matrix(M) -> list:
    return [[fmt(x) for x in row] for row in M.data]


def branch_json(rep) -> dict:
    st = rep.stage
    d = {
        "verdict": rep.verdict,
        "regular": rep.regular,
        "k": rep.k,
        "leading": [_vec(z) for z in rep.fixed],
        "dims": rep.dims,
        "chi": rep.chi,
    }
    if rep.regular:
        d["stability_order"] = 2 * rep.k + 1
        d["stability"] = rep.stability_orders
        d["greenberg"] = {str(i): v for i, v in rep.greenberg().items()}
        d["wedge_orders"] = [{"part": p, "dim": n, "order": o} for p, n, o in rep.wedge_orders]
    d["operators"] = [_matrix(lv.S) for lv in st.levels]
    d["source"] = rep.source
    d["notes"] = rep.notes
    return d


def _input_echo(G: PolyMap, path: str) -> dict:
    return {"file": path, "vars": list(G.names), "equations": format_map(G)}


def _document(command: str, args, body: dict, t0: float) -> dict:
    doc = {"schema": 1, "tool": "kregular", "version": __version__, "command": command}
    doc.update(body)
    if not args.no_timing:
        doc["timing"] = {"seconds": f"{time.perf_counter() - t0:.4f}"}
    return doc


def _emit(doc: dict, args) -> None:
    text = json.dumps(doc, indent=2, ensure_ascii=False) + "\n"
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# -- input --------------------------------------------------------------------------------

def _load(args, *, analysis: bool = True) -> PolyMap:
    G = getattr(args, "_map", None)
    if G is not None:
        return G
    try:
        with open(args.file, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {args.file}: {exc.strerror}") from None
    return parse(text, analysis=analysis)


def _k_max(args) -> int:
    if args.kmax is not None:
        k = args.kmax
    else:
        k = int(os.environ.get("BF_KMAX", "16"))
    if k < 1:
        raise UsageError("k_max must be at least 1")
    return k


def _run_analyze(G: PolyMap, args) -> list:
    if args.grid < 1:
        raise UsageError("grid bound must be at least 1")
    return analyze(G, k_max=_k_max(args), x_param=args.x_param, grid_bound=args.grid, seed=args.seed)


def _select(reports: list, index: int):
    if not 1 <= index <= len(reports):
        raise UsageError(f"branch {index} out of range (1..{len(reports)})")
    return reports[index - 1]


# -- commands -----------------------------------------------------------------------------

def cmd_analyze(args) -> int:
    t0 = time.perf_counter()
    G = _load(args)
    reps = _run_analyze(G, args)
    body = {
        "input": _input_echo(G, args.file),
        "config": {"k_max": _k_max(args), "x_param": args.x_param, "grid_bound": args.grid, "seed": args.seed},
        "branches": [branch_json(r) for r in reps],
    }
    _emit(_document("analyze", args, body, t0), args)
    return EXIT_OK if any(r.regular for r in reps) else EXIT_NOT_REGULAR


def _segment_json(seg, support, G, M, hypothesis: bool, problems: list) -> dict:
    p, q, r, n, m, N, A, A_S = nw.segment_data(seg)
    coeffs = nw.phi(seg, support)
    facs = nw.factor_analysis(coeffs)
    simple = all(f.simple for f in facs)
    d = {
        "left": list(seg.left), "right": list(seg.right),
        "p": p, "q": q, "r": r, "n": n, "m": m, "N": N, "A": fmt(A), "A_S": fmt(A_S),
        "phi": _vec(coeffs),
        "factors": [{"degree": f.degree, "multiplicity": f.multiplicity,
                     "root": fmt(f.root) if f.root is not None else None,
                     "irreducible": f.irreducible} for f in facs],
        "square_free": simple,
        "k": nw.branch_k(seg),
    }
    if simple:
        d["identity"] = [int(v) for v in nw.segment_sum_identity(seg)]
    certs = []
    for f in facs:
        if f.root is None:
            continue
        if f.simple:
            curve = nw.branch_curve(seg, support, f.root, M)
            rep = nw.certify(G, curve, k_max=M - 2)
            kc = rep.k if rep else None
            certs.append({"root": fmt(f.root), "k_certified": kc, "k_formula": d["k"], "equal": kc == d["k"]})
        elif hypothesis:
            entry = {"root": fmt(f.root), "multiplicity": f.multiplicity, "flag": "HYPOTHESIS"}
            try:
                st = nw.strict_transform(seg, support, f.root)
            except (DegenerateStrictTransform, Unsupported) as exc:
                entry["error"] = str(exc)
                certs.append(entry)
                continue
            entry.update({"d1": st.d1, "e1": st.e1, "m_T": st.m_T, "n_T": st.n_T, "r_T": st.r_T,
                          "k_hypothesis": st.k})
            ks = []
            for curve in nw.strict_branches(st, support, M):
                rep = nw.certify(G, curve, k_max=M - 2)
                ks.append(rep.k if rep else None)
            entry["k_certified"] = ks
            entry["equal"] = bool(ks) and all(k == st.k for k in ks)
            if not entry["equal"]:
                problems.append(f"strict transform prediction {st.k} vs iteration {ks}")
            certs.append(entry)
    d["branches"] = certs
    return d


def cmd_newton(args) -> int:
    t0 = time.perf_counter()
    G = _load(args)
    if G.nv != 2 or G.m != 1:
        raise ShapeMismatch("newton needs one equation in two unknowns")
    poly = nw.build_polygon(G)
    rep = nw.milnor_report(G, hypothesis=args.hypothesis)
    M = _k_max(args) + 2
    problems: list = []
    segs = [_segment_json(s, poly.support, G, M, args.hypothesis, problems) for s in poly.full_segments]
    if args.hypothesis and rep.hypothesis and not rep.hypothesis["agrees_local_algebra"]:
        problems.append("hypothesis Milnor number differs from the local algebra")

    def mu(v):
        return v if v is None or isinstance(v, (int, str)) else int(v)

    body = {
        "input": _input_echo(G, args.file),
        "polygon": {
            "split": list(poly.split),
            "convenient": poly.convenient,
            "isolated": poly.isolated,
            "ord": poly.ord,
            "segments": segs,
            "reduced_segments": [{"left": list(s.left), "right": list(s.right), "k": nw.branch_k(s)}
                                 for s in poly.segments],
            "k_sequence_valley": nw.valley_pattern([nw.branch_k(s) for s in poly.full_segments]),
        },
        "milnor": {
            "via_k": mu(rep.mu_via_k) if rep.mu_via_k is not None else "inconclusive",
            "kouchnirenko": mu(rep.mu_kouchnirenko),
            "local_algebra": mu(rep.mu_local_algebra),
            "branch_table": [list(t) for t in rep.branches],
            "agree": rep.agree,
            "notes": rep.notes,
        },
    }
    if args.hypothesis:
        body["hypothesis"] = {"flag": "HYPOTHESIS", "mu": rep.hypothesis and rep.hypothesis["mu"],
                              "problems": problems}
    _emit(_document("newton", args, body, t0), args)
    if args.hypothesis and problems:
        return EXIT_DISAGREE
    return EXIT_OK


def cmd_lift(args) -> int:
    t0 = time.perf_counter()
    G = _load(args)
    reps = _run_analyze(G, args)
    rep = _select(reps, args.branch)
    if not rep.regular:
        print(f"branch {args.branch} is not regular up to k = {rep.k_max}", file=sys.stderr)
        return EXIT_NOT_REGULAR
    if args.order < 0:
        raise UsageError("order must be non-negative")
    res = lift(rep.stage, args.order)
    body = {
        "input": _input_echo(G, args.file),
        "branch": branch_json(rep),
        "order": args.order,
        "coefficients": [_vec(z) for z in res.coeffs],
        "determined": res.determined,
        "residual_order": res.residual_order,
        "checked_through": res.checked,
    }
    _emit(_document("lift", args, body, t0), args)
    return EXIT_OK


def ade_form(family: str, index: int) -> PolyMap:
    x, y = p_var(0, 2), p_var(1, 2)
    fam = family.upper()
    if fam == "A" and index >= 1:
        g = p_add(p_pow(x, 2, 2), p_pow(y, index + 1, 2), -1)
    elif fam == "D" and index >= 4:
        g = p_add(p_pow(x, 2, 2), p_pow(y, index - 2, 2), -1)
        g = {(a, b + 1): c for (a, b), c in g.items()}
    elif fam == "E" and index == 6:
        g = p_add(p_pow(x, 3, 2), p_pow(y, 4, 2), -1)
    elif fam == "E" and index == 7:
        g = p_add(p_pow(x, 3, 2), {(1, 3): Fraction(1)}, -1)
    elif fam == "E" and index == 8:
        g = p_add(p_pow(x, 3, 2), p_pow(y, 5, 2), -1)
    else:
        raise UsageError(f"no normal form {family}{index}")
    return PolyMap(("x", "y"), (g,))


def cmd_ade(args) -> int:
    t0 = time.perf_counter()
    G = ade_form(args.family, args.index)
    reps = analyze(G, k_max=_k_max(args))
    ks = sorted(r.k for r in reps if r.regular)
    mu_la = nw.milnor_local_algebra(G)
    rep = nw.milnor_report(G)
    lhs = sum(ks) - order(G) + 1
    ok = lhs == mu_la and all(r.regular for r in reps)
    body = {
        "family": args.family.upper(), "index": args.index,
        "input": {"vars": list(G.names), "equations": format_map(G)},
        "branches": [branch_json(r) for r in reps],
        "k_degrees": ks,
        "milnor": {"from_k": lhs, "local_algebra": mu_la,
                   "via_polygon": rep.mu_via_k, "kouchnirenko": rep.mu_kouchnirenko},
        "consistent": ok,
    }
    _emit(_document("ade", args, body, t0), args)
    return EXIT_OK if ok else EXIT_DISAGREE


def cmd_greenberg(args) -> int:
    t0 = time.perf_counter()
    try:
        ks = [int(s) for s in args.k.split(",") if s.strip()]
    except ValueError:
        raise UsageError("--k expects a comma separated list of integers") from None
    if not ks or any(k < 1 for k in ks):
        raise UsageError("k values must be positive")
    table = greenberg_lower_bound(ks, args.imax)
    rows = [{"i": i, "bound": b, "on_or_below_2i": b <= 2 * i} for i, b in table.items()]
    _emit(_document("greenberg", args, {"k": ks, "imax": args.imax, "table": rows}, t0), args)
    return EXIT_OK


def _samples(R: Fraction, count: int) -> list:
    if R == 0 or count <= 1:
        return [Fraction(0)]
    return [-R + 2 * R * Fraction(i, count - 1) for i in range(count)]


def _eval_curve(series, eps):
    out = []
    for s in series:
        acc = Fraction(0)
        for c in reversed(s):
            acc = acc * eps + c
        out.append(acc)
    return out


def _svg(points, proj) -> str:
    i, j = proj
    xs = [float(p[i]) for p in points]
    ys = [float(p[j]) for p in points]
    lo_x, hi_x = min(xs), max(xs)
    lo_y, hi_y = min(ys), max(ys)
    span = max(hi_x - lo_x, hi_y - lo_y) or 1.0
    size, pad = 400.0, 20.0

    def sx(v):
        return pad + (v - lo_x) / span * (size - 2 * pad)

    def sy(v):
        return size - pad - (v - lo_y) / span * (size - 2 * pad)

    pts = " ".join("%.12g,%.12g" % (sx(a), sy(b)) for a, b in zip(xs, ys))
    return ("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"400\" height=\"400\" viewBox=\"0 0 400 400\">\n"
            f"  <polyline fill=\"none\" stroke=\"black\" stroke-width=\"1.5\" points=\"{pts}\"/>\n"
            "</svg>\n")


def cmd_plot(args) -> int:
    G = _load(args)
    try:
        proj = tuple(int(s) - 1 for s in args.proj.split(","))
    except ValueError:
        raise UsageError("--proj expects two indices like 1,2") from None
    if len(proj) != 2 or any(not 0 <= p < G.nv for p in proj):
        raise UsageError(f"bad projection {args.proj} for {G.nv} variables")
    try:
        R = Fraction(args.range)
    except ValueError:
        raise UsageError("--range must be a rational number") from None
    if R < 0:
        raise UsageError("--range must be non-negative")
    reps = _run_analyze(G, args)
    rep = _select(reps, args.branch)
    if not rep.regular:
        print(f"branch {args.branch} is not regular up to k = {rep.k_max}", file=sys.stderr)
        return EXIT_NOT_REGULAR
    res = lift(rep.stage, args.order)
    trunc = len(res.coeffs)
    series = curve_series(res.coeffs, G.nv, trunc)
    eps = _samples(R, args.samples)
    points = [_eval_curve(series, e) for e in eps]
    if args.format == "svg":
        text = _svg(points, proj)
    else:
        lines = [",".join(["eps"] + list(G.names))]
        for e, p in zip(eps, points):
            lines.append(",".join("%.12g" % float(v) for v in [e] + p))
        text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_perturb(args) -> int:
    G = _load(args)
    try:
        with open(args.h, encoding="utf-8") as fh:
            H = parse(fh.read())
    except OSError as exc:
        raise UsageError(f"cannot read {args.h}: {exc.strerror}") from None
    try:
        c = Fraction(args.scale)
    except ValueError:
        raise UsageError("--scale must be a rational number") from None
    Gc = perturb(G, H, c)
    if not args.rest:
        raise UsageError("perturb needs a subcommand to run on the perturbed map")
    sub = build_parser().parse_args([args.rest[0], args.file] + list(args.rest[1:]))
    if sub.command in ("perturb", "ade", "greenberg"):
        raise UsageError(f"{sub.command} does not take an input map")
    sub._map = Gc
    return COMMANDS[sub.command](sub)


COMMANDS = {
    "analyze": cmd_analyze, "newton": cmd_newton, "lift": cmd_lift, "ade": cmd_ade,
    "greenberg": cmd_greenberg, "plot": cmd_plot, "perturb": cmd_perturb,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="kregular", description="Regularity analysis of singular polynomial systems.")
    ap.add_argument("--version", action="version", version=f"kregular {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", metavar="PATH", help="write the report here instead of stdout")
    common.add_argument("--no-timing", action="store_true", help="omit the timing field")
    common.add_argument("--kmax", type=int, default=None, help="largest k tried (default 16, or $BF_KMAX)")
    search = argparse.ArgumentParser(add_help=False)
    search.add_argument("--x-param", action="store_true", help="parametrize branches by the first unknown")
    search.add_argument("--grid", type=int, default=6, help="bound of the rational search grid")
    search.add_argument("--seed", type=int, default=None, help="randomize complement choices")
    sp = ap.add_subparsers(dest="command", required=True)

    p = sp.add_parser("analyze", parents=[common, search], help="find and certify solution branches")
    p.add_argument("file")

    p = sp.add_parser("newton", parents=[common], help="Newton polygon and Milnor numbers")
    p.add_argument("file")
    p.add_argument("--hypothesis", action="store_true", help="also evaluate the strict-transform predictions")

    p = sp.add_parser("lift", parents=[common, search], help="compute further branch coefficients")
    p.add_argument("file")
    p.add_argument("--branch", type=int, default=1, help="1-based branch index in analyze order")
    p.add_argument("--order", type=int, default=4, help="extra orders L")

    p = sp.add_parser("ade", parents=[common], help="run the checks on a simple singularity normal form")
    p.add_argument("--family", required=True, choices=["A", "D", "E", "a", "d", "e"])
    p.add_argument("--index", type=int, required=True)

    p = sp.add_parser("greenberg", parents=[common], help="lower bound of the Greenberg function")
    p.add_argument("--k", required=True, help="comma separated k-degrees")
    p.add_argument("--imax", type=int, default=12)

    p = sp.add_parser("plot", parents=[common, search], help="sample a lifted branch as CSV or SVG")
    p.add_argument("file")
    p.add_argument("--branch", type=int, default=1)
    p.add_argument("--order", type=int, default=4)
    p.add_argument("--range", default="1")
    p.add_argument("--samples", type=int, default=41)
    p.add_argument("--proj", default="1,2")
    p.add_argument("--format", choices=["csv", "svg"], default="csv")
    p.add_argument("--out", default=None)

    p = sp.add_parser("perturb", parents=[common], help="run a subcommand on G + c*H",
                      usage="kregular perturb FILE --h FILE2 [--scale C] SUBCOMMAND [options]")
    p.add_argument("file")
    p.add_argument("--h", required=True, metavar="FILE")
    p.add_argument("--scale", default="1")
    return ap


def _split_perturb(argv: list) -> tuple[list, list]:
    # everything from the first subcommand name on belongs to the delegated run
    for i, a in enumerate(argv[1:], start=1):
        if a in COMMANDS:
            return argv[:i], argv[i:]
    return argv, []


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    rest: list = []
    if argv and argv[0] == "perturb":
        argv, rest = _split_perturb(argv)
    args = build_parser().parse_args(argv)
    args.rest = rest
    try:
        return COMMANDS[args.command](args)
    except (ParseError, NonzeroConstant, ShapeMismatch, ZeroMap, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except CapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_REGULAR
    except (KregError, FieldClash) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except Exception as exc:  # noqa: BLE001
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
