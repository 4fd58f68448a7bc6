"""Command-line front end.

Exit status is 0 on success, 1 when a computation rejects its input (the
exception class is printed), and 2 for malformed command lines.
"""
from __future__ import annotations

import argparse
import json
import sys
from functools import partial
from typing import Sequence, TextIO

from . import cohomring, foxalex, kuranishi, laurent, linkrep, milnor, swpredict
from .laurent import LaurentPoly, render_poly
from .linkrep import LinkDiagram

DOMAIN_ERRORS = (
    linkrep.PDError,
    linkrep.MalformedBraid,
    laurent.NotDivisible,
    foxalex.NotAKnot,
    foxalex.ZeroLinkingRequired,
    milnor.WrongComponentCount,
    cohomring.NotUnimodular,
    kuranishi.TauTooLarge,
    kuranishi.NonGenericH,
    kuranishi.NoConvergence,
    swpredict.NotAKnotPolynomial,
    swpredict.NotSymmetrizable,
    ValueError,
    ArithmeticError,
)

EXAMPLES = {
    "unknot": linkrep.unknot,
    "trefoil": linkrep.trefoil,
    "figure-eight": linkrep.figure_eight,
    "hopf": linkrep.hopf_link,
    "borromean": linkrep.borromean,
}


class UsageError(Exception):
    pass


def _read_file(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise argparse.ArgumentTypeError(f"cannot read {path}: {exc.strerror}") from None


def _h_vector(text: str) -> tuple[float, float, float]:
    try:
        parts = tuple(float(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated vector: {text!r}") from None
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected 3 components, got {len(parts)}")
    return parts


def _positive_int(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return n


def _add_link_input(p: argparse.ArgumentParser, required: bool = True) -> None:
    g = p.add_mutually_exclusive_group(required=required)
    g.add_argument("--pd", help="PD code, e.g. 'X[1,5,2,4] X[3,1,4,6] X[5,3,6,2]'")
    g.add_argument("--pd-file", type=_read_file, help="file containing a PD code")
    g.add_argument("--braid", help="braid word, e.g. 's1 s2^-1 s1'")
    g.add_argument("--diagram", type=_read_file, help="LinkDiagram JSON file")
    g.add_argument("--example", choices=sorted(EXAMPLES), help="built-in diagram")
    p.add_argument("--strands", type=_positive_int, help="strand count for --braid")


def _link(args) -> LinkDiagram:
    if args.pd is not None:
        return linkrep.parse_pd(args.pd)
    if args.pd_file is not None:
        return linkrep.parse_pd(args.pd_file)
    if args.braid is not None:
        return linkrep.braid_closure(linkrep.parse_braid(args.braid, args.strands))
    if args.diagram is not None:
        try:
            return LinkDiagram.from_json(args.diagram)
        except (KeyError, TypeError, json.JSONDecodeError) as exc:
            raise linkrep.MalformedPD(f"bad diagram JSON: {exc}") from None
    return EXAMPLES[args.example]()


def _knot(text: str) -> LinkDiagram:
    if text in EXAMPLES:
        return EXAMPLES[text]()
    kind, sep, body = text.partition(":")
    if sep and kind == "braid":
        return linkrep.braid_closure(linkrep.parse_braid(body))
    if sep and kind == "pd":
        return linkrep.parse_pd(body)
    raise UsageError(f"--knot: expected an example name, 'braid:WORD' or 'pd:CODE', got {text!r}")


def _poly_json(p: LaurentPoly) -> dict:
    return {
        "polynomial": render_poly(p),
        "nvars": p.nvars,
        "terms": [[list(e), c] for e, c in sorted(p.items())],
    }


# --- subcommands -------------------------------------------------------------


def cmd_alex(args) -> tuple[dict, list[str]]:
    d = _link(args)
    p = foxalex.alexander_poly(d, args.column)
    data = {"ncomponents": d.ncomponents, **_poly_json(p)}
    return data, [render_poly(p)]


def cmd_reduced(args) -> tuple[dict, list[str]]:
    d = _link(args)
    p = foxalex.reduced_alexander(d)
    e = p.eval_at_ones()
    data = {"ncomponents": d.ncomponents, **_poly_json(p), "eval_at_ones": e}
    return data, [render_poly(p), f"value at ones: {e}"]


def cmd_milnor(args) -> tuple[dict, list[str]]:
    mu = milnor.mu_bar_123(_link(args))
    return {"mu_bar_123": mu}, [f"mu_bar_123: {mu}"]


def cmd_det(args) -> tuple[dict, list[str]]:
    f = cohomring.CupForm(args.rank, args.top)
    det = cohomring.det_from_cupform(f)
    return {"rank": f.rank, "top": f.top, "det": det}, [f"det: {det}"]


def cmd_chern(args) -> tuple[dict, list[str]]:
    f = cohomring.CupForm(4, args.top)
    r = cohomring.chern_character_index(f)
    parts = cohomring.index_components(f)
    lower_zero = parts[0].is_zero() and parts[2].is_zero()
    data = {"top": f.top, "ch_top": r, "lower_degrees_vanish": lower_zero}
    return data, [f"ch(Ind) = {r} [vol]", f"degree 0 and 2 parts vanish: {str(lower_zero).lower()}"]


def cmd_verify_lemma(args) -> tuple[dict, list[str]]:
    if args.borromean_bandsum is not None:
        n = args.borromean_bandsum
        d = linkrep.band_sum_borromean(n)
        subject = f"{n}-fold band sum of the Borromean rings"
    else:
        if not any(getattr(args, k) is not None for k in ("pd", "pd_file", "braid", "diagram", "example")):
            raise UsageError("verify-lemma: one of --borromean-bandsum, --pd, --pd-file, --braid, --diagram, --example is required")
        d = _link(args)
        subject = "link"
    rep = swpredict.verify_lemma(d, subject)
    lines = [
        f"subject: {rep.subject}",
        f"mu_bar_123: {rep.mu}",
        f"det: {rep.det}",
        f"alex_eval: {rep.alex_eval}",
        f"lemma_holds: {str(rep.lemma_holds).lower()}",
        f"sw_mod2: {rep.sw_mod2}",
    ]
    return rep.to_dict(), lines


def cmd_predict(args) -> tuple[dict, list[str]]:
    if (args.det is None) == (args.top is None):
        raise UsageError("predict: give exactly one of --det or --top")
    det = args.det if args.det is not None else cohomring.det_from_cupform(cohomring.CupForm(4, args.top))
    s = swpredict.predict_sw_mod2(det)
    return {"det": det, "sw_mod2": s}, [f"det: {det}", f"sw_mod2: {s}"]


def cmd_knot_surgery(args) -> tuple[dict, list[str]]:
    if len(args.knot) != 3:
        raise UsageError(f"--knot: exactly three knots are required, got {len(args.knot)}")
    deltas = [foxalex.alexander_poly_knot(_knot(k)) for k in args.knot]
    sw = swpredict.knot_surgery_sw(deltas)
    total = sw.eval_at_ones()
    centre = swpredict.central_coefficient(sw)
    data = {
        "knots": list(args.knot),
        "alexander": [render_poly(p) for p in deltas],
        **_poly_json(sw),
        "eval_at_ones": total,
        "product_criterion": swpredict.product_criterion(total),
        "central_coefficient": centre,
        "sw_mod2": centre % 2,
    }
    lines = [
        f"SW = {render_poly(sw)}",
        f"value at ones: {total}",
        f"square up to sign: {str(data['product_criterion']).lower()}",
        f"central coefficient: {centre}",
    ]
    return data, lines


def _signs(signs) -> str:
    return " ".join(f"{s:+d}" for s in signs)


def cmd_kuranishi(args) -> tuple[dict, list[str]]:
    m = kuranishi.build_model(args.seed, args.tau, args.type)
    res = kuranishi.count_solution_circles(m, args.h, starts=args.starts, seed=args.seed)
    data = {
        "seed": args.seed,
        "type": m.fixed_type.value,
        "tau": args.tau,
        "h": list(args.h),
        "C": round(m.C, 6),
        **res.to_dict(),
    }
    head = f"seed: {args.seed}, type: {m.fixed_type.value}, tau: {args.tau:g}, C: {m.C:.6f}"
    if res.circles == 1:
        body = f"circles: 1, sign: {res.signs[0]:+d}"
    elif res.circles:
        body = f"circles: {res.circles}, signs: {_signs(res.signs)}"
    else:
        body = f"circles: 0, reducible_only: {str(res.reducible_only).lower()}"
    return data, [head, body]


# --- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="swtori", description="Link invariants and mod-2 Seiberg-Witten checks for homology tori.")
    # accepted both before and after the subcommand
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS, help="machine-readable output")
    parser.add_argument("--json", action="store_true", default=argparse.SUPPRESS, help="machine-readable output")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    add = partial(sub.add_parser, parents=[common])

    p = add("alex", help="Alexander polynomial of a knot or link")
    _add_link_input(p)
    p.add_argument("--column", type=int, default=0, help="generator column to delete")
    p.set_defaults(func=cmd_alex)

    p = add("reduced", help="Delta_L / prod(t_i - 1) for a link with zero linking")
    _add_link_input(p)
    p.set_defaults(func=cmd_reduced)

    p = add("milnor", help="triple Milnor invariant of a 3-component link")
    _add_link_input(p)
    p.set_defaults(func=cmd_milnor)

    p = add("det", help="determinant from the top cup product")
    p.add_argument("--top", type=int, required=True, help="value of the top cup product on the fundamental class")
    p.add_argument("--rank", type=int, choices=(3, 4), default=4)
    p.set_defaults(func=cmd_det)

    p = add("chern", help="Chern character of the index bundle over the dual torus")
    p.add_argument("--top", type=int, required=True)
    p.set_defaults(func=cmd_chern)

    p = add("verify-lemma", help="check |Delta_M(1,1,1)| = det(M)^2")
    _add_link_input(p, required=False)
    p.add_argument("--borromean-bandsum", type=_positive_int, metavar="N")
    p.set_defaults(func=cmd_verify_lemma)

    p = add("predict", help="mod-2 invariant predicted from the determinant")
    p.add_argument("--det", type=int)
    p.add_argument("--top", type=int)
    p.set_defaults(func=cmd_predict)

    p = add("knot-surgery", help="product formula for knot surgery on T^3 x S^1")
    p.add_argument("--knot", action="append", default=[], metavar="KNOT",
                   help="example name, 'braid:WORD' or 'pd:CODE'; give three times")
    p.set_defaults(func=cmd_knot_surgery)

    p = add("kuranishi", help="count solution circles of a seeded local model")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--tau", type=float, required=True)
    p.add_argument("--h", type=_h_vector, required=True, metavar="X,Y,Z")
    p.add_argument("--type", choices=[t.value for t in kuranishi.FixedType], default="j-fixed")
    p.add_argument("--starts", type=int, default=kuranishi.DEFAULT_STARTS)
    p.set_defaults(func=cmd_kuranishi)
    return parser


def run(argv: Sequence[str] | None = None, out: TextIO | None = None, err: TextIO | None = None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        data, lines = args.func(args)
    except UsageError as exc:
        parser.print_usage(err)
        print(f"swtori: error: {exc}", file=err)
        return 2
    except DOMAIN_ERRORS as exc:
        print(f"{type(exc).__name__}: {exc}", file=err)
        return 1
    if getattr(args, "json", False):
        out.write(json.dumps(data, indent=2) + "\n")
    else:
        out.write("\n".join(lines) + "\n")
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
