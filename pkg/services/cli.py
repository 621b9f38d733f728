# services/cli.py
# -----------------------------------------------------------------------------
# Purpose:
#   Command-line front end, run as `python -m services.cli ...`:
#     char fib|inf|voa        print a character (text, or --json rows)
#     verify <id>|all         run catalog checks, JSON lines on stdout or --out
#     durfee classify|census  classify one partition / tabulate all of size <= N
#     render durfee|family    write a Durfee dissection SVG
#
# Exit codes:
#   0 every check matched (or nothing to check), 1 some mismatch,
#   2 bad flags, invalid input or I/O failure (message on stderr).
# -----------------------------------------------------------------------------

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path
from typing import Any, Dict, List, Sequence

import pandas as pd

from engine import fibfinite, fibinfinite
from engine.errors import FibcfgError
from engine.partitions import Partition, containment_facts, durfee_census, durfee_classify
from engine.qseries import QSeries, format_q_poly
from engine.report import IdentityReport, series_rows
from engine.voachar import voa_char
from services.config import load_config
from services.identities import CATALOG, SuiteConfig, catalog_ids, run_check, run_suite, summary_frame, totals_frame
from services.render import render_family_svg, render_partition_svg, write_svg

# verify flags that map onto catalog parameters (flag dest -> parameter name)
PARAM_FLAGS = {
    "theta": "theta",
    "l": "l",
    "s": "s",
    "n": "n",
    "m": "m",
    "k": "k",
    "i": "i",
    "N": "N",
    "variant": "variant",
    "form": "form",
    "n1": "n1",
    "m1": "m1",
    "census_cap": "census_cap",
    "brute_order": "brute_order",
    "n_max": "n_max",
    "l_max": "l_max",
    "fib_max": "fib_max",
}


def _window(args: argparse.Namespace, parser: argparse.ArgumentParser, default_range: int) -> tuple[int, int]:
    lo = -default_range if args.zmin is None else args.zmin
    hi = default_range if args.zmax is None else args.zmax
    if lo > hi:
        parser.error(f"--zmin {lo} exceeds --zmax {hi}")
    return lo, hi


def _order(args: argparse.Namespace, parser: argparse.ArgumentParser, cfg: Dict[str, Any]) -> int:
    order = cfg["series"]["order"] if args.order is None else args.order
    if order < 0:
        parser.error(f"--order must be >= 0, got {order}")
    return int(order)


def _slice_table(series: QSeries, window: tuple[int, int]) -> pd.DataFrame:
    rows = []
    for z in range(window[0], window[1] + 1):
        coeffs = series.q_coefficients(z)
        rows.append({"z": z, "coefficient": format_q_poly((q, c) for q, c in enumerate(coeffs) if c)})
    return pd.DataFrame(rows, columns=["z", "coefficient"])


# -----------------------------------------------------------------------------
# Subcommands
# -----------------------------------------------------------------------------
def cmd_char(args: argparse.Namespace, parser: argparse.ArgumentParser, cfg: Dict[str, Any]) -> int:
    if args.kind == "fib":
        if args.n is None or args.l is None:
            parser.error("char fib needs --n and --l")
        if args.method == "brute":
            poly = fibfinite.char_brute(args.n, args.l, int(cfg["enumeration"]["finite_cap"]))
        else:
            poly = fibfinite.char_recurrence(args.n, args.l)
        print(json.dumps(series_rows(poly.terms)) if args.json else str(poly))
        return 0

    order = _order(args, parser, cfg)
    window = _window(args, parser, cfg["series"]["z_range"])
    if args.kind == "inf":
        if args.theta is None or args.l is None:
            parser.error("char inf needs --theta and --l")
        if args.method == "brute":
            series = fibinfinite.char_brute(args.theta, args.l, order, window, cfg["enumeration"]["window_margin"])
        else:
            series = fibinfinite.char_closed(args.theta, args.l, order, window)
        offset = None
    else:
        if args.i is None or args.N is None:
            parser.error("char voa needs --i and --N")
        shifted = voa_char(args.i, args.N, order, window)
        series, offset = shifted.body, shifted.q_offset

    if args.json:
        doc: Dict[str, Any] = {"order": order, "z_window": list(window), "terms": series_rows(series.coeffs)}
        if offset is not None:
            doc["q_offset"] = str(offset)
        print(json.dumps(doc))
        return 0
    if offset is not None:
        print(f"q^({offset}) *")
    print(_slice_table(series, window).to_string(index=False))
    return 0


def _verify_params(args: argparse.Namespace, identity_id: str) -> Dict[str, Any]:
    names = {p.name for p in CATALOG[identity_id].params}
    params = {}
    for dest, name in PARAM_FLAGS.items():
        value = getattr(args, dest, None)
        if value is not None:
            if name not in names:
                raise ValueError(f"--{dest.replace('_', '-')} does not apply to {identity_id}")
            params[name] = value
    if args.literal:
        if "literal" not in names:
            raise ValueError(f"--literal does not apply to {identity_id}")
        params["literal"] = 1
    return params


def _perturbation(text: str | None, parser: argparse.ArgumentParser) -> tuple[int, int] | None:
    if text is None:
        return None
    try:
        family, delta = (int(tok) for tok in text.split(":"))
    except ValueError:
        parser.error(f"--perturb expects FAMILY:DELTA, got {text!r}")
    return family, delta


def _emit(reports: List[IdentityReport], args: argparse.Namespace) -> None:
    if args.no_timing:
        reports = [r.without_timing() for r in reports]
    lines = "".join(r.to_json() + "\n" for r in reports)
    if args.out:
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(lines, encoding="utf-8")
        print(f"[cli] wrote {len(reports)} reports to {out}", file=sys.stderr)
    else:
        sys.stdout.write(lines)
    if args.summary:
        summary = Path(args.summary)
        summary.parent.mkdir(parents=True, exist_ok=True)
        frame = summary_frame(reports)
        frame.to_csv(summary, index=False)
        print(f"[cli] wrote summary {summary}", file=sys.stderr)
    if reports:
        print(totals_frame(reports).to_string(index=False), file=sys.stderr)


def cmd_verify(args: argparse.Namespace, parser: argparse.ArgumentParser, cfg: Dict[str, Any]) -> int:
    if args.identity != "all" and args.identity not in CATALOG:
        parser.error(f"unknown identity {args.identity!r}; expected 'all' or one of {', '.join(catalog_ids())}")
    order = _order(args, parser, cfg)
    perturb = _perturbation(args.perturb, parser)

    if args.identity == "all":
        suite_cfg = SuiteConfig.from_config(cfg)
        overrides: Dict[str, Any] = {"order": order}
        if args.workers is not None:
            overrides["workers"] = args.workers
        if args.zmin is not None or args.zmax is not None:
            lo, hi = _window(args, parser, suite_cfg.z_range)
            if lo != -hi:
                parser.error("verify all needs a symmetric window (--zmin = -zmax)")
            overrides["z_range"] = hi
        if perturb is not None:
            parser.error("--perturb needs a single identity; use suite.perturb in the config for 'all'")
        reports = run_suite(replace(suite_cfg, **overrides))
    else:
        params = _verify_params(args, args.identity)
        window = None
        if CATALOG[args.identity].bivariate:
            window = _window(args, parser, cfg["series"]["z_range"])
        reports = [run_check(args.identity, params, order, window, perturb)]

    _emit(reports, args)
    return 0 if all(r.match for r in reports) else 1


def cmd_durfee(args: argparse.Namespace, parser: argparse.ArgumentParser, cfg: Dict[str, Any]) -> int:
    if args.action == "classify":
        p = Partition.parse(args.parts)
        cls = durfee_classify(p, args.l, args.n, args.m)
        print(str(cls))
        for text, holds in containment_facts(p, cls):
            print(f"  {text}: {'yes' if holds else 'no'}")
        return 0
    if args.max_n is None or args.max_n < 0:
        parser.error("durfee census needs --max-n >= 0")
    cap = int(cfg["enumeration"]["partition_cap"])
    table = durfee_census(args.l, args.n, args.m, args.max_n, cap)
    print(table.to_string(index=False))
    return 0


def cmd_render(args: argparse.Namespace, parser: argparse.ArgumentParser, cfg: Dict[str, Any]) -> int:
    cell, margin = int(cfg["render"]["cell"]), int(cfg["render"]["margin"])
    if args.figure == "durfee":
        svg = render_partition_svg(Partition.parse(args.parts), args.l, args.n, args.m, cell, margin)
    else:
        if args.kmax is None:
            parser.error("render family needs --kmax")
        svg = render_family_svg(args.l, args.n, args.m, args.kmax, cell, margin)
    write_svg(svg, args.out)
    return 0


# -----------------------------------------------------------------------------
# Parser
# -----------------------------------------------------------------------------
def _window_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--order", type=int, default=None, help="Truncation order D (default: config / FIBCFG_ORDER).")
    p.add_argument("--zmin", type=int, default=None, help="Lowest z exponent of the window.")
    p.add_argument("--zmax", type=int, default=None, help="Highest z exponent of the window.")


def _shift_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--l", type=int, default=1, help="Rectangle slope parameter l (width step l+1).")
    p.add_argument("--n", type=int, default=0, help="Row shift n.")
    p.add_argument("--m", type=int, default=0, help="Column shift m.")


def _build_argparser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fibcfg", description="Fibonacci configuration characters and Durfee identities.")
    ap.add_argument("--config", default=None, help="Path to config.yaml (default: repo root).")
    sub = ap.add_subparsers(dest="command", required=True)

    char = sub.add_parser("char", help="Print a character.")
    char.add_argument("kind", choices=["fib", "inf", "voa"])
    char.add_argument("--n", type=int, default=None)
    char.add_argument("--l", type=int, default=None)
    char.add_argument("--theta", type=int, default=None)
    char.add_argument("--i", type=int, default=None)
    char.add_argument("--N", type=int, default=None)
    char.add_argument("--method", choices=["closed", "brute"], default="closed", help="brute: exhaustive enumeration.")
    char.add_argument("--json", action="store_true", help="Emit [[zExp, qExp, coeff], ...] instead of text.")
    _window_flags(char)

    verify = sub.add_parser("verify", help="Run identity checks.")
    verify.add_argument("identity", help="Catalog id or 'all'.")
    _window_flags(verify)
    for dest in PARAM_FLAGS:
        kind = str if dest == "form" else int
        verify.add_argument(f"--{dest.replace('_', '-')}", dest=dest, type=kind, default=None)
    verify.add_argument("--literal", action="store_true", help="final-theta-zero: use the z^i prefactor.")
    verify.add_argument("--perturb", default=None, metavar="FAMILY:DELTA", help="Shift one right-hand family.")
    verify.add_argument("--workers", type=int, default=None)
    verify.add_argument("--out", default=None, help="Write JSON lines here instead of stdout.")
    verify.add_argument("--summary", default=None, help="Write a CSV summary here.")
    verify.add_argument("--no-timing", action="store_true", help="Zero elapsed_ms (byte-stable output).")

    durfee = sub.add_parser("durfee", help="Durfee rectangle classification.")
    durfee.add_argument("action", choices=["classify", "census"])
    durfee.add_argument("--parts", default="", help="Comma-separated weakly decreasing parts, e.g. 4,3,1.")
    durfee.add_argument("--max-n", dest="max_n", type=int, default=None)
    _shift_flags(durfee)

    render = sub.add_parser("render", help="Write a Durfee dissection SVG.")
    render.add_argument("figure", choices=["durfee", "family"])
    render.add_argument("--parts", default="")
    render.add_argument("--kmax", type=int, default=None)
    render.add_argument("--out", required=True)
    _shift_flags(render)
    return ap


COMMANDS = {"char": cmd_char, "verify": cmd_verify, "durfee": cmd_durfee, "render": cmd_render}


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_argparser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config)
        return COMMANDS[args.command](args, parser, cfg)
    except (FibcfgError, ValueError, OSError) as exc:
        print(f"[cli] error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
