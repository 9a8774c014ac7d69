"""Command-line interface.

Every subcommand builds a list of flat records and renders them as an
aligned table (7 significant digits), CSV or JSON (full precision).

Exit codes: 0 success, 1 usage error, 2 domain or data error.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import io
import json
import sys
from dataclasses import dataclass
from typing import Any, Sequence

from . import __version__
from .dataio import analyze, demo_records, load_dataset, parse_filter, write_dataset
from .errors import PropintError
from .evaluation import FIGURE_METHODS, SweepGrid, coverage_curve, margin_profile, p_grid, sweep
from .intervals import METHODS, Counts, compute_interval, rule_of_thumb, stat_quadratic_closed, stat_quadratic_form
from .numerics import as_level
from .recommend import recommend
from .simulation import default_seed, limit_check, simulate_coverage

FIGURE_IDS = ("margins-vs-n", "coverage-vs-p", "me-vs-p", "coverage-vs-n", "me-vs-n")
FIGURE_LEVELS = (0.90, 0.95, 0.99)
FORMATS = ("table", "csv", "json")

Record = dict[str, Any]


class UsageError(Exception):
    pass


@dataclass
class CommandResult:
    exit_code: int
    stdout_payload: str
    stderr: str = ""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


# ---------------------------------------------------------------------------
# argument helpers


def _int_list(text: str) -> list[int]:
    """``"10,20"`` or an inclusive range ``"5:100"`` / ``"5:100:5"``."""
    out: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if ":" in part:
            bits = [int(b) for b in part.split(":")]
            if len(bits) not in (2, 3) or (len(bits) == 3 and bits[2] <= 0):
                raise argparse.ArgumentTypeError(f"bad range {part!r}")
            step = bits[2] if len(bits) == 3 else 1
            out.extend(range(bits[0], bits[1] + 1, step))
        elif part:
            out.append(int(part))
    if not out:
        raise argparse.ArgumentTypeError(f"empty list {text!r}")
    return out


def _float_list(text: str) -> list[float]:
    """``"0.1,0.2"`` or an inclusive grid ``"start:stop:step"``."""
    out: list[float] = []
    for part in text.split(","):
        part = part.strip()
        if ":" in part:
            bits = [float(b) for b in part.split(":")]
            if len(bits) != 3 or bits[2] <= 0:
                raise argparse.ArgumentTypeError(f"grid {part!r} must be start:stop:step")
            start, stop, step = bits
            count = int(round((stop - start) / step))
            out.extend(round(start + i * step, 12) for i in range(count + 1))
        elif part:
            out.append(float(part))
    if not out:
        raise argparse.ArgumentTypeError(f"empty list {text!r}")
    return out


def _methods(values: list[str] | None, default: Sequence[str]) -> list[str]:
    if not values:
        return list(default)
    out: list[str] = []
    for v in values:
        for m in v.split(","):
            m = m.strip()
            if m == "all":
                out.extend(METHODS)
            elif m in METHODS:
                out.append(m)
            elif m:
                raise UsageError(f"unknown method {m!r}; choose from {', '.join(METHODS)} or all")
    return list(dict.fromkeys(out))


# ---------------------------------------------------------------------------
# rendering


def _cell_text(value: Any, table: bool) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.7g}" if table else repr(value)
    if value is None:
        return ""
    return str(value)


def render(records: list[Record], fmt: str, columns: Sequence[str] | None = None) -> str:
    cols = list(columns) if columns else (list(records[0]) if records else [])
    if fmt == "json":
        return json.dumps([{c: r.get(c) for c in cols} for r in records], indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(cols)
        for r in records:
            writer.writerow([_cell_text(r.get(c), table=False) for c in cols])
        return buf.getvalue()
    rows = [[_cell_text(r.get(c), table=True) for c in cols] for r in records]
    widths = [max([len(c)] + [len(row[i]) for row in rows]) for i, c in enumerate(cols)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(cols, widths)).rstrip()]
    lines += ["  ".join(v.ljust(w) for v, w in zip(row, widths)).rstrip() for row in rows]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# commands


def _cmd_ci(args) -> list[Record]:
    counts = Counts(args.n, args.k)
    rows = []
    for m in _methods(args.methods, ["quadratic"]):
        opts = {"wald_cc_form": args.wald_cc_form} if m == "wald_cc" else {}
        iv = compute_interval(m, counts, args.level, **opts)
        rows.append({
            "method": m, "level": iv.level.level, "n": counts.n, "k": counts.k,
            "lower": iv.lower, "upper": iv.upper,
            "degenerate": iv.degenerate, "overshoot": iv.overshoot,
        })
    return rows


def _cmd_stat(args) -> list[Record]:
    if args.sequence is not None:
        bits = [int(b) for b in args.sequence.replace(",", " ").split()]
        value = stat_quadratic_form(bits, args.p)
        return [{"n": len(bits), "k": sum(bits), "p": args.p, "statistic": value, "form": "pairwise"}]
    if args.n is None or args.k is None:
        raise UsageError("stat needs --n and --k, or --sequence")
    value = stat_quadratic_closed(Counts(args.n, args.k), args.p)
    return [{"n": args.n, "k": args.k, "p": args.p, "statistic": value, "form": "closed"}]


def _cmd_coverage(args) -> list[Record]:
    methods = _methods(args.methods, FIGURE_METHODS)
    if args.simulate:
        rows = []
        seed = default_seed() if args.seed is None else args.seed
        for m in methods:
            for lv in args.levels:
                for n in args.n:
                    for p in args.p:
                        rep = simulate_coverage(m, n, p, lv, args.reps, seed)
                        exact, _ = coverage_curve(m, n, p, lv)
                        rows.append({
                            "method": m, "level": rep.level.level, "n": n, "p": p,
                            "replications": rep.replications, "seed": rep.seed,
                            "empirical_coverage": rep.empirical_coverage,
                            "standard_error": rep.standard_error,
                            "exact_coverage": float(exact[0]),
                        })
        return rows
    grid = SweepGrid(args.n, args.p, args.levels, methods)
    return [
        {"method": pt.method, "level": pt.level.level, "n": pt.n, "p": pt.p,
         "coverage": pt.coverage, "expected_me": pt.expected_me}
        for pt in sweep(grid)
    ]


def _cmd_expected_me(args) -> list[Record]:
    grid = SweepGrid(args.n, args.p, args.levels, _methods(args.methods, FIGURE_METHODS))
    return [
        {"method": pt.method, "level": pt.level.level, "n": pt.n, "p": pt.p,
         "expected_me": pt.expected_me}
        for pt in sweep(grid)
    ]


def _cmd_margin_profile(args) -> list[Record]:
    rows = []
    lv = as_level(args.level)
    for m in _methods(args.methods, ["wald", "quadratic"]):
        for n in args.n:
            for pq in args.pq_grid:
                rows.append({"method": m, "level": lv.level, "n": n, "pq": pq,
                             "margin": margin_profile(m, n, pq, lv)})
    return rows


def _cmd_recommend(args) -> list[Record]:
    rec = recommend(args.n, args.p, args.level)
    return [{
        "n": args.n, "p": args.p, "level": rec.level.level, "preferred": rec.preferred,
        "acceptable": ";".join(sorted(rec.acceptable)), "rule": rec.rationale, "caveat": rec.caveat,
    }]


def _cmd_analyze(args) -> list[Record]:
    if args.input == "-":
        records = load_dataset(sys.stdin.buffer)
    else:
        records = load_dataset(args.input)
    filters = [parse_filter(f) for f in args.filter] if args.filter else [{}]
    rows = []
    for row in analyze(records, filters, _methods(args.methods, ["wald", "quadratic"]), args.level):
        iv = row.interval
        rows.append({
            "filter": ",".join(f"{c}={v}" for c, v in row.filter.items()) or "(all)",
            "n": row.counts.n, "k": row.counts.k, "method": row.method,
            "lower": iv.lower if iv else None, "upper": iv.upper if iv else None,
            "degenerate": iv.degenerate if iv else None, "overshoot": iv.overshoot if iv else None,
            "error": row.error,
        })
    return rows


def _cmd_rules(args) -> list[Record]:
    return [
        {"rule": r.name, "value": r.value, "threshold": r.threshold, "holds": r.holds}
        for r in rule_of_thumb(Counts(args.n, args.k), args.p)
    ]


def _cmd_limit(args) -> list[Record]:
    rows = []
    for n in args.n:
        rep = limit_check(n, args.p)
        rows.append({"n": n, "p": args.p, "sup_distance": rep.sup_distance,
                     "l1_diagnostic": rep.l1_diagnostic, "support_size": len(rep.support)})
    return rows


def figure_records(figure_id: str, level: float) -> tuple[list[Record], list[str]]:
    """Records and column order for one of :data:`FIGURE_IDS`."""
    lv = as_level(level)
    if figure_id == "margins-vs-n":
        pq_values = [round(i * 0.0025, 12) for i in range(101)]
        rows = [
            {"method": m, "level": lv.level, "n": n, "pq": pq, "margin": margin_profile(m, n, pq, lv)}
            for m in ("wald", "quadratic")
            for n in range(5, 101)
            for pq in pq_values
        ]
        return rows, ["method", "level", "n", "pq", "margin"]
    if figure_id in ("coverage-vs-p", "me-vs-p"):
        grid = SweepGrid((10, 20, 30, 100), p_grid(0.001), [lv], FIGURE_METHODS)
    elif figure_id in ("coverage-vs-n", "me-vs-n"):
        grid = SweepGrid(range(5, 101), (0.01, 0.05, 0.1, 0.2), [lv], FIGURE_METHODS)
    else:
        raise UsageError(f"unknown figure id {figure_id!r}; choose from {', '.join(FIGURE_IDS)}")
    rows = [
        {"method": pt.method, "level": pt.level.level, "n": pt.n, "p": pt.p,
         "coverage": pt.coverage, "expected_me": pt.expected_me}
        for pt in sweep(grid)
    ]
    return rows, ["method", "level", "n", "p", "coverage", "expected_me"]


def emit_figure_data(figure_id: str, level: float) -> str:
    """CSV payload for external plotting of one figure."""
    if level not in FIGURE_LEVELS:
        raise UsageError(f"figure level must be one of {FIGURE_LEVELS}, got {level!r}")
    rows, cols = figure_records(figure_id, level)
    return render(rows, "csv", cols)


def _cmd_demo_data(args) -> str:
    buf = io.StringIO()
    write_dataset(demo_records(args.seed), buf)
    return buf.getvalue()


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=FORMATS, default=argparse.SUPPRESS)
    common.add_argument("--output", metavar="FILE", default=argparse.SUPPRESS)

    parser = _Parser(prog="propint", description="Binomial proportion confidence intervals.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--format", choices=FORMATS, default=None)
    parser.add_argument("--output", metavar="FILE", default=None)
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    def add(name, help_text):
        return sub.add_parser(name, help=help_text, parents=[common])

    method_help = f"method(s), repeatable or comma separated: {', '.join(METHODS)}, all"

    p = add("ci", "confidence interval(s) for one observation")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--level", type=float, default=0.95)
    p.add_argument("--method", "--methods", dest="methods", action="append", help=method_help)
    p.add_argument("--wald-cc-form", choices=("inner", "classical"), default="inner")
    p.set_defaults(func=_cmd_ci)

    p = add("stat", "quadratic-form statistic at a hypothesised p")
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--sequence", help="0/1 outcomes; uses the pairwise-sum form")
    p.set_defaults(func=_cmd_stat)

    for name, func, help_text in (
        ("coverage", _cmd_coverage, "coverage probability over a grid"),
        ("expected-me", _cmd_expected_me, "expected margin of error over a grid"),
    ):
        p = add(name, help_text)
        p.add_argument("--method", "--methods", dest="methods", action="append", help=method_help)
        p.add_argument("--n", "--n-list", dest="n", type=_int_list, required=True)
        p.add_argument("--p", "--p-grid", dest="p", type=_float_list, required=True)
        p.add_argument("--level", "--levels", dest="levels", type=_float_list, default=[0.95])
        if name == "coverage":
            mode = p.add_mutually_exclusive_group()
            mode.add_argument("--exact", action="store_true", default=True)
            mode.add_argument("--simulate", action="store_true")
            p.add_argument("--reps", type=int, default=10_000)
            p.add_argument("--seed", type=int, default=None)
        p.set_defaults(func=func)

    p = add("margin-profile", "half-width as a function of p_hat*q_hat")
    p.add_argument("--method", "--methods", dest="methods", action="append")
    p.add_argument("--n", type=_int_list, required=True)
    p.add_argument("--pq-grid", type=_float_list, required=True)
    p.add_argument("--level", type=float, default=0.95)
    p.set_defaults(func=_cmd_margin_profile)

    p = add("recommend", "suggest a method for (n, p)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--level", type=float, default=0.95)
    p.set_defaults(func=_cmd_recommend)

    p = add("analyze", "subgroup intervals from a subject-level CSV")
    p.add_argument("--input", required=True, metavar="FILE", help="CSV path, or - for stdin")
    p.add_argument("--filter", action="append", help="col=val[,col=val]; repeatable")
    p.add_argument("--method", "--methods", dest="methods", action="append", help=method_help)
    p.add_argument("--level", type=float, default=0.95)
    p.set_defaults(func=_cmd_analyze)

    p = add("rules", "normal-approximation rules of thumb")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--p", type=float, default=None, help="true p if known (default p_hat)")
    p.set_defaults(func=_cmd_rules)

    p = add("limit", "distance of the statistic's exact law from chi-square(1)")
    p.add_argument("--n", type=_int_list, required=True)
    p.add_argument("--p", type=float, required=True)
    p.set_defaults(func=_cmd_limit)

    p = add("figure", "emit plotting data for a figure")
    p.add_argument("--id", dest="figure_id", choices=FIGURE_IDS, required=True)
    p.add_argument("--level", type=float, choices=FIGURE_LEVELS, default=0.95)
    p.set_defaults(func=None)

    p = add("demo-data", "write the synthetic subject-level CSV fixture")
    p.add_argument("--seed", type=int, default=5)
    p.set_defaults(func=None)
    return parser


def execute(argv: Sequence[str]) -> CommandResult:
    """Run one command line and capture its payload instead of printing it."""
    parser = build_parser()
    out = io.StringIO()
    try:
        with contextlib.redirect_stdout(out):
            args = parser.parse_args(list(argv))
    except UsageError as exc:
        return CommandResult(1, "", f"{exc}\n")
    except SystemExit as exc:
        # --help / --version
        return CommandResult(int(exc.code or 0), out.getvalue())

    try:
        if args.command == "figure":
            fmt = args.format or "csv"
            rows, cols = figure_records(args.figure_id, args.level)
            payload = render(rows, fmt, cols)
        elif args.command == "demo-data":
            payload = _cmd_demo_data(args)
        else:
            payload = render(args.func(args), args.format or "table")
    except UsageError as exc:
        return CommandResult(1, "", f"propint {args.command}: error: {exc}\n")
    except (PropintError, ArithmeticError, OSError) as exc:
        return CommandResult(2, "", f"propint {args.command}: {exc}\n")

    if args.output:
        try:
            with open(args.output, "w", encoding="utf-8", newline="") as fh:
                fh.write(payload)
        except OSError as exc:
            return CommandResult(2, "", f"propint: cannot write {args.output}: {exc}\n")
        return CommandResult(0, "")
    return CommandResult(0, payload)


def main(argv: Sequence[str] | None = None) -> int:
    result = execute(sys.argv[1:] if argv is None else argv)
    sys.stdout.write(result.stdout_payload)
    sys.stderr.write(result.stderr)
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
