"""Command-line interface.

Commands
--------
test
    Run one test on CSV data and print both approximations.
simulate
    Size/power study for a scenario configuration or shipped preset (TSV).
histogram
    Null-distribution samples of one scenario, one value per line.
moment-check
    Exact moments against Monte Carlo and the log-MGF limit.

Exit status is 0 on success, 1 when a requested check fails and 2 on
invalid input.
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import math
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import checks, lrt
from .approximations import clt_params, evaluate
from .config import PRESETS, load_scenarios, parse_moment_queries
from .design import TestKind
from .errors import EmptyInput, HdlrtError, ParseError
from .moments import log_moment
from .sim import export_standardized_samples, run_scenario

log = logging.getLogger("hdlrt")

TSV_COLUMNS = ("scenario", "kind", "shape", "size_clt", "size_chisq", "power_clt",
               "power_chisq", "stderr", "excluded_count", "seed")


def fmt(x) -> str:
    """Round-trippable decimal text (17 significant digits)."""
    if x is None:
        return "NA"
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return "NA"
    return "%.17g" % x


# ----------------------------------------------------------------------------
# CSV


def _parse_float(text: str) -> float:
    value = float(text)
    if not math.isfinite(value):
        raise ValueError(text)
    return value


def ingest_csv(path) -> np.ndarray:
    """Read comma-separated numbers, one observation per row.

    A first row that does not parse as numbers is taken as a header.

    Raises
    ------
    EmptyInput
        If there are no data rows.
    ParseError
        On a ragged row or a non-numeric field, with its 1-based row and
        column.
    """
    with open(path, newline="", encoding="utf-8-sig") as fh:
        text = fh.read()
    rows = [(i, r) for i, r in enumerate(csv.reader(io.StringIO(text)), start=1)
            if r and any(c.strip() for c in r)]
    if rows:
        try:
            [_parse_float(c) for c in rows[0][1]]
        except ValueError:
            rows = rows[1:]
    if not rows:
        raise EmptyInput(f"{path}: no data rows")
    width = len(rows[0][1])
    out = np.empty((len(rows), width))
    for r, (lineno, cells) in enumerate(rows):
        if len(cells) != width:
            raise ParseError(f"{path}: row {lineno} has {len(cells)} fields, expected {width}")
        for c, cell in enumerate(cells):
            try:
                out[r, c] = _parse_float(cell.strip())
            except ValueError:
                raise ParseError(f"{path}: row {lineno}, column {c + 1}: "
                                 f"not a finite number: {cell!r}") from None
    return out


def write_csv(path, data) -> None:
    """Write a matrix as CSV with 17 significant digits (bit-exact round trip)."""
    x = np.atleast_2d(np.asarray(data, dtype=np.float64))
    with open(path, "w", encoding="utf-8", newline="") as fh:
        for row in x:
            fh.write(",".join("%.17g" % v for v in row) + "\n")


# ----------------------------------------------------------------------------
# commands


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _ints(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ParseError(f"expected comma-separated integers, got {text!r}") from None


def cmd_test(args) -> int:
    kind = TestKind.parse(args.kind)
    if kind.grouped:
        if not args.groups:
            raise ParseError(f"{kind.value} needs --groups f1.csv,f2.csv,...")
        groups = [ingest_csv(p) for p in args.groups.split(",") if p]
        stat = (lrt.stat_equal_distributions(groups) if kind is TestKind.EQUAL_DISTRIBUTIONS
                else lrt.stat_equal_covariances(groups))
    else:
        if not args.data:
            raise ParseError(f"{kind.value} needs --data file.csv")
        data = ingest_csv(args.data)
        if kind is TestKind.SPHERICITY:
            stat = lrt.stat_sphericity(data)
        elif kind is TestKind.BLOCK_INDEPENDENCE:
            if not args.blocks:
                raise ParseError("block-independence needs --blocks p1,p2,...")
            stat = lrt.stat_block_independence(data, _ints(args.blocks))
        elif kind is TestKind.SPECIFIED:
            if not (args.mu0 and args.sigma0):
                raise ParseError("specified needs --mu0 file and --sigma0 file")
            mu0 = ingest_csv(args.mu0).reshape(-1)
            stat = lrt.stat_specified(data, mu0, ingest_csv(args.sigma0))
        else:
            stat = lrt.stat_complete_independence(data)
    res = evaluate(stat, force_domain=args.force_domain)
    lines = [("kind", kind.value), ("shape", stat.shape.describe()), ("n", stat.n),
             ("p", stat.p), ("alpha", args.alpha), ("log_statistic", stat.value)]
    if res.clt is not None:
        lines += [("clt_center", res.clt.center), ("clt_scale", res.clt.scale),
                  ("clt_domain_ok", res.clt.theorem_domain_ok),
                  ("clt_z", res.z), ("clt_p_value", res.p_clt),
                  ("clt_reject", res.reject_clt(args.alpha))]
    else:
        lines += [("clt_center", None), ("clt_scale", None), ("clt_domain_ok", False),
                  ("clt_z", None), ("clt_p_value", None), ("clt_reject", None)]
    lines += [("chisq_rho", res.chisq.rho), ("chisq_f", res.chisq.f),
              ("chisq_multiplier", res.chisq.multiplier),
              ("chisq_form", res.chisq.multiplier_form),
              ("chisq_statistic", res.chisq_statistic), ("chisq_p_value", res.p_chisq),
              ("chisq_reject", res.reject_chisq(args.alpha))]
    lines += [("warning", w) for w in res.warnings]
    _emit("".join(f"{k}\t{v if isinstance(v, str) else fmt(v)}\n" for k, v in lines), args.out)
    return 0


def _scenarios(args):
    source = args.preset or args.config
    if not source:
        raise ParseError("give --config FILE or --preset NAME")
    scenarios = load_scenarios(source)
    if getattr(args, "only", None):
        wanted = set(args.only.split(","))
        scenarios = [s for s in scenarios if s.name in wanted]
        if not scenarios:
            raise ParseError(f"no scenario matches --only {args.only}")
    out = []
    for i, s in enumerate(scenarios):
        changes = {}
        if args.iterations is not None:
            changes["iterations"] = args.iterations
        if args.seed is not None:
            changes["seed"] = args.seed + i
        if args.alpha is not None:
            changes["alpha"] = args.alpha
        out.append(replace(s, **changes) if changes else s)
    return out


def _forced_warnings(s) -> list[str]:
    """Violated sample-size conditions of a scenario run with ``--force-domain``."""
    try:
        return list(clt_params(s.kind, s.shape, force=True).warnings)
    except HdlrtError as exc:
        return [str(exc)]


def cmd_simulate(args) -> int:
    rows = ["\t".join(TSV_COLUMNS)]
    notes = []
    for s in _scenarios(args):
        if args.force_domain:
            notes += [f"# {s.name}: {w}" for w in _forced_warnings(s)]
        rep = run_scenario(s, workers=args.workers, force_domain=args.force_domain)
        log.info("%s done in %.1fs", s.name, rep.wall_time)
        rows.append("\t".join([s.name, s.kind.value, s.shape.describe(), fmt(rep.size_clt),
                               fmt(rep.size_chisq), fmt(rep.power_clt), fmt(rep.power_chisq),
                               fmt(rep.max_stderr), fmt(rep.excluded_count), fmt(s.seed)]))
    _emit("\n".join(rows + notes) + "\n", args.out)
    return 0


def cmd_histogram(args) -> int:
    scenarios = _scenarios(args)
    match = [s for s in scenarios if s.name == args.scenario] if args.scenario else scenarios[:1]
    if not match:
        raise ParseError(f"no scenario named {args.scenario!r}; have "
                         + ", ".join(s.name for s in scenarios))
    if args.force_domain:
        for w in _forced_warnings(match[0]):
            print(f"warning: {match[0].name}: {w}", file=sys.stderr)
    samples = export_standardized_samples(match[0], workers=args.workers,
                                          force_domain=args.force_domain)
    values = samples.z if args.form == "clt" else samples.chisq
    _emit("".join(fmt(v) + "\n" for v in values), args.out)
    return 0


def cmd_moment_check(args) -> int:
    queries = checks.DEFAULT_MC_SUITE
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            queries = parse_moment_queries(fh.read())
        # surface exponent-domain violations before any sampling
        for kind, shape, exps in queries:
            for t in exps:
                log_moment(kind, shape, t)
    lines = ["suite\tkind\tshape\tparameter\texpected\tobserved\tstderr_or_limit\tpass"]
    ok = True
    if args.draws > 0:
        for c in checks.monte_carlo_suite(queries, draws=args.draws, seed=args.seed or 0):
            ok &= c.passed
            lines.append("\t".join(["monte-carlo", c.kind.value, c.shape.describe(), fmt(c.t),
                                    fmt(c.formula), fmt(c.estimate), fmt(c.stderr),
                                    fmt(c.passed)]))
    if args.s is not None:
        s_values = tuple(float(v) for v in args.s.split(","))
    else:
        s_values = checks.DEFAULT_MGF_S
    for m in checks.mgf_suite(s_values=s_values):
        ok &= m.passed
        devs = ",".join(fmt(d) for _, d in m.deviations)
        lines.append("\t".join(["mgf", m.kind.value, ";".join(sh.describe() for sh, _ in m.deviations),
                                fmt(m.s), "0", devs, fmt(m.limit), fmt(m.passed)]))
    worst = max(abs(float(line.split("\t")[5].split(",")[-1])) for line in lines[1:]
                if line.startswith("mgf"))
    lines.append(f"# max final mgf deviation {fmt(worst)}; overall {'pass' if ok else 'FAIL'}")
    _emit("\n".join(lines) + "\n", args.out)
    return 0 if ok else 1


# ----------------------------------------------------------------------------
# argument parsing


def _alpha(text: str) -> float:
    a = float(text)
    if not 0.0 < a < 1.0:
        raise argparse.ArgumentTypeError(f"alpha must lie in (0, 1), got {text}")
    return a


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hdlrt", description=__doc__.split("\n\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("test", help="run one test on CSV data")
    p.add_argument("kind", choices=[k.value for k in TestKind])
    p.add_argument("--data")
    p.add_argument("--groups", help="comma-separated CSV files, one per group")
    p.add_argument("--blocks", help="block sizes, e.g. 2,2,1")
    p.add_argument("--mu0", help="CSV holding the hypothesized mean")
    p.add_argument("--sigma0", help="CSV holding the hypothesized covariance")
    p.add_argument("--alpha", type=_alpha, default=0.05)
    p.add_argument("--force-domain", action="store_true",
                   help="evaluate the normal approximation outside its sample-size range")
    p.add_argument("--out")
    p.set_defaults(func=cmd_test)

    def scenario_args(q):
        src = q.add_mutually_exclusive_group()
        src.add_argument("--config", help="scenario configuration file")
        src.add_argument("--preset", choices=PRESETS)
        q.add_argument("--iterations", type=int)
        q.add_argument("--seed", type=int, help="base seed; scenario i uses seed + i")
        q.add_argument("--alpha", type=_alpha)
        q.add_argument("--workers", type=int, default=1)
        q.add_argument("--force-domain", action="store_true")
        q.add_argument("--out")

    p = sub.add_parser("simulate", help="size/power study (TSV)")
    scenario_args(p)
    p.add_argument("--only", help="comma-separated scenario ids")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("histogram", help="null samples of one scenario, one per line")
    scenario_args(p)
    p.add_argument("--scenario", help="scenario id (default: first)")
    p.add_argument("--form", choices=("clt", "chisq"), default="clt")
    p.set_defaults(func=cmd_histogram)

    p = sub.add_parser("moment-check", help="exact moments vs Monte Carlo and MGF limits")
    p.add_argument("--config", help="moment entries (kind, n, p, blocks, t)")
    p.add_argument("--draws", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--s", help="comma-separated MGF arguments")
    p.add_argument("--out")
    p.set_defaults(func=cmd_moment_check)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except HdlrtError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
