"""Command-line interface.

Subcommands: ``test`` (conditional mean), ``qtest`` (conditional quantile),
``ftest`` (two-factor designs), ``screen`` (gene-set screening with FDR
control), ``simulate`` (Monte Carlo size/power tables).  Results are JSON
by default (``--format table`` for aligned text); seeds and configuration
are echoed into the output for provenance.

Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .bootstrap import BootstrapPlan, bootstrap_mean_test, bootstrap_quantile_test
from .data import read_dataset, read_gene_sets
from .exceptions import MddTestError
from .factorial import CellTable, factorial_mean_test
from .mean import mean_independence_test
from .quantile import quantile_independence_test
from .screening import screen_gene_sets
from .simulate import (
    SimulationConfig,
    monte_carlo_table,
    render_table_row,
    table_row_json_line,
)

__all__ = ["run_cli", "main"]

_USAGE_EXIT = 1
_DATA_EXIT = 2


class _Parser(argparse.ArgumentParser):
    """Argument parser whose usage failures exit with code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(_USAGE_EXIT, f"{self.prog}: error: {message}\n")


def _add_io_flags(parser):
    parser.add_argument("--out", help="write output to this path instead of stdout")
    parser.add_argument(
        "--format", choices=("json", "table"), default="json", help="output format"
    )


def _add_data_flags(parser):
    parser.add_argument("data", help="delimited text file with a header row")
    parser.add_argument("--response", required=True, help="response column name or index")
    parser.add_argument("--delimiter", default=",", help="cell delimiter (default comma)")


def _add_bootstrap_flags(parser):
    parser.add_argument(
        "--bootstrap",
        type=int,
        metavar="B",
        help="calibrate by wild bootstrap with B draws instead of the normal tail",
    )
    parser.add_argument(
        "--multiplier",
        choices=("gaussian", "rademacher"),
        default="gaussian",
        help="bootstrap multiplier law",
    )
    parser.add_argument("--seed", type=int, default=0, help="root seed")


def build_parser() -> _Parser:
    parser = _Parser(prog="mddtest", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_test = sub.add_parser("test", help="conditional mean independence test")
    _add_data_flags(p_test)
    _add_bootstrap_flags(p_test)
    p_test.add_argument("--alpha", type=float, default=0.05, help="rejection level")
    _add_io_flags(p_test)

    p_qtest = sub.add_parser("qtest", help="conditional quantile independence test")
    _add_data_flags(p_qtest)
    p_qtest.add_argument("--tau", type=float, required=True, help="quantile level in (0, 1)")
    _add_bootstrap_flags(p_qtest)
    p_qtest.add_argument("--alpha", type=float, default=0.05, help="rejection level")
    _add_io_flags(p_qtest)

    p_ftest = sub.add_parser("ftest", help="factorial-design mean independence test")
    _add_data_flags(p_ftest)
    p_ftest.add_argument(
        "--cell-col",
        action="append",
        required=True,
        metavar="COLUMN",
        help="factor column (repeat for a second factor); excluded from the covariates",
    )
    p_ftest.add_argument(
        "--cell-adjustment",
        action="store_true",
        help="apply the per-cell finite-sample variance factor",
    )
    p_ftest.add_argument("--alpha", type=float, default=0.05, help="rejection level")
    _add_io_flags(p_ftest)

    p_screen = sub.add_parser("screen", help="gene-set screening with FDR control")
    _add_data_flags(p_screen)
    p_screen.add_argument("--sets", required=True, help="tab-separated gene-set file")
    p_screen.add_argument("--fdr", type=float, default=0.05, help="FDR level")
    p_screen.add_argument(
        "--method", choices=("mean", "quantile"), default="mean", help="per-set test"
    )
    p_screen.add_argument("--tau", type=float, help="quantile level for --method quantile")
    _add_bootstrap_flags(p_screen)
    _add_io_flags(p_screen)

    p_sim = sub.add_parser("simulate", help="Monte Carlo size/power table")
    p_sim.add_argument("--config", help="JSON file with SimulationConfig fields")
    p_sim.add_argument("--dgp", help="data-generating process name")
    p_sim.add_argument("--n", type=int)
    p_sim.add_argument("--p", type=int)
    p_sim.add_argument("--T", type=int, default=10)
    p_sim.add_argument("--reps", type=int, default=1000)
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument("--beta-mode", default="null")
    p_sim.add_argument("--beta-norm", type=float, default=0.06)
    p_sim.add_argument("--tau", type=float)
    p_sim.add_argument("--error", default="normal")
    p_sim.add_argument(
        "--error-params", default="", help="comma-separated law parameters, e.g. '0,4'"
    )
    p_sim.add_argument(
        "--alpha",
        type=float,
        action="append",
        help="rejection level (repeatable; default 0.05 and 0.10)",
    )
    p_sim.add_argument("--bootstrap", type=int, metavar="B", help="bootstrap draws")
    p_sim.add_argument(
        "--multiplier", choices=("gaussian", "rademacher"), default="gaussian"
    )
    _add_io_flags(p_sim)

    return parser


def _emit(args, text: str) -> None:
    if args.out:
        with open(args.out, "w") as handle:
            handle.write(text + "\n")
    else:
        print(text)


def _response_key(dataset_header_free: str):
    try:
        return int(dataset_header_free)
    except ValueError:
        return dataset_header_free


def _load(args):
    return read_dataset(args.data, _response_key(args.response), delimiter=args.delimiter)


def _result_payload(args, result, method: str) -> dict:
    payload = {
        "command": args.command,
        "method": method,
        "input": args.data,
        "response": args.response,
        "statistic": result.statistic,
        "p_value": result.p_value,
        "n": result.n,
        "p": result.p,
        "mdd_sum": result.mdd_sum,
        "variance_estimate": result.variance_estimate,
        "calibration": result.calibration,
        "alpha": args.alpha,
        "reject": bool(result.p_value <= args.alpha),
    }
    if getattr(args, "bootstrap", None):
        payload["bootstrap_draws"] = args.bootstrap
        payload["multiplier"] = args.multiplier
        payload["seed"] = args.seed
    return payload


def _render_kv_table(payload: dict) -> str:
    width = max(len(k) for k in payload)
    lines = []
    for key, value in payload.items():
        if isinstance(value, float):
            value = f"{value:.6g}"
        lines.append(f"{key.ljust(width)}  {value}")
    return "\n".join(lines)


def _finish(args, payload: dict) -> int:
    if args.format == "table":
        _emit(args, _render_kv_table(payload))
    else:
        _emit(args, json.dumps(payload, separators=(", ", ": ")))
    return 0


def _cmd_test(args, parser) -> int:
    if not 0.0 < args.alpha < 1.0:
        parser.error(f"--alpha must lie in (0, 1), got {args.alpha}")
    ds = _load(args)
    if args.bootstrap:
        plan = BootstrapPlan(draws=args.bootstrap, multiplier=args.multiplier, seed=args.seed)
        result = bootstrap_mean_test(ds.X, ds.y, plan)
    else:
        result = mean_independence_test(ds.X, ds.y)
    return _finish(args, _result_payload(args, result, "mdd-mean"))


def _cmd_qtest(args, parser) -> int:
    if not 0.0 < args.tau < 1.0:
        parser.error(f"--tau must lie in (0, 1), got {args.tau}")
    if not 0.0 < args.alpha < 1.0:
        parser.error(f"--alpha must lie in (0, 1), got {args.alpha}")
    ds = _load(args)
    if args.bootstrap:
        plan = BootstrapPlan(draws=args.bootstrap, multiplier=args.multiplier, seed=args.seed)
        result = bootstrap_quantile_test(ds.X, ds.y, args.tau, plan)
    else:
        result = quantile_independence_test(ds.X, ds.y, args.tau)
    payload = _result_payload(args, result, "mdd-quantile")
    payload["tau"] = result.tau
    payload["quantile_estimate"] = result.quantile_estimate
    return _finish(args, payload)


def _cmd_ftest(args, parser) -> int:
    if not 0.0 < args.alpha < 1.0:
        parser.error(f"--alpha must lie in (0, 1), got {args.alpha}")
    if len(args.cell_col) > 2:
        parser.error("at most two --cell-col factors are supported")
    ds = _load(args)
    names = ds.column_names or []
    label_cols = []
    for col in args.cell_col:
        if col not in names:
            parser.error(f"--cell-col {col!r} is not a covariate column")
        label_cols.append(names.index(col))
    keep = [j for j in range(ds.p) if j not in label_cols]
    if not keep:
        parser.error("no covariate columns left after removing factor columns")
    labels = [ds.X[:, j] for j in label_cols]
    table = CellTable.from_labels(
        ds.y,
        ds.X[:, keep],
        labels[0],
        labels[1] if len(labels) > 1 else None,
    )
    result = factorial_mean_test(table, cell_adjustment=args.cell_adjustment)
    payload = _result_payload(args, result, "mdd-factorial")
    payload["cells"] = [[cell.n for cell in row] for row in table.cells]
    payload["cell_adjustment"] = args.cell_adjustment
    return _finish(args, payload)


def _cmd_screen(args, parser) -> int:
    if not 0.0 < args.fdr < 1.0:
        parser.error(f"--fdr must lie in (0, 1), got {args.fdr}")
    if args.method == "quantile":
        if args.tau is None:
            parser.error("--method quantile requires --tau")
        if not 0.0 < args.tau < 1.0:
            parser.error(f"--tau must lie in (0, 1), got {args.tau}")
    elif args.tau is not None:
        parser.error("--tau only applies to --method quantile")
    ds = _load(args)
    sets = read_gene_sets(args.sets, ds)
    calibration = "bootstrap" if args.bootstrap else "normal"
    plan = None
    if args.bootstrap:
        plan = BootstrapPlan(draws=args.bootstrap, multiplier=args.multiplier, seed=args.seed)
    report = screen_gene_sets(
        ds,
        sets,
        method=args.method,
        tau=args.tau,
        calibration=calibration,
        plan=plan,
        alpha=args.fdr,
    )
    payload = {
        "command": "screen",
        "method": f"mdd-{args.method}",
        "input": args.data,
        "sets_file": args.sets,
        "response": args.response,
        "alpha": report.alpha,
        "calibration": report.calibration,
        "m_total": len(report.results),
        "m_tested": len(report.results) - len(report.excluded_set_ids),
        "bh_threshold_index": report.bh_threshold_index,
        "rejected_set_ids": list(report.rejected_set_ids),
        "excluded_set_ids": list(report.excluded_set_ids),
        "seed": args.seed,
        "sets": [
            {
                "set_id": r.set_id,
                "columns": list(r.columns),
                "p_value": r.p_value,
                "statistic": r.statistic,
                "error": r.error,
            }
            for r in report.results
        ],
    }
    if args.format == "table":
        width = max((len(r.set_id) for r in report.results), default=6)
        lines = [f"{'set'.ljust(width)}  {'p_value':>10}  rejected"]
        for r in report.results:
            pv = "-" if r.p_value is None else f"{r.p_value:.6f}"
            flag = "excluded" if r.error else ("yes" if r.set_id in report.rejected_set_ids else "no")
            lines.append(f"{r.set_id.ljust(width)}  {pv:>10}  {flag}")
        _emit(args, "\n".join(lines))
        return 0
    return _finish(args, payload)


def _cmd_simulate(args, parser) -> int:
    if args.config:
        with open(args.config) as handle:
            raw = json.load(handle)
        raw.setdefault("replications", args.reps)
        raw.setdefault("seed", args.seed)
        if "error_params" in raw:
            raw["error_params"] = tuple(raw["error_params"])
        if "alpha_levels" in raw:
            raw["alpha_levels"] = tuple(raw["alpha_levels"])
        config = SimulationConfig(**raw)
    else:
        if args.dgp is None or args.n is None or args.p is None:
            parser.error("simulate needs --config or all of --dgp/--n/--p")
        error_params = (
            tuple(float(v) for v in args.error_params.split(",")) if args.error_params else ()
        )
        config = SimulationConfig(
            dgp=args.dgp,
            n=args.n,
            p=args.p,
            T=args.T,
            error=args.error,
            error_params=error_params,
            beta_mode=args.beta_mode,
            beta_norm=args.beta_norm,
            tau=args.tau,
            replications=args.reps,
            seed=args.seed,
            alpha_levels=tuple(args.alpha) if args.alpha else (0.05, 0.10),
            calibration="bootstrap" if args.bootstrap else "normal",
            bootstrap_draws=args.bootstrap or 500,
            multiplier=args.multiplier,
        )
    row = monte_carlo_table(config)
    if args.format == "table":
        _emit(args, render_table_row(row))
    else:
        _emit(args, table_row_json_line(row))
    return 0


_COMMANDS = {
    "test": _cmd_test,
    "qtest": _cmd_qtest,
    "ftest": _cmd_ftest,
    "screen": _cmd_screen,
    "simulate": _cmd_simulate,
}


def run_cli(argv) -> int:
    """Parse ``argv`` (without the program name) and run one subcommand."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args, parser)
    except SystemExit as exc:  # parser.error() inside a command
        return int(exc.code or 0)
    except (MddTestError, FileNotFoundError, OSError, json.JSONDecodeError) as exc:
        print(f"mddtest: {exc}", file=sys.stderr)
        return _DATA_EXIT


def main() -> None:
    sys.exit(run_cli(sys.argv[1:]))
