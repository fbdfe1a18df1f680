"""``subradiance`` command line.

Pure orchestration: every number it needs comes from ``defaults`` or from
the user.  Exit codes: 0 success, 2 config error, 3 solver error,
4 verification failure.
"""
from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

from . import __version__, defaults, verify
from .config import FIGURE_IDS, RunConfig, parse_config
from .errors import ConfigError, FitError, SolverError, SubradianceError
from .io import OutputError, StageTimer, read_csv, read_json, write_csv, write_json, write_manifest

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER, EXIT_VERIFY = 0, 2, 3, 4


def _defaults_epilog() -> str:
    lines = ["defaults (edit subradiance/defaults.py to change):"]
    for key, (value, text) in defaults.TABLE.items():
        lines.append(f"  {key:<8} = {value!s:<8} {text}")
    start, stop, step = defaults.N_GRID
    lines.append(f"  figure N grid = {start}:{stop}:{step}")
    lines.append("exit codes: 0 ok, 2 config error, 3 solver error, 4 verify failure")
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.RawDescriptionHelpFormatter
    epilog = _defaults_epilog()
    parser = argparse.ArgumentParser(
        prog="subradiance", formatter_class=fmt, epilog=epilog,
        description="Subradiant spectrum of atom chains coupled to a waveguide.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value config file; flags override it")
    common.add_argument("--out", help="output directory (default: results)")
    common.add_argument("--workers", help="worker processes (fallback: $SUBRADIANCE_WORKERS)")
    common.add_argument("--eig-tol", dest="eig_tol",
                        help=f"eigen-residual bound relative to ||H||_F (default {defaults.EIG_TOL:g})")
    common.add_argument("--format", choices=("csv", "json"), help="record format (default csv)")

    physics = argparse.ArgumentParser(add_help=False)
    physics.add_argument("--n", help="chain length(s): 100, or 20:200:5, or a comma list")
    physics.add_argument("--d", help=f"spacing d/lambda (default {defaults.SPACING:g})")
    physics.add_argument("--gamma", help=f"free-space rate gamma/Gamma (default {defaults.GAMMA_FS:g})")
    physics.add_argument("--xi", help=f"branch index or list (default {defaults.BRANCH})")
    physics.add_argument("--xi-max", dest="xi_max",
                         help="largest branch checked against the ansatz (default min(N, "
                              f"{defaults.BRANCH_MAX}))")

    sub = parser.add_subparsers(dest="command", metavar="command")
    sub.add_parser("spectrum", parents=[common, physics], formatter_class=fmt, epilog=epilog,
                   help="diagonalize one chain and report selected branches")
    sub.add_parser("sweep", parents=[common, physics], formatter_class=fmt, epilog=epilog,
                   help="numeric vs analytic comparison over a parameter grid")
    fig = sub.add_parser("figure", parents=[common], formatter_class=fmt, epilog=epilog,
                         help="regenerate the data and SVGs of one benchmark figure")
    fig.add_argument("figure", nargs="?", choices=FIGURE_IDS)
    fig.add_argument("--n", help="override the N grid for N-sweep panels")
    fig.add_argument("--no-svg", dest="svg", action="store_false", help="write CSV only")
    ver = sub.add_parser("verify", parents=[common], formatter_class=fmt, epilog=epilog,
                         help="run the internal identity suite")
    ver.add_argument("--quick", action="store_true", default=None, help="reduced grids (< 5 s)")
    fit = sub.add_parser("fit", parents=[common], formatter_class=fmt, epilog=epilog,
                         help="power-law fits of a sweep output against N")
    fit.add_argument("input", nargs="?", help="sweep CSV or JSON file")
    fit.add_argument("--column", help="column to fit (default Gamma_num)")
    fit.add_argument("--window", help="N range lo:hi")
    fit.add_argument("--deviation", action="store_true", default=None,
                     help="fit J_num - J_infty instead of --column")
    return parser


def config_from_args(args) -> RunConfig:
    flags = {k: getattr(args, k, None) for k in
             ("n", "d", "gamma", "xi", "xi_max", "out", "workers", "eig_tol", "format", "quick")}
    flags["command"] = args.command
    flags["figure"] = getattr(args, "figure", None)
    flags["fit_input"] = getattr(args, "input", None)
    flags["fit_column"] = getattr(args, "column", None)
    flags["fit_window"] = getattr(args, "window", None)
    flags["fit_deviation"] = getattr(args, "deviation", None)
    return parse_config(args.config, flags)


# -- emission ----------------------------------------------------------------

def emit_results(records, cfg: RunConfig, name: str, timer: StageTimer, columns=None,
                 extra_files=(), extra_config=None):
    """Write ``name.csv`` or ``name.json`` and the run manifest into ``cfg.out``."""
    from .experiments.sweep import CSV_COLUMNS

    out = Path(cfg.out)
    columns = columns or CSV_COLUMNS
    with timer.stage("write"):
        if cfg.format == "json":
            path = write_json(records, out / f"{name}.json", columns)
        else:
            path = write_csv(records, out / f"{name}.csv", columns)
    config = cfg.resolved()
    config.update(extra_config or {})
    write_manifest(out, config, timer.stages, [path, *extra_files])
    return path


def _params_spec(cfg: RunConfig):
    from .experiments.sweep import SweepSpec

    return SweepSpec(cfg.n, cfg.d, cfg.gamma, cfg.xi, eig_tol=cfg.eig_tol)


def _solver_failures(records):
    return [r for r in records if r.failed]


def cmd_spectrum(cfg: RunConfig) -> int:
    from .core import ChainParams
    from .hamiltonian import build_total
    from .spectrum import classify_branches, eigendecompose
    from .experiments.sweep import run_sweep

    timer = StageTimer()
    params = ChainParams(cfg.n[0], cfg.d[0], cfg.gamma[0], cfg.xi_max)
    with timer.stage("build"):
        h = build_total(params)
    with timer.stage("solve"):
        spec = classify_branches(eigendecompose(h, cfg.eig_tol))
    with timer.stage("compare"):
        records = run_sweep(_params_spec(cfg), 1)
    modes = [{"index": i, "branch": m.branch if m.branch is not None else 0,
              "linewidth": float(m.linewidth), "shift": float(m.shift),
              "overlap": float(m.overlap) if m.branch is not None else math.nan,
              "residual": float(m.residual)}
             for i, m in enumerate(spec.modes)]
    cols = ("index", "branch", "linewidth", "shift", "overlap", "residual")
    out = Path(cfg.out)
    ext = "json" if cfg.format == "json" else "csv"
    writer = write_json if ext == "json" else write_csv
    with timer.stage("write"):
        modes_path = writer(modes, out / f"spectrum_modes.{ext}", cols)
    emit_results(records, cfg, "spectrum", timer, extra_files=[modes_path],
                 extra_config={"max_residual": spec.solver_stats.max_residual,
                               "solver": spec.solver_stats.method})
    for r in records:
        print(f"N={r.N} d={r.d_over_lambda:g} gamma={r.gamma_over_Gamma:g} xi={r.xi}: "
              f"Gamma={r.Gamma_num:.6e} J={r.J_num:.6e} overlap={r.overlap:.3f}"
              + (f" [{';'.join(r.flags)}]" if r.flags else ""))
    return EXIT_OK


def cmd_sweep(cfg: RunConfig) -> int:
    from .experiments.sweep import benchmark_compare, run_sweep

    timer = StageTimer()
    spec = _params_spec(cfg)
    with timer.stage("sweep"):
        records = run_sweep(spec, cfg.workers)
    with timer.stage("summary"):
        summary = benchmark_compare(records)
    summary_path = write_json(summary, Path(cfg.out) / "summary.json")
    emit_results(records, cfg, "sweep", timer, extra_files=[summary_path])
    print(f"{len(records)} records -> {cfg.out}")
    failures = _solver_failures(records)
    if failures:
        print(f"solver failed on {len(failures)} rows (flag solver_error)", file=sys.stderr)
        return EXIT_SOLVER
    return EXIT_OK


def cmd_figure(cfg: RunConfig, svg=True) -> int:
    from .experiments.figures import reproduce_figure

    timer = StageTimer()
    with timer.stage(cfg.figure):
        files = reproduce_figure(cfg.figure, cfg.out, cfg.workers, cfg.n or None, svg=svg)
    write_manifest(cfg.out, cfg.resolved(), timer.stages, files)
    print(f"{cfg.figure}: {len(files)} files -> {cfg.out}")
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    results = verify.run_checks(cfg.quick)
    print(verify.format_table(results))
    failed = [res.name for res, _ in results if not res.passed]
    if failed:
        print("FAILED: " + ", ".join(failed), file=sys.stderr)
        return EXIT_VERIFY
    print(f"all {len(results)} checks passed")
    return EXIT_OK


def _load_records(path):
    from .experiments.sweep import ComparisonRecord

    path = Path(path)
    if not path.exists():
        raise ConfigError("input", f"no such file {path}")
    rows = read_json(path) if path.suffix == ".json" else read_csv(path)
    return [ComparisonRecord.from_row(r) for r in rows]


def cmd_fit(cfg: RunConfig) -> int:
    from .experiments.fitting import fit_power_law, parity_aware_fit

    timer = StageTimer()
    with timer.stage("load"):
        records = _load_records(cfg.fit_input)
    if not cfg.fit_deviation and records and not hasattr(records[0], cfg.fit_column):
        raise ConfigError("column", f"unknown column {cfg.fit_column!r}", "a numeric sweep column")
    groups = {}
    for r in records:
        groups.setdefault((r.d_over_lambda, r.gamma_over_Gamma, r.xi), []).append(r)
    out = []
    with timer.stage("fit"):
        for (d, g, xi), rows in sorted(groups.items()):
            if cfg.fit_deviation:
                pts = [(r.N, r.J_num - r.J_infty) for r in rows]
            else:
                pts = [(r.N, getattr(r, cfg.fit_column)) for r in rows]
            entry = {"d_over_lambda": d, "gamma_over_Gamma": g, "xi": xi}
            try:
                fit = fit_power_law(pts, cfg.fit_window)
                entry.update(slope=fit.slope, intercept=fit.intercept, r2=fit.r2, n_points=fit.n_points)
            except FitError as exc:
                entry.update(slope=math.nan, intercept=math.nan, r2=math.nan, n_points=0, error=str(exc))
            for key, pf in parity_aware_fit(pts, cfg.fit_window).items():
                entry[f"slope_{key}"] = pf.slope if pf else math.nan
            out.append(entry)
            print(f"d={d:g} gamma={g:g} xi={xi}: slope={entry['slope']:.4f} r2={entry['r2']:.6f} "
                  f"(even {entry['slope_even']:.4f}, odd {entry['slope_odd']:.4f}, "
                  f"averaged {entry['slope_averaged']:.4f})")
    cols = ("d_over_lambda", "gamma_over_Gamma", "xi", "slope", "intercept", "r2", "n_points",
            "slope_even", "slope_odd", "slope_averaged")
    out = [{c: e.get(c, math.nan) for c in cols} for e in out]
    emit_results(out, cfg, "fits", timer, columns=cols)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_help()
        return EXIT_CONFIG
    try:
        cfg = config_from_args(args)
        if cfg.command == "spectrum":
            return cmd_spectrum(cfg)
        if cfg.command == "sweep":
            return cmd_sweep(cfg)
        if cfg.command == "figure":
            return cmd_figure(cfg, svg=getattr(args, "svg", True))
        if cfg.command == "verify":
            return cmd_verify(cfg)
        return cmd_fit(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SolverError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except OutputError as exc:
        print(f"output error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SubradianceError as exc:  # parameter/domain errors are bad input
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

if __name__ == "__main__":
    sys.exit(main())
