"""Command-line front end.

Subcommands: ``iterate`` (trajectory CSV from a config file), ``tables``
(golden-value regression of the bundled reference tables), ``optimize``
(schedule search), ``oracle`` (closed form vs. enumeration vs. Monte
Carlo), ``qkd`` (tolerable-transmission threshold), and ``figdata``
(per-panel CSVs of the bundled figure trajectories).

Conventions: CSV output is comma-separated with a header row, LF line
endings, and floats at 17 significant digits; files are written to a
temporary name and atomically renamed, so a failed run never leaves a
partial file.  Exit codes: 0 success, 1 compute or tolerance failure,
2 usage or validation failure.  When ``--out``/``--out-dir`` is omitted,
relative defaults resolve against ``$ESPD_OUT_DIR`` (falling back to the
working directory).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from dataclasses import dataclass
from pathlib import Path

from . import bounds, golden, optimize, oracle, qkd
from .dynamics import (
    ComponentParams,
    ConvergenceRule,
    DetectorPerformance,
    LevelConfig,
    Schedule,
    iterate_schedule,
)

__all__ = ["main"]

_BASELINE = {"eta0": 0.59, "d0": 1e-2, "p": 0.98, "P": 0.97, "Q": 0.002}


class ConfigError(Exception):
    """Validation failure; maps to exit code 2."""


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _out_dir() -> Path:
    return Path(os.environ.get("ESPD_OUT_DIR", "."))


def _resolve_out(arg: str | None, default_name: str) -> Path:
    if arg is not None:
        return Path(arg)
    return _out_dir() / default_name


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=str(path.parent), prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def _err(message: str) -> None:
    print(f"error: {message}", file=sys.stderr)


def _binom_stderr(prob: float, trials: int) -> float:
    return (prob * (1.0 - prob) / trials) ** 0.5


def _check_prob_field(name: str, value) -> float:
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{name} must be a number, got {value!r}") from None
    if not 0.0 <= value <= 1.0:
        raise ConfigError(f"{name} must be in [0, 1], got {value!r}")
    return value


@dataclass(frozen=True)
class RunConfig:
    init: DetectorPerformance
    params: ComponentParams
    schedule: tuple[LevelConfig, ...]
    max_levels: int
    out: str | None


def _load_json(path: Path) -> dict:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from None
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a JSON object")
    return data


def _parse_run_config(path: Path, levels_override: int | None) -> RunConfig:
    data = _load_json(path)
    known = {"eta0", "d0", "p", "P", "Q", "schedule", "max_levels", "out"}
    for key in data:
        if key not in known:
            raise ConfigError(f"{path}: unknown key {key!r}")
    values = {}
    for key in ("eta0", "d0", "p", "P", "Q"):
        if key not in data:
            raise ConfigError(f"{path}: missing key {key!r}")
        values[key] = _check_prob_field(key, data[key])

    raw_schedule = data.get("schedule")
    if not isinstance(raw_schedule, list) or len(raw_schedule) == 0:
        raise ConfigError(f"{path}: schedule must be a non-empty list of [n, k] pairs")
    schedule = []
    for idx, entry in enumerate(raw_schedule):
        if (
            not isinstance(entry, list)
            or len(entry) != 2
            or not all(isinstance(v, int) for v in entry)
        ):
            raise ConfigError(
                f"{path}: schedule[{idx}] must be an [n, k] pair of integers"
            )
        try:
            schedule.append(LevelConfig(entry[0], entry[1]))
        except ValueError as exc:
            raise ConfigError(f"{path}: schedule[{idx}]: {exc}") from None

    max_levels = data.get("max_levels", len(schedule))
    if levels_override is not None:
        max_levels = levels_override
    if not isinstance(max_levels, int) or max_levels < 1:
        raise ConfigError(f"{path}: max_levels must be a positive integer")

    out = data.get("out")
    if out is not None and not isinstance(out, str):
        raise ConfigError(f"{path}: out must be a string path")

    return RunConfig(
        init=DetectorPerformance(values["eta0"], values["d0"]),
        params=ComponentParams(values["p"], values["P"], values["Q"]),
        schedule=tuple(schedule),
        max_levels=max_levels,
        out=out,
    )


def _add_model_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--eta0", type=float, default=_BASELINE["eta0"],
                        help="seed detector efficiency (default %(default)s)")
    parser.add_argument("--d0", type=float, default=_BASELINE["d0"],
                        help="seed detector dark-count rate (default %(default)s)")
    parser.add_argument("--p", type=float, default=_BASELINE["p"],
                        help="module transmission (default %(default)s)")
    parser.add_argument("--P", dest="P_act", type=float, default=_BASELINE["P"],
                        help="auxiliary non-vacuum probability, non-vacuum input "
                             "(default %(default)s)")
    parser.add_argument("--Q", dest="Q_err", type=float, default=_BASELINE["Q"],
                        help="auxiliary non-vacuum probability, vacuum input "
                             "(default %(default)s)")


def _model_from_args(args) -> tuple[DetectorPerformance, ComponentParams]:
    init = DetectorPerformance(
        _check_prob_field("eta0", args.eta0), _check_prob_field("d0", args.d0)
    )
    params = ComponentParams(
        _check_prob_field("p", args.p),
        _check_prob_field("P", args.P_act),
        _check_prob_field("Q", args.Q_err),
    )
    return init, params


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_iterate(args) -> int:
    try:
        config = _parse_run_config(Path(args.config), args.levels)
    except (ConfigError, ValueError) as exc:
        _err(str(exc))
        return 2

    out_path = Path(args.out) if args.out else (
        Path(config.out) if config.out else _resolve_out(None, "trajectory.csv")
    )
    try:
        schedule = Schedule(config.params, config.schedule)
        rule = ConvergenceRule(max_levels=config.max_levels, eta_tol=0.0, dcr_tol=0.0)
        traj = iterate_schedule(config.init, schedule, rule)
    except ValueError as exc:
        _err(str(exc))
        return 1

    lines = ["level,n,k,de,dcr"]
    for pt in traj.points:
        n = str(pt.config.n) if pt.config else ""
        k = str(pt.config.k) if pt.config else ""
        lines.append(f"{pt.level},{n},{k},{_fmt(pt.perf.eta)},{_fmt(pt.perf.dcr)}")
    try:
        _atomic_write(out_path, "\n".join(lines) + "\n")
    except OSError as exc:
        _err(str(exc))
        return 1
    print(f"wrote {out_path} ({len(traj.points)} levels)")
    return 0


def cmd_tables(args) -> int:
    if args.table not in golden.TABLES:
        _err(f"unknown table {args.table}; available: {sorted(golden.TABLES)}")
        return 2
    report = golden.evaluate_table(args.table, args.variant)
    out_path = _resolve_out(args.out, f"table{args.table}_report.csv")

    lines = [
        "series,level,n,k,de_expected_pct,de_computed_pct,de_computed_rounded,"
        "de_delta_pp,de_ok,dcr_expected,dcr_computed,dcr_computed_rounded,"
        "dcr_rel_err,dcr_ok"
    ]
    for c in report.cells:
        lines.append(
            f"{c.series},{c.level},{c.n},{c.k},"
            f"{_fmt(c.de_expected_pct)},{_fmt(c.de_computed_pct)},"
            f"{c.de_computed_pct:.1f},{_fmt(c.de_delta_pp)},{int(c.de_ok)},"
            f"{_fmt(c.dcr_expected)},{_fmt(c.dcr_computed)},"
            f"{c.dcr_computed:.1e},{_fmt(c.dcr_rel_err)},{int(c.dcr_ok)}"
        )
    try:
        _atomic_write(out_path, "\n".join(lines) + "\n")
    except OSError as exc:
        _err(str(exc))
        return 1

    for c in report.cells:
        if not (c.de_ok and c.dcr_ok):
            print(
                f"MISMATCH {c.series} level {c.level} ({c.n},{c.k}): "
                f"de {c.de_computed_pct:.4f}% vs {c.de_expected_pct}% "
                f"(delta {c.de_delta_pp:+.4f}pp), "
                f"dcr {c.dcr_computed:.4e} vs {c.dcr_expected:.1e} "
                f"(rel {c.dcr_rel_err:+.2%})"
            )
    status = "PASS" if report.all_ok else "FAIL"
    print(
        f"table {report.number} [{report.variant}]: {report.n_ok}/{report.n_total} "
        f"cells within tolerance -> {status} (report: {out_path})"
    )
    return 0 if report.all_ok else 1


def cmd_optimize(args) -> int:
    try:
        init, params = _model_from_args(args)
        if args.top < 0:
            raise ConfigError(f"top must be >= 0 (0 lists everything), got {args.top}")
        top = None if args.top == 0 else args.top
        query = optimize.OptimizationQuery(
            init=init,
            params=params,
            de_target=args.de_target,
            dcr_target=args.dcr_target,
            max_levels=args.max_levels,
            n_max=args.n_max,
        )
    except (ConfigError, ValueError) as exc:
        _err(str(exc))
        return 2

    results = optimize.search_schedules(query, top=top)
    if args.pareto:
        results = optimize.pareto_front(results)
    out_path = _resolve_out(args.out, "schedules.csv")
    lines = ["schedule,cost,de,dcr"]
    for r in results:
        label = golden.schedule_label(r.schedule.levels)
        lines.append(f"{label},{r.cost},{_fmt(r.final.eta)},{_fmt(r.final.dcr)}")
    try:
        _atomic_write(out_path, "\n".join(lines) + "\n")
    except OSError as exc:
        _err(str(exc))
        return 1
    if not results:
        print("no feasible schedule")
    print(f"wrote {out_path} ({len(results)} schedules)")
    return 0


def cmd_oracle(args) -> int:
    try:
        init, params = _model_from_args(args)
        if args.n > oracle.ENUM_MAX_N:
            raise ConfigError(
                f"n must be <= {oracle.ENUM_MAX_N} for enumeration, got {args.n}"
            )
        config = LevelConfig(args.n, args.k)
        if args.trials < 1:
            raise ConfigError(f"trials must be >= 1, got {args.trials}")
        if args.threads < 1:
            raise ConfigError(f"threads must be >= 1, got {args.threads}")
    except (ConfigError, ValueError) as exc:
        _err(str(exc))
        return 2

    report = oracle.oracle_report(
        init, params, config, args.trials, args.seed, threads=args.threads
    )
    enum_ok = report.enum_abs_err_de <= 1e-12 and report.enum_abs_err_dcr <= 1e-12
    # The sampling band is centered on the enumerated truth; the estimate's
    # own stderr collapses to zero when every trial lands the same way.
    band_de = 5.0 * max(report.mc_stderr_de, _binom_stderr(report.enum_de, args.trials))
    band_dcr = 5.0 * max(
        report.mc_stderr_dcr, _binom_stderr(report.enum_dcr, args.trials)
    )
    mc_ok = (
        abs(report.mc_de - report.enum_de) <= band_de
        and abs(report.mc_dcr - report.enum_dcr) <= band_dcr
    )
    for name in (
        "closed_de",
        "closed_dcr",
        "enum_de",
        "enum_dcr",
        "mc_de",
        "mc_dcr",
        "mc_stderr_de",
        "mc_stderr_dcr",
        "enum_abs_err_de",
        "enum_abs_err_dcr",
    ):
        print(f"{name}={_fmt(getattr(report, name))}")
    print(f"trials={report.trials}")
    print(f"seed={report.seed}")
    print(f"enum_within_1e-12={'yes' if enum_ok else 'no'}")
    print(f"mc_within_5_stderr={'yes' if mc_ok else 'no'}")
    return 0 if (enum_ok and mc_ok) else 1


def cmd_qkd(args) -> int:
    try:
        scn = qkd.QkdScenario(e_th=args.e_th, e_c=args.e_c, e=args.e)
        det = DetectorPerformance(
            _check_prob_field("eta", args.eta), _check_prob_field("dcr", args.dcr)
        )
        if det.eta <= 0.0:
            raise ConfigError("eta must be > 0")
    except (ConfigError, ValueError) as exc:
        _err(str(exc))
        return 2

    try:
        g_approx = qkd.gamma_approx(scn, det)
        g_exact = None if args.approx else qkd.gamma_exact(scn, det)
    except ValueError as exc:
        _err(str(exc))
        return 1

    print(f"assumed e={_fmt(scn.effective_e)}"
          + (" (defaulted to e_th; override with --e)" if args.e is None else ""))
    if g_exact is not None:
        print(f"gamma_exact={_fmt(g_exact)} ({g_exact:.6e})")
    print(f"gamma_approx={_fmt(g_approx)} ({g_approx:.6e})")
    return 0


def cmd_figdata(args) -> int:
    if args.figure not in golden.FIGURES:
        _err(f"unknown figure {args.figure}; available: {sorted(golden.FIGURES)}")
        return 2
    out_dir = Path(args.out_dir) if args.out_dir else _out_dir()
    panels = golden.figure_panels(args.figure)
    written = []
    try:
        for stem, rows in panels:
            lines = ["level,series_label,value"]
            for level, label, value in rows:
                lines.append(f"{level},{label},{_fmt(value)}")
            path = out_dir / f"{stem}.csv"
            _atomic_write(path, "\n".join(lines) + "\n")
            written.append(path)
    except OSError as exc:
        _err(str(exc))
        return 1
    for path in written:
        print(f"wrote {path}")
    return 0


def cmd_fixedpoints(args) -> int:
    try:
        report = bounds.find_fixed_points(
            _check_prob_field("p", args.p),
            _check_prob_field("P", args.P_act),
            args.n,
            args.k,
            grid=args.grid,
        )
    except (ConfigError, ValueError) as exc:
        _err(str(exc))
        return 2
    if report.roots:
        for root in report.roots:
            print(f"root={_fmt(root)}")
    else:
        print("no roots in (0, 1]")
    if report.gain_positive_interval:
        lo, hi = report.gain_positive_interval
        print(f"gain_positive_interval={_fmt(lo)},{_fmt(hi)}")
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="espd",
        description="Cascaded detector-enhancement toolkit: trajectories, "
        "golden-table regression, schedule search, verification oracles, "
        "and QKD thresholds.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_iter = sub.add_parser("iterate", help="trajectory CSV from a JSON config")
    p_iter.add_argument("config", help="JSON config file")
    p_iter.add_argument("--levels", type=int, default=None,
                        help="override the number of levels to iterate")
    p_iter.add_argument("--out", default=None, help="output CSV path")
    p_iter.set_defaults(func=cmd_iterate)

    p_tab = sub.add_parser("tables", help="golden-value regression of a reference table")
    p_tab.add_argument("--table", type=int, required=True,
                       help="table number (2-7)")
    p_tab.add_argument("--out", default=None, help="report CSV path")
    p_tab.add_argument("--variant", choices=("exact", "approx"), default="exact",
                       help="per-level intermediates variant (default exact)")
    p_tab.set_defaults(func=cmd_tables)

    p_opt = sub.add_parser("optimize", help="search (n, k) schedules for targets")
    _add_model_flags(p_opt)
    p_opt.add_argument("--de-target", type=float, required=True)
    p_opt.add_argument("--dcr-target", type=float, required=True)
    p_opt.add_argument("--max-levels", type=int, default=4)
    p_opt.add_argument("--n-max", type=int, default=8)
    p_opt.add_argument("--top", type=int, default=50,
                       help="number of schedules to keep (0 = all)")
    p_opt.add_argument("--pareto", action="store_true",
                       help="reduce the ranking to its Pareto front")
    p_opt.add_argument("--out", default=None, help="output CSV path")
    p_opt.set_defaults(func=cmd_optimize)

    p_orc = sub.add_parser("oracle", help="closed form vs. enumeration vs. Monte Carlo")
    _add_model_flags(p_orc)
    p_orc.add_argument("--n", type=int, required=True)
    p_orc.add_argument("--k", type=int, required=True)
    p_orc.add_argument("--trials", type=int, default=100000)
    p_orc.add_argument("--seed", type=int, default=42)
    p_orc.add_argument("--threads", type=int, default=1)
    p_orc.set_defaults(func=cmd_oracle)

    p_qkd = sub.add_parser("qkd", help="minimal tolerable channel transmission")
    p_qkd.add_argument("--e-th", dest="e_th", type=float, required=True,
                       help="secure error threshold")
    p_qkd.add_argument("--e-c", dest="e_c", type=float, required=True,
                       help="non-detector error rate")
    p_qkd.add_argument("--e", type=float, default=None,
                       help="error weight in the exact denominator (default e-th)")
    p_qkd.add_argument("--eta", type=float, required=True)
    p_qkd.add_argument("--dcr", type=float, required=True)
    p_qkd.add_argument("--approx", action="store_true",
                       help="print only the small-dark-count form")
    p_qkd.set_defaults(func=cmd_qkd)

    p_fig = sub.add_parser("figdata", help="per-panel CSVs of bundled figure data")
    p_fig.add_argument("--figure", type=int, required=True, help="figure number (2-5)")
    p_fig.add_argument("--out-dir", default=None)
    p_fig.set_defaults(func=cmd_figdata)

    p_fp = sub.add_parser("fixedpoints", help="roots of the constant-config gain")
    p_fp.add_argument("--p", type=float, default=_BASELINE["p"])
    p_fp.add_argument("--P", dest="P_act", type=float, default=_BASELINE["P"])
    p_fp.add_argument("--n", type=int, required=True)
    p_fp.add_argument("--k", type=int, required=True)
    p_fp.add_argument("--grid", type=int, default=10000)
    p_fp.set_defaults(func=cmd_fixedpoints)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
