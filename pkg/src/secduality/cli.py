"""Command-line front end: ``eval``, ``sweep`` and ``verify``.

Exit codes: 0 success, 1 config or usage error, 2 verification failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import logging
import math
import sys
from pathlib import Path
from typing import Optional

from .config import SWEEP_FIELDS, ConfigError, ScenarioConfig, load_config
from .errors import InsufficientConditioningError, SecDualityError, UnsupportedConfigurationError
from .montecarlo import SECRECY_METRICS, McConfig, Metric, estimate_many, verify
from .outage import InterferenceScenario, op_i, op_n, op_ni
from .secrecy import duality_map, interference_dual, p_s, p_s_plus, p_so

log = logging.getLogger("secduality")

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_VERIFY = 2

NA = "n/a"
CSV_NAN = "nan"


def fmt(x: Optional[float]) -> str:
    """Shortest decimal capped at 12 significant digits."""
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return CSV_NAN
    return f"{float(x):.12g}"


def secrecy_metrics(cfg: ScenarioConfig) -> dict:
    """Analytic p_s, p_so, p_s_plus; rate-dependent ones are None at rate 0."""
    sc = cfg.scenario()
    out = {"p_s": None, "p_so": None, "p_s_plus": p_s_plus(sc)}
    if sc.rate > 0:
        out["p_s"] = p_s(sc)
        out["p_so"] = p_so(sc)
    return out


def mc_metrics(cfg: ScenarioConfig, mc: McConfig) -> dict:
    sc = cfg.scenario()
    metrics = [Metric.P_S_PLUS] if sc.rate == 0 else list(SECRECY_METRICS)
    try:
        out = estimate_many(metrics, sc, mc)
    except InsufficientConditioningError as exc:
        log.warning("%s; p_so estimate omitted", exc)
        out = estimate_many([m for m in metrics if m is not Metric.P_SO], sc, mc)
    return {m.value: est for m, est in out.items()}


def _mc_config(cfg: ScenarioConfig, args) -> McConfig:
    mc = cfg.mc
    return McConfig(args.samples if args.samples is not None else mc.samples,
                    args.seed if args.seed is not None else mc.seed,
                    args.workers if args.workers is not None else mc.workers)


def _mc_enabled(cfg: ScenarioConfig, args) -> bool:
    return cfg.mc_enabled if args.mc is None else args.mc


def cmd_eval(args) -> int:
    cfg = load_config(args.config)
    sc = cfg.scenario()
    values = secrecy_metrics(cfg)
    rows = []
    for name in ("p_s", "p_so", "p_s_plus"):
        v = values[name]
        note = " (lower bound)" if getattr(v, "lower_bound", False) else ""
        rows.append((name, NA if v is None else fmt(v) + note))
    # interference-side duals of the same quantities
    rows.append(("op_n(mu)", fmt(op_n(sc.desired, sc.mu)) if sc.mu > 0 else "0"))
    if sc.rate > 0:
        dual, gamma = interference_dual(sc)
        rows.append(("op_ni(gamma)", fmt(op_ni(dual, gamma))))
    else:
        rows.append(("op_ni(gamma)", NA))
    rows.append(("op_i(1)", fmt(op_i(InterferenceScenario(sc.desired, sc.eavesdropper_branches), 1.0))))

    print(f"desired: {cfg.desired.model.value}, mean {fmt(cfg.desired.mean_snr_db)} dB"
          + (f", m={fmt(cfg.desired.m)}" if cfg.desired.model.value == "nakagami" else "")
          + (f", K={fmt(cfg.desired.K)}" if cfg.desired.model.value == "rice" else ""))
    print(f"eavesdropper: {cfg.count} MRC branch(es)")
    if sc.rate > 0:
        dm = duality_map(sc.rate)
        print(f"rate {fmt(sc.rate)} bits, gamma = {fmt(dm.gamma)}, branch scale = {fmt(dm.scale)}, "
              f"mu = {fmt(sc.mu)}")
    else:
        print(f"rate 0 bits, mu = {fmt(sc.mu)}")
    mc_est = {}
    if _mc_enabled(cfg, args):
        mc_est = mc_metrics(cfg, _mc_config(cfg, args))
    width = max(len(r[0]) for r in rows) + 2
    for name, text in rows:
        line = f"{name:<{width}}{text}"
        if name in mc_est:
            e = mc_est[name]
            line += f"    mc {fmt(e.p_hat)} +/- {fmt(e.std_err)}"
        print(line)
    return EXIT_OK


def sweep_grid(start: float, stop: float, step: float) -> list:
    if not (math.isfinite(start) and math.isfinite(stop) and math.isfinite(step)):
        raise ConfigError("sweep bounds must be finite")
    if step <= 0:
        raise ConfigError(f"sweep step must be positive, got {step!r}")
    if stop < start:
        raise ConfigError(f"empty sweep grid: to ({stop!r}) < from ({start!r})")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [start + k * step for k in range(count)]


def sweep_rows(cfg: ScenarioConfig, field: str, grid, mc: Optional[McConfig] = None) -> list:
    header = ["sweep_field", "sweep_value", "p_s", "p_so", "p_s_plus"]
    if mc is not None:
        for m in SECRECY_METRICS:
            header += [f"mc_{m.value}", f"mc_stderr_{m.value}"]
    rows = [header]
    for value in grid:
        point = cfg.with_field(field, value)
        values = secrecy_metrics(point)
        row = [field, fmt(value)] + [fmt(values[k]) for k in ("p_s", "p_so", "p_s_plus")]
        if mc is not None:
            est = mc_metrics(point, mc)
            for m in SECRECY_METRICS:
                e = est.get(m.value)
                row += [fmt(e.p_hat), fmt(e.std_err)] if e else [CSV_NAN, CSV_NAN]
        rows.append(row)
    return rows


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()


def _write(text: str, out: Optional[str]) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, newline="")


def cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    if args.field not in SWEEP_FIELDS:
        raise ConfigError(f"unknown sweep field {args.field!r}; expected one of {', '.join(SWEEP_FIELDS)}")
    grid = sweep_grid(args.start, args.stop, args.step)
    mc = _mc_config(cfg, args) if _mc_enabled(cfg, args) else None
    _write(rows_to_csv(sweep_rows(cfg, args.field, grid, mc)), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    cfg = load_config(args.config)
    mc = _mc_config(cfg, args)
    report = verify(cfg.scenario(), cfg=mc, k_sigma=args.sigma)
    print(report.format())
    if args.out:
        Path(args.out).write_text(report.to_csv(), newline="")
    for c in report.inconclusive:
        print(f"warning: {c.metric.value} is inconclusive at N={mc.samples} "
              f"(p={fmt(c.analytic)} is below the Monte Carlo resolution floor)", file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="secduality",
        description="Secrecy outage metrics via the interference duality, with Monte Carlo checks.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, mc_flag=True):
        p.add_argument("--config", required=True, help="scenario config file")
        p.add_argument("--samples", type=int, help="Monte Carlo sample count (overrides [mc])")
        p.add_argument("--seed", type=int, help="Monte Carlo seed (overrides [mc])")
        p.add_argument("--workers", type=int, help="Monte Carlo worker threads")
        if mc_flag:
            p.add_argument("--mc", action=argparse.BooleanOptionalAction, default=None,
                           help="add Monte Carlo estimates")

    p_eval = sub.add_parser("eval", help="evaluate all metrics for one scenario")
    common(p_eval)
    p_eval.set_defaults(func=cmd_eval)

    p_sweep = sub.add_parser("sweep", help="sweep one field and write CSV")
    common(p_sweep)
    p_sweep.add_argument("--field", required=True, choices=SWEEP_FIELDS, metavar="FIELD",
                         help="one of: " + ", ".join(SWEEP_FIELDS))
    p_sweep.add_argument("--from", dest="start", type=float, required=True)
    p_sweep.add_argument("--to", dest="stop", type=float, required=True)
    p_sweep.add_argument("--step", type=float, required=True)
    p_sweep.add_argument("--out", help="CSV output path (default: stdout)")
    p_sweep.set_defaults(func=cmd_sweep)

    p_verify = sub.add_parser("verify", help="check analytic values against Monte Carlo")
    common(p_verify, mc_flag=False)
    p_verify.add_argument("--sigma", type=float, default=4.0, help="pass band in standard errors")
    p_verify.add_argument("--out", help="machine-readable CSV report path")
    p_verify.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits with 2 on usage errors; 2 is reserved for verification failure
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except UnsupportedConfigurationError as exc:
        print(f"unsupported configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SecDualityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
