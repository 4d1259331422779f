"""Sweep driver and reproduction harness.

Subcommands:

* calibrate: find the multiplier meeting an average received-power budget.
* evaluate: Monte Carlo secrecy rate of one policy (calibrating if needed).
* sweep: calibrate and evaluate across a budget grid and emit CSV, either
  from a named preset (fig2, fig3, fig4) or a flat key=value config file.

CSV schema (fixed):
    q_avg,q_peak,policy,lambda,tau,rate_nats,std_err,n_samples,seed,flag
Absent fields are empty; an infinite peak limit is the literal token "inf".
Configuration precedence: command-line flags win over config-file keys.
All diagnostics go to stderr; only the CSV (or report lines) go to stdout.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from dataclasses import dataclass, field, replace

from .calibrate import ConstraintSet, calibrate_lambda, optimize_threshold
from .fading import FadingParams
from .policy import PolicyFamily, PolicySpec, onoff_power_level
from .rate import ergodic_secrecy_rate_mc

__all__ = ["SweepConfig", "PRESETS", "preset_config", "run_sweep", "write_csv", "main"]

CSV_HEADER = [
    "q_avg",
    "q_peak",
    "policy",
    "lambda",
    "tau",
    "rate_nats",
    "std_err",
    "n_samples",
    "seed",
    "flag",
]

DEFAULT_SAMPLES = 1_000_000
DEFAULT_TOL = 1e-3
DEFAULT_SEED = 42

# A curve is (family, peak_spec); peak_spec is None (no peak limit),
# ("fixed", value) or ("ratio", value) with the peak set per-budget.
Curve = tuple[PolicyFamily, tuple[str, float] | None]


@dataclass(frozen=True)
class SweepConfig:
    params: FadingParams
    q_avg_grid: tuple[float, ...]
    curves: tuple[Curve, ...]
    n_samples: int = DEFAULT_SAMPLES
    seed: int = DEFAULT_SEED
    tol: float = DEFAULT_TOL
    n_partitions: int = 1
    tau_max: float | None = None
    out_path: str | None = None

    def __post_init__(self):
        if not self.q_avg_grid:
            raise ValueError("q_avg_grid must be nonempty")
        grid = tuple(float(q) for q in self.q_avg_grid)
        if any(q <= 0.0 or not math.isfinite(q) for q in grid):
            raise ValueError("q_avg_grid values must be positive and finite")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("q_avg_grid must be strictly increasing")
        object.__setattr__(self, "q_avg_grid", grid)
        if not self.curves:
            raise ValueError("at least one policy curve is required")
        for family, peak in self.curves:
            if peak is None:
                continue
            kind, value = peak
            if kind == "ratio" and value <= 1.0:
                raise ValueError(
                    "q_peak/q_avg ratio must exceed 1: a peak at or below the "
                    "average budget leaves the average unreachable by construction"
                )
            if kind == "fixed" and value <= 0.0:
                raise ValueError("fixed q_peak must be positive")


def _grid_default():
    # Reaches low enough that the tightest preset peak stops mattering and
    # high enough that the peak-limited curves have clearly flattened.
    return (0.05, 0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0)


def preset_config(name: str, **overrides) -> SweepConfig:
    """Built-in sweeps reproducing the three rate-versus-budget figures."""
    if name == "fig2":
        base = SweepConfig(
            params=FadingParams(1.0, 1.0, 2.0),
            q_avg_grid=_grid_default(),
            curves=(
                (PolicyFamily.FULL_CSI_AVG_PEAK, ("fixed", 0.5)),
                (PolicyFamily.FULL_CSI_AVG_PEAK, ("fixed", 1.0)),
                (PolicyFamily.FULL_CSI_AVG_PEAK, ("fixed", 2.0)),
                (PolicyFamily.FULL_CSI_AVG, None),
            ),
        )
    elif name == "fig3":
        base = SweepConfig(
            params=FadingParams(1.0, 2.0, 2.0),
            q_avg_grid=_grid_default(),
            curves=(
                (PolicyFamily.FULL_CSI_AVG_PEAK, ("ratio", 2.0)),
                (PolicyFamily.FULL_CSI_AVG_PEAK, ("ratio", 4.0)),
                (PolicyFamily.FULL_CSI_AVG, None),
            ),
        )
    elif name == "fig4":
        base = SweepConfig(
            params=FadingParams(1.0, 2.0, 2.0),
            q_avg_grid=_grid_default(),
            curves=(
                (PolicyFamily.FULL_CSI_AVG, None),
                (PolicyFamily.NO_ECSI, None),
                (PolicyFamily.ON_OFF, None),
            ),
        )
    else:
        raise ValueError(f"unknown preset {name!r}")
    return replace(base, **overrides) if overrides else base


PRESETS = ("fig2", "fig3", "fig4")


def _fmt(value) -> str:
    if value is None or value == "":
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, float) and math.isinf(value):
        return "inf"
    if isinstance(value, int):
        return str(value)
    return format(float(value), ".12g")


def _row(q_avg, q_peak, policy, lam, tau, rate, se, n_samples, seed, flag):
    return {
        "q_avg": q_avg,
        "q_peak": q_peak,
        "policy": policy,
        "lambda": lam,
        "tau": tau,
        "rate_nats": rate,
        "std_err": se,
        "n_samples": n_samples,
        "seed": seed,
        "flag": flag,
    }


def run_sweep(config: SweepConfig, log=None) -> list[dict]:
    """Calibrate and evaluate every (q_avg, curve) point; one CSV row each.

    Rows appear in grid-major order (q_avg outer, curves inner). Every row
    reuses the same seed, so curves share channel states and pointwise
    comparisons between them are common-random-number comparisons.
    Calibration flags are recorded in the row rather than aborting the sweep.
    """
    log = log or (lambda msg: None)
    rows = []
    for q_avg in config.q_avg_grid:
        for family, peak in config.curves:
            log(f"sweep point q_avg={q_avg:g} policy={family.value}"
                + (f" peak={peak[0]}:{peak[1]:g}" if peak else ""))
            rows.append(_sweep_point(config, q_avg, family, peak))
    return rows


def _sweep_point(config: SweepConfig, q_avg: float, family: PolicyFamily, peak) -> dict:
    params = config.params
    seed = config.seed
    n = config.n_samples
    parts = config.n_partitions

    if family is PolicyFamily.ON_OFF:
        tau_star, _ = optimize_threshold(params, q_avg, config.tau_max)
        level = onoff_power_level(q_avg, params.gamma_P, params.gamma_M, tau_star)
        spec = PolicySpec.onoff(tau_star, level)
        est = ergodic_secrecy_rate_mc(spec, params, n, seed, parts)
        return _row(q_avg, None, family.value, None, tau_star, est.mean, est.std_error, n, seed, "")

    if family is PolicyFamily.FULL_CSI_AVG_PEAK:
        kind, value = peak
        q_peak = value * q_avg if kind == "ratio" else value
        constraints = ConstraintSet(q_avg, q_peak)
    else:
        q_peak = math.inf
        constraints = ConstraintSet(q_avg)

    report = calibrate_lambda(family, params, constraints, config.tol, n, seed, parts)
    if family is PolicyFamily.FULL_CSI_AVG_PEAK:
        spec = PolicySpec.full_csi_avg_peak(report.lambda_star, q_peak)
    elif family is PolicyFamily.NO_ECSI:
        spec = PolicySpec.no_ecsi(report.lambda_star, params.gamma_E)
    else:
        spec = PolicySpec.full_csi_avg(report.lambda_star)
    est = ergodic_secrecy_rate_mc(spec, params, n, seed, parts)
    out_peak = q_peak if family in (PolicyFamily.FULL_CSI_AVG, PolicyFamily.FULL_CSI_AVG_PEAK) else None
    return _row(
        q_avg, out_peak, family.value, report.lambda_star, None,
        est.mean, est.std_error, n, seed, report.flag,
    )


def write_csv(rows: list[dict], fh) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in rows:
        writer.writerow([_fmt(row[k]) for k in CSV_HEADER])


# --- configuration files -------------------------------------------------

_CONFIG_KEYS = {
    "gamma_m", "gamma_e", "gamma_p", "q_avg_grid", "policies", "q_peak",
    "q_peak_ratio", "n_samples", "seed", "tol", "n_partitions", "tau_max", "out",
}


def parse_config_file(path: str) -> dict:
    """Flat key = value lines; '#' starts a comment; unknown keys rejected."""
    values = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw.rstrip()!r}")
            key, _, val = line.partition("=")
            key = key.strip().lower()
            if key not in _CONFIG_KEYS:
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
            values[key] = val.strip()
    return values


def _parse_float_token(tok: str) -> float:
    if tok.strip().lower() == "inf":
        return math.inf
    return float(tok)


def config_from_file(values: dict) -> SweepConfig:
    try:
        params = FadingParams(
            float(values["gamma_m"]), float(values["gamma_e"]), float(values["gamma_p"])
        )
    except KeyError as missing:
        raise ValueError(f"config is missing required key {missing.args[0]!r}") from None
    if "q_avg_grid" not in values:
        raise ValueError("config is missing required key 'q_avg_grid'")
    grid = tuple(float(t) for t in values["q_avg_grid"].split(","))
    families = tuple(
        PolicyFamily(tok.strip())
        for tok in values.get("policies", "full_csi_avg").split(",")
    )
    if "q_peak" in values and "q_peak_ratio" in values:
        raise ValueError("q_peak and q_peak_ratio are mutually exclusive")
    peak_specs: tuple = (None,)
    if "q_peak" in values:
        peak_specs = tuple(
            None if math.isinf(v) else ("fixed", v)
            for v in (_parse_float_token(t) for t in values["q_peak"].split(","))
        )
    elif "q_peak_ratio" in values:
        peak_specs = tuple(("ratio", float(t)) for t in values["q_peak_ratio"].split(","))
    curves = []
    for family in families:
        if family is PolicyFamily.FULL_CSI_AVG_PEAK:
            for spec in peak_specs:
                curves.append((PolicyFamily.FULL_CSI_AVG, None) if spec is None else (family, spec))
        else:
            curves.append((family, None))
    kwargs = {}
    if "n_samples" in values:
        kwargs["n_samples"] = int(values["n_samples"])
    if "seed" in values:
        kwargs["seed"] = int(values["seed"])
    if "tol" in values:
        kwargs["tol"] = float(values["tol"])
    if "n_partitions" in values:
        kwargs["n_partitions"] = int(values["n_partitions"])
    if "tau_max" in values:
        kwargs["tau_max"] = float(values["tau_max"])
    if "out" in values:
        kwargs["out_path"] = values["out"]
    return SweepConfig(params=params, q_avg_grid=grid, curves=tuple(curves), **kwargs)


# --- argument parsing -----------------------------------------------------

def _add_fading_args(p):
    p.add_argument("--gamma-m", type=float, default=1.0, help="mean main-link power gain")
    p.add_argument("--gamma-e", type=float, default=1.0, help="mean eavesdropper-link power gain")
    p.add_argument("--gamma-p", type=float, default=2.0, help="mean primary-link power gain")


def _add_common_args(p):
    p.add_argument("--samples", type=int, default=DEFAULT_SAMPLES, help="Monte Carlo sample count")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED, help="master random seed")
    p.add_argument("--partitions", type=int, default=1, help="sample substream count")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL, help="relative calibration tolerance")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spectrum-secrecy",
        description="Secrecy-rate power allocation under received-power limits",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_cal = sub.add_parser("calibrate", help="calibrate a policy multiplier")
    p_cal.add_argument("--family", required=True,
                       choices=[f.value for f in PolicyFamily if f is not PolicyFamily.ON_OFF])
    _add_fading_args(p_cal)
    p_cal.add_argument("--q-avg", type=float, required=True)
    p_cal.add_argument("--q-peak", type=_parse_float_token, default=None)
    _add_common_args(p_cal)

    p_eval = sub.add_parser("evaluate", help="Monte Carlo secrecy rate of one policy")
    p_eval.add_argument("--family", required=True, choices=[f.value for f in PolicyFamily])
    _add_fading_args(p_eval)
    p_eval.add_argument("--q-avg", type=float, required=True)
    p_eval.add_argument("--q-peak", type=_parse_float_token, default=None)
    p_eval.add_argument("--lam", type=float, default=None,
                        help="multiplier; calibrated from --q-avg when omitted")
    p_eval.add_argument("--tau", type=float, default=None,
                        help="on/off threshold; optimized when omitted")
    p_eval.add_argument("--bits", action="store_true",
                        help="also report the rate in bits (presentation only)")
    _add_common_args(p_eval)

    p_sweep = sub.add_parser("sweep", help="rate sweep over a budget grid, CSV out")
    p_sweep.add_argument("--preset", choices=PRESETS, default=None)
    p_sweep.add_argument("--config", default=None, help="flat key=value config file")
    p_sweep.add_argument("--samples", type=int, default=None)
    p_sweep.add_argument("--seed", type=int, default=None)
    p_sweep.add_argument("--partitions", type=int, default=None)
    p_sweep.add_argument("--tol", type=float, default=None)
    p_sweep.add_argument("--out", default=None, help="CSV path (stdout when omitted)")
    return parser


def _cmd_calibrate(args) -> int:
    params = FadingParams(args.gamma_m, args.gamma_e, args.gamma_p)
    constraints = ConstraintSet(args.q_avg, args.q_peak)
    report = calibrate_lambda(
        PolicyFamily(args.family), params, constraints,
        args.tol, args.samples, args.seed, args.partitions,
    )
    print(f"family={args.family}")
    print(f"lambda_star={report.lambda_star:.17g}")
    print(f"achieved_avg_power={report.achieved_avg_power:.17g}")
    print(f"iterations={report.iterations}")
    print(f"residual={report.residual:.17g}")
    print(f"flag={report.flag}")
    return 0


def _cmd_evaluate(args) -> int:
    params = FadingParams(args.gamma_m, args.gamma_e, args.gamma_p)
    family = PolicyFamily(args.family)
    lam = args.lam
    tau = args.tau
    flag = ""
    if family is PolicyFamily.ON_OFF:
        if tau is None:
            tau, _ = optimize_threshold(params, args.q_avg)
        level = onoff_power_level(args.q_avg, params.gamma_P, params.gamma_M, tau)
        spec = PolicySpec.onoff(tau, level)
    else:
        if lam is None:
            constraints = ConstraintSet(args.q_avg, args.q_peak)
            report = calibrate_lambda(
                family, params, constraints, args.tol, args.samples, args.seed, args.partitions
            )
            lam = report.lambda_star
            flag = report.flag
        if family is PolicyFamily.FULL_CSI_AVG_PEAK:
            if args.q_peak is None:
                print("error: --q-peak is required for full_csi_avg_peak", file=sys.stderr)
                return 2
            spec = PolicySpec.full_csi_avg_peak(lam, args.q_peak)
        elif family is PolicyFamily.NO_ECSI:
            spec = PolicySpec.no_ecsi(lam, params.gamma_E)
        else:
            spec = PolicySpec.full_csi_avg(lam)
    est = ergodic_secrecy_rate_mc(spec, params, args.samples, args.seed, args.partitions)
    print(f"policy={family.value}")
    if lam is not None:
        print(f"lambda={lam:.17g}")
    if tau is not None:
        print(f"tau={tau:.17g}")
    print(f"rate_nats={est.mean:.17g}")
    if args.bits:
        print(f"rate_bits={est.mean / math.log(2.0):.17g}")
    print(f"std_err={est.std_error:.17g}")
    print(f"n_samples={est.n_samples}")
    print(f"seed={args.seed}")
    if flag:
        print(f"flag={flag}")
    return 0


def _cmd_sweep(args) -> int:
    if (args.preset is None) == (args.config is None):
        print("error: exactly one of --preset / --config is required", file=sys.stderr)
        return 2
    try:
        if args.preset is not None:
            config = preset_config(args.preset)
        else:
            config = config_from_file(parse_config_file(args.config))
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    overrides = {}
    if args.samples is not None:
        overrides["n_samples"] = args.samples
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.tol is not None:
        overrides["tol"] = args.tol
    if args.partitions is not None:
        overrides["n_partitions"] = args.partitions
    if args.out is not None:
        overrides["out_path"] = args.out
    if overrides:
        config = replace(config, **overrides)
    rows = run_sweep(config, log=lambda msg: print(msg, file=sys.stderr))
    if config.out_path:
        with open(config.out_path, "w", encoding="utf-8", newline="") as fh:
            write_csv(rows, fh)
        print(f"wrote {len(rows)} rows to {config.out_path}", file=sys.stderr)
    else:
        write_csv(rows, sys.stdout)
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "calibrate":
        return _cmd_calibrate(args)
    if args.command == "evaluate":
        return _cmd_evaluate(args)
    return _cmd_sweep(args)


if __name__ == "__main__":
    sys.exit(main())
