"""Command-line experiment runner.

Subcommands mirror the experiment kinds:

    synth-stage    estimation error per stage on synthetic data
    synth-lambda   four-algorithm sweep over the penalty grid
    real-cv        cross-validated evaluation on CSV data
    diagnose       guarantee conditions and error bound on an instance

Options can come from a flat ``key = value`` config file (``--config``)
with the same names as the flags; explicit flags win.  Exit codes:
0 success, 1 usage error, 2 runtime or numerical error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from .algorithms import MultiStageConfig, multi_stage_fit
from .data import SyntheticSpec, generate_synthetic
from .diagnostics import error_bound_report
from .errors import NumericalError
from .experiments import (
    PRESETS,
    ExperimentConfig,
    ResultRow,
    emit_results,
    run_error_vs_lambda,
    run_error_vs_stage,
    run_real_data_cv,
)

__all__ = ["main"]


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad usage; the contract wants 1
    def error(self, message):
        raise _UsageError(message)


CONFIG_KEYS = {
    "preset", "m", "n", "d", "sigma", "zero-row-fraction", "within-row-zero-fraction",
    "coef-low", "coef-high", "seeds", "alphas", "theta-ratios", "dirty-ratios",
    "algorithms", "stages", "train-ratio", "train-ratios", "csv", "out", "eta",
    "s-extra", "lambda", "theta",
}


def _parse_config_file(path):
    values = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise _UsageError(f"{path}:{lineno}: expected key = value")
                key, val = (part.strip() for part in line.split("=", 1))
                if key not in CONFIG_KEYS:
                    raise _UsageError(f"{path}:{lineno}: unknown key {key!r}")
                values[key] = val
    except OSError as exc:
        raise _UsageError(f"cannot read config file {path}: {exc}") from exc
    return values


def _floats(text):
    return tuple(float(tok) for tok in str(text).split(",") if tok.strip())


def _ints(text):
    return tuple(int(tok) for tok in str(text).split(",") if tok.strip())


def _strs(text):
    return tuple(tok.strip() for tok in str(text).split(",") if tok.strip())


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mtsparse", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="flat key = value config file")
        p.add_argument("--preset", choices=sorted(PRESETS), help="named synthetic preset")
        p.add_argument("--seeds", help="comma-separated seed list")
        p.add_argument("--out", help="output CSV path")
        p.add_argument("--algorithms", help="comma-separated subset of multi_stage,lasso,l12,dirty")
        p.add_argument("--stages", type=int, help="stage budget for the staged fit")
        p.add_argument("--alphas", help="comma-separated lambda multipliers")
        p.add_argument("--theta-ratios", dest="theta_ratios",
                       help="theta/lambda multipliers (in units of m)")
        p.add_argument("--dirty-ratios", dest="dirty_ratios", help="lam_s/lam_b ratios")
        p.add_argument("--sigma", type=float, help="noise level override")
        p.add_argument("--m", type=int, help="task count override")
        p.add_argument("--n", type=int, help="samples per task override")
        p.add_argument("--d", type=int, help="feature count override")

    for name, desc in (
        ("synth-stage", "per-stage estimation error on synthetic data"),
        ("synth-lambda", "penalty sweep comparing the four algorithms"),
    ):
        p = sub.add_parser(name, help=desc)
        add_common(p)

    p = sub.add_parser("real-cv", help="cross-validated evaluation on CSV data")
    add_common(p)
    p.add_argument("--csv", help="long-format CSV file (task,y,x1,...,xd)")
    p.add_argument("--train-ratio", dest="train_ratio", type=float,
                   help="single training ratio (replaces the default list)")

    p = sub.add_parser("diagnose", help="guarantee conditions and error bound")
    add_common(p)
    p.add_argument("--eta", type=float, help="failure probability (default 0.05)")
    p.add_argument("--s-extra", dest="s_extra", type=int,
                   help="sparsity slack added to the nonzero-row count")
    p.add_argument("--lambda", dest="lam", type=float,
                   help="penalty level (default: smallest admissible)")
    p.add_argument("--theta", type=float,
                   help="row cap (default: smallest admissible)")
    return parser


def _build_spec(file_cfg, args) -> SyntheticSpec:
    preset = getattr(args, "preset", None) or file_cfg.get("preset")
    if preset is not None:
        if preset not in PRESETS:
            raise _UsageError(f"unknown preset {preset!r}")
        spec = PRESETS[preset]
    else:
        spec = PRESETS["small"]
    updates = {}
    for attr, key, cast in (
        ("m", "m", int), ("n", "n", int), ("d", "d", int), ("sigma", "sigma", float),
        ("zero_row_fraction", "zero-row-fraction", float),
        ("within_row_zero_fraction", "within-row-zero-fraction", float),
        ("coef_low", "coef-low", float), ("coef_high", "coef-high", float),
    ):
        flag_val = getattr(args, attr, None) if attr in ("m", "n", "d", "sigma") else None
        if flag_val is not None:
            updates[attr] = flag_val
        elif key in file_cfg:
            updates[attr] = cast(file_cfg[key])
    return replace(spec, **updates) if updates else spec


def _build_config(args) -> ExperimentConfig:
    file_cfg = _parse_config_file(args.config) if args.config else {}

    def pick(attr, key, cast, default):
        val = getattr(args, attr, None)
        if val is not None:
            return cast(val) if isinstance(val, str) else val
        if key in file_cfg:
            return cast(file_cfg[key])
        return default

    base = ExperimentConfig(kind=args.command)
    kwargs = dict(
        kind=args.command,
        spec=_build_spec(file_cfg, args),
        csv_path=pick("csv", "csv", str, None),
        seeds=pick("seeds", "seeds", _ints, base.seeds),
        alphas=pick("alphas", "alphas", _floats, base.alphas),
        theta_ratio_multipliers=pick("theta_ratios", "theta-ratios", _floats,
                                     base.theta_ratio_multipliers),
        dirty_ratios=pick("dirty_ratios", "dirty-ratios", _floats, base.dirty_ratios),
        algorithms=pick("algorithms", "algorithms", _strs, base.algorithms),
        stages=pick("stages", "stages", int, base.stages),
        out_path=pick("out", "out", str, None),
        eta=pick("eta", "eta", float, base.eta),
        s_extra=pick("s_extra", "s-extra", int, base.s_extra),
    )
    single_ratio = getattr(args, "train_ratio", None)
    if single_ratio is not None:
        kwargs["train_ratios"] = (single_ratio,)
    elif "train-ratio" in file_cfg:
        kwargs["train_ratios"] = (float(file_cfg["train-ratio"]),)
    elif "train-ratios" in file_cfg:
        kwargs["train_ratios"] = _floats(file_cfg["train-ratios"])
    else:
        kwargs["train_ratios"] = base.train_ratios
    try:
        return ExperimentConfig(**kwargs)
    except ValueError as exc:
        raise _UsageError(str(exc)) from exc


def _run_diagnose(config: ExperimentConfig, lam, theta):
    """Report rows for the first seed's instance, tightest admissible parameters."""
    spec = replace(config.spec, seed=config.seeds[0])
    inst = generate_synthetic(spec)
    truth = inst.true_weights
    r_bar = int((abs(truth).sum(axis=1) > 0).sum())
    s = r_bar + config.s_extra
    probe = error_bound_report(inst.data, truth, spec.sigma, config.eta, s,
                               lam=1.0, theta=1.0, stages=config.stages)
    lam = lam if lam is not None else max(probe.lambda_min, 1e-12)
    if theta is None:
        ref = error_bound_report(inst.data, truth, spec.sigma, config.eta, s,
                                 lam=lam, theta=1.0, stages=config.stages)
        theta = ref.theta_min if ref.theta_min < float("inf") else 1.0
    report = error_bound_report(inst.data, truth, spec.sigma, config.eta, s,
                                lam=lam, theta=theta, stages=config.stages)
    fit = multi_stage_fit(
        inst.data,
        MultiStageConfig(lam=lam, theta=theta, stages=config.stages,
                         inner=config.inner, stage_stop_tol=0.0),
        ground_truth=truth,
    )
    seed = config.seeds[0]
    rows = []

    def add(metric, value, stage=0):
        rows.append(ResultRow("diagnose", seed, "multi_stage", stage, lam, theta,
                              metric, float(value), 0.0))

    add("lambda_min", report.lambda_min)
    add("theta_min", report.theta_min)
    add("u", report.u)
    add("r_bar", report.r_bar)
    add("s", report.s)
    add("eta", report.eta)
    add("row_norm_condition", float(report.row_norm_condition_met))
    add("eigenvalue_condition", float(report.eigenvalue_condition_met))
    add("lambda_condition", float(report.lambda_condition_met))
    add("theta_condition", float(report.theta_condition_met))
    for stage, (bound, tr) in enumerate(zip(report.bound_per_stage, fit.stage_traces), start=1):
        add("error_bound", bound, stage)
        add("error_l21", tr.param_error_l21, stage)
    return rows


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help and friends
        return 0 if exc.code in (0, None) else 1
    try:
        config = _build_config(args)
        if config.kind == "synth-stage":
            rows = run_error_vs_stage(config)
        elif config.kind == "synth-lambda":
            rows = run_error_vs_lambda(config)
        elif config.kind == "real-cv":
            if config.csv_path is None:
                raise _UsageError("real-cv requires --csv")
            rows = run_real_data_cv(config)
        else:
            rows = _run_diagnose(config, getattr(args, "lam", None),
                                 getattr(args, "theta", None))
        out = config.out_path or f"{config.kind}-results.csv"
        emit_results(rows, out)
        print(f"wrote {len(rows)} rows to {out}")
        return 0
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (NumericalError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
