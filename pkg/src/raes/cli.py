"""Command line entry points: run, sweep, plot, selftest.

Exit codes: 0 on success, 1 for usage and configuration errors, 2 for
runtime failures (including failed selftest checks).
"""

from __future__ import annotations

import argparse
import json
import sys
from collections import Counter

import numpy as np

from .actions import unit_ball
from .algorithm import RaesConfig, initial_state, raes_step
from .ellipsoid import Ellipsoid, cut, cut_spec_for, volume_ratio
from .harness import (
    ExperimentConfig,
    config_field_names,
    read_csv,
    run_experiment,
    run_sweep,
    write_csv,
)
from .svg import render_svg
from .users import RationalityParams, make_user, perfect_user


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.prog}: {message}\n{self.format_usage()}")


def _auto_int(text: str):
    return text if text == "auto" else int(text)


def _auto_float(text: str):
    return text if text == "auto" else float(text)


_FLAG_TO_FIELD = {
    "algo": "algo",
    "d": "d",
    "t": "t_horizon",
    "t0": "t0",
    "k": "k",
    "delta": "delta",
    "c": "c",
    "gamma": "gamma",
    "noise_sigma": "noise_sigma",
    "beta_mode": "beta_mode",
    "v0": "v0",
    "lambda0": "lambda0",
    "seeds": "n_seeds",
    "base_seed": "base_seed",
    "out": "out_path",
}


def _add_scalar_flags(parser: argparse.ArgumentParser, skip=()) -> None:
    spec = {
        "algo": dict(type=str, help="policy to run"),
        "d": dict(type=int, help="dimension"),
        "t": dict(type=int, help="rounds per run"),
        "t0": dict(type=_auto_int, help="cut budget, integer or 'auto'"),
        "k": dict(type=float, help="cut acceptance slack factor"),
        "delta": dict(type=float, help="confidence level"),
        "c": dict(type=float, help="user perturbation scale"),
        "gamma": dict(type=float, help="user perturbation growth exponent"),
        "noise_sigma": dict(type=float, help="reward noise scale"),
        "beta_mode": dict(type=str, help="perturbation mode"),
        "v0": dict(type=str, help="user Gram prior, e.g. identity:1 or diag:100,10,5,2,1"),
        "lambda0": dict(type=_auto_float, help="Gram estimate prior, float or 'auto'"),
        "seeds": dict(type=int, help="number of seeds"),
        "base_seed": dict(type=int, help="base seed"),
        "out": dict(type=str, help="output CSV path"),
    }
    for flag, kw in spec.items():
        if flag in skip:
            continue
        parser.add_argument(f"--{flag.replace('_', '-')}", dest=flag, default=None, **kw)


def _config_from(args: argparse.Namespace, skip=()) -> ExperimentConfig:
    """Defaults, then JSON config file, then explicit flags."""
    cfg = ExperimentConfig()
    config_path = getattr(args, "config", None)
    if config_path:
        with open(config_path) as fh:
            raw = json.load(fh)
        if not isinstance(raw, dict):
            raise ValueError("config file must hold a JSON object")
        known = config_field_names()
        for key, val in raw.items():
            if key not in known:
                raise ValueError(f"unknown config key {key!r}")
            setattr(cfg, key, val)
    for flag, field_name in _FLAG_TO_FIELD.items():
        if flag in skip:
            continue
        val = getattr(args, flag, None)
        if val is not None:
            setattr(cfg, field_name, val)
    return cfg


def _print_records(records) -> None:
    for rec in records:
        print(
            f"{rec.algo} seed={rec.seed} final_regret={rec.final_regret:.6g} "
            f"wall={rec.wall_time:.3f}s config={rec.config_hash}",
            file=sys.stderr,
        )


def _cmd_run(args: argparse.Namespace) -> int:
    cfg = _config_from(args)
    traces, records = run_experiment(cfg)
    write_csv(cfg.out_path, traces)
    _print_records(records)
    print(cfg.out_path)
    return 0


def _cmd_sweep(args: argparse.Namespace) -> int:
    base = _config_from(args, skip=("algo", "gamma", "v0"))
    algos = args.algo.split(",") if args.algo else [base.algo]
    gammas = [float(x) for x in args.gamma.split(",")] if args.gamma else [base.gamma]
    v0s = args.v0.split(";") if args.v0 else [base.v0]
    traces, records = run_sweep(base, algos, gammas, v0s)
    write_csv(base.out_path, traces)
    _print_records(records)
    print(base.out_path)
    return 0


def _cmd_plot(args: argparse.Namespace) -> int:
    traces = read_csv(args.infile)
    if not traces:
        raise ValueError(f"no traces in {args.infile}")
    counts = Counter(tr.algo for tr in traces)
    series = {}
    for tr in traces:
        label = tr.algo if counts[tr.algo] == 1 else f"{tr.algo}#{tr.seed}"
        series[label] = tr.cum_regret
    render_svg(series, args.out, title=args.title)
    print(args.out)
    return 0


def _check_cut_volume_identity() -> None:
    rng = np.random.default_rng(11)
    for _ in range(50):
        d = int(rng.integers(2, 7))
        q, _ = np.linalg.qr(rng.standard_normal((d, d)))
        shape = q @ np.diag(np.exp(rng.uniform(-1.0, 1.0, d))) @ q.T
        e = Ellipsoid(center=rng.standard_normal(d), shape=0.5 * (shape + shape.T))
        g = rng.standard_normal(d)
        g /= np.linalg.norm(g)
        alpha = float(rng.uniform(-0.9 / d, 0.8))
        width = float(np.sqrt(g @ e.shape @ g))
        after = cut(e, cut_spec_for(e, g, -alpha * width))
        _, ld_before = np.linalg.slogdet(e.shape)
        _, ld_after = np.linalg.slogdet(after.shape)
        got = float(np.exp(0.5 * (ld_after - ld_before)))
        want = volume_ratio(alpha, d)
        if abs(got - want) > 1e-8 * want:
            raise AssertionError(f"volume ratio {got} != {want} at d={d}, alpha={alpha}")


def _check_containment() -> None:
    rng = np.random.default_rng(5)
    theta = rng.standard_normal(3)
    theta /= np.linalg.norm(theta)
    user = perfect_user(theta)
    cfg = RaesConfig(t_horizon=60, t0=60, c=0.0, lambda0=1.0)
    action_set = unit_ball(3)
    state = initial_state(cfg, 3)
    for _ in range(cfg.t_horizon):
        raes_step(state, cfg, action_set, user)
        if not state.ellipsoid.contains(theta, tol=1e-9):
            raise AssertionError(f"lost the target at round {state.round}")


def _check_determinism() -> None:
    cfg = ExperimentConfig(algo="raes", t_horizon=50, t0=20, n_seeds=2)
    first, _ = run_experiment(cfg)
    second, _ = run_experiment(cfg)
    for a, b in zip(first, second):
        if a.cum_regret.tobytes() != b.cum_regret.tobytes():
            raise AssertionError(f"seed {a.seed} differs between identical runs")


def _check_volume_bound() -> None:
    rng_parts = np.random.default_rng(23)
    theta = rng_parts.standard_normal(5)
    theta /= np.linalg.norm(theta)
    params = RationalityParams()
    # A rich prior is the regime where duels certify cuts at all; the
    # system's lambda0 must match what the user actually holds.
    user = make_user(theta, 1000.0, params,
                     np.random.default_rng(101), np.random.default_rng(102))
    cfg = RaesConfig(t_horizon=120, t0=120, lambda0=1000.0)
    action_set = unit_ball(5)
    state = initial_state(cfg, 5)
    bound = float(np.exp(-((cfg.k - 1.0) ** 2) / (2.0 * cfg.k ** 2 * 5)))
    cuts = 0
    for _ in range(cfg.t_horizon):
        ld_before = float(np.sum(np.log(state.ellipsoid.spectrum)))
        out = raes_step(state, cfg, action_set, user)
        if out.branch == "cut":
            cuts += 1
            ld_after = float(np.sum(np.log(state.ellipsoid.spectrum)))
            ratio = float(np.exp(0.5 * (ld_after - ld_before)))
            if ratio > bound + 1e-12:
                raise AssertionError(f"cut shrank volume by only {ratio} > {bound}")
    if cuts == 0:
        raise AssertionError("no cuts fired, nothing audited")


def _cmd_selftest(args: argparse.Namespace) -> int:
    checks = [
        ("cut-volume-identity", _check_cut_volume_identity),
        ("containment", _check_containment),
        ("determinism", _check_determinism),
        ("volume-bound", _check_volume_bound),
    ]
    failures = 0
    for name, fn in checks:
        try:
            fn()
        except Exception as exc:
            failures += 1
            print(f"FAIL {name}: {exc}")
        else:
            print(f"PASS {name}")
    return 0 if failures == 0 else 2


def _build_parser() -> _Parser:
    parser = _Parser(prog="raes", description="Dueling-bandit ellipsoid experiments")
    sub = parser.add_subparsers(dest="command")

    p_run = sub.add_parser("run", parents=[], help="run one config and write a CSV")
    p_run.add_argument("--config", type=str, default=None, help="JSON config file")
    _add_scalar_flags(p_run)
    p_run.set_defaults(func=_cmd_run)

    p_sweep = sub.add_parser("sweep", help="cross-product sweep, averaged per cell")
    p_sweep.add_argument("--config", type=str, default=None, help="JSON config file")
    p_sweep.add_argument("--algo", type=str, default=None,
                         help="comma-separated policies")
    p_sweep.add_argument("--gamma", type=str, default=None,
                         help="comma-separated gamma values")
    p_sweep.add_argument("--v0", type=str, default=None,
                         help="semicolon-separated v0 specs")
    _add_scalar_flags(p_sweep, skip=("algo", "gamma", "v0"))
    p_sweep.set_defaults(func=_cmd_sweep)

    p_plot = sub.add_parser("plot", help="render a CSV of traces to SVG")
    p_plot.add_argument("--in", dest="infile", required=True, help="input CSV")
    p_plot.add_argument("--out", dest="out", default="regret.svg", help="output SVG")
    p_plot.add_argument("--title", type=str, default="", help="chart title")
    p_plot.set_defaults(func=_cmd_plot)

    p_self = sub.add_parser("selftest", help="quick invariant checks")
    p_self.set_defaults(func=_cmd_selftest)

    return parser


def cli_main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    if getattr(args, "command", None) is None:
        print(parser.format_usage(), file=sys.stderr)
        return 1
    try:
        return args.func(args)
    except _UsageError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except (ValueError, json.JSONDecodeError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # runtime failure, distinct from bad input
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(cli_main())
