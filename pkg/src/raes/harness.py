"""Experiment orchestration: configs, seed streams, runs, CSV round trips.

Reproducibility contract: a config fully determines its results. The hidden
utility vector is drawn once per config from the base seed, and every run
gets three private streams (reward noise, user perturbations, algorithm
randomness) keyed by base seed, run index and role, so algorithms can be
compared on identical user behavior seed by seed.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import time
from dataclasses import asdict, dataclass, fields, replace

import numpy as np

from .actions import sample_unit_sphere, unit_ball
from .algorithm import RaesConfig, run_aes, run_raes
from .baselines import Dbgd, Doubler, Sparring, dbgd_params
from .trace import RegretTrace, build_trace
from .users import BETA_MODES, RationalityParams, make_user, perfect_user

ALGOS = ("raes", "aes", "dbgd", "doubler", "sparring")

ROLE_NOISE = 0
ROLE_BETA = 1
ROLE_ALGO = 2

CSV_HEADER = ("algo", "seed", "t", "branch", "inst_regret", "cum_regret")
CSV_FLOAT_FMT = "%.9g"

DEFAULT_T0_FACTOR = 0.25


@dataclass
class ExperimentConfig:
    """Everything a run needs. t0 and lambda0 accept the string "auto":
    t0 becomes round(0.25 * d**2 * sqrt(t_horizon)) and lambda0 the smallest
    entry of the v0 spectrum. v0 uses a small grammar: "identity:v",
    "diag:v1,...,vd" or "split:hi,lo" (first ceil(d/2) directions get hi).
    """

    algo: str = "raes"
    d: int = 5
    t_horizon: int = 10000
    t0: int | str = "auto"
    k: float = 1.05
    delta: float = 0.1
    c: float = 1.0
    gamma: float = 0.0
    noise_sigma: float = 0.1
    beta_mode: str = "uniform_random"
    v0: str = "identity:1"
    lambda0: float | str = "auto"
    n_seeds: int = 10
    base_seed: int = 42
    out_path: str = "results.csv"


@dataclass(frozen=True)
class RunRecord:
    """One seed's summary line, logged by the CLI."""

    config_hash: str
    seed: int
    algo: str
    final_regret: float
    wall_time: float


def parse_v0(text: str, d: int) -> np.ndarray:
    """Parse the v0 grammar into a length-d spectrum of positive entries."""
    if not isinstance(text, str):
        raise ValueError(f"v0 must be a string, got {type(text).__name__}")
    head, sep, tail = text.partition(":")
    if not sep:
        raise ValueError(f"v0 must look like kind:values, got {text!r}")
    try:
        vals = [float(x) for x in tail.split(",")] if tail else []
    except ValueError:
        raise ValueError(f"v0 has a non-numeric entry: {text!r}") from None
    if head == "identity":
        if len(vals) != 1:
            raise ValueError("v0 identity takes exactly one value")
        spectrum = np.full(d, vals[0])
    elif head == "diag":
        if len(vals) != d:
            raise ValueError(f"v0 diag needs {d} values, got {len(vals)}")
        spectrum = np.array(vals)
    elif head == "split":
        if len(vals) != 2:
            raise ValueError("v0 split takes exactly two values")
        hi = (d + 1) // 2
        spectrum = np.array([vals[0]] * hi + [vals[1]] * (d - hi))
    else:
        raise ValueError(f"unknown v0 kind {head!r}")
    if np.any(spectrum <= 0.0):
        raise ValueError("v0 entries must be positive")
    return spectrum


def resolve_t0(cfg: ExperimentConfig) -> int:
    if cfg.t0 == "auto":
        return int(round(DEFAULT_T0_FACTOR * cfg.d ** 2 * math.sqrt(cfg.t_horizon)))
    t0 = int(cfg.t0)
    if not 0 <= t0 <= cfg.t_horizon:
        raise ValueError(f"t0 must lie in [0, {cfg.t_horizon}], got {t0}")
    return t0


def resolve_lambda0(cfg: ExperimentConfig, spectrum: np.ndarray) -> float:
    if cfg.lambda0 == "auto":
        return float(np.min(spectrum))
    lam = float(cfg.lambda0)
    if lam <= 0.0:
        raise ValueError("lambda0 must be positive")
    return lam


def validate_config(cfg: ExperimentConfig) -> None:
    """Raise ValueError naming the offending field."""
    if cfg.algo not in ALGOS:
        raise ValueError(f"algo must be one of {ALGOS}, got {cfg.algo!r}")
    if cfg.d < 2:
        raise ValueError(f"d must be >= 2, got {cfg.d}")
    if cfg.t_horizon < 1:
        raise ValueError(f"t_horizon must be >= 1, got {cfg.t_horizon}")
    resolve_t0(cfg)
    if cfg.k <= 1.0:
        raise ValueError(f"k must exceed 1, got {cfg.k}")
    if not 0.0 < cfg.delta < 1.0:
        raise ValueError(f"delta must lie in (0, 1), got {cfg.delta}")
    if cfg.c <= 0.0:
        raise ValueError(f"c must be positive, got {cfg.c}")
    if not 0.0 <= cfg.gamma < 0.5:
        raise ValueError(f"gamma must lie in [0, 0.5), got {cfg.gamma}")
    if cfg.noise_sigma < 0.0:
        raise ValueError(f"noise_sigma must be nonnegative, got {cfg.noise_sigma}")
    if cfg.beta_mode not in BETA_MODES:
        raise ValueError(f"beta_mode must be one of {BETA_MODES}, got {cfg.beta_mode!r}")
    spectrum = parse_v0(cfg.v0, cfg.d)
    resolve_lambda0(cfg, spectrum)
    if cfg.n_seeds < 1:
        raise ValueError(f"n_seeds must be >= 1, got {cfg.n_seeds}")
    if cfg.base_seed < 0:
        raise ValueError(f"base_seed must be nonnegative, got {cfg.base_seed}")


def config_hash(cfg: ExperimentConfig) -> str:
    """Short digest of everything except the output location."""
    payload = asdict(cfg)
    payload.pop("out_path", None)
    blob = json.dumps(payload, sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:12]


def instance_theta(cfg: ExperimentConfig) -> np.ndarray:
    """Hidden unit utility vector, shared by every seed of a config."""
    return sample_unit_sphere(cfg.d, np.random.default_rng([cfg.base_seed]))


def streams_for(cfg: ExperimentConfig, run_index: int):
    """(noise, perturbation, algorithm) generators for one run."""
    def mk(role: int) -> np.random.Generator:
        return np.random.default_rng([cfg.base_seed, run_index, role])

    return mk(ROLE_NOISE), mk(ROLE_BETA), mk(ROLE_ALGO)


def _make_baseline(cfg: ExperimentConfig):
    if cfg.algo == "dbgd":
        step_explore, step_update = dbgd_params(cfg.d, cfg.t_horizon)
        return Dbgd(cfg.d, step_explore, step_update)
    if cfg.algo == "doubler":
        return Doubler(cfg.d, delta=cfg.delta)
    if cfg.algo == "sparring":
        return Sparring(cfg.d, delta=cfg.delta)
    raise ValueError(f"no baseline named {cfg.algo!r}")


def run_experiment(cfg: ExperimentConfig):
    """Run every seed of a config; returns (traces, records) in seed order."""
    validate_config(cfg)
    theta = instance_theta(cfg)
    spectrum = parse_v0(cfg.v0, cfg.d)
    t0 = resolve_t0(cfg)
    lam0 = resolve_lambda0(cfg, spectrum)
    chash = config_hash(cfg)
    action_set = unit_ball(cfg.d)
    params = RationalityParams(
        c=cfg.c, gamma=cfg.gamma, noise_sigma=cfg.noise_sigma, beta_mode=cfg.beta_mode
    )
    traces: list[RegretTrace] = []
    records: list[RunRecord] = []
    for i in range(cfg.n_seeds):
        noise_rng, beta_rng, algo_rng = streams_for(cfg, i)
        tic = time.perf_counter()
        if cfg.algo == "aes":
            # The noiseless loop only makes sense against the idealized user;
            # its presented pairs are antipodal, so per-round regret is flat 2.
            user = perfect_user(theta, noise_rng=noise_rng, beta_rng=beta_rng)
            run_aes(cfg.d, cfg.t_horizon, user)
            trace = build_trace("aes", i, np.full(cfg.t_horizon, 2.0), ["cut"] * cfg.t_horizon)
        elif cfg.algo == "raes":
            user = make_user(theta, spectrum, params, noise_rng, beta_rng)
            rcfg = RaesConfig(
                t_horizon=cfg.t_horizon, t0=t0, k=cfg.k, delta=cfg.delta,
                c=cfg.c, gamma=cfg.gamma, lambda0=lam0,
            )
            trace = run_raes(rcfg, action_set, user)
            trace.seed = i
        else:
            user = make_user(theta, spectrum, params, noise_rng, beta_rng)
            policy = _make_baseline(cfg)
            best = action_set.best_arm(theta)
            top = 2.0 * float(theta @ best)
            inst = np.empty(cfg.t_horizon)
            for j in range(cfg.t_horizon):
                pair, _ = policy.step(action_set, user, j + 1, algo_rng)
                inst[j] = top - float(theta @ (pair[0] + pair[1]))
            trace = build_trace(cfg.algo, i, inst, ["duel"] * cfg.t_horizon)
        trace.seed = i
        traces.append(trace)
        records.append(RunRecord(
            config_hash=chash, seed=i, algo=cfg.algo,
            final_regret=float(trace.cum_regret[-1]),
            wall_time=time.perf_counter() - tic,
        ))
    return traces, records


def average_traces(traces: list[RegretTrace]) -> RegretTrace:
    """Seed-average a homogeneous list of traces; branches are dropped."""
    if not traces:
        raise ValueError("nothing to average")
    n = traces[0].rounds.size
    if any(tr.rounds.size != n for tr in traces):
        raise ValueError("traces must share one horizon to be averaged")
    inst = np.mean([tr.inst_regret for tr in traces], axis=0)
    return build_trace(traces[0].algo, -1, inst, [""] * n)


def write_csv(path: str, traces: list[RegretTrace]) -> None:
    """Write traces as rows of algo,seed,t,branch,inst_regret,cum_regret.

    Floats use 9 significant digits; the file is newline-terminated and
    bitwise deterministic for identical traces.
    """
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for tr in traces:
            for i in range(tr.rounds.size):
                writer.writerow([
                    tr.algo,
                    tr.seed,
                    int(tr.rounds[i]),
                    tr.branches[i],
                    CSV_FLOAT_FMT % tr.inst_regret[i],
                    CSV_FLOAT_FMT % tr.cum_regret[i],
                ])


def read_csv(path: str) -> list[RegretTrace]:
    """Read traces back, grouping consecutive rows by (algo, seed).

    Malformed rows raise ValueError naming the 1-based file row.
    """
    traces: list[RegretTrace] = []
    key = None
    rounds: list[int] = []
    branches: list[str] = []
    inst: list[float] = []
    cum: list[float] = []

    def flush() -> None:
        if key is not None:
            traces.append(RegretTrace(
                algo=key[0], seed=key[1], rounds=np.array(rounds, dtype=int),
                branches=list(branches), inst_regret=np.array(inst),
                cum_regret=np.array(cum),
            ))

    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != list(CSV_HEADER):
            raise ValueError(f"row 1: expected header {','.join(CSV_HEADER)}")
        for n, row in enumerate(reader, start=2):
            if len(row) != len(CSV_HEADER):
                raise ValueError(f"row {n}: expected {len(CSV_HEADER)} fields, got {len(row)}")
            try:
                seed = int(row[1])
                t = int(row[2])
                ir = float(row[4])
                cr = float(row[5])
            except ValueError:
                raise ValueError(f"row {n}: non-numeric field in {row!r}") from None
            if (row[0], seed) != key:
                flush()
                key = (row[0], seed)
                rounds, branches, inst, cum = [], [], [], []
            rounds.append(t)
            branches.append(row[3])
            inst.append(ir)
            cum.append(cr)
    flush()
    return traces


def sweep_label(algo: str, gamma: float, v0: str) -> str:
    """Stable series label for one sweep cell."""
    return f"{algo};gamma={gamma:g};v0={v0}"


def run_sweep(base: ExperimentConfig, algos, gammas, v0s):
    """Cross-product sweep; returns (averaged traces, all records)."""
    traces: list[RegretTrace] = []
    records: list[RunRecord] = []
    for algo in algos:
        for gamma in gammas:
            for v0 in v0s:
                cfg = replace(base, algo=algo, gamma=gamma, v0=v0)
                runs, recs = run_experiment(cfg)
                avg = average_traces(runs)
                avg.algo = sweep_label(algo, gamma, v0)
                traces.append(avg)
                records.extend(recs)
    return traces, records


def config_field_names() -> set:
    return {f.name for f in fields(ExperimentConfig)}
