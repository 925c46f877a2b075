"""Dueling-bandit policies that learn a hidden utility direction by cutting
an ellipsoid of candidates, plus the simulated users, baselines and harness
used to exercise them."""

from .actions import (
    ActionSet,
    ActionSetParams,
    eps_net_of_ball,
    sample_unit_sphere,
    sphere_points,
    unit_ball,
)
from .algorithm import (
    AesResult,
    RaesConfig,
    RaesState,
    StepOutcome,
    compute_alpha,
    initial_state,
    oriented_axis,
    raes_step,
    recommended_t0,
    run_aes,
    run_raes,
)
from .baselines import Dbgd, Doubler, Oful, Sparring, dbgd_params
from .ellipsoid import (
    CutSpec,
    DecompositionError,
    EigenDecomp,
    Ellipsoid,
    FactoredEllipsoid,
    RejectedCut,
    cut,
    cut_direction,
    cut_spec_for,
    eigendecomp,
    volume_ratio,
)
from .harness import (
    ALGOS,
    ExperimentConfig,
    RunRecord,
    average_traces,
    config_hash,
    instance_theta,
    parse_v0,
    read_csv,
    resolve_lambda0,
    resolve_t0,
    run_experiment,
    run_sweep,
    streams_for,
    validate_config,
    write_csv,
)
from .svg import render_svg
from .trace import RegretTrace, build_trace
from .users import (
    BETA_MODES,
    Choice,
    RationalityParams,
    UserState,
    beta_cap,
    make_user,
    perfect_user,
)

__version__ = "0.1.0"

__all__ = [
    "ALGOS",
    "ActionSet",
    "ActionSetParams",
    "AesResult",
    "BETA_MODES",
    "Choice",
    "CutSpec",
    "Dbgd",
    "DecompositionError",
    "Doubler",
    "EigenDecomp",
    "Ellipsoid",
    "FactoredEllipsoid",
    "ExperimentConfig",
    "Oful",
    "RaesConfig",
    "RaesState",
    "RationalityParams",
    "RegretTrace",
    "RejectedCut",
    "RunRecord",
    "Sparring",
    "StepOutcome",
    "UserState",
    "average_traces",
    "beta_cap",
    "build_trace",
    "compute_alpha",
    "config_hash",
    "cut",
    "cut_direction",
    "cut_spec_for",
    "dbgd_params",
    "eigendecomp",
    "eps_net_of_ball",
    "initial_state",
    "instance_theta",
    "make_user",
    "oriented_axis",
    "parse_v0",
    "perfect_user",
    "raes_step",
    "read_csv",
    "recommended_t0",
    "render_svg",
    "resolve_lambda0",
    "resolve_t0",
    "run_aes",
    "run_experiment",
    "run_raes",
    "run_sweep",
    "sample_unit_sphere",
    "sphere_points",
    "streams_for",
    "unit_ball",
    "validate_config",
    "volume_ratio",
    "write_csv",
]
