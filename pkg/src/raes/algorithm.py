"""Ellipsoid-shrinking duel policies.

run_raes plays against a noisy, perturbed user: rounds either cut the
ellipsoid of candidate utility vectors when the duel is informative enough,
explore to sharpen the user's own estimate when it is not, or exploit the
ellipsoid's long axis once the cut budget t0 is spent. run_aes is the
noiseless specialization: central cuts every round, no reward feedback.
"""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from .actions import ActionSet
from .ellipsoid import FactoredEllipsoid, RejectedCut, eigendecomp
from .trace import RegretTrace, build_trace
from .users import Choice, UserState

EXPLORE_TOP_WEIGHT = 0.8
EXPLORE_BOTTOM_WEIGHT = 0.6


@dataclass(frozen=True)
class RaesConfig:
    """Tuning for the cut loop.

    t0 is the number of leading rounds allowed to cut or explore; every
    round after it exploits. m sets the separation of the antipodal cut
    pair, placed at +-(m/2) along the cut direction (defaults to 2 * d0,
    the widest pair the inner ball guarantees). union_bound spends the
    confidence budget delta across the t0 duels instead of per round. c may
    be zero here, modeling duels against a user who never strays; the
    user's own parameters are validated separately.
    """

    t_horizon: int
    t0: int
    k: float = 1.05
    delta: float = 0.1
    c: float = 1.0
    gamma: float = 0.0
    lambda0: float = 1.0
    m: float | None = None
    union_bound: bool = False

    def __post_init__(self) -> None:
        if self.t_horizon < 1:
            raise ValueError("t_horizon must be >= 1")
        if not 0 <= self.t0 <= self.t_horizon:
            raise ValueError("t0 must lie in [0, t_horizon]")
        if self.k <= 1.0:
            raise ValueError("k must exceed 1")
        if not 0.0 < self.delta < 1.0:
            raise ValueError("delta must lie in (0, 1)")
        if self.c < 0.0:
            raise ValueError("c must be nonnegative")
        if not 0.0 <= self.gamma < 0.5:
            raise ValueError("gamma must lie in [0, 0.5)")
        if self.lambda0 <= 0.0:
            raise ValueError("lambda0 must be positive")
        if self.m is not None and self.m <= 0.0:
            raise ValueError("m must be positive")
        if self.union_bound and self.t0 < 1:
            raise ValueError("union_bound needs t0 >= 1")


@dataclass
class RaesState:
    """Mutable per-run state: the ellipsoid, the Gram estimate of the user's
    statistics, and branch counters.

    The ellipsoid is held in factored form because repeated cuts spread its
    axes over more orders of magnitude than a dense shape matrix can carry;
    the factors also hand the cut loop its eigenbasis for free.
    """

    ellipsoid: FactoredEllipsoid
    gram_est: np.ndarray
    round: int = 0
    n_cuts: int = 0
    n_explores: int = 0
    n_exploits: int = 0

    def replace_ellipsoid(self, e: FactoredEllipsoid) -> None:
        self.ellipsoid = e


@dataclass(frozen=True)
class StepOutcome:
    """What one round did: its branch, the presented pair, the duel depth
    (nan when exploiting) and the user's choice."""

    branch: str
    pair: tuple[np.ndarray, np.ndarray]
    alpha: float
    choice: Choice


def initial_state(cfg: RaesConfig, d: int) -> RaesState:
    """Unit-ball ellipsoid around the origin, Gram estimate lambda0 * I."""
    if d < 2:
        raise ValueError("need dimension >= 2")
    return RaesState(
        ellipsoid=FactoredEllipsoid.unit(d),
        gram_est=cfg.lambda0 * np.eye(d),
    )


def oriented_axis(e: FactoredEllipsoid) -> np.ndarray:
    """Widest axis of the ellipsoid, signed toward the center's halfspace.

    Of the two unit candidates along the widest axis, the one with
    nonnegative inner product against the center sits deeper inside the
    ellipsoid, and the center's long-axis coordinate tracks the hidden
    vector's sign once the transverse axes have collapsed. Ties resolve to
    the positive candidate.
    """
    u1 = e.basis[:, 0]
    s = float(e.center_coords[0])
    return -u1 if s < 0.0 else u1.copy()


def compute_alpha(
    state: RaesState,
    cfg: RaesConfig,
    a0: np.ndarray,
    a1: np.ndarray,
    g: np.ndarray,
    eps0: float,
) -> float:
    """Depth of the halfspace a duel on (a0, a1) can certify.

    The numerator is the total index slack a choice may hide: perturbation
    caps on both arms plus the estimation radius times the pair difference,
    all in the Gram-estimate norm, plus twice the covering slack. Dividing
    by the width ||g||_P of the shape matrix along the cut direction
    converts the slack into normalized depth. The result is never positive:
    a duel only certifies shallow cuts, with depth approaching 0 as the
    user's statistics sharpen. g must lie in the plane of the two widest
    axes, which is where the cut loop always aims.
    """
    t = state.round + 1
    a0 = np.asarray(a0, dtype=float)
    a1 = np.asarray(a1, dtype=float)
    g = np.asarray(g, dtype=float)
    cols = np.stack((a0, a1, a0 - a1), axis=1)
    sols = np.linalg.solve(state.gram_est, cols)
    n0 = math.sqrt(max(0.0, float(a0 @ sols[:, 0])))
    n1 = math.sqrt(max(0.0, float(a1 @ sols[:, 1])))
    nd = math.sqrt(max(0.0, float((a0 - a1) @ sols[:, 2])))
    delta = cfg.delta / cfg.t0 if cfg.union_bound else cfg.delta
    conf = math.sqrt(math.log(1.0 / delta))
    slack = beta_scale(cfg, t) * (n0 + n1 + conf * nd) + 2.0 * eps0
    width = state.ellipsoid.plane_width(state.ellipsoid.basis[:, :2].T @ g)
    return -slack / width


def beta_scale(cfg: RaesConfig, t: int) -> float:
    """Perturbation cap c * t**gamma assumed of the user at round t."""
    return cfg.c * float(t) ** cfg.gamma


def raes_step(state: RaesState, cfg: RaesConfig, action_set: ActionSet, user: UserState) -> StepOutcome:
    """Play one round and fold the outcome into state and user.

    Rounds up to t0 first price a central-direction duel: if the certified
    depth clears -1/(k*d) the antipodal pair is played and the loser's
    halfspace is cut away, otherwise the round explores along the Gram
    estimate's extreme axes to fatten the user's thin directions. A cut the
    geometry rejects late (stale depth) downgrades the round to exploration
    with the pair already played. Rounds after t0 exploit the long axis with
    an identical pair. Every round ends with the user observing a reward on
    her chosen arm and the Gram estimate absorbing that arm.
    """
    t = state.round + 1
    d = state.ellipsoid.dim
    d0 = action_set.params.d0
    eps0 = action_set.params.eps0
    m = cfg.m if cfg.m is not None else 2.0 * d0
    alpha = math.nan

    if t <= cfg.t0:
        fe = state.ellipsoid
        g_coords = fe.central_direction_coords()
        g = fe.basis[:, :2] @ g_coords
        half = 0.5 * m
        a0 = action_set.associate(-half * g)
        a1 = action_set.associate(half * g)
        alpha = compute_alpha(state, cfg, a0, a1, g, eps0)
        if alpha >= -1.0 / (cfg.k * d):
            choice = user.choose(a0, a1)
            # Loser-minus-winner direction, taken along the ideal in-plane
            # axis the pair was built from; the 2 * eps0 slack inside alpha
            # covers whatever the arm association moved off that axis.
            h_coords = g_coords if choice.index == 0 else -g_coords
            offset = -alpha * fe.plane_width(h_coords)
            try:
                state.replace_ellipsoid(fe.plane_cut(h_coords, offset))
                state.n_cuts += 1
                branch = "cut"
            except RejectedCut:
                state.n_explores += 1
                branch = "explore"
        else:
            axes = eigendecomp(state.gram_est)
            v_top = axes.vectors[:, 0]
            v_bot = axes.vectors[:, -1]
            a0 = action_set.associate(
                d0 * (EXPLORE_TOP_WEIGHT * v_top + EXPLORE_BOTTOM_WEIGHT * v_bot)
            )
            a1 = action_set.associate(
                d0 * (EXPLORE_TOP_WEIGHT * v_top - EXPLORE_BOTTOM_WEIGHT * v_bot)
            )
            choice = user.choose(a0, a1)
            state.n_explores += 1
            branch = "explore"
    else:
        axis = oriented_axis(state.ellipsoid)
        a0 = action_set.best_arm(axis)
        a1 = a0.copy()
        choice = user.choose(a0, a1)
        state.n_exploits += 1
        branch = "exploit"

    reward = user.true_reward(choice.arm)
    user.update(choice.arm, reward)
    state.gram_est += np.outer(choice.arm, choice.arm)
    state.round += 1
    return StepOutcome(branch=branch, pair=(a0, a1), alpha=alpha, choice=choice)


def run_raes(cfg: RaesConfig, action_set: ActionSet, user: UserState) -> RegretTrace:
    """Play cfg.t_horizon rounds and return the per-round regret trace.

    Per-round regret is the gap between twice the best arm's utility and the
    summed utility of the presented pair; the caller assigns the seed.
    """
    if action_set.dim != user.theta_star.size:
        raise ValueError(
            f"action set dimension {action_set.dim} does not match "
            f"user dimension {user.theta_star.size}"
        )
    state = initial_state(cfg, action_set.dim)
    best = action_set.best_arm(user.theta_star)
    top = 2.0 * float(user.theta_star @ best)
    inst = np.empty(cfg.t_horizon)
    branches: list[str] = []
    for i in range(cfg.t_horizon):
        out = raes_step(state, cfg, action_set, user)
        inst[i] = top - float(user.theta_star @ (out.pair[0] + out.pair[1]))
        branches.append(out.branch)
    return build_trace("raes", -1, inst, branches)


@dataclass(frozen=True)
class AesResult:
    estimate: np.ndarray
    ellipsoid: FactoredEllipsoid


def run_aes(
    d: int,
    t_max: int,
    user: UserState,
    on_round: Callable[[int, FactoredEllipsoid], None] | None = None,
) -> AesResult:
    """Noiseless duel loop: one central cut per round, no reward feedback.

    Each round presents the antipodal unit pair along the central cut
    direction and keeps the winner's halfspace. The user is queried but
    never updated, so this is meant for a pinned user who already knows the
    utility vector. Returns the oriented long axis as the point estimate
    together with the final ellipsoid, in factored form because by a few
    hundred rounds the axis spread exceeds what a dense matrix can hold.
    on_round, when given, observes (round, ellipsoid) after every cut.
    """
    if d < 2:
        raise ValueError("need dimension >= 2")
    if t_max < 0:
        raise ValueError("t_max must be nonnegative")
    e = FactoredEllipsoid.unit(d)
    for t in range(1, t_max + 1):
        g_coords = e.central_direction_coords()
        g = e.basis[:, :2] @ g_coords
        choice = user.choose(-g, g)
        h_coords = g_coords if choice.index == 0 else -g_coords
        e = e.plane_cut(h_coords, 0.0)
        if on_round is not None:
            on_round(t, e)
    return AesResult(estimate=oriented_axis(e), ellipsoid=e)


def recommended_t0(
    c: float,
    k: float,
    smooth_l: float,
    d0: float,
    d1: float,
    eps0: float,
    gamma: float,
    delta: float,
    d: int,
    t_horizon: int,
) -> float:
    """Cut-phase budget that provably suffices for the stated geometry.

    Scales like d**2 * t_horizon**(0.5 + gamma). The constants are very
    loose, so treat the value as an upper guide rather than a default; the
    harness default of 0.25 * d**2 * sqrt(t_horizon) is what experiments
    actually use.
    """
    inner = 4.0 * d0 / 25.0 - 3.0 * eps0
    if inner <= 0.0:
        raise ValueError("eps0 too large: covering slack eats the exploration gain")
    lead = 6.0 * c * k / d0
    mid = math.sqrt(6.0 * smooth_l * d1 / inner)
    conf = 1.0 + math.sqrt(math.log(1.0 / delta))
    return lead * mid * conf * d * d * float(t_horizon) ** (0.5 + gamma)
