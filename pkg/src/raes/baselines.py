"""Dueling baselines assembled from scalar-feedback primitives.

None of these ever see the numeric reward drawn by the user; they observe
only which arm won each duel. The optimist (Oful) is the shared building
block: Doubler feeds it win/loss rewards for its right arm, Sparring runs
one per side.
"""

from __future__ import annotations

import math

import numpy as np

from .actions import ActionSet, sample_unit_sphere, sphere_points
from .ellipsoid import eigendecomp
from .users import Choice, UserState

DEFAULT_POOL_SIZE = 128


def _duel(user: UserState, a0: np.ndarray, a1: np.ndarray) -> Choice:
    """Run one duel: the user chooses, observes a reward, and updates."""
    choice = user.choose(a0, a1)
    reward = user.true_reward(choice.arm)
    user.update(choice.arm, reward)
    return choice


def _project_ball(v: np.ndarray, radius: float) -> np.ndarray:
    n = float(np.linalg.norm(v))
    if n <= radius:
        return v.copy()
    return v * (radius / n)


class Oful:
    """Optimism under a ridge estimate, maximized over a finite pool.

    For ball sets the pool is the greedy arm (when the estimate is nonzero),
    the full-radius points along both signs of every Gram axis, and a batch
    of fresh seeded sphere points; finite sets score all their points, which
    makes the maximization exact. First maximizer wins, so the greedy arm is
    selected whenever the exploration width is zero.
    """

    def __init__(self, d: int, reg: float = 1.0, width_scale: float = 1.0,
                 delta: float = 0.1, pool_size: int = DEFAULT_POOL_SIZE):
        if reg <= 0.0:
            raise ValueError("reg must be positive")
        self.d = d
        self.gram = reg * np.eye(d)
        self.moment = np.zeros(d)
        self.theta_hat = np.zeros(d)
        self.width_scale = float(width_scale)
        self.delta = float(delta)
        self.pool_size = int(pool_size)

    def width(self, t: int) -> float:
        return self.width_scale * math.sqrt(self.d * math.log((1.0 + t) / self.delta))

    def _candidates(self, action_set: ActionSet, rng: np.random.Generator,
                    shared_pool: np.ndarray | None) -> np.ndarray:
        if action_set.kind == "net":
            return action_set.net_points
        r = action_set.params.d1
        rows = []
        if float(np.linalg.norm(self.theta_hat)) > 0.0:
            rows.append(action_set.best_arm(self.theta_hat))
        axes = eigendecomp(self.gram).vectors
        for j in range(self.d):
            rows.append(r * axes[:, j])
            rows.append(-r * axes[:, j])
        pool = shared_pool if shared_pool is not None else r * sphere_points(self.pool_size, self.d, rng)
        return np.vstack([np.stack(rows), pool])

    def select(self, action_set: ActionSet, t: int, rng: np.random.Generator,
               shared_pool: np.ndarray | None = None) -> np.ndarray:
        cand = self._candidates(action_set, rng, shared_pool)
        sols = np.linalg.solve(self.gram, cand.T)
        widths = np.sqrt(np.maximum(0.0, np.einsum("ij,ji->i", cand, sols)))
        scores = cand @ self.theta_hat + self.width(t) * widths
        return cand[int(np.argmax(scores))].copy()

    def update(self, arm: np.ndarray, reward: float) -> "Oful":
        arm = np.asarray(arm, dtype=float)
        self.gram += np.outer(arm, arm)
        self.moment += float(reward) * arm
        self.theta_hat = np.linalg.solve(self.gram, self.moment)
        return self


class Dbgd:
    """Gradient-free duel climbing: probe a random direction and move toward
    it when the probe beats the incumbent."""

    def __init__(self, d: int, step_explore: float, step_update: float):
        if step_explore <= 0.0 or step_update <= 0.0:
            raise ValueError("step sizes must be positive")
        self.w = np.zeros(d)
        self.step_explore = float(step_explore)
        self.step_update = float(step_update)

    def step(self, action_set: ActionSet, user: UserState, t: int,
             rng: np.random.Generator):
        r = action_set.params.d1
        u = sample_unit_sphere(self.w.size, rng)
        probe = _project_ball(self.w + self.step_explore * u, r)
        pair = (self.w.copy(), probe)
        choice = _duel(user, pair[0], pair[1])
        if choice.index == 1:
            self.w = _project_ball(self.w + self.step_update * u, r)
        return pair, choice


def dbgd_params(d: int, t_horizon: int) -> tuple[float, float]:
    """Horizon-tuned step sizes: explore d**-0.5 * T**-0.25, update T**-0.5."""
    return d ** -0.5 * t_horizon ** -0.25, t_horizon ** -0.5


class Doubler:
    """Duels reduced to scalar feedback over doubling epochs.

    The left arm replays a uniform draw from the previous epoch's right
    arms (initially the origin, whose utility is exactly zero); the right
    arm comes from an optimist that receives reward 1 when it wins the duel
    and 0 otherwise. Epoch lengths are 1, 2, 4, ..., so boundaries fall
    after rounds 1, 3, 7, 15, and so on.
    """

    def __init__(self, d: int, reg: float = 1.0, width_scale: float = 1.0,
                 delta: float = 0.1):
        self.learner = Oful(d, reg=reg, width_scale=width_scale, delta=delta)
        self.left_pool: list[np.ndarray] = [np.zeros(d)]
        self.pending: list[np.ndarray] = []
        self.epoch = 0
        self.played_in_epoch = 0

    def step(self, action_set: ActionSet, user: UserState, t: int,
             rng: np.random.Generator):
        left = self.left_pool[int(rng.integers(len(self.left_pool)))]
        right = self.learner.select(action_set, t, rng)
        pair = (left.copy(), right)
        choice = _duel(user, pair[0], pair[1])
        self.learner.update(right, 1.0 if choice.index == 1 else 0.0)
        self.pending.append(right)
        self.played_in_epoch += 1
        if self.played_in_epoch >= 2 ** self.epoch:
            self.left_pool = self.pending
            self.pending = []
            self.epoch += 1
            self.played_in_epoch = 0
        return pair, choice


class Sparring:
    """Two optimists dueling each other, each scoring its own wins.

    Both sides share one fresh candidate pool per round, so with identical
    priors their first-round picks coincide and the duel starts from a tie.
    """

    def __init__(self, d: int, reg: float = 1.0, width_scale: float = 1.0,
                 delta: float = 0.1, pool_size: int = DEFAULT_POOL_SIZE):
        self.left = Oful(d, reg=reg, width_scale=width_scale, delta=delta, pool_size=pool_size)
        self.right = Oful(d, reg=reg, width_scale=width_scale, delta=delta, pool_size=pool_size)
        self.pool_size = int(pool_size)

    def step(self, action_set: ActionSet, user: UserState, t: int,
             rng: np.random.Generator):
        shared = None
        if action_set.kind == "ball":
            shared = action_set.params.d1 * sphere_points(self.pool_size, action_set.dim, rng)
        a0 = self.left.select(action_set, t, rng, shared_pool=shared)
        a1 = self.right.select(action_set, t, rng, shared_pool=shared)
        pair = (a0, a1)
        choice = _duel(user, a0, a1)
        self.left.update(a0, 1.0 - choice.index)
        self.right.update(a1, float(choice.index))
        return pair, choice
