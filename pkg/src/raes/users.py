"""Simulated users who pick between arm pairs with a perturbed ridge index.

The user keeps her own ridge estimate of the hidden utility vector, scores
each offered arm by estimate plus a bounded perturbation times the arm's
uncertainty width, and picks the higher score. Reward noise and perturbation
draws come from caller-owned generators so runs are reproducible stream by
stream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

BETA_MODES = ("uniform_random", "zero", "plus_cap", "minus_cap")
TIE_TOL = 1e-12


def beta_cap(c: float, gamma: float, t: int) -> float:
    """Magnitude cap c * t**gamma on the decision perturbation at round t."""
    return c * float(t) ** gamma


@dataclass(frozen=True)
class RationalityParams:
    """How far the user may stray from greedy play.

    c and gamma size the perturbation cap c * t**gamma, noise_sigma is the
    reward noise scale, and beta_mode picks how perturbations are drawn:
    uniformly from the cap interval, pinned to either endpoint, or zero.
    """

    c: float = 1.0
    gamma: float = 0.0
    noise_sigma: float = 0.1
    beta_mode: str = "uniform_random"

    def __post_init__(self) -> None:
        if self.c <= 0.0:
            raise ValueError("c must be positive")
        if not 0.0 <= self.gamma < 0.5:
            raise ValueError("gamma must lie in [0, 0.5)")
        if self.noise_sigma < 0.0:
            raise ValueError("noise_sigma must be nonnegative")
        if self.beta_mode not in BETA_MODES:
            raise ValueError(f"beta_mode must be one of {BETA_MODES}, got {self.beta_mode!r}")


@dataclass(frozen=True)
class Choice:
    index: int
    arm: np.ndarray


@dataclass
class UserState:
    """Mutable user: ridge statistics, round counter and random streams.

    pinned freezes theta_hat at its current value (used for the idealized
    user who already knows the utility vector); the Gram and moment still
    accumulate so uncertainty widths keep shrinking.
    """

    theta_star: np.ndarray
    gram: np.ndarray
    moment: np.ndarray
    theta_hat: np.ndarray
    t: int
    params: RationalityParams
    noise_rng: np.random.Generator
    beta_rng: np.random.Generator
    pinned: bool = False

    def true_reward(self, arm: np.ndarray, rng: np.random.Generator | None = None) -> float:
        """Hidden linear utility of arm plus gaussian noise."""
        r = float(self.theta_star @ np.asarray(arm, dtype=float))
        sigma = self.params.noise_sigma
        if sigma > 0.0:
            gen = self.noise_rng if rng is None else rng
            r += sigma * float(gen.standard_normal())
        return r

    def draw_beta(self, rng: np.random.Generator | None = None, t: int | None = None) -> float:
        """One perturbation for the round being played (self.t + 1 by default).

        Only uniform_random consumes the stream; the pinned modes are
        deterministic.
        """
        round_idx = self.t + 1 if t is None else t
        cap = beta_cap(self.params.c, self.params.gamma, round_idx)
        mode = self.params.beta_mode
        if mode == "zero":
            return 0.0
        if mode == "plus_cap":
            return cap
        if mode == "minus_cap":
            return -cap
        gen = self.beta_rng if rng is None else rng
        return float(gen.uniform(-cap, cap))

    def choose(self, a0: np.ndarray, a1: np.ndarray, rng: np.random.Generator | None = None) -> Choice:
        """Pick between two arms by perturbed index, ties by a fair coin.

        The index of arm a is theta_hat @ a plus a fresh perturbation times
        the width sqrt(a^T gram^{-1} a). Index differences within TIE_TOL
        count as ties and are settled by a coin from the perturbation
        stream. In zero mode the widths are skipped entirely, so no solve
        and no stream consumption happen.
        """
        gen = self.beta_rng if rng is None else rng
        a0 = np.asarray(a0, dtype=float)
        a1 = np.asarray(a1, dtype=float)
        r0 = float(self.theta_hat @ a0)
        r1 = float(self.theta_hat @ a1)
        if self.params.beta_mode != "zero":
            sols = np.linalg.solve(self.gram, np.stack((a0, a1), axis=1))
            w0 = math.sqrt(max(0.0, float(a0 @ sols[:, 0])))
            w1 = math.sqrt(max(0.0, float(a1 @ sols[:, 1])))
            r0 += self.draw_beta(rng=gen) * w0
            r1 += self.draw_beta(rng=gen) * w1
        if abs(r0 - r1) <= TIE_TOL:
            idx = int(gen.integers(2))
        elif r0 > r1:
            idx = 0
        else:
            idx = 1
        arm = a0 if idx == 0 else a1
        return Choice(index=idx, arm=arm.copy())

    def update(self, arm: np.ndarray, reward: float) -> "UserState":
        """Fold one (arm, reward) observation into the ridge statistics."""
        arm = np.asarray(arm, dtype=float)
        self.gram += np.outer(arm, arm)
        self.moment += float(reward) * arm
        if not self.pinned:
            self.theta_hat = np.linalg.solve(self.gram, self.moment)
        self.t += 1
        return self

    def estimation_in_bound(self, delta: float) -> bool:
        """Whether the estimate sits inside its stated confidence radius.

        Checks ||theta_star - theta_hat||_gram against the cap for the
        upcoming round times sqrt(log(1/delta)).
        """
        if not 0.0 < delta < 1.0:
            raise ValueError("delta must lie in (0, 1)")
        diff = self.theta_star - self.theta_hat
        err = math.sqrt(max(0.0, float(diff @ self.gram @ diff)))
        cap = beta_cap(self.params.c, self.params.gamma, self.t + 1)
        return err <= cap * math.sqrt(math.log(1.0 / delta))


def make_user(
    theta_star: np.ndarray,
    v0,
    params: RationalityParams,
    noise_rng: np.random.Generator,
    beta_rng: np.random.Generator,
    pinned: bool = False,
) -> UserState:
    """Fresh user with Gram prior v0: a scalar, a diagonal spectrum, or a full
    symmetric positive definite matrix."""
    theta_star = np.array(theta_star, dtype=float)
    if theta_star.ndim != 1 or theta_star.size == 0:
        raise ValueError("theta_star must be a nonempty 1-d vector")
    d = theta_star.size
    v = np.asarray(v0, dtype=float)
    if v.ndim == 0:
        gram = float(v) * np.eye(d)
    elif v.ndim == 1:
        if v.size != d:
            raise ValueError(f"v0 spectrum must have {d} entries, got {v.size}")
        gram = np.diag(v.astype(float))
    elif v.ndim == 2:
        if v.shape != (d, d):
            raise ValueError(f"v0 matrix must be {d}x{d}, got {v.shape}")
        if float(np.abs(v - v.T).max()) > 1e-10 * max(1.0, float(np.abs(v).max())):
            raise ValueError("v0 matrix is not symmetric")
        gram = 0.5 * (v + v.T)
    else:
        raise ValueError("v0 must be a scalar, a spectrum, or a matrix")
    try:
        np.linalg.cholesky(gram)
    except np.linalg.LinAlgError as exc:
        raise ValueError("v0 must be positive definite") from exc
    return UserState(
        theta_star=theta_star,
        gram=gram,
        moment=np.zeros(d),
        theta_hat=np.zeros(d),
        t=0,
        params=params,
        noise_rng=noise_rng,
        beta_rng=beta_rng,
        pinned=pinned,
    )


def perfect_user(
    theta_star: np.ndarray,
    v0=1.0,
    noise_rng: np.random.Generator | None = None,
    beta_rng: np.random.Generator | None = None,
) -> UserState:
    """User who knows the utility vector exactly and plays it greedily.

    No perturbation, no reward noise, estimate pinned to the truth. The
    streams are touched only for tie coins, so the defaults are fine unless
    the caller needs tie reproducibility across runs.
    """
    params = RationalityParams(noise_sigma=0.0, beta_mode="zero")
    user = make_user(
        theta_star,
        v0,
        params,
        noise_rng=noise_rng if noise_rng is not None else np.random.default_rng(0),
        beta_rng=beta_rng if beta_rng is not None else np.random.default_rng(1),
        pinned=True,
    )
    user.theta_hat = user.theta_star.copy()
    return user
