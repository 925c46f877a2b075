"""Per-round regret records shared by every policy runner."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class RegretTrace:
    """One run's regret series. seed is -1 for averaged or anonymous runs."""

    algo: str
    seed: int
    rounds: np.ndarray
    branches: list[str]
    inst_regret: np.ndarray
    cum_regret: np.ndarray

    def __post_init__(self) -> None:
        n = self.rounds.size
        if not (len(self.branches) == self.inst_regret.size == self.cum_regret.size == n):
            raise ValueError("trace columns must share one length")


def build_trace(algo: str, seed: int, inst_regret, branches) -> RegretTrace:
    """Assemble a trace from per-round regret, deriving rounds and cumsum."""
    inst = np.asarray(inst_regret, dtype=float)
    if inst.ndim != 1:
        raise ValueError("inst_regret must be 1-d")
    branches = list(branches)
    if len(branches) != inst.size:
        raise ValueError(f"{inst.size} regret entries but {len(branches)} branches")
    return RegretTrace(
        algo=algo,
        seed=seed,
        rounds=np.arange(1, inst.size + 1),
        branches=branches,
        inst_regret=inst,
        cum_regret=np.cumsum(inst),
    )
