"""Arm sets the policies draw from: the euclidean ball and finite coverings."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_COVER_SLACK = 1e-12
_NORM_FLOOR = 1e-15
DEFAULT_NET_PROBES = 4096
DEFAULT_NET_CAP = 8192


def sample_unit_sphere(d: int, rng: np.random.Generator) -> np.ndarray:
    """One uniform point on the unit sphere in R^d."""
    if d < 1:
        raise ValueError("d must be >= 1")
    while True:
        v = rng.standard_normal(d)
        n = float(np.linalg.norm(v))
        if n > 1e-12:
            return v / n


def sphere_points(n: int, d: int, rng: np.random.Generator) -> np.ndarray:
    """n uniform unit-sphere points as rows."""
    pts = rng.standard_normal((n, d))
    norms = np.linalg.norm(pts, axis=1)
    bad = norms <= 1e-12
    while bad.any():
        pts[bad] = rng.standard_normal((int(bad.sum()), d))
        norms = np.linalg.norm(pts, axis=1)
        bad = norms <= 1e-12
    return pts / norms[:, None]


@dataclass(frozen=True)
class ActionSetParams:
    """Geometry constants of an arm set.

    d0 is the inner radius (a ball of this radius fits inside), d1 the outer
    radius, smooth_l the boundary smoothness constant, and eps0 the covering
    slack within which associate() must find a set element.
    """

    d0: float
    d1: float
    smooth_l: float
    eps0: float

    def __post_init__(self) -> None:
        if not 0.0 < self.d0 <= self.d1:
            raise ValueError("need 0 < d0 <= d1")
        if self.smooth_l <= 0.0:
            raise ValueError("smooth_l must be positive")
        if self.eps0 < 0.0:
            raise ValueError("eps0 must be nonnegative")


@dataclass(frozen=True)
class ActionSet:
    """Either the solid ball of radius d1 or a finite point set."""

    kind: str
    dim: int
    params: ActionSetParams
    net_points: np.ndarray | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("ball", "net"):
            raise ValueError(f"kind must be 'ball' or 'net', got {self.kind!r}")
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        if self.kind == "net":
            pts = self.net_points
            if pts is None:
                raise ValueError("net action sets need net_points")
            pts = np.array(pts, dtype=float)
            if pts.ndim != 2 or pts.shape[0] == 0 or pts.shape[1] != self.dim:
                raise ValueError(f"net_points must be (n, {self.dim}), got {pts.shape}")
            pts.flags.writeable = False
            object.__setattr__(self, "net_points", pts)
        elif self.net_points is not None:
            raise ValueError("ball action sets take no net_points")

    def best_arm(self, direction: np.ndarray) -> np.ndarray:
        """Arm maximizing direction @ arm over the set.

        For finite sets ties go to the lowest index; on the ball the
        maximizer is unique and a zero direction is rejected.
        """
        v = np.asarray(direction, dtype=float)
        if v.shape != (self.dim,):
            raise ValueError(f"direction must have shape ({self.dim},)")
        if self.kind == "ball":
            n = float(np.linalg.norm(v))
            if n < _NORM_FLOOR:
                raise ValueError("direction must be nonzero")
            return (self.params.d1 / n) * v
        scores = self.net_points @ v
        return self.net_points[int(np.argmax(scores))].copy()

    def associate(self, target: np.ndarray) -> np.ndarray:
        """Set element within eps0 of target (the identity on the ball).

        Ball targets a hair outside the radius (relative 1e-12) are clamped,
        anything farther is a caller error. A finite set failing to provide
        a point within eps0 breaks its covering contract, which is reported
        as RuntimeError rather than ValueError.
        """
        t = np.asarray(target, dtype=float)
        if t.shape != (self.dim,):
            raise ValueError(f"target must have shape ({self.dim},)")
        if self.kind == "ball":
            r = self.params.d1
            n = float(np.linalg.norm(t))
            if n <= r:
                return t.copy()
            if n <= r * (1.0 + _COVER_SLACK):
                return t * (r / n)
            raise ValueError(f"target norm {n:.6g} exceeds ball radius {r:.6g}")
        dists = np.linalg.norm(self.net_points - t, axis=1)
        i = int(np.argmin(dists))
        if dists[i] > self.params.eps0 + _COVER_SLACK:
            raise RuntimeError(
                f"covering violated: nearest set element is {dists[i]:.6g} "
                f"from target, eps0 is {self.params.eps0:.6g}"
            )
        return self.net_points[i].copy()


def unit_ball(d: int, radius: float = 1.0) -> ActionSet:
    """The solid ball of the given radius, the default arm set everywhere."""
    params = ActionSetParams(d0=radius, d1=radius, smooth_l=radius, eps0=0.0)
    return ActionSet(kind="ball", dim=d, params=params)


def eps_net_of_ball(
    d: int,
    d0: float,
    d1: float,
    eps0: float,
    rng: np.random.Generator,
    probes: int = DEFAULT_NET_PROBES,
    max_points: int = DEFAULT_NET_CAP,
) -> ActionSet:
    """Finite arm set covering three spheres of the [d0, d1] shell.

    Draws seeded probe points on the radii d0, (d0 + d1)/2 and d1 and keeps
    a greedy eps0-packing of them; a maximal packing is automatically an
    eps0-cover of the probes, and the probe resolution bounds how far the
    continuous spheres can stray from the kept points. Raises ValueError
    when the packing would exceed max_points, meaning eps0 is too small for
    this dimension at the requested cap.
    """
    params = ActionSetParams(d0=d0, d1=d1, smooth_l=d1, eps0=eps0)
    if eps0 <= 0.0:
        raise ValueError("eps0 must be positive for a finite covering")
    if probes < 1:
        raise ValueError("probes must be >= 1")
    dirs = sphere_points(probes, d, rng)
    kept_rows: list[np.ndarray] = []
    for radius in sorted({d0, 0.5 * (d0 + d1), d1}):
        targets = radius * dirs
        acc = np.empty((0, d))
        for row in targets:
            if acc.shape[0] == 0 or float(
                np.min(np.linalg.norm(acc - row, axis=1))
            ) > eps0:
                acc = np.vstack([acc, row[None, :]])
                if len(kept_rows) + acc.shape[0] > max_points:
                    raise ValueError(
                        f"covering needs more than {max_points} points at "
                        f"eps0={eps0:.6g} in dimension {d}"
                    )
        kept_rows.extend(acc)
    return ActionSet(kind="net", dim=d, params=params, net_points=np.array(kept_rows))
