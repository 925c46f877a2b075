"""Ellipsoid geometry: eigendecompositions, halfspace cuts, volume bookkeeping.

Everything here is dense float64 linear algebra sized for moderate dimension
(d up to a few dozen), where a fresh O(d^3) factorization per round is cheap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_ASYM_TOL = 1e-10
_DEPTH_CONSISTENCY_RTOL = 1e-9
_DIRECTION_FLOOR = 1e-18


class RejectedCut(ValueError):
    """The requested cut depth falls outside the open interval (-1/d, 1)."""


class DecompositionError(RuntimeError):
    """The symmetric eigensolver failed to converge."""


@dataclass(frozen=True)
class EigenDecomp:
    """Spectral factorization with eigenvalues sorted in descending order.

    vectors[:, i] is the unit eigenvector for values[i]. Each column is
    scaled so its largest-magnitude entry is positive, which makes the
    factorization a deterministic function of the input bits. For repeated
    eigenvalues the relative order the solver emitted is kept (stable sort),
    so the identity matrix decomposes to itself.
    """

    values: np.ndarray
    vectors: np.ndarray


def eigendecomp(matrix: np.ndarray) -> EigenDecomp:
    """Decompose a symmetric matrix with fixed ordering and sign conventions.

    The input is symmetrized as 0.5 * (m + m.T) before factoring, so tiny
    asymmetries from accumulated arithmetic are absorbed rather than
    rejected. Raises DecompositionError if the solver does not converge and
    ValueError for non-square input.
    """
    m = np.asarray(matrix, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    try:
        values, vectors = np.linalg.eigh(0.5 * (m + m.T))
    except np.linalg.LinAlgError as exc:
        raise DecompositionError(f"eigendecomposition did not converge: {exc}") from exc
    order = np.argsort(-values, kind="stable")
    values = values[order]
    vectors = vectors[:, order]
    rows = np.abs(vectors).argmax(axis=0)
    signs = np.sign(vectors[rows, np.arange(vectors.shape[1])])
    signs[signs == 0.0] = 1.0
    vectors = vectors * signs
    values.flags.writeable = False
    vectors.flags.writeable = False
    return EigenDecomp(values=values, vectors=vectors)


@dataclass(frozen=True)
class Ellipsoid:
    """E(center, shape) = { z : (z - center)^T shape^{-1} (z - center) <= 1 }.

    The shape matrix must be symmetric positive definite. Both arrays are
    copied and frozen on construction, so an Ellipsoid can be shared freely.
    """

    center: np.ndarray
    shape: np.ndarray

    def __post_init__(self) -> None:
        center = np.array(self.center, dtype=float)
        shape = np.asarray(self.shape, dtype=float)
        if center.ndim != 1 or center.size == 0:
            raise ValueError("center must be a nonempty 1-d vector")
        d = center.size
        if shape.shape != (d, d):
            raise ValueError(f"shape matrix must be {d}x{d}, got {shape.shape}")
        scale = max(1.0, float(np.abs(shape).max()))
        if float(np.abs(shape - shape.T).max()) > _ASYM_TOL * scale:
            raise ValueError("shape matrix is not symmetric")
        shape = 0.5 * (shape + shape.T)
        try:
            np.linalg.cholesky(shape)
        except np.linalg.LinAlgError as exc:
            raise ValueError("shape matrix is not positive definite") from exc
        center.flags.writeable = False
        shape.flags.writeable = False
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "shape", shape)

    @property
    def dim(self) -> int:
        return self.center.size

    def membership(self, z: np.ndarray) -> float:
        """Value of the defining quadratic form at z; <= 1 means inside."""
        diff = np.asarray(z, dtype=float) - self.center
        return float(diff @ np.linalg.solve(self.shape, diff))

    def contains(self, z: np.ndarray, tol: float = 0.0) -> bool:
        return self.membership(z) <= 1.0 + tol


@dataclass(frozen=True)
class CutSpec:
    """A halfspace { z : normal @ (z - center) <= offset } plus its depth.

    depth duplicates information derivable from (normal, offset) and the
    target ellipsoid on purpose: cut() recomputes the geometric depth and
    refuses to apply a spec whose recorded value disagrees, which catches
    specs replayed against the wrong ellipsoid.
    """

    normal: np.ndarray
    offset: float
    depth: float

    def __post_init__(self) -> None:
        normal = np.array(self.normal, dtype=float)
        if normal.ndim != 1 or normal.size == 0:
            raise ValueError("cut normal must be a nonempty 1-d vector")
        normal.flags.writeable = False
        object.__setattr__(self, "normal", normal)
        object.__setattr__(self, "offset", float(self.offset))
        object.__setattr__(self, "depth", float(self.depth))


def _cut_width(e: Ellipsoid, normal: np.ndarray) -> float:
    w_sq = float(normal @ e.shape @ normal)
    if w_sq <= 0.0:
        raise ValueError("cut normal has zero extent along the ellipsoid")
    return math.sqrt(w_sq)


def cut_spec_for(e: Ellipsoid, normal: np.ndarray, offset: float) -> CutSpec:
    """Build the spec for cutting e, deriving depth = -offset / ||normal||_P."""
    normal = np.asarray(normal, dtype=float)
    if normal.shape != (e.dim,):
        raise ValueError(f"normal must have shape ({e.dim},), got {normal.shape}")
    width = _cut_width(e, normal)
    return CutSpec(normal=normal, offset=float(offset), depth=-float(offset) / width)


def cut(e: Ellipsoid, spec: CutSpec) -> Ellipsoid:
    """Minimum-volume ellipsoid containing e intersected with spec's halfspace.

    Raises RejectedCut when the normalized depth alpha lies outside the open
    interval (-1/d, 1): at or below -1/d the halfspace keeps essentially all
    of e and the update gains nothing, at or above 1 the intersection is
    empty. Raises ValueError when spec.depth disagrees with the depth
    recomputed from e (wrong-ellipsoid replay) or the normal is degenerate.
    """
    d = e.dim
    if d < 2:
        raise ValueError("cuts need dimension >= 2")
    g = np.asarray(spec.normal, dtype=float)
    if g.shape != (d,):
        raise ValueError(f"normal must have shape ({d},), got {g.shape}")
    width = _cut_width(e, g)
    alpha = -spec.offset / width
    if abs(alpha - spec.depth) > _DEPTH_CONSISTENCY_RTOL * max(1.0, abs(alpha)):
        raise ValueError(
            f"spec depth {spec.depth:.12g} disagrees with geometric depth "
            f"{alpha:.12g}; was this spec built for a different ellipsoid?"
        )
    if not -1.0 / d < alpha < 1.0:
        raise RejectedCut(f"cut depth {alpha:.6g} outside (-1/{d}, 1)")
    g_tilde = g / width
    p_g = e.shape @ g_tilde
    center = e.center - ((1.0 + d * alpha) / (d + 1.0)) * p_g
    coeff = 2.0 * (1.0 + d * alpha) / ((d + 1.0) * (1.0 + alpha))
    shape = e.shape - coeff * np.outer(p_g, p_g)
    shape *= (d * d * (1.0 - alpha * alpha)) / (d * d - 1.0)
    return Ellipsoid(center=center, shape=0.5 * (shape + shape.T))


def volume_ratio(alpha: float, d: int) -> float:
    """vol(E') / vol(E) for a cut of depth alpha in dimension d.

    Equals sqrt(det(P') / det(P)) and is strictly below 1 for alpha > -1/d,
    with the classical bound volume_ratio(alpha, d) <= exp(-(1 + d*alpha)^2
    / (2*d)). Raises ValueError outside the open interval (-1/d, 1).
    """
    if d < 2:
        raise ValueError("volume_ratio needs dimension >= 2")
    if not -1.0 / d < alpha < 1.0:
        raise ValueError(f"depth {alpha:.6g} outside (-1/{d}, 1)")
    lead = (d * (1.0 + alpha) / (d - 1.0)) ** ((d - 1) / 2.0)
    trail = (d * (1.0 - alpha) / (d + 1.0)) ** ((d + 1) / 2.0)
    return lead * trail


def cut_direction(e: Ellipsoid, decomp: EigenDecomp | None = None) -> np.ndarray:
    """Unit normal for a central cut: in the span of the two widest axes and
    orthogonal to the center.

    Cutting through such a direction keeps the origin-anchored halfspace
    test equivalent to the center-anchored one, since the normal has no
    component along the center. When the center has (numerically) no
    component in the top-two plane any direction there works; the top axis
    is returned for determinism.
    """
    if e.dim < 2:
        raise ValueError("cut_direction needs dimension >= 2")
    if decomp is None:
        decomp = eigendecomp(e.shape)
    u1 = decomp.vectors[:, 0]
    u2 = decomp.vectors[:, 1]
    p = float(u1 @ e.center)
    q = float(u2 @ e.center)
    norm_sq = p * p + q * q
    if norm_sq <= _DIRECTION_FLOOR:
        return u1.copy()
    return (q * u1 - p * u2) / math.sqrt(norm_sq)


@dataclass(frozen=True)
class FactoredEllipsoid:
    """An ellipsoid kept as an eigenfactorization instead of a dense matrix.

    The set is E(center, shape) with shape = basis @ diag(spectrum) @
    basis.T and center = basis @ center_coords. Long runs of repeated cuts
    drive the widest axis up while the others shrink toward zero; once
    their ratio passes 1/eps a dense shape matrix can no longer hold the
    small axes at all (they drown in the rounding noise of the large one,
    and the matrix stops being numerically positive definite). Keeping the
    factors separate avoids that failure mode entirely: every update below
    acts on each spectrum entry multiplicatively, so each axis retains its
    own relative precision no matter how wide the spread grows.

    The price is generality. Only cuts whose normal lies in the plane of
    the two widest axes are supported (plane_cut), which is the one kind
    the search loop ever issues: such a cut rotates that plane, rescales
    the remaining axes by a common factor, and leaves the rest of the
    basis untouched, so the factorization can be maintained in closed form.
    """

    basis: np.ndarray
    spectrum: np.ndarray
    center_coords: np.ndarray

    def __post_init__(self) -> None:
        basis = np.array(self.basis, dtype=float)
        spectrum = np.array(self.spectrum, dtype=float)
        coords = np.array(self.center_coords, dtype=float)
        if basis.ndim != 2 or basis.shape[0] != basis.shape[1]:
            raise ValueError(f"basis must be square, got shape {basis.shape}")
        d = basis.shape[0]
        if spectrum.shape != (d,):
            raise ValueError(f"spectrum must have shape ({d},), got {spectrum.shape}")
        if coords.shape != (d,):
            raise ValueError(f"center_coords must have shape ({d},), got {coords.shape}")
        if not np.all(spectrum > 0.0):
            raise ValueError("spectrum entries must be positive")
        if np.any(np.diff(spectrum) > 0.0):
            raise ValueError("spectrum must be sorted in descending order")
        gram_err = float(np.abs(basis.T @ basis - np.eye(d)).max())
        if gram_err > 1e-8:
            raise ValueError(f"basis is not orthonormal (deviation {gram_err:.3g})")
        for arr in (basis, spectrum, coords):
            arr.flags.writeable = False
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "spectrum", spectrum)
        object.__setattr__(self, "center_coords", coords)

    @classmethod
    def unit(cls, d: int) -> "FactoredEllipsoid":
        """The unit ball: identity basis, unit spectrum, centered at zero."""
        if d < 1:
            raise ValueError(f"dimension must be positive, got {d}")
        return cls(basis=np.eye(d), spectrum=np.ones(d), center_coords=np.zeros(d))

    @property
    def dim(self) -> int:
        return self.spectrum.size

    @property
    def center(self) -> np.ndarray:
        return self.basis @ self.center_coords

    def membership(self, z: np.ndarray) -> float:
        """Value of the defining quadratic form at z; <= 1 means inside."""
        r = self.basis.T @ np.asarray(z, dtype=float) - self.center_coords
        return float(np.sum(r * r / self.spectrum))

    def contains(self, z: np.ndarray, tol: float = 0.0) -> bool:
        return self.membership(z) <= 1.0 + tol

    def dense(self) -> Ellipsoid:
        """Materialize as a dense Ellipsoid.

        Fails with ValueError once spectrum[0] / spectrum[-1] approaches
        1/eps, because the reconstructed matrix is no longer numerically
        positive definite; that is the regime this class exists for.
        """
        shape = (self.basis * self.spectrum) @ self.basis.T
        return Ellipsoid(center=self.center, shape=0.5 * (shape + shape.T))

    def central_direction_coords(self) -> np.ndarray:
        """Top-two-plane coordinates of the central-cut unit normal.

        Same construction as cut_direction: orthogonal to the center within
        the plane of the two widest axes, falling back to the widest axis
        when the center has no in-plane component. The ambient vector is
        basis[:, :2] @ coords.
        """
        if self.dim < 2:
            raise ValueError("central_direction_coords needs dimension >= 2")
        p = float(self.center_coords[0])
        q = float(self.center_coords[1])
        norm_sq = p * p + q * q
        if norm_sq <= _DIRECTION_FLOOR:
            return np.array([1.0, 0.0])
        return np.array([q, -p]) / math.sqrt(norm_sq)

    def plane_width(self, normal_coords: np.ndarray) -> float:
        """||h||_P for a normal h given by coordinates in the top-two plane."""
        h = np.asarray(normal_coords, dtype=float)
        if h.shape != (2,):
            raise ValueError(f"normal_coords must have shape (2,), got {h.shape}")
        w_sq = h[0] * h[0] * self.spectrum[0] + h[1] * h[1] * self.spectrum[1]
        if w_sq <= 0.0:
            raise ValueError("cut normal has zero extent along the ellipsoid")
        return math.sqrt(w_sq)

    def plane_cut(self, normal_coords: np.ndarray, offset: float) -> "FactoredEllipsoid":
        """Apply a cut whose normal lies in the plane of the two widest axes.

        The kept halfspace is { z : h @ (z - center) <= offset } with h =
        basis[:, :2] @ normal_coords, matching cut()'s convention, and the
        depth is alpha = -offset / ||h||_P as in cut_spec_for. Raises
        RejectedCut outside the open interval (-1/d, 1).

        The update only mixes the two in-plane axes, so it reduces to a 2x2
        symmetric eigenproblem solved in closed form. The smaller of the two
        new eigenvalues is recovered from the determinant identity det' =
        (1 - kappa) * s1 * s2 rather than by subtraction, which is what
        preserves its relative accuracy when the axes differ by many orders
        of magnitude.
        """
        d = self.dim
        if d < 2:
            raise ValueError("cuts need dimension >= 2")
        width = self.plane_width(normal_coords)
        h = np.asarray(normal_coords, dtype=float)
        alpha = -float(offset) / width
        if not -1.0 / d < alpha < 1.0:
            raise RejectedCut(f"cut depth {alpha:.6g} outside (-1/{d}, 1)")
        s1 = float(self.spectrum[0])
        s2 = float(self.spectrum[1])
        scale = (d * d * (1.0 - alpha * alpha)) / (d * d - 1.0)
        kappa = 2.0 * (1.0 + d * alpha) / ((d + 1.0) * (1.0 + alpha))
        step = (1.0 + d * alpha) / (d + 1.0)
        # P @ (h / ||h||_P) has only two nonzero coordinates in this basis.
        v1 = float(h[0]) * s1 / width
        v2 = float(h[1]) * s2 / width
        coords = np.array(self.center_coords)
        coords[0] -= step * v1
        coords[1] -= step * v2
        # 2x2 block of the shape update, prior to the global rescale.
        a = s1 - kappa * v1 * v1
        b = s2 - kappa * v2 * v2
        c = -kappa * v1 * v2
        det = (1.0 - kappa) * s1 * s2
        tr = a + b
        lam1 = 0.5 * (tr + math.sqrt(max(tr * tr - 4.0 * det, 0.0)))
        lam2 = det / lam1
        # This rotation angle always sends the larger eigenvalue to the
        # first column: the diagonalized gap equals hypot(a - b, 2c) >= 0.
        phi = 0.5 * math.atan2(2.0 * c, a - b)
        co = math.cos(phi)
        si = math.sin(phi)
        rot = np.array([[co, -si], [si, co]])
        pair = self.basis[:, :2] @ rot
        pair[:, 0] /= math.sqrt(float(pair[:, 0] @ pair[:, 0]))
        pair[:, 1] -= float(pair[:, 0] @ pair[:, 1]) * pair[:, 0]
        pair[:, 1] /= math.sqrt(float(pair[:, 1] @ pair[:, 1]))
        basis = np.array(self.basis)
        basis[:, :2] = pair
        coords[:2] = rot.T @ coords[:2]
        spec = self.spectrum * scale
        spec[0] = scale * lam1
        spec[1] = scale * lam2
        order = np.argsort(-spec, kind="stable")
        return FactoredEllipsoid(
            basis=basis[:, order], spectrum=spec[order], center_coords=coords[order]
        )
