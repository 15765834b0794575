"""Rigid Procrustes superimposition: rotation + translation, never scaling
or reflection."""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .errors import ShapeAlignError
from .geometry import Contour
from .shape_context import Correspondence


class RigidTransform(NamedTuple):
    rotation: float  # radians in (-pi, pi], applied about the origin
    translation: tuple[float, float]

    def matrix(self) -> np.ndarray:
        c, s = math.cos(self.rotation), math.sin(self.rotation)
        return np.array([[c, -s], [s, c]])

    def apply(self, points: np.ndarray) -> np.ndarray:
        return np.asarray(points) @ self.matrix().T + self.translation

    def to_text(self) -> str:
        return f"R {self.rotation!r} T {self.translation[0]!r} {self.translation[1]!r}"

    @classmethod
    def from_text(cls, text: str) -> "RigidTransform":
        parts = text.split()
        if len(parts) != 5 or parts[0] != "R" or parts[2] != "T":
            raise ShapeAlignError(f"bad transform text {text!r}")
        return cls(rotation=float(parts[1]), translation=(float(parts[3]), float(parts[4])))


class ProcrustesResult(NamedTuple):
    transform: RigidTransform
    aligned: Contour
    residual_rms: float
    degenerate: bool


def identity_correspondence(n: int) -> Correspondence:
    return Correspondence(pairs=tuple((i, i) for i in range(n)), total_cost=0.0, offset=0)


def align(a: Contour, b: Contour, corr: Correspondence) -> ProcrustesResult:
    """Least-squares rotation + translation taking contour b onto contour a
    over the matched pairs.

    The rotation comes from the 2-D closed form of the cross-covariance
    (always a proper rotation). When either matched set is a single repeated
    point the rotation is undefined: identity is returned with the degenerate
    flag set. The aligned contour is all of b transformed; residual_rms is
    measured over the matched pairs only.
    """
    pairs = corr.pairs if isinstance(corr, Correspondence) else tuple(corr)
    if len(pairs) < 2:
        raise ShapeAlignError(f"Procrustes needs at least 2 matched pairs, got {len(pairs)}")
    ia = [p[0] for p in pairs]
    ib = [p[1] for p in pairs]
    A = a.points[ia]
    B = b.points[ib]

    ca = A.mean(axis=0)
    cb = B.mean(axis=0)
    Ac = A - ca
    Bc = B - cb

    degenerate = bool((A == A[0]).all() or (B == B[0]).all())
    s_dot = float(np.sum(Ac * Bc))
    s_cross = float(np.sum(Bc[:, 0] * Ac[:, 1] - Bc[:, 1] * Ac[:, 0]))
    if degenerate or (s_dot == 0.0 and s_cross == 0.0):
        theta = 0.0
        degenerate = True
    else:
        theta = math.atan2(s_cross, s_dot)
        if theta == -math.pi:
            theta = math.pi

    rot = np.array([[math.cos(theta), -math.sin(theta)], [math.sin(theta), math.cos(theta)]])
    translation = ca - rot @ cb
    transform = RigidTransform(rotation=theta, translation=(float(translation[0]), float(translation[1])))

    moved = B @ rot.T + translation
    residual_rms = float(np.sqrt(np.mean(np.sum((A - moved) ** 2, axis=1))))
    aligned = Contour(points=b.points @ rot.T + translation, orientation=b.orientation)
    return ProcrustesResult(
        transform=transform,
        aligned=aligned,
        residual_rms=residual_rms,
        degenerate=degenerate,
    )
