"""Centroid-anchored symbolic contour encoding.

Each contour point pair (x_i, y_i), walked in lockstep from the farthest and
nearest points to the center of gravity, becomes a three-symbol triple:
an angle letter from A..F and two S/M/L size letters for the normalized
centroid distances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import EncodingError
from .geometry import Contour, Point, centroid
from .seqalign import ANGLE_SYMBOLS, SIZE_SYMBOLS

# D_max - D_min below this relative threshold counts as circle-like
DEGENERATE_RTOL = 1e-9


@dataclass(frozen=True)
class QuantizationConfig:
    """Angle bins use k letters from A..F; distances use the fixed S/M/L bins
    over [d_min, d_max] in units of the contour's D_max (None = intrinsic:
    d_min = D_min/D_max, d_max = 1)."""

    k_angle_bins: int = 6
    d_min: float | None = None
    d_max: float | None = None

    distance_bins = 3

    def __post_init__(self):
        if not 2 <= self.k_angle_bins <= 6:
            raise EncodingError(
                f"k_angle_bins must be between 2 and 6, got {self.k_angle_bins}"
            )
        if (self.d_min is None) != (self.d_max is None):
            raise EncodingError("d_min and d_max must be set together")
        if self.d_min is not None and not self.d_min < self.d_max:
            raise EncodingError(f"need d_min < d_max, got [{self.d_min}, {self.d_max}]")


class State(NamedTuple):
    x_point: Point
    y_point: Point
    x_dist: float  # |G x_i| / D_max
    y_dist: float  # |G y_i| / D_max
    angle: float  # non-reflex angle x_i G y_i, in [0, pi]


class Anchor(NamedTuple):
    """Walk anchors: indices of the farthest / nearest point from the
    centroid (lowest index on ties) and the distance extremes."""

    center: Point
    ix: int
    iy: int
    d_max: float
    d_min: float
    degenerate: bool


@dataclass(frozen=True)
class SymbolString:
    """Encoded contour: triples of (angle, X size, Y size) symbols."""

    symbols: str
    degenerate: bool = False

    def __post_init__(self):
        s = self.symbols
        if len(s) % 3 != 0:
            raise EncodingError(f"symbol string length must be a multiple of 3, got {len(s)}")
        for pos, ch in enumerate(s):
            expected = ANGLE_SYMBOLS if pos % 3 == 0 else SIZE_SYMBOLS
            if ch not in expected:
                raise EncodingError(
                    f"symbol {ch!r} not allowed at position {pos} "
                    f"(expected one of {expected})"
                )

    @property
    def state_count(self) -> int:
        return len(self.symbols) // 3

    def __str__(self) -> str:
        return self.symbols

    def __len__(self) -> int:
        return len(self.symbols)


def anchor(c: Contour) -> Anchor:
    g = centroid(c)
    d = np.hypot(c.points[:, 0] - g.x, c.points[:, 1] - g.y)
    ix = int(d.argmax())
    iy = int(d.argmin())
    d_max = float(d[ix])
    d_min = float(d[iy])
    degenerate = d_max <= 0 or (d_max - d_min) < DEGENERATE_RTOL * d_max
    return Anchor(center=g, ix=ix, iy=iy, d_max=d_max, d_min=d_min, degenerate=degenerate)


def _walk_arrays(c: Contour):
    """Vectorized lockstep walk; returns (x_dist, y_dist, angle, anchor)."""
    a = anchor(c)
    if a.d_max <= 0:
        raise EncodingError("all contour points coincide with the centroid")
    pts = c.points
    n = len(pts)
    order = np.arange(n)
    xi = pts[(a.ix + order) % n] - (a.center.x, a.center.y)
    yi = pts[(a.iy + order) % n] - (a.center.x, a.center.y)
    xn = np.hypot(xi[:, 0], xi[:, 1])
    yn = np.hypot(yi[:, 0], yi[:, 1])
    dot = xi[:, 0] * yi[:, 0] + xi[:, 1] * yi[:, 1]
    norms = xn * yn
    with np.errstate(invalid="ignore", divide="ignore"):
        cosang = np.where(norms > 0, dot / np.where(norms > 0, norms, 1.0), 1.0)
    ang = np.arccos(np.clip(cosang, -1.0, 1.0))
    return xn / a.d_max, yn / a.d_max, ang, a


def states(c: Contour) -> list[State]:
    """One state per contour point, starting at the D_max anchor."""
    xd, yd, ang, a = _walk_arrays(c)
    pts = c.points
    n = len(pts)
    out = []
    for i in range(n):
        px = pts[(a.ix + i) % n]
        py = pts[(a.iy + i) % n]
        out.append(
            State(
                x_point=Point(float(px[0]), float(px[1])),
                y_point=Point(float(py[0]), float(py[1])),
                x_dist=float(xd[i]),
                y_dist=float(yd[i]),
                angle=float(ang[i]),
            )
        )
    return out


def initial_state(c: Contour) -> State:
    xd, yd, ang, a = _walk_arrays(c)
    px = c.points[a.ix]
    py = c.points[a.iy]
    return State(
        x_point=Point(float(px[0]), float(px[1])),
        y_point=Point(float(py[0]), float(py[1])),
        x_dist=float(xd[0]),
        y_dist=float(yd[0]),
        angle=float(ang[0]),
    )


def quantize_distance(d: float, cfg: QuantizationConfig) -> str:
    """Three equal-width bins over [d_min, d_max]; d is clamped first."""
    if cfg.d_min is None:
        raise EncodingError("quantize_distance needs explicit d_min/d_max")
    if not math.isfinite(d):
        raise EncodingError(f"distance must be finite, got {d}")
    t = (d - cfg.d_min) / (cfg.d_max - cfg.d_min)
    t = min(max(t, 0.0), 1.0)
    return SIZE_SYMBOLS[min(int(t * 3), 2)]


def quantize_angle(a: float, k: int) -> str:
    """k equal bins over [0, pi]; the letter is the bin index into A..F."""
    if not 2 <= k <= 6:
        raise EncodingError(f"angle bin count must be between 2 and 6, got {k}")
    if not 0 <= a <= math.pi:
        raise EncodingError(f"angle {a} outside [0, pi]")
    t = a / math.pi
    return ANGLE_SYMBOLS[min(int(t * k), k - 1)]


def encode(c: Contour, cfg: QuantizationConfig | None = None) -> SymbolString:
    """Emit the (angle, X size, Y size) triple for every state in walk order.

    Distances quantize against the contour's own [D_min, D_max] unless the
    config pins explicit bounds; circle-like contours (D_max close to D_min)
    get all-M sizes and a degenerate flag.
    """
    cfg = cfg or QuantizationConfig()
    xd, yd, ang, a = _walk_arrays(c)
    if cfg.d_min is not None:
        dist_cfg = cfg
    else:
        dist_cfg = QuantizationConfig(
            k_angle_bins=cfg.k_angle_bins,
            d_min=a.d_min / a.d_max if not a.degenerate else 0.0,
            d_max=1.0,
        )
    parts = []
    for i in range(len(xd)):
        angle_sym = quantize_angle(float(ang[i]), cfg.k_angle_bins)
        if a.degenerate:
            parts.append(angle_sym + "MM")
        else:
            parts.append(
                angle_sym
                + quantize_distance(float(xd[i]), dist_cfg)
                + quantize_distance(float(yd[i]), dist_cfg)
            )
    return SymbolString(symbols="".join(parts), degenerate=a.degenerate)
