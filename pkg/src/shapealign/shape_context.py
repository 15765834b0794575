"""Log-polar shape-context histograms and DP point correspondence.

The histogram outer radius follows the mean pairwise point distance, which
makes the integer counts invariant under uniform scaling. Correspondence
between two contours is an order-preserving cyclic matching: every rotation
offset of the second contour is scored with a monotone alignment DP
(diagonal = histogram match cost, horizontal/vertical = per-point skip
penalty) and the cheapest offset wins.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import ContourError
from .geometry import Contour

DEFAULT_SKIP_PENALTY = 0.3


@dataclass(frozen=True)
class BinConfig:
    radial_bins: int = 5
    angular_bins: int = 12
    r_inner: float = 0.125  # innermost radial edge as a fraction of the outer radius
    r_outer_scale: float = 2.0  # outer radius in units of the mean pairwise distance
    angle_reference: str = "global"  # or "tangent": bins relative to the local tangent

    def __post_init__(self):
        if self.radial_bins < 1 or self.angular_bins < 1:
            raise ValueError("bin counts must be at least 1")
        if not 0 < self.r_inner < 1:
            raise ValueError(f"r_inner must be in (0, 1), got {self.r_inner}")
        if self.r_outer_scale <= 0:
            raise ValueError(f"r_outer_scale must be positive, got {self.r_outer_scale}")
        if self.angle_reference not in ("global", "tangent"):
            raise ValueError(f"unknown angle_reference {self.angle_reference!r}")

    @property
    def n_bins(self) -> int:
        return self.radial_bins * self.angular_bins


@dataclass
class ShapeContextDescriptor:
    """One histogram row per contour point; rows are length-K count vectors."""

    histograms: np.ndarray  # (n, K) int64
    config: BinConfig

    def __post_init__(self):
        self.histograms = np.asarray(self.histograms, dtype=np.int64)
        if self.histograms.ndim != 2 or self.histograms.shape[1] != self.config.n_bins:
            raise ValueError("histogram block shape does not match the bin config")

    def __len__(self) -> int:
        return len(self.histograms)


@dataclass
class CostMatrix:
    entries: np.ndarray  # (n, m) float64, chi-square costs in [0, 1]

    def __post_init__(self):
        self.entries = np.asarray(self.entries, dtype=np.float64)
        if self.entries.ndim != 2:
            raise ValueError("cost matrix must be 2-D")
        if not np.isfinite(self.entries).all():
            raise ValueError("cost matrix entries must be finite")

    @property
    def shape(self):
        return self.entries.shape

    def to_tsv(self) -> str:
        return "\n".join("\t".join(repr(v) for v in row) for row in self.entries) + "\n"


@dataclass(frozen=True)
class Correspondence:
    pairs: tuple[tuple[int, int], ...]
    total_cost: float
    offset: int


def _bin_indices(pts: np.ndarray, cfg: BinConfig):
    """Per-pair bin index matrix (n, n); -1 marks self pairs and points
    dropped beyond the outer radius."""
    n = len(pts)
    dx = pts[None, :, 0] - pts[:, None, 0]
    dy = pts[None, :, 1] - pts[:, None, 1]
    r = np.hypot(dx, dy)
    off_diag = ~np.eye(n, dtype=bool)
    total = r[off_diag].sum()
    if total <= 0:
        raise ContourError("all contour points coincide; outer radius is zero")
    mean_dist = total / (n * (n - 1))
    r_out = cfg.r_outer_scale * mean_dist
    r_in = cfg.r_inner * r_out

    theta = np.arctan2(dy, dx)
    if cfg.angle_reference == "tangent":
        nxt = np.roll(pts, -1, axis=0)
        prv = np.roll(pts, 1, axis=0)
        tangent = np.arctan2(nxt[:, 1] - prv[:, 1], nxt[:, 0] - prv[:, 0])
        theta = theta - tangent[:, None]
    frac = np.mod(theta / (2 * np.pi), 1.0)
    ang_idx = np.minimum((frac * cfg.angular_bins).astype(np.int64), cfg.angular_bins - 1)

    rad_idx = np.zeros_like(ang_idx)
    outside = r > r_out
    log_span = np.log(1.0 / cfg.r_inner)
    grown = r > r_in
    with np.errstate(divide="ignore", invalid="ignore"):
        scaled = np.where(grown, np.log(np.where(grown, r / r_in, 1.0)) / log_span, 0.0)
    rad_idx = np.minimum((scaled * cfg.radial_bins).astype(np.int64), cfg.radial_bins - 1)

    bins = rad_idx * cfg.angular_bins + ang_idx
    bins[outside] = -1
    np.fill_diagonal(bins, -1)
    return bins


def compute_histogram(c: Contour, i: int, cfg: BinConfig | None = None) -> np.ndarray:
    """Log-polar histogram of the other points' positions relative to point i.

    Counts sum to at most n-1: points beyond the outer radius are dropped,
    points inside the innermost edge land in the first radial ring.
    """
    cfg = cfg or BinConfig()
    if not 0 <= i < len(c):
        raise ValueError(f"point index {i} out of range for contour of {len(c)}")
    bins = _bin_indices(c.points, cfg)[i]
    valid = bins[bins >= 0]
    return np.bincount(valid, minlength=cfg.n_bins).astype(np.int64)


def descriptor(c: Contour, cfg: BinConfig | None = None) -> ShapeContextDescriptor:
    """Shape context of every point, all sharing one outer radius."""
    cfg = cfg or BinConfig()
    bins = _bin_indices(c.points, cfg)
    n = len(c.points)
    hist = np.zeros((n, cfg.n_bins), dtype=np.int64)
    rows, cols = np.nonzero(bins >= 0)
    np.add.at(hist, (rows, bins[rows, cols]), 1)
    return ShapeContextDescriptor(histograms=hist, config=cfg)


def _normalize(h: np.ndarray) -> np.ndarray:
    h = np.asarray(h, dtype=np.float64)
    total = h.sum(axis=-1, keepdims=True)
    return np.divide(h, total, out=np.zeros_like(h), where=total > 0)


def _chi_square(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    num = (a - b) ** 2
    den = a + b
    terms = np.divide(num, den, out=np.zeros_like(num), where=den > 0)
    return 0.5 * terms.sum(axis=-1)


def match_cost(h_i: np.ndarray, h_j: np.ndarray) -> float:
    """Half chi-square distance between the two normalized histograms, in [0, 1]."""
    h_i = np.asarray(h_i, dtype=np.float64)
    h_j = np.asarray(h_j, dtype=np.float64)
    if h_i.shape != h_j.shape:
        raise ValueError(f"histogram sizes differ: {h_i.shape} vs {h_j.shape}")
    return float(_chi_square(_normalize(h_i), _normalize(h_j)))


def cost_matrix(a: ShapeContextDescriptor, b: ShapeContextDescriptor) -> CostMatrix:
    if a.config != b.config:
        raise ValueError("descriptors were built with different bin configs")
    na = _normalize(a.histograms)
    nb = _normalize(b.histograms)
    rows = [_chi_square(na[i][None, :], nb) for i in range(len(na))]
    return CostMatrix(entries=np.stack(rows))


def correspond(m: CostMatrix, skip_penalty: float = DEFAULT_SKIP_PENALTY) -> Correspondence:
    """Minimum-cost order-preserving cyclic matching.

    Scans every rotation offset of the second contour with a monotone DP
    (lowest offset wins ties), then rebuilds the winning alignment choosing
    the lexicographically smallest pair sequence in walk order. Returned
    pairs carry original indices; the j side increases modulo the offset.
    """
    cost = m.entries
    n, mm = cost.shape
    if n == 0 or mm == 0:
        raise ValueError("cost matrix is empty")
    if n < 3 or mm < 3:
        raise ValueError(f"correspond needs at least 3x3 costs, got {n}x{mm}")
    if skip_penalty <= 0:
        raise ValueError(f"skip penalty must be positive, got {skip_penalty}")

    offset, _ = _kernels.cyclic_best_offset(np.ascontiguousarray(cost), float(skip_penalty))

    # Suffix DP for the winning offset. Cells hold exactly one of the three
    # candidate expressions, so traceback can test equality bitwise.
    rot = np.roll(cost, -offset, axis=1)
    skip = float(skip_penalty)
    B = [[0.0] * (mm + 1) for _ in range(n + 1)]
    for j in range(mm - 1, -1, -1):
        B[n][j] = skip + B[n][j + 1]
    for i in range(n - 1, -1, -1):
        B[i][mm] = skip + B[i + 1][mm]
        row, below = B[i], B[i + 1]
        crow = rot[i]
        for j in range(mm - 1, -1, -1):
            row[j] = min(crow[j] + below[j + 1], skip + below[j], skip + row[j + 1])

    # Lex-min first pair reachable by an optimal continuation; (-1, -1)
    # stands for "no further pairs" and sorts first, matching the fact that
    # an empty tail is lexicographically smallest.
    NONE = (-1, -1)
    NP = [[NONE] * (mm + 1) for _ in range(n + 1)]
    for i in range(n - 1, -1, -1):
        for j in range(mm - 1, -1, -1):
            best = None
            if B[i][j] == rot[i][j] + B[i + 1][j + 1]:
                best = (i, j)
            if B[i][j] == skip + B[i][j + 1]:
                cand = NP[i][j + 1]
                best = cand if best is None else min(best, cand)
            if B[i][j] == skip + B[i + 1][j]:
                cand = NP[i + 1][j]
                best = cand if best is None else min(best, cand)
            NP[i][j] = best

    pairs = []
    i = j = 0
    while i < n and j < mm:
        target = NP[i][j]
        if target == NONE:
            break
        if target == (i, j):
            pairs.append((i, (j + offset) % mm))
            i += 1
            j += 1
        elif B[i][j] == skip + B[i][j + 1] and NP[i][j + 1] == target:
            j += 1
        else:
            j2 = NP[i + 1][j]
            if not (B[i][j] == skip + B[i + 1][j] and j2 == target):
                raise RuntimeError("correspondence traceback lost the optimal path")
            i += 1

    return Correspondence(pairs=tuple(pairs), total_cost=float(B[0][0]), offset=int(offset))


def descriptor_to_text(d: ShapeContextDescriptor) -> str:
    cfg = d.config
    lines = [f"SC {len(d)} {cfg.radial_bins} {cfg.angular_bins}"]
    lines.extend(" ".join(str(int(v)) for v in row) for row in d.histograms)
    return "\n".join(lines) + "\n"


def descriptor_from_text(text: str, cfg: BinConfig | None = None) -> ShapeContextDescriptor:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("SC "):
        raise ValueError("descriptor text must start with 'SC <n> <radial> <angular>'")
    _, n, radial, angular = lines[0].split()
    n, radial, angular = int(n), int(radial), int(angular)
    cfg = cfg or BinConfig(radial_bins=radial, angular_bins=angular)
    if (cfg.radial_bins, cfg.angular_bins) != (radial, angular):
        raise ValueError("descriptor header disagrees with the supplied bin config")
    if len(lines) - 1 != n:
        raise ValueError(f"descriptor declares {n} rows, found {len(lines) - 1}")
    hist = np.array([[int(v) for v in ln.split()] for ln in lines[1:]], dtype=np.int64)
    return ShapeContextDescriptor(histograms=hist, config=cfg)
