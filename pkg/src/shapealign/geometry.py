"""Binary images, boundary tracing, and contour resampling.

Pixel coordinates are (x, y) with x along columns and y along rows, so y
grows downward. "Counterclockwise" means positive shoelace area in that
frame (which looks clockwise on screen).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import NamedTuple

import numpy as np
from scipy import ndimage

from .errors import ContourError, ImageError


class Point(NamedTuple):
    x: float
    y: float


class Orientation(str, Enum):
    CLOCKWISE = "clockwise"
    COUNTERCLOCKWISE = "counterclockwise"


@dataclass
class BinaryImage:
    """Thresholded raster; ``mask`` is a (height, width) bool grid, True = shape."""

    width: int
    height: int
    mask: np.ndarray

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ImageError("image dimensions must be at least 1x1")
        self.mask = np.asarray(self.mask, dtype=bool)
        if self.mask.shape != (self.height, self.width):
            raise ImageError(
                f"mask shape {self.mask.shape} does not match "
                f"{self.height}x{self.width}"
            )

    @classmethod
    def from_mask(cls, mask) -> "BinaryImage":
        mask = np.asarray(mask, dtype=bool)
        return cls(width=mask.shape[1], height=mask.shape[0], mask=mask)

    @property
    def foreground_count(self) -> int:
        return int(self.mask.sum())


@dataclass
class Contour:
    """Ordered cyclic point sequence (index arithmetic is mod N)."""

    points: np.ndarray
    orientation: Orientation = Orientation.COUNTERCLOCKWISE

    def __post_init__(self):
        pts = np.array(self.points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise ContourError("contour points must be an (N, 2) array")
        if len(pts) < 3:
            raise ContourError("contour needs at least 3 points")
        if not np.isfinite(pts).all():
            raise ContourError("contour coordinates must be finite")
        wrap_diff = np.roll(pts, -1, axis=0) - pts
        if not np.any(wrap_diff != 0, axis=1).all():
            raise ContourError("consecutive contour points must be distinct")
        pts.setflags(write=False)
        self.points = pts
        self.orientation = Orientation(self.orientation)

    def __len__(self) -> int:
        return len(self.points)

    @property
    def perimeter(self) -> float:
        seg = np.roll(self.points, -1, axis=0) - self.points
        return float(np.hypot(seg[:, 0], seg[:, 1]).sum())


# --- raster loading ---------------------------------------------------------

_PNM_MAGICS = (b"P1", b"P2", b"P3", b"P5", b"P6")


def _pnm_tokens(data: bytes, pos: int):
    """Yield whitespace-separated tokens starting at pos, skipping # comments.

    Returns (token, new_pos) via a closure-free generator protocol: we just
    implement it as a helper returning the next token and position.
    """
    n = len(data)
    while True:
        while pos < n and data[pos : pos + 1].isspace():
            pos += 1
        if pos < n and data[pos] == ord("#"):
            nl = data.find(b"\n", pos)
            pos = n if nl < 0 else nl + 1
            continue
        break
    if pos >= n:
        raise ImageError("truncated PNM header")
    start = pos
    while pos < n and not data[pos : pos + 1].isspace() and data[pos] != ord("#"):
        pos += 1
    return data[start:pos], pos


def _parse_pnm(data: bytes) -> np.ndarray:
    magic = data[:2].decode("ascii")
    pos = 2
    tok, pos = _pnm_tokens(data, pos)
    width = int(tok)
    tok, pos = _pnm_tokens(data, pos)
    height = int(tok)
    if width < 1 or height < 1:
        raise ImageError("PNM dimensions must be positive")
    if magic == "P1":
        bits = [c - ord("0") for c in data[pos:] if c in (ord("0"), ord("1"))]
        if len(bits) < width * height:
            raise ImageError("truncated P1 data")
        arr = np.array(bits[: width * height], dtype=np.uint8).reshape(height, width)
        return np.where(arr == 1, 0, 255).astype(np.uint8)  # PBM: 1 = black

    tok, pos = _pnm_tokens(data, pos)
    maxval = int(tok)
    if not 0 < maxval < 65536:
        raise ImageError(f"invalid PNM maxval {maxval}")
    channels = 3 if magic in ("P3", "P6") else 1
    count = width * height * channels

    if magic in ("P2", "P3"):
        values = []
        while len(values) < count:
            tok, pos = _pnm_tokens(data, pos)
            values.append(int(tok))
        arr = np.array(values, dtype=np.uint32)
    else:  # P5 / P6: single whitespace byte, then raw samples
        pos += 1
        itemsize = 2 if maxval > 255 else 1
        if len(data) - pos < count * itemsize:
            raise ImageError("truncated PNM raster data")
        dtype = ">u2" if maxval > 255 else np.uint8
        arr = np.frombuffer(data, dtype=dtype, count=count, offset=pos).astype(np.uint32)

    if (arr > maxval).any():
        raise ImageError("PNM sample exceeds declared maxval")
    arr = arr.reshape(height, width, channels) if channels == 3 else arr.reshape(height, width)
    if channels == 3:
        arr = arr.sum(axis=2) // 3
    if maxval != 255:
        arr = arr * 255 // maxval
    return arr.astype(np.uint8)


def _load_gray(path: Path) -> np.ndarray:
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise ImageError(f"cannot read image file {path}: {exc}") from exc
    if data[:2] in _PNM_MAGICS:
        return _parse_pnm(data)
    try:
        from PIL import Image, UnidentifiedImageError
    except ImportError as exc:  # pragma: no cover - pillow is a hard dep
        raise ImageError("Pillow is required for non-PNM formats") from exc
    try:
        with Image.open(path) as im:
            return np.asarray(im.convert("L"), dtype=np.uint8)
    except UnidentifiedImageError as exc:
        raise ImageError(f"unsupported raster format: {path}") from exc
    except OSError as exc:
        raise ImageError(f"cannot decode image {path}: {exc}") from exc


def load_binary_image(path, threshold: int = 128, polarity: str = "auto") -> BinaryImage:
    """Load a raster file and threshold it to a foreground mask.

    Pixels with gray value >= threshold form the "light" class. polarity
    picks which class is the shape: "light", "dark", or "auto" (the minority
    class; ties and single-class images resolve to light). Raises ImageError
    when the file is unreadable, the format unsupported, or the resulting
    foreground is empty.
    """
    path = Path(path)
    if not path.is_file():
        raise ImageError(f"image file not found: {path}")
    if not 0 <= threshold <= 255:
        raise ImageError(f"threshold must be in [0, 255], got {threshold}")
    gray = _load_gray(path)
    if gray.ndim != 2 or gray.size == 0:
        raise ImageError(f"empty or non-2D raster: {path}")
    light = gray >= threshold
    if polarity == "light":
        fg = light
    elif polarity == "dark":
        fg = ~light
    elif polarity == "auto":
        n_light = int(light.sum())
        n_dark = light.size - n_light
        fg = light if (n_dark == 0 or n_light <= n_dark) else ~light
    else:
        raise ImageError(f"unknown polarity {polarity!r}")
    if not fg.any():
        raise ImageError(f"zero foreground pixels in {path}")
    return BinaryImage.from_mask(fg)


# --- contour tracing --------------------------------------------------------

# Moore neighborhood in clockwise order (row, col deltas; row grows downward)
_DIRS8 = ((0, 1), (1, 1), (1, 0), (1, -1), (0, -1), (-1, -1), (-1, 0), (-1, 1))
_DIR_INDEX = {d: i for i, d in enumerate(_DIRS8)}
_WEST = 4


def _moore_cycle(comp: np.ndarray) -> list[tuple[int, int]]:
    """Boundary pixel cycle of a connected component mask.

    Moore-neighbor tracing; the walk is a deterministic map on
    (pixel, backtrack-direction) states, so the first repeated state closes
    the boundary loop (Jacob's stopping criterion falls out as the common
    case where the initial state itself recurs).
    """
    h, w = comp.shape
    flat = int(np.argmax(comp))
    r0, c0 = divmod(flat, w)

    def step(state):
        (r, c), back = state
        for k in range(1, 9):
            d = (back + k) % 8
            nr, nc = r + _DIRS8[d][0], c + _DIRS8[d][1]
            if 0 <= nr < h and 0 <= nc < w and comp[nr, nc]:
                pd = (back + k - 1) % 8
                br, bc = r + _DIRS8[pd][0], c + _DIRS8[pd][1]
                return (nr, nc), _DIR_INDEX[(br - nr, bc - nc)]
        return None  # isolated pixel

    state = ((r0, c0), _WEST)
    seen = {state: 0}
    trail = [state]
    while True:
        nxt = step(state)
        if nxt is None:
            return [(r0, c0)]
        if nxt in seen:
            cycle = trail[seen[nxt]:]
            break
        seen[nxt] = len(trail)
        trail.append(nxt)
        state = nxt

    pixels = [s[0] for s in cycle]
    first = min(range(len(pixels)), key=lambda i: pixels[i])
    return pixels[first:] + pixels[:first]


def _signed_area(points: np.ndarray) -> float:
    x, y = points[:, 0], points[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    return float(0.5 * np.sum(x * yn - xn * y))


def extract_contour(img: BinaryImage) -> Contour:
    """Trace the outer boundary of the largest 8-connected foreground component.

    Returns the boundary pixels in counterclockwise order (positive shoelace
    area). Holes are ignored. Raises ContourError when there is no foreground
    or the boundary has fewer than 3 pixels.
    """
    if not img.mask.any():
        raise ContourError("no foreground component")
    labels, n_labels = ndimage.label(img.mask, structure=np.ones((3, 3), dtype=bool))
    sizes = np.bincount(labels.ravel())
    sizes[0] = 0
    comp = labels == int(sizes.argmax())
    pixels = _moore_cycle(comp)
    if len(pixels) < 3:
        raise ContourError("largest component too small: boundary has fewer than 3 pixels")
    points = np.array([(c, r) for r, c in pixels], dtype=np.float64)
    if _signed_area(points) < 0:
        points = np.concatenate([points[:1], points[:0:-1]])
    return Contour(points=points, orientation=Orientation.COUNTERCLOCKWISE)


def resample_contour(c: Contour, n: int) -> Contour:
    """Resample the closed polyline to n points at equal arc-length spacing,
    starting from the contour's first point."""
    if n < 3:
        raise ContourError(f"resample count must be at least 3, got {n}")
    pts = c.points
    seg = np.roll(pts, -1, axis=0) - pts
    seg_len = np.hypot(seg[:, 0], seg[:, 1])
    cum = np.concatenate([[0.0], np.cumsum(seg_len)])
    perimeter = cum[-1]
    if perimeter <= 0:
        raise ContourError("contour has zero perimeter")
    targets = perimeter * np.arange(n) / n
    idx = np.searchsorted(cum, targets, side="right") - 1
    idx = np.clip(idx, 0, len(pts) - 1)
    local = (targets - cum[idx]) / seg_len[idx]
    new_pts = pts[idx] + local[:, None] * seg[idx]
    return Contour(points=new_pts, orientation=c.orientation)


def centroid(c: Contour) -> Point:
    """Arithmetic mean of the contour points (the center of gravity)."""
    mx, my = c.points.mean(axis=0)
    return Point(float(mx), float(my))


# --- text serialization -----------------------------------------------------

def contour_to_text(c: Contour) -> str:
    lines = [f"N {len(c)}"]
    lines.extend(f"{float(x)!r} {float(y)!r}" for x, y in c.points)
    return "\n".join(lines) + "\n"


def contour_from_text(text: str) -> Contour:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("N "):
        raise ContourError("contour text must start with 'N <count>'")
    try:
        count = int(lines[0][2:])
        pts = [tuple(float(v) for v in ln.split()) for ln in lines[1:]]
    except ValueError as exc:
        raise ContourError(f"malformed contour text: {exc}") from exc
    if len(pts) != count:
        raise ContourError(f"contour text declares {count} points, found {len(pts)}")
    return Contour(points=np.array(pts, dtype=np.float64))
