"""Dataset ingestion, the string index, ranked queries, and benchmark metrics.

The query path runs geometry -> symbolic only: the symbolic descriptor is
pose invariant, so the pairwise shape-context / Procrustes stage is reserved
for the full-pipeline match mode.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import NamedTuple

import numpy as np

from . import seqalign
from .config import Config
from .errors import ShapeAlignError, UsageError
from .geometry import Contour, extract_contour, load_binary_image, resample_contour
from .seqalign import AlignParams, SubstitutionMatrix, symbol_codes
from .symbolic import QuantizationConfig, SymbolString, anchor, encode
from . import _kernels

INDEX_MAGIC = "shapealign-index v1"


class ManifestEntry(NamedTuple):
    shape_id: str
    label: str
    path: Path


def read_manifest(path) -> list[ManifestEntry]:
    """TSV manifest: shape_id, class label, image path (relative paths are
    resolved against the manifest's directory). Ids must be unique and every
    path must exist."""
    path = Path(path)
    if not path.is_file():
        raise ShapeAlignError(f"manifest not found: {path}")
    entries: list[ManifestEntry] = []
    seen: set[str] = set()
    for lineno, line in enumerate(path.read_text().splitlines(), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise ShapeAlignError(f"{path}:{lineno}: expected 3 tab-separated fields")
        shape_id, label, img = (p.strip() for p in parts)
        if not shape_id or not label or not img:
            raise ShapeAlignError(f"{path}:{lineno}: empty field")
        if shape_id in seen:
            raise ShapeAlignError(f"{path}:{lineno}: duplicate shape id {shape_id!r}")
        seen.add(shape_id)
        img_path = Path(img)
        if not img_path.is_absolute():
            img_path = path.parent / img_path
        if not img_path.is_file():
            raise ShapeAlignError(f"{path}:{lineno}: image not found: {img_path}")
        entries.append(ManifestEntry(shape_id=shape_id, label=label, path=img_path))
    if not entries:
        raise ShapeAlignError(f"manifest is empty: {path}")
    return entries


@dataclass(frozen=True)
class IndexParams:
    """Snapshot of everything that shaped the stored strings and their scores."""

    n_points: int = 100
    k_angle_bins: int = 6
    gap: Fraction = Fraction(-2)
    matrix: SubstitutionMatrix = field(default_factory=SubstitutionMatrix.default)
    threshold: int = 128
    polarity: str = "auto"

    @classmethod
    def from_config(cls, cfg: Config) -> "IndexParams":
        return cls(
            n_points=cfg.n_points,
            k_angle_bins=cfg.k_angle_bins,
            gap=cfg.gap_penalty,
            matrix=cfg.substitution_matrix(),
            threshold=cfg.threshold,
            polarity=cfg.polarity,
        )

    def align_params(self) -> AlignParams:
        return AlignParams(gap=self.gap, matrix=self.matrix)

    def header(self) -> str:
        if self.matrix == SubstitutionMatrix.default():
            matrix_repr = "default"
        else:
            matrix_repr = ",".join(str(v) for row in self.matrix.scores for v in row)
        parts = [
            INDEX_MAGIC,
            f"n_points={self.n_points}",
            f"k={self.k_angle_bins}",
            f"gap={self.gap}",
            f"threshold={self.threshold}",
            f"polarity={self.polarity}",
            f"matrix={matrix_repr}",
        ]
        return "\t".join(parts)

    @classmethod
    def from_header(cls, line: str) -> "IndexParams":
        parts = line.rstrip("\n").split("\t")
        if not parts or parts[0] != INDEX_MAGIC:
            raise ShapeAlignError(f"not a shapealign index (expected {INDEX_MAGIC!r} header)")
        kv = {}
        for part in parts[1:]:
            key, _, value = part.partition("=")
            kv[key] = value
        try:
            if kv["matrix"] == "default":
                matrix = SubstitutionMatrix.default()
            else:
                cells = [Fraction(v) for v in kv["matrix"].split(",")]
                if len(cells) != 81:
                    raise ShapeAlignError("index matrix snapshot must have 81 entries")
                matrix = SubstitutionMatrix(
                    scores=tuple(tuple(cells[i * 9 : (i + 1) * 9]) for i in range(9))
                )
            return cls(
                n_points=int(kv["n_points"]),
                k_angle_bins=int(kv["k"]),
                gap=Fraction(kv["gap"]),
                threshold=int(kv["threshold"]),
                polarity=kv["polarity"],
                matrix=matrix,
            )
        except (KeyError, ValueError, ZeroDivisionError) as exc:
            raise ShapeAlignError(f"corrupt index header: {exc!r}") from exc


class IndexRecord(NamedTuple):
    shape_id: str
    label: str
    symbols: str


@dataclass
class RetrievalIndex:
    records: list[IndexRecord]
    params: IndexParams
    contours: dict[str, np.ndarray] | None = None  # in-memory builds only
    failures: list[tuple[str, str]] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.records)

    def record(self, shape_id: str) -> IndexRecord:
        for rec in self.records:
            if rec.shape_id == shape_id:
                return rec
        raise ShapeAlignError(f"shape id not in index: {shape_id!r}")


def encode_image(path, params: IndexParams) -> tuple[SymbolString, Contour]:
    """The per-shape pipeline: load, trace, resample, encode."""
    img = load_binary_image(path, threshold=params.threshold, polarity=params.polarity)
    contour = resample_contour(extract_contour(img), params.n_points)
    symbols = encode(contour, QuantizationConfig(k_angle_bins=params.k_angle_bins))
    return symbols, contour


def build_index(entries: list[ManifestEntry], params: IndexParams | None = None) -> RetrievalIndex:
    """Encode every manifest entry; per-shape failures are recorded, not fatal."""
    if not entries:
        raise ShapeAlignError("cannot build an index from an empty manifest")
    params = params or IndexParams()
    records: list[IndexRecord] = []
    contours: dict[str, np.ndarray] = {}
    failures: list[tuple[str, str]] = []
    for entry in entries:
        try:
            symbols, contour = encode_image(entry.path, params)
        except ShapeAlignError as exc:
            failures.append((entry.shape_id, str(exc)))
            continue
        records.append(IndexRecord(entry.shape_id, entry.label, symbols.symbols))
        contours[entry.shape_id] = contour.points
    if not records:
        raise ShapeAlignError(f"all {len(entries)} manifest entries failed the pipeline")
    return RetrievalIndex(records=records, params=params, contours=contours, failures=failures)


def index_to_text(idx: RetrievalIndex) -> str:
    lines = [idx.params.header()]
    lines.extend(f"{r.shape_id}\t{r.label}\t{r.symbols}" for r in idx.records)
    return "\n".join(lines) + "\n"


def save_index(idx: RetrievalIndex, path) -> None:
    Path(path).write_text(index_to_text(idx))


def load_index(path) -> RetrievalIndex:
    path = Path(path)
    if not path.is_file():
        raise ShapeAlignError(f"index file not found: {path}")
    lines = path.read_text().splitlines()
    if not lines:
        raise ShapeAlignError(f"index file is empty: {path}")
    params = IndexParams.from_header(lines[0])
    records = []
    seen: set[str] = set()
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise ShapeAlignError(f"{path}:{lineno}: expected 3 tab-separated fields")
        shape_id, label, symbols = parts
        if shape_id in seen:
            raise ShapeAlignError(f"{path}:{lineno}: duplicate shape id {shape_id!r}")
        seen.add(shape_id)
        symbol_codes(symbols)  # validates the alphabet
        records.append(IndexRecord(shape_id, label, symbols))
    if not records:
        raise ShapeAlignError(f"index has no records: {path}")
    return RetrievalIndex(records=records, params=params, contours=None)


class RankedItem(NamedTuple):
    shape_id: str
    raw: Fraction
    normalized: Fraction


def _rank(symbols: str, records: list[IndexRecord], params: AlignParams) -> list[RankedItem]:
    items = []
    for rec in records:
        raw = seqalign.raw_score(symbols, rec.symbols, params)
        shorter = min(len(symbols), len(rec.symbols))
        normalized = raw / (2 * shorter) if shorter else Fraction(0)
        items.append(RankedItem(rec.shape_id, raw, normalized))
    items.sort(key=lambda it: (-it.raw, it.shape_id))
    return items


def query_symbols(idx: RetrievalIndex, symbols, top_k: int | None = None) -> list[RankedItem]:
    """Align a symbol string against every record; descending raw score,
    ties by shape id."""
    if not idx.records:
        raise ShapeAlignError("index is empty")
    symbols = symbols.symbols if isinstance(symbols, SymbolString) else str(symbols)
    symbol_codes(symbols)
    if top_k is not None and top_k < 1:
        raise ShapeAlignError(f"top_k must be at least 1, got {top_k}")
    k = len(idx.records) if top_k is None else int(top_k)
    return _rank(symbols, idx.records, idx.params.align_params())[:k]


def query(idx: RetrievalIndex, q, top_k: int | None = None) -> list[RankedItem]:
    """Query with an image path (str / Path) or an already-encoded
    SymbolString."""
    if isinstance(q, SymbolString):
        return query_symbols(idx, q, top_k)
    symbols, _ = encode_image(q, idx.params)
    return query_symbols(idx, symbols, top_k)


# --- benchmark metrics -------------------------------------------------------

def _pairwise_scores(records: list[IndexRecord], params: AlignParams):
    """All-pairs raw alignment scores; scaled int64 off the kernels when the
    table allows, exact Fractions otherwise. Only relative order is used."""
    n = len(records)
    longest = max(len(r.symbols) for r in records)
    if seqalign._fits_int64(params, longest, longest):
        sub, gap, _ = seqalign._scaled_arrays(params)
        codes = [symbol_codes(r.symbols) for r in records]
        table = np.zeros((n, n), dtype=np.int64)
        for i in range(n):
            for j in range(i + 1, n):
                s = _kernels.nw_score(codes[i], codes[j], sub, gap)
                table[i, j] = s
                table[j, i] = s
        return table
    table = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            s = seqalign.raw_score(records[i].symbols, records[j].symbols, params)
            table[i][j] = s
            table[j][i] = s
    return table


def _neighbor_order(i: int, records: list[IndexRecord], row) -> list[int]:
    others = [j for j in range(len(records)) if j != i]
    others.sort(key=lambda j: (-row[j], records[j].shape_id))
    return others


def retrieval_score(idx: RetrievalIndex, top_k: int | None = None) -> float:
    """Mean fraction of same-class shapes in each query's top-k list
    (self excluded), as a percentage. Queries whose class has no other
    member are left out of the mean."""
    records = idx.records
    if len(records) < 2:
        raise ShapeAlignError("retrieval score needs at least 2 shapes")
    k = 20 if top_k is None else int(top_k)
    if k < 1:
        raise ShapeAlignError(f"top_k must be at least 1, got {top_k}")
    class_sizes: dict[str, int] = {}
    for rec in records:
        class_sizes[rec.label] = class_sizes.get(rec.label, 0) + 1
    table = _pairwise_scores(records, idx.params.align_params())
    fractions = []
    for i, rec in enumerate(records):
        if class_sizes[rec.label] < 2:
            continue
        top = _neighbor_order(i, records, table[i])[: min(k, len(records) - 1)]
        same = sum(1 for j in top if records[j].label == rec.label)
        fractions.append(same / len(top))
    if not fractions:
        raise ShapeAlignError("no class has at least 2 members")
    return 100.0 * sum(fractions) / len(fractions)


def recognition_score(idx: RetrievalIndex) -> float:
    """Leave-one-out nearest-neighbor accuracy, as a percentage."""
    records = idx.records
    if len(records) < 2:
        raise ShapeAlignError("recognition score needs at least 2 shapes")
    table = _pairwise_scores(records, idx.params.align_params())
    hits = 0
    for i, rec in enumerate(records):
        best = min(
            (j for j in range(len(records)) if j != i),
            key=lambda j: (-table[i][j], records[j].shape_id),
        )
        hits += records[best].label == rec.label
    return 100.0 * hits / len(records)


@dataclass
class BenchmarkReport:
    n_records: int
    n_failures: int
    retrieval: dict[int, float]
    recognition: float

    def lines(self) -> list[str]:
        out = [f"records\t{self.n_records}", f"failures\t{self.n_failures}"]
        for k in sorted(self.retrieval):
            out.append(f"retrieval_top{k}\t{self.retrieval[k]!r}")
        out.append(f"recognition\t{self.recognition!r}")
        return out


def benchmark_report(idx: RetrievalIndex, top_ks: tuple[int, ...] = (20, 40)) -> BenchmarkReport:
    return BenchmarkReport(
        n_records=len(idx.records),
        n_failures=len(idx.failures),
        retrieval={k: retrieval_score(idx, k) for k in top_ks},
        recognition=recognition_score(idx),
    )


# --- occlusion ---------------------------------------------------------------

def occlude(c: Contour, fraction: float, start: int | None = None) -> Contour:
    """Drop a contiguous arc of round(fraction * N) points and re-close.

    The removed arc starts opposite the D_max anchor unless a start index is
    given. fraction 0 returns the contour unchanged.
    """
    if not 0 <= fraction < 1:
        raise ShapeAlignError(f"occlusion fraction must be in [0, 1), got {fraction}")
    n = len(c)
    k = int(round(fraction * n))
    if k == 0:
        return c
    if n - k < 3:
        raise ShapeAlignError(
            f"occluding {k} of {n} points leaves fewer than 3"
        )
    if start is None:
        a = anchor(c)
        start = (a.ix + n // 2) % n
    keep = [(start + k + t) % n for t in range(n - k)]
    return Contour(points=c.points[keep], orientation=c.orientation)


@dataclass
class OcclusionTable:
    fractions: list[float]
    k_values: list[int]
    accuracy: list[list[float]]  # [fraction][k] recognition percentages

    def cell(self, fraction: float, k: int) -> float:
        return self.accuracy[self.fractions.index(fraction)][self.k_values.index(k)]

    def to_tsv(self) -> str:
        lines = ["fraction\t" + "\t".join(f"k={k}" for k in self.k_values)]
        for frac, row in zip(self.fractions, self.accuracy):
            lines.append(repr(float(frac)) + "\t" + "\t".join(repr(v) for v in row))
        return "\n".join(lines) + "\n"


def occlusion_sweep(
    idx: RetrievalIndex,
    fractions: list[float],
    k_values: list[int],
    start: int | None = None,
) -> OcclusionTable:
    """Recognition accuracy of occluded queries against the intact index,
    re-encoded at each angle-bin count. Self matches are excluded, so the
    zero-occlusion column equals recognition_score at that k."""
    if idx.contours is None:
        raise ShapeAlignError("occlusion sweep needs an index built in memory (with contours)")
    records = [r for r in idx.records if r.shape_id in idx.contours]
    if len(records) < 2:
        raise ShapeAlignError("occlusion sweep needs at least 2 shapes with contours")
    params = idx.params.align_params()
    max_len = 3 * idx.params.n_points
    use_kernel = seqalign._fits_int64(params, max_len, max_len)
    if use_kernel:
        sub, gap, _ = seqalign._scaled_arrays(params)
    accuracy = [[0.0] * len(k_values) for _ in fractions]
    for ki, k in enumerate(k_values):
        qcfg = QuantizationConfig(k_angle_bins=k)
        intact = []
        for rec in records:
            contour = Contour(points=idx.contours[rec.shape_id])
            intact.append(encode(contour, qcfg).symbols)
        intact_codes = [symbol_codes(s) for s in intact] if use_kernel else None
        for fi, fraction in enumerate(fractions):
            hits = 0
            for qi, rec in enumerate(records):
                contour = Contour(points=idx.contours[rec.shape_id])
                try:
                    occluded = occlude(contour, fraction, start=start)
                    q_symbols = encode(occluded, qcfg).symbols
                except ShapeAlignError:
                    continue  # failed query counts as a miss
                q_codes = symbol_codes(q_symbols) if use_kernel else None
                best = None
                for j, rec_j in enumerate(records):
                    if j == qi:
                        continue
                    if use_kernel:
                        s = _kernels.nw_score(q_codes, intact_codes[j], sub, gap)
                    else:
                        s = seqalign.raw_score(q_symbols, intact[j], params)
                    key = (-s, rec_j.shape_id)
                    if best is None or key < best[0]:
                        best = (key, rec_j.label)
                hits += best is not None and best[1] == rec.label
            accuracy[fi][ki] = 100.0 * hits / len(records)
    return OcclusionTable(fractions=list(fractions), k_values=list(k_values), accuracy=accuracy)
