"""Global alignment of shape symbol strings.

Scoring follows a Needleman-Wunsch recurrence with one twist kept on
purpose: the first row and column of the score grid are zeros, which makes
leading overhangs free (semi-global semantics). All scores are exact
rationals; internally every score is scaled by the least common denominator
of the table so the DP runs on integers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from pathlib import Path

import numpy as np

from . import _kernels
from .errors import ShapeAlignError, UsageError

ALPHABET = "ABCDEFSML"
ANGLE_SYMBOLS = ALPHABET[:6]
SIZE_SYMBOLS = ALPHABET[6:]
_SYM_INDEX = {ch: i for i, ch in enumerate(ALPHABET)}

_CODE_LUT = np.full(128, -1, dtype=np.int16)
for _ch, _i in _SYM_INDEX.items():
    _CODE_LUT[ord(_ch)] = _i

GAP_MARK = "-"

# A scaled |score| * (len1 + len2 + 2) beyond this bound falls back to
# arbitrary-precision Python integers instead of the int64 kernels.
_INT64_SAFE = 2**62


def symbol_codes(s: str) -> np.ndarray:
    """Map a symbol string to uint8 alphabet indices, validating membership."""
    raw = np.frombuffer(s.encode("ascii", errors="replace"), dtype=np.uint8)
    codes = _CODE_LUT[np.minimum(raw, 127)]
    if (codes < 0).any():
        bad = s[int(np.argmax(codes < 0))]
        raise ShapeAlignError(f"unknown symbol {bad!r}; alphabet is {ALPHABET}")
    return codes.astype(np.uint8)


def _as_symbols(s) -> str:
    if isinstance(s, str):
        return s
    symbols = getattr(s, "symbols", None)
    if isinstance(symbols, str):
        return symbols
    raise TypeError(f"expected a symbol string, got {type(s).__name__}")


def _parse_rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad rational value {text!r}: {exc}") from exc


def format_rational(x: Fraction, exact: bool = False) -> str:
    """Decimal by default (shortest round-trip float), p/q with exact=True."""
    x = Fraction(x)
    if exact:
        return str(x)
    if x.denominator == 1:
        return str(x.numerator)
    return repr(float(x))


@dataclass(frozen=True)
class SubstitutionMatrix:
    """9x9 symmetric rational score table in A,B,C,D,E,F,S,M,L order."""

    scores: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(Fraction(v) for v in row) for row in self.scores)
        if len(rows) != 9 or any(len(r) != 9 for r in rows):
            raise UsageError("substitution matrix must be 9x9")
        for i in range(9):
            if rows[i][i] != 2:
                raise UsageError(
                    f"diagonal entry for {ALPHABET[i]} must be 2, got {rows[i][i]}"
                )
            for j in range(9):
                if rows[i][j] != rows[j][i]:
                    raise UsageError(
                        f"matrix not symmetric at ({ALPHABET[i]}, {ALPHABET[j]})"
                    )
        object.__setattr__(self, "scores", rows)

    @classmethod
    def default(cls) -> "SubstitutionMatrix":
        """Canonical table: angle pairs score 2 or 1/distance, size pairs
        2 / 1 / (1/2) by adjacency, angle-vs-size scores -2."""
        rows = []
        for i in range(9):
            row = []
            for j in range(9):
                if (i < 6) != (j < 6):
                    row.append(Fraction(-2))
                elif i == j:
                    row.append(Fraction(2))
                elif i < 6:
                    row.append(Fraction(1, abs(i - j)))
                else:
                    row.append(Fraction(1) if abs(i - j) == 1 else Fraction(1, 2))
            rows.append(tuple(row))
        return cls(scores=tuple(rows))

    def score(self, a: str, b: str) -> Fraction:
        try:
            return self.scores[_SYM_INDEX[a]][_SYM_INDEX[b]]
        except KeyError as exc:
            raise ShapeAlignError(f"unknown symbol {exc.args[0]!r}") from exc

    def to_text(self) -> str:
        lines = ["\t" + "\t".join(ALPHABET)]
        for i, ch in enumerate(ALPHABET):
            lines.append(ch + "\t" + "\t".join(str(v) for v in self.scores[i]))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "SubstitutionMatrix":
        rows = [ln.split("\t") for ln in text.splitlines() if ln.strip()]
        if len(rows) != 10:
            raise UsageError(f"matrix file must have 10 rows, found {len(rows)}")
        header = [cell.strip() for cell in rows[0] if cell.strip()]
        if header != list(ALPHABET):
            raise UsageError(f"matrix header must be {' '.join(ALPHABET)}")
        scores = []
        for ln in rows[1:]:
            cells = [cell for cell in ln if cell.strip()]
            if len(cells) != 10:
                raise UsageError(f"matrix row {ln[0]!r} must have 10 columns")
            scores.append(tuple(_parse_rational(c) for c in cells[1:]))
        labels = [ln[0].strip() for ln in rows[1:]]
        if labels != list(ALPHABET):
            raise UsageError(f"matrix row labels must be {' '.join(ALPHABET)}")
        return cls(scores=tuple(scores))

    @classmethod
    def from_file(cls, path) -> "SubstitutionMatrix":
        path = Path(path)
        if not path.is_file():
            raise UsageError(f"matrix file not found: {path}")
        return cls.from_text(path.read_text())


@dataclass(frozen=True)
class AlignParams:
    gap: Fraction = Fraction(-2)
    matrix: SubstitutionMatrix = field(default_factory=SubstitutionMatrix.default)

    def __post_init__(self):
        object.__setattr__(self, "gap", Fraction(self.gap))
        if self.gap >= 0:
            raise UsageError(f"gap penalty must be negative, got {self.gap}")


@lru_cache(maxsize=32)
def _scaled(params: AlignParams):
    """LCM-scale the table and gap to integers: (sub rows, gap, scale)."""
    denoms = [params.gap.denominator]
    for row in params.matrix.scores:
        denoms.extend(v.denominator for v in row)
    scale = math.lcm(*denoms)
    sub = tuple(
        tuple(int(v * scale) for v in row) for row in params.matrix.scores
    )
    gap = int(params.gap * scale)
    return sub, gap, scale


@lru_cache(maxsize=32)
def _scaled_arrays(params: AlignParams):
    sub, gap, scale = _scaled(params)
    return np.array(sub, dtype=np.int64), gap, scale


def _fits_int64(params: AlignParams, n: int, m: int) -> bool:
    sub, gap, _ = _scaled(params)
    peak = max(abs(gap), max(abs(v) for row in sub for v in row))
    return peak * (n + m + 2) < _INT64_SAFE


def _fill_bigint(codes1, codes2, sub, gap):
    """Python-int DP fill for tables whose scaled values overflow int64."""
    n, m = len(codes2), len(codes1)
    F = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(1, n + 1):
        row, prev = F[i], F[i - 1]
        srow = sub[codes2[i - 1]]
        for j in range(1, m + 1):
            row[j] = max(prev[j - 1] + srow[codes1[j - 1]], prev[j] + gap, row[j - 1] + gap)
    return F


@dataclass
class ScoreMatrix:
    """(N+1) x (M+1) grid of scaled integer scores; N = |s2| rows, M = |s1| cols."""

    scaled: object  # int64 ndarray or list of lists of python ints
    scale: int

    @property
    def n_rows(self) -> int:
        return len(self.scaled)

    @property
    def n_cols(self) -> int:
        return len(self.scaled[0])

    def raw(self, i: int, j: int) -> int:
        return int(self.scaled[i][j]) if isinstance(self.scaled, list) else int(self.scaled[i, j])

    def value(self, i: int, j: int) -> Fraction:
        return Fraction(self.raw(i, j), self.scale)

    @property
    def final(self) -> Fraction:
        return self.value(self.n_rows - 1, self.n_cols - 1)


@dataclass(frozen=True)
class AlignmentResult:
    score: Fraction
    normalized: Fraction
    path: tuple[str, ...]  # moves from (N, M) back to the border
    aligned: tuple[str, str]


def substitution_score(a: str, b: str, m: SubstitutionMatrix) -> Fraction:
    return m.score(a, b)


def score_matrix(s1, s2, params: AlignParams | None = None) -> ScoreMatrix:
    """Fill the alignment grid for s1 (columns) vs s2 (rows).

    Borders are zero; interior cells take the max of diagonal + substitution
    and either neighbor + gap. Arithmetic is exact.
    """
    params = params or AlignParams()
    s1, s2 = _as_symbols(s1), _as_symbols(s2)
    codes1, codes2 = symbol_codes(s1), symbol_codes(s2)
    if _fits_int64(params, len(s1), len(s2)):
        sub, gap, scale = _scaled_arrays(params)
        grid = _kernels.nw_fill(codes1, codes2, sub, gap)
    else:
        sub, gap, scale = _scaled(params)
        grid = _fill_bigint(codes1.tolist(), codes2.tolist(), sub, gap)
    return ScoreMatrix(scaled=grid, scale=scale)


def raw_score(s1, s2, params: AlignParams | None = None) -> Fraction:
    """Final alignment score only (no grid kept); exact."""
    params = params or AlignParams()
    s1, s2 = _as_symbols(s1), _as_symbols(s2)
    codes1, codes2 = symbol_codes(s1), symbol_codes(s2)
    if _fits_int64(params, len(s1), len(s2)):
        sub, gap, scale = _scaled_arrays(params)
        return Fraction(_kernels.nw_score(codes1, codes2, sub, gap), scale)
    sub, gap, scale = _scaled(params)
    grid = _fill_bigint(codes1.tolist(), codes2.tolist(), sub, gap)
    return Fraction(grid[-1][-1], scale)


def _normalized(score: Fraction, len1: int, len2: int) -> Fraction:
    shorter = min(len1, len2)
    if shorter == 0:
        return Fraction(0)
    return score / (2 * shorter)


def traceback(m: ScoreMatrix, s1, s2, params: AlignParams | None = None) -> AlignmentResult:
    """Recover one optimal alignment from the filled grid.

    Walks from (N, M) to the first border cell; ties break diagonal > up >
    left. Leading characters skipped via the zero border are emitted as an
    unpenalized overhang so that removing gap marks reproduces the inputs.
    """
    params = params or AlignParams()
    s1, s2 = _as_symbols(s1), _as_symbols(s2)
    sub, gap, _ = _scaled(params)
    codes1 = [_SYM_INDEX[ch] for ch in s1]
    codes2 = [_SYM_INDEX[ch] for ch in s2]
    n, mm = len(s2), len(s1)
    if m.n_rows != n + 1 or m.n_cols != mm + 1:
        raise ShapeAlignError(
            f"score matrix shape {m.n_rows}x{m.n_cols} does not match strings "
            f"({n + 1}x{mm + 1} expected)"
        )
    i, j = n, mm
    moves = []
    out1, out2 = [], []
    while i > 0 and j > 0:
        here = m.raw(i, j)
        if here == m.raw(i - 1, j - 1) + sub[codes2[i - 1]][codes1[j - 1]]:
            moves.append("diagonal")
            out1.append(s1[j - 1])
            out2.append(s2[i - 1])
            i -= 1
            j -= 1
        elif here == m.raw(i - 1, j) + gap:
            moves.append("up")
            out1.append(GAP_MARK)
            out2.append(s2[i - 1])
            i -= 1
        elif here == m.raw(i, j - 1) + gap:
            moves.append("left")
            out1.append(s1[j - 1])
            out2.append(GAP_MARK)
            j -= 1
        else:
            raise RuntimeError(f"no valid predecessor at cell ({i}, {j}): corrupt score matrix")
    # free leading overhang along the zero border
    lead1 = s1[:j] + GAP_MARK * i
    lead2 = GAP_MARK * j + s2[:i]
    aligned1 = lead1 + "".join(reversed(out1))
    aligned2 = lead2 + "".join(reversed(out2))
    score = m.final
    return AlignmentResult(
        score=score,
        normalized=_normalized(score, mm, n),
        path=tuple(moves),
        aligned=(aligned1, aligned2),
    )


def align_score(s1, s2, params: AlignParams | None = None) -> AlignmentResult:
    """Score grid plus traceback; the raw score ranks, the normalized score
    (score / twice the shorter length) is auxiliary."""
    params = params or AlignParams()
    grid = score_matrix(s1, s2, params)
    return traceback(grid, s1, s2, params)


def score_matrix_tsv(m: ScoreMatrix, s1, s2, exact: bool = False) -> str:
    """Grid as TSV: header row of s1, then the zero border row, then one row
    per s2 symbol."""
    s1, s2 = _as_symbols(s1), _as_symbols(s2)
    lines = ["\t\t" + "\t".join(s1)]
    for i in range(m.n_rows):
        label = "" if i == 0 else s2[i - 1]
        cells = [format_rational(m.value(i, j), exact) for j in range(m.n_cols)]
        lines.append(label + "\t" + "\t".join(cells))
    return "\n".join(lines) + "\n"
