"""Pipeline configuration shared by the CLI and the retrieval harness.

Config files are flat key=value text; keys match the Config field names.
Unknown keys are rejected.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from fractions import Fraction
from pathlib import Path

from .errors import UsageError
from .seqalign import AlignParams, SubstitutionMatrix
from .shape_context import BinConfig
from .symbolic import QuantizationConfig


@dataclass(frozen=True)
class Config:
    n_points: int = 100
    k_angle_bins: int = 6
    radial_bins: int = 5
    angular_bins: int = 12
    r_inner: float = 0.125
    r_outer_scale: float = 2.0
    skip_penalty: float = 0.3
    gap_penalty: Fraction = Fraction(-2)
    matrix_path: str | None = None
    top_k: int = 20
    threshold: int = 128
    polarity: str = "auto"

    def __post_init__(self):
        object.__setattr__(self, "gap_penalty", Fraction(self.gap_penalty))
        if self.n_points < 3:
            raise UsageError(f"n_points must be at least 3, got {self.n_points}")
        if not 2 <= self.k_angle_bins <= 6:
            raise UsageError(f"k must be between 2 and 6, got {self.k_angle_bins}")
        if self.gap_penalty >= 0:
            raise UsageError(f"gap penalty must be negative, got {self.gap_penalty}")
        if self.top_k < 1:
            raise UsageError(f"top_k must be at least 1, got {self.top_k}")
        if not 0 <= self.threshold <= 255:
            raise UsageError(f"threshold must be in [0, 255], got {self.threshold}")
        if self.polarity not in ("auto", "light", "dark"):
            raise UsageError(f"polarity must be auto, light, or dark, got {self.polarity!r}")
        if self.skip_penalty <= 0:
            raise UsageError(f"skip_penalty must be positive, got {self.skip_penalty}")

    def bin_config(self) -> BinConfig:
        return BinConfig(
            radial_bins=self.radial_bins,
            angular_bins=self.angular_bins,
            r_inner=self.r_inner,
            r_outer_scale=self.r_outer_scale,
        )

    def quantization(self) -> QuantizationConfig:
        return QuantizationConfig(k_angle_bins=self.k_angle_bins)

    def substitution_matrix(self) -> SubstitutionMatrix:
        if self.matrix_path is None:
            return SubstitutionMatrix.default()
        return SubstitutionMatrix.from_file(self.matrix_path)

    def align_params(self) -> AlignParams:
        return AlignParams(gap=self.gap_penalty, matrix=self.substitution_matrix())


_FIELD_PARSERS = {
    "n_points": int,
    "k_angle_bins": int,
    "radial_bins": int,
    "angular_bins": int,
    "r_inner": float,
    "r_outer_scale": float,
    "skip_penalty": float,
    "gap_penalty": Fraction,
    "matrix_path": str,
    "top_k": int,
    "threshold": int,
    "polarity": str,
}

assert set(_FIELD_PARSERS) == {f.name for f in fields(Config)}


def load_config_file(path) -> dict[str, str]:
    path = Path(path)
    if not path.is_file():
        raise UsageError(f"config file not found: {path}")
    values: dict[str, str] = {}
    for lineno, line in enumerate(path.read_text().splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise UsageError(f"{path}:{lineno}: expected key=value, got {stripped!r}")
        key, _, value = stripped.partition("=")
        values[key.strip()] = value.strip()
    return values


def make_config(file_values: dict[str, str] | None = None, **overrides) -> Config:
    """Defaults <- config file <- explicit overrides (None = not given)."""
    merged: dict[str, object] = {}
    for key, raw in (file_values or {}).items():
        parser = _FIELD_PARSERS.get(key)
        if parser is None:
            raise UsageError(f"unknown config key {key!r}")
        try:
            merged[key] = parser(raw)
        except (ValueError, ZeroDivisionError) as exc:
            raise UsageError(f"bad value for config key {key!r}: {exc}") from exc
    for key, value in overrides.items():
        if key not in _FIELD_PARSERS:
            raise UsageError(f"unknown config key {key!r}")
        if value is not None:
            merged[key] = value
    return Config(**merged)
