"""Shape matching and retrieval through symbolic contour strings.

Pipeline: binary image -> outer contour -> resampled points -> centroid
anchored symbol string -> Needleman-Wunsch similarity with a custom
substitution table. Shape-context correspondence plus rigid Procrustes
alignment are available for the pairwise full pipeline.
"""

from ._kernels import BACKEND_NAME as KERNEL_BACKEND
from .config import Config, load_config_file, make_config
from .errors import (
    ContourError,
    EncodingError,
    ImageError,
    ShapeAlignError,
    UsageError,
)
from .geometry import (
    BinaryImage,
    Contour,
    Orientation,
    Point,
    centroid,
    extract_contour,
    load_binary_image,
    resample_contour,
)
from .procrustes import ProcrustesResult, RigidTransform, align, identity_correspondence
from .retrieval import (
    IndexParams,
    ManifestEntry,
    RankedItem,
    RetrievalIndex,
    benchmark_report,
    build_index,
    encode_image,
    load_index,
    occlude,
    occlusion_sweep,
    query,
    query_symbols,
    read_manifest,
    recognition_score,
    retrieval_score,
    save_index,
)
from .seqalign import (
    ALPHABET,
    AlignParams,
    AlignmentResult,
    ScoreMatrix,
    SubstitutionMatrix,
    align_score,
    format_rational,
    raw_score,
    score_matrix,
    score_matrix_tsv,
    substitution_score,
    traceback,
)
from .shape_context import (
    BinConfig,
    Correspondence,
    CostMatrix,
    ShapeContextDescriptor,
    compute_histogram,
    correspond,
    cost_matrix,
    descriptor,
    match_cost,
)
from .symbolic import (
    QuantizationConfig,
    State,
    SymbolString,
    encode,
    initial_state,
    quantize_angle,
    quantize_distance,
    states,
)

__version__ = "0.1.0"
