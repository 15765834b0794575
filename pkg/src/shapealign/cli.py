"""Command line interface.

Subcommands: encode, match, index, query, benchmark, occlusion.
Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path

from . import procrustes
from .config import Config, load_config_file, make_config
from .errors import ShapeAlignError, UsageError
from .retrieval import (
    IndexParams,
    benchmark_report,
    build_index,
    encode_image,
    load_index,
    occlusion_sweep,
    query,
    query_symbols,
    read_manifest,
    save_index,
)
from .seqalign import align_score, format_rational
from .shape_context import correspond, cost_matrix, descriptor
from .symbolic import encode


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors exit 1, not argparse's 2
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _common_flags() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", metavar="FILE", help="key=value config file")
    common.add_argument("--n-points", type=int, dest="n_points", help="contour resample count")
    common.add_argument("--k", type=int, dest="k_angle_bins", help="angle bins (2-6)")
    common.add_argument("--gap", dest="gap", help="gap penalty as integer or p/q")
    common.add_argument("--matrix", dest="matrix_path", help="substitution matrix file")
    common.add_argument("--top-k", type=int, dest="top_k", help="result count for queries")
    common.add_argument("--exact", action="store_true", help="print scores as p/q rationals")
    common.add_argument(
        "--full-pipeline",
        action="store_true",
        help="run shape-context correspondence and Procrustes before encoding",
    )
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_flags()
    parser = _Parser(prog="shapealign", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("encode", parents=[common], help="print the symbol string of one image")
    p.add_argument("image")
    p.add_argument("--id", help="shape id for the output line (default: file stem)")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("match", parents=[common], help="align two shapes (or two raw strings)")
    p.add_argument("image_a", nargs="?")
    p.add_argument("image_b", nargs="?")
    p.add_argument("--strings", nargs=2, metavar=("S1", "S2"), help="bypass images")
    p.set_defaults(func=cmd_match)

    p = sub.add_parser("index", parents=[common], help="build an index from a manifest")
    p.add_argument("manifest")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_index)

    p = sub.add_parser("query", parents=[common], help="rank index records against a query")
    p.add_argument("index")
    p.add_argument("query", nargs="?", help="query image path")
    p.add_argument("--string", help="query with a literal symbol string")
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("benchmark", parents=[common], help="retrieval and recognition scores")
    p.add_argument("index")
    p.set_defaults(func=cmd_benchmark)

    p = sub.add_parser("occlusion", parents=[common], help="occlusion recognition sweep")
    p.add_argument("manifest")
    p.add_argument("--fractions", default="0,0.25,0.5", help="comma-separated fractions")
    p.add_argument("--k-values", dest="k_values", default="4,5,6", help="comma-separated bin counts")
    p.add_argument("--offset", type=int, default=None, help="occlusion arc start index")
    p.set_defaults(func=cmd_occlusion)

    return parser


def _resolve_config(args) -> Config:
    file_values = load_config_file(args.config) if args.config else None
    gap = None
    if args.gap is not None:
        try:
            gap = Fraction(args.gap)
        except (ValueError, ZeroDivisionError) as exc:
            raise UsageError(f"bad --gap value {args.gap!r}: {exc}") from exc
    return make_config(
        file_values,
        n_points=args.n_points,
        k_angle_bins=args.k_angle_bins,
        gap_penalty=gap,
        matrix_path=args.matrix_path,
        top_k=args.top_k,
    )


def cmd_encode(args, cfg: Config) -> int:
    symbols, _ = encode_image(args.image, IndexParams.from_config(cfg))
    shape_id = args.id or Path(args.image).stem
    print(f"{shape_id}\t{symbols.symbols}")
    return 0


def cmd_match(args, cfg: Config) -> int:
    align_params = cfg.align_params()
    if args.strings:
        s1, s2 = args.strings
    else:
        if not args.image_a or not args.image_b:
            raise UsageError("match needs two image paths (or --strings S1 S2)")
        params = IndexParams.from_config(cfg)
        sym_a, cont_a = encode_image(args.image_a, params)
        sym_b, cont_b = encode_image(args.image_b, params)
        if args.full_pipeline:
            bins = cfg.bin_config()
            costs = cost_matrix(descriptor(cont_a, bins), descriptor(cont_b, bins))
            corr = correspond(costs, skip_penalty=cfg.skip_penalty)
            fit = procrustes.align(cont_a, cont_b, corr)
            sym_b = encode(fit.aligned, cfg.quantization())
            print(f"correspondence_cost\t{corr.total_cost!r}")
            print(f"correspondence_offset\t{corr.offset}")
            print(f"procrustes_rotation\t{fit.transform.rotation!r}")
            print(f"procrustes_residual\t{fit.residual_rms!r}")
        s1, s2 = sym_a.symbols, sym_b.symbols
    result = align_score(s1, s2, align_params)
    print(f"score\t{format_rational(result.score, args.exact)}")
    print(f"normalized\t{format_rational(result.normalized, args.exact)}")
    print(f"aligned\t{result.aligned[0]}")
    print(f"aligned\t{result.aligned[1]}")
    return 0


def cmd_index(args, cfg: Config) -> int:
    entries = read_manifest(args.manifest)
    idx = build_index(entries, IndexParams.from_config(cfg))
    save_index(idx, args.output)
    print(f"indexed\t{len(idx.records)}")
    print(f"failures\t{len(idx.failures)}")
    for shape_id, reason in idx.failures:
        print(f"failed\t{shape_id}\t{reason}", file=sys.stderr)
    return 0


def cmd_query(args, cfg: Config) -> int:
    idx = load_index(args.index)
    if args.string:
        items = query_symbols(idx, args.string, cfg.top_k)
    elif args.query:
        items = query(idx, args.query, cfg.top_k)
    else:
        raise UsageError("query needs an image path or --string SYMBOLS")
    for rank, item in enumerate(items, start=1):
        raw = format_rational(item.raw, args.exact)
        norm = format_rational(item.normalized, args.exact)
        print(f"{rank}\t{item.shape_id}\t{raw}\t{norm}")
    return 0


def cmd_benchmark(args, cfg: Config) -> int:
    idx = load_index(args.index)
    top_ks = tuple(sorted({20, 40, cfg.top_k}))
    report = benchmark_report(idx, top_ks=top_ks)
    for line in report.lines():
        print(line)
    return 0


def _parse_csv(text: str, kind, what: str):
    try:
        values = [kind(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise UsageError(f"bad {what} list {text!r}: {exc}") from exc
    if not values:
        raise UsageError(f"empty {what} list")
    return values


def cmd_occlusion(args, cfg: Config) -> int:
    entries = read_manifest(args.manifest)
    idx = build_index(entries, IndexParams.from_config(cfg))
    fractions = _parse_csv(args.fractions, float, "fraction")
    k_values = _parse_csv(args.k_values, int, "k")
    table = occlusion_sweep(idx, fractions, k_values, start=args.offset)
    sys.stdout.write(table.to_tsv())
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _resolve_config(args)
        return args.func(args, cfg)
    except UsageError as exc:
        print(f"shapealign: error: {exc}", file=sys.stderr)
        return 1
    except ShapeAlignError as exc:
        print(f"shapealign: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
