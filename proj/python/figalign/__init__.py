# SPDX-License-Identifier: Apache-2.0
# Copyright 2026 The figalign Authors
"""Align compound-figure panels with their subcaptions."""

from ._figalign import (
    AlignedPair,
    BoundingBox,
    CaptionParse,
    CorpusManifest,
    FigalignError,
    FigureRecord,
    SubcaptionSegment,
    SubfigureRegion,
    compute_stats,
    eval_retrieval,
    expand_range,
    intersection_over_union,
    load_image,
    load_manifest,
    normalize_token,
    parse_caption,
    recall_at_k,
    run_pipeline,
    save_manifest,
    segment_caption,
    similarity_matrix,
    split_compound,
)

__all__ = [
    "AlignedPair",
    "BoundingBox",
    "CaptionParse",
    "CorpusManifest",
    "FigalignError",
    "FigureRecord",
    "SubcaptionSegment",
    "SubfigureRegion",
    "compute_stats",
    "eval_retrieval",
    "expand_range",
    "intersection_over_union",
    "load_image",
    "load_manifest",
    "normalize_token",
    "parse_caption",
    "recall_at_k",
    "run_pipeline",
    "save_manifest",
    "segment_caption",
    "similarity_matrix",
    "split_compound",
]
__version__ = "0.1.0"
