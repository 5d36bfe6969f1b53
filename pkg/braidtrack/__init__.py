"""
braidtrack

Braid group generators of plane curves, line arrangements and
hypersurfaces restricted to a line, by tracking fibers around branch points.
"""

from .poly import (
    # Polynomials
    BivariatePoly,
    MultivariatePoly,
    UnivariatePoly,
    parse_poly,
    parse_multivariate,
    format_poly,
    evaluate,
    roots,
)
from .homotopy import Fiber, Segment, TrackOptions, initial_fiber, track_segment, track_path
from .branchlocus import (
    BranchSet,
    LineArrangement,
    branch_points,
    discriminant_poly,
    arrangement_branch_points,
    dehomogenize_arrangement,
    load_arrangement,
)
from .crossdetect import CrossOptions, Crossing, detect_crossings, regularize_lambda
from .braid import (
    # Braid words
    BraidWord,
    Permutation,
    parse_word,
    format_word,
    free_reduce,
    permutation,
    exponent_sum,
    relation_move,
)
from .looper import Loop, LoopOptions, choose_base, keyhole_loop, user_loop
from .engine import (
    # Orchestration
    BraidEngine,
    BraidReport,
    EngineOptions,
    GroupReport,
    abraid_generators,
    braid_generators,
    arrangement_braid_generators,
    loop_braid,
    cross_locus,
    restrict_to_line,
    monodromy_closure,
    big_loop_permutation,
    verify_report,
    create_engine,
    create_engine_options,
)
from .render import render, tikz_picture, render_loops_svg
from .errors import BraidTrackError

__all__ = [
    "BivariatePoly",
    "MultivariatePoly",
    "UnivariatePoly",
    "parse_poly",
    "parse_multivariate",
    "format_poly",
    "evaluate",
    "roots",
    "Fiber",
    "Segment",
    "TrackOptions",
    "initial_fiber",
    "track_segment",
    "track_path",
    "BranchSet",
    "LineArrangement",
    "branch_points",
    "discriminant_poly",
    "arrangement_branch_points",
    "dehomogenize_arrangement",
    "load_arrangement",
    "CrossOptions",
    "Crossing",
    "detect_crossings",
    "regularize_lambda",
    "BraidWord",
    "Permutation",
    "parse_word",
    "format_word",
    "free_reduce",
    "permutation",
    "exponent_sum",
    "relation_move",
    "Loop",
    "LoopOptions",
    "choose_base",
    "keyhole_loop",
    "user_loop",
    "BraidEngine",
    "BraidReport",
    "EngineOptions",
    "GroupReport",
    "abraid_generators",
    "braid_generators",
    "arrangement_braid_generators",
    "loop_braid",
    "cross_locus",
    "restrict_to_line",
    "monodromy_closure",
    "big_loop_permutation",
    "verify_report",
    "create_engine",
    "create_engine_options",
    "render",
    "tikz_picture",
    "render_loops_svg",
    "BraidTrackError",
]
