"""
Braid group generators of a curve, an arrangement, or a restricted hypersurface.

KEY CONCEPT: ONE LAMBDA, ONE BASE FIBER, MANY LOOPS
===================================================
The engine coordinates the other modules:
1. Branch points (discriminant, or pairwise line intersections)
2. One base point beta and one keyhole loop per branch point
3. One rotation lambda for the whole run, and the base fiber over beta
4. Loops traced concurrently (asyncio + a thread pool), each segment's
   crossings appended to that loop's word
5. Per-loop checks: the fiber closes up, and the word's permutation equals
   the permutation obtained by plain endpoint tracking

If any loop hits an improper or tangent crossing, every loop is thrown
away and the run restarts under the next lambda: all generators must
share one identification of the strands at beta.

A crossing landing on a polygon vertex only moves that loop; tracking
trouble is retried with smaller steps.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple
import asyncio
import logging
import time

import numpy as np
from numpy.polynomial import polynomial as npoly

from .braid import (
    BraidWord,
    Permutation,
    concat,
    format_word,
    free_reduce,
    invert,
    parse_word,
    permutation,
    word_from_crossings,
)
from .branchlocus import (
    BranchSet,
    LineArrangement,
    arrangement_branch_points,
    arrangement_poly,
    branch_points,
    load_arrangement,
)
from .crossdetect import (
    CrossOptions,
    Crossing,
    arrangement_crossings,
    cross_system_residual,
    detect_crossings,
    regularize_lambda,
    strand_points,
)
from .errors import (
    BraidTrackError,
    ConsistencyError,
    DegreeError,
    EndpointCrossingError,
    LambdaExhaustedError,
    NonGenericLineError,
    RegularizationError,
    ReportFormatError,
    TrackingError,
    WordSyntaxError,
)
from .homotopy import (
    CurveSystem,
    Fiber,
    Segment,
    TrackOptions,
    initial_fiber,
    match_fibers,
    track_path,
)
from .looper import Loop, LoopOptions, choose_base, keyhole_loop
from .poly import (
    BivariatePoly,
    MultivariatePoly,
    complex_from_json,
    complex_to_json,
    eval_scale,
    format_poly,
    poly_from_dict,
    poly_to_dict,
    scale_z,
)

logger = logging.getLogger(__name__)

CLOSURE_LIMIT = 12
ENUMERATION_CAP = 500_000


# =========================================================
# OPTIONS AND REPORTS
# =========================================================

@dataclass(frozen=True)
class EngineOptions:
    seed: int = 0
    lambda_override: Optional[complex] = None
    branch_tol: float = 1e-6
    workers: Optional[int] = None
    closure_tol: float = 1e-6
    endpoint_retries: int = 4
    tracking_retries: int = 2
    track: TrackOptions = field(default_factory=TrackOptions)
    cross: CrossOptions = field(default_factory=CrossOptions)
    loop: LoopOptions = field(default_factory=LoopOptions)

    def __post_init__(self):
        if self.lambda_override is not None and self.lambda_override == 0:
            raise ValueError("lambda must be non-zero")
        if self.branch_tol <= 0 or self.closure_tol <= 0:
            raise ValueError("tolerances must be positive")


def create_engine_options(seed: int = 0, track: Optional[TrackOptions] = None,
                          cross: Optional[CrossOptions] = None,
                          loop: Optional[LoopOptions] = None, **kwargs) -> EngineOptions:
    """
    Factory for EngineOptions. The crossing options inherit ``seed`` for
    their lambda stream unless given explicitly.
    """
    return EngineOptions(
        seed=seed,
        track=track or TrackOptions(),
        cross=cross or CrossOptions(rng_seed=seed),
        loop=loop or LoopOptions(),
        **kwargs,
    )


def _crossing_dict(c: Crossing) -> Dict[str, Any]:
    lo, hi = c.strands
    return {
        "segment": c.segment,
        "s": c.s,
        "t": complex_to_json(c.t),
        "index": c.index,
        "sign": c.sign,
        "strands": [complex_to_json(lo), complex_to_json(hi)],
        "residual": c.residual,
    }


@dataclass(frozen=True)
class BraidReport:
    """The braid of one loop; ``core`` strips the approach conjugation."""

    branch_point: Optional[complex]
    loop: Loop
    crossings: Tuple[Crossing, ...]
    word: BraidWord
    reduced_word: BraidWord
    core: BraidWord
    approach: BraidWord
    perm: Permutation
    diagnostics: Dict[str, Any] = field(default_factory=dict, compare=False)

    @property
    def residual_max(self) -> float:
        return max((c.residual for c in self.crossings), default=0.0)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "branch_point": None if self.branch_point is None
            else complex_to_json(self.branch_point),
            "word": format_word(self.word),
            "reduced": format_word(self.reduced_word),
            "core": format_word(self.core),
            "approach": format_word(self.approach),
            "perm": self.perm.to_list(),
            "exponent_sum": sum(e for _, e in self.word.letters),
            "crossings": [_crossing_dict(c) for c in self.crossings],
            "residual_max": self.residual_max,
            "loop": self.loop.to_dict(),
            "diagnostics": self.diagnostics,
        }


@dataclass(frozen=True)
class GroupReport:
    """Generators in branch-point order plus their monodromy."""

    n: int
    lam: complex
    base: Optional[complex]
    branch: BranchSet
    generators: Tuple[BraidReport, ...]
    monodromy_perms: Tuple[Permutation, ...]
    monodromy_order: Optional[int]
    monodromy_transitive: bool
    source: Dict[str, Any] = field(default_factory=dict, compare=False)
    diagnostics: Dict[str, Any] = field(default_factory=dict, compare=False)

    @property
    def total_crossings(self) -> int:
        return sum(len(g.crossings) for g in self.generators)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "status": "completed",
            "n": self.n,
            "lambda": complex_to_json(self.lam),
            "base": None if self.base is None else complex_to_json(self.base),
            "branch_points": [complex_to_json(p) for p in self.branch.points],
            "generators": [g.to_dict() for g in self.generators],
            "monodromy": {
                "perms": [p.to_list() for p in self.monodromy_perms],
                "order": self.monodromy_order,
                "transitive": self.monodromy_transitive,
            },
            "total_crossings": self.total_crossings,
            "source": self.source,
            "diagnostics": self.diagnostics,
        }


# =========================================================
# PERMUTATION GROUPS
# =========================================================

def monodromy_closure(perms: Sequence[Permutation],
                      n: Optional[int] = None) -> Tuple[Optional[int], bool]:
    """
    Order of the group generated by ``perms`` (breadth-first closure) and
    whether it acts transitively. The order is None when n > 12 or the
    closure outgrows its enumeration cap.
    """
    if n is None:
        if not perms:
            raise ValueError("strand count needed for an empty generator list")
        n = perms[0].n
    if any(p.n != n for p in perms):
        raise ValueError("permutations act on different strand counts")

    orbit = {1}
    frontier = [1]
    while frontier:
        k = frontier.pop()
        for p in perms:
            nxt = p.image[k - 1]
            if nxt not in orbit:
                orbit.add(nxt)
                frontier.append(nxt)
    transitive = len(orbit) == n

    if n > CLOSURE_LIMIT:
        logger.warning("group closure skipped for %d strands", n)
        return None, transitive

    gens = [p.image for p in perms]
    identity = tuple(range(1, n + 1))
    seen = {identity}
    queue = [identity]
    while queue:
        g = queue.pop()
        for s in gens:
            h = tuple(g[k - 1] for k in s)
            if h not in seen:
                seen.add(h)
                queue.append(h)
                if len(seen) > ENUMERATION_CAP:
                    logger.warning("group closure stopped after %d elements", ENUMERATION_CAP)
                    return None, transitive
    return len(seen), transitive


# =========================================================
# LOOP TRACING
# =========================================================

SegmentTracer = Callable[[Segment, Fiber, TrackOptions, int], Tuple[List[Crossing], Fiber]]


@dataclass
class _RunContext:
    n: int
    lam: complex
    base_fiber: Fiber
    tracer: SegmentTracer
    opts: EngineOptions


def _curve_context(f: BivariatePoly, base: complex, lam: complex,
                   opts: EngineOptions) -> _RunContext:
    f_lam = scale_z(f, lam)
    system = CurveSystem(f_lam)
    base_fiber = initial_fiber(f_lam, base, opts.track, system)

    def tracer(seg: Segment, fiber: Fiber, topts: TrackOptions, idx: int):
        return detect_crossings(f_lam, seg, fiber, topts, opts.cross, system, idx)

    return _RunContext(f.degz, lam, base_fiber, tracer, opts)


def _arrangement_context(arr: LineArrangement, base: complex, lam: complex,
                         opts: EngineOptions) -> _RunContext:
    scaled = arr.scaled(lam)
    z = scaled.strands(base)
    order = np.lexsort((z.imag, z.real))
    lines = [scaled.lines[k] for k in order]
    base_fiber = Fiber(base, tuple(strand_points(lines, base)))

    def tracer(seg: Segment, fiber: Fiber, topts: TrackOptions, idx: int):
        return arrangement_crossings(lines, seg, fiber, opts.cross, idx)

    return _RunContext(arr.d, lam, base_fiber, tracer, opts)


def _trace_loop(ctx: _RunContext, loop: Loop, topts: TrackOptions) -> BraidReport:
    fiber = ctx.base_fiber
    crossings: List[Crossing] = []
    for idx, seg in enumerate(loop.segments):
        found, fiber = ctx.tracer(seg, fiber, topts, idx)
        crossings.extend(found)

    base = ctx.base_fiber
    scale = max(1.0, float(np.max(np.abs(base.array())))) if base.n else 1.0
    match = match_fibers(fiber, base, tol=ctx.opts.closure_tol * scale)
    closure = max((abs(fiber.points[k] - base.points[m]) for k, m in enumerate(match)),
                  default=0.0)

    word = word_from_crossings(ctx.n, crossings)
    perm = permutation(word)
    tracked = [0] * ctx.n
    for k, m in enumerate(match):
        tracked[m] = k + 1
    if ctx.n and Permutation(tuple(tracked)) != perm:
        raise ConsistencyError(
            f"word permutation {perm.to_list()} differs from tracked {tracked}")

    approach = word_from_crossings(
        ctx.n, [c for c in crossings if c.segment < loop.approach_count])
    core = free_reduce(concat(concat(invert(approach), word), approach))
    return BraidReport(
        branch_point=loop.target,
        loop=loop,
        crossings=tuple(crossings),
        word=word,
        reduced_word=free_reduce(word),
        core=core,
        approach=approach,
        perm=perm,
        diagnostics={"closure_error": float(closure), "lambda": complex_to_json(ctx.lam)},
    )


def _trace_with_retries(ctx: _RunContext, make_loop: Callable[[int], Loop],
                        perturbable: bool = True) -> BraidReport:
    """
    Trace one loop. Endpoint crossings move the loop (perturbation
    counter); tracking or consistency failures shrink the steps.
    """
    opts = ctx.opts
    topts = opts.track
    perturbation = 0
    tightened = 0
    loop = make_loop(0)
    while True:
        try:
            report = _trace_loop(ctx, loop, topts)
        except EndpointCrossingError as err:
            perturbation += 1
            if not perturbable or perturbation > opts.endpoint_retries:
                raise
            logger.warning("crossing on a loop vertex (segment %s); re-routing",
                           err.segment_index)
            loop = make_loop(perturbation)
            continue
        except (TrackingError, ConsistencyError) as err:
            tightened += 1
            if tightened > opts.tracking_retries:
                raise
            logger.warning("loop tracing failed (%s); retrying with smaller steps", err)
            topts = topts.tightened()
            continue
        report.diagnostics.update({"perturbations": perturbation, "tightened": tightened})
        return report


def _counted(ctx: _RunContext, make: Callable[[int], Loop], perturbable: bool,
             progress: Any) -> BraidReport:
    report = _trace_with_retries(ctx, make, perturbable)
    if progress is not None:
        progress.update(1)
    return report


async def _gather_loops(ctx: _RunContext, makers: List[Callable[[int], Loop]],
                        perturbable: bool = True, progress: Any = None) -> List[BraidReport]:
    loop = asyncio.get_running_loop()
    with ThreadPoolExecutor(max_workers=ctx.opts.workers) as pool:
        tasks = [loop.run_in_executor(pool, _counted, ctx, make, perturbable, progress)
                 for make in makers]
        results = await asyncio.gather(*tasks, return_exceptions=True)
    for result in results:
        if isinstance(result, RegularizationError):
            raise result
    for result in results:
        if isinstance(result, BaseException):
            raise result
    return list(results)


async def _run_under_lambda(make_context: Callable[[complex], _RunContext],
                            makers: List[Callable[[int], Loop]], opts: EngineOptions,
                            perturbable: bool = True,
                            progress: Any = None) -> Tuple[_RunContext, List[BraidReport], int]:
    """Restart every loop under the next lambda until no loop objects."""
    attempt = 0
    witness: Dict[str, Any] = {}
    while True:
        if opts.lambda_override is not None:
            if attempt > 0:
                raise LambdaExhaustedError(
                    "the fixed lambda gives an improper or tangent crossing",
                    witness=witness, attempts=attempt)
            lam = complex(opts.lambda_override)
        else:
            try:
                lam = regularize_lambda(opts.cross, attempt)
            except LambdaExhaustedError as err:
                raise LambdaExhaustedError(str(err), witness=witness, attempts=attempt) from None
        ctx = make_context(lam)
        try:
            reports = await _gather_loops(ctx, makers, perturbable, progress)
        except RegularizationError as err:
            witness = dict(err.witness, error=type(err).__name__, message=str(err))
            logger.warning("lambda attempt %d failed: %s", attempt, err)
            attempt += 1
            if progress is not None:
                progress.reset()
            continue
        return ctx, reports, attempt


def _assemble_report(ctx: _RunContext, base: Optional[complex], branch: BranchSet,
                     reports: List[BraidReport], attempts: int,
                     source: Dict[str, Any]) -> GroupReport:
    perms = tuple(r.perm for r in reports)
    order, transitive = monodromy_closure(perms, ctx.n)
    return GroupReport(
        n=ctx.n,
        lam=ctx.lam,
        base=base,
        branch=branch,
        generators=tuple(reports),
        monodromy_perms=perms,
        monodromy_order=order,
        monodromy_transitive=transitive,
        source=source,
        diagnostics={"lambda_attempts": attempts + 1},
    )


def _keyhole_makers(branch: BranchSet, base: complex, opts: EngineOptions):
    lo = opts.loop

    def maker(k: int):
        return lambda perturbation: keyhole_loop(
            branch, k, base, lo.polygon_sides, lo.radius_factor, opts.seed,
            perturbation=perturbation, routing_retries=lo.routing_retries)

    return [maker(k) for k in range(len(branch))]


def _empty_report(n: int, branch: BranchSet, source: Dict[str, Any]) -> GroupReport:
    order, transitive = monodromy_closure((), n)
    return GroupReport(n, 1 + 0j, None, branch, (), (), order, transitive, source)


# =========================================================
# GENERAL CURVES
# =========================================================

async def abraid_generators(f: BivariatePoly, opts: Optional[EngineOptions] = None,
                            branch: Optional[BranchSet] = None, progress: Any = None) -> GroupReport:
    """
    Generators of the braid group of f(z, t) = 0, one per branch point.

    Args:
        f: the curve, deg_z f >= 1
        opts: engine options (defaults if omitted)
        branch: precomputed branch set (defaults to the discriminant roots)
        progress: optional tqdm-like object; update(1) per finished loop,
            reset() when a new lambda restarts the run

    Raises:
        DegreeError: deg_z f < 1
        DegenerateDiscriminantError: f has a repeated factor
        LambdaExhaustedError: every lambda gave an improper crossing
    """
    opts = opts or create_engine_options()
    if f.degz < 1:
        raise DegreeError("the curve must involve z")
    source = {"kind": "curve", "text": format_poly(f), "poly": poly_to_dict(f)}
    if f.degz == 1:
        return _empty_report(1, branch or BranchSet(()), source)
    if branch is None:
        branch = branch_points(f, opts.branch_tol, opts.seed)
    if len(branch) == 0:
        return _empty_report(f.degz, branch, source)

    base = choose_base(branch, opts.seed)
    logger.info("%d branch point(s); base point %s", len(branch), base)
    ctx, reports, attempts = await _run_under_lambda(
        lambda lam: _curve_context(f, base, lam, opts),
        _keyhole_makers(branch, base, opts), opts, progress=progress)
    return _assemble_report(ctx, base, branch, reports, attempts, source)


def braid_generators(f: BivariatePoly, opts: Optional[EngineOptions] = None,
                     branch: Optional[BranchSet] = None, progress: Any = None) -> GroupReport:
    """Synchronous wrapper around abraid_generators."""
    return asyncio.run(abraid_generators(f, opts, branch, progress))


async def aloop_braid(f: BivariatePoly, loop: Loop,
                      opts: Optional[EngineOptions] = None) -> BraidReport:
    opts = opts or create_engine_options()
    if f.degz < 1:
        raise DegreeError("the curve must involve z")
    _, reports, _ = await _run_under_lambda(
        lambda lam: _curve_context(f, loop.base, lam, opts),
        [lambda perturbation: loop], opts, perturbable=False)
    return reports[0]


def loop_braid(f: BivariatePoly, loop: Loop, opts: Optional[EngineOptions] = None) -> BraidReport:
    """The braid of an arbitrary closed polygonal loop (no branch locus needed)."""
    return asyncio.run(aloop_braid(f, loop, opts))


def cross_locus(report: BraidReport) -> List[complex]:
    """t-values of the loop's crossed fibers, in traversal order."""
    return [c.t for c in report.crossings]


def big_loop_permutation(f: BivariatePoly, branch: BranchSet, base: complex,
                         opts: Optional[EngineOptions] = None, sides: int = 32) -> Permutation:
    """
    Monodromy of one ccw polygon through ``base`` around the centroid of the
    branch set, large enough to enclose every branch point.
    """
    opts = opts or create_engine_options()
    centre = complex(np.mean(branch.points)) if len(branch) else 0j
    radius = abs(base - centre)
    phi0 = float(np.angle(base - centre))
    vertices = [complex(base)] + [
        complex(centre + radius * np.exp(1j * (phi0 + 2.0 * np.pi * k / sides)))
        for k in range(1, sides)
    ] + [complex(base)]
    start = initial_fiber(f, base, opts.track)
    end = track_path(f, vertices, start, opts.track)
    match = match_fibers(end, start, tol=opts.closure_tol * max(1.0, float(np.max(np.abs(start.array())))))
    image = [0] * f.degz
    for k, m in enumerate(match):
        image[m] = k + 1
    return Permutation(tuple(image))


def composed_monodromy(report: GroupReport) -> Permutation:
    """
    Product of the generators' permutations ordered by the direction in
    which their loops leave the base point (counterclockwise from east).
    For loops whose approaches do not cross each other this equals the
    monodromy of the big loop around everything.
    """
    def angle(g: BraidReport) -> float:
        first = g.loop.vertices[1]
        return float(np.angle(first - g.loop.base)) % (2.0 * np.pi)

    product = Permutation.identity(report.n)
    for g in sorted(report.generators, key=angle):
        product = product.compose(g.perm)
    return product


# =========================================================
# LINE ARRANGEMENTS
# =========================================================

async def aarrangement_braid_generators(arr: LineArrangement,
                                        opts: Optional[EngineOptions] = None,
                                        branch: Optional[BranchSet] = None,
                                        progress: Any = None) -> GroupReport:
    """
    Generators for a line arrangement. Strand k stays on line k, so each
    segment needs only one exact event solve per pair of lines.
    """
    opts = opts or create_engine_options()
    source = {"kind": "arrangement", "arrangement": arr.to_dict()}
    if branch is None:
        branch = arrangement_branch_points(arr, opts.branch_tol)
    if len(branch) == 0:
        return _empty_report(arr.d, branch, source)

    base = choose_base(branch, opts.seed)
    logger.info("%d lines, %d branch point(s)", arr.d, len(branch))
    ctx, reports, attempts = await _run_under_lambda(
        lambda lam: _arrangement_context(arr, base, lam, opts),
        _keyhole_makers(branch, base, opts), opts, progress=progress)
    return _assemble_report(ctx, base, branch, reports, attempts, source)


def arrangement_braid_generators(arr: LineArrangement, opts: Optional[EngineOptions] = None,
                                 branch: Optional[BranchSet] = None,
                                 progress: Any = None) -> GroupReport:
    return asyncio.run(aarrangement_braid_generators(arr, opts, branch, progress))


# =========================================================
# HYPERSURFACES RESTRICTED TO A LINE
# =========================================================

def _random_disk_point(rng: np.random.Generator, m: int, radius: float = 2.0) -> np.ndarray:
    r = radius * np.sqrt(rng.uniform(0.0, 1.0, size=m))
    return r * np.exp(2j * np.pi * rng.uniform(0.0, 1.0, size=m))


def restrict_to_line(F: MultivariatePoly, u0: Optional[Sequence[complex]] = None,
                     v: Optional[Sequence[complex]] = None, seed: int = 0,
                     max_draws: int = 10) -> BivariatePoly:
    """
    f(z, t) = F(z, u0 + t * v). Missing u0 / v are drawn (seeded) from the
    polydisk of radius 2; a drawn line that kills the leading z-coefficient
    is redrawn, a supplied one raises.

    Raises:
        DegreeError: F does not involve z
        NonGenericLineError: the leading z-coefficient vanishes on the line
    """
    degz = F.degree(0)
    if degz < 1:
        raise DegreeError("the hypersurface must involve z")
    m = F.m
    rng = np.random.default_rng(seed)
    drawn = u0 is None or v is None
    for _ in range(max_draws if drawn else 1):
        point = np.asarray(u0, dtype=complex) if u0 is not None else _random_disk_point(rng, m)
        direction = np.asarray(v, dtype=complex) if v is not None else _random_disk_point(rng, m)
        if point.shape != (m,) or direction.shape != (m,):
            raise ValueError(f"line data must have {m} coordinates")
        if not np.any(direction):
            raise ValueError("direction must be non-zero")

        degt = sum(max((e[k + 1] for e in F.terms), default=0) for k in range(m))
        coeffs = np.zeros((degz + 1, degt + 1), dtype=complex)
        for exps, c in F.terms.items():
            poly_t = np.array([c], dtype=complex)
            for k, e in enumerate(exps[1:]):
                if e:
                    poly_t = npoly.polymul(poly_t, npoly.polypow([point[k], direction[k]], e))
            coeffs[exps[0], : poly_t.size] += poly_t
        f = BivariatePoly(coeffs)
        if f.degz == degz:
            return f
        logger.warning("line kills the leading z-coefficient; redrawing")
    raise NonGenericLineError("the leading z-coefficient vanishes on the chosen line")


# =========================================================
# REPORT VERIFICATION
# =========================================================

def _report_curve(data: Dict[str, Any]) -> BivariatePoly:
    source = data.get("source") or {}
    kind = source.get("kind")
    if kind == "curve":
        return poly_from_dict(source["poly"])
    if kind == "arrangement":
        return arrangement_poly(load_arrangement(source["arrangement"]))
    raise ReportFormatError(f"unknown report source kind {kind!r}")


def verify_report(data: Dict[str, Any], residual_max: float = 1e-6) -> List[str]:
    """
    Re-check a report produced by this package: the split-system residual
    and sign rule of every crossing, the word against its crossings, the
    permutation against the word, and the core against word and approach.

    Returns:
        a list of failure messages (empty when everything passes)

    Raises:
        ReportFormatError: missing or malformed fields
    """
    try:
        n = int(data["n"])
        lam = complex_from_json(data["lambda"])
        generators = list(data["generators"])
        f_lam = scale_z(_report_curve(data), lam)
        failures: List[str] = []
        for k, g in enumerate(generators):
            vertices = [complex_from_json(v) for v in g["loop"]["vertices"]]
            letters = []
            for c in g["crossings"]:
                seg = Segment(vertices[c["segment"]], vertices[c["segment"] + 1])
                s = float(c["s"])
                lo, hi = (complex_from_json(v) for v in c["strands"])
                letters.append((int(c["index"]), int(c["sign"])))
                r = cross_system_residual(f_lam, seg, s, 0.5 * (lo.real + hi.real), lo.imag, hi.imag)
                scale = max(1.0, eval_scale(f_lam, abs(lo) + abs(hi), seg.point(s)))
                res = float(np.max(np.abs(r)) / scale)
                if not res < residual_max:
                    failures.append(f"generator {k}: crossing at s={s:.12g} has residual {res:.3g}")
                expected = 1 if lo.imag < hi.imag else -1
                if int(c["sign"]) != expected:
                    failures.append(f"generator {k}: crossing at s={s:.12g} has the wrong sign")
            word = parse_word(g["word"], n)
            if list(word.letters) != letters:
                failures.append(f"generator {k}: word does not match its crossings")
            perm = permutation(word)
            if perm.to_list() != list(g["perm"]):
                failures.append(f"generator {k}: permutation {g['perm']} != {perm.to_list()}")
            approach = parse_word(g["approach"], n)
            core = free_reduce(concat(concat(invert(approach), word), approach))
            if core != parse_word(g["core"], n):
                failures.append(f"generator {k}: core does not match word and approach")
        perms = [list(p) for p in data["monodromy"]["perms"]]
        if perms != [list(g["perm"]) for g in generators]:
            failures.append("monodromy permutations do not match the generators")
        return failures
    except (KeyError, TypeError, ValueError, IndexError, WordSyntaxError) as err:
        raise ReportFormatError(f"malformed report: {err}") from None


# =========================================================
# ORCHESTRATOR
# =========================================================

class BraidEngine:
    """
    Holds options and a run history.

    KEY CONCEPT: FAILURES STAY INSIDE THE RUN RECORD
    ================================================
    ``run_*`` methods never raise package errors: a failed run is recorded
    with "status": "error" and returned like any other result. The plain
    functions above raise as usual.
    """

    def __init__(self, opts: Optional[EngineOptions] = None):
        self.opts = opts or create_engine_options()
        self.run_history: List[Dict[str, Any]] = []

    async def _record(self, kind: str, label: str, work) -> Dict[str, Any]:
        started = time.perf_counter()
        entry: Dict[str, Any] = {"kind": kind, "input": label, "status": "running"}
        try:
            report = await work
            entry["result"] = report.to_dict()
            entry["status"] = "completed"
        except BraidTrackError as err:
            entry.update(err.to_dict())
            entry["status"] = "error"
        entry["duration_seconds"] = time.perf_counter() - started
        self.run_history.append(entry)
        return entry

    async def arun_curve(self, f: BivariatePoly) -> Dict[str, Any]:
        return await self._record("curve", format_poly(f), abraid_generators(f, self.opts))

    async def arun_arrangement(self, arr: LineArrangement) -> Dict[str, Any]:
        return await self._record("arrangement", f"{arr.d} lines",
                                  aarrangement_braid_generators(arr, self.opts))

    async def arun_loop(self, f: BivariatePoly, loop: Loop) -> Dict[str, Any]:
        return await self._record("loop", format_poly(f), aloop_braid(f, loop, self.opts))

    async def abraid_generators(self, f: BivariatePoly) -> GroupReport:
        """The raising counterpart of arun_curve, with this engine's options."""
        return await abraid_generators(f, self.opts)

    def run(self, kind: str, *args) -> Dict[str, Any]:
        """Dispatch on ``kind``: "curve", "arrangement" or "loop"."""
        runners = {"curve": self.arun_curve, "arrangement": self.arun_arrangement,
                   "loop": self.arun_loop}
        if kind not in runners:
            raise ValueError(f"unknown run kind {kind!r}")
        return asyncio.run(runners[kind](*args))

    def run_curve(self, f: BivariatePoly) -> Dict[str, Any]:
        return asyncio.run(self.arun_curve(f))

    def run_arrangement(self, arr: LineArrangement) -> Dict[str, Any]:
        return asyncio.run(self.arun_arrangement(arr))

    def run_loop(self, f: BivariatePoly, loop: Loop) -> Dict[str, Any]:
        return asyncio.run(self.arun_loop(f, loop))

    def get_status(self) -> Dict[str, Any]:
        return {
            "runs": len(self.run_history),
            "completed": sum(1 for e in self.run_history if e["status"] == "completed"),
            "failed": sum(1 for e in self.run_history if e["status"] == "error"),
            "seed": self.opts.seed,
            "workers": self.opts.workers,
        }

    def get_run_history(self, limit: int = 10) -> List[Dict[str, Any]]:
        return self.run_history[-limit:]


def create_engine(seed: int = 0, **kwargs) -> BraidEngine:
    """Factory: a BraidEngine with options built by create_engine_options."""
    return BraidEngine(create_engine_options(seed=seed, **kwargs))
