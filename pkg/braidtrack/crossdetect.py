"""
Crossings of the fiber along one segment.

KEY CONCEPT: A CROSSING IS A CHANGE IN REAL-PART ORDER
======================================================
Order the n strands of a fiber by real part. Walking along a segment the
order changes exactly when two neighbouring strands share a real part.
Each such event is one braid letter sigma_i^(+-1):
- i is the position (1-based, incoming order) of the left strand
- the sign is +1 when Im z^(i) < Im z^(i+1), -1 otherwise

The detector scans the tracked samples for order flips, refines each
flip with a bracketing root finder on h(s) = Re(z_a(s) - z_b(s)), and
then walks the events in s-order, swapping positions as it goes.

Every accepted crossing is checked against the real/imaginary split
system (f and its conjugate-coefficient twin g at both strands). A crossed
fiber that is improper (three strands on one vertical line) or tangent
is not fixable here; it is reported so the engine can rotate z by a new
lambda and start over.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple
import logging

import numpy as np
from scipy.optimize import brentq

from .errors import (
    ConsistencyError,
    CriticalPointError,
    EndpointCrossingError,
    ImproperCrossingError,
    LambdaExhaustedError,
    NonTransversalCrossingError,
)
from .homotopy import (
    CurveSystem,
    Fiber,
    Segment,
    TrackOptions,
    TrackSample,
    fiber_at,
    sample_at,
    track_segment,
)
from .poly import BivariatePoly, conj_poly, eval_scale, evaluate

logger = logging.getLogger(__name__)

Line = Tuple[complex, complex, complex]

ENDPOINT_MARGIN = 1e-6
TRANSVERSAL_MIN = 1e-6
RESIDUAL_MAX = 1e-6

# Hermite probe points used to spot two crossings inside one step
_PROBE_U = np.arange(1, 16) / 16.0
_H00 = 2 * _PROBE_U**3 - 3 * _PROBE_U**2 + 1
_H10 = _PROBE_U**3 - 2 * _PROBE_U**2 + _PROBE_U
_H01 = -2 * _PROBE_U**3 + 3 * _PROBE_U**2
_H11 = _PROBE_U**3 - _PROBE_U**2


# =========================================================
# TYPES
# =========================================================

@dataclass(frozen=True)
class CrossOptions:
    cross_tol: float = 1e-7
    refine_tol: float = 1e-10
    proper_tol: float = 1e-7
    lambda_retries: int = 5
    rng_seed: int = 0

    def __post_init__(self):
        if min(self.cross_tol, self.refine_tol, self.proper_tol) <= 0:
            raise ValueError("crossing tolerances must be positive")
        if self.lambda_retries < 0:
            raise ValueError("lambda_retries must be >= 0")


def create_cross_options(**overrides) -> CrossOptions:
    return CrossOptions(**overrides)


@dataclass(frozen=True)
class Crossing:
    """
    One signed swap. ``pre_fiber`` lists the fiber at s in incoming
    (pre-swap) real-part order; the crossing strands sit at positions
    index-1 and index of it.
    """

    s: float
    t: complex
    index: int
    sign: int
    pre_fiber: Fiber = field(repr=False)
    residual: float = 0.0
    segment: int = 0

    @property
    def letter(self) -> Tuple[int, int]:
        return (self.index, self.sign)

    @property
    def strands(self) -> Tuple[complex, complex]:
        return self.pre_fiber.points[self.index - 1], self.pre_fiber.points[self.index]


@dataclass
class _Event:
    s: float
    a: int
    b: int
    z: np.ndarray


# =========================================================
# CLASSIFICATION AND ORACLES
# =========================================================

def check_proper(points: Sequence[complex], x: float, proper_tol: float) -> int:
    """How many points have real part within proper_tol of x."""
    if len(points) == 0:
        return 0
    return int(np.count_nonzero(np.abs(np.real(np.asarray(points, dtype=complex)) - x) < proper_tol))


def classify_crossing(fiber_at_s: Fiber, i: int, copts: CrossOptions) -> int:
    """
    Sign of the crossing of positions i and i+1 (1-based, incoming order).

    Raises:
        ValueError: the two strands do not share a real part
        CriticalPointError: their imaginary parts agree too (a collision)
    """
    lo, hi = fiber_at_s.points[i - 1], fiber_at_s.points[i]
    if abs(lo.real - hi.real) >= copts.cross_tol:
        raise ValueError(f"positions {i} and {i + 1} are not crossing")
    if abs(lo.imag - hi.imag) <= copts.proper_tol:
        raise CriticalPointError(f"strands {i} and {i + 1} collide at t={fiber_at_s.t}",
                                 t=fiber_at_s.t)
    return 1 if lo.imag < hi.imag else -1


def cross_system_residual(f: BivariatePoly, seg: Segment, s: float, x: float,
                          y1: float, y2: float) -> np.ndarray:
    """
    Residuals of f(x+iy1, t) = g(x-iy1, conj t) = f(x+iy2, t) = g(x-iy2, conj t) = 0
    with t = t(s) and g the conjugate-coefficient polynomial.
    """
    g = conj_poly(f)
    t = seg.point(s)
    tc = np.conj(t)
    return np.array([
        evaluate(f, complex(x, y1), t),
        evaluate(g, complex(x, -y1), tc),
        evaluate(f, complex(x, y2), t),
        evaluate(g, complex(x, -y2), tc),
    ])


def pair_system_residual(line_i: Line, line_j: Line, seg: Segment, s: float, x: float,
                         y1: float, y2: float) -> np.ndarray:
    """The split system for two lines: strand 1 on line_i, strand 2 on line_j."""
    t = seg.point(s)
    out = []
    for (a, b, c), y in ((line_i, y1), (line_j, y2)):
        z = complex(x, y)
        value = a * z + b * t + c
        out.extend([value, np.conj(a) * np.conj(z) + np.conj(b) * np.conj(t) + np.conj(c)])
    return np.array(out)


def regularize_lambda(copts: CrossOptions, attempt: int) -> complex:
    """
    The rotation for a given attempt: 1 for attempt 0, then exp(i*theta)
    with theta drawn from a generator seeded by (rng_seed, attempt).

    Raises:
        LambdaExhaustedError: attempt > lambda_retries
    """
    if attempt > copts.lambda_retries:
        raise LambdaExhaustedError(
            f"no admissible lambda after {copts.lambda_retries + 1} attempts",
            attempts=attempt)
    if attempt == 0:
        return 1 + 0j
    theta = np.random.default_rng([copts.rng_seed, attempt]).uniform(0.0, 2.0 * np.pi)
    return complex(np.exp(1j * theta))


def _witness(t: complex, s: float, points: Sequence[complex], note: str) -> Dict[str, Any]:
    return {
        "t": [float(np.real(t)), float(np.imag(t))],
        "s": float(s),
        "fiber": [[float(np.real(p)), float(np.imag(p))] for p in points],
        "note": note,
    }


# =========================================================
# EVENT SCAN ON TRACKED SAMPLES
# =========================================================

def _pair_values(z: np.ndarray, iu: Tuple[np.ndarray, np.ndarray]) -> np.ndarray:
    return (z[iu[0]] - z[iu[1]]).real


def _sign_changes(values: np.ndarray) -> np.ndarray:
    positive = values >= 0
    return np.count_nonzero(positive[:, 1:] != positive[:, :-1], axis=1)


def _ambiguous_pairs(left: TrackSample, right: TrackSample,
                     iu: Tuple[np.ndarray, np.ndarray]) -> bool:
    """True if some pair may cross more than its endpoint signs show."""
    length = right.s - left.s
    h0 = _pair_values(left.fiber.array(), iu)
    h1 = _pair_values(right.fiber.array(), iu)
    d0 = _pair_values(left.velocity, iu)
    d1 = _pair_values(right.velocity, iu)
    probes = (np.outer(h0, _H00) + length * np.outer(d0, _H10)
              + np.outer(h1, _H01) + length * np.outer(d1, _H11))
    values = np.column_stack([h0, probes, h1])
    expected = ((h0 >= 0) != (h1 >= 0)).astype(int)
    return bool(np.any(_sign_changes(values) > expected))


def _refine(system: CurveSystem, seg: Segment, left: TrackSample, right: TrackSample,
            a: int, b: int, topts: TrackOptions, copts: CrossOptions) -> Tuple[float, np.ndarray]:
    def h(s: float) -> float:
        z = fiber_at(system, seg, left, s, topts)
        return float((z[a] - z[b]).real)

    ha, hb = h(left.s), h(right.s)
    if ha == 0.0:
        s_star = left.s
    elif hb == 0.0:
        s_star = right.s
    elif (ha > 0) == (hb > 0):
        s_star = left.s if abs(ha) < abs(hb) else right.s
    else:
        s_star = brentq(h, left.s, right.s, xtol=copts.refine_tol, maxiter=200)
    z = fiber_at(system, seg, left, s_star, topts)

    # polish on the real-part difference
    for _ in range(2):
        v = system.velocity(z, seg.point(s_star), seg.direction)
        slope = float((v[a] - v[b]).real)
        value = float((z[a] - z[b]).real)
        if slope == 0.0 or abs(value) <= copts.refine_tol * 1e-3:
            break
        s_next = s_star - value / slope
        if not left.s <= s_next <= right.s:
            break
        s_star = s_next
        z = fiber_at(system, seg, left, s_star, topts)
    return s_star, z


def _scan_events(system: CurveSystem, seg: Segment, samples: List[TrackSample],
                 topts: TrackOptions, copts: CrossOptions) -> List[_Event]:
    n = system.n
    iu = np.triu_indices(n, 1)
    events: List[_Event] = []
    j = 0
    while j < len(samples) - 1:
        left, right = samples[j], samples[j + 1]
        if _ambiguous_pairs(left, right, iu):
            if right.s - left.s < 1e-9:
                t = seg.point(left.s)
                raise NonTransversalCrossingError(
                    f"tangential real-part contact near t={t:.6g}",
                    witness=_witness(t, left.s, left.fiber.points, "tangency"))
            mid = 0.5 * (left.s + right.s)
            samples.insert(j + 1, sample_at(system, seg, left, mid, topts))
            continue
        h0 = _pair_values(left.fiber.array(), iu)
        h1 = _pair_values(right.fiber.array(), iu)
        for k in np.flatnonzero((h0 >= 0) != (h1 >= 0)):
            a, b = int(iu[0][k]), int(iu[1][k])
            s_star, z = _refine(system, seg, left, right, a, b, topts, copts)
            events.append(_Event(s_star, a, b, z))
        j += 1
    events.sort(key=lambda e: e.s)
    return events


def _group(events: List[_Event], tol: float) -> List[List[_Event]]:
    groups: List[List[_Event]] = []
    for ev in events:
        if groups and ev.s - groups[-1][-1].s <= tol:
            groups[-1].append(ev)
        else:
            groups.append([ev])
    return groups


def _initial_order(z: np.ndarray, t: complex, copts: CrossOptions,
                   segment_index: int) -> List[int]:
    order = list(np.lexsort((z.imag, z.real)))
    re = z.real[order]
    if re.size > 1 and np.min(np.diff(re)) < copts.cross_tol:
        raise EndpointCrossingError(
            f"two strands share a real part at the segment start t={t:.6g}",
            segment_index=segment_index)
    return [int(k) for k in order]


def _assemble(events: List[_Event], order: List[int], seg: Segment, copts: CrossOptions,
              segment_index: int, slope, residual) -> List[Crossing]:
    """
    Walk the events in s-order, swapping positions. ``slope(ev)`` returns
    d/ds of the pair's real-part difference, ``residual(ev, pre, index)``
    the split-system residual of the crossing.
    """
    position = {strand: p for p, strand in enumerate(order)}
    crossings: List[Crossing] = []
    for group in _group(events, copts.refine_tol):
        t = seg.point(group[0].s)
        involved = [k for ev in group for k in (ev.a, ev.b)]
        if len(set(involved)) != len(involved):
            raise ImproperCrossingError(
                f"three strands share a real part near t={t:.6g}",
                witness=_witness(t, group[0].s, group[0].z, "concurrent crossings"))

        placed = []
        for ev in group:
            x = 0.5 * (ev.z[ev.a].real + ev.z[ev.b].real)
            if check_proper(ev.z, x, copts.proper_tol) >= 3:
                raise ImproperCrossingError(
                    f"improper crossed fiber at t={seg.point(ev.s):.6g}",
                    witness=_witness(seg.point(ev.s), ev.s, ev.z, "improper"))
            if abs(slope(ev)) <= TRANSVERSAL_MIN:
                raise NonTransversalCrossingError(
                    f"non-transversal crossing at t={seg.point(ev.s):.6g}",
                    witness=_witness(seg.point(ev.s), ev.s, ev.z, "tangent"))
            if ev.s < ENDPOINT_MARGIN or ev.s > 1.0 - ENDPOINT_MARGIN:
                raise EndpointCrossingError(
                    f"crossing at segment endpoint (s={ev.s:.3g})", segment_index=segment_index)
            pa, pb = position[ev.a], position[ev.b]
            if abs(pa - pb) != 1:
                raise ConsistencyError(
                    f"crossing strands {ev.a},{ev.b} are not adjacent at s={ev.s:.12g}")
            placed.append((min(pa, pb) + 1, ev))

        for index, ev in sorted(placed, key=lambda item: item[0]):
            pre = Fiber(seg.point(ev.s), tuple(ev.z[order]))
            sign = classify_crossing(pre, index, copts)
            res = residual(ev, pre, index)
            if res >= RESIDUAL_MAX:
                raise ConsistencyError(
                    f"crossing at s={ev.s:.12g} fails the split-system check (residual {res:.3g})")
            crossings.append(Crossing(ev.s, seg.point(ev.s), index, sign, pre, res,
                                      segment_index))
            order[index - 1], order[index] = order[index], order[index - 1]
            position[order[index - 1]] = index - 1
            position[order[index]] = index
    return crossings


def _check_end_order(order: List[int], end: np.ndarray) -> None:
    expected = [int(k) for k in np.lexsort((end.imag, end.real))]
    if expected != order:
        raise ConsistencyError(
            f"real-part order at segment end {expected} differs from crossings' result {order}")


# =========================================================
# OPERATIONS
# =========================================================

def detect_crossings(f: BivariatePoly, seg: Segment, start: Fiber,
                     topts: Optional[TrackOptions] = None,
                     copts: Optional[CrossOptions] = None,
                     system: Optional[CurveSystem] = None,
                     segment_index: int = 0) -> Tuple[List[Crossing], Fiber]:
    """
    Track ``start`` along ``seg`` and return its crossings in s-order.

    The end fiber keeps strand identity (point k continues start.points[k]);
    its real-part order equals the start order acted on by the crossings.

    Raises:
        ImproperCrossingError, NonTransversalCrossingError: rotate lambda
        EndpointCrossingError: move the loop's vertices
        ConsistencyError: the split-system or end-order check failed
    """
    topts = topts or TrackOptions()
    copts = copts or CrossOptions()
    system = system or CurveSystem(f)
    samples, end = track_segment(f, seg, start, topts, system)
    if start.n < 2:
        return [], end

    order = _initial_order(start.array(), seg.start, copts, segment_index)
    events = _scan_events(system, seg, samples, topts, copts)
    dt = seg.direction

    def slope(ev: _Event) -> float:
        v = system.velocity(ev.z, seg.point(ev.s), dt)
        return float((v[ev.a] - v[ev.b]).real)

    def residual(ev: _Event, pre: Fiber, index: int) -> float:
        lo, hi = pre.points[index - 1], pre.points[index]
        x = 0.5 * (lo.real + hi.real)
        r = cross_system_residual(f, seg, ev.s, x, lo.imag, hi.imag)
        scale = max(1.0, eval_scale(f, abs(lo) + abs(hi), seg.point(ev.s)))
        return float(np.max(np.abs(r)) / scale)

    crossings = _assemble(events, order, seg, copts, segment_index, slope, residual)
    _check_end_order(order, end.array())
    logger.debug("segment %d: %d crossing(s)", segment_index, len(crossings))
    return crossings, end


def strand_points(lines: Sequence[Line], t: complex) -> np.ndarray:
    """z-value of each line a*z + b*t + c = 0 over t."""
    arr = np.asarray(lines, dtype=complex).reshape(-1, 3)
    return -(arr[:, 1] * t + arr[:, 2]) / arr[:, 0]


def arrangement_crossings(lines: Sequence[Line], seg: Segment, start: Fiber,
                          copts: Optional[CrossOptions] = None,
                          segment_index: int = 0) -> Tuple[List[Crossing], Fiber]:
    """
    Crossings for strands that are affine in s: strand k lies on lines[k].

    Each pair of lines contributes at most one event, solved exactly from
    Re(P_k - P_l) + s * Re(Q_k - Q_l) = 0.
    """
    copts = copts or CrossOptions()
    p = strand_points(lines, seg.start)
    q = strand_points(lines, seg.end) - p
    if not np.allclose(p, start.array(), rtol=1e-9, atol=1e-12):
        raise ConsistencyError("start fiber does not lie on the given lines")
    end = Fiber(seg.end, tuple(strand_points(lines, seg.end)))
    n = len(lines)
    if n < 2:
        return [], end

    order = _initial_order(p, seg.start, copts, segment_index)
    events: List[_Event] = []
    for a in range(n):
        for b in range(a + 1, n):
            dp = (p[a] - p[b]).real
            dq = (q[a] - q[b]).real
            if dq == 0.0:
                continue
            s = -dp / dq
            if 0.0 <= s <= 1.0:
                events.append(_Event(float(s), a, b, p + s * q))
    events.sort(key=lambda e: e.s)

    def slope(ev: _Event) -> float:
        return float((q[ev.a] - q[ev.b]).real)

    def residual(ev: _Event, pre: Fiber, index: int) -> float:
        lo, hi = pre.points[index - 1], pre.points[index]
        x = 0.5 * (lo.real + hi.real)
        line_lo, line_hi = lines[order[index - 1]], lines[order[index]]
        r = pair_system_residual(line_lo, line_hi, seg, ev.s, x, lo.imag, hi.imag)
        scale = max(1.0, max(abs(v) for v in (*line_lo, *line_hi)) * (1.0 + abs(lo) + abs(hi)))
        return float(np.max(np.abs(r)) / scale)

    crossings = _assemble(events, order, seg, copts, segment_index, slope, residual)
    _check_end_order(order, end.array())
    return crossings, end
