"""
Predictor-corrector tracking of a whole fiber along a segment in the t-plane.

KEY CONCEPT: STRANDS KEEP THEIR IDENTITY
========================================
Over t(s) = (1 - s) * start + s * end the n roots of f(., t(s)) move
continuously. The tracker follows each of them:
1. Predict with one RK4 step of dz/ds = -f_t * (end - start) / f_z
2. Correct with Newton at the new t
3. Accept only if Newton converged, the roots stayed apart and no root
   jumped to a neighbour's path (nearest-neighbour continuity)
4. Otherwise halve the step; after 5 successes double it

Point k of every returned fiber is the continuation of point k of the
start fiber. Nothing here reorders strands; positions by real part are
the crossing detector's business.
"""

from dataclasses import dataclass, field, replace
from typing import List, Optional, Sequence, Tuple
import logging

import numpy as np
from numpy.polynomial import polynomial as npoly

from .errors import (
    CriticalPointError,
    NewtonDivergenceError,
    RootSolveError,
    TrackingError,
    StepUnderflowError,
)
from .poly import BivariatePoly, d_dt, d_dz, restrict_t, roots

logger = logging.getLogger(__name__)


# =========================================================
# TYPES
# =========================================================

@dataclass(frozen=True)
class Segment:
    start: complex
    end: complex

    def __post_init__(self):
        object.__setattr__(self, "start", complex(self.start))
        object.__setattr__(self, "end", complex(self.end))
        if self.start == self.end:
            raise ValueError("segment endpoints coincide")

    @property
    def direction(self) -> complex:
        return self.end - self.start

    def point(self, s: float) -> complex:
        if s == 1.0:
            return self.end
        return (1.0 - s) * self.start + s * self.end

    def reversed(self) -> "Segment":
        return Segment(self.end, self.start)


@dataclass(frozen=True)
class Fiber:
    t: complex
    points: Tuple[complex, ...]

    def __post_init__(self):
        object.__setattr__(self, "t", complex(self.t))
        object.__setattr__(self, "points", tuple(complex(p) for p in self.points))

    @property
    def n(self) -> int:
        return len(self.points)

    def array(self) -> np.ndarray:
        return np.array(self.points, dtype=complex)

    def permuted(self, order: Sequence[int]) -> "Fiber":
        return Fiber(self.t, tuple(self.points[k] for k in order))


@dataclass(frozen=True)
class TrackOptions:
    step_init: float = 1e-2
    step_min: float = 1e-9
    step_max: float = 5e-2
    newton_tol: float = 1e-11
    newton_max_iter: int = 20
    min_separation: float = 1e-8

    def __post_init__(self):
        if not 0 < self.step_min <= self.step_init <= self.step_max <= 1:
            raise ValueError("need 0 < step_min <= step_init <= step_max <= 1")
        if self.newton_tol <= 0 or self.min_separation <= 0:
            raise ValueError("tolerances must be positive")
        if self.newton_max_iter < 1:
            raise ValueError("newton_max_iter must be at least 1")

    def tightened(self, factor: float = 4.0) -> "TrackOptions":
        """Smaller maximal and initial steps, used for retries."""
        step_max = max(self.step_max / factor, self.step_min)
        return replace(self, step_max=step_max,
                       step_init=min(max(self.step_init / factor, self.step_min), step_max))


def create_track_options(**overrides) -> TrackOptions:
    return TrackOptions(**overrides)


@dataclass(frozen=True, eq=False)
class TrackSample:
    """An accepted point of a track: parameter, fiber and dz/ds there."""

    s: float
    fiber: Fiber
    velocity: np.ndarray = field(repr=False)


# =========================================================
# THE CURVE AS A DYNAMICAL SYSTEM
# =========================================================

class CurveSystem:
    """
    f together with its partial derivatives, evaluated fiberwise.

    Evaluation at a fixed t first collapses the t-direction into a
    univariate coefficient vector, so every call is a handful of polyval's.
    """

    def __init__(self, f: BivariatePoly):
        self.f = f
        self.fz = d_dz(f)
        self.ft = d_dt(f)
        self.n = f.degz

    def coeffs_at(self, t: complex) -> np.ndarray:
        return npoly.polyval(t, self.f.coeffs.T)

    def velocity(self, z: np.ndarray, t: complex, dt: complex) -> np.ndarray:
        """dz/ds along a segment with dt/ds = dt."""
        fz = npoly.polyval(z, npoly.polyval(t, self.fz.coeffs.T))
        ft = npoly.polyval(z, npoly.polyval(t, self.ft.coeffs.T))
        with np.errstate(divide="ignore", invalid="ignore"):
            v = -ft * dt / fz
        if not np.all(np.isfinite(v)):
            raise CriticalPointError("f_z vanishes on the track", t=t)
        return v

    def rk4(self, z: np.ndarray, seg: Segment, s: float, h: float) -> np.ndarray:
        dt = seg.direction
        k1 = self.velocity(z, seg.point(s), dt)
        k2 = self.velocity(z + 0.5 * h * k1, seg.point(s + 0.5 * h), dt)
        k3 = self.velocity(z + 0.5 * h * k2, seg.point(s + 0.5 * h), dt)
        k4 = self.velocity(z + h * k3, seg.point(s + h), dt)
        return z + h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0

    def newton(self, t: complex, approx: np.ndarray, opts: TrackOptions) -> np.ndarray:
        c = self.coeffs_at(t)
        dc = npoly.polyder(c)
        z = np.array(approx, dtype=complex)
        done = np.zeros(z.size, dtype=bool)
        prev = np.full(z.size, np.inf)
        slow = np.zeros(z.size, dtype=int)

        for _ in range(opts.newton_max_iter):
            fv = npoly.polyval(z, c)
            dv = npoly.polyval(z, dc)
            active = ~done
            if np.any(np.abs(dv[active]) < 1e-14):
                raise CriticalPointError("derivative collapse in Newton's method", t=t)
            step = np.where(active, fv / np.where(active, dv, 1.0), 0.0)
            size = np.abs(step)
            # linear convergence means a multiple root
            with np.errstate(divide="ignore", invalid="ignore"):
                ratio = np.where(prev > 0, size / prev, 0.0)
            slow = np.where(active & (ratio >= 0.4) & (size > 0), slow + 1, 0)
            if np.any(slow >= 3):
                raise CriticalPointError("Newton converging linearly (multiple root)", t=t)
            z = z - step
            prev = np.where(active, size, prev)
            done |= size <= opts.newton_tol * np.maximum(1.0, np.abs(z))
            if done.all():
                return z
        raise NewtonDivergenceError(
            f"Newton did not converge in {opts.newton_max_iter} iterations", t=t)


# =========================================================
# OPERATIONS
# =========================================================

def newton_correct(f: BivariatePoly, t: complex, approx: Sequence[complex],
                   opts: TrackOptions) -> List[complex]:
    """
    Refine approximate roots of f(., t).

    Each entry is iterated until its Newton step is below
    newton_tol * max(1, |z|).

    Raises:
        CriticalPointError: |f_z| < 1e-14 at an iterate, or the iteration
            converges only linearly (the hallmark of a multiple root)
        NewtonDivergenceError: newton_max_iter exhausted
    """
    return [complex(z) for z in CurveSystem(f).newton(complex(t), np.asarray(approx), opts)]


def min_pairwise_distance(points: np.ndarray) -> float:
    if points.size < 2:
        return np.inf
    diff = np.abs(points[:, None] - points[None, :])
    np.fill_diagonal(diff, np.inf)
    return float(diff.min())


def initial_fiber(f: BivariatePoly, t0: complex, opts: Optional[TrackOptions] = None,
                  system: Optional[CurveSystem] = None) -> Fiber:
    """
    All n roots over t0, Newton-polished and sorted by (re, im).

    Raises:
        TrackingError: fewer than n roots (leading coefficient vanishes at
            t0) or two roots closer than min_separation
        RootSolveError: the root solver failed
    """
    opts = opts or TrackOptions()
    system = system or CurveSystem(f)
    t0 = complex(t0)
    p = restrict_t(f, t0)
    if p.degree != f.degz:
        raise TrackingError(f"fiber over {t0} has only {p.degree} of {f.degz} points", t=t0)
    approx = np.array(roots(p), dtype=complex)
    try:
        z = system.newton(t0, approx, opts)
    except NewtonDivergenceError as err:
        raise TrackingError(f"cannot polish fiber over {t0}: {err}", t=t0) from err
    if min_pairwise_distance(z) <= opts.min_separation:
        raise TrackingError(f"fiber over {t0} has clustered points; too near the branch locus",
                            t=t0)
    order = np.lexsort((z.imag, z.real))
    return Fiber(t0, tuple(z[order]))


def _continuity_ok(prev: np.ndarray, pred: np.ndarray, corr: np.ndarray) -> bool:
    """Each corrected point is nearest to its own predecessor and prediction."""
    if prev.size < 2:
        return True
    dist = np.abs(corr[None, :] - prev[:, None])
    if not np.array_equal(np.argmin(dist, axis=1), np.arange(prev.size)):
        return False
    sep = np.abs(pred[:, None] - pred[None, :])
    np.fill_diagonal(sep, np.inf)
    return bool(np.all(np.abs(corr - pred) < 0.25 * sep.min(axis=1)))


def fiber_at(system: CurveSystem, seg: Segment, sample: TrackSample, s: float,
             opts: TrackOptions) -> np.ndarray:
    """Fiber at parameter s, reached by one RK4 step from a nearby sample."""
    z0 = sample.fiber.array()
    h = s - sample.s
    pred = system.rk4(z0, seg, sample.s, h) if h != 0 else z0
    return system.newton(seg.point(s), pred, opts)


def sample_at(system: CurveSystem, seg: Segment, sample: TrackSample, s: float,
              opts: TrackOptions) -> TrackSample:
    z = fiber_at(system, seg, sample, s, opts)
    t = seg.point(s)
    return TrackSample(s, Fiber(t, tuple(z)), system.velocity(z, t, seg.direction))


def track_segment(f: BivariatePoly, seg: Segment, start: Fiber,
                  opts: Optional[TrackOptions] = None,
                  system: Optional[CurveSystem] = None) -> Tuple[List[TrackSample], Fiber]:
    """
    Follow every point of ``start`` from s = 0 to s = 1.

    Returns every accepted sample (s = 0 first, s = 1 exactly last) and the
    end fiber, with point k continuing start.points[k].

    Raises:
        StepUnderflowError: the step fell below step_min
    """
    opts = opts or TrackOptions()
    system = system or CurveSystem(f)
    if start.t != seg.start:
        raise ValueError(f"start fiber lies over {start.t}, segment starts at {seg.start}")
    dt = seg.direction

    z = start.array()
    samples = [TrackSample(0.0, start, system.velocity(z, seg.start, dt))]
    s = 0.0
    h = opts.step_init
    successes = 0
    guard = 4.0 * opts.min_separation

    while s < 1.0:
        last = h >= 1.0 - s
        s_new = 1.0 if last else s + h
        step = s_new - s
        reason = ""
        try:
            pred = system.rk4(z, seg, s, step)
            corr = system.newton(seg.point(s_new), pred, opts)
        except NewtonDivergenceError as err:
            reason = str(err)
        else:
            if min_pairwise_distance(corr) < guard:
                reason = "paths closer than 4 * min_separation"
            elif not _continuity_ok(z, pred, corr):
                reason = "path jumping"

        if reason:
            h = step / 2.0
            successes = 0
            if h < opts.step_min:
                t_fail = seg.point(s)
                raise StepUnderflowError(
                    f"step underflow at s={s:.12g} (t={t_fail:.6g}): {reason}", t=t_fail, s=s)
            continue

        s = s_new
        z = corr
        t = seg.point(s)
        samples.append(TrackSample(s, Fiber(t, tuple(z)), system.velocity(z, t, dt)))
        successes += 1
        if successes >= 5:
            h = min(2.0 * h, opts.step_max)
            successes = 0

    logger.debug("tracked %s -> %s in %d steps", seg.start, seg.end, len(samples) - 1)
    return samples, samples[-1].fiber


def track_path(f: BivariatePoly, vertices: Sequence[complex], start: Fiber,
               opts: Optional[TrackOptions] = None,
               system: Optional[CurveSystem] = None) -> Fiber:
    """Track along the polyline through ``vertices``; returns the end fiber."""
    system = system or CurveSystem(f)
    fiber = start
    for a, b in zip(vertices[:-1], vertices[1:]):
        _, fiber = track_segment(f, Segment(a, b), fiber, opts, system)
    return fiber


def match_fibers(a: Fiber, b: Fiber, tol: Optional[float] = None) -> List[int]:
    """
    Nearest-neighbour matching: result[k] is the index in b closest to a[k].

    Raises:
        TrackingError: the matching is not a bijection, or (with tol) some
            match is farther than tol
    """
    if a.n != b.n:
        raise TrackingError(f"fibers have {a.n} and {b.n} points")
    pa, pb = a.array(), b.array()
    dist = np.abs(pa[:, None] - pb[None, :])
    match = [int(k) for k in np.argmin(dist, axis=1)] if a.n else []
    if len(set(match)) != len(match):
        raise TrackingError("nearest-neighbour matching is not a bijection")
    if tol is not None and a.n and float(dist[np.arange(a.n), match].max()) > tol:
        raise TrackingError(f"fibers differ by more than {tol}")
    return match
