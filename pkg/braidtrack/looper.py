"""
Polygonal loops in the t-plane.

KEY CONCEPT: KEYHOLE LOOPS FROM ONE BASE POINT
==============================================
Every generator must be a loop based at the same point beta, otherwise
the braids live in different identifications of the strands. For each
branch point tau the loop is:

    beta --approach--> P --small polygon around tau (ccw)--> P --approach reversed--> beta

The approach is a straight run toward tau that sidesteps any other branch
point it would pass too close to. Because the way back retraces the way
out, the braid of the loop is g * core * g^-1 with g the braid of the
approach; the core is what the small polygon contributes.
"""

from dataclasses import dataclass, replace
from typing import Any, Dict, List, Optional, Sequence, Tuple
import logging

import numpy as np

from .branchlocus import BranchSet
from .errors import LoopRoutingError
from .homotopy import Segment
from .poly import complex_to_json

logger = logging.getLogger(__name__)

MAX_DETOUR_DEPTH = 6


# =========================================================
# TYPES
# =========================================================

@dataclass(frozen=True)
class LoopOptions:
    polygon_sides: int = 4
    radius_factor: float = 0.2
    routing_retries: int = 8

    def __post_init__(self):
        if self.polygon_sides < 3:
            raise ValueError("polygon_sides must be at least 3")
        if not 0 < self.radius_factor < 0.5:
            raise ValueError("radius_factor must lie in (0, 0.5)")
        if self.routing_retries < 0:
            raise ValueError("routing_retries must be >= 0")


def create_loop_options(**overrides) -> LoopOptions:
    return LoopOptions(**overrides)


@dataclass(frozen=True)
class Loop:
    """
    A closed polyline. ``vertices[0] == vertices[-1] == base``; consecutive
    segments share their endpoint objects. The first ``approach_count``
    segments are the approach (empty for user-supplied loops).
    """

    base: complex
    vertices: Tuple[complex, ...]
    target: Optional[complex] = None
    radius: float = 0.0
    approach_count: int = 0

    @property
    def segments(self) -> List[Segment]:
        return [Segment(a, b) for a, b in zip(self.vertices[:-1], self.vertices[1:])]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "base": complex_to_json(self.base),
            "target": None if self.target is None else complex_to_json(self.target),
            "radius": self.radius,
            "approach_segments": self.approach_count,
            "vertices": [complex_to_json(v) for v in self.vertices],
        }


# =========================================================
# GEOMETRY HELPERS
# =========================================================

def segment_distance(a: complex, b: complex, p: complex) -> float:
    d = b - a
    if d == 0:
        return abs(p - a)
    u = ((p - a) * np.conj(d)).real / abs(d) ** 2
    u = min(1.0, max(0.0, u))
    return abs(p - (a + u * d))


def winding_number(loop: Any, p: complex, min_distance: float = 1e-9) -> int:
    """
    Winding number of a closed polyline (a Loop or a vertex list) about p.

    Raises:
        ValueError: p lies within min_distance of the polyline
    """
    vertices = loop.vertices if isinstance(loop, Loop) else tuple(complex(v) for v in loop)
    if vertices[0] != vertices[-1]:
        vertices = tuple(vertices) + (vertices[0],)
    total = 0.0
    for a, b in zip(vertices[:-1], vertices[1:]):
        if segment_distance(a, b, p) <= min_distance:
            raise ValueError(f"point {p} lies on the loop")
        total += float(np.angle((b - p) / (a - p)))
    return int(round(total / (2.0 * np.pi)))


def loop_clearance(loop: Loop, points: Sequence[complex]) -> float:
    best = np.inf
    for a, b in zip(loop.vertices[:-1], loop.vertices[1:]):
        for p in points:
            best = min(best, segment_distance(a, b, p))
    return float(best)


# =========================================================
# OPERATIONS
# =========================================================

def choose_base(branch: BranchSet, seed: int = 0) -> complex:
    """
    beta = max Re + (1 + r) * spread + i * eps * spread, r and eps drawn
    from U(0.01, 0.1) with ``seed``; spread is 1 for a single point.
    """
    if len(branch) == 0:
        raise ValueError("choose_base needs at least one branch point")
    spread = branch.spread() or 1.0
    r, eps = np.random.default_rng(seed).uniform(0.01, 0.1, size=2)
    max_re = max(p.real for p in branch)
    return complex(max_re + (1.0 + r) * spread, eps * spread)


def _own_radius(points: Sequence[complex], k: int, base: complex, factor: float) -> float:
    others = [abs(points[k] - q) for j, q in enumerate(points) if j != k]
    nearest = min(others) if others else abs(points[k] - base)
    return factor * nearest


def _route(a: complex, b: complex, obstacles: List[Tuple[complex, float]], stretch: float,
           depth: int) -> List[complex]:
    """Waypoints strictly between a and b that keep clear of every obstacle."""
    hits = [(p, r) for p, r in obstacles if segment_distance(a, b, p) < r]
    if not hits:
        return []
    if depth == 0:
        raise LoopRoutingError("approach routing exceeded its detour depth")
    u = (b - a) / abs(b - a)
    # first obstacle along the way
    p, r = min(hits, key=lambda h: ((h[0] - a) * np.conj(u)).real)
    left = ((p - a) * np.conj(u)).imag
    normal = -1j * u if left > 0 else 1j * u
    off = 2.0 * r * stretch
    w1 = p - off * u + off * normal
    w2 = p + off * u + off * normal
    return (_route(a, w1, obstacles, stretch, depth - 1) + [w1]
            + _route(w1, w2, obstacles, stretch, depth - 1) + [w2]
            + _route(w2, b, obstacles, stretch, depth - 1))


def _build_keyhole(points: Sequence[complex], k: int, base: complex, sides: int, factor: float,
                   rng: Optional[np.random.Generator]) -> Loop:
    target = points[k]
    rho = _own_radius(points, k, base, factor)
    obstacles = [(q, max(_own_radius(points, j, base, factor), 0.2 * rho))
                 for j, q in enumerate(points) if j != k]
    stretch = 1.0 if rng is None else float(rng.uniform(1.0, 1.3))
    waypoints = [base] + _route(base, target, obstacles, stretch, MAX_DETOUR_DEPTH)

    phi0 = float(np.angle(waypoints[-1] - target))
    jitter = np.zeros(sides)
    if rng is not None:
        phi0 += float(rng.uniform(-0.2, 0.2)) * np.pi / sides
        jitter[1:] = rng.uniform(-0.25, 0.25, size=sides - 1) * np.pi / sides
    angles = phi0 + 2.0 * np.pi * np.arange(sides) / sides + jitter
    polygon = [complex(target + rho * np.exp(1j * a)) for a in angles]

    approach = waypoints + [polygon[0]]
    vertices = approach + polygon[1:] + [polygon[0]] + approach[-2::-1]
    return Loop(base, tuple(vertices), target, rho, len(approach) - 1)


def _loop_ok(loop: Loop, points: Sequence[complex], k: int) -> bool:
    try:
        if winding_number(loop, points[k]) != 1:
            return False
        if any(winding_number(loop, q) != 0 for j, q in enumerate(points) if j != k):
            return False
    except ValueError:
        return False
    return loop_clearance(loop, points) > 0.1 * loop.radius


def keyhole_loop(branch: BranchSet, target_idx: int, base: complex, polygon_sides: int = 4,
                 radius_factor: float = 0.2, seed: int = 0, perturbation: int = 0,
                 routing_retries: int = 8) -> Loop:
    """
    Keyhole loop around branch[target_idx], based at ``base``.

    ``perturbation`` > 0 jitters the polygon phase and detour offsets
    (used when a crossing lands on a vertex). Attempts that fail the
    winding or clearance checks are retried with further jitter.

    Raises:
        LoopRoutingError: no admissible loop within routing_retries
    """
    LoopOptions(polygon_sides, radius_factor, routing_retries)
    points = list(branch.points)
    if not 0 <= target_idx < len(points):
        raise IndexError(f"no branch point {target_idx}")
    for attempt in range(perturbation, perturbation + routing_retries + 1):
        rng = None if attempt == 0 else np.random.default_rng([seed, target_idx, attempt])
        try:
            loop = _build_keyhole(points, target_idx, complex(base), polygon_sides,
                                  radius_factor, rng)
        except LoopRoutingError:
            continue
        if _loop_ok(loop, points, target_idx):
            if attempt:
                logger.debug("loop %d accepted on attempt %d", target_idx, attempt)
            return loop
        logger.warning("loop around %s failed its checks (attempt %d)", points[target_idx],
                       attempt)
    raise LoopRoutingError(
        f"could not route a loop around {points[target_idx]}",
        geometry={
            "base": complex_to_json(base),
            "target": complex_to_json(points[target_idx]),
            "branch_points": [complex_to_json(p) for p in points],
            "radius_factor": radius_factor,
            "polygon_sides": polygon_sides,
        },
    )


def user_loop(vertices: Sequence[complex], target: Optional[complex] = None) -> Loop:
    """
    A caller-supplied closed polyline. It is closed automatically when the
    last vertex differs from the first.

    Raises:
        LoopRoutingError: fewer than three distinct vertices or a
            zero-length segment
    """
    pts = [complex(v) for v in vertices]
    if len(pts) >= 2 and pts[0] == pts[-1]:
        pts = pts[:-1]
    if len(set(pts)) < 3:
        raise LoopRoutingError("a loop needs at least three distinct vertices",
                               geometry={"vertices": [complex_to_json(v) for v in pts]})
    pts.append(pts[0])
    for a, b in zip(pts[:-1], pts[1:]):
        if a == b:
            raise LoopRoutingError("loop has a zero-length segment",
                                   geometry={"vertices": [complex_to_json(v) for v in pts]})
    return Loop(pts[0], tuple(pts), target, 0.0, 0)


def rebased(loop: Loop, start_index: int) -> Loop:
    """The same closed user loop started at another vertex."""
    body = list(loop.vertices[:-1])
    body = body[start_index:] + body[:start_index]
    return replace(loop, base=body[0], vertices=tuple(body + [body[0]]), approach_count=0)
