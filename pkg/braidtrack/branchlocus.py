"""
Finite supersets of the branch locus.

KEY CONCEPT: WHERE THE FIBER DEGENERATES
========================================
The projection (z, t) -> t fails to be a covering exactly where f and
df/dz have a common root, i.e. at the roots of the discriminant
D(t) = Res_z(f, f_z). Two ways of getting at those t-values:

1. General curve: sample the Sylvester determinant on a circle, recover
   D's coefficients with an FFT, take all roots and merge clusters
2. Line arrangement: every branch point is the t-coordinate of some
   pairwise intersection, so just solve C(d, 2) linear 2x2 systems

Multiple roots of D are normal here (cusps, tacnodes, triple points).
Numerically they come back as small clusters; a cluster is merged when
the segment joining two roots stays inside D's rounding-level pseudozero
set, and is represented by its centroid, which is well conditioned even
when the individual roots are not.
"""

from dataclasses import dataclass, field
from itertools import combinations
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple
import logging

import numpy as np
from numpy.polynomial import polynomial as npoly

from .errors import ArrangementError, DegenerateDiscriminantError, DegreeError
from .poly import (
    BivariatePoly,
    MultivariatePoly,
    UnivariatePoly,
    complex_from_json,
    complex_to_json,
    roots,
)

logger = logging.getLogger(__name__)

Line = Tuple[complex, complex, complex]

SAMPLE_RADIUS = 1.17
TRIM_RATIO = 1e-9
DEGENERATE_RATIO = 1e-12
PSEUDOZERO_RATIO = 1e-10


# =========================================================
# TYPES
# =========================================================

@dataclass(frozen=True)
class BranchSet:
    """Branch points sorted by (re, im), with the smallest pairwise gap."""

    points: Tuple[complex, ...]
    min_gap: float = float("inf")
    multiplicities: Tuple[int, ...] = ()
    diagnostics: Dict[str, Any] = field(default_factory=dict, compare=False, repr=False)

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self) -> Iterator[complex]:
        return iter(self.points)

    def __getitem__(self, k: int) -> complex:
        return self.points[k]

    def spread(self) -> float:
        """Largest pairwise distance (0 for fewer than two points)."""
        if len(self.points) < 2:
            return 0.0
        p = np.array(self.points)
        return float(np.abs(p[:, None] - p[None, :]).max())

    def to_dict(self) -> Dict[str, Any]:
        return {
            "status": "completed",
            "points": [complex_to_json(p) for p in self.points],
            "multiplicities": list(self.multiplicities),
            "min_gap": None if not np.isfinite(self.min_gap) else self.min_gap,
            "diagnostics": self.diagnostics,
        }


def make_branch_set(points: Sequence[complex], multiplicities: Optional[Sequence[int]] = None,
                    diagnostics: Optional[Dict[str, Any]] = None) -> BranchSet:
    pts = [complex(p) for p in points]
    mults = list(multiplicities) if multiplicities is not None else [1] * len(pts)
    order = sorted(range(len(pts)), key=lambda k: (pts[k].real, pts[k].imag))
    pts = [pts[k] for k in order]
    mults = [mults[k] for k in order]
    if len(pts) > 1:
        arr = np.array(pts)
        diff = np.abs(arr[:, None] - arr[None, :])
        np.fill_diagonal(diff, np.inf)
        gap = float(diff.min())
    else:
        gap = float("inf")
    return BranchSet(tuple(pts), gap, tuple(mults), dict(diagnostics or {}))


@dataclass(frozen=True)
class LineArrangement:
    """Affine lines a*z + b*t + c = 0; every a is non-zero."""

    lines: Tuple[Line, ...]

    def __post_init__(self):
        lines = tuple(tuple(complex(v) for v in line) for line in self.lines)
        for k, (a, b, c) in enumerate(lines):
            if a == 0:
                raise ArrangementError(f"line {k} is vertical (a = 0)")
        for (i, li), (j, lj) in combinations(enumerate(lines), 2):
            if _proportional(li, lj):
                raise ArrangementError(f"lines {i} and {j} are proportional")
        object.__setattr__(self, "lines", lines)

    @property
    def d(self) -> int:
        return len(self.lines)

    def scaled(self, lam: complex) -> "LineArrangement":
        """The arrangement of f(lam*z, t)."""
        return LineArrangement(tuple((a * lam, b, c) for a, b, c in self.lines))

    def strands(self, t: complex) -> np.ndarray:
        arr = np.array(self.lines, dtype=complex)
        return -(arr[:, 1] * t + arr[:, 2]) / arr[:, 0]

    def to_dict(self) -> Dict[str, Any]:
        return {"lines": [[complex_to_json(v) for v in line] for line in self.lines]}


def _proportional(u: Sequence[complex], v: Sequence[complex], tol: float = 1e-12) -> bool:
    a, b = np.asarray(u, dtype=complex), np.asarray(v, dtype=complex)
    scale = np.linalg.norm(a) * np.linalg.norm(b)
    if scale == 0:
        return True
    return abs(np.vdot(a, b)) >= (1.0 - tol) * scale


# =========================================================
# DISCRIMINANT OF A CURVE
# =========================================================

def sylvester_matrix(f: BivariatePoly, t0: complex) -> np.ndarray:
    """
    Sylvester matrix of f(., t0) (formal degree n) and f_z(., t0).

    Rows 0..n-2 hold f's coefficients, rows n-1..2n-2 hold f_z's,
    highest degree first, each shifted one column to the right.
    """
    n = f.degz
    if n < 1:
        raise DegreeError("Sylvester matrix needs deg_z f >= 1")
    p = npoly.polyval(complex(t0), f.coeffs.T)[::-1]
    q = npoly.polyder(p[::-1])[::-1]
    size = 2 * n - 1
    mat = np.zeros((size, size), dtype=complex)
    for k in range(n - 1):
        mat[k, k:k + n + 1] = p
    for k in range(n):
        mat[n - 1 + k, k:k + n] = q
    return mat


def _relative_gap(mat: np.ndarray) -> float:
    """Smallest singular value over the largest; 0 for the zero matrix."""
    sigma = np.linalg.svd(mat, compute_uv=False)
    if sigma[0] == 0:
        return 0.0
    return float(sigma[-1] / sigma[0])


def discriminant_poly(f: BivariatePoly, seed: int = 0) -> UnivariatePoly:
    """
    D(t) = Res_z(f, f_z), interpolated from N = (2n-1)m + 1 samples.

    Sample points are t_k = R e^{i theta0} w^k with R = 1.17, w a primitive
    N-th root of unity and theta0 drawn from ``seed``.

    Raises:
        DegreeError: deg_z f < 2
        DegenerateDiscriminantError: D vanishes identically
    """
    n, m = f.degz, f.degt
    if n < 2:
        raise DegreeError("the discriminant needs deg_z f >= 2")
    count = (2 * n - 1) * m + 1
    theta0 = np.random.default_rng(seed).uniform(0.0, 2.0 * np.pi)
    rotation = SAMPLE_RADIUS * np.exp(1j * theta0)
    samples = rotation * np.exp(2j * np.pi * np.arange(count) / count)

    dets = np.empty(count, dtype=complex)
    gap = 0.0
    for k, t in enumerate(samples):
        mat = sylvester_matrix(f, t)
        dets[k] = np.linalg.det(mat)
        gap = max(gap, _relative_gap(mat))
    # a common factor keeps every sample singular to working precision
    if gap <= DEGENERATE_RATIO:
        raise DegenerateDiscriminantError(
            "Res_z(f, f_z) vanishes identically; f has a repeated factor")

    coeffs = np.fft.fft(dets) / count
    coeffs = coeffs / np.power(rotation, np.arange(count))
    big = np.max(np.abs(coeffs))
    keep = np.flatnonzero(np.abs(coeffs) > TRIM_RATIO * big)
    coeffs = coeffs[: keep[-1] + 1]
    logger.debug("discriminant of degree %d from %d samples", coeffs.size - 1, count)
    return UnivariatePoly(coeffs)


def _pseudozero_linked(p: UnivariatePoly, a: complex, b: complex) -> bool:
    """True if D stays at rounding level along the segment from a to b."""
    c = p.coeffs
    scale = np.max(np.abs(c))
    for u in (0.25, 0.5, 0.75):
        x = a + u * (b - a)
        level = PSEUDOZERO_RATIO * scale * float(npoly.polyval(abs(x), np.ones_like(c.real)))
        if abs(npoly.polyval(x, c)) > level:
            return False
    return True


def cluster_roots(p: UnivariatePoly, rts: Sequence[complex],
                  tol: float) -> List[Tuple[complex, int]]:
    """Single-linkage clusters as (centroid, size)."""
    k = len(rts)
    parent = list(range(k))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i, j in combinations(range(k), 2):
        if find(i) == find(j):
            continue
        if abs(rts[i] - rts[j]) <= tol or _pseudozero_linked(p, rts[i], rts[j]):
            parent[find(i)] = find(j)

    groups: Dict[int, List[complex]] = {}
    for i in range(k):
        groups.setdefault(find(i), []).append(complex(rts[i]))
    return [(complex(np.mean(members)), len(members)) for members in groups.values()]


def branch_points(f: BivariatePoly, tol: float = 1e-6, seed: int = 0) -> BranchSet:
    """Deduplicated roots of the discriminant, sorted by (re, im)."""
    disc = discriminant_poly(f, seed)
    if disc.degree < 1:
        return make_branch_set([], diagnostics={"discriminant_degree": disc.degree})
    clusters = cluster_roots(disc, roots(disc), tol)
    branch = make_branch_set([c for c, _ in clusters], [size for _, size in clusters],
                             {"discriminant_degree": disc.degree})
    logger.info("%d branch point(s) from a degree-%d discriminant", len(branch), disc.degree)
    return branch


# =========================================================
# LINE ARRANGEMENTS
# =========================================================

def pair_intersection(li: Line, lj: Line) -> Optional[Tuple[complex, complex]]:
    """(z, t) where two lines meet, or None if they are parallel."""
    (ai, bi, ci), (aj, bj, cj) = li, lj
    mat = np.array([[ai, bi], [aj, bj]], dtype=complex)
    det = ai * bj - aj * bi
    if abs(det) <= 1e-12 * np.linalg.norm(mat) ** 2:
        return None
    z, t = np.linalg.solve(mat, -np.array([ci, cj], dtype=complex))
    return complex(z), complex(t)


def arrangement_branch_points(arr: LineArrangement, tol: float = 1e-6) -> BranchSet:
    """t-coordinates of the pairwise intersections, merged at tol."""
    ts: List[complex] = []
    skipped: List[List[int]] = []
    for (i, li), (j, lj) in combinations(enumerate(arr.lines), 2):
        hit = pair_intersection(li, lj)
        if hit is None:
            skipped.append([i, j])
            continue
        ts.append(hit[1])
    if skipped:
        logger.warning("skipped %d parallel line pair(s)", len(skipped))

    clusters = _merge_close(ts, tol)
    return make_branch_set([c for c, _ in clusters], [size for _, size in clusters],
                           {"pairs": len(ts), "skipped_pairs": skipped})


def _merge_close(points: Sequence[complex], tol: float) -> List[Tuple[complex, int]]:
    """Single-linkage at distance tol; size counts merged pairs."""
    pts = list(points)
    parent = list(range(len(pts)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i, j in combinations(range(len(pts)), 2):
        if abs(pts[i] - pts[j]) <= tol:
            parent[find(i)] = find(j)
    groups: Dict[int, List[complex]] = {}
    for i, p in enumerate(pts):
        groups.setdefault(find(i), []).append(p)
    return [(complex(np.mean(g)), len(g)) for g in groups.values()]


def dehomogenize_arrangement(matrix: Any, seed: int = 0, max_draws: int = 100) -> LineArrangement:
    """
    Affine chart of a projective arrangement given as a 3 x d matrix of
    line coefficients.

    A seeded random complex 3x3 M changes coordinates; column col becomes
    the line (a, b, c) = M^T col in coordinates (z, t, 1).

    Raises:
        ArrangementError: d < 2, a zero column, proportional columns, or no
            admissible draw
    """
    mat = np.asarray(matrix, dtype=complex)
    if mat.ndim != 2 or mat.shape[0] != 3:
        raise ArrangementError(f"expected a 3 x d matrix, got shape {mat.shape}")
    d = mat.shape[1]
    if d < 2:
        raise ArrangementError("an arrangement needs at least two lines")
    for j in range(d):
        if not np.any(mat[:, j]):
            raise ArrangementError(f"column {j} is zero")
    for i, j in combinations(range(d), 2):
        if _proportional(mat[:, i], mat[:, j], 1e-10):
            raise ArrangementError(f"columns {i} and {j} are proportional")

    rng = np.random.default_rng(seed)
    for draw in range(max_draws):
        change = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        if np.linalg.cond(change) > 1e6:
            continue
        lines = change.T @ mat
        norms = np.linalg.norm(lines, axis=0)
        if np.any(np.abs(lines[0]) <= 1e-8 * norms):
            continue
        try:
            arrangement = LineArrangement(tuple(tuple(lines[:, j]) for j in range(d)))
        except ArrangementError:
            continue
        logger.debug("dehomogenized %d lines after %d draw(s)", d, draw + 1)
        return arrangement
    raise ArrangementError(f"no admissible chart in {max_draws} draws")


def arrangement_poly(arr: LineArrangement) -> BivariatePoly:
    """Expanded product of the arrangement's linear forms."""
    z = MultivariatePoly.variable(0, 1, ("z", "t"))
    t = MultivariatePoly.variable(1, 1, ("z", "t"))
    product = MultivariatePoly.constant(1.0, 1, ("z", "t"))
    for a, b, c in arr.lines:
        product = product * (a * z + b * t + c)
    return product.to_bivariate()


def load_arrangement(obj: Dict[str, Any], seed: int = 0) -> LineArrangement:
    """
    Arrangement from JSON: {"matrix": 3 x d} or {"lines": [[a, b, c], ...]};
    entries are numbers or [re, im] pairs.
    """
    try:
        if "lines" in obj:
            lines = tuple(tuple(complex_from_json(v) for v in line) for line in obj["lines"])
            if len(lines) < 2:
                raise ArrangementError("an arrangement needs at least two lines")
            if any(len(line) != 3 for line in lines):
                raise ArrangementError("each line needs three coefficients [a, b, c]")
            return LineArrangement(lines)
        if "matrix" in obj:
            matrix = [[complex_from_json(v) for v in row] for row in obj["matrix"]]
            return dehomogenize_arrangement(matrix, seed)
    except (TypeError, ValueError) as err:
        raise ArrangementError(f"bad arrangement data: {err}") from None
    raise ArrangementError("arrangement JSON needs a 'matrix' or 'lines' key")
