"""
Worked examples: curves, loops and arrangements with known braid data.

KEY CONCEPT: NAMED FIXTURES
===========================
Every entry can be fed to the engine by name (``--example NAME`` on the
command line). ``expected`` records what a correct run must reproduce, so
tests, the demo and users share one table.

Kinds:
1. curve       - polynomial text in z and t
2. loop        - a curve plus a closed user polyline
3. arrangement - a 3 x d projective line matrix (rows t, w, z)
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from .branchlocus import LineArrangement, dehomogenize_arrangement
from .looper import Loop, user_loop
from .poly import BivariatePoly, parse_poly

ALPHA_1 = float((34 + 6 * np.sqrt(21)) / 7)
ALPHA_2 = float((34 - 6 * np.sqrt(21)) / 7)


def _dessin(alpha: float) -> str:
    return f"z^3*(z^2 - 2*z + {alpha!r})^2"


def triangle_vertices() -> List[complex]:
    """delta_3 -> delta_1 -> delta_2 -> delta_3 with delta_j = exp(2 pi i j / 3 + 0.2 i)."""
    delta = {j: complex(np.exp(1j * (2.0 * np.pi * j / 3.0 + 0.2))) for j in (1, 2, 3)}
    return [delta[3], delta[1], delta[2], delta[3]]


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    kind: str
    description: str
    source: str = ""
    matrix: Optional[Sequence[Sequence[float]]] = None
    expected: Dict[str, Any] = field(default_factory=dict)


CATALOG: Dict[str, CatalogEntry] = {
    entry.name: entry
    for entry in (
        CatalogEntry(
            "intro", "curve", "cusp z^3 = t^2; one branch point, braid s2 s1 s2 s1",
            source="z^3 - t^2",
            expected={"branch_points": [0j], "core": "s2 s1 s2 s1", "perm": [2, 3, 1]},
        ),
        CatalogEntry(
            "cusp-linear", "curve", "z^3 = t; unique branch point at 0",
            source="z^3 - t",
            expected={"branch_points": [0j]},
        ),
        CatalogEntry(
            "two-branch", "curve", "z^4 - 4z^2 + 3 + t; branch points -3 and 1",
            source="z^4 - 4*z^2 + 3 + t",
            expected={"branch_points": [-3 + 0j, 1 + 0j], "cores": ["s2", "s1 s3"]},
        ),
        CatalogEntry(
            "not-generated", "curve", "z^3 = t^2 (1 - t); cyclic monodromy of order 3",
            source="z^3 - t^2*(1 - t)",
            expected={"branch_points": [0j, 1 + 0j], "core_lengths": [4, 2],
                      "monodromy_order": 3},
        ),
        CatalogEntry(
            "dessin-1", "curve", "-g1(z)/1000 - t with g1 = z^3 (z^2 - 2z + alpha1)^2",
            source=f"-({_dessin(ALPHA_1)})/1000 - t",
            expected={"finite_branch_points": 2},
        ),
        CatalogEntry(
            "dessin-2", "curve", "g2(z) - t/20 with g2 = z^3 (z^2 - 2z + alpha2)^2",
            source=f"{_dessin(ALPHA_2)} - t/20",
            expected={"branch_points": [0j, 0.10794226159 + 0j]},
        ),
        CatalogEntry(
            "triangle", "loop", "z^3 - t^2 around the triangle through the cube roots",
            source="z^3 - t^2",
            expected={"word": "s2 s1 s2 s1", "t_moduli": [0.527, 0.510, 0.667, 0.755]},
        ),
        CatalogEntry(
            "hyper8", "arrangement", "t w z (t - w)(t + w + z): five lines, eight points",
            matrix=(
                (1, 0, 0, 1, 1),
                (0, 1, 0, -1, 1),
                (0, 0, 1, 0, 1),
            ),
            expected={"branch_points": 8},
        ),
        CatalogEntry(
            "hyper46", "arrangement", "fourteen lines, forty-six intersection points",
            matrix=(
                (1, 0, 1, 0, 1, 1, 2, 3, 2, 3, 1, 1, -1, 0),
                (0, 1, 0, 1, 1, 2, 1, 2, 3, 1, 3, -1, 1, 0),
                (0, 0, 1, 1, 2, 2, 2, 4, 4, 4, 4, 4, 4, 1),
            ),
            expected={"branch_points": 46, "min_total_crossings": 2000},
        ),
    )
}


def list_examples() -> List[Dict[str, str]]:
    return [{"name": e.name, "kind": e.kind, "description": e.description}
            for e in CATALOG.values()]


def get_example(name: str) -> CatalogEntry:
    try:
        return CATALOG[name]
    except KeyError:
        raise KeyError(f"unknown example {name!r}; choose from {sorted(CATALOG)}") from None


def example_poly(name: str) -> BivariatePoly:
    entry = get_example(name)
    if entry.kind not in ("curve", "loop"):
        raise ValueError(f"example {name!r} is an {entry.kind}, not a curve")
    return parse_poly(entry.source)


def example_loop(name: str) -> Loop:
    entry = get_example(name)
    if entry.kind != "loop":
        raise ValueError(f"example {name!r} has no loop")
    return user_loop(triangle_vertices())


def example_arrangement(name: str, seed: int = 0) -> LineArrangement:
    entry = get_example(name)
    if entry.matrix is None:
        raise ValueError(f"example {name!r} is not an arrangement")
    return dehomogenize_arrangement(entry.matrix, seed=seed)
