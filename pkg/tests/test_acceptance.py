"""
End-to-end checks against the catalog's recorded results.

The fourteen-line arrangement and the random sweeps are marked ``slow``;
run them with ``pytest -m slow``.
"""

import numpy as np
import pytest

from braidtrack.braid import exponent_sum, format_word, free_reduce, permutation
from braidtrack.branchlocus import (
    arrangement_branch_points,
    arrangement_poly,
    branch_points,
    dehomogenize_arrangement,
)
from braidtrack.catalog import example_arrangement, example_loop, example_poly, get_example
from braidtrack.crossdetect import detect_crossings
from braidtrack.engine import (
    arrangement_braid_generators,
    braid_generators,
    create_engine_options,
    cross_locus,
    loop_braid,
)
from braidtrack.errors import ArrangementError, LambdaExhaustedError
from braidtrack.homotopy import Segment, initial_fiber
from braidtrack.looper import choose_base
from braidtrack.poly import BivariatePoly


def is_involution_of_disjoint_swaps(perm):
    return all(len(c) == 2 for c in perm.cycles())


def test_intro_cusp(opts):
    entry = get_example("intro")
    report = braid_generators(example_poly("intro"), opts)
    (tau,) = report.branch.points
    assert abs(tau) < 1e-8
    (g,) = report.generators
    assert format_word(free_reduce(g.core)) == entry.expected["core"]
    assert g.perm.to_list() == entry.expected["perm"]


def test_intro_triangle():
    entry = get_example("triangle")
    report = loop_braid(example_poly("triangle"), example_loop("triangle"))
    assert format_word(report.word) == entry.expected["word"]
    assert [abs(t) for t in cross_locus(report)] == pytest.approx(
        entry.expected["t_moduli"], abs=5e-2)
    # the first crossing sits on the imaginary axis
    assert abs(report.crossings[0].t.real) < 1e-6


def test_two_branch(two_branch, opts):
    report = braid_generators(two_branch, opts)
    assert np.allclose(report.branch.points, [-3, 1], atol=1e-8)
    first, second = report.generators
    assert format_word(first.core) == "s2"
    assert sorted(second.core.letters) == [(1, 1), (3, 1)]
    for g in report.generators:
        assert is_involution_of_disjoint_swaps(g.perm)
        assert permutation(g.word) == g.perm


def test_not_generated(not_generated, opts):
    report = braid_generators(not_generated, opts)
    assert np.allclose(report.branch.points, [0, 1], atol=1e-6)
    assert [len(g.core) for g in report.generators] == [4, 2]
    assert all(len(g.perm.cycles()) == 1 and len(g.perm.cycles()[0]) == 3
               for g in report.generators)
    assert report.monodromy_order == 3
    assert report.monodromy_transitive
    sums = [exponent_sum(g.core) for g in report.generators]
    assert [abs(s) for s in sums] == [4, 2]
    assert np.sign(sums[0]) == np.sign(sums[1])


@pytest.mark.parametrize("name", ["dessin-1", "dessin-2"])
def test_dessins_have_two_finite_branch_points(name):
    assert len(branch_points(example_poly(name))) == 2


def test_dessin_two_branch_values():
    branch = branch_points(example_poly("dessin-2"))
    assert np.allclose(branch.points, get_example("dessin-2").expected["branch_points"],
                       atol=1e-6)


def _cycle_type(perm):
    return sorted((len(c) for c in perm.cycles()), reverse=True)


def test_dessin_two_generators(opts):
    f = example_poly("dessin-2")
    report = braid_generators(f, opts)
    assert len(report.generators) == 2
    # over t = 0 the fiber has a triple root and two double roots; over the other value, two double roots
    assert [_cycle_type(g.perm) for g in report.generators] == [[3, 2, 2], [2, 2]]
    assert report.monodromy_transitive
    sums = [exponent_sum(g.core) for g in report.generators]
    assert [abs(s) for s in sums] == [4, 2]
    assert np.sign(sums[0]) == np.sign(sums[1])

    rotated = braid_generators(f, create_engine_options(seed=0, lambda_override=np.exp(0.3j)))
    assert [exponent_sum(g.core) for g in rotated.generators] == sums


def test_hyper8(opts):
    report = arrangement_braid_generators(example_arrangement("hyper8"), opts)
    assert len(report.branch) == 8
    assert len(report.generators) == 8
    assert all(g.perm.is_identity() for g in report.generators)
    squares = [g.core for g in report.generators
               if len(g.core) == 2 and g.core.letters[0] == g.core.letters[1]]
    assert squares


@pytest.mark.slow
def test_hyper46(opts):
    entry = get_example("hyper46")
    report = arrangement_braid_generators(example_arrangement("hyper46"), opts)
    assert len(report.generators) == entry.expected["branch_points"]
    assert report.total_crossings >= entry.expected["min_total_crossings"]
    assert all(g.perm.is_identity() for g in report.generators)


# =========================================================
# RANDOM SWEEPS
# =========================================================

def random_curve(rng):
    degz = int(rng.integers(2, 5))
    degt = int(rng.integers(1, 4))
    coeffs = rng.normal(size=(degz + 1, degt + 1)) + 1j * rng.normal(size=(degz + 1, degt + 1))
    coeffs[degz] = 0
    coeffs[degz, 0] = 1
    return BivariatePoly(coeffs)


@pytest.mark.slow
def test_random_curves(rng):
    for k in range(50):
        f = random_curve(rng)
        opts = create_engine_options(seed=k)
        report = braid_generators(f, opts)
        for g in report.generators:
            assert permutation(g.word) == g.perm
            assert g.residual_max < 1e-6
            assert len(g.crossings) % 2 == g.perm.parity()

        # exponent sums do not depend on the rotation
        sums = None
        for lam in np.exp(1j * np.array([0.4, 1.3, 2.2])):
            fixed = create_engine_options(seed=k, lambda_override=complex(lam))
            try:
                rotated = braid_generators(f, fixed, branch=report.branch)
            except LambdaExhaustedError:
                continue
            current = [exponent_sum(g.word) for g in rotated.generators]
            assert sums is None or current == sums
            sums = current


@pytest.mark.slow
def test_reversed_segments(rng):
    for _ in range(20):
        f = random_curve(rng)
        branch = branch_points(f)
        base = choose_base(branch)
        seg = Segment(base, base - 2j * (1 + branch.spread()))
        start = initial_fiber(f, seg.start)
        forward, end = detect_crossings(f, seg, start)
        backward, _ = detect_crossings(f, seg.reversed(), end)
        assert len(backward) == len(forward)
        for a, b in zip(forward, reversed(backward)):
            assert b.s == pytest.approx(1.0 - a.s, abs=1e-8)
            assert (b.index, b.sign) == (a.index, -a.sign)


@pytest.mark.slow
def test_arrangement_matches_expanded_curve():
    for seed in range(10):
        d = 3 + seed % 2
        rng = np.random.default_rng(seed)
        matrix = rng.integers(-3, 4, size=(3, d))
        try:
            arr = dehomogenize_arrangement(matrix, seed=seed)
        except ArrangementError:
            continue
        opts = create_engine_options(seed=seed, lambda_override=1)
        branch = arrangement_branch_points(arr)
        try:
            fast = arrangement_braid_generators(arr, opts, branch)
            slow = braid_generators(arrangement_poly(arr), opts, branch)
        except LambdaExhaustedError:
            continue
        assert [free_reduce(g.core) for g in fast.generators] == \
            [free_reduce(g.core) for g in slow.generators]
