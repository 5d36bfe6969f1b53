import numpy as np
import pytest

from braidtrack.crossdetect import (
    CrossOptions,
    arrangement_crossings,
    check_proper,
    classify_crossing,
    cross_system_residual,
    detect_crossings,
    regularize_lambda,
    strand_points,
)
from braidtrack.errors import (
    CriticalPointError,
    EndpointCrossingError,
    ImproperCrossingError,
    LambdaExhaustedError,
)
from braidtrack.homotopy import Fiber, Segment, initial_fiber
from braidtrack.poly import parse_poly


def test_regularize_lambda():
    copts = CrossOptions(rng_seed=5, lambda_retries=2)
    assert regularize_lambda(copts, 0) == 1
    lam = regularize_lambda(copts, 1)
    assert abs(abs(lam) - 1.0) < 1e-12
    assert lam == regularize_lambda(copts, 1)
    assert lam != regularize_lambda(copts, 2)
    with pytest.raises(LambdaExhaustedError) as info:
        regularize_lambda(copts, 3)
    assert info.value.attempts == 3


def test_classify_crossing_sign():
    copts = CrossOptions()
    fiber = Fiber(0j, (0.5 - 1j, 0.5 + 1j))
    assert classify_crossing(fiber, 1, copts) == 1
    assert classify_crossing(Fiber(0j, (0.5 + 1j, 0.5 - 1j)), 1, copts) == -1


def test_classify_crossing_rejects():
    copts = CrossOptions()
    with pytest.raises(ValueError):
        classify_crossing(Fiber(0j, (0.0, 1.0 + 1j)), 1, copts)
    with pytest.raises(CriticalPointError):
        classify_crossing(Fiber(0j, (0.5 + 1j, 0.5 + 1j)), 1, copts)


def test_check_proper():
    points = [0.1 + 1j, 0.1 - 1j, 0.1 + 3j, 2.0]
    assert check_proper(points, 0.1, 1e-7) == 3
    assert check_proper([], 0.1, 1e-7) == 0


def test_square_root_crossing():
    f = parse_poly("z^2 - t")
    seg = Segment(-1 - 0.5j, -1 + 0.5j)
    start = initial_fiber(f, seg.start)
    crossings, end = detect_crossings(f, seg, start)
    assert len(crossings) == 1
    c = crossings[0]
    assert c.index == 1
    assert c.sign == -1
    assert c.s == pytest.approx(0.5, abs=1e-9)
    assert abs(c.t + 1) < 1e-8
    assert c.residual < 1e-6
    lo, hi = c.strands
    assert abs(lo.real - hi.real) < 1e-7
    # strand identity: the end fiber continues the start fiber
    assert np.allclose(end.array() ** 2, seg.end, atol=1e-10)


def test_no_crossing_away_from_negative_axis():
    f = parse_poly("z^2 - t")
    seg = Segment(1 - 0.5j, 1 + 0.5j)
    crossings, _ = detect_crossings(f, seg, initial_fiber(f, seg.start))
    assert crossings == []


def test_crossing_at_segment_start():
    f = parse_poly("z^2 - t")
    seg = Segment(-1 + 0j, -1 + 0.5j)
    start = Fiber(seg.start, (-1j, 1j))
    with pytest.raises(EndpointCrossingError):
        detect_crossings(f, seg, start)


def test_cross_system_residual_vanishes_on_crossing():
    f = parse_poly("z^2 - t")
    seg = Segment(-1 - 0.5j, -1 + 0.5j)
    r = cross_system_residual(f, seg, 0.5, 0.0, -1.0, 1.0)
    assert np.max(np.abs(r)) < 1e-14


def test_two_lines_cross_once():
    lines = [(1, -1, 0), (1, 1, 0)]
    seg = Segment(-1 + 0.5j, 1 + 0.5j)
    start = Fiber(seg.start, tuple(strand_points(lines, seg.start)))
    crossings, end = arrangement_crossings(lines, seg, start)
    assert len(crossings) == 1
    c = crossings[0]
    assert (c.index, c.sign) == (1, -1)
    assert c.s == pytest.approx(0.5)
    assert c.t == pytest.approx(0.5j)
    assert end.points == pytest.approx(tuple(strand_points(lines, seg.end)))


def test_three_concurrent_lines_are_improper():
    lines = [(1, -1, 0), (1, 1, 0), (1, 0, 0)]
    seg = Segment(-1 + 0.5j, 1 + 0.5j)
    start = Fiber(seg.start, tuple(strand_points(lines, seg.start)))
    with pytest.raises(ImproperCrossingError):
        arrangement_crossings(lines, seg, start)


def test_cross_options_validation():
    with pytest.raises(ValueError):
        CrossOptions(cross_tol=0)
    with pytest.raises(ValueError):
        CrossOptions(lambda_retries=-1)
