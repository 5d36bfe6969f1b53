import numpy as np
import pytest

from braidtrack.catalog import triangle_vertices
from braidtrack.errors import StepUnderflowError, TrackingError
from braidtrack.homotopy import (
    Segment,
    TrackOptions,
    initial_fiber,
    match_fibers,
    newton_correct,
    track_path,
    track_segment,
)
from braidtrack.poly import evaluate


def test_initial_fiber_sorted_and_accurate(cusp):
    fiber = initial_fiber(cusp, 1 + 0.5j)
    assert fiber.n == 3
    re = [p.real for p in fiber.points]
    assert re == sorted(re)
    assert max(abs(evaluate(cusp, p, 1 + 0.5j)) for p in fiber.points) < 1e-12


def test_initial_fiber_on_branch_point(cusp):
    with pytest.raises(TrackingError):
        initial_fiber(cusp, 0)


def test_track_segment_keeps_identity(cusp):
    seg = Segment(1 + 0.5j, 1.3 + 0.6j)
    start = initial_fiber(cusp, seg.start)
    samples, end = track_segment(cusp, seg, start)
    assert samples[0].s == 0.0 and samples[-1].s == 1.0
    assert end.t == seg.end
    assert max(abs(evaluate(cusp, p, seg.end)) for p in end.points) < 1e-10
    # no branch point nearby: each point moves only a little
    moved = np.abs(end.array() - start.array())
    assert np.all(moved < 0.4)


def test_track_segment_rejects_wrong_start(cusp):
    start = initial_fiber(cusp, 1 + 0j)
    with pytest.raises(ValueError):
        track_segment(cusp, Segment(2 + 0j, 3 + 0j), start)


def test_triangle_monodromy_is_three_cycle(cusp):
    vertices = triangle_vertices()
    start = initial_fiber(cusp, vertices[0])
    end = track_path(cusp, vertices, start)
    match = match_fibers(end, start, tol=1e-8)
    assert sorted(match) == [0, 1, 2]
    assert all(match[k] != k for k in range(3))


def test_loop_not_enclosing_branch_point_is_trivial(cusp):
    vertices = [2 + 0j, 3 + 0j, 3 + 1j, 2 + 1j, 2 + 0j]
    start = initial_fiber(cusp, vertices[0])
    end = track_path(cusp, vertices, start)
    assert match_fibers(end, start, tol=1e-8) == [0, 1, 2]


def test_step_underflow_at_branch_point(cusp):
    opts = TrackOptions(step_min=1e-6)
    seg = Segment(1 + 0j, 0j)
    start = initial_fiber(cusp, seg.start)
    with pytest.raises(StepUnderflowError):
        track_segment(cusp, seg, start, opts)


def test_newton_correct_polishes(cusp):
    fiber = initial_fiber(cusp, 1 + 0j)
    rough = [p + 1e-4 for p in fiber.points]
    polished = newton_correct(cusp, 1 + 0j, rough, TrackOptions())
    assert np.allclose(polished, fiber.array(), atol=1e-12)


def test_match_fibers_tolerance(cusp):
    a = initial_fiber(cusp, 1 + 0j)
    b = initial_fiber(cusp, 1.1 + 0j)
    assert match_fibers(a, b) == [0, 1, 2]
    with pytest.raises(TrackingError):
        match_fibers(a, b, tol=1e-6)


@pytest.mark.parametrize("kwargs", [
    {"step_min": 0.0},
    {"step_init": 0.1, "step_max": 0.05},
    {"newton_tol": -1.0},
    {"newton_max_iter": 0},
])
def test_track_options_validation(kwargs):
    with pytest.raises(ValueError):
        TrackOptions(**kwargs)


def test_tightened_options():
    opts = TrackOptions().tightened()
    assert opts.step_max == pytest.approx(5e-2 / 4)
    assert opts.step_min <= opts.step_init <= opts.step_max
