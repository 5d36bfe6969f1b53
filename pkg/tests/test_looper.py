import pytest

from braidtrack.branchlocus import make_branch_set
from braidtrack.errors import LoopRoutingError
from braidtrack.looper import (
    LoopOptions,
    choose_base,
    keyhole_loop,
    loop_clearance,
    rebased,
    user_loop,
    winding_number,
)

SQUARE = [1 + 0j, 1j, -1 + 0j, -1j]


def test_winding_number():
    assert winding_number(SQUARE, 0j) == 1
    assert winding_number(SQUARE[::-1], 0j) == -1
    assert winding_number(SQUARE, 5 + 0j) == 0
    with pytest.raises(ValueError):
        winding_number(SQUARE, 1 + 0j)


def test_choose_base():
    branch = make_branch_set([-3, 1])
    base = choose_base(branch, seed=4)
    assert 1 + 1.01 * 4 <= base.real <= 1 + 1.1 * 4
    assert 0.01 * 4 <= base.imag <= 0.1 * 4
    assert base == choose_base(branch, seed=4)
    single = choose_base(make_branch_set([2j]))
    assert 1.01 <= single.real <= 1.1
    with pytest.raises(ValueError):
        choose_base(make_branch_set([]))


def check_keyhole(loop, points, k):
    assert loop.vertices[0] == loop.vertices[-1] == loop.base
    assert winding_number(loop, points[k]) == 1
    for j, q in enumerate(points):
        if j != k:
            assert winding_number(loop, q) == 0
    a = loop.approach_count
    assert a >= 1
    assert loop.vertices[: a + 1] == tuple(reversed(loop.vertices[-(a + 1):]))
    assert loop_clearance(loop, points) > 0.1 * loop.radius


@pytest.mark.parametrize("points", [
    [-3, 1],
    [0, 1, 2],
    [0, 1j, -1j, 0.5 + 0.5j, 2],
])
def test_keyhole_loops(points):
    branch = make_branch_set(points)
    base = choose_base(branch)
    for k in range(len(branch)):
        loop = keyhole_loop(branch, k, base)
        check_keyhole(loop, branch.points, k)
        assert loop.target == branch[k]


def test_keyhole_perturbation_moves_vertices():
    branch = make_branch_set([-3, 1])
    base = choose_base(branch)
    plain = keyhole_loop(branch, 0, base)
    moved = keyhole_loop(branch, 0, base, perturbation=1)
    assert plain.vertices != moved.vertices
    check_keyhole(moved, branch.points, 0)


def test_keyhole_polygon_sides():
    branch = make_branch_set([0])
    loop = keyhole_loop(branch, 0, 2 + 0.1j, polygon_sides=6)
    assert len(loop.vertices) == 2 * loop.approach_count + 6 + 1
    with pytest.raises(ValueError):
        keyhole_loop(branch, 0, 2 + 0.1j, polygon_sides=2)
    with pytest.raises(IndexError):
        keyhole_loop(branch, 1, 2 + 0.1j)


def test_user_loop():
    loop = user_loop(SQUARE)
    assert loop.vertices == tuple(SQUARE) + (SQUARE[0],)
    assert loop.approach_count == 0
    assert user_loop(SQUARE + [SQUARE[0]]).vertices == loop.vertices
    assert rebased(loop, 2).base == -1 + 0j
    assert winding_number(rebased(loop, 2), 0j) == 1


def test_user_loop_errors():
    with pytest.raises(LoopRoutingError):
        user_loop([0, 1])
    with pytest.raises(LoopRoutingError):
        user_loop([0, 1, 1, 1j])


def test_loop_options_validation():
    with pytest.raises(ValueError):
        LoopOptions(radius_factor=0.5)
    with pytest.raises(ValueError):
        LoopOptions(routing_retries=-1)
