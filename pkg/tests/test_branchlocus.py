import numpy as np
import pytest

from braidtrack.branchlocus import (
    LineArrangement,
    arrangement_branch_points,
    arrangement_poly,
    branch_points,
    dehomogenize_arrangement,
    discriminant_poly,
    load_arrangement,
    make_branch_set,
    sylvester_matrix,
)
from braidtrack.catalog import example_arrangement, example_poly
from braidtrack.errors import ArrangementError, DegenerateDiscriminantError, DegreeError
from braidtrack.poly import parse_poly


def assert_points(branch, expected, tol=1e-6):
    assert len(branch) == len(expected)
    for p, q in zip(branch.points, sorted(expected, key=lambda c: (c.real, c.imag))):
        assert abs(p - q) < tol


def test_sylvester_determinant():
    f = parse_poly("z^2 - t")
    mat = sylvester_matrix(f, 0.3 + 0.1j)
    assert mat.shape == (3, 3)
    assert np.linalg.det(mat) == pytest.approx(-4 * (0.3 + 0.1j))


def test_discriminant_degree():
    assert discriminant_poly(parse_poly("z^2 - t")).degree == 1
    assert discriminant_poly(parse_poly("z^3 - t^2")).degree == 4


@pytest.mark.parametrize("text", ["z^3 - t^2", "z^3 - t"])
def test_single_branch_point_at_origin(text):
    assert_points(branch_points(parse_poly(text)), [0j])


def test_two_branch(two_branch):
    branch = branch_points(two_branch)
    assert_points(branch, [-3 + 0j, 1 + 0j])
    assert branch.min_gap == pytest.approx(4.0, abs=1e-6)


def test_not_generated(not_generated):
    assert_points(branch_points(not_generated), [0j, 1 + 0j])


def test_dessin_branch_points():
    branch = branch_points(example_poly("dessin-2"))
    assert_points(branch, [0j, 0.10794226159 + 0j], tol=1e-5)


def test_branch_points_independent_of_seed(two_branch):
    a = branch_points(two_branch, seed=0)
    b = branch_points(two_branch, seed=7)
    assert np.allclose(a.points, b.points, atol=1e-8)


def test_discriminant_errors():
    with pytest.raises(DegreeError):
        discriminant_poly(parse_poly("z - t"))
    with pytest.raises(DegenerateDiscriminantError):
        discriminant_poly(parse_poly("(z - t)^2"))


def test_branch_set_sorted_and_spread():
    branch = make_branch_set([1 + 0j, -3 + 0j, 1 - 1j])
    assert branch.points == (-3 + 0j, 1 - 1j, 1 + 0j)
    assert branch.min_gap == pytest.approx(1.0)
    assert branch.spread() == pytest.approx(abs(-3 - (1 - 1j)))
    assert make_branch_set([2j]).spread() == 0.0


def test_two_lines_meet_once():
    arr = load_arrangement({"lines": [[1, -1, 0], [1, 1, 0]]})
    assert_points(arrangement_branch_points(arr), [0j])


def test_concurrent_lines_merge():
    arr = LineArrangement(((1, -1, 0), (1, 1, 0), (1, -2, 0)))
    branch = arrangement_branch_points(arr)
    assert_points(branch, [0j])
    assert branch.multiplicities == (3,)


def test_parallel_pair_is_skipped():
    arr = LineArrangement(((1, -1, 0), (1, -1, -1)))
    branch = arrangement_branch_points(arr)
    assert len(branch) == 0
    assert branch.diagnostics["skipped_pairs"] == [[0, 1]]


def test_hyper8_has_eight_points():
    assert len(arrangement_branch_points(example_arrangement("hyper8"))) == 8


def test_arrangement_poly_expands_product():
    arr = LineArrangement(((1, -1, 0), (1, 1, 0)))
    assert arrangement_poly(arr) == parse_poly("z^2 - t^2")


def test_arrangement_validation():
    with pytest.raises(ArrangementError):
        LineArrangement(((0, 1, 0), (1, 1, 0)))
    with pytest.raises(ArrangementError):
        LineArrangement(((1, 1, 0), (2, 2, 0)))
    with pytest.raises(ArrangementError):
        dehomogenize_arrangement([[1], [0], [0]])
    with pytest.raises(ArrangementError):
        dehomogenize_arrangement([[1, 0], [0, 1]])
    with pytest.raises(ArrangementError):
        dehomogenize_arrangement([[1, 0, 2], [0, 0, 0], [0, 0, 0]])
    with pytest.raises(ArrangementError):
        load_arrangement({"points": []})


def test_dehomogenize_is_seeded():
    matrix = [[1, 0, 0, 1], [0, 1, 0, 1], [0, 0, 1, 1]]
    a = dehomogenize_arrangement(matrix, seed=3)
    b = dehomogenize_arrangement(matrix, seed=3)
    assert a == b
    assert a.d == 4


@pytest.mark.parametrize("name", ["dessin-1", "dessin-2"])
@pytest.mark.parametrize("seed", [0, 1, 2, 3])
def test_unbalanced_sylvester_is_not_degenerate(name, seed):
    # |det| is tiny next to the row-norm product here, yet f is square-free
    disc = discriminant_poly(example_poly(name), seed=seed)
    assert disc.degree == 6
    assert len(branch_points(example_poly(name), seed=seed)) == 2


def test_repeated_factor_times_simple_factor_is_degenerate():
    with pytest.raises(DegenerateDiscriminantError):
        discriminant_poly(parse_poly("(z - t)^2*(z + 1)"))
