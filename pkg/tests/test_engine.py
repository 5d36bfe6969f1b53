import json

import numpy as np
import pytest

from braidtrack.braid import Permutation, exponent_sum, format_word, permutation
from braidtrack.branchlocus import branch_points
from braidtrack.catalog import example_loop
from braidtrack.engine import (
    CLOSURE_LIMIT,
    abraid_generators,
    aloop_braid,
    big_loop_permutation,
    braid_generators,
    composed_monodromy,
    create_engine,
    create_engine_options,
    cross_locus,
    loop_braid,
    monodromy_closure,
    restrict_to_line,
    verify_report,
)
from braidtrack.errors import (
    DegreeError,
    LambdaExhaustedError,
    NonGenericLineError,
    ReportFormatError,
)
from braidtrack.looper import user_loop
from braidtrack.poly import parse_multivariate, parse_poly


# =========================================================
# PERMUTATION GROUPS
# =========================================================

def test_monodromy_closure_cyclic():
    assert monodromy_closure([Permutation((2, 3, 1))]) == (3, True)


def test_monodromy_closure_symmetric():
    s1, s2 = Permutation((2, 1, 3)), Permutation((1, 3, 2))
    assert monodromy_closure([s1, s2]) == (6, True)


def test_monodromy_closure_trivial():
    assert monodromy_closure([Permutation.identity(3)] * 2) == (1, False)
    assert monodromy_closure([], 1) == (1, True)
    assert monodromy_closure([], 2) == (1, False)
    with pytest.raises(ValueError):
        monodromy_closure([])


def test_monodromy_closure_skips_large_groups():
    n = CLOSURE_LIMIT + 1
    cycle = Permutation(tuple(range(2, n + 1)) + (1,))
    assert monodromy_closure([cycle]) == (None, True)


# =========================================================
# GENERATORS
# =========================================================

@pytest.mark.asyncio
async def test_cusp_generator(cusp, opts):
    report = await abraid_generators(cusp, opts)
    assert report.n == 3
    assert len(report.generators) == 1
    g = report.generators[0]
    assert format_word(g.core) == "s2 s1 s2 s1"
    assert g.perm.to_list() == [2, 3, 1]
    assert report.monodromy_order == 3
    assert report.monodromy_transitive
    assert g.diagnostics["closure_error"] < 1e-6


@pytest.mark.asyncio
async def test_generators_are_consistent(two_branch, opts):
    report = await abraid_generators(two_branch, opts)
    assert len(report.generators) == 2
    for g in report.generators:
        assert permutation(g.word) == g.perm
        assert g.word.letters == tuple(c.letter for c in g.crossings)
        assert g.residual_max < 1e-6
        assert g.loop.vertices[0] == report.base
    assert report.total_crossings == sum(len(g.word) for g in report.generators)


def test_linear_curve_has_no_generators():
    report = braid_generators(parse_poly("z - t"))
    data = report.to_dict()
    assert data["n"] == 1
    assert data["generators"] == []
    assert data["monodromy"] == {"perms": [], "order": 1, "transitive": True}


def test_unramified_curve():
    report = braid_generators(parse_poly("z^2 - 1"))
    assert report.generators == ()
    assert report.monodromy_transitive is False


def test_precomputed_branch_set(cusp, opts):
    branch = branch_points(cusp)
    report = braid_generators(cusp, opts, branch=branch)
    assert report.branch is branch


def test_fixed_lambda(cusp):
    opts = create_engine_options(seed=0, lambda_override=np.exp(0.3j))
    report = braid_generators(cusp, opts)
    assert report.lam == pytest.approx(np.exp(0.3j))
    assert exponent_sum(report.generators[0].core) == 4


def test_exhausted_lambda_is_reported():
    # z = t, z = -t and z = 0 line up over t = 0.5i
    f = parse_poly("z^3 - z*t^2")
    loop = user_loop([-1 + 0.5j, 1 + 0.5j, 1 + 1j, -1 + 1j])
    opts = create_engine_options(seed=0, lambda_override=1)
    with pytest.raises(LambdaExhaustedError) as info:
        loop_braid(f, loop, opts)
    assert info.value.attempts == 1
    assert info.value.witness["error"] == "ImproperCrossingError"


def test_progress_counts_loops(two_branch, opts):
    class Counter:
        def __init__(self):
            self.count = 0

        def update(self, k):
            self.count += k

        def reset(self):
            self.count = 0

    counter = Counter()
    braid_generators(two_branch, opts, progress=counter)
    assert counter.count == 2


def test_big_loop_matches_composed_generators(not_generated, opts):
    report = braid_generators(not_generated, opts)
    assert report.lam == 1
    big = big_loop_permutation(not_generated, report.branch, report.base, opts)
    assert composed_monodromy(report) == big


# =========================================================
# USER LOOPS
# =========================================================

@pytest.mark.asyncio
async def test_triangle_loop(cusp):
    report = await aloop_braid(cusp, example_loop("triangle"))
    assert format_word(report.word) == "s2 s1 s2 s1"
    moduli = [abs(t) for t in cross_locus(report)]
    assert moduli == pytest.approx([0.527, 0.510, 0.667, 0.755], abs=5e-2)
    assert report.approach.is_identity_word()
    assert report.core == report.reduced_word


def test_loop_around_nothing(cusp):
    report = loop_braid(cusp, user_loop([2, 3, 3 + 1j, 2 + 1j]))
    assert report.perm.is_identity()
    assert exponent_sum(report.word) == 0


# =========================================================
# RESTRICTION TO A LINE
# =========================================================

def test_restrict_to_given_line():
    F = parse_multivariate("z^2 - u1*u2", ("z", "u1", "u2"))
    f = restrict_to_line(F, u0=[1, 0], v=[0, 1])
    assert f == parse_poly("z^2 - t")


def test_restrict_to_drawn_line():
    F = parse_multivariate("u1*z^2 + u2*z + 1", ("z", "u1", "u2"))
    f = restrict_to_line(F, seed=3)
    assert f.degz == 2
    assert f == restrict_to_line(F, seed=3)


def test_restrict_errors():
    F = parse_multivariate("u1*z^2 + u2*z + 1", ("z", "u1", "u2"))
    with pytest.raises(NonGenericLineError):
        restrict_to_line(F, u0=[0, 0], v=[0, 1])
    with pytest.raises(ValueError):
        restrict_to_line(F, u0=[0, 0, 0], v=[0, 1, 0])
    with pytest.raises(ValueError):
        restrict_to_line(F, u0=[1, 0], v=[0, 0])
    with pytest.raises(DegreeError):
        restrict_to_line(parse_multivariate("u1 + 1", ("z", "u1")))


# =========================================================
# REPORT VERIFICATION
# =========================================================

@pytest.fixture
def cusp_report(cusp, opts):
    return json.loads(json.dumps(braid_generators(cusp, opts).to_dict()))


def test_verify_accepts_own_report(cusp_report):
    assert verify_report(cusp_report) == []


def test_verify_catches_flipped_sign(cusp_report):
    crossing = cusp_report["generators"][0]["crossings"][0]
    crossing["sign"] = -crossing["sign"]
    failures = verify_report(cusp_report)
    assert any("wrong sign" in msg for msg in failures)
    assert any("does not match its crossings" in msg for msg in failures)


def test_verify_catches_moved_crossing(cusp_report):
    cusp_report["generators"][0]["crossings"][0]["s"] += 0.01
    failures = verify_report(cusp_report)
    assert any("residual" in msg for msg in failures)


def test_verify_catches_wrong_core(cusp_report):
    cusp_report["generators"][0]["core"] = "s1"
    assert any("core" in msg for msg in verify_report(cusp_report))


def test_verify_rejects_malformed():
    with pytest.raises(ReportFormatError):
        verify_report({"n": 3})
    with pytest.raises(ReportFormatError):
        verify_report({"n": 3, "lambda": [1, 0], "generators": [], "source": {"kind": "x"}})


# =========================================================
# ENGINE
# =========================================================

def test_engine_records_runs(cusp):
    engine = create_engine(seed=0)
    ok = engine.run_curve(cusp)
    bad = engine.run_curve(parse_poly("(z - t)^2"))
    assert ok["status"] == "completed"
    assert ok["result"]["generators"][0]["core"] == "s2 s1 s2 s1"
    assert bad["status"] == "error"
    assert bad["error"] == "DegenerateDiscriminantError"
    assert engine.get_status() == {"runs": 2, "completed": 1, "failed": 1,
                                   "seed": 0, "workers": None}
    assert engine.get_run_history(limit=1) == [bad]


def test_engine_dispatch(cusp):
    engine = create_engine(seed=1)
    result = engine.run("loop", cusp, example_loop("triangle"))
    assert result["status"] == "completed"
    assert result["result"]["word"] == "s2 s1 s2 s1"
    with pytest.raises(ValueError):
        engine.run("surface", cusp)


@pytest.mark.asyncio
async def test_engine_async_raising_path(two_branch):
    engine = create_engine(seed=0)
    report = await engine.abraid_generators(two_branch)
    assert len(report.generators) == 2
    assert engine.run_history == []
