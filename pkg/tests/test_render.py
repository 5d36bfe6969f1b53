import pytest

from braidtrack.braid import identity_word, parse_word
from braidtrack.branchlocus import make_branch_set
from braidtrack.looper import choose_base, keyhole_loop
from braidtrack.render import render, render_ascii, render_loops_svg, tikz_picture, tikz_tokens


def test_tikz_tokens():
    w = parse_word("s2 s1 s2 s1", 3)
    assert tikz_tokens(w) == "a_{2} a_{1} a_{2} a_{1}"
    assert render(parse_word("s2 s1^-1", 3), "tikz") == "a_{2} a_{1}^{-1}\n"


def test_tikz_tokens_parse_back():
    w = parse_word("s3 s1^-1 s2", 4)
    assert parse_word(tikz_tokens(w), 4) == w


def test_tikz_picture():
    out = tikz_picture(parse_word("s1", 2))
    assert out == (
        "\\begin{tikzpicture}\n"
        "\\braid[number of strands=2] a_{1};\n"
        "\\end{tikzpicture}\n"
    )


def test_ascii_identity():
    assert render_ascii(identity_word(4)) == "--\n\n\n--\n\n\n--\n\n\n--\n"


def test_ascii_sign_changes_middle_rows():
    pos = render_ascii(parse_word("s1", 2)).splitlines()
    neg = render_ascii(parse_word("s1^-1", 2)).splitlines()
    assert pos[0] == neg[0] == "--\\ /-"
    assert pos[3] == neg[3] == "--/ \\-"
    assert pos[1].strip() == "\\"
    assert neg[1].strip() == "/"


def test_ascii_is_deterministic():
    w = parse_word("s2 s1 s2 s1", 3)
    assert render(w) == render(w, "ascii")
    assert len(render(w).splitlines()) == 7


def test_svg_depends_on_sign():
    pos = render(parse_word("s1", 2), "svg")
    neg = render(parse_word("s1^-1", 2), "svg")
    assert pos.startswith("<svg")
    assert pos != neg
    assert pos.count("<line") == neg.count("<line")


def test_unknown_format():
    with pytest.raises(ValueError):
        render(identity_word(2), "png")


def test_loops_svg():
    branch = make_branch_set([-3, 1])
    base = choose_base(branch)
    loops = [keyhole_loop(branch, k, base) for k in range(len(branch))]
    out = render_loops_svg(branch, loops)
    assert out.count("<circle") == 2
    assert out.count("<polyline") == 2
    assert out.count("<rect") == 1
