import pytest

from braidtrack.braid import (
    BACKWARD,
    BRAID,
    COMMUTE,
    FORWARD,
    BraidWord,
    Permutation,
    applicable_moves,
    conjugate,
    exponent_sum,
    format_word,
    free_reduce,
    identity_word,
    invert,
    parse_word,
    permutation,
    relation_move,
    word_from_dict,
    word_to_dict,
)
from braidtrack.errors import RelationMismatchError, WordSyntaxError


def random_word(rng, n, length):
    return BraidWord(n, tuple((int(rng.integers(1, n)), int(rng.choice([-1, 1])))
                              for _ in range(length)))


def test_cusp_word_permutation():
    w = parse_word("s2 s1 s2 s1", 3)
    assert permutation(w).to_list() == [2, 3, 1]
    assert permutation(w).cycles() == [(1, 2, 3)]


def test_single_letters():
    assert permutation(parse_word("s2", 4)).to_list() == [1, 3, 2, 4]
    assert permutation(parse_word("s1 s3", 4)).to_list() == [2, 1, 4, 3]
    assert permutation(identity_word(5)).is_identity()


def test_permutation_compose_matches_concatenation():
    a, b = parse_word("s1 s2", 3), parse_word("s2", 3)
    assert permutation(a).compose(permutation(b)) == permutation(a * b)
    p = permutation(a)
    assert p.compose(p.inverse()).is_identity()


def test_permutation_rejects_non_bijection():
    with pytest.raises(ValueError):
        Permutation((1, 1, 2))


def test_parse_and_format():
    w = parse_word("s3^-1 s4")
    assert w.n == 5
    assert w.letters == ((3, -1), (4, 1))
    assert format_word(w) == "s3^-1 s4"
    assert format_word(identity_word(3)) == ""
    assert parse_word("s2^3", 3).letters == ((2, 1),) * 3
    assert parse_word("", 4) == identity_word(4)


def test_parse_figure_tokens():
    assert parse_word("a_{2} a_{1}^{-1}", 3).letters == ((2, 1), (1, -1))
    assert parse_word("a_3-a_1 a_5 a_1^{-1}", 6).letters == ((3, 1), (1, 1), (5, 1), (1, -1))


@pytest.mark.parametrize("text", ["s0", "x1", "s2^", "s1 s", "s3"])
def test_parse_errors(text):
    with pytest.raises(WordSyntaxError):
        parse_word(text, 3)


def test_word_validation():
    with pytest.raises(ValueError):
        BraidWord(3, ((3, 1),))
    with pytest.raises(ValueError):
        BraidWord(3, ((1, 2),))


def test_free_reduce():
    w = parse_word("s1 s2 s2^-1 s1^-1 s3", 4)
    assert free_reduce(w).letters == ((3, 1),)
    assert free_reduce(parse_word("s1 s1", 3)).letters == ((1, 1), (1, 1))


def test_conjugate_strips_back():
    core, g = parse_word("s2", 4), parse_word("s1 s3^-1", 4)
    w = conjugate(core, g)
    assert free_reduce(invert(g) * w * g) == core


def test_relation_moves():
    w = parse_word("s1 s2 s1", 3)
    moved = relation_move(w, 0, BRAID, FORWARD)
    assert moved == parse_word("s2 s1 s2", 3)
    assert relation_move(moved, 0, BRAID, BACKWARD) == w
    assert relation_move(parse_word("s1 s3", 4), 0, COMMUTE, FORWARD) == parse_word("s3 s1", 4)
    with pytest.raises(RelationMismatchError):
        relation_move(parse_word("s1 s2", 3), 0, COMMUTE, FORWARD)
    with pytest.raises(RelationMismatchError):
        relation_move(parse_word("s1 s2^-1 s1", 3), 0, BRAID, FORWARD)


def test_word_dict_form():
    w = parse_word("s2 s1 s2 s1", 3)
    assert word_to_dict(w) == {"n": 3, "letters": [[2, 1], [1, 1], [2, 1], [1, 1]]}
    assert word_from_dict(word_to_dict(w)) == w
    with pytest.raises(WordSyntaxError):
        word_from_dict({"letters": []})


def test_algebra_properties(rng):
    for _ in range(1000):
        n = int(rng.integers(2, 9))
        w = random_word(rng, n, int(rng.integers(0, 15)))
        reduced = free_reduce(w)
        assert free_reduce(reduced) == reduced
        assert invert(invert(w)) == w
        assert free_reduce(w * invert(w)).is_identity_word()
        assert permutation(reduced) == permutation(w)
        assert exponent_sum(reduced) == exponent_sum(w)


def test_relation_moves_preserve_observables(rng):
    for _ in range(50):
        n = int(rng.integers(3, 9))
        w = random_word(rng, n, 12)
        perm, esum = permutation(w), exponent_sum(w)
        for _ in range(100):
            moves = applicable_moves(w)
            if not moves:
                break
            pos, kind, direction = moves[int(rng.integers(len(moves)))]
            w = relation_move(w, pos, kind, direction)
        assert permutation(w) == perm
        assert exponent_sum(w) == esum
