"""
Braid words and their permutation images.

KEY CONCEPT: LETTERS ACT ON POSITIONS, LEFT TO RIGHT
====================================================
A word is a sequence of letters (i, sign) meaning sigma_i^sign on n strands.
Its permutation is obtained by starting from [1, 2, ..., n] and, for each
letter in order, swapping the entries at positions i and i+1 (1-based).
After the word, ``image[p]`` is the label of the strand sitting at
position p. This matches the way the crossing detector reorders the fiber
while it walks along a loop; the opposite convention silently inverts
3-cycles.

Word equality in the braid group is NOT decided here. Tests compare
observables (permutation, exponent sum, free reduction, rendering) and use
relation moves as equivalence witnesses.
"""

from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

from pyparsing import (
    Group,
    Optional as Opt,
    ParseBaseException,
    Regex,
    StringEnd,
    Suppress,
    ZeroOrMore,
)

from .errors import RelationMismatchError, WordSyntaxError

Letter = Tuple[int, int]


# =========================================================
# PERMUTATIONS
# =========================================================

@dataclass(frozen=True)
class Permutation:
    """A bijection of {1..n}; ``image[p]`` is the label at position p+1."""

    image: Tuple[int, ...]

    def __post_init__(self):
        image = tuple(int(v) for v in self.image)
        if sorted(image) != list(range(1, len(image) + 1)):
            raise ValueError(f"{list(image)} is not a permutation of 1..{len(image)}")
        object.__setattr__(self, "image", image)

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(1, n + 1)))

    @property
    def n(self) -> int:
        return len(self.image)

    def compose(self, other: "Permutation") -> "Permutation":
        """This permutation followed by ``other`` (word concatenation order)."""
        if other.n != self.n:
            raise ValueError("permutations act on different strand counts")
        return Permutation(tuple(self.image[k - 1] for k in other.image))

    def inverse(self) -> "Permutation":
        inv = [0] * self.n
        for pos, label in enumerate(self.image):
            inv[label - 1] = pos + 1
        return Permutation(tuple(inv))

    def is_identity(self) -> bool:
        return self.image == tuple(range(1, self.n + 1))

    def cycles(self) -> List[Tuple[int, ...]]:
        """Cycle decomposition (fixed points omitted), smallest element first."""
        seen = set()
        out = []
        for start in range(1, self.n + 1):
            if start in seen:
                continue
            cycle = [start]
            seen.add(start)
            nxt = self.image[start - 1]
            while nxt != start:
                cycle.append(nxt)
                seen.add(nxt)
                nxt = self.image[nxt - 1]
            if len(cycle) > 1:
                out.append(tuple(cycle))
        return out

    def parity(self) -> int:
        """0 for even, 1 for odd."""
        return sum(len(c) - 1 for c in self.cycles()) % 2

    def to_list(self) -> List[int]:
        return list(self.image)


# =========================================================
# BRAID WORDS
# =========================================================

@dataclass(frozen=True)
class BraidWord:
    n: int
    letters: Tuple[Letter, ...] = ()

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("a braid needs at least one strand")
        letters = tuple((int(i), int(e)) for i, e in self.letters)
        for i, e in letters:
            if not 1 <= i <= self.n - 1:
                raise ValueError(f"letter index {i} outside 1..{self.n - 1}")
            if e not in (1, -1):
                raise ValueError(f"letter sign must be +1 or -1, got {e}")
        object.__setattr__(self, "letters", letters)

    def __len__(self) -> int:
        return len(self.letters)

    def __str__(self) -> str:
        return format_word(self)

    def __mul__(self, other: "BraidWord") -> "BraidWord":
        return concat(self, other)

    def is_identity_word(self) -> bool:
        return not self.letters


def identity_word(n: int) -> BraidWord:
    return BraidWord(n, ())


def word_from_crossings(n: int, crossings: Iterable[Any]) -> BraidWord:
    """Letters (index, sign) in crossing order, without normalization."""
    letters = []
    for c in crossings:
        if not 1 <= c.index <= n - 1:
            raise ValueError(f"crossing index {c.index} out of range for {n} strands")
        letters.append((c.index, c.sign))
    return BraidWord(n, tuple(letters))


def concat(a: BraidWord, b: BraidWord) -> BraidWord:
    if a.n != b.n:
        raise ValueError("words on different strand counts")
    return BraidWord(a.n, a.letters + b.letters)


def free_reduce(w: BraidWord) -> BraidWord:
    """Cancel adjacent sigma_i sigma_i^-1 pairs until none remain."""
    stack: List[Letter] = []
    for letter in w.letters:
        if stack and stack[-1][0] == letter[0] and stack[-1][1] == -letter[1]:
            stack.pop()
        else:
            stack.append(letter)
    return BraidWord(w.n, tuple(stack))


def invert(w: BraidWord) -> BraidWord:
    return BraidWord(w.n, tuple((i, -e) for i, e in reversed(w.letters)))


def permutation(w: BraidWord) -> Permutation:
    image = list(range(1, w.n + 1))
    for i, _ in w.letters:
        image[i - 1], image[i] = image[i], image[i - 1]
    return Permutation(tuple(image))


def exponent_sum(w: BraidWord) -> int:
    return sum(e for _, e in w.letters)


def conjugate(core: BraidWord, g: BraidWord) -> BraidWord:
    """g * core * g^-1 as a raw (unreduced) word."""
    return concat(concat(g, core), invert(g))


# =========================================================
# RELATION MOVES
# =========================================================

BRAID = "braid"
COMMUTE = "commute"
FORWARD = "forward"
BACKWARD = "backward"


def relation_move(w: BraidWord, pos: int, kind: str, direction: str = FORWARD) -> BraidWord:
    """
    Apply one defining relation at letter position ``pos``.

    braid,   forward:  s_i s_{i+1} s_i -> s_{i+1} s_i s_{i+1}
    braid,   backward: s_{i+1} s_i s_{i+1} -> s_i s_{i+1} s_i
    commute, forward:  s_i s_j -> s_j s_i   for j >= i + 2
    commute, backward: s_j s_i -> s_i s_j   for j >= i + 2
    All letters of a braid move share one sign; commuting letters may have any.
    """
    if direction not in (FORWARD, BACKWARD):
        raise ValueError(f"unknown direction {direction!r}")
    letters = list(w.letters)
    if kind == BRAID:
        window = letters[pos:pos + 3]
        if pos < 0 or len(window) < 3:
            raise RelationMismatchError(f"no three letters at position {pos}")
        (a, ea), (b, eb), (c, ec) = window
        step = 1 if direction == FORWARD else -1
        if not (a == c and b == a + step and ea == eb == ec):
            raise RelationMismatchError(
                f"letters {window} at {pos} do not match the {direction} braid relation")
        letters[pos:pos + 3] = [(b, ea), (a, ea), (b, ea)]
    elif kind == COMMUTE:
        window = letters[pos:pos + 2]
        if pos < 0 or len(window) < 2:
            raise RelationMismatchError(f"no two letters at position {pos}")
        (a, ea), (b, eb) = window
        ok = b >= a + 2 if direction == FORWARD else a >= b + 2
        if not ok:
            raise RelationMismatchError(
                f"letters {window} at {pos} do not match the {direction} commutation")
        letters[pos:pos + 2] = [(b, eb), (a, ea)]
    else:
        raise ValueError(f"unknown relation kind {kind!r}")
    return BraidWord(w.n, tuple(letters))


def applicable_moves(w: BraidWord) -> List[Tuple[int, str, str]]:
    """Every (pos, kind, direction) that relation_move accepts on w."""
    moves = []
    letters = w.letters
    for pos in range(len(letters)):
        if pos + 1 < len(letters):
            (a, _), (b, _) = letters[pos], letters[pos + 1]
            if b >= a + 2:
                moves.append((pos, COMMUTE, FORWARD))
            elif a >= b + 2:
                moves.append((pos, COMMUTE, BACKWARD))
        if pos + 2 < len(letters):
            (a, ea), (b, eb), (c, ec) = letters[pos:pos + 3]
            if a == c and ea == eb == ec:
                if b == a + 1:
                    moves.append((pos, BRAID, FORWARD))
                elif b == a - 1:
                    moves.append((pos, BRAID, BACKWARD))
    return moves


# =========================================================
# TEXT AND JSON FORMS
# =========================================================

@lru_cache(maxsize=1)
def _word_grammar():
    """
    Accepts both "s2 s1^-1 s3" and the figure-token form "a_{2} a_{1}^{-1}"
    (also "a_3-a_1" for simultaneous letters).
    """
    integer = Regex(r"\d+")
    braced = Suppress("{") + integer + Suppress("}")
    index = integer | braced
    power = Regex(r"[+-]?\d+")
    exponent = Suppress("^") + (power | Suppress("{") + power + Suppress("}"))
    letter = Group(Suppress(Regex(r"s|a_")) + index + Opt(exponent, default="1"))
    separator = Suppress(Regex(r"[-,.*]"))
    return ZeroOrMore(letter + Opt(separator)) + StringEnd()


def parse_word(text: str, n: Optional[int] = None) -> BraidWord:
    """
    Parse compact word text. ``s2^3`` expands to three letters; ``s2^0``
    contributes none. When n is omitted it is the largest index plus one.
    """
    try:
        tokens = _word_grammar().parse_string(text or "", parse_all=True)
    except ParseBaseException as err:
        raise WordSyntaxError(f"bad braid word {text!r}: {err.msg} (at position {err.loc})") from None
    letters: List[Letter] = []
    for index_text, power_text in tokens:
        index, power = int(index_text), int(power_text)
        if index < 1:
            raise WordSyntaxError(f"letter index must be positive in {text!r}")
        sign = 1 if power > 0 else -1
        letters.extend([(index, sign)] * abs(power))
    if n is None:
        n = max((i for i, _ in letters), default=0) + 1
    if any(i > n - 1 for i, _ in letters):
        raise WordSyntaxError(f"{text!r} uses an index beyond {n - 1} for {n} strands")
    return BraidWord(n, tuple(letters))


def format_word(w: BraidWord) -> str:
    return " ".join(f"s{i}" if e > 0 else f"s{i}^-1" for i, e in w.letters)


def word_to_dict(w: BraidWord) -> Dict[str, Any]:
    return {"n": w.n, "letters": [[i, e] for i, e in w.letters]}


def word_from_dict(data: Dict[str, Any]) -> BraidWord:
    try:
        return BraidWord(int(data["n"]), tuple((int(i), int(e)) for i, e in data["letters"]))
    except (KeyError, TypeError, ValueError) as err:
        raise WordSyntaxError(f"bad braid word object: {err}") from None
