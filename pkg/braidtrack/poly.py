"""
Complex polynomials in one and two variables.

KEY CONCEPT: THE CURVE AS A COEFFICIENT MATRIX
==============================================
A plane curve C is the zero set of f(z, t) = sum a[i][j] z^i t^j.
Everything downstream only ever needs a handful of things from f:
1. Evaluation at many (z, t) pairs (the tracker, the crossing oracle)
2. Formal partial derivatives in z and t (predictor, Newton, discriminant)
3. Conjugate coefficients g = conj(a) (the real/imaginary split system)
4. The rotation f(lambda*z, t) used to make crossings generic
5. The fiber over a point: all roots of the univariate f(., t0)

BivariatePoly is a dense numpy matrix (degrees are small here).
MultivariatePoly is a sparse term map, used by the parser and by
hypersurfaces in several u-variables that get restricted to a line.
"""

from functools import lru_cache
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union
import logging

import numpy as np
from numpy.polynomial import polynomial as npoly
from pyparsing import (
    Forward,
    Literal,
    ParseBaseException,
    ParseFatalException,
    Regex,
    StringEnd,
    Suppress,
    ZeroOrMore,
    one_of,
)

from .errors import DegreeError, PolynomialParseError, RootSolveError

logger = logging.getLogger(__name__)

Number = Union[int, float, complex]

_EPS = np.finfo(float).eps


# =========================================================
# POLYNOMIAL TYPES
# =========================================================

def _trim_matrix(arr: np.ndarray) -> np.ndarray:
    """Drop trailing all-zero rows and columns, keeping at least 1x1."""
    rows = np.flatnonzero(np.any(arr != 0, axis=1))
    cols = np.flatnonzero(np.any(arr != 0, axis=0))
    if rows.size == 0:
        return np.zeros((1, 1), dtype=complex)
    return arr[: rows[-1] + 1, : cols[-1] + 1]


class BivariatePoly:
    """
    f(z, t) with coefficients a[i][j] of z^i t^j.

    The matrix is trimmed of trailing zero rows/columns, so ``degz`` and
    ``degt`` are the true degrees. Instances are immutable.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Any):
        arr = np.array(coeffs, dtype=complex)
        if arr.ndim == 1:
            arr = arr[:, None]
        if arr.ndim != 2 or arr.size == 0:
            raise DegreeError("coefficient matrix must be a non-empty 2-D array")
        if not np.all(np.isfinite(arr)):
            raise ValueError("coefficients must be finite")
        arr = _trim_matrix(arr).copy()
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)

    def __setattr__(self, name: str, value: Any) -> None:
        raise AttributeError("BivariatePoly is immutable")

    @property
    def degz(self) -> int:
        return self.coeffs.shape[0] - 1

    @property
    def degt(self) -> int:
        return self.coeffs.shape[1] - 1

    def is_zero(self) -> bool:
        return not np.any(self.coeffs)

    def __call__(self, z: Any, t: Any) -> Any:
        return evaluate(self, z, t)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BivariatePoly):
            return NotImplemented
        return np.array_equal(self.coeffs, other.coeffs)

    def __hash__(self) -> int:
        return hash(self.coeffs.tobytes())

    def __repr__(self) -> str:
        return f"BivariatePoly({format_poly(self)!r})"


class UnivariatePoly:
    """p(z) with ascending coefficients; leading exact zeros are dropped."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[Number]):
        arr = np.array(list(coeffs) if not isinstance(coeffs, np.ndarray) else coeffs,
                       dtype=complex).ravel()
        if not np.all(np.isfinite(arr)):
            raise ValueError("coefficients must be finite")
        nz = np.flatnonzero(arr)
        arr = arr[: nz[-1] + 1].copy() if nz.size else np.zeros(1, dtype=complex)
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)

    def __setattr__(self, name: str, value: Any) -> None:
        raise AttributeError("UnivariatePoly is immutable")

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    def is_zero(self) -> bool:
        return not np.any(self.coeffs)

    def __call__(self, z: Any) -> Any:
        return npoly.polyval(z, self.coeffs)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, UnivariatePoly):
            return NotImplemented
        return np.array_equal(self.coeffs, other.coeffs)

    def __hash__(self) -> int:
        return hash(self.coeffs.tobytes())

    def __repr__(self) -> str:
        return f"UnivariatePoly({self.coeffs.tolist()!r})"


Exponent = Tuple[int, ...]


class MultivariatePoly:
    """
    Sparse polynomial in z and m further variables.

    ``terms`` maps an exponent tuple (e_z, e_1, ..., e_m) to its
    coefficient. Zero coefficients are never stored.
    """

    __slots__ = ("terms", "m", "names")

    def __init__(self, terms: Dict[Exponent, Number], m: int,
                 names: Optional[Sequence[str]] = None):
        clean: Dict[Exponent, complex] = {}
        for exps, c in terms.items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != m + 1:
                raise DegreeError(f"exponent tuple {exps} does not have length {m + 1}")
            if any(e < 0 for e in exps):
                raise DegreeError(f"negative exponent in {exps}")
            c = complex(c)
            if c != 0:
                clean[exps] = clean.get(exps, 0j) + c
                if clean[exps] == 0:
                    del clean[exps]
        object.__setattr__(self, "terms", clean)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "names", tuple(names) if names else
                           ("z",) + tuple(f"u{k + 1}" for k in range(m)))

    def __setattr__(self, name: str, value: Any) -> None:
        raise AttributeError("MultivariatePoly is immutable")

    @classmethod
    def constant(cls, value: Number, m: int,
                 names: Optional[Sequence[str]] = None) -> "MultivariatePoly":
        return cls({(0,) * (m + 1): value}, m, names)

    @classmethod
    def variable(cls, index: int, m: int,
                 names: Optional[Sequence[str]] = None) -> "MultivariatePoly":
        exps = [0] * (m + 1)
        exps[index] = 1
        return cls({tuple(exps): 1.0}, m, names)

    def degree(self, index: int = 0) -> int:
        """Degree in one variable (index 0 is z); -1 for the zero polynomial."""
        return max((e[index] for e in self.terms), default=-1)

    def constant_value(self) -> Optional[complex]:
        """The value if this is a constant polynomial, else None."""
        if not self.terms:
            return 0j
        if set(self.terms) == {(0,) * (self.m + 1)}:
            return self.terms[(0,) * (self.m + 1)]
        return None

    def _coerce(self, other: Any) -> "MultivariatePoly":
        if isinstance(other, MultivariatePoly):
            if other.m != self.m:
                raise DegreeError("variable counts differ")
            return other
        return MultivariatePoly.constant(other, self.m, self.names)

    def __add__(self, other: Any) -> "MultivariatePoly":
        other = self._coerce(other)
        terms = dict(self.terms)
        for e, c in other.terms.items():
            terms[e] = terms.get(e, 0j) + c
        return MultivariatePoly(terms, self.m, self.names)

    __radd__ = __add__

    def __neg__(self) -> "MultivariatePoly":
        return MultivariatePoly({e: -c for e, c in self.terms.items()}, self.m, self.names)

    def __sub__(self, other: Any) -> "MultivariatePoly":
        return self + (-self._coerce(other))

    def __rsub__(self, other: Any) -> "MultivariatePoly":
        return self._coerce(other) - self

    def __mul__(self, other: Any) -> "MultivariatePoly":
        other = self._coerce(other)
        terms: Dict[Exponent, complex] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                terms[e] = terms.get(e, 0j) + c1 * c2
        return MultivariatePoly(terms, self.m, self.names)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "MultivariatePoly":
        if not isinstance(k, (int, np.integer)) or k < 0:
            raise DegreeError("exponent must be a non-negative integer")
        result = MultivariatePoly.constant(1.0, self.m, self.names)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MultivariatePoly):
            return NotImplemented
        return self.m == other.m and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.m, frozenset(self.terms.items())))

    def __repr__(self) -> str:
        return f"MultivariatePoly({self.terms!r}, m={self.m})"

    def to_bivariate(self) -> BivariatePoly:
        """Dense form of a polynomial in (z, t); requires m == 1."""
        if self.m != 1:
            raise DegreeError(f"expected one parameter variable, got {self.m}")
        degz = max(self.degree(0), 0)
        degt = max(self.degree(1), 0)
        arr = np.zeros((degz + 1, degt + 1), dtype=complex)
        for (i, j), c in self.terms.items():
            arr[i, j] = c
        return BivariatePoly(arr)


# =========================================================
# EVALUATION AND TRANSFORMS
# =========================================================

def evaluate(f: BivariatePoly, z: Any, t: Any) -> Any:
    """f(z, t); z and t broadcast against each other."""
    z_arr, t_arr = np.broadcast_arrays(np.asarray(z, dtype=complex),
                                       np.asarray(t, dtype=complex))
    value = npoly.polyval2d(z_arr, t_arr, f.coeffs)
    if np.ndim(value) == 0:
        return complex(value)
    return value


def eval_scale(f: BivariatePoly, z: Any, t: Any) -> Any:
    """sum |a_ij| |z|^i |t|^j, the natural scale for relative residuals."""
    z_arr, t_arr = np.broadcast_arrays(np.abs(np.asarray(z, dtype=complex)),
                                       np.abs(np.asarray(t, dtype=complex)))
    value = npoly.polyval2d(z_arr, t_arr, np.abs(f.coeffs))
    if np.ndim(value) == 0:
        return float(value)
    return value


def d_dz(f: BivariatePoly) -> BivariatePoly:
    """Partial derivative in z."""
    return BivariatePoly(npoly.polyder(f.coeffs, axis=0))


def d_dt(f: BivariatePoly) -> BivariatePoly:
    """Partial derivative in t."""
    return BivariatePoly(npoly.polyder(f.coeffs, axis=1))


def conj_poly(f: BivariatePoly) -> BivariatePoly:
    """The polynomial with conjugated coefficients, so conj(f(z, t)) = conj_poly(f)(conj z, conj t)."""
    return BivariatePoly(np.conj(f.coeffs))


def scale_z(f: BivariatePoly, lam: complex) -> BivariatePoly:
    """f(lam * z, t): row i is multiplied by lam**i."""
    if lam == 0:
        raise ValueError("lambda must be non-zero")
    powers = np.power(complex(lam), np.arange(f.degz + 1))
    return BivariatePoly(f.coeffs * powers[:, None])


def restrict_t(f: BivariatePoly, t0: complex) -> UnivariatePoly:
    """z -> f(z, t0)."""
    p = UnivariatePoly(npoly.polyval(complex(t0), f.coeffs.T))
    if p.is_zero():
        raise DegreeError(f"f(z, {t0}) vanishes identically")
    return p


# =========================================================
# ROOT FINDING (Aberth-Ehrlich)
# =========================================================

def fujiwara_bound(coeffs: np.ndarray) -> float:
    """Upper bound on root moduli of an ascending-coefficient polynomial."""
    a = coeffs / coeffs[-1]
    n = a.size - 1
    terms = [abs(a[n - k]) ** (1.0 / k) for k in range(1, n)]
    terms.append(abs(a[0] / 2.0) ** (1.0 / n))
    return 2.0 * max(terms)


def backward_error(coeffs: np.ndarray, z: np.ndarray) -> np.ndarray:
    """|p(z)| / sum |a_k| |z|^k, componentwise."""
    num = np.abs(npoly.polyval(z, coeffs))
    den = npoly.polyval(np.abs(z), np.abs(coeffs))
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(den > 0, num / den, num)


def roots(p: UnivariatePoly, tol: float = 1e-12, max_iter: int = 200) -> List[complex]:
    """
    All roots of p by simultaneous Aberth-Ehrlich iteration.

    Multiple roots come back once per multiplicity (as a tight cluster).
    Convergence is declared per root when its backward error drops below
    ``tol`` (floored at a few ulps times the degree).

    Raises:
        DegreeError: if deg p < 1
        RootSolveError: if some root has not converged after max_iter
    """
    c = p.coeffs
    if p.degree < 1:
        raise DegreeError("root finding needs degree >= 1")

    # exact zero roots are split off so the circle start has positive radius
    zero_count = int(np.flatnonzero(c)[0])
    c = c[zero_count:]
    deg = c.size - 1
    found = [0j] * zero_count
    if deg == 0:
        return found
    if deg == 1:
        return found + [complex(-c[0] / c[1])]

    a = c / c[-1]
    da = npoly.polyder(a)
    tol_eff = max(tol, 4.0 * deg * _EPS)

    radius = fujiwara_bound(a)
    k = np.arange(deg)
    z = radius * np.exp(1j * (2.0 * np.pi * k / deg + 0.4))
    converged = np.zeros(deg, dtype=bool)

    for iteration in range(max_iter):
        converged = backward_error(a, z) <= tol_eff
        if converged.all():
            logger.debug("aberth converged in %d iterations (deg %d)", iteration, deg)
            return found + [complex(r) for r in z]
        pv = npoly.polyval(z, a)
        dv = npoly.polyval(z, da)
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, np.inf)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = pv / dv
            repulsion = np.sum(1.0 / diff, axis=1)
            step = ratio / (1.0 - ratio * repulsion)
        bad = ~np.isfinite(step)
        if bad.any():
            # stalled on a critical point; nudge those iterates
            step[bad] = -1e-3 * radius * np.exp(1j * (k[bad] + 1.0))
        z = np.where(converged, z, z - step)

    residuals = backward_error(a, z)
    if np.all(residuals <= tol_eff):
        return found + [complex(r) for r in z]
    raise RootSolveError(
        f"Aberth iteration did not converge in {max_iter} steps (degree {deg})",
        residuals=[float(r) for r in residuals],
    )


# =========================================================
# PARSING
# =========================================================

def _number_action(variables: Tuple[str, ...]):
    m = len(variables) - 1

    def action(toks):
        text = toks[0]
        if text.endswith("i"):
            return MultivariatePoly.constant(complex(0.0, float(text[:-1])), m, variables)
        return MultivariatePoly.constant(float(text), m, variables)

    return action


def _identifier_action(variables: Tuple[str, ...]):
    m = len(variables) - 1

    def action(s, loc, toks):
        name = toks[0]
        if name == "i":
            return MultivariatePoly.constant(1j, m, variables)
        if name not in variables:
            raise ParseFatalException(s, loc, f"unknown variable '{name}'")
        return MultivariatePoly.variable(variables.index(name), m, variables)

    return action


def _power_action(s, loc, toks):
    if len(toks) == 1:
        return toks[0]
    base, _, exponent = toks
    value = exponent.constant_value()
    if value is None or value.imag != 0 or value.real < 0 or value.real != int(value.real):
        raise ParseFatalException(s, loc, "exponent must be a non-negative integer constant")
    return base ** int(value.real)


def _unary_action(toks):
    sign, operand = toks
    return -operand if sign == "-" else operand


def _product_action(s, loc, toks):
    result = toks[0]
    for op, operand in zip(toks[1::2], toks[2::2]):
        if op == "*":
            result = result * operand
        else:
            divisor = operand.constant_value()
            if divisor is None or divisor == 0:
                raise ParseFatalException(s, loc, "division only by a non-zero constant")
            result = result * (1.0 / divisor)
    return result


def _sum_action(toks):
    result = toks[0]
    for op, operand in zip(toks[1::2], toks[2::2]):
        result = result + operand if op == "+" else result - operand
    return result


@lru_cache(maxsize=16)
def _grammar(variables: Tuple[str, ...]):
    """
    expr   := term (('+' | '-') term)*
    term   := signed (('*' | '/') signed)*
    signed := ('+' | '-') signed | power
    power  := atom ('^' | '**') signed        (right-associative)
    atom   := number | identifier | '(' expr ')'
    """
    expr = Forward()
    signed = Forward()

    number = Regex(r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?i?")
    number.set_parse_action(_number_action(variables))
    identifier = Regex(r"[A-Za-z_][A-Za-z_0-9]*")
    identifier.set_parse_action(_identifier_action(variables))

    atom = number | identifier | (Suppress("(") + expr + Suppress(")"))
    expop = Literal("**").set_parse_action(lambda: "^") | Literal("^")
    power = (atom + (expop + signed)[0, 1]).set_parse_action(_power_action)
    signed <<= (one_of("+ -") + signed).set_parse_action(_unary_action) | power
    term = (signed + ZeroOrMore(one_of("* /") + signed)).set_parse_action(_product_action)
    expr <<= (term + ZeroOrMore(one_of("+ -") + term)).set_parse_action(_sum_action)
    return expr + StringEnd()


def parse_multivariate(source: str, variables: Sequence[str]) -> MultivariatePoly:
    """
    Parse text in the given variables; ``variables[0]`` plays the role of z.

    ``i`` is the imaginary unit (also as a suffix: ``2.5i``) and may not be
    used as a variable name.
    """
    variables = tuple(variables)
    if "i" in variables:
        raise ValueError("'i' is reserved for the imaginary unit")
    if not source or not source.strip():
        raise PolynomialParseError("empty expression", 0, source or "")
    try:
        result = _grammar(variables).parse_string(source, parse_all=True)
    except ParseBaseException as err:
        raise PolynomialParseError(err.msg, err.loc, source) from None
    return result[0]


def parse_poly(source: str) -> BivariatePoly:
    """
    Parse a curve equation in z and t.

    Raises:
        PolynomialParseError: on syntax errors or unknown variables
        DegreeError: if the expression does not involve z
    """
    f = parse_multivariate(source, ("z", "t")).to_bivariate()
    if f.degz < 1:
        raise DegreeError(f"'{source}' has z-degree 0")
    return f


# =========================================================
# PRINTING AND SERIALIZATION
# =========================================================

def _format_coeff(c: complex) -> str:
    if c.imag == 0:
        return repr(float(c.real))
    if c.real == 0:
        return f"{float(c.imag)!r}i" if c.imag > 0 else f"-{float(-c.imag)!r}i"
    sign = "+" if c.imag > 0 else "-"
    return f"({float(c.real)!r} {sign} {float(abs(c.imag))!r}i)"


def format_term(c: complex, exps: Sequence[int], names: Sequence[str]) -> str:
    monomial = "*".join(
        name if e == 1 else f"{name}^{e}" for name, e in zip(names, exps) if e > 0
    )
    if not monomial:
        return _format_coeff(c)
    if c == 1:
        return monomial
    if c == -1:
        return f"-{monomial}"
    return f"{_format_coeff(c)}*{monomial}"


def _join_terms(parts: List[str]) -> str:
    if not parts:
        return "0"
    text = parts[0]
    for part in parts[1:]:
        text += f" - {part[1:]}" if part.startswith("-") else f" + {part}"
    return text


def format_poly(f: BivariatePoly) -> str:
    """Re-parseable text, highest z-degree first; floats use repr."""
    parts = []
    for i in range(f.degz, -1, -1):
        for j in range(f.degt, -1, -1):
            c = complex(f.coeffs[i, j])
            if c != 0:
                parts.append(format_term(c, (i, j), ("z", "t")))
    return _join_terms(parts)


def format_multivariate(F: MultivariatePoly) -> str:
    parts = [format_term(c, e, F.names) for e, c in sorted(F.terms.items(), reverse=True)]
    return _join_terms(parts)


def complex_to_json(c: complex) -> List[float]:
    """[re, im] pair for JSON."""
    return [float(complex(c).real), float(complex(c).imag)]


def complex_from_json(value: Any) -> complex:
    """Accepts a real number or an [re, im] pair."""
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    raise ValueError(f"not a complex number: {value!r}")


def poly_to_dict(f: BivariatePoly) -> Dict[str, Any]:
    """Degrees plus the coefficient matrix, rows by z-degree."""
    return {
        "degz": f.degz,
        "degt": f.degt,
        "coeffs": [[complex_to_json(c) for c in row] for row in f.coeffs],
    }


def poly_from_dict(data: Dict[str, Any]) -> BivariatePoly:
    rows = [[complex_from_json(c) for c in row] for row in data["coeffs"]]
    f = BivariatePoly(rows)
    if (f.degz, f.degt) != (data.get("degz", f.degz), data.get("degt", f.degt)):
        raise DegreeError("declared degrees do not match the coefficient matrix")
    return f
