"""Exact rational / polynomial arithmetic and linear algebra.

Matrices are numpy arrays: ``dtype=object`` holding ``Fraction`` entries in
exact mode, ``complex128`` in numeric mode. A matrix never mixes the two.
Exact polynomial and echelon work is delegated to sympy over ``QQ``; numeric
mode stays in numpy.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Sequence, Union

import numpy as np
import sympy as sp
from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix

from errors import ConvergenceError, InputError

NUMERIC_TOLERANCE = 1e-9
ROOT_TOLERANCE = 1e-12
MAX_ROOT_ITERATIONS = 1000
# |p(z)| must stay below this fraction of sum |a_i| |z|^i
ROOT_RESIDUAL_FACTOR = 1e-8

Scalar = Union[Fraction, complex]
Matrix = np.ndarray


class Mode(str, Enum):
    EXACT = "exact"
    NUMERIC = "numeric"


# ------------------------------
# Scalars
# ------------------------------
def to_rational(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise InputError(f"not a rational number: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise InputError(f"not a rational number: {value!r}")
    if isinstance(value, float):
        # floats are only accepted when they are exactly representable
        return Fraction(value)
    raise InputError(f"not a rational number: {value!r}")


def to_scalar(value, mode: Mode) -> Scalar:
    if mode is Mode.EXACT:
        if isinstance(value, complex):
            raise InputError("complex value in exact mode")
        return to_rational(value)
    if isinstance(value, complex):
        return value
    if isinstance(value, str):
        text = value.strip()
        try:
            return complex(float(Fraction(text)))
        except (ValueError, ZeroDivisionError):
            pass
        try:
            return complex(text.replace(" ", ""))
        except ValueError:
            raise InputError(f"not a number: {value!r}")
    if isinstance(value, float):
        return complex(value)
    return complex(float(to_rational(value)))


def is_zero_scalar(value: Scalar, tol: float = NUMERIC_TOLERANCE, scale: float = 0.0) -> bool:
    if isinstance(value, complex):
        return abs(value) < tol * (1.0 + scale)
    return value == 0


def format_scalar(value: Scalar) -> str:
    if isinstance(value, complex):
        return f"{value.real:.12g}{value.imag:+.12g}j"
    return str(value)


# ------------------------------
# Polynomials
# ------------------------------
_X = sp.Symbol("x")


def _rational_from_sympy(value) -> Fraction:
    if isinstance(value, sp.Rational):
        return Fraction(int(value.p), int(value.q))
    # QQ domain elements (python or gmpy backed)
    return Fraction(int(value.numerator), int(value.denominator))


def _qq(value):
    q = to_rational(value)
    return QQ(q.numerator, q.denominator)


@dataclass(frozen=True)
class Polynomial:
    """Univariate polynomial over Q, coefficients lowest degree first.

    Arithmetic goes through ``sympy.Poly`` over ``QQ``; the tuple form is what
    the rest of the package stores, compares and hashes.
    """

    coeffs: tuple = ()

    def __post_init__(self):
        coeffs = [to_rational(c) for c in self.coeffs]
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        object.__setattr__(self, "coeffs", tuple(coeffs))

    @classmethod
    def x(cls) -> "Polynomial":
        return cls((0, 1))

    @classmethod
    def constant(cls, c) -> "Polynomial":
        return cls((c,))

    @classmethod
    def from_roots(cls, roots: Iterable) -> "Polynomial":
        result = cls.constant(1)
        for r in roots:
            result = result * cls((-to_rational(r), 1))
        return result

    @classmethod
    def from_sympy(cls, poly: sp.Poly) -> "Polynomial":
        return cls(tuple(_rational_from_sympy(c) for c in reversed(poly.all_coeffs())))

    def to_sympy(self) -> sp.Poly:
        high_first = [sp.Rational(c.numerator, c.denominator) for c in reversed(self.coeffs)]
        return sp.Poly(high_first or [0], _X, domain=QQ)

    @property
    def degree(self) -> int:
        # -1 for the zero polynomial
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def leading(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def __add__(self, other):
        return Polynomial.from_sympy(self.to_sympy() + _as_poly(other).to_sympy())

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        return Polynomial.from_sympy(self.to_sympy() - _as_poly(other).to_sympy())

    def __rsub__(self, other):
        return _as_poly(other) - self

    def __mul__(self, other):
        return Polynomial.from_sympy(self.to_sympy() * _as_poly(other).to_sympy())

    __rmul__ = __mul__

    def __call__(self, s):
        return poly_eval(self, s)

    def derivative(self) -> "Polynomial":
        return Polynomial.from_sympy(self.to_sympy().diff(_X))

    def divmod(self, other: "Polynomial") -> tuple["Polynomial", "Polynomial"]:
        if other.is_zero:
            raise ZeroDivisionError("polynomial division by zero")
        quot, rem = self.to_sympy().div(other.to_sympy())
        return Polynomial.from_sympy(quot), Polynomial.from_sympy(rem)

    def __mod__(self, other):
        return self.divmod(_as_poly(other))[1]

    def __floordiv__(self, other):
        return self.divmod(_as_poly(other))[0]

    def monic(self) -> "Polynomial":
        if self.is_zero:
            return self
        return Polynomial.from_sympy(self.to_sympy().monic())

    def compose(self, inner: "Polynomial") -> "Polynomial":
        return Polynomial.from_sympy(self.to_sympy().compose(inner.to_sympy()))

    def to_strings(self) -> list[str]:
        return [str(c) for c in self.coeffs]

    def format(self, var: str = "x") -> str:
        if self.is_zero:
            return "0"
        parts = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            if i == 0:
                body = str(mag)
            else:
                mono = var if i == 1 else f"{var}^{i}"
                body = mono if mag == 1 else f"{mag}*{mono}"
            parts.append((sign, body))
        first_sign, first_body = parts[0]
        text = ("-" if first_sign == "-" else "") + first_body
        for sign, body in parts[1:]:
            text += f" {sign} {body}"
        return text

    def __str__(self):
        return self.format()


def _as_poly(value) -> Polynomial:
    if isinstance(value, Polynomial):
        return value
    return Polynomial.constant(value)


def poly_eval(p: Polynomial, s):
    """Horner evaluation; exact for rational s, complex for complex s."""
    if isinstance(s, (complex, float)):
        acc = 0j
        for c in reversed(p.coeffs):
            acc = acc * s + float(c)
        return complex(acc)
    s = to_rational(s)
    acc = Fraction(0)
    for c in reversed(p.coeffs):
        acc = acc * s + c
    return acc


def poly_eval_matrix(p: Polynomial, m: Matrix) -> Matrix:
    n = m.shape[0]
    mode = mode_of(m)
    acc = zeros(n, n, mode)
    for c in reversed(p.coeffs):
        acc = mul(acc, m) + scalar_matrix(n, to_scalar(c, mode), mode)
    return acc


def poly_gcd(p: Polynomial, q: Polynomial) -> Polynomial:
    if p.is_zero and q.is_zero:
        raise InputError("gcd of two zero polynomials is undefined")
    return Polynomial.from_sympy(p.to_sympy().gcd(q.to_sympy())).monic()


def is_square_free(p: Polynomial) -> bool:
    if p.is_zero:
        raise InputError("square-freeness of the zero polynomial is undefined")
    return p.to_sympy().is_sqf


def rational_roots(p: Polynomial) -> list[Fraction]:
    """All rational roots of p, repeated by multiplicity, sorted ascending.

    Read off the linear factors of the factorization over Q, so the cost does
    not depend on the size of the constant term.
    """
    if p.is_zero:
        raise InputError("the zero polynomial has every number as a root")

    roots: list[Fraction] = []
    _, factors = p.to_sympy().factor_list()
    for factor, multiplicity in factors:
        if factor.degree() != 1:
            continue
        lead, const = factor.all_coeffs()
        roots.extend([_rational_from_sympy(-const / lead)] * multiplicity)
    return sorted(roots)


def complex_roots(
    p: Polynomial,
    tol: float = ROOT_TOLERANCE,
    max_iter: int = MAX_ROOT_ITERATIONS,
) -> list[complex]:
    """Approximate all deg p roots by Aberth simultaneous iteration."""
    if p.degree < 1:
        raise InputError("complex_roots needs a polynomial of degree >= 1")
    if tol <= 0:
        raise InputError("tolerance must be positive")

    coeffs = np.array([complex(float(c)) for c in reversed(p.coeffs)])
    coeffs = coeffs / coeffs[0]
    n = len(coeffs) - 1
    if n == 1:
        return [complex(-coeffs[1])]

    deriv = np.polyder(coeffs)
    radius = 1.0 + float(np.max(np.abs(coeffs[1:])))
    angles = 2.0 * np.pi * np.arange(n) / n + 0.4
    z = radius * np.exp(1j * angles)

    converged = False
    for _ in range(max_iter):
        pv = np.polyval(coeffs, z)
        dpv = np.polyval(deriv, z)
        dpv = np.where(dpv == 0, 1e-300, dpv)
        ratio = pv / dpv

        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, 1.0)
        inv = 1.0 / diff
        np.fill_diagonal(inv, 0.0)
        correction = ratio / (1.0 - ratio * inv.sum(axis=1))

        z = z - correction
        if np.all(np.abs(correction) <= tol * (1.0 + np.abs(z))):
            converged = True
            break

    roots = [complex(r) for r in z]
    if not converged:
        raise ConvergenceError(
            f"root iteration did not converge after {max_iter} steps",
            partial_roots=roots,
        )

    abs_coeffs = np.abs(coeffs)
    residual = np.abs(np.polyval(coeffs, z))
    bound = ROOT_RESIDUAL_FACTOR * np.polyval(abs_coeffs, np.abs(z))
    if np.any(residual > bound):
        raise ConvergenceError("root residual above bound", partial_roots=roots)

    return sorted(roots, key=lambda r: (round(r.real, 9), round(r.imag, 9)))


# ------------------------------
# Matrices
# ------------------------------
def mode_of(m: Matrix) -> Mode:
    return Mode.EXACT if m.dtype == object else Mode.NUMERIC


def zeros(rows: int, cols: int, mode: Mode = Mode.EXACT) -> Matrix:
    if mode is Mode.EXACT:
        return np.full((rows, cols), Fraction(0), dtype=object)
    return np.zeros((rows, cols), dtype=complex)


def scalar_matrix(n: int, s: Scalar, mode: Mode = Mode.EXACT) -> Matrix:
    m = zeros(n, n, mode)
    for i in range(n):
        m[i, i] = s
    return m


def identity(n: int, mode: Mode = Mode.EXACT) -> Matrix:
    return scalar_matrix(n, to_scalar(1, mode), mode)


def matrix(rows: Sequence[Sequence], mode: Mode = Mode.EXACT, shape: tuple[int, int] | None = None) -> Matrix:
    rows = [list(r) for r in rows]
    if shape is None:
        shape = (len(rows), len(rows[0]) if rows else 0)
    if len(rows) != shape[0] or any(len(r) != shape[1] for r in rows):
        raise InputError(f"matrix rows do not match shape {shape}")
    m = zeros(*shape, mode)
    for i, r in enumerate(rows):
        for j, v in enumerate(r):
            m[i, j] = to_scalar(v, mode)
    return m


def convert(m: Matrix, mode: Mode) -> Matrix:
    if mode_of(m) is mode:
        return m
    if mode is Mode.NUMERIC:
        out = zeros(*m.shape, mode)
        for idx, v in np.ndenumerate(m):
            out[idx] = complex(float(v))
        return out
    raise InputError("numeric matrices cannot be converted to exact ones")


def mul(a: Matrix, b: Matrix) -> Matrix:
    if a.shape[1] != b.shape[0]:
        raise InputError(f"cannot multiply {a.shape} by {b.shape}")
    if a.shape[1] == 0 or a.shape[0] == 0 or b.shape[1] == 0:
        return zeros(a.shape[0], b.shape[1], mode_of(a))
    return a @ b


def block_diag(a: Matrix, b: Matrix) -> Matrix:
    out = zeros(a.shape[0] + b.shape[0], a.shape[1] + b.shape[1], mode_of(a))
    out[: a.shape[0], : a.shape[1]] = a
    out[a.shape[0]:, a.shape[1]:] = b
    return out


def max_magnitude(m: Matrix):
    if m.size == 0:
        return Fraction(0) if mode_of(m) is Mode.EXACT else 0.0
    if mode_of(m) is Mode.EXACT:
        return max(abs(v) for v in m.flat)
    return float(np.max(np.abs(m)))


def is_zero_matrix(m: Matrix, tol: float = NUMERIC_TOLERANCE, scale: float = 0.0) -> bool:
    if m.size == 0:
        return True
    if mode_of(m) is Mode.EXACT:
        return all(v == 0 for v in m.flat)
    return max_magnitude(m) < tol * (1.0 + scale)


def _domain_matrix(m: Matrix) -> DomainMatrix:
    rows = [[_qq(v) for v in r] for r in m]
    return DomainMatrix(rows, m.shape, QQ)


def _exact_echelon(m: Matrix) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form over QQ; returns the nonzero rows and pivot columns."""
    if m.shape[0] == 0 or m.shape[1] == 0:
        return [], []
    reduced, pivots = _domain_matrix(m).rref()
    rows = reduced.to_Matrix().tolist()[: len(pivots)]
    return [[_rational_from_sympy(v) for v in row] for row in rows], list(pivots)


def _numeric_echelon(m: Matrix, tol: float) -> tuple[list[list[complex]], list[int]]:
    a = np.array(m, dtype=complex)
    n_rows, n_cols = a.shape
    scale = float(np.max(np.abs(a))) if a.size else 0.0
    eps = tol * (1.0 + scale)
    pivots: list[int] = []
    r = 0
    for c in range(n_cols):
        if r == n_rows:
            break
        piv = r + int(np.argmax(np.abs(a[r:, c])))
        if abs(a[piv, c]) < eps:
            a[r:, c] = 0
            continue
        a[[r, piv]] = a[[piv, r]]
        factors = a[r + 1:, c] / a[r, c]
        a[r + 1:, c:] -= np.outer(factors, a[r, c:])
        a[r + 1:, c] = 0
        pivots.append(c)
        r += 1
    return [list(row) for row in a[:r]], pivots


def _echelon(m: Matrix, tol: float):
    if mode_of(m) is Mode.EXACT:
        return _exact_echelon(m)
    return _numeric_echelon(m, tol)


def _divide(a, b):
    if isinstance(a, complex) or isinstance(b, complex):
        return a / b
    return Fraction(a) / b


def rank(m: Matrix, tol: float = NUMERIC_TOLERANCE) -> int:
    if mode_of(m) is Mode.EXACT:
        return _domain_matrix(m).rank() if m.size else 0
    return len(_numeric_echelon(m, tol)[1])


def kernel_basis(m: Matrix, tol: float = NUMERIC_TOLERANCE) -> Matrix:
    """Columns of the result form a basis of ker m."""
    mode = mode_of(m)
    n_cols = m.shape[1]
    rows, pivots = _echelon(m, tol)
    pivot_set = set(pivots)
    free = [c for c in range(n_cols) if c not in pivot_set]
    basis = zeros(n_cols, len(free), mode)
    zero = to_scalar(0, mode)
    for k, f in enumerate(free):
        x = [zero] * n_cols
        x[f] = to_scalar(1, mode)
        for t in range(len(pivots) - 1, -1, -1):
            p = pivots[t]
            s = sum((rows[t][c] * x[c] for c in range(p + 1, n_cols)), zero)
            x[p] = _divide(-s, rows[t][p])
        for i in range(n_cols):
            basis[i, k] = x[i]
    return basis


def solve_linear(a: Matrix, b: Matrix, tol: float = NUMERIC_TOLERANCE) -> Matrix | None:
    """Some X with a @ X == b, or None when the system is inconsistent."""
    if a.shape[0] != b.shape[0]:
        raise InputError(f"incompatible shapes {a.shape} and {b.shape}")
    mode = mode_of(a)
    n_cols = a.shape[1]
    n_rhs = b.shape[1]
    augmented = np.concatenate([a, convert(b, mode)], axis=1)
    rows, pivots = _echelon(augmented, tol)
    if any(p >= n_cols for p in pivots):
        return None

    zero = to_scalar(0, mode)
    x = zeros(n_cols, n_rhs, mode)
    for r in range(n_rhs):
        sol = [zero] * n_cols
        for t in range(len(pivots) - 1, -1, -1):
            p = pivots[t]
            s = rows[t][n_cols + r] - sum((rows[t][c] * sol[c] for c in range(p + 1, n_cols)), zero)
            sol[p] = _divide(s, rows[t][p])
        for i in range(n_cols):
            x[i, r] = sol[i]
    return x


def cokernel_projection(m: Matrix, tol: float = NUMERIC_TOLERANCE) -> tuple[Matrix, int]:
    """Projection of the codomain of m onto a coordinate complement of im m.

    The complement is spanned by the unit vectors on the non-pivot rows of the
    column echelon form of m.
    """
    mode = mode_of(m)
    n_rows = m.shape[0]
    if n_rows == 0:
        return zeros(0, 0, mode), 0

    pivot_rows = set(_echelon(m.T.copy(), tol)[1]) if m.shape[1] else set()
    pivot_cols = _echelon(m, tol)[1] if m.shape[1] else []
    complement = [j for j in range(n_rows) if j not in pivot_rows]

    unit = identity(n_rows, mode)
    basis = np.concatenate([m[:, pivot_cols], unit[:, complement]], axis=1)
    inverse = solve_linear(basis, unit, tol)
    if inverse is None:
        raise ArithmeticError("column echelon complement is not a complement")
    return inverse[len(pivot_cols):, :], len(complement)


# ------------------------------
# Field contexts (used for spinning)
# ------------------------------
class RationalField:
    name = "rational"

    def coerce(self, value):
        return to_rational(value)

    def is_zero(self, a) -> bool:
        return a == 0

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def inv(self, a):
        return 1 / Fraction(a)

    def dot(self, row, v):
        return sum((a * b for a, b in zip(row, v)), Fraction(0))


class PrimeField:
    """Integers modulo a prime; coercing a rational fails when p divides it."""

    name = "prime"

    def __init__(self, p: int = 2**61 - 1):
        self.p = p

    def coerce(self, value):
        q = to_rational(value)
        if q.denominator % self.p == 0:
            raise ValueError("denominator divisible by the field characteristic")
        return q.numerator * pow(q.denominator, -1, self.p) % self.p

    def is_zero(self, a) -> bool:
        return a % self.p == 0

    def sub(self, a, b):
        return (a - b) % self.p

    def mul(self, a, b):
        return a * b % self.p

    def inv(self, a):
        return pow(a, -1, self.p)

    def dot(self, row, v):
        return sum(a * b for a, b in zip(row, v)) % self.p


class ComplexField:
    name = "complex"

    def __init__(self, tol: float = NUMERIC_TOLERANCE, scale: float = 0.0):
        self.eps = tol * (1.0 + scale)

    def coerce(self, value):
        return value if isinstance(value, complex) else complex(float(to_rational(value)))

    def is_zero(self, a) -> bool:
        return abs(a) < self.eps

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def inv(self, a):
        return 1 / a

    def dot(self, row, v):
        return sum((a * b for a, b in zip(row, v)), 0j)


class Span:
    """Incrementally grown subspace kept in reduced echelon form."""

    def __init__(self, field, dim: int):
        self.field = field
        self.dim = dim
        self._rows: dict[int, list] = {}

    def __len__(self):
        return len(self._rows)

    @property
    def is_full(self) -> bool:
        return len(self._rows) == self.dim

    def add(self, vector) -> bool:
        f = self.field
        v = list(vector)
        for col, row in self._rows.items():
            c = v[col]
            if not f.is_zero(c):
                v = [f.sub(a, f.mul(c, b)) for a, b in zip(v, row)]
        pivot = next((i for i, a in enumerate(v) if not f.is_zero(a)), None)
        if pivot is None:
            return False
        inv = f.inv(v[pivot])
        v = [f.mul(a, inv) for a in v]
        for col, row in list(self._rows.items()):
            c = row[pivot]
            if not f.is_zero(c):
                self._rows[col] = [f.sub(a, f.mul(c, b)) for a, b in zip(row, v)]
        self._rows[pivot] = v
        return True

    def basis(self) -> list[list]:
        return [self._rows[c] for c in sorted(self._rows)]
