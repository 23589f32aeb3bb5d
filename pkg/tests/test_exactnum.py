import time
from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st
from sympy.polys.domains import QQ

from errors import ConvergenceError, InputError
from exactnum import (
    Mode,
    Polynomial,
    PrimeField,
    RationalField,
    Span,
    cokernel_projection,
    complex_roots,
    is_square_free,
    is_zero_matrix,
    kernel_basis,
    matrix,
    mul,
    poly_eval,
    poly_eval_matrix,
    poly_gcd,
    rank,
    rational_roots,
    solve_linear,
    to_scalar,
    zeros,
)

x = Polynomial.x()


def P(*coeffs):
    return Polynomial(coeffs)


@pytest.mark.parametrize(
    "p,s",
    [
        (x - 1, 1),
        (Polynomial(), 7),
        (2 * x * x - x - 1, Fraction(-1, 2)),
    ],
)
def test_poly_eval_roots(p, s):
    assert poly_eval(p, s) == 0


def test_polynomial_normalises_trailing_zeros():
    assert P(1, 2, 0, 0) == P(1, 2)
    assert P(0, 0).is_zero
    assert Polynomial().degree == -1


def test_polynomial_arithmetic():
    assert (x - 1) * (x + 1) == x * x - 1
    q, r = (x * x * x - 1).divmod(x - 1)
    assert q == x * x + x + 1
    assert r.is_zero
    assert (x * x).compose(x + 1) == x * x + 2 * x + 1
    assert (3 * x * x).derivative() == 6 * x


def test_poly_format():
    assert (x * x - 2 * x + Fraction(1, 2)).format() == "x^2 - 2*x + 1/2"
    assert (-x).format("w") == "-w"
    assert Polynomial().format() == "0"


def test_poly_gcd():
    assert poly_gcd((x - 1) * (x + 1), (x - 1) * (x - 2)) == x - 1
    assert poly_gcd(2 * x - 2, Polynomial()) == x - 1
    assert poly_gcd(x - 1, x + 1).degree == 0
    with pytest.raises(InputError):
        poly_gcd(Polynomial(), Polynomial())


def test_is_square_free():
    assert not is_square_free(x * x)
    assert is_square_free(x * x - 1)
    assert is_square_free(P(5))


@pytest.mark.parametrize(
    "p,expected",
    [
        (2 * x * x - x - 1, [Fraction(-1, 2), Fraction(1)]),
        (x * x * x - x, [-1, 0, 1]),
        (x * x + 1, []),
        (x * x - 2, []),
        ((x - 1) * (x - 1), [1, 1]),
        (2 * Polynomial.from_roots([Fraction(1, 2), -3, 5]), [-3, Fraction(1, 2), 5]),
        (x - 1000 ** 7, [1000 ** 7]),
    ],
)
def test_rational_roots(p, expected):
    assert rational_roots(p) == [Fraction(e) for e in expected]


def test_rational_roots_of_zero_polynomial():
    with pytest.raises(InputError):
        rational_roots(Polynomial())


def test_rational_roots_with_a_huge_constant_term():
    start = time.perf_counter()
    assert rational_roots(x * x * x + x + (10**16 + 1)) == []
    big = 10**12 + 39
    assert rational_roots((x - big) * (x * x + 1) * (3 * x + 7)) == [Fraction(-7, 3), big]
    assert time.perf_counter() - start < 5


def test_polynomial_converts_to_sympy():
    s = sp.Symbol("x")
    p = 2 * x * x - Fraction(1, 3)
    assert p.to_sympy() == sp.Poly(2 * s**2 - sp.Rational(1, 3), s, domain=QQ)
    assert Polynomial.from_sympy(p.to_sympy()) == p


@given(st.lists(st.fractions(min_value=-10, max_value=10, max_denominator=6), min_size=1, max_size=3))
@settings(deadline=None)
def test_rational_roots_recovers_constructed_roots(roots):
    assert rational_roots(Polynomial.from_roots(roots)) == sorted(roots)


def test_complex_roots():
    roots = complex_roots(x * x + 1)
    assert len(roots) == 2
    assert abs(roots[0] + 1j) < 1e-9
    assert abs(roots[1] - 1j) < 1e-9

    real = complex_roots(Polynomial.from_roots([1, 2, 3]))
    for got, want in zip(real, [1, 2, 3]):
        assert abs(got - want) < 1e-9


def test_complex_roots_reports_non_convergence():
    with pytest.raises(ConvergenceError) as info:
        complex_roots(Polynomial.from_roots([1, 2, 3, 4, 5]), max_iter=1)
    assert len(info.value.partial_roots) == 5


def test_poly_eval_matrix():
    m = matrix([[1, 1], [0, 1]])
    result = poly_eval_matrix(x * x - 2 * x + 1, m)
    assert is_zero_matrix(result)


def test_kernel_and_rank():
    m = matrix([[1, 2], [2, 4]])
    assert rank(m) == 1
    k = kernel_basis(m)
    assert k.shape == (2, 1)
    assert is_zero_matrix(mul(m, k))

    assert kernel_basis(zeros(0, 3)).shape == (3, 3)
    assert rank(zeros(0, 0)) == 0


def test_numeric_rank():
    m = matrix([[1, 2], [2, 4.0000000001]], Mode.NUMERIC)
    assert rank(m, tol=1e-6) == 1
    assert rank(m, tol=1e-12) == 2


@given(
    st.integers(1, 4).flatmap(
        lambda cols: st.lists(st.lists(st.integers(-3, 3), min_size=cols, max_size=cols), min_size=1, max_size=4)
    )
)
@settings(deadline=None)
def test_rank_nullity(rows):
    m = matrix(rows)
    k = kernel_basis(m)
    assert rank(m) + k.shape[1] == m.shape[1]
    assert is_zero_matrix(mul(m, k))
    assert rank(k) == k.shape[1]


def test_solve_linear():
    a = matrix([[1, 1], [1, -1]])
    b = matrix([[2], [0]])
    sol = solve_linear(a, b)
    assert is_zero_matrix(mul(a, sol) - b)

    assert solve_linear(matrix([[1], [1]]), matrix([[1], [2]])) is None


def test_cokernel_projection():
    m = matrix([[1], [1]])
    proj, dim = cokernel_projection(m)
    assert dim == 1
    assert proj.shape == (1, 2)
    assert is_zero_matrix(mul(proj, m))
    assert rank(proj) == 1

    proj, dim = cokernel_projection(zeros(2, 0))
    assert dim == 2


def test_to_scalar_modes():
    assert to_scalar("3/4", Mode.EXACT) == Fraction(3, 4)
    assert to_scalar("3/4", Mode.NUMERIC) == 0.75 + 0j
    assert to_scalar("1+2j", Mode.NUMERIC) == 1 + 2j
    with pytest.raises(InputError):
        to_scalar("abc", Mode.EXACT)
    with pytest.raises(InputError):
        to_scalar(1j, Mode.EXACT)


@pytest.mark.parametrize("field", [RationalField(), PrimeField()])
def test_span_growth(field):
    span = Span(field, 3)
    assert span.add([1, 2, 3])
    assert not span.add([2, 4, 6])
    assert span.add([0, 1, 0])
    assert not span.is_full
    assert span.add([0, 0, 5])
    assert span.is_full
    assert len(span) == 3


def test_prime_field_rejects_characteristic_denominator():
    field = PrimeField(7)
    with pytest.raises(ValueError):
        field.coerce(Fraction(1, 7))
