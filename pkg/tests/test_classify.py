from fractions import Fraction

import pytest
import sympy as sp

from classify import (
    THREEFOLD_VARIABLES,
    FibrationSpec,
    b_gamma,
    chart_variables,
    check_simple_roots,
    check_star,
    classify_curves,
    coincidence_condition,
    count_irrational_roots,
    emit_resolution_charts,
    emit_threefold_equation,
    enumerate_simples,
    format_terms,
    generic_linear_potentials,
    group_by_root,
    linear_factors,
)
from dynkin import build_diagram, simple_reflection, unit_vector, weyl_act_on_potentials
from errors import HypothesisError, InputError, UnsupportedError
from exactnum import Mode, Polynomial

x = Polynomial.x()
A2 = build_diagram("A", 2)
POTENTIALS = (x - 1, x + 1)
TABLE_T = (x, Polynomial.constant(1), -x - 1)


def const(c):
    return Polynomial.constant(c)


def test_b_gamma():
    assert b_gamma(A2, POTENTIALS) == [((0, 1), x + 1), ((1, 0), x - 1), ((1, 1), 2 * x)]


def test_star_condition():
    assert check_star(A2, POTENTIALS).holds

    report = check_star(A2, (x - 1, x - 1))
    assert not report.holds
    assert len(report.violations) == 3
    first = report.violations[0]
    assert (first.root, first.other) == ((0, 1), (1, 0))
    assert first.shared_roots == [1]


def test_simple_roots_condition():
    assert check_simple_roots(A2, POTENTIALS).holds
    report = check_simple_roots(A2, (x * x, 1 - x * x))
    assert report.offenders == ((1, 0),)


def test_a2_classification():
    entries = enumerate_simples(A2, POTENTIALS)
    assert [(e.root, e.lam) for e in entries] == [((0, 1), -1), ((1, 0), 1), ((1, 1), 0)]

    top = entries[2]
    assert top.word == (1,)
    assert top.base == 2
    assert top.config_type == "A2"
    assert top.curve_class == ((1, 1), (2, 1))
    assert top.rep.Q[(2, 1)][0, 0] * top.rep.Q[(1, 2)][0, 0] == 1


@pytest.mark.parametrize(
    "family,rank,potentials,count",
    [
        ("A", 1, (x * x - 1,), 2),
        ("A", 2, (x - 1, const(2)), 2),
        ("A", 2, (x * x + 1, const(3)), 0),
    ],
)
def test_entry_counts(family, rank, potentials, count):
    assert len(enumerate_simples(build_diagram(family, rank), potentials)) == count


def test_enumeration_requires_hypotheses():
    with pytest.raises(HypothesisError):
        enumerate_simples(A2, (x - 1, x - 1))
    with pytest.raises(HypothesisError):
        enumerate_simples(A2, (x * x, 1 - x * x))
    with pytest.raises(InputError):
        enumerate_simples(A2, (x,))


def test_numeric_enumeration_finds_complex_eigenvalues():
    entries = enumerate_simples(build_diagram("A", 1), (x * x + 1,), mode=Mode.NUMERIC)
    assert len(entries) == 2
    assert abs(entries[0].lam + 1j) < 1e-9
    assert abs(entries[1].lam - 1j) < 1e-9


def test_parallel_enumeration_matches_serial():
    d = build_diagram("A", 3)
    potentials = generic_linear_potentials(d)
    serial = enumerate_simples(d, potentials)
    parallel = enumerate_simples(d, potentials, workers=2)
    assert [(e.root, e.lam) for e in serial] == [(e.root, e.lam) for e in parallel]


def test_count_irrational_roots():
    d = build_diagram("A", 1)
    assert count_irrational_roots(d, (x * x - 2,)) == [((1,), 2)]
    assert count_irrational_roots(A2, POTENTIALS) == [((0, 1), 0), ((1, 0), 0), ((1, 1), 0)]


@pytest.mark.parametrize("family,rank", [("A", 4), ("D", 5), ("E", 6)])
def test_generic_linear_potentials_satisfy_hypotheses(family, rank):
    d = build_diagram(family, rank)
    potentials = generic_linear_potentials(d)
    assert check_star(d, potentials).holds
    assert check_simple_roots(d, potentials).holds


@pytest.mark.parametrize("family,rank,k", [("A", 3, 2), ("D", 4, 2), ("D", 4, 4)])
def test_weyl_equivariance_of_classification(family, rank, k):
    d = build_diagram(family, rank)
    potentials = generic_linear_potentials(d)
    before = {(e.root, e.lam) for e in enumerate_simples(d, potentials)}
    after = {(e.root, e.lam) for e in enumerate_simples(d, weyl_act_on_potentials(d, k, potentials))}
    assert len(before) == len(after)
    e_k = unit_vector(d, k)
    for root, lam in before:
        if root != e_k:
            assert (simple_reflection(d, k, root), lam) in after


@pytest.mark.slow
def test_e8_has_one_simple_per_root():
    d = build_diagram("E", 8)
    entries = enumerate_simples(d, generic_linear_potentials(d))
    assert len(entries) == 120
    assert (2, 4, 6, 5, 4, 3, 2, 3) in {e.root for e in entries}


# ------------------------------
# Curves
# ------------------------------
def test_table_curves():
    records = classify_curves(FibrationSpec(A2, TABLE_T))
    assert [(r.root, r.lam, r.condition, r.config_type, r.curve_label) for r in records] == [
        ((0, 1), -2, "t2=t3!=t1", "A1", "C2"),
        ((1, 0), 1, "t1=t2!=t3", "A1", "C1"),
        ((1, 1), Fraction(-1, 2), "t1=t3!=t2", "A2", "C1 + C2"),
    ]
    assert records[2].dims == (1, 1)


def test_generic_fibration_has_no_rational_curves():
    t = (x * x + 1, 2 * x * x + 3, -3 * x * x - 4)
    assert classify_curves(FibrationSpec(A2, t)) == []


def test_fibration_spec_validates_t():
    with pytest.raises(InputError):
        FibrationSpec(A2, (x, x, x))


def test_group_by_root():
    d = build_diagram("A", 1)
    t1 = (x * x - 1) * Fraction(1, 2)
    f = FibrationSpec(d, (t1, -t1))
    records = classify_curves(f)
    assert group_by_root(records) == [((1,), [-1, 1])]
    assert records[0].condition == "t1=t2"


def test_coincidence_condition_on_d4():
    d = build_diagram("D", 4)
    f = FibrationSpec(d, (x, const(1), const(2), const(-1)))
    assert coincidence_condition(f, 1) == "t1=t2, t1=-t4, t2=-t4"
    assert coincidence_condition(f, 5) == "t2=-t4"


# ------------------------------
# Threefolds and charts
# ------------------------------
def same(poly, expr) -> bool:
    return sp.expand(poly.as_expr() - expr) == 0


def test_a1_equation():
    w = Polynomial.x()
    f = FibrationSpec(build_diagram("A", 1), (w, -w))
    x_, y, z, w_ = THREEFOLD_VARIABLES
    eq = emit_threefold_equation(f)
    assert eq.gens == THREEFOLD_VARIABLES
    assert same(eq, x_ * y - z**2 + w_**2)
    assert format_terms(eq) == ["1 * x^1 y^1", "-1 * z^2", "1 * w^2"]


def test_a2_equation_has_no_top_z_term():
    z = THREEFOLD_VARIABLES[2]
    eq = sp.expand(emit_threefold_equation(FibrationSpec(A2, TABLE_T)).as_expr())
    assert eq.coeff(z, 2) == 0
    assert eq.coeff(z, 3) != 0


def test_d4_equation():
    one = const(1)
    f = FibrationSpec(build_diagram("D", 4), (one, one, one, one))
    x_, y, z, _ = THREEFOLD_VARIABLES
    expected = x_**2 + y**2 * z + z**3 + 4 * z**2 + 6 * z + 4 + 2 * y
    assert same(emit_threefold_equation(f), expected)


def test_e6_equation_is_unsupported():
    d = build_diagram("E", 6)
    f = FibrationSpec(d, tuple(const(i) for i in range(6)))
    with pytest.raises(UnsupportedError) as info:
        emit_threefold_equation(f)
    assert "E-type epsilon coefficients" in str(info.value)


@pytest.mark.parametrize(
    "t,count",
    [
        ((x, -x), 1),
        (TABLE_T, 3),
        ((x, const(1), const(-1), -x), 6),
    ],
)
def test_resolution_chart_counts(t, count):
    d = build_diagram("A", len(t) - 1)
    f = FibrationSpec(d, t)
    relations = emit_resolution_charts(f)
    assert len(relations) == count

    n = d.rank
    gens = chart_variables(n)
    x_, u, v = gens[0], sp.Symbol(f"u{n}"), sp.Symbol(f"v{n}")
    assert relations[n - 1].lhs.gens == gens
    assert same(relations[n - 1].lhs, x_ * v)
    assert same(relations[n - 1].rhs, u * sp.Mul(*linear_factors(f)[:n]))


def test_charts_are_a_type_only():
    one = const(1)
    f = FibrationSpec(build_diagram("D", 4), (one, one, one, one))
    with pytest.raises(UnsupportedError):
        emit_resolution_charts(f)
