import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from dynkin import (
    Family,
    apply_word_to_potentials,
    apply_word_to_vector,
    bilinear_form,
    build_diagram,
    check_t,
    coxeter_apply,
    highest_root,
    is_positive,
    positive_roots,
    quadratic_form_B,
    reflection_word,
    root_potential,
    simple_reflection,
    support_type,
    t_length,
    t_to_potentials,
    unit_vector,
    weyl_act_on_potentials,
    weyl_act_on_t,
)
from errors import InputError
from exactnum import Polynomial

ALL_DIAGRAMS = (
    [("A", n) for n in range(1, 9)]
    + [("D", n) for n in range(4, 9)]
    + [("E", n) for n in (6, 7, 8)]
)


@pytest.mark.parametrize(
    "family,rank,count",
    [("A", n, n * (n + 1) // 2) for n in range(1, 9)]
    + [("D", 4, 12), ("D", 5, 20), ("E", 6, 36), ("E", 7, 63), ("E", 8, 120)],
)
def test_positive_root_counts(family, rank, count):
    roots = positive_roots(build_diagram(family, rank))
    assert len(roots) == count
    assert len(set(roots)) == count


def test_roots_sorted_by_height_then_lex():
    roots = positive_roots(build_diagram("A", 2))
    assert roots == [(0, 1), (1, 0), (1, 1)]


@pytest.mark.parametrize(
    "family,rank,expected",
    [
        ("A", 3, (1, 1, 1)),
        ("D", 4, (1, 2, 1, 1)),
        ("E", 6, (1, 2, 3, 2, 1, 2)),
        ("E", 8, (2, 4, 6, 5, 4, 3, 2, 3)),
    ],
)
def test_highest_root(family, rank, expected):
    assert highest_root(build_diagram(family, rank)) == expected


@pytest.mark.parametrize("family,rank", [("A", 0), ("D", 3), ("E", 9), ("E", 5), ("F", 4), ("A", "2")])
def test_build_diagram_rejects(family, rank):
    with pytest.raises(InputError):
        build_diagram(family, rank)


def test_diagram_edges_and_signs():
    d = build_diagram("D", 5)
    assert d.edges == ((1, 2), (2, 3), (3, 4), (3, 5))
    assert d.neighbours(3) == (2, 4, 5)
    assert d.sign(2, 1) == 1
    assert d.sign(1, 2) == -1
    assert d.sign(1, 3) == 0

    e = build_diagram("e", 6)
    assert e.family is Family.E
    assert e.neighbours(6) == (3,)


def test_roots_have_unit_form():
    for family, rank in [("D", 5), ("E", 7)]:
        d = build_diagram(family, rank)
        for rho in positive_roots(d):
            assert quadratic_form_B(d, rho) == 1
            assert bilinear_form(d, rho, rho) == 1


@given(st.sampled_from(ALL_DIAGRAMS).flatmap(
    lambda fr: st.tuples(
        st.just(fr),
        st.integers(1, fr[1]),
        st.lists(st.integers(-5, 5), min_size=fr[1], max_size=fr[1]),
    )
))
def test_simple_reflection_is_an_involution_preserving_B(args):
    (family, rank), beta, x = args
    d = build_diagram(family, rank)
    y = simple_reflection(d, beta, x)
    assert simple_reflection(d, beta, y) == tuple(x)
    assert quadratic_form_B(d, y) == quadratic_form_B(d, x)


@pytest.mark.parametrize("family,rank", [("A", 4), ("D", 4), ("D", 6), ("E", 6), ("E", 8)])
def test_reflection_word_rebuilds_every_root(family, rank):
    d = build_diagram(family, rank)
    for rho in positive_roots(d):
        word, base = reflection_word(d, rho)
        assert len(word) == sum(rho) - 1
        assert apply_word_to_vector(d, word, unit_vector(d, base)) == rho


def test_reflection_word_rejects_non_roots():
    d = build_diagram("A", 2)
    with pytest.raises(InputError):
        reflection_word(d, (2, 0))
    with pytest.raises(InputError):
        reflection_word(d, (0, 0))


@pytest.mark.parametrize(
    "family,rank,rho,label",
    [
        ("A", 2, (1, 1), "A2"),
        ("A", 3, (0, 1, 0), "A1"),
        ("D", 4, (1, 2, 1, 1), "D4"),
        ("D", 5, (0, 1, 1, 1, 0), "A3"),
        ("E", 6, (1, 2, 3, 2, 1, 2), "E6"),
        ("E", 8, (2, 4, 6, 5, 4, 3, 2, 3), "E8"),
    ],
)
def test_support_type(family, rank, rho, label):
    assert support_type(build_diagram(family, rank), rho) == label


@pytest.mark.parametrize("family,rank", [("A", 2), ("A", 3), ("A", 4), ("D", 4)])
def test_coxeter_element_eventually_leaves_positive_cone(family, rank):
    d = build_diagram(family, rank)
    limit = 2 * len(positive_roots(d))
    for x in itertools.product(range(4), repeat=rank):
        if not any(x):
            continue
        y = x
        for _ in range(limit):
            y = coxeter_apply(d, y, 1)
            if not is_positive(y):
                break
        else:
            pytest.fail(f"c^i {x} stayed positive for i <= {limit}")


def _random_t(d, rng):
    n = t_length(d)
    t = [Polynomial((Fraction(rng.randint(-9, 9), rng.randint(1, 4)), rng.randint(-3, 3))) for _ in range(n)]
    if d.family is Family.A:
        t[-1] = -sum(t[:-1], Polynomial())
    return tuple(t)


@pytest.mark.parametrize("family,rank", ALL_DIAGRAMS)
def test_weyl_action_matches_t_coordinates(family, rank):
    d = build_diagram(family, rank)
    rng = random.Random(rank * 31 + ord(family))
    for _ in range(20):
        t = _random_t(d, rng)
        potentials = t_to_potentials(d, t)
        for i in d.vertices:
            moved = t_to_potentials(d, weyl_act_on_t(d, i, t))
            assert moved == weyl_act_on_potentials(d, i, potentials)
            assert weyl_act_on_potentials(d, i, weyl_act_on_potentials(d, i, potentials)) == potentials


def test_potentials_pair_like_roots():
    d = build_diagram("D", 4)
    x = Polynomial.x()
    potentials = tuple(x - k for k in range(1, 5))
    rng = random.Random(5)
    for _ in range(20):
        word = tuple(rng.randint(1, 4) for _ in range(rng.randint(0, 6)))
        moved = apply_word_to_potentials(d, word, potentials)
        for j in d.vertices:
            # the action on potentials is contragredient: letters act in reverse order
            rho = apply_word_to_vector(d, tuple(reversed(word)), unit_vector(d, j))
            assert moved[j - 1] == root_potential(rho, potentials)


def test_check_t_requires_zero_sum_on_A():
    d = build_diagram("A", 2)
    x = Polynomial.x()
    check_t(d, (x, Polynomial.constant(1), -x - 1))
    with pytest.raises(InputError):
        check_t(d, (x, x, x))
    with pytest.raises(InputError):
        check_t(d, (x, -x))
