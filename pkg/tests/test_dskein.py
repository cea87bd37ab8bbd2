import random
from fractions import Fraction

import pytest

from skeinpoly.dskein import (
    ConnSum,
    FramingShift,
    T3_VECTOR,
    Torus2,
    conj_integrality_check,
    family_to_text,
    i_value,
    mirror_value,
    parse_family,
    qtilde,
    skein_vectors,
    torus_value,
    total_framing_shift,
)
from skeinpoly.errors import ParseError
from skeinpoly.rings import LaurentPoly, sigma_swap

SP_MINUS_SM = LaurentPoly(("sp", "sm"), {(1, 0): 1, (0, 1): -1})


def sigma(terms):
    return LaurentPoly(("sp", "sm"), terms)


def test_i_value_bases():
    assert i_value(0).is_zero()
    assert i_value(1) == LaurentPoly.const(-1, ("sp", "sm"))
    assert i_value(-1) == LaurentPoly.const(-1, ("sp", "sm"))
    assert i_value(2) == 2 * SP_MINUS_SM
    assert i_value(-2) == -2 * SP_MINUS_SM


def test_i_value_one_step_each_way():
    # one forward step at n=0 and one backward step at n=-1, by hand
    assert i_value(3) == sigma({(0, 0): -1, (1, 1): 2, (0, 2): -2})
    assert i_value(-3) == sigma({(0, 0): -1, (2, 0): -2, (1, 1): 2})


def test_recursion_coefficients_match_t3_vector():
    # the recursion IS the printed 6-vector paired with graph closures,
    # the first entry closing to the theta-graph value 1
    t3 = skein_vectors().t3
    assert t3 == T3_VECTOR
    for n in range(-8, 9):
        acc = t3[0] * 1 + t3[1] * i_value(n - 2) + t3[2] * i_value(n - 1) \
            + t3[3] * i_value(n) + t3[4] * i_value(n + 1) + t3[5] * i_value(n + 2)
        assert acc == i_value(n + 3)


def test_forward_backward_round_trip():
    # recompute I(n) from values above and below; both directions agree
    t3 = T3_VECTOR
    for n in range(-12, 13):
        forward = t3[0] + t3[1] * i_value(n - 2) + t3[2] * i_value(n - 1) \
            + t3[3] * i_value(n) + t3[4] * i_value(n + 1) + t3[5] * i_value(n + 2)
        backward = i_value(n + 3) - t3[0] - t3[2] * i_value(n - 1) \
            - t3[3] * i_value(n) - t3[4] * i_value(n + 1) - t3[5] * i_value(n + 2)
        assert forward == i_value(n + 3)
        assert backward == i_value(n - 2)


def test_rot2_vector_entries():
    rot2 = skein_vectors().rot2
    assert rot2[0] == LaurentPoly.const(1, ("sp", "sm")) - 2 * SP_MINUS_SM
    assert rot2[1].is_zero()
    assert rot2[5] == LaurentPoly.const(1, ("sp", "sm"))


def test_torus_values_printed():
    assert torus_value(0).is_zero()
    assert torus_value(1) == LaurentPoly.const(1, ("sp", "sm"))
    assert torus_value(-1) == LaurentPoly.const(-1, ("sp", "sm"))
    assert torus_value(2) == -SP_MINUS_SM
    assert torus_value(3) == LaurentPoly.const(3, ("sp", "sm")) \
        - SP_MINUS_SM * sigma({(0, 0): 2, (0, 1): 1})
    k5 = LaurentPoly.const(5, ("sp", "sm")) + SP_MINUS_SM * sigma(
        {(0, 0): -6, (1, 0): 2, (0, 1): -4, (1, 1): 2, (0, 2): -2, (0, 3): -1})
    assert torus_value(5) == k5


def test_mirror_pattern():
    for n in range(-10, 11):
        assert i_value(-n) == sigma_swap(i_value(n))
        assert torus_value(-n) == -sigma_swap(torus_value(n))
    assert torus_value(-2) == torus_value(2)
    assert mirror_value(torus_value(3)) == torus_value(-3)


def test_qtilde_family():
    assert qtilde(FramingShift(Torus2(1), -1)).is_zero()      # the 0-framed unknot
    assert qtilde(ConnSum(Torus2(3), Torus2(3))) == 2 * torus_value(3)
    assert qtilde(FramingShift(Torus2(3), -3)) == torus_value(3) - 3


def test_framing_slope_random_trees():
    rng = random.Random(1234)

    def random_tree(depth=0):
        roll = rng.random()
        if depth > 3 or roll < 0.5:
            return Torus2(rng.randint(-6, 6))
        if roll < 0.75:
            return FramingShift(random_tree(depth + 1), rng.randint(-4, 4))
        return ConnSum(random_tree(depth + 1), random_tree(depth + 1))

    for _ in range(30):
        tree = random_tree()
        k = rng.randint(-5, 5)
        shifted = FramingShift(tree, k)
        assert qtilde(shifted) - qtilde(tree) == LaurentPoly.const(k, ("sp", "sm"))
        assert total_framing_shift(shifted) == total_framing_shift(tree) + k


def test_integrality():
    for m in range(-15, 16):
        ok, witness = conj_integrality_check(torus_value(m))
        assert ok, f"torus value {m} not integral: {witness}"
    bad = LaurentPoly(("sp", "sm"), {(1, 0): Fraction(1, 2)})
    ok, witness = conj_integrality_check(bad)
    assert not ok and witness == (((1, 0), Fraction(1, 2)),)
    ok, witness = conj_integrality_check(LaurentPoly(("sp", "sm"), {}))
    assert ok and witness == ()


def test_family_parser():
    text = "connsum(frame(torus2(3),-3),torus2(-2))"
    tree = parse_family(text)
    assert tree == ConnSum(FramingShift(Torus2(3), -3), Torus2(-2))
    assert family_to_text(tree) == text
    assert parse_family(" torus2( 5 ) ") == Torus2(5)
    with pytest.raises(ParseError):
        parse_family("torus(3)")
    with pytest.raises(ParseError):
        parse_family("torus2(3) extra")
    with pytest.raises(ParseError):
        parse_family("frame(torus2(1)")
