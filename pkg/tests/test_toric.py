from fractions import Fraction
from math import comb

import pytest

from loghodgelab.toric import (
    Fan,
    FanError,
    QDivisor,
    divisor_cohomology,
    e1_sum_check,
    hirzebruch,
    log_hodge_numbers,
    projective_line,
    projective_plane,
    weight_divisor,
)
from loghodgelab.weights import WeightFunction


# closed forms on P^2 and P^1 used as oracles


def p2_h_oracle(d: int) -> tuple[int, int, int]:
    h0 = comb(d + 2, 2) if d >= 0 else 0
    h2 = comb(-d - 1, 2) if d <= -3 else 0
    return (h0, 0, h2)


def p1_h_oracle(d: int) -> tuple[int, int]:
    h0 = d + 1 if d >= 0 else 0
    h1 = -d - 1 if d <= -2 else 0
    return (h0, h1)


def p2_divisor(d: int) -> dict[int, int]:
    return {0: d, 1: 0, 2: 0}


# --- fan validation ------------------------------------------------------------


def test_incomplete_fan_rejected():
    with pytest.raises(FanError, match="complete"):
        Fan([(1, 0), (0, 1)], [(0, 1)])


def test_non_smooth_fan_rejected():
    # cone on (1,0), (1,2) has determinant 2
    with pytest.raises(FanError, match="smooth|unimodular"):
        Fan([(1, 0), (1, 2), (-1, -1)], [(0, 1), (1, 2), (0, 2)])


def test_non_primitive_ray_rejected():
    with pytest.raises(FanError, match="primitive"):
        Fan([(2, 0), (0, 1), (-1, -1)], [(0, 1), (1, 2), (0, 2)])


def test_standard_fans_construct():
    projective_line()
    projective_plane()
    hirzebruch(0)
    hirzebruch(1)
    hirzebruch(2)


# --- divisor cohomology ----------------------------------------------------------


def test_p2_canonical_divisor():
    h = divisor_cohomology(projective_plane(), p2_divisor(-3))
    assert (h[0], h[1], h[2]) == (0, 0, 1)


def test_p1_structure_sheaf():
    h = divisor_cohomology(projective_line(), {0: 0, 1: 0})
    assert (h[0], h[1]) == (1, 0)


def test_p2_hyperplane():
    h = divisor_cohomology(projective_plane(), p2_divisor(1))
    assert (h[0], h[1], h[2]) == (3, 0, 0)


def test_p2_range_against_closed_forms():
    fan = projective_plane()
    for d in range(-6, 7):
        h = divisor_cohomology(fan, p2_divisor(d))
        assert (h[0], h[1], h[2]) == p2_h_oracle(d), f"d={d}"


def test_p1_range_against_closed_forms():
    fan = projective_line()
    for d in range(-6, 7):
        h = divisor_cohomology(fan, {0: d, 1: 0})
        assert (h[0], h[1]) == p1_h_oracle(d), f"d={d}"


def test_p2_euler_characteristic_riemann_roch():
    fan = projective_plane()
    for d in range(-6, 7):
        h = divisor_cohomology(fan, p2_divisor(d))
        chi = h[0] - h[1] + h[2]
        assert chi == (d + 1) * (d + 2) // 2, f"d={d}"


def test_p2_serre_duality():
    fan = projective_plane()
    for d in range(-5, 6):
        h = divisor_cohomology(fan, p2_divisor(d))
        hd = divisor_cohomology(fan, p2_divisor(-3 - d))
        assert all(h[q] == hd[2 - q] for q in range(3)), f"d={d}"


def test_hirzebruch_nontrivial_h1():
    # rays 0 and 2 are the fibers; O(-2F) pulls back O(-2) from the base,
    # so h = (0, 1, 0)
    fan = hirzebruch(1)
    h = divisor_cohomology(fan, {0: -2, 1: 0, 2: 0, 3: 0})
    assert (h[0], h[1], h[2]) == (0, 1, 0)


def test_hirzebruch_anticanonical_h0():
    # -K on F_a is big and nef for a <= 2; on F_0 = P1 x P1, h^0(-K) = 9
    fan = hirzebruch(0)
    h = divisor_cohomology(fan, {0: 1, 1: 1, 2: 1, 3: 1})
    assert (h[0], h[1], h[2]) == (9, 0, 0)


# --- log Hodge tables ----------------------------------------------------------


def test_p2_untwisted_table():
    table = log_hodge_numbers(projective_plane(), QDivisor.zero(projective_plane()))
    assert [table.entry(p, 0) for p in range(3)] == [1, 2, 1]
    assert all(table.entry(p, q) == 0 for p in range(3) for q in (1, 2))


def test_p1_untwisted_table():
    fan = projective_line()
    table = log_hodge_numbers(fan, QDivisor.zero(fan))
    assert table.entry(0, 0) == 1 and table.entry(1, 0) == 1


def test_p2_weight_one_twist():
    fan = projective_plane()
    w = WeightFunction({"r0": Fraction(1), "r1": Fraction(1), "r2": Fraction(1)})
    twist = weight_divisor(w, fan)
    table = log_hodge_numbers(fan, twist)
    assert table.entry(0, 0) == 10  # h^0(O(3)) on P^2


def test_binomial_symmetry_of_untwisted_rows():
    fan = projective_plane()
    table = log_hodge_numbers(fan, QDivisor.zero(fan))
    n = fan.rank
    for p in range(n + 1):
        total_p = sum(table.entry(p, q) for q in range(n + 1))
        total_np = sum(table.entry(n - p, q) for q in range(n + 1))
        assert total_p == total_np


# --- E1 sum check -----------------------------------------------------------------


def test_e1_sum_p1():
    fan = projective_line()
    check = e1_sum_check(log_hodge_numbers(fan, QDivisor.zero(fan)))
    assert check.passed
    assert check.per_degree[0] == (1, 1, True)
    assert check.per_degree[1] == (1, 1, True)


def test_e1_sum_p2():
    fan = projective_plane()
    check = e1_sum_check(log_hodge_numbers(fan, QDivisor.zero(fan)))
    assert check.passed
    assert [check.per_degree[k][0] for k in range(3)] == [1, 2, 1]


def test_e1_sum_hirzebruch():
    for a in (0, 1, 2):
        fan = hirzebruch(a)
        check = e1_sum_check(log_hodge_numbers(fan, QDivisor.zero(fan)))
        assert check.passed, f"F_{a}"


# --- weight divisor -----------------------------------------------------------------


def test_weight_divisor_floor_of_half_weights_is_zero():
    fan = projective_plane()
    w = WeightFunction({f"r{i}": Fraction(1, 2) for i in range(3)})
    d = weight_divisor(w, fan)
    assert d.floor() == {0: 0, 1: 0, 2: 0}
    table = log_hodge_numbers(fan, d)
    untwisted = log_hodge_numbers(fan, QDivisor.zero(fan))
    assert table.entries == untwisted.entries


def test_weight_divisor_mixed_floor():
    fan = projective_plane()
    w = WeightFunction({"r0": Fraction(1, 2), "r1": Fraction(3, 2), "r2": Fraction(1, 2)})
    d = weight_divisor(w, fan)
    assert d.floor() == {0: 0, 1: 1, 2: 0}
    h = divisor_cohomology(fan, d.floor())
    assert (h[0], h[1], h[2]) == (3, 0, 0)  # floor is linearly equivalent to H


def test_weight_divisor_mismatched_rays():
    fan = projective_plane()
    w = WeightFunction({"x": Fraction(1)})
    with pytest.raises(FanError, match="match"):
        weight_divisor(w, fan)
