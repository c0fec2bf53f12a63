from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from twinlattice.coxeter import INF, CoxeterSystem, dihedral
from twinlattice.integrability import (
    CONVERGES, DIVERGES, INCONCLUSIVE, fraction_to_decimal, integrability_check, partial_sums,
    ratio_verdict,
)

A2T = CoxeterSystem("abc", [[1, 3, 3], [3, 1, 3], [3, 3, 1]])
# verdict frozen from a run on BFS growth coefficients c_n = 3n
A2T_VERDICT_Q2_P1 = CONVERGES


def closed_form_dihedral(p_exp: int, q: int, n: int) -> Fraction:
    """sum_{k=1..n} k^p * 2 * q^-k by direct summation, independent of the growth code."""
    return sum((Fraction(2 * k**p_exp, q**k) for k in range(1, n + 1)), Fraction(0))


def test_infinite_dihedral_series():
    rep = integrability_check(dihedral(INF), 2, 2, 60)
    assert rep.coefficients[1:21] == (2,) * 20
    assert rep.verdict == CONVERGES
    assert rep.partial_sums[60] == closed_form_dihedral(2, 2, 60)
    assert rep.partial_sums[60] - rep.partial_sums[50] < Fraction(1, 10**9)
    # the full series sums to 2 * sum k^2 2^-k = 12
    assert Fraction(12) - rep.total < Fraction(1, 10**12)


def test_finite_group_exact_sum():
    rep = integrability_check(dihedral(3), 3, 1, 10)
    assert rep.finite and rep.verdict == CONVERGES
    # c = 1, 2, 2, 1: sum n c_n 3^-n = 2/3 + 4/9 + 3/27
    assert rep.total == Fraction(2, 3) + Fraction(4, 9) + Fraction(3, 27)


def test_affine_a2_verdict():
    rep = integrability_check(A2T, 2, 1, 40)
    assert rep.coefficients[40] == 120
    assert rep.verdict == A2T_VERDICT_Q2_P1


def test_exponential_growth_against_q():
    # free product of three Z/2: c_n = 3 * 2^(n-1), so q_min = 2 sits exactly on the boundary
    free = CoxeterSystem("abc", [[1, INF, INF], [INF, 1, INF], [INF, INF, 1]])
    rep = integrability_check(free, 2, 1, 14)
    assert rep.coefficients[:4] == (1, 3, 6, 12)
    assert rep.verdict == INCONCLUSIVE  # ratio exactly 1
    assert integrability_check(free, 3, 1, 14).verdict == CONVERGES
    four = CoxeterSystem("abcd", [[1 if i == j else INF for j in range(4)] for i in range(4)])
    assert integrability_check(four, 2, 1, 10).verdict == DIVERGES  # c_n = 4 * 3^(n-1)


def test_ratio_verdict_rules():
    assert ratio_verdict((1, 1, 0), 2) == CONVERGES
    assert ratio_verdict(tuple(3**n for n in range(15)), 2) == DIVERGES
    assert ratio_verdict(tuple(2**n for n in range(15)), 2) == INCONCLUSIVE
    assert ratio_verdict((1, 2, 2), 2) == INCONCLUSIVE  # fewer than a window of ratios


def test_argument_checks():
    for args in ((1, 1, 10), (2, 0, 10), (2, 1, 9)):
        with pytest.raises(ValueError):
            integrability_check(A2T, *args)


def test_json_rendering():
    rep = integrability_check(dihedral(INF), 2, 1, 10)
    d = rep.as_dict()
    assert d["partial_sums"][1] == "1"
    assert d["partial_sums_decimal"][2] == "2"
    assert d["verdict"] == rep.verdict
    assert fraction_to_decimal(Fraction(1, 3), 5) == "0.33333"


@given(st.lists(st.integers(0, 50), min_size=1, max_size=30), st.integers(2, 7), st.integers(1, 4))
def test_partial_sums_non_decreasing(coeffs, q, p):
    sums = partial_sums(tuple(coeffs), q, p)
    assert all(a <= b for a, b in zip(sums, sums[1:]))


@pytest.mark.parametrize("q", [2, 3, 5, 7])
def test_twin_tree_weyl_group_always_integrable(q):
    rep = integrability_check(dihedral(INF), q, 3, 30)
    assert rep.verdict == CONVERGES


@pytest.mark.parametrize("n", [20, 30, 40])
def test_verdict_stable_in_n(n):
    assert integrability_check(A2T, 2, 2, n).verdict == CONVERGES
    assert integrability_check(dihedral(INF), 2, 2, n).verdict == CONVERGES
