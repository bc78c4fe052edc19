from fractions import Fraction

import mpmath as mp
import pytest
from hypothesis import given, strategies as st

from mtlab.data import parse_curve_file
from mtlab.config import DEFAULT_CURVE_DB
from mtlab.ec_arithmetic import (
    INFINITY,
    Point,
    ReductionType,
    WeierstrassCurve,
    add_points,
    count_points,
    count_points_naive,
    cyclicity_density,
    group_structure_mod_ell,
    lattice_index,
    multiply_point,
    primes_with_trace,
    real_periods,
    reduce_point,
    reduction_type,
    sp_and_b2,
    split_component_index,
    torsion_points,
    trace_of_frobenius,
)
from mtlab.errors import CurveDataError, InvalidPrimeError
from mtlab.utilities import primes_up_to

CURVES = {p.label: p for p in parse_curve_file(DEFAULT_CURVE_DB)}
E11, E37, E389, E701 = (CURVES[k] for k in ("11a1", "37a1", "389a1", "701a1"))


def test_traces_11a1():
    expected = {2: -2, 3: -1, 5: 1, 7: -2, 13: 4, 17: -2, 19: 0, 23: -1}
    assert {ell: trace_of_frobenius(E11, ell) for ell in expected} == expected


def test_traces_37a1():
    expected = {2: -2, 3: -3, 5: -2, 7: -1, 11: -5, 13: -2}
    assert {ell: trace_of_frobenius(E37, ell) for ell in expected} == expected


def test_split_prime_of_11a1():
    assert reduction_type(E11.curve, 11) is ReductionType.SPLIT_MULTIPLICATIVE
    assert trace_of_frobenius(E11, 11) == 1
    assert reduction_type(E11.curve, 3) is ReductionType.GOOD


def test_component_index_is_additive():
    curve = E11.curve
    P = Point(Fraction(5), Fraction(5))
    assert [split_component_index(curve, multiply_point(curve, P, k), 11, 5) for k in range(5)] == [0, 1, 2, 3, 4]
    points = torsion_points(curve)
    assert len(points) == 5
    for Q in points:
        for R in points:
            expected = (split_component_index(curve, Q, 11, 5) + split_component_index(curve, R, 11, 5)) % 5
            assert split_component_index(curve, add_points(curve, Q, R), 11, 5) == expected


def test_component_index_of_identity_component():
    assert split_component_index(E11.curve, INFINITY, 11, 5) == 0
    assert split_component_index(E11.curve, Point(Fraction(1, 121), Fraction(1, 1331)), 11, 5) == 0


def test_trace_two_list_for_701():
    assert primes_with_trace(E701, 2, 1100) == [2, 3, 5, 251, 983, 1009, 1051]


def test_sp_and_b2():
    assert sp_and_b2(E11, 33) == (1, 0)
    assert sp_and_b2(E11, 3 * 11 * 13) == (1, 0)
    assert sp_and_b2(E701, 15) == (0, 2)
    with pytest.raises(ValueError):
        sp_and_b2(E11, 9)


@pytest.mark.parametrize("ell", [3, 5, 7, 13, 17, 29, 31, 97])
def test_fast_count_matches_naive(ell):
    for profile in (E11, E37, E389):
        assert count_points(profile.curve, ell) == count_points_naive(profile.curve, ell)


@pytest.mark.parametrize("ell", [p for p in primes_up_to(60) if p not in (11, 37)])
def test_group_structure_order(ell):
    structure = group_structure_mod_ell(E37, ell)
    assert structure.order == ell + 1 - trace_of_frobenius(E37, ell)
    assert structure.d2 % structure.d1 == 0


def test_torsion():
    assert len(torsion_points(E11.curve)) == 5
    assert torsion_points(E37.curve) == (INFINITY,)


@given(st.integers(min_value=-6, max_value=6), st.integers(min_value=-6, max_value=6))
def test_group_law_is_additive_on_37a1(m, n):
    P = E37.generators[0]
    curve = E37.curve
    assert add_points(curve, multiply_point(curve, P, m), multiply_point(curve, P, n)) == multiply_point(curve, P, m + n)


def test_reduction_of_points():
    P = Point(Fraction(1, 4), Fraction(-5, 8))
    assert reduce_point(E37, P, 3) == Point(1 * pow(4, -1, 3) % 3, (-5 * pow(8, -1, 3)) % 3)
    assert reduce_point(E37, P, 2) == INFINITY
    with pytest.raises(InvalidPrimeError):
        reduce_point(E37, P, 37)


def test_singular_model_rejected():
    with pytest.raises(CurveDataError):
        WeierstrassCurve(0, 0, 0, 0, 0, N=1)


def test_conductor_must_divide_into_discriminant():
    with pytest.raises(CurveDataError):
        WeierstrassCurve(0, -1, 1, -10, -20, N=13)


def test_periods_11a1():
    lattice = real_periods(E11, 30)
    assert abs(lattice.omega_plus - mp.mpf("1.26920930427955342168879461")) < mp.mpf(10) ** -12
    assert not lattice.rectangular
    assert lattice_index(lattice) == 2


def test_periods_37a1_rectangular():
    lattice = real_periods(E37, 30)
    assert lattice.rectangular
    assert mp.re(lattice.omega_minus) == 0
    assert lattice_index(lattice) == 1


def test_cyclicity_density_bounds():
    everything = cyclicity_density([], 97)
    fewer = cyclicity_density([2, 3], 97)
    assert 0 < everything < fewer < 1
