import mpmath as mp
import pytest

from mtlab.config import DEFAULT_CURVE_DB
from mtlab.data import parse_curve_file
from mtlab.errors import PrecisionError
from mtlab.group_ring import DirichletCharacter, characters, units_group
from mtlab.lseries import (
    REFLECTION_SIGN,
    AnalyticOracle,
    calibrate_reflection_sign,
    epsilon_sign,
    fourier_coefficients,
    l_value,
    symbol_value,
    term_count,
    twisted_l_value,
)
from mtlab.modular_symbols import eval_symbol

CURVES = {p.label: p for p in parse_curve_file(DEFAULT_CURVE_DB)}
TOLERANCE = mp.mpf(10) ** -10


@pytest.mark.parametrize("label, sign", [("11a1", 1), ("37a1", -1), ("389a1", 1), ("701a1", 1)])
def test_root_numbers(label, sign):
    assert epsilon_sign(CURVES[label]) == sign


@pytest.mark.parametrize("height", [1.05, 1.1, 1.2])
def test_root_number_ignores_test_height(height):
    assert epsilon_sign(CURVES["37a1"], height=height) == -1


def test_fourier_coefficients_11a1():
    assert fourier_coefficients(CURVES["11a1"]).upto(10) == [0, 1, -2, -1, 2, 1, 2, -2, 0, -2, -2]


def test_fourier_coefficients_extend_on_demand():
    coefficients = fourier_coefficients(CURVES["37a1"])
    head = coefficients.upto(20)
    assert coefficients.upto(200)[:21] == head
    assert coefficients.bound >= 200
    assert coefficients[6] == coefficients[2] * coefficients[3]


def test_l_ratio_11a1():
    oracle = AnalyticOracle(CURVES["11a1"], 30)
    assert abs(oracle.l_ratio() - mp.mpf("0.2")) < mp.mpf(10) ** -8


def test_l_value_vanishes_for_odd_sign():
    assert l_value(CURVES["37a1"]) == 0


def test_oracle_matches_exact_symbols(ctx11):
    for a in range(1, 7):
        plus, minus = ctx11.oracle.symbol(a, 7)
        exact_plus, exact_minus = eval_symbol(ctx11.eig, a, 7)
        assert abs(plus - mp.mpf(exact_plus.numerator) / exact_plus.denominator) < TOLERANCE
        assert abs(minus - mp.mpf(exact_minus.numerator) / exact_minus.denominator) < TOLERANCE


def test_symbol_value_arguments():
    profile = CURVES["11a1"]
    with pytest.raises(ValueError):
        symbol_value(profile, 2, 4)
    with pytest.raises(ValueError):
        symbol_value(profile, 1, 22)


def test_reflection_sign_calibration():
    quadratic = DirichletCharacter(units_group(5), (2,))
    assert quadratic.order == 2 and quadratic.is_primitive
    assert calibrate_reflection_sign(CURVES["11a1"], quadratic) == REFLECTION_SIGN


@pytest.mark.parametrize("label", ["11a1", "37a1"])
def test_twisted_value_is_independent_of_cutoff(label):
    profile = CURVES[label]
    for chi in characters(units_group(7)):
        if chi.is_trivial:
            continue
        first = twisted_l_value(profile, chi, height=1.0)
        second = twisted_l_value(profile, chi, height=1.25)
        assert abs(first - second) < TOLERANCE


def test_twisted_value_arguments():
    profile = CURVES["11a1"]
    trivial = DirichletCharacter(units_group(5), (0,))
    with pytest.raises(ValueError):
        twisted_l_value(profile, trivial)
    eleven = DirichletCharacter(units_group(11), (1,))
    with pytest.raises(ValueError):
        twisted_l_value(profile, eleven)


def test_precision_limits():
    with pytest.raises(PrecisionError):
        l_value(CURVES["11a1"], precision=5)
    with pytest.raises(PrecisionError):
        AnalyticOracle(CURVES["11a1"], precision=500)


def test_term_count_grows_with_precision_and_modulus():
    assert term_count(37, 30) < term_count(37, 60)
    assert term_count(37, 30) < term_count(37, 30, m=7)
    assert term_count(37, 30, t=0.5) == term_count(37, 30, t=2.0)
