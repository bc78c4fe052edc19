from fractions import Fraction
from math import gcd

import mpmath as mp
import pytest
from hypothesis import given, strategies as st

from mtlab.errors import PrecisionError, SubgroupError
from mtlab.group_ring import (
    AbelianGroupPresentation,
    DirichletCharacter,
    GroupRingElement,
    characters,
    cyclic_group,
    evaluate_character,
    gauss_sum,
    modulus_quotient,
    plus_quotient,
    quotient_pushforward,
    subgroup_quotient,
    sylow_quotient,
    units_group,
)


def elements(group, bound=5):
    coefficient = st.integers(min_value=-bound, max_value=bound)
    return st.lists(coefficient, min_size=group.size, max_size=group.size).map(
        lambda cs: GroupRingElement(group, tuple(Fraction(c) for c in cs))
    )


@pytest.mark.parametrize("S", [1, 2, 3, 8, 15, 21, 35, 48, 91])
def test_units_group_residues(S):
    group = units_group(S)
    units = sorted(a for a in range(S) if gcd(a, S) == 1) if S > 1 else [0]
    assert sorted(group.residue_table) == units
    for index, a in enumerate(group.residue_table):
        assert group.element_of_residue(a) == index


def test_units_group_labels():
    group = units_group(7 * 13)
    assert group.orders == (6, 12)
    assert group.labels == (7, 13)
    assert group.factor_of_label(13) == 1
    with pytest.raises(KeyError):
        group.factor_of_label(5)


def test_group_law():
    group = AbelianGroupPresentation((4, 6))
    for i in range(group.size):
        assert group.multiply(i, group.inverse(i)) == 0
        assert group.power(i, group.element_order(i)) == 0


def test_multiplication_of_sigma_minus_one():
    group = cyclic_group(3)
    x = GroupRingElement.sigma_minus_one(group)
    cube = x * x * x
    # (s - 1)^3 = s^3 - 3 s^2 + 3 s - 1 = -3 s^2 + 3 s
    assert cube == GroupRingElement.from_mapping(group, {2: -3, 1: 3})


@given(elements(units_group(21)))
def test_pushforward_keeps_augmentation(theta):
    for n in (1, 3, 7):
        assert modulus_quotient(theta.group, n).push(theta).augmentation() == theta.augmentation()
    assert sylow_quotient(theta.group, 3).push(theta).augmentation() == theta.augmentation()


@given(elements(units_group(15)), elements(units_group(15)))
def test_pushforward_is_a_ring_map(a, b):
    quotient = modulus_quotient(a.group, 5)
    assert quotient.push(a * b) == quotient.push(a) * quotient.push(b)


def test_modulus_quotient_rejects_non_divisor():
    with pytest.raises(SubgroupError):
        modulus_quotient(units_group(21), 5)


def test_sylow_quotient_shape():
    quotient = sylow_quotient(units_group(7 * 13), 3)
    assert quotient.target.orders == (3, 3)
    assert quotient.target.labels == (7, 13)
    trivial = sylow_quotient(units_group(7), 5)
    assert trivial.target.size == 1


def test_plus_and_subgroup_quotients():
    group = units_group(35)
    assert plus_quotient(group).target.size == group.size // 2
    whole = subgroup_quotient(group, [group.generator(i) for i in range(group.rank)])
    assert whole.target.size == 1
    theta = GroupRingElement.monomial(group, group.element_of_residue(2), 3)
    assert quotient_pushforward(theta, modulus=5) == modulus_quotient(group, 5).push(theta)
    with pytest.raises(ValueError):
        quotient_pushforward(theta)


def test_involution_and_augmentation():
    group = units_group(7)
    theta = GroupRingElement.from_mapping(group, {group.element_of_residue(3): 2, 0: -1})
    flipped = theta.involution()
    assert flipped.coefficient_at_residue(5) == 2
    assert flipped.augmentation() == theta.augmentation() == 1


def test_tensor_shape():
    g, h = cyclic_group(2), cyclic_group(3)
    product = GroupRingElement.monomial(g, 1).tensor(GroupRingElement.monomial(h, 2, 5))
    assert product.group.orders == (2, 3)
    assert product.support() == {1 * 3 + 2: 5}


@pytest.mark.parametrize("S", [5, 7, 12, 15])
def test_character_orthogonality(S):
    group = units_group(S)
    chars = list(characters(group))
    assert len(chars) == group.size
    assert chars[0].is_trivial
    for index in range(1, group.size):
        total = sum((chi.value(index) for chi in chars), mp.mpc(0))
        assert abs(total) < 1e-10


@pytest.mark.parametrize("S", [5, 7, 8, 13])
def test_gauss_sum_norm(S):
    for chi in characters(units_group(S)):
        if chi.is_primitive:
            assert abs(abs(gauss_sum(chi)) ** 2 - S) < 1e-10


def test_gauss_sum_keeps_requested_digits():
    chi = DirichletCharacter(units_group(13), (1,))
    tau = gauss_sum(chi, 40)
    with mp.workdps(45):
        assert abs(abs(tau) ** 2 - 13) < mp.mpf(10) ** -35
    theta = GroupRingElement.norm_element(units_group(13))
    trivial = DirichletCharacter(units_group(13), (0,))
    with mp.workdps(45):
        assert abs(evaluate_character(theta, trivial, 40) - 12) < mp.mpf(10) ** -35


@pytest.mark.parametrize("precision", [0, 51])
def test_character_sums_reject_precision(precision):
    chi = DirichletCharacter(units_group(5), (1,))
    with pytest.raises(PrecisionError):
        gauss_sum(chi, precision)
    with pytest.raises(PrecisionError):
        evaluate_character(GroupRingElement.norm_element(units_group(5)), chi, precision)


def test_conductor_and_primitive():
    group = units_group(15)
    induced = next(chi for chi in characters(group) if chi.conductor == 5 and chi.order == 2)
    assert not induced.is_primitive
    primitive = induced.primitive()
    assert primitive.modulus == 5
    for a in (1, 2, 4, 7, 8, 11, 13, 14):
        assert abs(primitive.value_of_residue(a) - induced.value_of_residue(a)) < 1e-10
    assert induced.value_of_residue(5) == 0


def test_parity():
    quadratic_mod_5 = DirichletCharacter(units_group(5), (2,))
    quartic_mod_5 = DirichletCharacter(units_group(5), (1,))
    assert quadratic_mod_5.parity == 1
    assert quartic_mod_5.parity == -1
    assert quartic_mod_5.conjugate().exponents == (3,)


def test_character_of_group_ring_element():
    group = units_group(7)
    chi = DirichletCharacter(group, (1,))
    theta = GroupRingElement.norm_element(group)
    assert abs(evaluate_character(theta, chi)) < 1e-10
    assert abs(evaluate_character(theta, DirichletCharacter(group, (0,))) - 6) < 1e-10
