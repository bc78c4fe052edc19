from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, settings, strategies as st

from mtlab.config import DEFAULT_CURVE_DB
from mtlab.data import find_curve
from mtlab.derivatives import (
    DerivativeDescriptor,
    WeightContext,
    apply_derivative,
    congruence_filtration_check,
    derivative_element,
    single_derivative_element,
    taylor_expansion,
    taylor_reconstruction_holds,
    weight,
)
from mtlab.errors import SubgroupError, SupportMismatchError
from mtlab.group_ring import AbelianGroupPresentation, GroupRingElement, cyclic_group, units_group


def elements_on(group, bound=5):
    coefficient = st.integers(min_value=-bound, max_value=bound)
    return st.lists(coefficient, min_size=group.size, max_size=group.size).map(
        lambda cs: GroupRingElement(group, tuple(Fraction(c) for c in cs))
    )


@pytest.mark.parametrize("n", [2, 3, 5, 8, 16, 27, 64])
def test_sigma_minus_one_times_derivative(n):
    group = cyclic_group(n)
    x = GroupRingElement.sigma_minus_one(group)
    sigma = GroupRingElement.monomial(group, group.generator(0))
    for k in sorted({1, 2, n // 2, n - 1}):
        left = x * single_derivative_element(n, k)
        right = GroupRingElement.monomial(group, 0, comb(n, k)) - sigma * single_derivative_element(n, k - 1)
        assert left == right


@pytest.mark.parametrize("n", [3, 7, 12])
def test_augmentation_is_hockey_stick(n):
    for k in range(n):
        assert single_derivative_element(n, k).augmentation() == comb(n, k + 1)


def test_degenerate_orders():
    group = cyclic_group(6)
    assert single_derivative_element(6, 0) == GroupRingElement.norm_element(group)
    assert single_derivative_element(6, 6).is_zero()
    assert single_derivative_element(6, 9).is_zero()
    assert single_derivative_element(6, -1).is_zero()
    with pytest.raises(ValueError):
        single_derivative_element(0, 0)


def test_descriptor_statistics():
    D = DerivativeDescriptor(((7, 1), (13, 0), (19, 2)), (3, 3, 9))
    assert D.support == 7 * 13 * 19
    assert D.conductor == 133
    assert D.order == 3
    assert D.modulus == 3
    assert D.exponent(19) == 2
    assert D.exponent(5) == 0
    assert str(D) == "D_7^(1)*D_13^(0)*D_19^(2)"
    assert DerivativeDescriptor(((7, 0),), (3,)).modulus == 1


@pytest.mark.parametrize(
    "terms, orders, powers",
    [
        (((7, 1), (7, 2)), (3, 3), ()),
        (((7, 3),), (3,), ()),
        (((7, 1),), (3, 3), ()),
        (((7, 1),), (6,), (2,)),
    ],
)
def test_invalid_descriptors(terms, orders, powers):
    with pytest.raises(ValueError):
        DerivativeDescriptor(terms, orders, powers)


def test_descriptor_for_unit_group():
    group = units_group(91)
    D = DerivativeDescriptor.for_group(group, {13: 5, 7: 2})
    assert D.terms == ((7, 2), (13, 5))
    assert D.orders == (6, 12)
    with pytest.raises(SupportMismatchError):
        DerivativeDescriptor.for_group(group, {5: 1})
    with pytest.raises(SupportMismatchError):
        DerivativeDescriptor.for_group(units_group(16), {2: 1})


@given(elements_on(units_group(91), bound=3))
def test_merged_descriptor_acts_like_both(theta):
    group = theta.group
    first = DerivativeDescriptor.for_group(group, {7: 2})
    second = DerivativeDescriptor.for_group(group, {13: 5})
    merged = first.merged(second)
    assert merged.terms == ((7, 2), (13, 5))
    assert apply_derivative(merged, theta) == apply_derivative(first, apply_derivative(second, theta))


def test_overlapping_supports_do_not_merge():
    D = DerivativeDescriptor(((7, 1),), (3,))
    with pytest.raises(SupportMismatchError):
        D.merged(DerivativeDescriptor(((7, 2),), (3,)))


def test_derivative_requires_matching_factor_order():
    group = AbelianGroupPresentation((3,), labels=(7,))
    with pytest.raises(SupportMismatchError):
        derivative_element(DerivativeDescriptor(((7, 1),), (9,)), group)
    with pytest.raises(SupportMismatchError):
        derivative_element(DerivativeDescriptor(((13, 1),), (3,)), group)


def test_generator_power_changes_sigma():
    group = AbelianGroupPresentation((3,), labels=(7,))
    D = DerivativeDescriptor(((7, 1),), (3,), (2,))
    # sigma = g^2, so D = sigma + 2 sigma^2 = g^2 + 2 g
    expected = GroupRingElement.from_mapping(group, {1: 2, 2: 1})
    assert derivative_element(D, group) == expected


def test_taylor_expansion_on_order_two():
    group = cyclic_group(2)
    expansion = taylor_expansion(GroupRingElement.monomial(group, 0))
    assert expansion == {
        (0,): GroupRingElement.norm_element(group),
        (1,): GroupRingElement.monomial(group, 1),
    }


def test_taylor_expansion_drops_zero_terms():
    group = cyclic_group(3)
    assert taylor_expansion(GroupRingElement.zero(group)) == {}


@settings(max_examples=100)
@given(elements_on(AbelianGroupPresentation((3, 5)), bound=6))
def test_taylor_reconstruction(a):
    assert taylor_reconstruction_holds(a)


def test_taylor_reconstruction_detects_tampering():
    group = cyclic_group(4)
    a = GroupRingElement.from_mapping(group, {0: 1, 1: -2, 3: 5})
    expansion = taylor_expansion(a)
    expansion[(1,)] = expansion[(1,)] + GroupRingElement.monomial(group, 0)
    assert not taylor_reconstruction_holds(a, expansion)


def test_congruence_premise_failure_is_consistent():
    group = AbelianGroupPresentation((3,), labels=(7,))
    report = congruence_filtration_check(GroupRingElement.monomial(group, 0), 2, 3)
    assert report.depth == 2
    assert report.failed_premises == ["D_7^(1)"]
    assert report.failed_premises_alternate == ["D_7^(1)"]
    assert not report.premises_hold
    assert not report.conclusion_holds
    assert report.consistent


def test_congruence_for_norm_element():
    group = AbelianGroupPresentation((3,), labels=(7,))
    report = congruence_filtration_check(GroupRingElement.norm_element(group), 2, 3)
    assert report.premises_hold
    assert report.conclusion_holds
    assert report.consistent


@pytest.mark.parametrize("orders, labels", [((9,), (19,)), ((3, 3), (7, 13))])
@given(data=st.data(), t=st.integers(min_value=1, max_value=3))
def test_congruence_never_inconsistent(orders, labels, data, t):
    group = AbelianGroupPresentation(orders, labels=labels)
    a = data.draw(elements_on(group, bound=4))
    assert congruence_filtration_check(a, t, 3).consistent


def test_congruence_argument_checks():
    labelled = AbelianGroupPresentation((3,), labels=(7,))
    one = GroupRingElement.monomial(labelled, 0)
    with pytest.raises(ValueError):
        congruence_filtration_check(one, 0, 3)
    mixed = AbelianGroupPresentation((6,), labels=(7,))
    with pytest.raises(SubgroupError):
        congruence_filtration_check(GroupRingElement.monomial(mixed, 0), 1, 3)
    with pytest.raises(SupportMismatchError):
        congruence_filtration_check(GroupRingElement.monomial(cyclic_group(3), 0), 1, 3)


def test_weight_subtracts_euler_divisible_primes():
    profile = find_curve(DEFAULT_CURVE_DB, "701a1")
    ctx = WeightContext(q=5, profile=profile)
    assert ctx.splits(251)
    assert ctx.euler_divisible(251)
    assert not ctx.splits(3)
    assert weight(DerivativeDescriptor(((251, 0),), (5,)), ctx) == -1
    assert weight(DerivativeDescriptor(((3, 1), (251, 0)), (2, 5)), ctx) == 0
    assert weight(DerivativeDescriptor(((3, 1),), (2,)), ctx) == 1
