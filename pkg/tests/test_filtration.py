from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from mtlab.errors import GroupTooLargeError, MembershipError
from mtlab.filtration import (
    AugmentationFiltration,
    VanishingOrder,
    aug_power_membership,
    leading_class_mod_p,
    leading_image,
    oracle_agrees,
    ord_aug,
    ord_aug_p,
    p_local_membership,
    p_local_orders,
)
from mtlab.group_ring import AbelianGroupPresentation, GroupRingElement, cyclic_group

ORACLE_GROUPS = [
    (2,), (3,), (4,), (5,), (6,), (8,), (9,), (12,), (16,), (24,),
    (2, 2), (2, 4), (2, 6), (3, 3), (2, 8), (4, 4), (2, 12), (3, 6),
    (2, 2, 2), (2, 2, 4), (2, 2, 6), (2, 2, 2, 2),
]


def x_power(group, t, factor=0):
    x = GroupRingElement.sigma_minus_one(group, factor)
    result = GroupRingElement.monomial(group, 0)
    for _ in range(t):
        result = result * x
    return result


def zero_augmentation(group, bound=4):
    coefficient = st.integers(min_value=-bound, max_value=bound)

    def build(cs):
        coeffs = [Fraction(c) for c in cs]
        coeffs[0] -= sum(coeffs)
        return GroupRingElement(group, tuple(coeffs))

    return st.lists(coefficient, min_size=group.size, max_size=group.size).map(build)


def test_cyclic_of_order_two():
    group = cyclic_group(2)
    theta = x_power(group, 1).scale(4)
    assert aug_power_membership(theta, 3)
    assert not aug_power_membership(theta, 4)
    assert ord_aug(theta, 6) == VanishingOrder(3)


@pytest.mark.parametrize("p", [3, 5])
def test_p_times_sigma_minus_one(p):
    theta = x_power(cyclic_group(p), 1).scale(p)
    assert aug_power_membership(theta, p)


def test_nine_times_sigma_minus_one_in_cube():
    theta = x_power(cyclic_group(9), 1).scale(9)
    assert aug_power_membership(theta, 3)


@pytest.mark.parametrize("n", [4, 7, 9])
def test_powers_of_x_have_exact_order(n):
    group = cyclic_group(n)
    for t in range(1, 4):
        assert ord_aug(x_power(group, t), 5) == VanishingOrder(t)


def test_order_at_cap_and_nonzero_augmentation():
    group = cyclic_group(5)
    assert ord_aug(GroupRingElement.zero(group), 3) == VanishingOrder(3, at_cap=True)
    assert ord_aug(GroupRingElement.monomial(group, 1), 3) == VanishingOrder(0)
    assert str(VanishingOrder(3, at_cap=True)) == ">=3"


def test_non_integral_input_is_refused():
    theta = x_power(cyclic_group(3), 1).scale(Fraction(1, 2))
    with pytest.raises(MembershipError):
        aug_power_membership(theta, 1)


def test_p_local_membership_ignores_other_denominators():
    group = cyclic_group(6)
    theta = x_power(group, 2).scale(Fraction(1, 2))
    assert p_local_membership(theta, 2, 3)
    assert not p_local_membership(theta, 1, 2)
    assert ord_aug_p(theta, 4, 3).order >= 2


def test_bulk_orders_agree_with_single_prime():
    group = AbelianGroupPresentation((6, 4))
    theta = x_power(group, 2, 0) * x_power(group, 1, 1) + x_power(group, 1, 0).scale(12)
    bulk = p_local_orders(theta, 5, [2, 3])
    for p in (2, 3):
        assert bulk[p] == ord_aug_p(theta, 5, p)


def test_quotient_invariants():
    assert AugmentationFiltration((6,), 2).elementary_divisors(1) == [6]
    assert sorted(AugmentationFiltration((2, 2), 2).elementary_divisors(1)) == [2, 2]


def test_leading_image_of_generator():
    group = cyclic_group(5)
    image = leading_image(x_power(group, 1), 1, p=5)
    assert image.invariants == (5,)
    assert not image.is_zero
    assert image.order == 5
    assert not image.is_zero_mod_p
    with pytest.raises(MembershipError):
        leading_image(x_power(group, 1), 2)


def test_leading_class_mod_p():
    group = cyclic_group(5)
    assert leading_class_mod_p(x_power(group, 1).scale(2), 1, 5) != (0,)
    assert leading_class_mod_p(x_power(group, 1).scale(5), 1, 5) == (0,)
    assert leading_class_mod_p(GroupRingElement.monomial(group, 0, 3), 0, 5) == (3,)


@pytest.mark.parametrize("orders", ORACLE_GROUPS)
def test_lattice_oracle(orders):
    group = AbelianGroupPresentation(orders)
    for t in range(5):
        assert oracle_agrees(group, t)


def test_oracle_size_limit():
    with pytest.raises(GroupTooLargeError):
        oracle_agrees(cyclic_group(25), 1)


@given(zero_augmentation(AbelianGroupPresentation((4, 2))))
def test_multiplying_by_x_raises_the_order(theta):
    cap = 6
    before = ord_aug(theta, cap)
    after = ord_aug(theta * GroupRingElement.sigma_minus_one(theta.group, 1), cap)
    assert before.order >= 1
    assert after.order >= min(before.order + 1, cap)


@given(zero_augmentation(cyclic_group(9)), zero_augmentation(cyclic_group(9)))
def test_orders_are_superadditive(a, b):
    cap = 7
    oa, ob = ord_aug(a, cap), ord_aug(b, cap)
    assert ord_aug(a * b, cap).order >= min(oa.order + ob.order, cap)
