from fractions import Fraction
from math import gcd

import pytest
from hypothesis import given, settings, strategies as st

from mtlab.errors import GroupTooLargeError
from mtlab.filtration import p_local_membership
from mtlab.group_ring import characters, modulus_quotient, units_group
from mtlab.theta import (
    THETA_SCHEMA,
    ThetaElement,
    atkin_lehner_partner,
    build_theta,
    character_interpolation_residual,
    check_functional_equation,
    check_norm_relation,
    euler_operator,
    theta_p_part,
)

NORM_GRID_11 = [(S, ell) for S in (1, 3, 7, 21) for ell in (3, 7, 13, 19) if S % ell]
NORM_GRID_37 = [(S, ell) for S in (1, 5) for ell in (3, 5, 11) if S % ell]


def test_theta_one_is_the_l_ratio(ctx11, ctx37):
    assert build_theta(ctx11.eig, 1).coefficient(1) == Fraction(1, 5)
    assert build_theta(ctx37.eig, 1).element.is_zero()


def test_denominators_come_from_torsion(ctx11):
    theta = build_theta(ctx11.eig, 5)
    assert theta.denominator_primes <= {5}
    assert theta.element.scale(5).denominator() == 1


def test_group_size_limit(ctx11):
    with pytest.raises(GroupTooLargeError):
        build_theta(ctx11.eig, 101, max_group_order=50)


@pytest.mark.parametrize("S, ell", NORM_GRID_11 + [(3, 11)])
def test_norm_relation_11a1(ctx11, S, ell):
    check = check_norm_relation(ctx11.eig, S, ell)
    assert check.holds, check.residual


@pytest.mark.parametrize("S, ell", NORM_GRID_37)
def test_norm_relation_37a1(ctx37, S, ell):
    assert check_norm_relation(ctx37.eig, S, ell).holds


def test_norm_relation_arguments(ctx11):
    with pytest.raises(ValueError):
        check_norm_relation(ctx11.eig, 3, 9)
    with pytest.raises(ValueError):
        check_norm_relation(ctx11.eig, 21, 7)


def test_shared_theta_cache(ctx11):
    thetas = {}
    check_norm_relation(ctx11.eig, 3, 7, thetas)
    assert set(thetas) == {3, 21}
    assert check_norm_relation(ctx11.eig, 3, 13, thetas).holds
    assert set(thetas) == {3, 21, 39}


def test_augmentation_cascade(ctx11):
    profile = ctx11.profile
    theta_1 = build_theta(ctx11.eig, 1).element.augmentation()
    assert build_theta(ctx11.eig, 3).element.augmentation() == Fraction(-3, 5)
    for S in (3, 7, 21, 39):
        expected = theta_1
        for ell in {3: [3], 7: [7], 21: [3, 7], 39: [3, 13]}[S]:
            expected *= profile.a(ell) - 1 - profile.epsilon(ell)
        assert build_theta(ctx11.eig, S).element.augmentation() == expected


def test_euler_operator_augmentation(ctx11):
    profile = ctx11.profile
    operator = euler_operator(profile, 7, 13)
    assert operator.augmentation() == profile.a(13) - 2
    bad = euler_operator(profile, 3, 11)
    assert bad.augmentation() == profile.a(11) - 1


@pytest.mark.parametrize("S", [5, 7, 35])
def test_functional_equation(contexts, S):
    for ctx in contexts.values():
        theta = build_theta(ctx.eig, S)
        assert check_functional_equation(theta, ctx.epsilon).holds
        wrong = check_functional_equation(theta, -ctx.epsilon)
        assert wrong.residual == theta.element.scale(2)


def test_functional_equation_needs_coprime_modulus(ctx11):
    theta = build_theta(ctx11.eig, 11)
    with pytest.raises(ValueError):
        check_functional_equation(theta, 1)
    with pytest.raises(ValueError):
        check_functional_equation(build_theta(ctx11.eig, 3), 0)


def test_atkin_lehner_pairing(contexts):
    for ctx in contexts.values():
        N = ctx.profile.N
        theta = build_theta(ctx.eig, 7)
        for a in range(1, 7):
            partner = atkin_lehner_partner(N, a, 7)
            assert (N * a * partner) % 7 == 6
            assert theta.coefficient(a) == ctx.epsilon * theta.coefficient(partner)
    assert atkin_lehner_partner(11, 0, 1) == 0


@pytest.mark.parametrize("label", ["11a1", "37a1"])
@settings(max_examples=50)
@given(data=st.data())
def test_atkin_lehner_pairing_random(contexts, label, data):
    ctx = contexts[label]
    N = ctx.profile.N
    S = data.draw(st.integers(min_value=2, max_value=120).filter(lambda s: gcd(s, N) == 1), label="S")
    a = data.draw(st.integers(min_value=1, max_value=S - 1).filter(lambda x: gcd(x, S) == 1), label="a")
    theta = build_theta(ctx.eig, S)
    partner = atkin_lehner_partner(N, a, S)
    assert (N * a * partner + 1) % S == 0
    assert theta.coefficient(a) == ctx.epsilon * theta.coefficient(partner)
    assert check_functional_equation(theta, ctx.epsilon).holds


def calibration_pair(label, chi):
    return label == "11a1" and chi.modulus == 5 and chi.order == 2


@pytest.mark.parametrize("S", [5, 7])
def test_character_interpolation(contexts, S):
    checked = 0
    for label, ctx in contexts.items():
        theta = build_theta(ctx.eig, S)
        for chi in characters(units_group(S)):
            if not chi.is_primitive or calibration_pair(label, chi):
                continue
            residual = character_interpolation_residual(theta, chi, ctx.periods, ctx.epsilon)
            assert abs(residual) < 1e-6, (label, str(chi))
            checked += 1
    assert checked >= 5


def test_character_must_live_on_theta_group(ctx11):
    theta = build_theta(ctx11.eig, 7)
    chi = next(c for c in characters(units_group(5)) if c.is_primitive)
    with pytest.raises(ValueError):
        character_interpolation_residual(theta, chi, ctx11.periods, ctx11.epsilon)


def test_payload_round_trip(ctx11, ctx37):
    theta = build_theta(ctx11.eig, 35)
    payload = theta.to_payload()
    assert payload["schema"] == THETA_SCHEMA
    assert payload["coefficients"]["1"] == str(theta.coefficient(1))
    restored = ThetaElement.from_payload(payload, ctx11.profile)
    assert restored.element == theta.element
    assert restored.denominator_primes == theta.denominator_primes
    with pytest.raises(ValueError):
        ThetaElement.from_payload(payload, ctx37.profile)
    with pytest.raises(ValueError):
        ThetaElement.from_payload({**payload, "schema": "mtlab.theta/0"}, ctx11.profile)


def test_p_part(ctx11):
    theta = build_theta(ctx11.eig, 7)
    trivial = theta_p_part(theta, 5)
    assert trivial.group.size == 1
    assert trivial.coeffs[0] == theta.element.augmentation()
    three = theta_p_part(theta, 3)
    assert three.group.orders == (3,)
    assert three.group.labels == (7,)
    assert three.augmentation() == theta.element.augmentation()
    with pytest.raises(ValueError):
        theta_p_part(theta, 2)


def test_rank_one_theta_lies_in_augmentation_ideal(ctx37):
    theta = build_theta(ctx37.eig, 13)
    assert theta.element.augmentation() == 0
    cleared = theta.element.scale(theta.element.denominator())
    for p in (2, 3, 5, 7):
        assert p_local_membership(cleared, 1, p)


def test_theta_pushes_down_consistently(ctx37):
    upper = build_theta(ctx37.eig, 15)
    pushed = modulus_quotient(upper.group, 5).push(upper.element)
    assert pushed.augmentation() == upper.element.augmentation()
