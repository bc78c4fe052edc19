from fractions import Fraction
from math import gcd

import pytest
from hypothesis import assume, given, settings, strategies as st

from mtlab.errors import InvalidPrimeError, LevelTooLargeError
from mtlab.modular_symbols import (
    ManinSymbolSpace,
    P1List,
    build_space,
    cuspidal_hecke_charpoly,
    cusps_x0,
    eval_symbol,
    genus_x0,
    manin_path,
)
from mtlab.theta import atkin_lehner_partner


@pytest.mark.parametrize("N, genus, cusps", [(11, 1, 2), (37, 2, 2), (14, 1, 4), (23, 2, 2), (36, 1, 12)])
def test_genus_formula(N, genus, cusps):
    assert genus_x0(N) == genus
    assert cusps_x0(N) == cusps


@pytest.mark.parametrize("N, cuspidal", [(11, 2), (37, 4)])
def test_cuspidal_dimension(N, cuspidal):
    space = build_space(N)
    assert space.cuspidal_dimension == cuspidal == 2 * genus_x0(N)


@pytest.mark.parametrize("N", [11, 14, 15, 23, 37, 43])
def test_dimension_matches_genus_and_cusps(N):
    space = build_space(N)
    assert space.cuspidal_dimension == 2 * genus_x0(N)
    assert space.dimension == 2 * genus_x0(N) + cusps_x0(N) - 1


def test_p1_list_size():
    assert len(P1List(11)) == 12
    assert len(P1List(6)) == 12


def test_level_limit():
    with pytest.raises(LevelTooLargeError):
        build_space(6000)


def test_hecke_charpolys():
    assert cuspidal_hecke_charpoly(build_space(11), 2) == [1, 4, 4]
    assert cuspidal_hecke_charpoly(build_space(37), 2) == [1, 4, 4, 0, 0]
    with pytest.raises(InvalidPrimeError):
        cuspidal_hecke_charpoly(build_space(11), 11)


def test_space_payload_reloads():
    space = build_space(37)
    again = ManinSymbolSpace.from_payload(space.to_payload())
    assert again.cuspidal_basis == space.cuspidal_basis
    assert again.manin == space.manin


def test_manin_path_of_infinity_cusp():
    assert manin_path(11, 0, 1) == [(-1, 0)]
    with pytest.raises(ValueError):
        manin_path(11, 2, 4)


def test_normalized_symbol_11a1(ctx11):
    plus, minus = eval_symbol(ctx11.eig, 0, 1)
    assert plus == Fraction(1, 5)
    assert minus == 0
    assert ctx11.eig.normalized


def test_rank_one_symbol_vanishes(ctx37):
    assert eval_symbol(ctx37.eig, 0, 1) == (0, 0)


@given(st.integers(min_value=1, max_value=60), st.integers(min_value=-200, max_value=200))
def test_symbols_depend_on_residue_only(ctx11, S, a):
    assume(gcd(a, S) == 1)
    eig = ctx11.eig
    assert eval_symbol(eig, a, S) == eval_symbol(eig, a % S, S)


@pytest.mark.parametrize("label", ["11a1", "37a1"])
@settings(max_examples=50)
@given(S=st.integers(min_value=2, max_value=80), a=st.integers(min_value=1, max_value=79))
def test_symbol_parities(contexts, label, S, a):
    assume(a < S and gcd(a, S) == 1)
    eig = contexts[label].eig
    plus, minus = eval_symbol(eig, a, S)
    plus_neg, minus_neg = eval_symbol(eig, -a, S)
    assert plus_neg == plus
    assert minus_neg == -minus


@pytest.mark.parametrize("label", ["11a1", "37a1"])
@settings(max_examples=50)
@given(S=st.integers(min_value=2, max_value=120), a=st.integers(min_value=1, max_value=119))
def test_atkin_lehner_symmetry(contexts, label, S, a):
    context = contexts[label]
    N = context.profile.N
    assume(a < S and gcd(a, S) == 1 and gcd(S, N) == 1)
    partner = atkin_lehner_partner(N, a, S)
    plus, minus = eval_symbol(context.eig, a, S)
    plus_p, minus_p = eval_symbol(context.eig, partner, S)
    assert plus == context.epsilon * plus_p
    assert minus == context.epsilon * minus_p
