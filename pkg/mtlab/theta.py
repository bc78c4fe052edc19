"""Mazur-Tate elements theta_S in Q[G_S] and the identities they satisfy."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Any, Optional

import mpmath as mp

from .ec_arithmetic import CurveProfile, PeriodLattice
from .errors import GroupTooLargeError
from .group_ring import (
    DirichletCharacter,
    GroupRingElement,
    evaluate_character,
    gauss_sum,
    modulus_quotient,
    sylow_quotient,
    units_group,
)
from .lseries import twisted_l_value
from .modular_symbols import EigenSymbol, eval_symbol
from .utilities import fraction_text, is_prime, is_squarefree, prime_divisors

logger = logging.getLogger(__name__)

THETA_SCHEMA = "mtlab.theta/1"


@dataclass(frozen=True)
class ThetaElement:
    profile: CurveProfile
    S: int
    element: GroupRingElement
    denominator_primes: frozenset[int]

    @property
    def group(self):
        return self.element.group

    @property
    def squarefree(self) -> bool:
        return is_squarefree(self.S)

    def coefficient(self, a: int) -> Fraction:
        return self.element.coefficient_at_residue(a)

    def to_payload(self) -> dict[str, Any]:
        residues = self.group.residue_table
        coefficients = {str(a): fraction_text(c) for a, c in sorted(zip(residues, self.element.coeffs))}
        return {"schema": THETA_SCHEMA, "curve": self.profile.label, "S": self.S, "coefficients": coefficients}

    @classmethod
    def from_payload(cls, payload: dict[str, Any], profile: CurveProfile) -> "ThetaElement":
        if payload.get("schema") != THETA_SCHEMA:
            raise ValueError(f"unsupported theta schema {payload.get('schema')!r}")
        if payload["curve"] != profile.label:
            raise ValueError(f"payload is for {payload['curve']}, not {profile.label}")
        S = int(payload["S"])
        group = units_group(S)
        values = {group.element_of_residue(int(a)): Fraction(c) for a, c in payload["coefficients"].items()}
        element = GroupRingElement.from_mapping(group, values)
        return cls(profile, S, element, element.denominator_primes())


def build_theta(eig: EigenSymbol, S: int, max_group_order: int = 5000) -> ThetaElement:
    """theta_S = sum over a in (Z/S)^x of ([a/S]^+ + [a/S]^-) delta_a."""
    profile = eig.profile
    if profile is None:
        raise ValueError("the eigensymbol carries no curve profile")
    if not eig.normalized:
        logger.warning("%s: building theta_%d from an unnormalized eigensymbol", profile.label, S)
    group = units_group(S)
    if group.size > max_group_order:
        raise GroupTooLargeError(f"|G_{S}| = {group.size} exceeds the limit {max_group_order}")
    if not is_squarefree(S):
        logger.info("%s: S = %d is not square-free; theorem checks will not apply", profile.label, S)
    coeffs = []
    for a in group.residue_table:
        plus, minus = eval_symbol(eig, a, S)
        coeffs.append(plus + minus)
    element = GroupRingElement(group, tuple(coeffs))
    primes = element.denominator_primes()
    allowed = set(prime_divisors(profile.torsion_order))
    if profile.manin_constant_one and not primes <= allowed:
        logger.warning(
            "%s: theta_%d has denominators at %s outside the torsion primes %s",
            profile.label,
            S,
            sorted(primes),
            sorted(allowed),
        )
    return ThetaElement(profile, S, element, primes)


@dataclass(frozen=True)
class IdentityCheck:
    holds: bool
    residual: GroupRingElement
    applicable: bool = True
    reason: str = ""


def euler_operator(profile: CurveProfile, S: int, ell: int) -> GroupRingElement:
    """-delta_l (1 - a_l delta_l^-1 + eps(l) delta_l^-2) = -delta_l + a_l - eps(l) delta_l^-1 in Z[G_S]."""
    group = units_group(S)
    frob = group.element_of_residue(ell)
    inverse = group.inverse(frob)
    values = {0: profile.a(ell)}
    operator = GroupRingElement.from_mapping(group, values)
    operator = operator - GroupRingElement.monomial(group, frob)
    return operator - GroupRingElement.monomial(group, inverse, profile.epsilon(ell))


def check_norm_relation(eig: EigenSymbol, S: int, ell: int, thetas: Optional[dict[int, ThetaElement]] = None) -> IdentityCheck:
    """pi_{Sl/S}(theta_{Sl}) against -Fr_l (1 - a_l Fr_l^-1 + eps(l) Fr_l^-2) theta_S."""
    if not is_prime(ell):
        raise ValueError(f"{ell} is not prime")
    if S % ell == 0:
        raise ValueError(f"{ell} divides S = {S}")
    thetas = {} if thetas is None else thetas
    for modulus in (S, S * ell):
        if modulus not in thetas:
            thetas[modulus] = build_theta(eig, modulus)
    lower = thetas[S].element
    pushed = modulus_quotient(thetas[S * ell].element.group, S).push(thetas[S * ell].element)
    expected = euler_operator(eig.profile, S, ell) * lower
    residual = pushed - expected
    return IdentityCheck(residual.is_zero(), residual)


def atkin_lehner_partner(N: int, a: int, S: int) -> int:
    """a' with a a' N = -1 mod S."""
    if S == 1:
        return 0
    return (-pow(N * a, -1, S)) % S


def check_functional_equation(theta: ThetaElement, epsilon: int) -> IdentityCheck:
    """theta_S == eps delta_{-N}^{-1} iota(theta_S); needs gcd(S, N) = 1."""
    N = theta.profile.N
    if gcd(theta.S, N) != 1:
        raise ValueError(f"gcd(S, N) = gcd({theta.S}, {N}) != 1")
    if epsilon not in (1, -1):
        raise ValueError("epsilon must be +1 or -1")
    group = theta.group
    shift = group.inverse(group.element_of_residue(-N))
    expected = theta.element.involution().shift(shift).scale(epsilon)
    residual = theta.element - expected
    return IdentityCheck(residual.is_zero(), residual)


def theta_p_part(theta: ThetaElement, p: int) -> GroupRingElement:
    """Image of theta_S in Q[Gamma_S], Gamma_S the maximal p-quotient of G_S."""
    if p == 2:
        raise ValueError("p must be odd")
    return sylow_quotient(theta.group, p).push(theta.element)


def character_interpolation_residual(
    theta: ThetaElement,
    chi: DirichletCharacter,
    periods: PeriodLattice,
    epsilon: int,
    precision: int = 30,
) -> mp.mpc:
    """chi(theta_S) - tau(chi) L(E, chi^-1, 1) / Omega^chi(-1) for primitive chi modulo S."""
    if chi.group != theta.group:
        raise ValueError("the character is not defined on G_S")
    with mp.workdps(precision + 10):
        left = evaluate_character(theta.element, chi, precision)
        value = twisted_l_value(theta.profile, chi.conjugate(), precision, epsilon)
        tau = gauss_sum(chi, precision)
        if chi.parity == 1:
            period = periods.omega_plus
        else:
            period = mp.mpc(0, abs(periods.omega_minus))
        return left - tau * value / period
