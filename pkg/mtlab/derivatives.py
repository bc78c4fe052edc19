"""Derivative operators D^(k) = sum_j C(j, k) sigma^j on cyclic factors.

A :class:`DerivativeDescriptor` names one derivative per prime factor of a
group presented with labelled cyclic factors (G_S or its p-quotient Gamma_S);
the descriptor's operator is the product of the single-factor derivatives.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from itertools import product
from math import comb, gcd, prod
from typing import Iterator, Mapping, Optional, Sequence

from .ec_arithmetic import CurveProfile
from .errors import GroupTooLargeError, SubgroupError, SupportMismatchError
from .filtration import filtration_for
from .group_ring import AbelianGroupPresentation, GroupRingElement, cyclic_group
from .utilities import prime_divisors

logger = logging.getLogger(__name__)

TAYLOR_TERM_LIMIT = 10**6


def single_derivative_element(n: int, k: int, group: Optional[AbelianGroupPresentation] = None) -> GroupRingElement:
    """D^(k) on Z/n; zero for k < 0 or k >= n."""
    if n < 1:
        raise ValueError("n must be positive")
    group = group or cyclic_group(n)
    if k < 0:
        return GroupRingElement.zero(group)
    return GroupRingElement.from_mapping(group, {j: comb(j, k) for j in range(n)})


@dataclass(frozen=True)
class DerivativeDescriptor:
    """Terms (l, k_l) with the order of Gamma_l and the power u_l giving sigma_l = g_l^u_l."""

    terms: tuple[tuple[int, int], ...]
    orders: tuple[int, ...]
    generator_powers: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        labels = [ell for ell, _ in self.terms]
        if len(set(labels)) != len(labels):
            raise ValueError("primes in a derivative must be distinct")
        if len(self.orders) != len(self.terms):
            raise ValueError("one order per term is required")
        for (ell, k), n in zip(self.terms, self.orders):
            if not 0 <= k < n:
                raise ValueError(f"k_{ell} = {k} outside 0..{n - 1}")
        powers = self.generator_powers or (1,) * len(self.terms)
        for u, n in zip(powers, self.orders):
            if gcd(u, n) != 1:
                raise ValueError(f"power {u} does not give a generator of Z/{n}")
        object.__setattr__(self, "generator_powers", tuple(powers))

    @classmethod
    def for_group(
        cls,
        group: AbelianGroupPresentation,
        exponents: Mapping[int, int],
        generator_powers: Optional[Mapping[int, int]] = None,
    ) -> "DerivativeDescriptor":
        terms, orders, powers = [], [], []
        for ell in sorted(exponents):
            try:
                factor = group.factor_of_label(ell)
            except KeyError as exc:
                raise SupportMismatchError(f"the group has no single factor for the prime {ell}") from exc
            terms.append((ell, exponents[ell]))
            orders.append(group.orders[factor])
            powers.append((generator_powers or {}).get(ell, 1))
        return cls(tuple(terms), tuple(orders), tuple(powers))

    @property
    def support(self) -> int:
        return prod(ell for ell, _ in self.terms)

    @property
    def conductor(self) -> int:
        return prod(ell for ell, k in self.terms if k > 0)

    @property
    def order(self) -> int:
        return sum(k for _, k in self.terms)

    @property
    def modulus(self) -> int:
        """n(D): least |Gamma_l| over terms with k_l > 0, or 1."""
        active = [n for (_, k), n in zip(self.terms, self.orders) if k > 0]
        return min(active) if active else 1

    def exponent(self, ell: int) -> int:
        for label, k in self.terms:
            if label == ell:
                return k
        return 0

    def merged(self, other: "DerivativeDescriptor") -> "DerivativeDescriptor":
        """The descriptor of D1 * D2 when their supports are disjoint."""
        if gcd(self.support, other.support) != 1:
            raise SupportMismatchError("supports overlap")
        rows = sorted(zip(self.terms + other.terms, self.orders + other.orders, self.generator_powers + other.generator_powers))
        return DerivativeDescriptor(
            tuple(r[0] for r in rows), tuple(r[1] for r in rows), tuple(r[2] for r in rows)
        )

    def __str__(self) -> str:
        return "*".join(f"D_{ell}^({k})" for ell, k in self.terms) or "1"


def derivative_element(D: DerivativeDescriptor, group: AbelianGroupPresentation) -> GroupRingElement:
    """prod_l D_{sigma_l}^(k_l) as an element of Z[group]."""
    result = GroupRingElement.monomial(group, 0)
    for (ell, k), n, u in zip(D.terms, D.orders, D.generator_powers):
        try:
            factor = group.factor_of_label(ell)
        except KeyError as exc:
            raise SupportMismatchError(f"the group has no single factor for the prime {ell}") from exc
        if group.orders[factor] != n:
            raise SupportMismatchError(f"Gamma_{ell} has order {group.orders[factor]}, the derivative expects {n}")
        sigma = group.power(group.generator(factor), u)
        single = GroupRingElement.from_mapping(group, {group.power(sigma, j): comb(j, k) for j in range(n)})
        result = result * single
    return result


def apply_derivative(D: DerivativeDescriptor, theta: GroupRingElement) -> GroupRingElement:
    return derivative_element(D, theta.group) * theta


def descriptors(
    group: AbelianGroupPresentation, max_order: int, generator_powers: Optional[Mapping[int, int]] = None
) -> Iterator[DerivativeDescriptor]:
    """All descriptors supported on every labelled factor with ord(D) < max_order."""
    labels = list(group.labels)
    for ks in product(*(range(min(n, max_order)) for n in group.orders)):
        if sum(ks) < max_order:
            yield DerivativeDescriptor.for_group(group, dict(zip(labels, ks)), generator_powers)


# -- Taylor expansion ----------------------------------------------------------


def _axis_derivative(element: GroupRingElement, axis: int, k: int) -> GroupRingElement:
    group = element.group
    n = group.orders[axis]
    g = group.generator(axis)
    single = GroupRingElement.from_mapping(group, {group.power(g, j): comb(j, k) for j in range(n)})
    return single * element


def taylor_expansion(a: GroupRingElement) -> dict[tuple[int, ...], GroupRingElement]:
    """Nonzero D_k a over all multi-indices k, with sigma_i the chosen factor generators."""
    group = a.group
    count = group.size
    if count > TAYLOR_TERM_LIMIT:
        raise GroupTooLargeError(f"{count} multi-indices exceed the limit {TAYLOR_TERM_LIMIT}")
    layer: dict[tuple[int, ...], GroupRingElement] = {(): a}
    for axis, n in enumerate(group.orders):
        following = {}
        for key, element in layer.items():
            for k in range(n):
                derived = _axis_derivative(element, axis, k)
                if not derived.is_zero():
                    following[key + (k,)] = derived
        layer = following
    return layer


def _sigma_power_product(group: AbelianGroupPresentation, ks: Sequence[int]) -> GroupRingElement:
    result = GroupRingElement.monomial(group, 0)
    for axis, k in enumerate(ks):
        step = GroupRingElement.sigma_minus_one(group, axis)
        for _ in range(k):
            result = result * step
    return result


def taylor_reconstruction_holds(a: GroupRingElement, expansion: Optional[Mapping[tuple[int, ...], GroupRingElement]] = None) -> bool:
    """sum_k D_k a (x) prod (sigma_i - 1)^k_i == sum_gamma gamma a (x) gamma in Z[G x G]."""
    group = a.group
    expansion = taylor_expansion(a) if expansion is None else expansion
    doubled = group.product_with(group)
    left = GroupRingElement.zero(doubled)
    for ks, coefficient in expansion.items():
        left = left + coefficient.tensor(_sigma_power_product(group, ks))
    right = GroupRingElement.zero(doubled)
    for gamma in range(group.size):
        right = right + a.shift(gamma).tensor(GroupRingElement.monomial(group, gamma))
    return left == right


# -- congruences and the augmentation filtration ----------------------------------


@dataclass
class CongruenceReport:
    t: int
    p: int
    depth: int
    failed_premises: list[str] = field(default_factory=list)
    failed_premises_alternate: list[str] = field(default_factory=list)
    conclusion_holds: bool = False

    @property
    def premises_hold(self) -> bool:
        return not self.failed_premises

    @property
    def consistent(self) -> bool:
        """Premises under either generator choice force the conclusion."""
        if self.premises_hold or not self.failed_premises_alternate:
            return self.conclusion_holds
        return True


def _alternate_powers(group: AbelianGroupPresentation) -> dict[int, int]:
    powers = {}
    for ell, n in zip(group.labels, group.orders):
        powers[ell] = next((u for u in range(2, n + 2) if gcd(u, n) == 1), 1) if n > 2 else 1
    return powers


def _failing(a: GroupRingElement, depth: int, powers: Optional[Mapping[int, int]]) -> list[str]:
    failed = []
    for D in descriptors(a.group, depth, powers):
        n = D.modulus
        if n == 1:
            continue
        value = apply_derivative(D, a)
        if any(c.denominator != 1 or c.numerator % n for c in value.coeffs):
            failed.append(str(D))
    return failed


def congruence_filtration_check(a: GroupRingElement, t: int, p: int) -> CongruenceReport:
    """Premises D a = 0 mod n(D) against sum gamma a (x) gamma - N a (x) 1 in M (x) Z_p I^min(t, p).

    The group must be a p-group with labelled factors. The conclusion is
    checked one M-coordinate at a time: the slice at g is
    sum_gamma a[gamma^-1 g] gamma - (N a)[g].
    """
    group = a.group
    if t < 1:
        raise ValueError("t must be at least 1")
    if any(prime_divisors(n) not in ([], [p]) for n in group.orders):
        raise SubgroupError(f"the group with factor orders {group.orders} is not a {p}-group")
    if not group.labels:
        raise SupportMismatchError("the group has no labelled factors")
    depth = min(t, p)
    report = CongruenceReport(t=t, p=p, depth=depth)
    report.failed_premises = _failing(a, depth, None)
    report.failed_premises_alternate = _failing(a, depth, _alternate_powers(group))

    normed = GroupRingElement.norm_element(group) * a
    filtration = filtration_for(group, depth)
    holds = True
    for g in range(group.size):
        values = {gamma: a.coeffs[group.multiply(group.inverse(gamma), g)] for gamma in range(group.size)}
        slice_ = GroupRingElement.from_mapping(group, values)
        slice_ = slice_ - GroupRingElement.monomial(group, 0, normed.coeffs[g])
        if not filtration.contains_p_local(slice_, depth, p):
            holds = False
            break
    report.conclusion_holds = holds
    if not report.consistent:
        logger.error("congruence premises hold but the filtration conclusion fails (t=%d, p=%d)", t, p)
    return report


# -- weights -------------------------------------------------------------------


@dataclass(frozen=True)
class WeightContext:
    q: int
    profile: CurveProfile

    def splits(self, ell: int) -> bool:
        """l in R_q: q | l - 1."""
        return (ell - 1) % self.q == 0

    def euler_divisible(self, ell: int) -> bool:
        """l in R_{E,q}: q | l - 1 and q | P_l(1)."""
        return self.splits(ell) and self.profile.euler_factor_at_one(ell) % self.q == 0


def weight(D: DerivativeDescriptor, ctx: WeightContext) -> int:
    return D.order - sum(1 for ell, _ in D.terms if ctx.euler_divisible(ell))
