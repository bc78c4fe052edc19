"""Powers of the augmentation ideal as integer lattices.

Write x_i = g_i - 1. The monomials x^m with 0 <= m_i < n_i form a Z-basis of
Z[G], and every monomial of total degree >= T lies in I^T. Working modulo the
span K of those high monomials leaves the finite "low" basis of monomials with
|m| < T, and for t <= T the lattice I^t/K is spanned by the truncated
reductions of all x^e with |e| >= t and sum max(0, e_i - n_i + 1) <= t,
using (1 + x)^n = 1 to rewrite x^n = -sum_{j<n} C(n, j) x^j.

Membership of theta in I^t is therefore a lattice-membership test in a space
whose dimension depends only on the number of factors and on T.
"""

from __future__ import annotations

import logging
import threading
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement, product
from math import comb, gcd, lcm
from typing import Optional, Sequence

from .errors import FiltrationConsistencyError, GroupTooLargeError, MembershipError
from .group_ring import AbelianGroupPresentation, GroupRingElement, sylow_quotient
from .linalg import IntegerLattice, smith_decomposition
from .utilities import factorize, mod_fraction, prime_divisors

logger = logging.getLogger(__name__)

ORACLE_GROUP_LIMIT = 24


@dataclass(frozen=True)
class VanishingOrder:
    """Largest t <= cap with theta in I^t; ``at_cap`` means the order may be larger."""

    order: int
    at_cap: bool = False

    def __str__(self) -> str:
        return f">={self.order}" if self.at_cap else str(self.order)

    def at_least(self, t: int) -> bool:
        return self.order >= t


@dataclass(frozen=True)
class LeadingImage:
    """Class of an element of I^t in I^t/I^{t+1} = sum of Z/d_i."""

    t: int
    invariants: tuple[int, ...]
    coordinates: tuple[int, ...]
    p: Optional[int] = None
    mod_p: Optional[tuple[int, ...]] = None

    @property
    def is_zero(self) -> bool:
        return not any(self.coordinates)

    @property
    def is_zero_mod_p(self) -> bool:
        if self.mod_p is None:
            raise ValueError("no prime was given")
        return not any(self.mod_p)

    @property
    def order(self) -> int:
        """Order of the class in the quotient group."""
        order = 1
        for c, d in zip(self.coordinates, self.invariants):
            if d:
                order = lcm(order, d // gcd(c, d))
        return order


class AugmentationFiltration:
    """I^0 = Z[G] ⊇ I ⊇ I^2 ⊇ ... ⊇ I^T for a fixed presentation, T = t_max + 1."""

    def __init__(self, orders: Sequence[int], t_max: int):
        if t_max < 0:
            raise ValueError("t_max must be non-negative")
        self.orders = tuple(orders)
        self.t_max = t_max
        self.cap = t_max + 1
        ranges = [range(min(n, self.cap)) for n in self.orders]
        monomials = [m for m in product(*ranges) if sum(m) < self.cap]
        monomials.sort(key=lambda m: (sum(m), m))
        self.monomials: tuple[tuple[int, ...], ...] = tuple(monomials)
        self._position = {m: i for i, m in enumerate(self.monomials)}
        self._power_cache: dict[tuple[int, int], dict[int, int]] = {}
        self.lattices: list[IntegerLattice] = self._build()
        self._quotients: dict[int, tuple[list[int], list[list[int]]]] = {}

    @property
    def dimension(self) -> int:
        return len(self.monomials)

    # -- construction ---------------------------------------------------

    def _univariate_power(self, n: int, e: int) -> dict[int, int]:
        """x^e modulo (1+x)^n - 1, as {degree: coefficient} truncated below the cap."""
        key = (n, e)
        cached = self._power_cache.get(key)
        if cached is not None:
            return cached
        if e < n:
            result = {e: 1} if e < self.cap else {}
        else:
            poly = [0] * n
            poly[n - 1] = 1
            for _ in range(e - n + 1):
                top = poly[n - 1]
                poly = [0] + poly[: n - 1]
                if top:
                    for j in range(1, n):
                        poly[j] -= top * comb(n, j)
            result = {j: c for j, c in enumerate(poly[: self.cap]) if c}
        self._power_cache[key] = result
        return result

    def _reduced_monomial(self, e: Sequence[int]) -> list[int]:
        terms: dict[tuple[int, ...], int] = {(): 1}
        for n, ei in zip(self.orders, e):
            factor = self._univariate_power(n, ei)
            merged: dict[tuple[int, ...], int] = {}
            for m, c in terms.items():
                degree = sum(m)
                for j, d in factor.items():
                    if degree + j < self.cap:
                        key = m + (j,)
                        merged[key] = merged.get(key, 0) + c * d
            terms = merged
        vec = [0] * self.dimension
        for m, c in terms.items():
            if c:
                vec[self._position[m]] += c
        return vec

    def _excess_exponents(self, t: int):
        """Exponent vectors e with some e_i >= n_i, |e| >= t and sum max(0, e_i - n_i + 1) <= t."""
        # exponents below n_i but at or above the cap reduce to zero modulo K
        ranges = [list(range(min(n, self.cap))) + list(range(n, n + t)) for n in self.orders]
        for e in product(*ranges):
            excess = sum(max(0, ei - n + 1) for ei, n in zip(e, self.orders))
            if excess == 0 or excess > t or sum(e) < t:
                continue
            yield e

    def _build(self) -> list[IntegerLattice]:
        lattices: list[Optional[IntegerLattice]] = [None] * (self.cap + 1)
        below = IntegerLattice(self.dimension)
        for t in range(self.cap, -1, -1):
            lattice = below.copy()
            for m in self.monomials:
                if sum(m) >= t:
                    vec = [0] * self.dimension
                    vec[self._position[m]] = 1
                    lattice.add_vector(vec)
            for e in self._excess_exponents(t):
                vec = self._reduced_monomial(e)
                if any(vec):
                    lattice.add_vector(vec)
            lattices[t] = lattice
            below = lattice
        logger.debug("filtration for orders %s up to t=%d: dimension %d", self.orders, self.cap, self.dimension)
        return lattices  # type: ignore[return-value]

    # -- coordinates ----------------------------------------------------

    def taylor_coordinates(self, theta: GroupRingElement) -> list[Fraction]:
        """Coefficients of theta on the low monomials: sum_g c_g prod C(e_i, m_i)."""
        if theta.group.orders != self.orders:
            raise ValueError(f"element lives on orders {theta.group.orders}, filtration on {self.orders}")
        table: dict[tuple[int, ...], Fraction] = {}
        for index, c in theta.support().items():
            key = theta.group.exponent_table[index]
            table[key] = table.get(key, Fraction(0)) + c
        for axis in range(len(self.orders)):
            transformed: dict[tuple[int, ...], Fraction] = {}
            for key, c in table.items():
                degree = sum(key[:axis])
                e = key[axis]
                for m in range(min(e, self.cap - 1 - degree) + 1):
                    new_key = key[:axis] + (m,) + key[axis + 1 :]
                    transformed[new_key] = transformed.get(new_key, Fraction(0)) + c * comb(e, m)
            table = transformed
        vec = [Fraction(0)] * self.dimension
        for m, c in table.items():
            if c and sum(m) < self.cap:
                vec[self._position[m]] += c
        return vec

    def _check_t(self, t: int) -> None:
        if not 0 <= t <= self.cap:
            raise ValueError(f"t = {t} outside 0..{self.cap}")

    # -- membership -----------------------------------------------------

    def contains(self, theta: GroupRingElement, t: int) -> bool:
        """theta in I^t for integral theta."""
        self._check_t(t)
        if theta.denominator() != 1:
            raise MembershipError("membership needs integral coefficients; clear denominators first")
        vec = self.taylor_coordinates(theta)
        return [int(x) for x in vec] in self.lattices[t]

    def lattice_coordinates(self, theta: GroupRingElement, t: int) -> Optional[list[Fraction]]:
        self._check_t(t)
        return self.lattices[t].coordinates(self.taylor_coordinates(theta))

    def contains_p_local(self, theta: GroupRingElement, t: int, p: int) -> bool:
        """theta in Z_(p) (x) I^t: p-integral coordinates in the lattice basis."""
        self._check_t(t)
        if theta.denominator() % p == 0:
            return False
        coords = self.lattice_coordinates(theta, t)
        return coords is not None and all(c.denominator % p for c in coords)

    def elementary_divisors(self, t: int) -> list[int]:
        """Invariants of I^t/I^{t+1} (ones dropped); t >= 1."""
        return [d for d in self._quotient(t)[0] if d != 1]

    def _quotient(self, t: int) -> tuple[list[int], list[list[int]]]:
        if not 1 <= t < self.cap:
            raise ValueError(f"quotient I^{t}/I^{t + 1} needs 1 <= t < {self.cap}")
        if t not in self._quotients:
            upper, lower = self.lattices[t], self.lattices[t + 1]
            relation_rows = []
            for row in lower.basis:
                coords = upper.coordinates(row)
                if coords is None or any(c.denominator != 1 for c in coords):
                    raise FiltrationConsistencyError(f"I^{t + 1} is not contained in I^{t}")
                relation_rows.append([int(c) for c in coords])
            diagonal, _, transform = smith_decomposition(relation_rows, upper.rank)
            diagonal = diagonal + [0] * (upper.rank - len(diagonal))
            if any(d == 0 for d in diagonal):
                raise FiltrationConsistencyError(f"I^{t}/I^{t + 1} is infinite")
            self._quotients[t] = (diagonal, transform)
        return self._quotients[t]

    def leading_image(self, theta: GroupRingElement, t: int, p: Optional[int] = None) -> LeadingImage:
        """Class of theta in I^t/I^{t+1}, optionally reduced mod p.

        For t = 0 the quotient Z[G]/I is Z and the class is the augmentation.
        """
        if t == 0:
            aug = theta.augmentation()
            if aug.denominator != 1:
                raise MembershipError("augmentation is not integral")
            mod_p = (int(aug) % p,) if p else None
            return LeadingImage(0, (0,), (int(aug),), p, mod_p)
        if not self.contains(theta, t):
            raise MembershipError(f"element is not in I^{t}")
        diagonal, transform = self._quotient(t)
        coords = [int(c) for c in self.lattice_coordinates(theta, t)]  # type: ignore[union-attr]
        invariants, classes = [], []
        for i, d in enumerate(diagonal):
            if d == 1:
                continue
            value = sum(coords[r] * transform[r][i] for r in range(len(coords)))
            invariants.append(d)
            classes.append(value % d)
        mod_p = None
        if p is not None:
            mod_p = tuple(c % p if d % p == 0 else 0 for c, d in zip(classes, invariants))
        return LeadingImage(t, tuple(invariants), tuple(classes), p, mod_p)

    def leading_class_mod_p(self, theta: GroupRingElement, t: int, p: int) -> tuple[int, ...]:
        """Class of a p-integral theta in (I^t/I^{t+1}) (x) Z/p, one entry per invariant divisible by p."""
        if t == 0:
            return (mod_fraction(theta.augmentation(), p),)
        if not self.contains_p_local(theta, t, p):
            raise MembershipError(f"element is not in Z_({p}) (x) I^{t}")
        diagonal, transform = self._quotient(t)
        coords = self.lattice_coordinates(theta, t)
        classes = []
        for i, d in enumerate(diagonal):
            if d % p:
                continue
            value = sum((coords[r] * transform[r][i] for r in range(len(coords))), Fraction(0))  # type: ignore[arg-type, index]
            classes.append(mod_fraction(value, p))
        return tuple(classes)


# -- cache ---------------------------------------------------------------------

_CACHE: dict[tuple[int, ...], AugmentationFiltration] = {}
_CACHE_LOCK = threading.Lock()


def filtration_for(group: AbelianGroupPresentation, t_max: int, max_group_order: int = 5000) -> AugmentationFiltration:
    """Shared filtration for the group's factor orders with depth at least ``t_max``."""
    if group.size > max_group_order:
        raise GroupTooLargeError(f"|G| = {group.size} exceeds the limit {max_group_order}")
    with _CACHE_LOCK:
        cached = _CACHE.get(group.orders)
        if cached is not None and cached.t_max >= t_max:
            return cached
        filtration = AugmentationFiltration(group.orders, t_max)
        _CACHE[group.orders] = filtration
        return filtration


# -- public operations ---------------------------------------------------------


def _integral(theta: GroupRingElement) -> None:
    if theta.denominator() != 1:
        raise MembershipError("membership needs integral coefficients; clear denominators first")


def aug_power_membership(theta: GroupRingElement, t: int) -> bool:
    _integral(theta)
    if t == 0:
        return True
    return filtration_for(theta.group, t).contains(theta, t)


def p_local_membership(theta: GroupRingElement, t: int, p: int) -> bool:
    """theta in Z_(p) (x) I^t, cross-checked on the maximal p-quotient of G."""
    if theta.denominator() % p == 0:
        return False
    if t == 0:
        return True
    direct = filtration_for(theta.group, t).contains_p_local(theta, t, p)
    quotient = sylow_quotient(theta.group, p)
    image = quotient.push(theta)
    via_quotient = filtration_for(quotient.target, t).contains_p_local(image, t, p)
    if direct != via_quotient:
        raise FiltrationConsistencyError(
            f"p-local membership at p={p}, t={t} disagrees between G and its p-quotient"
        )
    return direct


def ord_aug(theta: GroupRingElement, cap: int) -> VanishingOrder:
    _integral(theta)
    if theta.augmentation() != 0:
        return VanishingOrder(0)
    if cap == 0:
        return VanishingOrder(0, at_cap=True)
    filtration = filtration_for(theta.group, cap)
    order = 1
    while order < cap and filtration.contains(theta, order + 1):
        order += 1
    return VanishingOrder(order, at_cap=order == cap)


def ord_aug_p(theta: GroupRingElement, cap: int, p: int) -> VanishingOrder:
    """p-local order of vanishing; 0 when theta is not p-integral or has nonzero augmentation."""
    if theta.denominator() % p == 0 or theta.augmentation() != 0:
        return VanishingOrder(0)
    if cap == 0:
        return VanishingOrder(0, at_cap=True)
    filtration = filtration_for(theta.group, cap)
    order = 1
    while order < cap and filtration.contains_p_local(theta, order + 1, p):
        order += 1
    return VanishingOrder(order, at_cap=order == cap)


def p_local_orders(theta: GroupRingElement, cap: int, primes: Sequence[int]) -> dict[int, VanishingOrder]:
    """ord_aug_p for several primes at once, sharing the lattice coordinates."""
    result = {p: VanishingOrder(0) for p in primes}
    if theta.augmentation() != 0:
        return result
    filtration = filtration_for(theta.group, cap)
    alive = [p for p in primes if theta.denominator() % p]
    orders = {p: 0 for p in alive}
    for t in range(1, cap + 1):
        coords = filtration.lattice_coordinates(theta, t)
        if coords is None:
            break
        bad = set()
        for c in coords:
            if c.denominator != 1:
                bad.update(prime_divisors(c.denominator))
        still = []
        for p in alive:
            if p not in bad:
                orders[p] = t
                still.append(p)
        alive = still
        if not alive:
            break
    for p, order in orders.items():
        result[p] = VanishingOrder(order, at_cap=order == cap)
    return result


def leading_image(theta: GroupRingElement, t: int, p: Optional[int] = None) -> LeadingImage:
    if t == 0:
        return filtration_for(theta.group, 0).leading_image(theta, 0, p)
    return filtration_for(theta.group, t + 1).leading_image(theta, t, p)


def leading_class_mod_p(theta: GroupRingElement, t: int, p: int) -> tuple[int, ...]:
    if t == 0:
        return filtration_for(theta.group, 0).leading_class_mod_p(theta, 0, p)
    return filtration_for(theta.group, t + 1).leading_class_mod_p(theta, t, p)


def inverted_part_cleared(theta: GroupRingElement, inverted: Sequence[int]) -> tuple[GroupRingElement, int]:
    """Multiply by the part of the denominator supported on inverted primes."""
    d = 1
    for q, e in factorize(theta.denominator()).items():
        if q in inverted:
            d *= q**e
    return theta.scale(d), d


# -- lattice oracle ------------------------------------------------------------


def _full_vector(theta: GroupRingElement) -> list[int]:
    return theta.integer_coefficients()


def family_lattice(group: AbelianGroupPresentation, t: int) -> IntegerLattice:
    """Span of h * prod_j (g_{i_j} - 1) over h in G and multisets of t generators."""
    lattice = IntegerLattice(group.size)
    gens = [GroupRingElement.sigma_minus_one(group, i) for i in range(group.rank)]
    for choice in combinations_with_replacement(range(group.rank), t):
        base = GroupRingElement.monomial(group, 0)
        for i in choice:
            base = base * gens[i]
        for h in range(group.size):
            lattice.add_vector(_full_vector(base.shift(h)))
    return lattice


def closure_lattice(group: AbelianGroupPresentation, t: int) -> IntegerLattice:
    """I^t computed as the lattice product I^{t-1} * I, starting from I = span(g - 1)."""
    identity = GroupRingElement.monomial(group, 0)
    if t == 0:
        return IntegerLattice(group.size, [_full_vector(GroupRingElement.monomial(group, h)) for h in range(group.size)])
    ideal = [GroupRingElement.monomial(group, g) - identity for g in range(1, group.size)]
    current = IntegerLattice(group.size, [_full_vector(x) for x in ideal])
    for _ in range(t - 1):
        following = IntegerLattice(group.size)
        for row in current.basis:
            element = GroupRingElement(group, tuple(Fraction(x) for x in row))
            for g in range(group.size):
                following.add_vector(_full_vector(element.shift(g) - element))
        current = following
    return current


def oracle_agrees(group: AbelianGroupPresentation, t: int) -> bool:
    """Family lattice = closure lattice, and both truncate to the fast-path lattice."""
    if group.size > ORACLE_GROUP_LIMIT:
        raise GroupTooLargeError(f"the lattice oracle is limited to |G| <= {ORACLE_GROUP_LIMIT}")
    family = family_lattice(group, t)
    closure = closure_lattice(group, t)
    if family != closure:
        return False
    fast = AugmentationFiltration(group.orders, t)
    truncated = IntegerLattice(fast.dimension)
    for row in family.basis:
        element = GroupRingElement(group, tuple(Fraction(x) for x in row))
        truncated.add_vector([int(x) for x in fast.taylor_coordinates(element)])
    return truncated == fast.lattices[t]
