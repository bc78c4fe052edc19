"""Group rings of finite abelian groups and Dirichlet characters.

A group is a product of cyclic factors Z/n_i with chosen generators g_i;
element ``k`` has the mixed-radix exponent vector ``e`` with ``k = sum e_i *
stride_i`` (last factor fastest). For G_S = (Z/S)^x each factor also carries
the residue of its generator and the prime it comes from, so group elements
can be addressed by residues ``a mod S`` (``delta_a``).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from itertools import product
from math import gcd, lcm
from typing import Iterable, Iterator, Mapping, Optional, Sequence, Union

import mpmath as mp

from .errors import GroupTooLargeError, PrecisionError, SubgroupError
from .linalg import smith_decomposition
from .utilities import crt, divisors, factorize, primitive_root, valuation

logger = logging.getLogger(__name__)

Scalar = Union[int, Fraction]

CHARACTER_PRECISION_LIMIT = 50


def _to_mpf(value: Fraction) -> mp.mpf:
    return mp.mpf(value.numerator) / value.denominator


@dataclass(frozen=True)
class AbelianGroupPresentation:
    """Product of cyclic groups of the given orders.

    ``residues`` and ``labels`` are only set for unit groups (Z/S)^x: the
    residue of each generator modulo ``modulus`` and the prime it belongs to.
    """

    orders: tuple[int, ...]
    residues: tuple[int, ...] = ()
    labels: tuple[int, ...] = ()
    modulus: Optional[int] = None

    def __post_init__(self) -> None:
        if any(n < 1 for n in self.orders):
            raise ValueError(f"invalid factor orders {self.orders}")
        if self.residues and len(self.residues) != len(self.orders):
            raise ValueError("one residue per factor is required")

    @property
    def size(self) -> int:
        size = 1
        for n in self.orders:
            size *= n
        return size

    @property
    def rank(self) -> int:
        return len(self.orders)

    @cached_property
    def strides(self) -> tuple[int, ...]:
        strides = []
        step = 1
        for n in reversed(self.orders):
            strides.append(step)
            step *= n
        return tuple(reversed(strides))

    def index_of(self, exponents: Sequence[int]) -> int:
        return sum((e % n) * s for e, n, s in zip(exponents, self.orders, self.strides))

    def exponents_of(self, index: int) -> tuple[int, ...]:
        return tuple((index // s) % n for n, s in zip(self.orders, self.strides))

    @cached_property
    def exponent_table(self) -> tuple[tuple[int, ...], ...]:
        return tuple(self.exponents_of(k) for k in range(self.size))

    def multiply(self, i: int, j: int) -> int:
        ei, ej = self.exponent_table[i], self.exponent_table[j]
        return self.index_of([a + b for a, b in zip(ei, ej)])

    def inverse(self, i: int) -> int:
        return self.index_of([-e for e in self.exponent_table[i]])

    def power(self, i: int, k: int) -> int:
        return self.index_of([e * k for e in self.exponent_table[i]])

    def generator(self, i: int) -> int:
        exps = [0] * self.rank
        exps[i] = 1
        return self.index_of(exps)

    def element_order(self, i: int) -> int:
        order = 1
        for e, n in zip(self.exponent_table[i], self.orders):
            order = lcm(order, n // gcd(e, n))
        return order

    @cached_property
    def residue_table(self) -> tuple[int, ...]:
        """Residue mod S of every element; unit groups only."""
        if self.modulus is None:
            raise ValueError("group is not presented as a unit group")
        S = self.modulus
        table = []
        for exps in self.exponent_table:
            value = 1 % S
            for r, e in zip(self.residues, exps):
                value = value * pow(r, e, S) % S
            table.append(value)
        return tuple(table)

    @cached_property
    def _residue_index(self) -> dict[int, int]:
        return {r: k for k, r in enumerate(self.residue_table)}

    def element_of_residue(self, a: int) -> int:
        """Index of delta_a in G_S."""
        if self.modulus is None:
            raise ValueError("group is not presented as a unit group")
        key = a % self.modulus
        if key not in self._residue_index:
            raise ValueError(f"{a} is not a unit modulo {self.modulus}")
        return self._residue_index[key]

    def factor_of_label(self, ell: int) -> int:
        positions = [i for i, label in enumerate(self.labels) if label == ell]
        if len(positions) != 1:
            raise KeyError(ell)
        return positions[0]

    def product_with(self, other: "AbelianGroupPresentation") -> "AbelianGroupPresentation":
        """G x H; elements index as ``i * |H| + j``."""
        return AbelianGroupPresentation(self.orders + other.orders)


@lru_cache(maxsize=256)
def units_group(S: int) -> AbelianGroupPresentation:
    """(Z/S)^x with one factor per odd prime power and up to two for the 2-part.

    Odd factors use the least primitive root modulo the prime power, lifted by
    CRT to be 1 modulo the rest of S.
    """
    if S < 1:
        raise ValueError("S must be positive")
    orders, residues, labels = [], [], []
    parts = factorize(S)
    for q, k in parts.items():
        qk = q**k
        rest = S // qk

        def lift(r: int) -> int:
            return crt([r % qk, 1 % rest], [qk, rest]) if rest > 1 else r % qk

        if q == 2:
            if k == 1:
                orders.append(1)
                residues.append(lift(1))
                labels.append(2)
            elif k == 2:
                orders.append(2)
                residues.append(lift(-1))
                labels.append(2)
            else:
                orders.extend([2, 2 ** (k - 2)])
                residues.extend([lift(-1), lift(5)])
                labels.extend([2, 2])
        else:
            orders.append(qk - qk // q)
            residues.append(lift(primitive_root(qk)))
            labels.append(q)
    return AbelianGroupPresentation(tuple(orders), tuple(residues), tuple(labels), S)


def cyclic_group(n: int) -> AbelianGroupPresentation:
    return AbelianGroupPresentation((n,))


@dataclass(frozen=True)
class GroupRingElement:
    """Exact rational combination of group elements, dense in the element index."""

    group: AbelianGroupPresentation
    coeffs: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if len(self.coeffs) != self.group.size:
            raise ValueError(f"expected {self.group.size} coefficients, got {len(self.coeffs)}")

    @classmethod
    def zero(cls, group: AbelianGroupPresentation) -> "GroupRingElement":
        return cls(group, (Fraction(0),) * group.size)

    @classmethod
    def monomial(cls, group: AbelianGroupPresentation, index: int, coefficient: Scalar = 1) -> "GroupRingElement":
        coeffs = [Fraction(0)] * group.size
        coeffs[index] = Fraction(coefficient)
        return cls(group, tuple(coeffs))

    @classmethod
    def from_mapping(cls, group: AbelianGroupPresentation, values: Mapping[int, Scalar]) -> "GroupRingElement":
        coeffs = [Fraction(0)] * group.size
        for index, value in values.items():
            coeffs[index] += Fraction(value)
        return cls(group, tuple(coeffs))

    @classmethod
    def norm_element(cls, group: AbelianGroupPresentation) -> "GroupRingElement":
        return cls(group, (Fraction(1),) * group.size)

    @classmethod
    def sigma_minus_one(cls, group: AbelianGroupPresentation, factor: int = 0) -> "GroupRingElement":
        return cls.monomial(group, group.generator(factor)) - cls.monomial(group, 0)

    def support(self) -> dict[int, Fraction]:
        return {k: c for k, c in enumerate(self.coeffs) if c}

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def _check(self, other: "GroupRingElement") -> None:
        if other.group != self.group:
            raise ValueError("elements live in different group rings")

    def __add__(self, other: "GroupRingElement") -> "GroupRingElement":
        self._check(other)
        return GroupRingElement(self.group, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "GroupRingElement") -> "GroupRingElement":
        self._check(other)
        return GroupRingElement(self.group, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> "GroupRingElement":
        return GroupRingElement(self.group, tuple(-a for a in self.coeffs))

    def scale(self, scalar: Scalar) -> "GroupRingElement":
        scalar = Fraction(scalar)
        return GroupRingElement(self.group, tuple(scalar * a for a in self.coeffs))

    def shift(self, index: int) -> "GroupRingElement":
        """Multiplication by the group element ``index``."""
        group = self.group
        coeffs = [Fraction(0)] * group.size
        for k, c in enumerate(self.coeffs):
            if c:
                coeffs[group.multiply(k, index)] = c
        return GroupRingElement(group, tuple(coeffs))

    def __mul__(self, other: Union["GroupRingElement", Scalar]) -> "GroupRingElement":
        if not isinstance(other, GroupRingElement):
            return self.scale(other)
        self._check(other)
        left, right = self.support(), other.support()
        if len(left) < len(right):
            left, right = right, left
        group = self.group
        coeffs = [Fraction(0)] * group.size
        for j, b in right.items():
            for k, a in left.items():
                coeffs[group.multiply(k, j)] += a * b
        return GroupRingElement(group, tuple(coeffs))

    __rmul__ = __mul__

    def augmentation(self) -> Fraction:
        return sum(self.coeffs, Fraction(0))

    def involution(self) -> "GroupRingElement":
        """iota: g -> g^{-1}."""
        group = self.group
        coeffs = [Fraction(0)] * group.size
        for k, c in enumerate(self.coeffs):
            if c:
                coeffs[group.inverse(k)] = c
        return GroupRingElement(group, tuple(coeffs))

    def denominator(self) -> int:
        d = 1
        for c in self.coeffs:
            d = lcm(d, c.denominator)
        return d

    def denominator_primes(self) -> frozenset[int]:
        return frozenset(factorize(self.denominator()))

    def integer_coefficients(self) -> list[int]:
        if self.denominator() != 1:
            raise ValueError("element is not integral")
        return [int(c) for c in self.coeffs]

    def coefficient_at_residue(self, a: int) -> Fraction:
        return self.coeffs[self.group.element_of_residue(a)]

    def tensor(self, other: "GroupRingElement") -> "GroupRingElement":
        """``self (x) other`` in Q[G x H]."""
        group = self.group.product_with(other.group)
        width = other.group.size
        coeffs = [Fraction(0)] * group.size
        for i, a in self.support().items():
            for j, b in other.support().items():
                coeffs[i * width + j] = a * b
        return GroupRingElement(group, tuple(coeffs))


def augmentation(theta: GroupRingElement) -> Fraction:
    return theta.augmentation()


def involution(theta: GroupRingElement) -> GroupRingElement:
    return theta.involution()


# -- quotients ---------------------------------------------------------------


@dataclass(frozen=True)
class Quotient:
    """A surjection G -> Q recorded as the image index of every element of G."""

    source: AbelianGroupPresentation
    target: AbelianGroupPresentation
    images: tuple[int, ...]

    def push(self, theta: GroupRingElement) -> GroupRingElement:
        if theta.group != self.source:
            raise ValueError("element does not live on the source group")
        coeffs = [Fraction(0)] * self.target.size
        for k, c in enumerate(theta.coeffs):
            if c:
                coeffs[self.images[k]] += c
        return GroupRingElement(self.target, tuple(coeffs))


def modulus_quotient(group: AbelianGroupPresentation, n: int) -> Quotient:
    """G_S -> G_n for n | S."""
    if group.modulus is None or group.modulus % n:
        raise SubgroupError(f"{n} does not divide the modulus {group.modulus}")
    target = units_group(n)
    images = tuple(target.element_of_residue(r % n) for r in group.residue_table)
    return Quotient(group, target, images)


def subgroup_quotient(group: AbelianGroupPresentation, generators: Iterable[int]) -> Quotient:
    """G -> G/H with H generated by the given element indices.

    The quotient is presented through the Smith form of the relation matrix
    made of the factor orders and the exponent vectors of the generators.
    """
    gens = list(generators)
    for g in gens:
        if not 0 <= g < group.size:
            raise SubgroupError(f"{g} is not an element of the group")
    k = group.rank
    relations = [[n if i == j else 0 for j in range(k)] for i, n in enumerate(group.orders)]
    relations += [list(group.exponent_table[g]) for g in gens]
    diagonal, _, transform = smith_decomposition(relations, k)
    keep = [i for i, d in enumerate(diagonal) if d != 1]
    target = AbelianGroupPresentation(tuple(diagonal[i] for i in keep))
    images = []
    for exps in group.exponent_table:
        coords = [sum(exps[r] * transform[r][c] for r in range(k)) for c in range(k)]
        images.append(target.index_of([coords[i] for i in keep]))
    return Quotient(group, target, tuple(images))


def sylow_quotient(group: AbelianGroupPresentation, p: int) -> Quotient:
    """G -> its maximal p-quotient, factorwise Z/n_i -> Z/p^{v_p(n_i)}; labels are kept."""
    keep = [i for i, n in enumerate(group.orders) if n % p == 0]
    orders = tuple(p ** valuation(group.orders[i], p) for i in keep)
    labels = tuple(group.labels[i] for i in keep) if group.labels else ()
    target = AbelianGroupPresentation(orders, labels=labels)
    images = tuple(
        target.index_of([exps[i] for i in keep]) for exps in group.exponent_table
    )
    return Quotient(group, target, images)


def plus_quotient(group: AbelianGroupPresentation) -> Quotient:
    """G_S -> G_S / <delta_{-1}>."""
    return subgroup_quotient(group, [group.element_of_residue(-1)])


def quotient_pushforward(
    theta: GroupRingElement,
    subgroup: Optional[Iterable[int]] = None,
    modulus: Optional[int] = None,
) -> GroupRingElement:
    """Push ``theta`` to G/H, with H given by generators or as the kernel of G_S -> G_modulus."""
    if (subgroup is None) == (modulus is None):
        raise ValueError("give exactly one of subgroup or modulus")
    if modulus is not None:
        return modulus_quotient(theta.group, modulus).push(theta)
    return subgroup_quotient(theta.group, subgroup).push(theta)


# -- characters --------------------------------------------------------------


@dataclass(frozen=True)
class DirichletCharacter:
    """chi(g_i) = exp(2 pi i e_i / n_i) on the generators of a unit group."""

    group: AbelianGroupPresentation
    exponents: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.group.modulus is None:
            raise ValueError("characters are defined on unit groups")
        if len(self.exponents) != self.group.rank:
            raise ValueError("one exponent per factor is required")

    @property
    def modulus(self) -> int:
        return self.group.modulus  # type: ignore[return-value]

    def phase(self, index: int) -> Fraction:
        """chi(g) = exp(2 pi i * phase), phase in [0, 1)."""
        exps = self.group.exponent_table[index]
        total = sum((Fraction(e * x, n) for e, x, n in zip(self.exponents, exps, self.group.orders)), Fraction(0))
        return total - (total.numerator // total.denominator)

    def phase_of_residue(self, a: int) -> Optional[Fraction]:
        if gcd(a, self.modulus) != 1:
            return None
        return self.phase(self.group.element_of_residue(a))

    def value(self, index: int) -> mp.mpc:
        return mp.expjpi(2 * _to_mpf(self.phase(index)))

    def value_of_residue(self, n: int) -> mp.mpc:
        phase = self.phase_of_residue(n)
        if phase is None:
            return mp.mpc(0)
        return mp.expjpi(2 * _to_mpf(phase))

    @property
    def is_trivial(self) -> bool:
        return all(e % n == 0 for e, n in zip(self.exponents, self.group.orders))

    @cached_property
    def order(self) -> int:
        order = 1
        for e, n in zip(self.exponents, self.group.orders):
            order = lcm(order, n // gcd(e, n))
        return order

    @cached_property
    def parity(self) -> int:
        """chi(-1) as +1 or -1."""
        if self.modulus <= 2:
            return 1
        return 1 if self.phase_of_residue(-1) == 0 else -1

    @cached_property
    def conductor(self) -> int:
        S = self.modulus
        units = self.group.residue_table
        for d in divisors(S):
            if all(self.phase_of_residue(a) == 0 for a in units if (a - 1) % d == 0):
                return d
        return S

    @property
    def is_primitive(self) -> bool:
        return self.conductor == self.modulus

    def conjugate(self) -> "DirichletCharacter":
        return DirichletCharacter(self.group, tuple(-e % n for e, n in zip(self.exponents, self.group.orders)))

    def primitive(self) -> "DirichletCharacter":
        """The primitive character modulo the conductor inducing this one."""
        m = self.conductor
        target = units_group(m)
        S = self.modulus
        exponents = []
        for residue, n in zip(target.residues, target.orders):
            lift = next(a for a in range(residue, residue + S * m + 1, m) if gcd(a, S) == 1)
            exponents.append(int(self.phase_of_residue(lift) * n))  # type: ignore[operator]
        return DirichletCharacter(target, tuple(exponents))

    def __str__(self) -> str:
        return f"chi_{self.modulus}{list(self.exponents)}"


def characters(group: AbelianGroupPresentation) -> Iterator[DirichletCharacter]:
    """All characters of a unit group, trivial first."""
    for exponents in product(*(range(n) for n in group.orders)):
        yield DirichletCharacter(group, tuple(exponents))


def _check_character_precision(precision: int) -> None:
    if not 1 <= precision <= CHARACTER_PRECISION_LIMIT:
        raise PrecisionError(f"precision {precision} outside 1..{CHARACTER_PRECISION_LIMIT} digits")


def gauss_sum_at_working_precision(chi: DirichletCharacter) -> mp.mpc:
    """tau_S(chi) at the current mpmath precision, for callers already inside ``workdps``."""
    S = chi.modulus
    total = mp.mpc(0)
    for index, a in enumerate(chi.group.residue_table):
        total += mp.expjpi(2 * _to_mpf(chi.phase(index))) * mp.expjpi(2 * mp.mpf(a) / S)
    return total


def gauss_sum(chi: DirichletCharacter, precision: int = 30) -> mp.mpc:
    """tau_S(chi) = sum over a in G_S of chi(delta_a) * zeta_S^a.

    The result carries ``precision + 10`` digits whatever the caller's ``mp.dps`` is.
    """
    _check_character_precision(precision)
    with mp.workdps(precision + 10):
        return gauss_sum_at_working_precision(chi)


def evaluate_character(theta: GroupRingElement, chi: DirichletCharacter, precision: int = 30) -> mp.mpc:
    if theta.group != chi.group:
        raise ValueError("character and element live on different groups")
    _check_character_precision(precision)
    with mp.workdps(precision + 10):
        total = mp.mpc(0)
        for index, c in theta.support().items():
            total += mp.mpf(c.numerator) / c.denominator * chi.value(index)
        return total


def check_group_size(group: AbelianGroupPresentation, limit: int) -> None:
    if group.size > limit:
        raise GroupTooLargeError(f"|G| = {group.size} exceeds the limit {limit}")
