"""Elliptic curves over Q and their reductions.

Curves are integral Weierstrass models

    y^2 + a1*x*y + a3*y = x^3 + a2*x^2 + a4*x + a6

assumed globally minimal. Points over Q carry exact ``Fraction`` coordinates
and points over F_l carry integers in ``[0, l)``; both share the same group
law, parameterized by the field operations.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import cached_property, lru_cache
from math import gcd, lcm
from typing import Iterable, Mapping, Optional, Sequence, Union

import mpmath as mp
from sympy import Poly, Rational, ceiling, floor, symbols

from .errors import CurveDataError, InvalidPrimeError, PrecisionError
from .utilities import divisors, factorize, is_prime, is_squarefree, mod_fraction, prime_divisors, primes_up_to, valuation

logger = logging.getLogger(__name__)

ENUMERATION_BOUND = 10**6
STRUCTURE_BOUND = 10**5
MAZUR_TORSION_ORDERS = frozenset(range(1, 11)) | {12, 16}

_X = symbols("X")


@dataclass(frozen=True)
class WeierstrassCurve:
    a1: int
    a2: int
    a3: int
    a4: int
    a6: int
    N: int

    def __post_init__(self) -> None:
        if self.N < 1:
            raise CurveDataError(f"conductor must be positive, got {self.N}")
        if self.discriminant == 0:
            raise CurveDataError(f"singular model {self.ainvs}")
        for p in prime_divisors(self.N):
            if self.discriminant % p:
                raise CurveDataError(f"conductor prime {p} does not divide the discriminant {self.discriminant}")

    @property
    def ainvs(self) -> tuple[int, int, int, int, int]:
        return (self.a1, self.a2, self.a3, self.a4, self.a6)

    @cached_property
    def b_invariants(self) -> tuple[int, int, int, int]:
        a1, a2, a3, a4, a6 = self.ainvs
        b2 = a1 * a1 + 4 * a2
        b4 = 2 * a4 + a1 * a3
        b6 = a3 * a3 + 4 * a6
        b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
        return b2, b4, b6, b8

    @cached_property
    def c4(self) -> int:
        b2, b4, _, _ = self.b_invariants
        return b2 * b2 - 24 * b4

    @cached_property
    def c6(self) -> int:
        b2, b4, b6, _ = self.b_invariants
        return -(b2**3) + 36 * b2 * b4 - 216 * b6

    @cached_property
    def discriminant(self) -> int:
        b2, b4, b6, b8 = self.b_invariants
        return -b2 * b2 * b8 - 8 * b4**3 - 27 * b6 * b6 + 9 * b2 * b4 * b6

    def bad_primes(self) -> list[int]:
        return prime_divisors(self.N)

    def is_good(self, ell: int) -> bool:
        return self.discriminant % ell != 0

    def check_minimality(self) -> None:
        """Necessary conditions for a minimal model (v(c4) < 4 or v(Delta) < 12 away from 2, 3)."""
        for p in prime_divisors(self.discriminant):
            if p in (2, 3):
                continue
            if valuation(self.c4, p) >= 4 and valuation(self.discriminant, p) >= 12:
                raise CurveDataError(f"model is not minimal at {p}")


@dataclass(frozen=True)
class Point:
    """Affine point or the point at infinity; coordinates are Fractions over Q or ints mod l."""

    x: Union[Fraction, int] = 0
    y: Union[Fraction, int] = 0
    infinity: bool = False

    def __str__(self) -> str:
        if self.infinity:
            return "O"
        return f"({self.x},{self.y})"


INFINITY = Point(infinity=True)


class ReductionType(str, Enum):
    GOOD = "Good"
    SPLIT_MULTIPLICATIVE = "SplitMultiplicative"
    NONSPLIT_MULTIPLICATIVE = "NonsplitMultiplicative"
    ADDITIVE = "Additive"

    @property
    def is_multiplicative(self) -> bool:
        return self in (ReductionType.SPLIT_MULTIPLICATIVE, ReductionType.NONSPLIT_MULTIPLICATIVE)


@dataclass(frozen=True)
class FiniteGroupStructure:
    """E(F_l) = Z/d1 x Z/d2 with d1 | d2."""

    d1: int
    d2: int

    @property
    def order(self) -> int:
        return self.d1 * self.d2

    def is_p_cyclic(self, p: int) -> bool:
        return self.d1 % p != 0


@dataclass(frozen=True)
class CurveProfile:
    """A curve together with the arithmetic data taken on trust from the database."""

    label: str
    curve: WeierstrassCurve
    rank: int
    torsion_order: int
    generators: tuple[Point, ...] = ()
    tamagawa: Mapping[int, int] = field(default_factory=dict, hash=False, compare=False)
    galois_nonsurjective: frozenset[int] = frozenset()
    manin_constant_one: bool = True

    def __post_init__(self) -> None:
        if self.rank < 0:
            raise CurveDataError(f"{self.label}: negative rank")
        if self.torsion_order not in MAZUR_TORSION_ORDERS:
            raise CurveDataError(f"{self.label}: torsion order {self.torsion_order} violates Mazur's bound")
        for point in self.generators:
            if not on_curve(self.curve, point):
                raise CurveDataError(f"{self.label}: generator {point} is not on the curve")
        for ell in self.tamagawa:
            if self.curve.N % ell:
                raise CurveDataError(f"{self.label}: Tamagawa number given at good prime {ell}")

    @property
    def N(self) -> int:
        return self.curve.N

    def tamagawa_number(self, ell: int) -> int:
        return int(self.tamagawa.get(ell, 1))

    def epsilon(self, ell: int) -> int:
        """Trivial character modulo N."""
        return 0 if self.curve.N % ell == 0 else 1

    def a(self, ell: int) -> int:
        return trace_of_frobenius(self, ell)

    def euler_factor_at_one(self, ell: int) -> int:
        """P_l(1) = 1 - a_l + eps(l)."""
        return 1 - self.a(ell) + self.epsilon(ell)


CurveLike = Union[CurveProfile, WeierstrassCurve]


def _curve_of(obj: CurveLike) -> WeierstrassCurve:
    return obj.curve if isinstance(obj, CurveProfile) else obj


def _check_prime(ell: int, bound: Optional[int] = None) -> None:
    if not is_prime(ell):
        raise InvalidPrimeError(f"{ell} is not prime")
    if bound is not None and ell > bound:
        raise InvalidPrimeError(f"{ell} exceeds the enumeration bound {bound}")


# -- group law ---------------------------------------------------------------


def _field_ops(modulus: Optional[int]):
    if modulus is None:
        return (lambda v: Fraction(v)), (lambda v: 1 / Fraction(v))
    return (lambda v: v % modulus), (lambda v: pow(v, -1, modulus))


def on_curve(curve: WeierstrassCurve, P: Point, modulus: Optional[int] = None) -> bool:
    if P.infinity:
        return True
    a1, a2, a3, a4, a6 = curve.ainvs
    x, y = P.x, P.y
    lhs_minus_rhs = y * y + a1 * x * y + a3 * y - (x**3 + a2 * x * x + a4 * x + a6)
    if modulus is None:
        return lhs_minus_rhs == 0
    return lhs_minus_rhs % modulus == 0


def negate_point(curve: WeierstrassCurve, P: Point, modulus: Optional[int] = None) -> Point:
    if P.infinity:
        return P
    red, _ = _field_ops(modulus)
    return Point(P.x, red(-P.y - curve.a1 * P.x - curve.a3))


def add_points(curve: WeierstrassCurve, P: Point, Q: Point, modulus: Optional[int] = None) -> Point:
    if P.infinity:
        return Q
    if Q.infinity:
        return P
    a1, a2, a3, a4, a6 = curve.ainvs
    red, inv = _field_ops(modulus)
    x1, y1, x2, y2 = P.x, P.y, Q.x, Q.y
    if red(x1 - x2) == 0:
        if red(y1 + y2 + a1 * x2 + a3) == 0:
            return INFINITY
        den = inv(red(2 * y1 + a1 * x1 + a3))
        lam = red((3 * x1 * x1 + 2 * a2 * x1 + a4 - a1 * y1) * den)
        nu = red((-(x1**3) + a4 * x1 + 2 * a6 - a3 * y1) * den)
    else:
        den = inv(red(x2 - x1))
        lam = red((y2 - y1) * den)
        nu = red((y1 * x2 - y2 * x1) * den)
    x3 = red(lam * lam + a1 * lam - a2 - x1 - x2)
    y3 = red(-(lam + a1) * x3 - nu - a3)
    return Point(x3, y3)


def multiply_point(curve: WeierstrassCurve, P: Point, n: int, modulus: Optional[int] = None) -> Point:
    if n < 0:
        return multiply_point(curve, negate_point(curve, P, modulus), -n, modulus)
    result, addend = INFINITY, P
    while n:
        if n & 1:
            result = add_points(curve, result, addend, modulus)
        addend = add_points(curve, addend, addend, modulus)
        n >>= 1
    return result


# -- reduction ---------------------------------------------------------------


def _square_table(ell: int) -> bytearray:
    table = bytearray(ell)
    for y in range(ell):
        table[y * y % ell] = 1
    return table


def count_points_naive(curve: WeierstrassCurve, ell: int) -> int:
    """#E(F_l) by testing every affine pair, singular points included."""
    a1, a2, a3, a4, a6 = curve.ainvs
    count = 1
    for x in range(ell):
        rhs = (x**3 + a2 * x * x + a4 * x + a6) % ell
        for y in range(ell):
            if (y * y + a1 * x * y + a3 * y - rhs) % ell == 0:
                count += 1
    return count


@lru_cache(maxsize=4096)
def count_points(curve: WeierstrassCurve, ell: int) -> int:
    """Projective point count of the reduction mod l, including a singular point if any."""
    if ell == 2:
        return count_points_naive(curve, 2)
    b2, b4, b6, _ = curve.b_invariants
    squares = _square_table(ell)
    count = 1
    for x in range(ell):
        disc = (((4 * x + b2) * x + 2 * b4) * x + b6) % ell
        if disc == 0:
            count += 1
        elif squares[disc]:
            count += 2
    return count


def _singular_point(curve: WeierstrassCurve, ell: int) -> tuple[int, int]:
    a1, a2, a3, a4, a6 = curve.ainvs
    candidates: Iterable[tuple[int, int]]
    if ell == 2:
        candidates = [(x, y) for x in range(2) for y in range(2)]
    else:
        half = pow(2, -1, ell)
        candidates = [(x, (-(a1 * x + a3) * half) % ell) for x in range(ell)]
    for x, y in candidates:
        f = y * y + a1 * x * y + a3 * y - (x**3 + a2 * x * x + a4 * x + a6)
        fx = a1 * y - (3 * x * x + 2 * a2 * x + a4)
        fy = 2 * y + a1 * x + a3
        if f % ell == 0 and fx % ell == 0 and fy % ell == 0:
            return x, y
    raise CurveDataError(f"no singular point modulo {ell} although {ell} divides the discriminant")


def _node_is_split(curve: WeierstrassCurve, ell: int) -> bool:
    x0, _ = _singular_point(curve, ell)
    # Tangent slopes m at the node solve m^2 + a1*m - (3*x0 + a2) = 0.
    constant = -(3 * x0 + curve.a2)
    return any((m * m + curve.a1 * m + constant) % ell == 0 for m in range(ell))


@lru_cache(maxsize=4096)
def reduction_type(curve: WeierstrassCurve, ell: int) -> ReductionType:
    _check_prime(ell)
    if curve.discriminant % ell:
        return ReductionType.GOOD
    if curve.c4 % ell:
        if _node_is_split(curve, ell):
            return ReductionType.SPLIT_MULTIPLICATIVE
        return ReductionType.NONSPLIT_MULTIPLICATIVE
    return ReductionType.ADDITIVE


@lru_cache(maxsize=65536)
def _trace(curve: WeierstrassCurve, ell: int) -> int:
    _check_prime(ell, ENUMERATION_BOUND)
    trace = ell + 1 - count_points(curve, ell)
    kind = reduction_type(curve, ell)
    expected = {
        ReductionType.SPLIT_MULTIPLICATIVE: 1,
        ReductionType.NONSPLIT_MULTIPLICATIVE: -1,
        ReductionType.ADDITIVE: 0,
    }.get(kind)
    if expected is not None and trace != expected:
        raise RuntimeError(f"point count gives a_{ell} = {trace} but the reduction is {kind.value}")
    if kind is ReductionType.GOOD and trace * trace > 4 * ell:
        raise RuntimeError(f"a_{ell} = {trace} violates the Hasse bound")
    return trace


def trace_of_frobenius(profile: CurveLike, ell: int) -> int:
    """a_l: l + 1 - #E(F_l) for good l, +1/-1 for split/nonsplit, 0 for additive."""
    return _trace(_curve_of(profile), ell)


def primes_with_trace(profile: CurveLike, value: int, bound: int) -> list[int]:
    curve = _curve_of(profile)
    return [ell for ell in primes_up_to(bound) if curve.is_good(ell) and trace_of_frobenius(curve, ell) == value]


def sp_and_b2(profile: CurveLike, S: int) -> tuple[int, int]:
    """(#split multiplicative l | S, #good l | S with a_l = 2)."""
    if not is_squarefree(S):
        raise ValueError(f"S = {S} is not square-free")
    curve = _curve_of(profile)
    sp = b2 = 0
    for ell in prime_divisors(S):
        kind = reduction_type(curve, ell)
        if kind is ReductionType.SPLIT_MULTIPLICATIVE:
            sp += 1
        elif kind is ReductionType.GOOD and trace_of_frobenius(curve, ell) == 2:
            b2 += 1
    return sp, b2


# -- finite groups E(F_l) ----------------------------------------------------


def enumerate_points(curve: WeierstrassCurve, ell: int) -> list[Point]:
    """Affine points of E(F_l) in increasing (x, y) order; good l only."""
    a1, a2, a3, a4, a6 = curve.ainvs
    points = []
    if ell == 2:
        for x in range(2):
            for y in range(2):
                if on_curve(curve, Point(x, y), 2):
                    points.append(Point(x, y))
        return points
    b2, b4, b6, _ = curve.b_invariants
    roots: dict[int, list[int]] = {}
    for s in range(ell):
        roots.setdefault(s * s % ell, []).append(s)
    half = pow(2, -1, ell)
    for x in range(ell):
        disc = (((4 * x + b2) * x + 2 * b4) * x + b6) % ell
        ys = sorted(((s - a1 * x - a3) * half) % ell for s in roots.get(disc, ()))
        points.extend(Point(x, y) for y in ys)
    return points


def point_order(curve: WeierstrassCurve, P: Point, group_order: int, modulus: int) -> int:
    order = group_order
    for q, e in factorize(group_order).items():
        for _ in range(e):
            if multiply_point(curve, P, order // q, modulus).infinity:
                order //= q
            else:
                break
    return order


def _exponent_candidates(current: int, n: int, ell: int) -> list[int]:
    return [m for m in divisors(n) if m % current == 0 and gcd(m, ell - 1) % (n // m) == 0]


class ReducedGroup:
    """E(F_l) with an explicit basis ``(P2, P1)`` of orders ``(d1, d2)``."""

    def __init__(self, curve: WeierstrassCurve, ell: int):
        _check_prime(ell, STRUCTURE_BOUND)
        if not curve.is_good(ell):
            raise InvalidPrimeError(f"{ell} is a bad prime")
        self.curve = curve
        self.ell = ell
        points = enumerate_points(curve, ell)
        n = len(points) + 1
        exponent = 1
        best = INFINITY
        for P in points:
            order = point_order(curve, P, n, ell)
            if order > exponent and order % exponent == 0:
                best = P
            exponent = lcm(exponent, order)
            if _exponent_candidates(exponent, n, ell) == [exponent]:
                break
        if point_order(curve, best, n, ell) != exponent:
            best = next(P for P in points if point_order(curve, P, n, ell) == exponent)
        d2, d1 = exponent, n // exponent
        if d2 % d1 or (ell - 1) % d1:
            raise RuntimeError(f"inconsistent group structure ({d1}, {d2}) modulo {ell}")
        self.structure = FiniteGroupStructure(d1, d2)
        self.P1 = best
        self._cyclic_log: dict[Point, int] = {}
        Q = INFINITY
        for k in range(d2):
            self._cyclic_log[Q] = k
            Q = add_points(curve, Q, best, ell)
        self.P2 = INFINITY
        if d1 > 1:
            self.P2 = self._complement(points, d1)

    def _complement(self, points: Sequence[Point], d1: int) -> Point:
        curve, ell = self.curve, self.ell
        for Q in points:
            multiple = INFINITY
            coset_order = None
            for j in range(1, d1 + 1):
                multiple = add_points(curve, multiple, Q, ell)
                if multiple in self._cyclic_log:
                    coset_order = j
                    break
            if coset_order == d1:
                k = self._cyclic_log[multiple]
                shift = multiply_point(curve, self.P1, k // d1, ell)
                return add_points(curve, Q, negate_point(curve, shift, ell), ell)
        raise RuntimeError(f"no complement found modulo {ell}")

    def discrete_log(self, R: Point) -> tuple[int, int]:
        """Coordinates ``(j mod d1, k mod d2)`` with ``R = j*P2 + k*P1``."""
        curve, ell = self.curve, self.ell
        current = R
        minus_p2 = negate_point(curve, self.P2, ell)
        for j in range(self.structure.d1):
            if current in self._cyclic_log:
                return j, self._cyclic_log[current]
            current = add_points(curve, current, minus_p2, ell)
        raise ValueError(f"{R} is not in E(F_{ell})")


@lru_cache(maxsize=512)
def reduced_group(curve: WeierstrassCurve, ell: int) -> ReducedGroup:
    return ReducedGroup(curve, ell)


def group_structure_mod_ell(profile: CurveLike, ell: int) -> FiniteGroupStructure:
    structure = reduced_group(_curve_of(profile), ell).structure
    if structure.order != ell + 1 - trace_of_frobenius(profile, ell):
        raise RuntimeError(f"group order disagrees with the trace at {ell}")
    return structure


def reduce_point(curve: CurveLike, P: Point, ell: int) -> Point:
    """Image of a rational point in E(F_l) for good l."""
    curve = _curve_of(curve)
    _check_prime(ell)
    if not curve.is_good(ell):
        raise InvalidPrimeError(f"{ell} is a bad prime")
    if P.infinity:
        return INFINITY
    x, y = Fraction(P.x), Fraction(P.y)
    if x.denominator % ell == 0 or y.denominator % ell == 0:
        return INFINITY
    return Point(mod_fraction(x, ell), mod_fraction(y, ell))


@lru_cache(maxsize=256)
def _node_slopes(curve: WeierstrassCurve, ell: int) -> tuple[int, int]:
    """The two tangent slopes at a split node, smaller residue first."""
    x0, _ = _singular_point(curve, ell)
    constant = -(3 * x0 + curve.a2)
    slopes = [t for t in range(ell) if (t * t + curve.a1 * t + constant) % ell == 0]
    if len(slopes) != 2:
        raise InvalidPrimeError(f"the node modulo {ell} is not split")
    return slopes[0], slopes[1]


def split_component_index(curve: WeierstrassCurve, P: Point, ell: int, m: int) -> int:
    """Component index of P in E(Q_l)/E_0(Q_l) = Z/m at a split multiplicative prime.

    The distance to the identity component is v_l(2y + a1 x + a3), capped at m/2.
    The sign comes from the branch of the node the point approaches: the slope
    dy/dx at P reduces to one of the two tangent slopes, and points near the
    smaller slope get the index i, the others m - i. This makes the map a
    homomorphism.
    """
    if P.infinity:
        return 0
    x, y = Fraction(P.x), Fraction(P.y)
    if x.denominator % ell == 0 or y.denominator % ell == 0:
        return 0
    a1, a2, a3, a4, _ = curve.ainvs
    fx = a1 * y - (3 * x * x + 2 * a2 * x + a4)
    psi2 = 2 * y + a1 * x + a3
    if valuation(fx, ell) <= 0 or valuation(psi2, ell) <= 0:
        return 0
    distance = min(valuation(psi2, ell), m // 2)
    if 2 * distance == m:
        return distance
    slope = -fx / psi2
    if valuation(slope, ell) < 0:
        raise RuntimeError(f"point {P} does not approach a branch of the node modulo {ell}")
    first, second = _node_slopes(curve, ell)
    residue = mod_fraction(slope, ell)
    if residue == first:
        return distance
    if residue == second:
        return (m - distance) % m
    raise RuntimeError(f"slope {residue} at {P} is not a tangent slope modulo {ell}")


# -- torsion -----------------------------------------------------------------


def _square_divisors(n: int) -> list[int]:
    roots = [1]
    for p, e in factorize(n).items():
        roots = [r * p**k for r in roots for k in range(e // 2 + 1)]
    return sorted(roots)


@lru_cache(maxsize=64)
def torsion_points(curve: WeierstrassCurve) -> tuple[Point, ...]:
    """Rational torsion via Nagell-Lutz on Y^2 = X^3 - 27 c4 X - 54 c6."""
    a1, _, a3, _, _ = curve.ainvs
    b2 = curve.b_invariants[0]
    A, B = -27 * curve.c4, -54 * curve.c6
    disc = abs(4 * A**3 + 27 * B * B)
    found = {INFINITY}
    for Y0 in [0] + _square_divisors(disc):
        for Y in {Y0, -Y0}:
            cubic = Poly([1, 0, A, B - Y * Y], _X)
            candidates = set()
            for (low, high), _ in cubic.intervals(eps=Rational(1, 4)):
                candidates.update(range(int(floor(low)), int(ceiling(high)) + 1))
            for X in sorted(candidates):
                if X**3 + A * X + B != Y * Y:
                    continue
                x = Fraction(X - 3 * b2, 36)
                y = (Fraction(Y, 108) - a1 * x - a3) / 2
                P = Point(x, y)
                if on_curve(curve, P) and any(multiply_point(curve, P, n).infinity for n in range(1, 13)):
                    found.add(P)
    return tuple(sorted(found, key=lambda P: (not P.infinity, P.x, P.y)))


def torsion_generators(curve: WeierstrassCurve) -> tuple[Point, ...]:
    """A minimal generating set of E(Q)_tors."""
    points = torsion_points(curve)
    if len(points) == 1:
        return ()
    orders = {P: next(n for n in range(1, 13) if multiply_point(curve, P, n).infinity) for P in points}
    first = max(points, key=lambda P: (orders[P], not P.infinity))
    if orders[first] == len(points):
        return (first,)
    span = {multiply_point(curve, first, k) for k in range(orders[first])}
    second = next(P for P in points if orders[P] == 2 and P not in span)
    return (first, second)


# -- periods -----------------------------------------------------------------


@dataclass(frozen=True)
class PeriodLattice:
    omega_plus: mp.mpf
    omega_minus: mp.mpc
    omega1: mp.mpf
    omega2: mp.mpc
    rectangular: bool

    @property
    def covolume(self):
        return abs(self.omega1 * mp.im(self.omega2))


def real_periods(curve: CurveLike, precision: int = 30) -> PeriodLattice:
    """Period lattice by AGM; ``omega_plus`` is the least positive real period."""
    curve = _curve_of(curve)
    if precision > 200:
        raise PrecisionError("periods are limited to 200 digits")
    b2, b4, b6, _ = curve.b_invariants
    with mp.workdps(precision + 15):
        roots = mp.polyroots([4, b2, 2 * b4, b6], maxsteps=500, extraprec=4 * precision + 50)
        tol = mp.mpf(10) ** (-(precision // 2))
        if curve.discriminant > 0:
            e3, e2, e1 = sorted(mp.re(r) for r in roots)
            omega1 = mp.pi / mp.agm(mp.sqrt(e1 - e3), mp.sqrt(e1 - e2))
            omega2 = mp.mpc(0, 1) * mp.pi / mp.agm(mp.sqrt(e1 - e3), mp.sqrt(e2 - e3))
            minus = omega2
        else:
            real = [mp.re(r) for r in roots if abs(mp.im(r)) < tol]
            if len(real) != 1:
                raise PrecisionError("could not isolate the real root of the 2-division cubic")
            e1 = real[0]
            a = 3 * e1 + mp.mpf(b2) / 4
            b = mp.sqrt(3 * e1 * e1 + mp.mpf(b2) * e1 / 2 + mp.mpf(b4) / 2)
            omega1 = 2 * mp.pi / mp.agm(2 * mp.sqrt(b), mp.sqrt(2 * b + a))
            imag = mp.pi / mp.agm(2 * mp.sqrt(b), mp.sqrt(2 * b - a))
            omega2 = mp.mpc(omega1 / 2, imag)
            minus = mp.mpc(0, 2 * imag)
        if not mp.isfinite(omega1) or omega1 <= 0:
            raise PrecisionError("AGM did not converge")
        lattice = PeriodLattice(
            omega_plus=+omega1,
            omega_minus=+minus,
            omega1=+omega1,
            omega2=+omega2,
            rectangular=curve.discriminant > 0,
        )
    logger.debug("periods of %s: %s, %s", curve.ainvs, mp.nstr(lattice.omega_plus, 15), mp.nstr(lattice.omega_minus, 15))
    return lattice


def lattice_index(lattice: PeriodLattice) -> int:
    """Index of Z*omega_plus + Z*omega_minus in the period lattice."""
    return 1 if lattice.rectangular else 2


def cyclicity_density(inverted_primes: Iterable[int], bound: int = 97) -> float:
    """Lower bound for the density of l with E(F_l)[p] cyclic at every p not inverted, p <= bound."""
    inverted = set(inverted_primes)
    defect = sum(1.0 / ((p * p - 1) * (p * p - p)) for p in primes_up_to(bound) if p not in inverted)
    return 1.0 - defect
