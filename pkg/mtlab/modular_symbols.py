"""Weight-two modular symbols for Gamma_0(N) in the Manin-symbol presentation.

A Manin symbol ``(c:d)`` stands for ``g{0, oo}`` where ``g`` is any matrix in
SL_2(Z) with bottom row congruent to ``(c, d)`` modulo N. The space M is the
free Q-module on P^1(Z/N) modulo the two- and three-term relations; every
symbol is stored as a sparse coordinate vector on the free generators that
survive the relations.

The curve's symbols ``[a/S]^+`` and ``[a/S]^-`` are read off two left
eigenvectors of the Hecke algebra acting on M, one for each eigenvalue of
the star involution.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import gcd
from typing import Iterator, Optional, Protocol, Sequence

import mpmath as mp

from .ec_arithmetic import CurveProfile, trace_of_frobenius
from .errors import EigenspaceIsolationError, InvalidPrimeError, LevelTooLargeError, NormalizationError
from .linalg import (
    integer_left_kernel,
    lattice_from_rational_rows,
    left_kernel,
    mat_mul,
    nullspace,
    rref,
    to_domain_matrix,
)
from .utilities import divisors, euler_phi, fraction_text, gcdex, is_prime, prime_divisors, primes_up_to, rational_gcd

logger = logging.getLogger(__name__)

PAYLOAD_SCHEMA = "mtlab.space/1"
ISOLATION_BOUND = 200
RECONCILIATION_HEIGHT = 4

SparseVector = dict[int, Fraction]


# -- P^1(Z/N) ----------------------------------------------------------------


def _lift_unit(n: int, d: int, a: int) -> int:
    """Lift a unit ``a`` modulo a divisor ``d`` of ``n`` to a unit modulo ``n``."""
    u, v = 1, n
    g = gcd(v, d)
    while g > 1:
        u *= g
        v //= g
        g = gcd(v, g)
    x, y, _ = gcdex(u, v)
    return (u * x + a * y * v) % n


class P1List:
    """Canonical representatives of P^1(Z/N), sorted.

    ``reduce`` picks the representative ``(g, v)`` with ``g | N`` and ``v``
    minimal among unit rescalings, so indices are stable across runs.
    """

    def __init__(self, N: int):
        if N < 1:
            raise ValueError("level must be positive")
        self.N = N
        reps = {(0, 1)}
        for g in divisors(N):
            if g == N:
                continue
            for v in range(N):
                if gcd(gcd(g, v), N) == 1:
                    reps.add(self.reduce(g, v))
        self._list = sorted(reps)
        self._index = {rep: i for i, rep in enumerate(self._list)}

    def __len__(self) -> int:
        return len(self._list)

    def __getitem__(self, i: int) -> tuple[int, int]:
        return self._list[i]

    def __iter__(self) -> Iterator[tuple[int, int]]:
        return iter(self._list)

    def reduce(self, c: int, d: int) -> tuple[int, int]:
        N = self.N
        c %= N
        d %= N
        if N == 1:
            return 0, 1
        if c == 0:
            if gcd(N, d) != 1:
                raise ValueError(f"({c}:{d}) is not in P^1(Z/{N})")
            return 0, 1
        _, s, g = gcdex(N, c)
        if gcd(g, d) > 1:
            raise ValueError(f"({c}:{d}) is not in P^1(Z/{N})")
        s = _lift_unit(N, N // g, s)
        c, d = g, (s * d) % N
        if g == 1:
            return 1, d
        d = min((d * t) % N for t in range(1, N, N // g) if gcd(N, t) == 1)
        return g, d

    def index(self, c: int, d: int) -> int:
        return self._index[self.reduce(c, d)]

    def try_index(self, c: int, d: int) -> Optional[int]:
        if gcd(gcd(c, d), self.N) != 1:
            return None
        return self.index(c, d)


# -- the space ---------------------------------------------------------------


def _cusp_key(u: int, v: int) -> tuple[int, int]:
    if v < 0 or (v == 0 and u < 0):
        u, v = -u, -v
    return u, v


def cusps_equivalent(N: int, first: tuple[int, int], second: tuple[int, int]) -> bool:
    """Gamma_0(N)-equivalence of cusps u1/v1 and u2/v2 given in lowest terms."""
    u1, v1 = _cusp_key(*first)
    u2, v2 = _cusp_key(*second)
    s1 = gcdex(u1, v1)[0]
    s2 = gcdex(u2, v2)[0]
    return (s1 * v2 - s2 * v1) % gcd(N, v1 * v2) == 0


def _sl2_lift(c: int, d: int, N: int) -> tuple[int, int, int, int]:
    """A matrix ``[[a, b], [c', d']]`` in SL_2(Z) with ``(c', d') = (c, d)`` mod N."""
    if c == 0:
        c = N
    while gcd(c, d) != 1:
        d += N
    x, y, _ = gcdex(d, -c)
    return x, y, c, d


def merel_matrices(n: int) -> Iterator[tuple[int, int, int, int]]:
    """Merel's set of integer matrices of determinant ``n`` realizing T_n on Manin symbols."""
    for a in range(1, n + 1):
        for d in range((n + a - 1) // a, n + 2 - a):
            bc = a * d - n
            if bc == 0:
                for b in range(a):
                    yield a, b, 0, d
                for c in range(1, d):
                    yield a, 0, c, d
            else:
                for b in range((bc - 1) // (d - 1) + 1, a):
                    if bc % b == 0:
                        yield a, b, bc // b, d


@dataclass(frozen=True, eq=False)
class ManinSymbolSpace:
    """M_2(Gamma_0(N)) with its cuspidal subspace.

    Attributes:
        N: the level.
        p1: canonical representatives of P^1(Z/N).
        manin: coordinates of every Manin symbol on the free generators.
        free: P^1 indices of the free generators (the quotient basis).
        cusps: one ``(u, v)`` representative per cusp class.
        boundary: boundary map, one row per cusp, one column per free generator.
        cuspidal_basis: reduced echelon basis of the kernel of ``boundary``.
    """

    N: int
    p1: P1List
    manin: tuple[SparseVector, ...]
    free: tuple[int, ...]
    cusps: tuple[tuple[int, int], ...]
    boundary: tuple[tuple[int, ...], ...]
    cuspidal_basis: tuple[tuple[Fraction, ...], ...]
    cuspidal_pivots: tuple[int, ...]
    _hecke: dict = field(default_factory=dict, repr=False)

    @property
    def dimension(self) -> int:
        return len(self.free)

    @property
    def cuspidal_dimension(self) -> int:
        return len(self.cuspidal_basis)

    def manin_vector(self, index: int) -> list[Fraction]:
        vec = [Fraction(0)] * self.dimension
        for j, x in self.manin[index].items():
            vec[j] = x
        return vec

    def symbol_vector(self, c: int, d: int) -> list[Fraction]:
        return self.manin_vector(self.p1.index(c, d))

    @cached_property
    def star_matrix(self) -> list[list[Fraction]]:
        """Matrix of (c:d) -> (-c:d) acting on column coordinates."""
        columns = []
        for i in self.free:
            c, d = self.p1[i]
            columns.append(self.symbol_vector(-c, d))
        return _columns_to_matrix(columns, self.dimension)

    @cached_property
    def integral_homology(self) -> list[list[Fraction]]:
        """Z-basis of the boundary kernel inside the Z-span of all Manin symbols."""
        vectors = [self.manin_vector(i) for i in range(len(self.p1)) if self.manin[i]]
        lattice, d = lattice_from_rational_rows(vectors, self.dimension)
        images = [
            [sum(row[j] * b[j] for j in range(self.dimension)) for row in self.boundary]
            for b in lattice.basis
        ]
        kernel = integer_left_kernel(images, len(self.cusps))
        return [
            [Fraction(sum(y * b[j] for y, b in zip(coeffs, lattice.basis)), d) for j in range(self.dimension)]
            for coeffs in kernel
        ]

    def to_payload(self) -> dict:
        """JSON-ready dump; rationals as exact ``"p/q"`` strings."""
        return {
            "schema": PAYLOAD_SCHEMA,
            "N": self.N,
            "free": list(self.free),
            "manin": [[[j, fraction_text(x)] for j, x in sorted(vec.items())] for vec in self.manin],
            "cusps": [list(c) for c in self.cusps],
            "boundary": [list(row) for row in self.boundary],
            "cuspidal_basis": [[fraction_text(x) for x in row] for row in self.cuspidal_basis],
            "cuspidal_pivots": list(self.cuspidal_pivots),
        }

    @classmethod
    def from_payload(cls, payload: dict) -> "ManinSymbolSpace":
        if payload.get("schema") != PAYLOAD_SCHEMA:
            raise ValueError(f"unsupported space payload {payload.get('schema')!r}")
        N = int(payload["N"])
        return cls(
            N=N,
            p1=P1List(N),
            manin=tuple({int(j): Fraction(x) for j, x in vec} for vec in payload["manin"]),
            free=tuple(payload["free"]),
            cusps=tuple(tuple(c) for c in payload["cusps"]),
            boundary=tuple(tuple(row) for row in payload["boundary"]),
            cuspidal_basis=tuple(tuple(Fraction(x) for x in row) for row in payload["cuspidal_basis"]),
            cuspidal_pivots=tuple(payload["cuspidal_pivots"]),
        )


def _columns_to_matrix(columns: Sequence[Sequence[Fraction]], dim: int) -> list[list[Fraction]]:
    return [[columns[j][i] for j in range(len(columns))] for i in range(dim)]


def build_space(N: int, max_level: int = 5000) -> ManinSymbolSpace:
    """Quotient of Q[P^1(Z/N)] by the Manin relations, with boundary and cuspidal data.

    Args:
        N: level of Gamma_0(N).
        max_level: largest level accepted.

    Returns:
        ManinSymbolSpace: the space, its boundary map and its cuspidal subspace.
    """
    if N < 1:
        raise ValueError("level must be positive")
    if N > max_level:
        raise LevelTooLargeError(f"level {N} exceeds the limit {max_level}")
    started = time.perf_counter()
    p1 = P1List(N)
    n = len(p1)

    # x + x*sigma = 0 with sigma: (c:d) -> (d:-c).
    two_term: list[Optional[tuple[int, int]]] = [None] * n
    reps: list[int] = []
    for i, (c, d) in enumerate(p1):
        if two_term[i] is not None:
            continue
        j = p1.index(d, -c)
        if j == i:
            two_term[i] = (0, i)
            continue
        two_term[i] = (1, i)
        two_term[j] = (-1, i)
        reps.append(i)
    column_of = {r: k for k, r in enumerate(reps)}

    # x + x*tau + x*tau^2 = 0 with tau: (c:d) -> (d:-c-d).
    rows: list[list[Fraction]] = []
    seen: set[frozenset[int]] = set()
    for i, (c, d) in enumerate(p1):
        j = p1.index(d, -c - d)
        k = p1.index(-c - d, c)
        orbit = frozenset((i, j, k))
        if orbit in seen:
            continue
        seen.add(orbit)
        row = [Fraction(0)] * len(reps)
        for m in (i, j, k):
            sign, rep = two_term[m]  # type: ignore[misc]
            if sign:
                row[column_of[rep]] += sign
        if any(row):
            rows.append(row)

    reduced, pivots = rref(rows, len(reps))
    free_columns = [k for k in range(len(reps)) if k not in set(pivots)]
    position = {k: pos for pos, k in enumerate(free_columns)}
    rep_vectors: list[SparseVector] = []
    pivot_row = {col: r for r, col in enumerate(pivots)}
    for k in range(len(reps)):
        if k in position:
            rep_vectors.append({position[k]: Fraction(1)})
        else:
            row = reduced[pivot_row[k]]
            rep_vectors.append({position[j]: -row[j] for j in free_columns if row[j]})

    manin: list[SparseVector] = []
    for i in range(n):
        sign, rep = two_term[i]  # type: ignore[misc]
        if not sign:
            manin.append({})
        else:
            manin.append({j: sign * x for j, x in rep_vectors[column_of[rep]].items()})
    free = tuple(reps[k] for k in free_columns)

    cusps: list[tuple[int, int]] = []

    def cusp_index(u: int, v: int) -> int:
        for idx, other in enumerate(cusps):
            if cusps_equivalent(N, (u, v), other):
                return idx
        cusps.append(_cusp_key(u, v))
        return len(cusps) - 1

    boundary_columns: list[dict[int, int]] = []
    for i in free:
        a, b, c, d = _sl2_lift(*p1[i], N)
        col: dict[int, int] = {}
        col[cusp_index(a, c)] = col.get(cusp_index(a, c), 0) + 1
        col[cusp_index(b, d)] = col.get(cusp_index(b, d), 0) - 1
        boundary_columns.append(col)
    boundary = tuple(
        tuple(boundary_columns[j].get(r, 0) for j in range(len(free))) for r in range(len(cusps))
    )
    cuspidal = nullspace([list(row) for row in boundary], len(free)) if free else []
    cuspidal_pivots = tuple(next(j for j, x in enumerate(row) if x) for row in cuspidal)

    space = ManinSymbolSpace(
        N=N,
        p1=p1,
        manin=tuple(manin),
        free=free,
        cusps=tuple(cusps),
        boundary=boundary,
        cuspidal_basis=tuple(tuple(row) for row in cuspidal),
        cuspidal_pivots=cuspidal_pivots,
    )
    logger.info(
        "Built modular symbols for N=%d: dim=%d cuspidal=%d cusps=%d (%.2fs)",
        N, space.dimension, space.cuspidal_dimension, len(cusps), time.perf_counter() - started,
    )
    return space


# -- Hecke operators ---------------------------------------------------------


def _check_hecke_prime(space: ManinSymbolSpace, ell: int) -> None:
    if not is_prime(ell):
        raise InvalidPrimeError(f"{ell} is not prime")
    if space.N % ell == 0:
        raise InvalidPrimeError(f"{ell} divides the level {space.N}; U_{ell} is not provided")


def full_hecke_matrix(space: ManinSymbolSpace, ell: int) -> list[list[Fraction]]:
    """T_l on all of M, acting on column coordinates."""
    _check_hecke_prime(space, ell)
    cached = space._hecke.get(ell)
    if cached is not None:
        return cached
    N, p1 = space.N, space.p1
    moves = list(merel_matrices(ell))
    columns = []
    for i in space.free:
        c, d = p1[i]
        acc: dict[int, Fraction] = {}
        for p, q, r, s in moves:
            target = p1.try_index(p * c + r * d, q * c + s * d)
            if target is None:
                continue
            for j, x in space.manin[target].items():
                acc[j] = acc.get(j, Fraction(0)) + x
        columns.append([acc.get(j, Fraction(0)) for j in range(space.dimension)])
    matrix = _columns_to_matrix(columns, space.dimension)
    space._hecke[ell] = matrix
    return matrix


def hecke_matrix(space: ManinSymbolSpace, ell: int) -> list[list[Fraction]]:
    """T_l on the cuspidal subspace, in coordinates of ``space.cuspidal_basis``."""
    full = full_hecke_matrix(space, ell)
    columns = []
    for basis_vector in space.cuspidal_basis:
        image = [sum(row[k] * basis_vector[k] for k in range(space.dimension)) for row in full]
        columns.append([image[p] for p in space.cuspidal_pivots])
    return _columns_to_matrix(columns, space.cuspidal_dimension)


def cuspidal_hecke_charpoly(space: ManinSymbolSpace, ell: int) -> list[Fraction]:
    """Characteristic polynomial of T_l on cusp symbols, leading coefficient first."""
    matrix = hecke_matrix(space, ell)
    if not matrix:
        return [Fraction(1)]
    coeffs = to_domain_matrix(matrix, len(matrix)).charpoly()
    return [Fraction(int(c.numerator), int(c.denominator)) for c in coeffs]


def genus_x0(N: int) -> int:
    """Genus of X_0(N) from the index, elliptic points and cusps."""
    primes = prime_divisors(N)
    mu = Fraction(N)
    for p in primes:
        mu *= Fraction(p + 1, p)
    nu2 = 0
    if N % 4:
        nu2 = 1
        for p in primes:
            nu2 *= 1 + (0 if p == 2 else (1 if p % 4 == 1 else -1))
    nu3 = 0
    if N % 9:
        nu3 = 1
        for p in primes:
            nu3 *= 1 + (0 if p == 3 else (1 if p % 3 == 1 else -1))
    genus = 1 + mu / 12 - Fraction(nu2, 4) - Fraction(nu3, 3) - Fraction(cusps_x0(N), 2)
    if genus.denominator != 1:
        raise ArithmeticError(f"non-integral genus {genus} for N={N}")
    return int(genus)


def cusps_x0(N: int) -> int:
    return sum(euler_phi(gcd(d, N // d)) for d in divisors(N))


# -- eigensymbols ------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class EigenSymbol:
    """Plus and minus eigenfunctionals of the curve's newform on M.

    Functionals are row vectors on the free generators. ``scale_plus`` and
    ``scale_minus`` multiply the raw functional values; ``minus_sign``
    records whether the minus functional was matched to +|Omega^-| or
    -|Omega^-| during normalization.
    """

    space: ManinSymbolSpace
    plus_functional: tuple[Fraction, ...]
    minus_functional: tuple[Fraction, ...]
    scale_plus: Fraction = Fraction(1)
    scale_minus: Fraction = Fraction(1)
    primes_used: tuple[int, ...] = ()
    profile: Optional[CurveProfile] = None
    normalized: bool = False
    reconciliation: Optional[tuple[Fraction, Fraction]] = None
    minus_sign: int = 1

    @property
    def label(self) -> str:
        return self.profile.label if self.profile is not None else f"N={self.space.N}"

    @cached_property
    def plus_table(self) -> tuple[Fraction, ...]:
        return _value_table(self.space, self.plus_functional, self.scale_plus)

    @cached_property
    def minus_table(self) -> tuple[Fraction, ...]:
        return _value_table(self.space, self.minus_functional, self.scale_minus)

    def rescaled(self, scale_plus: Fraction, scale_minus: Fraction, **changes) -> "EigenSymbol":
        return EigenSymbol(
            space=self.space,
            plus_functional=self.plus_functional,
            minus_functional=self.minus_functional,
            scale_plus=scale_plus,
            scale_minus=scale_minus,
            primes_used=self.primes_used,
            profile=self.profile,
            normalized=changes.get("normalized", self.normalized),
            reconciliation=changes.get("reconciliation", self.reconciliation),
            minus_sign=changes.get("minus_sign", self.minus_sign),
        )


def _value_table(space: ManinSymbolSpace, functional: Sequence[Fraction], scale: Fraction) -> tuple[Fraction, ...]:
    values = []
    for vec in space.manin:
        values.append(scale * sum((functional[j] * x for j, x in vec.items()), Fraction(0)))
    return tuple(values)


def _restrict(basis: list[list[Fraction]], operator: list[list[Fraction]], eigenvalue: int, dim: int) -> list[list[Fraction]]:
    """Rows v in span(basis) with v (operator - eigenvalue) = 0."""
    shifted = [[x - (eigenvalue if i == j else 0) for j, x in enumerate(row)] for i, row in enumerate(operator)]
    image = mat_mul(basis, shifted, dim)
    combos = left_kernel(image, dim)
    return rref(mat_mul(combos, basis, dim), dim)[0] if combos else []


def isolate_eigensymbol(space: ManinSymbolSpace, profile: CurveProfile, bound: int = ISOLATION_BOUND) -> EigenSymbol:
    """Cut out the one-dimensional star eigenspaces of the curve's newform.

    Raises:
        EigenspaceIsolationError: when the eigenspaces are still larger than one
            dimension after every good prime up to ``bound``.
    """
    if profile.N != space.N:
        raise ValueError(f"space has level {space.N} but {profile.label} has conductor {profile.N}")
    dim = space.dimension
    star = space.star_matrix
    identity = [[Fraction(int(i == j)) for j in range(dim)] for i in range(dim)]
    spaces = {}
    for sign in (1, -1):
        shifted = [[star[i][j] - sign * identity[i][j] for j in range(dim)] for i in range(dim)]
        spaces[sign] = left_kernel(shifted, dim)
    used: list[int] = []
    for ell in primes_up_to(bound):
        if all(len(basis) == 1 for basis in spaces.values()):
            break
        if space.N % ell == 0:
            continue
        a_ell = trace_of_frobenius(profile, ell)
        operator = full_hecke_matrix(space, ell)
        for sign in (1, -1):
            if len(spaces[sign]) > 1:
                spaces[sign] = _restrict(spaces[sign], operator, a_ell, dim)
        used.append(ell)
        logger.debug("N=%d after T_%d: dims %d/%d", space.N, ell, len(spaces[1]), len(spaces[-1]))
        if any(not basis for basis in spaces.values()):
            break
    if any(len(basis) != 1 for basis in spaces.values()):
        raise EigenspaceIsolationError(
            f"{profile.label}: eigenspace dimensions {len(spaces[1])}/{len(spaces[-1])} after primes {used}"
        )
    logger.info("Isolated eigensymbol of %s with primes %s", profile.label, used)
    return EigenSymbol(
        space=space,
        plus_functional=tuple(spaces[1][0]),
        minus_functional=tuple(spaces[-1][0]),
        primes_used=tuple(used),
        profile=profile,
    )


# -- evaluation --------------------------------------------------------------


def manin_path(N: int, a: int, S: int, p1: Optional[P1List] = None) -> list[tuple[int, int]]:
    """Manin symbols ``(c, d)`` whose sum is minus the path ``{a/S, oo}``.

    Uses the convergents p_j/q_j of a/S with p_{-2}/q_{-2} = 0/1 and
    p_{-1}/q_{-1} = 1/0; the j-th step is the symbol ((-1)^(j-1) q_j : q_{j-1}).
    """
    if S < 1:
        raise ValueError("S must be positive")
    if gcd(a, S) != 1:
        raise ValueError(f"gcd({a}, {S}) != 1")
    qs = [1, 0]
    symbols = []
    x, y = a, S
    j = 0
    while y:
        quotient, remainder = divmod(x, y)
        qs.append(quotient * qs[-1] + qs[-2])
        sign = 1 if j % 2 else -1
        symbols.append((sign * qs[-1], qs[-2]))
        x, y = y, remainder
        j += 1
    return symbols


def eval_symbol(eig: EigenSymbol, a: int, S: int) -> tuple[Fraction, Fraction]:
    """``([a/S]^+, [a/S]^-)`` as exact rationals."""
    space = eig.space
    plus = minus = Fraction(0)
    for c, d in manin_path(space.N, a, S):
        index = space.p1.index(c, d)
        plus -= eig.plus_table[index]
        minus -= eig.minus_table[index]
    return plus, minus


def functional_values(eig: EigenSymbol, vector: Sequence[Fraction]) -> tuple[Fraction, Fraction]:
    """Scaled functional values on an arbitrary element of M."""
    plus = sum((x * y for x, y in zip(eig.plus_functional, vector)), Fraction(0)) * eig.scale_plus
    minus = sum((x * y for x, y in zip(eig.minus_functional, vector)), Fraction(0)) * eig.scale_minus
    return plus, minus


# -- normalization -----------------------------------------------------------


class PeriodOracle(Protocol):
    """Numeric side of the normalization: period integrals divided by Omega^+ and |Omega^-|."""

    precision: int

    def symbol(self, a: int, S: int) -> tuple[mp.mpf, mp.mpf]:
        ...


def _stage2_candidates(N: int, max_modulus: int = 60) -> Iterator[tuple[int, int]]:
    yield 0, 1
    for S in range(2, max_modulus + 1):
        if gcd(S, N) != 1:
            continue
        for a in range(1, S):
            if gcd(a, S) == 1:
                yield a, S


def _recognize(value: mp.mpf, precision: int) -> Fraction:
    guess = Fraction(mp.nstr(value, max(15, precision // 2))).limit_denominator(RECONCILIATION_HEIGHT)
    tolerance = mp.mpf(10) ** (-(precision // 3))
    if guess == 0 or abs(guess.numerator) > RECONCILIATION_HEIGHT or abs(value - mp.mpf(guess.numerator) / guess.denominator) > tolerance:
        raise NormalizationError(f"reconciliation constant {mp.nstr(value, 20)} is not a small-height rational")
    return guess


def normalize(eig: EigenSymbol, profile: CurveProfile, oracle: PeriodOracle) -> EigenSymbol:
    """Scale the functionals to the Neron-period normalization.

    Stage 1 makes each functional take the value lattice Z on integral cuspidal
    homology. Stage 2 compares one nonzero symbol with its period integral and
    multiplies by the resulting small rational.
    """
    if oracle.precision < 25:
        raise NormalizationError("normalization needs at least 25 digits")
    homology = eig.space.integral_homology
    stage1 = []
    for functional in (eig.plus_functional, eig.minus_functional):
        content = rational_gcd(sum((x * y for x, y in zip(functional, h)), Fraction(0)) for h in homology)
        if content == 0:
            raise NormalizationError(f"{profile.label}: functional vanishes on integral homology")
        stage1.append(1 / content)
    unit = eig.rescaled(stage1[0], stage1[1])

    corrections: list[Fraction] = []
    for sign_index in (0, 1):
        for a, S in _stage2_candidates(profile.N):
            exact = eval_symbol(unit, a, S)[sign_index]
            if exact:
                break
        else:
            raise NormalizationError(f"{profile.label}: no nonzero symbol found for stage 2")
        numeric = oracle.symbol(a, S)[sign_index]
        ratio = numeric / (mp.mpf(exact.numerator) / exact.denominator)
        kappa = _recognize(ratio, oracle.precision)
        logger.info(
            "%s: %s reconciliation constant %s at a/S = %d/%d", profile.label, "+-"[sign_index], kappa, a, S
        )
        corrections.append(kappa)
    return unit.rescaled(
        stage1[0] * corrections[0],
        stage1[1] * corrections[1],
        normalized=True,
        reconciliation=(corrections[0], corrections[1]),
        minus_sign=1 if corrections[1] > 0 else -1,
    )
