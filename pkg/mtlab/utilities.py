"""Small integer and rational helpers shared by the arithmetic modules.

Prime and divisor work is delegated to :mod:`sympy.ntheory`; the wrappers
pin down return types (plain ``int``) and the error behaviour callers rely on.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Iterable, Iterator, Sequence

from sympy import divisors as _sympy_divisors
from sympy import factorint as _sympy_factorint
from sympy import isprime as _sympy_isprime, multiplicity, primerange, totient
from sympy.core.intfunc import igcdex
from sympy.ntheory import primitive_root as _sympy_primitive_root
from sympy.ntheory.modular import crt as _sympy_crt


def gcdex(a: int, b: int) -> tuple[int, int, int]:
    """Return ``(x, y, g)`` with ``g = gcd(a, b) >= 0`` and ``a*x + b*y == g``."""
    x, y, g = igcdex(a, b)
    return int(x), int(y), int(g)


def is_prime(n: int) -> bool:
    return n >= 2 and bool(_sympy_isprime(n))


def factorize(n: int) -> dict[int, int]:
    """Prime factorization of ``|n|`` as an ordered ``{p: e}`` map."""
    if n == 0:
        raise ValueError("cannot factor 0")
    return {int(p): int(e) for p, e in sorted(_sympy_factorint(abs(n)).items())}


def prime_divisors(n: int) -> list[int]:
    return list(factorize(n)) if abs(n) > 1 else []


def is_squarefree(n: int) -> bool:
    return n >= 1 and all(e == 1 for e in factorize(n).values())


def valuation(n: int | Fraction, p: int) -> int:
    """p-adic valuation; ``valuation(0, p)`` is a large sentinel."""
    n = Fraction(n)
    if n == 0:
        return 10**9
    return int(multiplicity(p, abs(n.numerator))) - int(multiplicity(p, n.denominator))


def primes_up_to(bound: int) -> list[int]:
    return [int(p) for p in primerange(2, bound + 1)] if bound >= 2 else []


def divisors(n: int) -> list[int]:
    return [int(d) for d in _sympy_divisors(n)]


def euler_phi(n: int) -> int:
    return int(totient(n))


@lru_cache(maxsize=None)
def primitive_root(modulus: int) -> int:
    """Least primitive root modulo an odd prime power (or 2, 4)."""
    factors = factorize(modulus)
    if modulus not in (2, 4) and (len(factors) != 1 or 2 in factors):
        raise ValueError(f"{modulus} has no primitive root handled here")
    return int(_sympy_primitive_root(modulus))


def crt(residues: Sequence[int], moduli: Sequence[int]) -> int:
    """Solve ``x = r_i mod m_i`` for pairwise coprime moduli; result in ``[0, prod m)``."""
    for i, m in enumerate(moduli):
        if any(gcd(m, other) != 1 for other in moduli[i + 1 :]):
            raise ValueError("moduli must be pairwise coprime")
    solution = _sympy_crt(list(moduli), list(residues))
    if solution is None:
        raise ValueError("no simultaneous solution")
    return int(solution[0])


def squarefree_products(primes: Sequence[int], include_one: bool = False) -> Iterator[int]:
    """All products of distinct elements of ``primes`` in increasing order."""
    products = {1}
    for p in primes:
        products |= {q * p for q in products}
    for s in sorted(products):
        if s == 1 and not include_one:
            continue
        yield s


def rational_gcd(values: Iterable[Fraction]) -> Fraction:
    """Positive generator of the Z-module spanned by ``values`` (0 if all vanish)."""
    values = [Fraction(v) for v in values if v]
    if not values:
        return Fraction(0)
    den = 1
    for v in values:
        den = den * v.denominator // gcd(den, v.denominator)
    g = 0
    for v in values:
        g = gcd(g, int(v * den))
    return Fraction(g, den)


def fraction_text(value: Fraction) -> str:
    """Exact ``"p/q"`` text (``"p"`` for integers)."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def mod_fraction(value: Fraction, p: int) -> int:
    """Image of a p-integral rational in Z/p."""
    value = Fraction(value)
    if value.denominator % p == 0:
        raise ValueError(f"{value} is not {p}-integral")
    return value.numerator * pow(value.denominator, -1, p) % p
