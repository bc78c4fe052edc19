"""Numerical L-values and period integrals from the curve's q-expansion.

Everything here runs in mpmath at a configurable number of digits. The sums
are the usual exponentially smoothed series obtained by splitting each
integral at the fixed point of the relevant Atkin-Lehner involution.
"""

from __future__ import annotations

import logging
import threading
from math import ceil, gcd, log, pi, sqrt
from typing import Optional

import mpmath as mp

from .ec_arithmetic import CurveProfile, PeriodLattice, real_periods, trace_of_frobenius
from .errors import PrecisionError
from .group_ring import DirichletCharacter, gauss_sum_at_working_precision

logger = logging.getLogger(__name__)

TERM_MARGIN = 20

# Sign in front of the reflected sum of twisted_l_value. It was fixed once by
# calibrate_reflection_sign on the conductor 11 curve with the quadratic character mod 5.
REFLECTION_SIGN = 1


class FourierCoefficients:
    """a_n of the curve's newform, extended on demand.

    Prime coefficients come from point counting; the rest follow from
    multiplicativity and a_{l^k} = a_l a_{l^(k-1)} - eps(l) l a_{l^(k-2)}.
    Extension is serialized by a lock; readers see a fully built prefix.
    """

    def __init__(self, profile: CurveProfile):
        self.profile = profile
        self._values: list[int] = [0, 1]
        self._lock = threading.Lock()

    @property
    def bound(self) -> int:
        return len(self._values) - 1

    def ensure(self, bound: int) -> None:
        if bound <= self.bound:
            return
        with self._lock:
            if bound <= self.bound:
                return
            target = max(bound, 2 * self.bound)
            self._values = self._compute(target)
            logger.debug("%s: a_n computed up to %d", self.profile.label, target)

    def _compute(self, bound: int) -> list[int]:
        spf = list(range(bound + 1))
        for i in range(2, int(sqrt(bound)) + 1):
            if spf[i] == i:
                for j in range(i * i, bound + 1, i):
                    if spf[j] == j:
                        spf[j] = i
        values = [0] * (bound + 1)
        values[1] = 1
        old = self._values
        for n in range(2, bound + 1):
            if n < len(old):
                values[n] = old[n]
                continue
            p = spf[n]
            m, k = n, 0
            while m % p == 0:
                m //= p
                k += 1
            if m > 1:
                values[n] = values[n // m] * values[m]
            elif k == 1:
                values[n] = trace_of_frobenius(self.profile, p)
            else:
                values[n] = values[p] * values[n // p] - self.profile.epsilon(p) * p * values[n // (p * p)]
        return values

    def __getitem__(self, n: int) -> int:
        self.ensure(n)
        return self._values[n]

    def upto(self, bound: int) -> list[int]:
        """a_0..a_bound (a_0 = 0)."""
        self.ensure(bound)
        return self._values[: bound + 1]


_COEFFICIENTS: dict[str, FourierCoefficients] = {}
_COEFFICIENTS_LOCK = threading.Lock()


def fourier_coefficients(profile: CurveProfile) -> FourierCoefficients:
    with _COEFFICIENTS_LOCK:
        coefficients = _COEFFICIENTS.get(profile.label)
        if coefficients is None or coefficients.profile != profile:
            coefficients = FourierCoefficients(profile)
            _COEFFICIENTS[profile.label] = coefficients
        return coefficients


def term_count(N: int, precision: int, m: int = 1, t: float = 1.0) -> int:
    """Terms needed for exp(-2 pi n min(t, 1/t) / (m sqrt N)) < 10^-precision."""
    height = min(t, 1 / t)
    return ceil(sqrt(N) * m * precision * log(10) / (2 * pi * height)) + TERM_MARGIN


def _check_precision(precision: int) -> None:
    if not 10 <= precision <= 200:
        raise PrecisionError(f"precision {precision} outside 10..200 digits")


def _q_series(profile: CurveProfile, y: mp.mpf, precision: int) -> mp.mpf:
    """f(iy) = sum a_n exp(-2 pi n y)."""
    count = ceil(precision * log(10) / (2 * pi * float(y))) + TERM_MARGIN
    coefficients = fourier_coefficients(profile).upto(count)
    q = mp.exp(-2 * mp.pi * y)
    total, power = mp.mpf(0), mp.mpf(1)
    for n in range(1, count + 1):
        power *= q
        if coefficients[n]:
            total += coefficients[n] * power
    return total


def epsilon_sign(profile: CurveProfile, precision: int = 30, height: float = 1.1) -> int:
    """Root number from f(i/(N t)) = eps N t^2 f(i t) at t = height/sqrt(N).

    Raises:
        PrecisionError: if the ratio is not within 10^(-precision/2) of +1 or -1.
    """
    _check_precision(precision)
    N = profile.N
    with mp.workdps(precision + 10):
        t = mp.mpf(height) / mp.sqrt(N)
        left = _q_series(profile, 1 / (N * t), precision + 5)
        right = N * t * t * _q_series(profile, t, precision + 5)
        ratio = left / right
        tolerance = mp.mpf(10) ** (-(precision // 2))
        if abs(ratio - 1) < tolerance:
            return 1
        if abs(ratio + 1) < tolerance:
            return -1
    raise PrecisionError(f"{profile.label}: root-number ratio {mp.nstr(ratio, 15)} is not +-1")


def l_value(profile: CurveProfile, precision: int = 30, epsilon: Optional[int] = None) -> mp.mpf:
    """L(E, 1) = (1 + eps) sum a_n/n exp(-2 pi n / sqrt N)."""
    _check_precision(precision)
    if epsilon is None:
        epsilon = epsilon_sign(profile, precision)
    if epsilon == -1:
        return mp.mpf(0)
    N = profile.N
    count = term_count(N, precision + 5)
    coefficients = fourier_coefficients(profile).upto(count)
    with mp.workdps(precision + 10):
        q = mp.exp(-2 * mp.pi / mp.sqrt(N))
        total, power = mp.mpf(0), mp.mpf(1)
        for n in range(1, count + 1):
            power *= q
            if coefficients[n]:
                total += mp.mpf(coefficients[n]) / n * power
        return 2 * total


def symbol_value(profile: CurveProfile, a: int, S: int, precision: int = 30, epsilon: Optional[int] = None) -> mp.mpc:
    """lambda(a, S) = 2 pi i times the integral of f from i*oo down to a/S.

    With N a a' = -1 mod S the path is split at a/S + i/(S sqrt N), giving
    sum a_n/n exp(-2 pi n/(S sqrt N)) (e(na/S) + eps e(na'/S)). Needs gcd(S, N) = 1.
    """
    _check_precision(precision)
    N = profile.N
    if S < 1 or gcd(a, S) != 1:
        raise ValueError(f"{a}/{S} is not a reduced fraction")
    if gcd(S, N) != 1:
        raise ValueError(f"gcd(S, N) = gcd({S}, {N}) != 1")
    if epsilon is None:
        epsilon = epsilon_sign(profile, precision)
    a_prime = (-pow(N * a, -1, S)) % S if S > 1 else 0
    count = term_count(N, precision + 5, m=S)
    coefficients = fourier_coefficients(profile).upto(count)
    with mp.workdps(precision + 10):
        roots = [mp.expjpi(mp.mpf(2 * k) / S) for k in range(S)]
        q = mp.exp(-2 * mp.pi / (S * mp.sqrt(N)))
        total, power = mp.mpc(0), mp.mpf(1)
        for n in range(1, count + 1):
            power *= q
            c = coefficients[n]
            if c:
                phase = roots[n * a % S] + epsilon * roots[n * a_prime % S]
                total += mp.mpf(c) / n * power * phase
        return +total


def twisted_l_value(
    profile: CurveProfile,
    chi: DirichletCharacter,
    precision: int = 30,
    epsilon: Optional[int] = None,
    height: float = 1.0,
    reflection_sign: int = REFLECTION_SIGN,
) -> mp.mpc:
    """L(E, chi, 1) for a primitive character chi modulo m with gcd(m, N) = 1.

    L = sum chi(n) a_n/n exp(-2 pi n t/(m sqrt N))
        + w sum conj(chi)(n) a_n/n exp(-2 pi n/(t m sqrt N)),
    with w = eps chi(N) tau(chi)^2 / m. The value does not depend on t.
    """
    _check_precision(precision)
    m = chi.modulus
    N = profile.N
    if not chi.is_primitive:
        raise ValueError(f"{chi} is not primitive")
    if gcd(m, N) != 1:
        raise ValueError(f"gcd(m, N) = gcd({m}, {N}) != 1")
    if m > 100:
        raise ValueError("twisted L-values are limited to conductors m <= 100")
    if epsilon is None:
        epsilon = epsilon_sign(profile, precision)
    count = term_count(N, precision + 5, m=m, t=height)
    coefficients = fourier_coefficients(profile).upto(count)
    with mp.workdps(precision + 10):
        values = [chi.value_of_residue(r) for r in range(m)]
        tau = gauss_sum_at_working_precision(chi)
        w = reflection_sign * epsilon * values[N % m] * tau * tau / m
        scale = m * mp.sqrt(N)
        t = mp.mpf(height)
        q1 = mp.exp(-2 * mp.pi * t / scale)
        q2 = mp.exp(-2 * mp.pi / (t * scale))
        direct, reflected = mp.mpc(0), mp.mpc(0)
        p1, p2 = mp.mpf(1), mp.mpf(1)
        for n in range(1, count + 1):
            p1 *= q1
            p2 *= q2
            c = coefficients[n]
            value = values[n % m]
            if c and value != 0:
                direct += value * (mp.mpf(c) / n) * p1
                reflected += mp.conj(value) * (mp.mpf(c) / n) * p2
        return direct + w * reflected


def calibrate_reflection_sign(
    profile: CurveProfile, chi: DirichletCharacter, precision: int = 30, heights: tuple[float, float] = (1.0, 1.3)
) -> int:
    """Sign of the reflected sum that makes twisted_l_value independent of the cutoff."""
    epsilon = epsilon_sign(profile, precision)
    tolerance = mp.mpf(10) ** (-(precision // 2))
    found = []
    for sign in (1, -1):
        first, second = (
            twisted_l_value(profile, chi, precision, epsilon, height=h, reflection_sign=sign) for h in heights
        )
        if abs(first - second) < tolerance:
            found.append(sign)
    if len(found) != 1:
        raise PrecisionError(f"reflection sign is not determined by {profile.label} and {chi}: {found}")
    logger.info("Calibrated reflection sign %+d on %s with %s", found[0], profile.label, chi)
    return found[0]


class AnalyticOracle:
    """Period integrals divided by Omega^+ and |Omega^-|, for symbol normalization."""

    def __init__(self, profile: CurveProfile, precision: int = 30, periods: Optional[PeriodLattice] = None):
        _check_precision(precision)
        self.profile = profile
        self.precision = precision
        self.periods = periods if periods is not None else real_periods(profile, precision)
        self.epsilon = epsilon_sign(profile, precision)

    def symbol(self, a: int, S: int) -> tuple[mp.mpf, mp.mpf]:
        value = symbol_value(self.profile, a, S, self.precision, self.epsilon)
        with mp.workdps(self.precision + 10):
            plus = mp.re(value) / self.periods.omega_plus
            minus = mp.im(value) / abs(self.periods.omega_minus)
        return plus, minus

    def l_ratio(self) -> mp.mpf:
        """L(E, 1) / Omega^+."""
        value = l_value(self.profile, self.precision, self.epsilon)
        with mp.workdps(self.precision + 10):
            return value / self.periods.omega_plus

