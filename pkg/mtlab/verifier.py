"""Theorem-level checks on Mazur-Tate elements.

Every check returns a :class:`VerificationReport`. A hypothesis that fails
turns the verdict into ``not_applicable``; only a theorem-backed statement
that the computation contradicts produces ``inconsistency``.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from enum import Enum
from fractions import Fraction
from math import gcd, prod, sqrt
from typing import TYPE_CHECKING, Any, Iterable, Optional, Sequence

import pandas as pd
from pydantic import BaseModel, Field

from .ec_arithmetic import (
    CurveProfile,
    ReductionType,
    group_structure_mod_ell,
    reduce_point,
    reduced_group,
    reduction_type,
    sp_and_b2,
    split_component_index,
    torsion_generators,
    trace_of_frobenius,
)
from .errors import InvalidPrimeError, MissingGeneratorsError, MtlabError
from .filtration import leading_class_mod_p, p_local_membership, p_local_orders
from .group_ring import GroupRingElement, plus_quotient
from .linalg import abelian_group_order
from .modular_symbols import EigenSymbol
from .theta import ThetaElement, build_theta
from .utilities import is_squarefree, prime_divisors, primes_up_to, squarefree_products

if TYPE_CHECKING:
    from .pipeline import CurveContext

logger = logging.getLogger(__name__)

REPORT_SCHEMA = "mtlab.report/1"


class Verdict(str, Enum):
    PASS = "pass"
    NOT_APPLICABLE = "not_applicable"
    INCONSISTENCY = "inconsistency"
    ERROR = "error"


class HypothesisResult(BaseModel):
    name: str
    status: str  # pass / fail / skipped
    witness: str = ""


class RingSpec(BaseModel):
    """R = Z[1/m] given by its inverted primes and why each one is inverted."""

    inverted_primes: list[int]
    derivation: dict[int, list[str]] = Field(default_factory=dict)
    notes: list[str] = Field(default_factory=list)

    model_config = {"frozen": True}

    def inverts(self, p: int) -> bool:
        return p in self.inverted_primes

    def inverts_all(self, n: int) -> bool:
        return all(self.inverts(q) for q in prime_divisors(n))

    def non_inverted(self, bound: int) -> list[int]:
        return [p for p in primes_up_to(bound) if not self.inverts(p)]


class VerificationReport(BaseModel):
    schema_: str = Field(default=REPORT_SCHEMA, alias="schema")
    curve: str
    S: int
    theorem: str
    verdict: Verdict
    ord_found: Optional[int] = None
    ord_at_cap: bool = False
    ord_required: Optional[int] = None
    per_prime: dict[str, dict[str, Any]] = Field(default_factory=dict)
    hypotheses: list[HypothesisResult] = Field(default_factory=list)
    predictions: list[str] = Field(default_factory=list)
    witnesses: dict[str, Any] = Field(default_factory=dict)

    model_config = {"populate_by_name": True}

    def to_json(self) -> str:
        return self.model_dump_json(by_alias=True)

    @property
    def extra_zero(self) -> bool:
        if self.ord_found is None or self.ord_required is None:
            return False
        return self.ord_found > self.ord_required


# -- rings -----------------------------------------------------------------------


def _add(derivation: dict[int, list[str]], p: int, reason: str) -> None:
    derivation.setdefault(p, [])
    if reason not in derivation[p]:
        derivation[p].append(reason)


def ring_spec(profile: CurveProfile, p_bound: int = 97, include_rank_condition: bool = True) -> RingSpec:
    """Primes inverted by conditions (i) p | 6N|E(F_p)| prod m_l, (ii) non-surjective image, (iii) p < r_E."""
    derivation: dict[int, list[str]] = {}
    base = 6 * profile.N * prod(profile.tamagawa_number(ell) for ell in prime_divisors(profile.N))
    for p in prime_divisors(base):
        _add(derivation, p, "divides 6N prod m_l")
    for p in primes_up_to(p_bound):
        if profile.curve.is_good(p) and (p + 1 - trace_of_frobenius(profile, p)) % p == 0:
            _add(derivation, p, "divides |E(F_p)|")
    for p in sorted(profile.galois_nonsurjective):
        _add(derivation, p, "non-surjective Galois image")
    if include_rank_condition:
        for p in primes_up_to(profile.rank - 1):
            _add(derivation, p, "p < r_E")
    notes = [
        f"|E(F_p)| was checked for good p <= {p_bound} only",
        "surjectivity of the Galois image is taken from the curve data",
    ]
    return RingSpec(inverted_primes=sorted(derivation), derivation=derivation, notes=notes)


def supersingular_ring_spec(profile: CurveProfile) -> RingSpec:
    """R = Z[1/p : p < d], d = max(r_E, (4 sqrt 6 / 3) N prod_{l | N} (1 + 1/l)^(1/2) + 1).

    Valid for S made of good supersingular primes on curves with nontrivial torsion.
    """
    if profile.torsion_order == 1:
        raise ValueError(f"{profile.label} has trivial torsion")
    level = profile.N * prod(sqrt(1 + 1 / ell) for ell in prime_divisors(profile.N))
    bound = max(profile.rank, 4 * sqrt(6) / 3 * level + 1)
    derivation = {p: ["p < d for supersingular S"] for p in primes_up_to(int(bound)) if p < bound}
    return RingSpec(
        inverted_primes=sorted(derivation),
        derivation=derivation,
        notes=[f"d = {bound:.3f}; S must be a product of good supersingular primes"],
    )


# -- hypothesis screens ------------------------------------------------------------


def cyclicity_screen(profile: CurveProfile, S: int, spec: RingSpec, p_bound: int) -> list[HypothesisResult]:
    """E(F_l)[p] cyclic for every good l | S and every non-inverted p."""
    results = []
    for ell in prime_divisors(S):
        if not profile.curve.is_good(ell):
            continue
        if ell >= 5 and spec.inverts(2) and trace_of_frobenius(profile, ell) == 0:
            # E(F_l) is Z/(l + 1) or Z/2 x Z/((l + 1)/2)
            results.append(HypothesisResult(name=f"cyclic E(F_{ell})", status="pass", witness="supersingular"))
            continue
        structure = group_structure_mod_ell(profile, ell)
        bad = [p for p in prime_divisors(structure.d1) if not spec.inverts(p)]
        if bad:
            witness = f"E(F_{ell}) = Z/{structure.d1} x Z/{structure.d2}; p = {bad}"
            results.append(HypothesisResult(name=f"cyclic E(F_{ell})", status="fail", witness=witness))
        else:
            beyond = [p for p in prime_divisors(structure.d1) if p > p_bound]
            results.append(
                HypothesisResult(
                    name=f"cyclic E(F_{ell})",
                    status="pass",
                    witness=f"Z/{structure.d1} x Z/{structure.d2}" + (f", p > bound {beyond}" if beyond else ""),
                )
            )
    return results


def _integrality(theta: ThetaElement, spec: RingSpec) -> HypothesisResult:
    outside = sorted(p for p in theta.denominator_primes if not spec.inverts(p))
    if outside:
        return HypothesisResult(name="theta in R[G_S]", status="fail", witness=f"denominators at {outside}")
    return HypothesisResult(name="theta in R[G_S]", status="pass")


# -- orders over R -----------------------------------------------------------------


def _relevant_primes(theta: ThetaElement, spec: RingSpec, p_bound: int) -> tuple[list[int], list[int]]:
    """Non-inverted primes dividing |G_S|, split into checked (<= bound) and unchecked."""
    primes = [p for p in prime_divisors(theta.group.size) if not spec.inverts(p)]
    return [p for p in primes if p <= p_bound], [p for p in primes if p > p_bound]


def order_over_r(
    theta: ThetaElement, spec: RingSpec, cap: int, p_bound: int
) -> tuple[int, bool, dict[str, dict[str, Any]], list[int]]:
    """ord of theta in the R-filtration from its p-local orders at non-inverted p.

    For p not dividing |G_S|, Z_(p) (x) I^t = Z_(p) (x) I for all t >= 1, so
    those primes only see the augmentation.
    """
    checked, unchecked = _relevant_primes(theta, spec, p_bound)
    if unchecked:
        logger.warning("%s, S=%d: primes %s exceed the bound %d and are unchecked", theta.profile.label, theta.S, unchecked, p_bound)
    orders = p_local_orders(theta.element, cap, checked)
    per_prime = {str(p): {"order": v.order, "at_cap": v.at_cap} for p, v in orders.items()}
    if theta.element.augmentation() != 0:
        return 0, False, per_prime, unchecked
    if not orders:
        return cap, True, per_prime, unchecked
    lowest = min(orders.values(), key=lambda v: v.order)
    return lowest.order, lowest.at_cap, per_prime, unchecked


def _membership_over_r(theta: ThetaElement, spec: RingSpec, t: int, p_bound: int) -> dict[int, bool]:
    """p-local membership at the required depth, cross-checked on the p-quotient."""
    checked, _ = _relevant_primes(theta, spec, p_bound)
    return {p: p_local_membership(theta.element, t, p) for p in checked}


def _parity_witness(theta: ThetaElement, epsilon: int, per_prime: dict[str, dict[str, Any]]) -> dict[str, bool]:
    """(1 - eps (-1)^b) theta in Z_(p) (x) I^(b+1) at every p-local order b below the cap."""
    results = {}
    for key, record in per_prime.items():
        if record["at_cap"]:
            continue
        b = record["order"]
        factor = 1 - epsilon * (-1) ** b
        if factor == 0:
            results[key] = True
            continue
        element = theta.element.scale(factor)
        results[key] = p_local_membership(element, b + 1, int(key))
    return results


def default_cap(profile: CurveProfile, S: int, t_max: Optional[int]) -> int:
    if t_max is not None:
        return t_max
    sp, b2 = sp_and_b2(profile, S)
    return profile.rank + sp + b2 + 2


# -- theorem checks ------------------------------------------------------------------


def check_rank_part(
    profile: CurveProfile,
    eig: EigenSymbol,
    S: int,
    spec: RingSpec,
    p_bound: int = 97,
    t_max: Optional[int] = None,
    epsilon: Optional[int] = None,
    extended: bool = False,
    theta: Optional[ThetaElement] = None,
) -> VerificationReport:
    """theta_S in I_S^{r_E} over R for square-free S of good primes with cyclic E(F_l)[p].

    In extended mode S may also contain split multiplicative primes and the
    required depth becomes r_E + sp(S) + b_{2,R}(S), provided l' - 1 is a unit
    of R for every split multiplicative prime l' of E.
    """
    theorem = "rank_part_extended" if extended else "rank_part"
    report = VerificationReport(curve=profile.label, S=S, theorem=theorem, verdict=Verdict.PASS)
    hypotheses = report.hypotheses
    if not is_squarefree(S):
        hypotheses.append(HypothesisResult(name="S square-free", status="fail", witness=str(S)))
        report.verdict = Verdict.NOT_APPLICABLE
        return report
    hypotheses.append(HypothesisResult(name="S square-free", status="pass"))

    required = profile.rank
    for ell in prime_divisors(S):
        kind = reduction_type(profile.curve, ell)
        if kind is ReductionType.GOOD:
            continue
        if extended and kind is ReductionType.SPLIT_MULTIPLICATIVE:
            continue
        hypotheses.append(HypothesisResult(name="primes of S", status="fail", witness=f"{ell} has {kind.value} reduction"))
        report.verdict = Verdict.NOT_APPLICABLE
        return report
    if extended:
        split = [ell for ell in prime_divisors(profile.N) if reduction_type(profile.curve, ell) is ReductionType.SPLIT_MULTIPLICATIVE]
        blocked = [ell for ell in split if not spec.inverts_all(ell - 1)]
        if blocked:
            hypotheses.append(HypothesisResult(name="l' - 1 in R^x", status="fail", witness=f"split primes {blocked}"))
            report.verdict = Verdict.NOT_APPLICABLE
            return report
        sp, _ = sp_and_b2(profile, S)
        b2r = sum(
            1
            for ell in prime_divisors(S)
            if profile.curve.is_good(ell) and trace_of_frobenius(profile, ell) == 2 and spec.inverts_all(ell - 1)
        )
        required += sp + b2r
        report.witnesses["sp"] = sp
        report.witnesses["b2_R"] = b2r

    screen = cyclicity_screen(profile, S, spec, p_bound)
    hypotheses.extend(screen)
    if any(h.status == "fail" for h in screen):
        report.verdict = Verdict.NOT_APPLICABLE
        return report

    theta = theta or build_theta(eig, S)
    integrality = _integrality(theta, spec)
    hypotheses.append(integrality)
    report.ord_required = required
    cap = max(default_cap(profile, S, t_max), required + 1)
    order, at_cap, per_prime, unchecked = order_over_r(theta, spec, cap, p_bound)
    report.ord_found, report.ord_at_cap, report.per_prime = order, at_cap, per_prime
    if unchecked:
        report.witnesses["unchecked_primes"] = unchecked
    if integrality.status == "fail":
        report.verdict = Verdict.INCONSISTENCY
        logger.error("%s, S=%d: theta is not in R[G_S] (%s)", profile.label, S, integrality.witness)
        return report

    membership = _membership_over_r(theta, spec, required, p_bound)
    for p, holds in membership.items():
        report.per_prime[str(p)]["member_at_required"] = holds
    aug_ok = required == 0 or theta.element.augmentation() == 0
    report.witnesses["augmentation"] = str(theta.element.augmentation())
    if not aug_ok or not all(membership.values()):
        report.verdict = Verdict.INCONSISTENCY
        logger.error("%s, S=%d: theta_S is not in I^%d over R", profile.label, S, required)
        return report

    if epsilon is not None and gcd(S, profile.N) == 1 and not theta.element.is_zero():
        parity = _parity_witness(theta, epsilon, per_prime)
        report.witnesses["parity"] = {k: v for k, v in parity.items()}
        if not all(parity.values()):
            report.verdict = Verdict.INCONSISTENCY
            logger.error("%s, S=%d: leading class is not killed by 1 - eps(-1)^b", profile.label, S)
            return report
    if report.extra_zero:
        sp, b2 = sp_and_b2(profile, S)
        reasons = []
        if b2:
            reasons.append(f"b2(S) = {b2}")
        if sp:
            reasons.append(f"sp(S) = {sp}")
        report.witnesses["extra_zero"] = ", ".join(reasons) or "unexplained by sp or b2"
    return report


def check_trivial_zeros(
    profile: CurveProfile,
    eig: EigenSymbol,
    S: int,
    spec: RingSpec,
    p_bound: int = 97,
    t_max: Optional[int] = None,
    theta: Optional[ThetaElement] = None,
) -> VerificationReport:
    """theta_S in I_S^{sp(S) + b2(S)} over R for square-free S."""
    report = VerificationReport(curve=profile.label, S=S, theorem="trivial_zeros", verdict=Verdict.PASS)
    if not is_squarefree(S):
        report.hypotheses.append(HypothesisResult(name="S square-free", status="fail", witness=str(S)))
        report.verdict = Verdict.NOT_APPLICABLE
        return report
    report.hypotheses.append(HypothesisResult(name="S square-free", status="pass"))
    sp, b2 = sp_and_b2(profile, S)
    required = sp + b2
    report.ord_required = required
    report.witnesses.update({"sp": sp, "b2": b2})
    if required == 0:
        report.ord_found = 0
        report.witnesses["note"] = "vacuous"
        return report
    theta = theta or build_theta(eig, S)
    integrality = _integrality(theta, spec)
    report.hypotheses.append(integrality)
    if integrality.status == "fail":
        report.verdict = Verdict.NOT_APPLICABLE
        return report
    cap = max(default_cap(profile, S, t_max), required + 1)
    order, at_cap, per_prime, unchecked = order_over_r(theta, spec, cap, p_bound)
    report.ord_found, report.ord_at_cap, report.per_prime = order, at_cap, per_prime
    if unchecked:
        report.witnesses["unchecked_primes"] = unchecked
    membership = _membership_over_r(theta, spec, required, p_bound)
    for p, holds in membership.items():
        report.per_prime[str(p)]["member_at_required"] = holds
    if theta.element.augmentation() != 0 or not all(membership.values()):
        report.verdict = Verdict.INCONSISTENCY
        logger.error("%s, S=%d: theta_S is not in I^%d over R", profile.label, S, required)
    return report


# -- J_T ---------------------------------------------------------------------------


class JTResult(BaseModel):
    T: int
    order: Optional[int] = None
    p: Optional[int] = None
    p_divides: Optional[bool] = None
    supported: bool = True
    skipped_blocks: list[int] = Field(default_factory=list)
    reason: str = ""


def cokernel_order_JT(profile: CurveProfile, T: int, p: Optional[int] = None) -> JTResult:
    """Order of the cokernel of E(Q) -> (+)_{l|T} E(F_l) (+) (+)_{l|N} E(Q_l)/E_0(Q_l).

    Component groups at split primes are cyclic of order m_l; a point's image
    there is its signed component index. Other bad primes with m_l > 1 are
    only supported for the p-part with p not dividing m_l.

    Raises:
        MissingGeneratorsError: when fewer generators than the rank are known.
    """
    curve = profile.curve
    if len(profile.generators) < profile.rank:
        raise MissingGeneratorsError(f"{profile.label}: {len(profile.generators)} generators for rank {profile.rank}")
    points = list(torsion_generators(curve)) + list(profile.generators)
    columns: list[int] = []
    images: list[list[int]] = [[] for _ in points]
    skipped: list[int] = []
    for ell in prime_divisors(T):
        if not curve.is_good(ell):
            raise InvalidPrimeError(f"{ell} | T is a bad prime")
        group = reduced_group(curve, ell)
        d1, d2 = group.structure.d1, group.structure.d2
        for row, P in zip(images, points):
            j, k = group.discrete_log(reduce_point(curve, P, ell))
            row.extend([j, k])
        columns.extend([d1, d2])
    for ell in prime_divisors(curve.N):
        m = profile.tamagawa_number(ell)
        if m == 1:
            continue
        kind = reduction_type(curve, ell)
        if kind is ReductionType.SPLIT_MULTIPLICATIVE:
            for row, P in zip(images, points):
                row.append(split_component_index(curve, P, ell, m))
            columns.append(m)
        elif p is not None and m % p:
            skipped.append(ell)
        else:
            return JTResult(
                T=T,
                p=p,
                supported=False,
                reason=f"component group image at {ell} ({kind.value}, m = {m}) needs external data",
            )
    relations = [[n if i == j else 0 for j in range(len(columns))] for i, n in enumerate(columns)]
    order = abelian_group_order(relations + images, len(columns)) if columns else 1
    if order is None:
        raise RuntimeError("cokernel of a map into a finite group is infinite")
    result = JTResult(T=T, order=order, p=p, skipped_blocks=skipped)
    if p is not None:
        result.p_divides = order % p == 0
        if skipped:
            result.order = None
    return result


def jt_invariants_hold(profile: CurveProfile, T1: int, T2: int) -> bool:
    """J(T1) | J(T1 T2) and J(T1 T2) | J(T1) * prod_{l | T2} #E(F_l)."""
    first = cokernel_order_JT(profile, T1).order
    both = cokernel_order_JT(profile, T1 * T2).order
    if first is None or both is None:
        raise ValueError("J_T is not available for these moduli")
    target = prod(group_structure_mod_ell(profile, ell).order for ell in prime_divisors(T2))
    return both % first == 0 and (first * target) % both == 0


# -- leading coefficient ---------------------------------------------------------------


def leading_coefficient_report(
    profile: CurveProfile,
    eig: EigenSymbol,
    S: int,
    p: int,
    spec: RingSpec,
    p_bound: int = 97,
    theta: Optional[ThetaElement] = None,
) -> VerificationReport:
    """If the image of theta_S in (Z/p) (x) I^{r_E}/I^{r_E+1} is nonzero, then p does
    not divide J_{S1} nor prod_{l | S2} (a_l - 2), with S1 the primes of S that are
    1 mod p; Sha[p] = 0 is recorded as a prediction."""
    report = VerificationReport(curve=profile.label, S=S, theorem="leading_coefficient", verdict=Verdict.PASS)
    report.ord_required = profile.rank
    hypotheses = report.hypotheses
    checks = [
        ("p not inverted", not spec.inverts(p), f"p = {p}"),
        ("p does not divide S", S % p != 0, f"S = {S}"),
        ("S square-free", is_squarefree(S), str(S)),
        ("primes of S good", all(profile.curve.is_good(ell) for ell in prime_divisors(S)), str(prime_divisors(S))),
    ]
    for name, ok, witness in checks:
        hypotheses.append(HypothesisResult(name=name, status="pass" if ok else "fail", witness=witness))
        if not ok:
            report.verdict = Verdict.NOT_APPLICABLE
            return report
    screen = cyclicity_screen(profile, S, spec, p_bound)
    hypotheses.extend(screen)
    if any(h.status == "fail" for h in screen):
        report.verdict = Verdict.NOT_APPLICABLE
        return report
    theta = theta or build_theta(eig, S)
    if p in theta.denominator_primes:
        hypotheses.append(HypothesisResult(name="theta p-integral", status="fail"))
        report.verdict = Verdict.INCONSISTENCY
        return report

    r = profile.rank
    element = theta.element
    try:
        classes = leading_class_mod_p(element, r, p)
    except MtlabError as exc:
        hypotheses.append(HypothesisResult(name=f"theta in Z_({p}) I^{r}", status="fail", witness=str(exc)))
        report.verdict = Verdict.INCONSISTENCY
        logger.error("%s, S=%d: theta_S is not in Z_(%d) I^%d", profile.label, S, p, r)
        return report
    nonzero = any(classes)
    report.witnesses["leading_class_mod_p"] = list(classes)
    report.witnesses["plus_quotient_class_mod_p"] = _plus_class(element, r, p)
    S1 = prod(ell for ell in prime_divisors(S) if ell % p == 1)
    S2 = S // S1
    report.witnesses.update({"S1": S1, "S2": S2})
    if r == 0:
        report.witnesses["augmentation"] = str(element.augmentation())
    if not nonzero:
        hypotheses.append(HypothesisResult(name="leading class nonzero mod p", status="fail"))
        report.verdict = Verdict.NOT_APPLICABLE
        return report
    hypotheses.append(HypothesisResult(name="leading class nonzero mod p", status="pass"))

    euler = prod(trace_of_frobenius(profile, ell) - 2 for ell in prime_divisors(S2))
    report.witnesses["prod_a_minus_2_S2"] = euler
    if euler % p == 0:
        report.verdict = Verdict.INCONSISTENCY
        logger.error("%s, S=%d: p=%d divides prod (a_l - 2) over S2", profile.label, S, p)
        return report
    jt = cokernel_order_JT(profile, S1, p) if len(profile.generators) >= profile.rank else None
    if jt is None or not jt.supported:
        report.witnesses["J_S1"] = "unchecked" if jt is None else jt.reason
    else:
        report.witnesses["J_S1"] = jt.order if jt.order is not None else f"p-part only, skipped {jt.skipped_blocks}"
        if jt.p_divides:
            report.verdict = Verdict.INCONSISTENCY
            logger.error("%s, S=%d: p=%d divides J_S1 despite a nonzero leading class", profile.label, S, p)
            return report
    report.predictions.append(f"Sha[{p}] = 0")
    return report


def _plus_class(element: GroupRingElement, r: int, p: int) -> Optional[list[int]]:
    """Leading class of theta/2 pushed to G_S / <delta_-1>, when p is odd."""
    if p == 2 or element.group.modulus is None or element.group.modulus <= 2:
        return None
    pushed = plus_quotient(element.group).push(element).scale(Fraction(1, 2))
    try:
        return list(leading_class_mod_p(pushed, r, p))
    except MtlabError:
        return None


# -- scans ---------------------------------------------------------------------------


def _run_item(context: "CurveContext", S: int, theorem: str, options: dict[str, Any]) -> VerificationReport:
    profile = context.profile
    try:
        if theorem == "rank_part":
            return check_rank_part(profile, context.eig, S, context.ring, epsilon=context.epsilon, **options)
        if theorem == "rank_part_extended":
            return check_rank_part(profile, context.eig, S, context.ring, epsilon=context.epsilon, extended=True, **options)
        if theorem == "trivial_zeros":
            return check_trivial_zeros(profile, context.eig, S, context.ring, **options)
        raise ValueError(f"unknown theorem {theorem!r}")
    except (MtlabError, ValueError) as exc:
        logger.warning("%s, S=%d: %s", profile.label, S, exc)
        return VerificationReport(
            curve=profile.label, S=S, theorem=theorem, verdict=Verdict.ERROR, witnesses={"error": str(exc)}
        )


def scan(
    contexts: Sequence["CurveContext"],
    S_family: Iterable[int],
    theorem: str = "rank_part",
    workers: int = 1,
    **options: Any,
) -> list[VerificationReport]:
    """Reports for every (curve, S) pair in input order, duplicates dropped."""
    family = list(S_family)
    items: list[tuple[Any, int]] = []
    seen: set[tuple[str, int]] = set()
    for context in contexts:
        for S in family:
            key = (context.profile.label, S)
            if key in seen:
                logger.warning("duplicate scan item %s, S=%d dropped", *key)
                continue
            seen.add(key)
            items.append((context, S))
    if not items:
        return []
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        reports = list(pool.map(lambda item: _run_item(item[0], item[1], theorem, options), items))
    counts = scan_summary(reports).attrs["counts"]
    logger.info("Scan of %d items: %s", len(reports), counts)
    return reports


def scan_summary(reports: Sequence[VerificationReport]) -> pd.DataFrame:
    columns = ["curve", "S", "theorem", "verdict", "ord_found", "ord_required", "extra_zero"]
    rows = [
        {
            "curve": r.curve,
            "S": r.S,
            "theorem": r.theorem,
            "verdict": r.verdict.value,
            "ord_found": r.ord_found,
            "ord_required": r.ord_required,
            "extra_zero": r.extra_zero,
        }
        for r in reports
    ]
    frame = pd.DataFrame(rows, columns=columns)
    counts = {v.value: int((frame["verdict"] == v.value).sum()) for v in Verdict}
    counts["extra_zero"] = int(frame["extra_zero"].sum()) if len(frame) else 0
    frame.attrs["counts"] = counts
    return frame


def scan_family(profile: CurveProfile, bound: int, max_factors: int = 2, include_split: bool = False) -> list[int]:
    """Square-free S built from at most ``max_factors`` primes l <= bound of good (or split) reduction."""
    allowed = [
        ell
        for ell in primes_up_to(bound)
        if profile.curve.is_good(ell)
        or (include_split and reduction_type(profile.curve, ell) is ReductionType.SPLIT_MULTIPLICATIVE)
    ]
    return [S for S in squarefree_products(allowed) if len(prime_divisors(S)) <= max_factors]
