"""Command-line surface: ``mtlab <subcommand> [options]``.

Exit codes: 0 on success, 1 when a verification ends in INCONSISTENCY, 2 on
usage errors and on any :class:`~mtlab.errors.MtlabError`.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from fractions import Fraction
from typing import Any, Optional, Sequence, TextIO, Union

import mpmath as mp
import pandas as pd
from pydantic import ValidationError

from .config import RunConfig
from .derivatives import DerivativeDescriptor, apply_derivative, congruence_filtration_check
from .ec_arithmetic import sp_and_b2
from .errors import MtlabError
from .group_ring import DirichletCharacter, units_group
from .lseries import l_value, symbol_value, twisted_l_value
from .modular_symbols import build_space, cuspidal_hecke_charpoly, cusps_x0, eval_symbol, genus_x0
from .pipeline import CurveContext, configure_logging, create_context
from .theta import build_theta, theta_p_part
from .verifier import (
    Verdict,
    VerificationReport,
    check_rank_part,
    check_trivial_zeros,
    default_cap,
    leading_coefficient_report,
    order_over_r,
    scan,
    scan_family,
    scan_summary,
)
from .utilities import fraction_text

logger = logging.getLogger(__name__)

THEOREMS = ("rank_part", "rank_part_extended", "trivial_zeros", "leading_coefficient")

Payload = Union[dict[str, Any], pd.DataFrame]


class UsageError(Exception):
    pass


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--precision", type=int, help="working precision in digits (MTLAB_PRECISION)")
    common.add_argument("--pbound", type=int, dest="p_bound", help="largest prime checked p-locally (MTLAB_PBOUND)")
    common.add_argument("--tmax", type=int, dest="t_max", help="filtration depth cap (MTLAB_TMAX)")
    common.add_argument("--cache", dest="cache_dir", help="symbol-space cache directory (MTLAB_CACHE)")
    common.add_argument("--format", dest="output_format", choices=("json", "csv", "text"))
    common.add_argument("--db", dest="curve_db", help="curve database file (MTLAB_DB)")
    common.add_argument("--workers", type=int)
    common.add_argument("--log-level", dest="log_level")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    parser = argparse.ArgumentParser(prog="mtlab", description="Mazur-Tate elements of elliptic curves over Q.")
    sub = parser.add_subparsers(dest="command", required=True)

    space = sub.add_parser("space", parents=[common], help="modular-symbol space of a level or curve")
    target = space.add_mutually_exclusive_group(required=True)
    target.add_argument("--curve")
    target.add_argument("--N", type=int)
    space.add_argument("--hecke", type=int, help="also print the cuspidal charpoly of T_l")

    theta = sub.add_parser("theta", parents=[common], help="exact theta_S")
    theta.add_argument("--curve", required=True)
    theta.add_argument("--S", type=int, required=True)
    theta.add_argument("--p", type=int, help="project to the maximal p-quotient")

    order = sub.add_parser("ord", parents=[common], help="order of vanishing of theta_S over R")
    order.add_argument("--curve", required=True)
    order.add_argument("--S", type=int, required=True)

    verify = sub.add_parser("verify", parents=[common], help="check a theorem instance")
    verify.add_argument("--curve", required=True)
    verify.add_argument("--S", type=int, required=True)
    verify.add_argument("--theorem", choices=THEOREMS, default="rank_part")
    verify.add_argument("--p", type=int, help="prime for the leading-coefficient report")

    lvalue = sub.add_parser("lvalue", parents=[common], help="numerical L-values and period integrals")
    lvalue.add_argument("--curve", required=True)
    lvalue.add_argument("--S", type=int, help="with --a, the period integral at a/S")
    lvalue.add_argument("--a", type=int)
    lvalue.add_argument("--chi", help="character as modulus:e1,e2,... on the unit-group generators")

    derive = sub.add_parser("derive", parents=[common], help="apply a derivative operator to theta_S")
    derive.add_argument("--curve", required=True)
    derive.add_argument("--S", type=int, required=True)
    derive.add_argument("--D", required=True, help="terms l:k,l:k")
    derive.add_argument("--p", type=int, help="work on the maximal p-quotient")
    derive.add_argument("--t", type=int, help="with --p, also run the congruence/filtration check at depth t")

    scan_cmd = sub.add_parser("scan", parents=[common], help="verify a theorem over a family of S")
    scan_cmd.add_argument("--curve", action="append", required=True)
    scan_cmd.add_argument("--bound", type=int, default=30)
    scan_cmd.add_argument("--max-factors", type=int, default=2)
    scan_cmd.add_argument("--theorem", choices=THEOREMS[:3], default="rank_part")
    return parser


def _config(args: argparse.Namespace) -> RunConfig:
    overrides = {
        key: getattr(args, key, None)
        for key in ("precision", "p_bound", "t_max", "cache_dir", "output_format", "curve_db", "workers", "log_level")
    }
    return RunConfig.from_env(**overrides)


def _parse_terms(text: str) -> dict[int, int]:
    terms = {}
    for item in filter(None, (s.strip() for s in text.split(","))):
        try:
            ell, k = item.split(":")
            terms[int(ell)] = int(k)
        except ValueError as exc:
            raise UsageError(f"bad derivative term {item!r}; expected l:k") from exc
    return terms


def _parse_character(text: str) -> DirichletCharacter:
    try:
        modulus, _, exponents = text.partition(":")
        group = units_group(int(modulus))
        values = tuple(int(e) for e in exponents.split(",")) if exponents else (0,) * group.rank
    except ValueError as exc:
        raise UsageError(f"bad character {text!r}; expected modulus:e1,e2,...") from exc
    return DirichletCharacter(group, values)


def _coefficients(element) -> dict[str, str]:
    group = element.group
    if group.modulus is not None:
        return {str(a): fraction_text(c) for a, c in sorted(zip(group.residue_table, element.coeffs))}
    return {",".join(map(str, e)): fraction_text(c) for e, c in zip(group.exponent_table, element.coeffs)}


def _number(value, precision: int) -> str:
    return mp.nstr(value, precision)


# -- subcommands ---------------------------------------------------------------


def _space(args, config: RunConfig) -> Payload:
    if args.curve:
        context = create_context(args.curve, config)
        space = context.space
    else:
        context, space = None, build_space(args.N, config.max_level)
    payload: dict[str, Any] = {
        "schema": "mtlab.space_summary/1",
        "N": space.N,
        "dimension": space.dimension,
        "cuspidal_dimension": space.cuspidal_dimension,
        "genus": genus_x0(space.N),
        "cusps": cusps_x0(space.N),
    }
    if args.hecke:
        payload["hecke_charpoly"] = {str(args.hecke): [fraction_text(c) for c in cuspidal_hecke_charpoly(space, args.hecke)]}
    if context is not None:
        plus, minus = eval_symbol(context.eig, 0, 1)
        payload.update(
            {
                "curve": context.label,
                "epsilon": context.epsilon,
                "symbol_0": {"plus": fraction_text(plus), "minus": fraction_text(minus)},
                "reconciliation": [fraction_text(x) for x in context.eig.reconciliation or ()],
                "primes_used": list(context.eig.primes_used),
            }
        )
    return payload


def _theta(args, config: RunConfig) -> Payload:
    context = create_context(args.curve, config)
    theta = build_theta(context.eig, args.S, config.max_group_order)
    if args.p is None:
        payload = theta.to_payload()
    else:
        part = theta_p_part(theta, args.p)
        payload = {
            "schema": "mtlab.theta_p/1",
            "curve": context.label,
            "S": args.S,
            "p": args.p,
            "orders": list(part.group.orders),
            "coefficients": _coefficients(part),
        }
    if config.output_format == "json":
        return payload
    rows = [{"element": k, "coefficient": v} for k, v in payload["coefficients"].items()]
    return pd.DataFrame(rows, columns=["element", "coefficient"])


def _ord(args, config: RunConfig) -> Payload:
    context = create_context(args.curve, config)
    theta = build_theta(context.eig, args.S, config.max_group_order)
    cap = default_cap(context.profile, args.S, config.t_max)
    order, at_cap, per_prime, unchecked = order_over_r(theta, context.ring, cap, config.p_bound)
    sp, b2 = sp_and_b2(context.profile, args.S)
    return {
        "schema": "mtlab.ord/1",
        "curve": context.label,
        "S": args.S,
        "ord_found": order,
        "at_cap": at_cap,
        "cap": cap,
        "per_prime": per_prime,
        "unchecked_primes": unchecked,
        "augmentation": fraction_text(theta.element.augmentation()),
        "rank": context.profile.rank,
        "sp": sp,
        "b2": b2,
    }


def _verify(args, config: RunConfig) -> VerificationReport:
    context = create_context(args.curve, config)
    options = {"p_bound": config.p_bound}
    if args.theorem == "leading_coefficient":
        if args.p is None:
            raise UsageError("--p is required for the leading_coefficient theorem")
        return leading_coefficient_report(context.profile, context.eig, args.S, args.p, context.ring, **options)
    options["t_max"] = config.t_max
    if args.theorem == "trivial_zeros":
        return check_trivial_zeros(context.profile, context.eig, args.S, context.ring, **options)
    return check_rank_part(
        context.profile,
        context.eig,
        args.S,
        context.ring,
        epsilon=context.epsilon,
        extended=args.theorem == "rank_part_extended",
        **options,
    )


def _lvalue(args, config: RunConfig) -> Payload:
    context = create_context(args.curve, config)
    profile, digits = context.profile, config.precision
    value = l_value(profile, digits, context.epsilon)
    payload: dict[str, Any] = {
        "schema": "mtlab.lvalue/1",
        "curve": context.label,
        "precision": digits,
        "epsilon": context.epsilon,
        "omega_plus": _number(context.periods.omega_plus, digits),
        "omega_minus": _number(context.periods.omega_minus, digits),
        "L": _number(value, digits),
        "L_over_omega_plus": _number(context.oracle.l_ratio(), digits),
    }
    if args.S is not None or args.a is not None:
        if args.S is None or args.a is None:
            raise UsageError("--S and --a go together")
        plus, minus = context.oracle.symbol(args.a, args.S)
        exact = eval_symbol(context.eig, args.a, args.S)
        payload["symbol"] = {
            "a": args.a,
            "S": args.S,
            "numeric": _number(symbol_value(profile, args.a, args.S, digits, context.epsilon), digits),
            "numeric_plus": _number(plus, digits),
            "numeric_minus": _number(minus, digits),
            "exact_plus": fraction_text(exact[0]),
            "exact_minus": fraction_text(exact[1]),
        }
    if args.chi:
        chi = _parse_character(args.chi)
        payload["twist"] = {
            "character": str(chi),
            "conductor": chi.conductor,
            "L": _number(twisted_l_value(profile, chi.primitive(), digits, context.epsilon), digits),
        }
    return payload


def _derive(args, config: RunConfig) -> Payload:
    context = create_context(args.curve, config)
    theta = build_theta(context.eig, args.S, config.max_group_order)
    element = theta.element if args.p is None else theta_p_part(theta, args.p)
    D = DerivativeDescriptor.for_group(element.group, _parse_terms(args.D))
    derived = apply_derivative(D, element)
    n = D.modulus
    payload: dict[str, Any] = {
        "schema": "mtlab.derivative/1",
        "curve": context.label,
        "S": args.S,
        "p": args.p,
        "derivative": str(D),
        "order": D.order,
        "n": n,
        "coefficients": _coefficients(derived),
        "zero_mod_n": all(c.denominator == 1 and c.numerator % n == 0 for c in derived.coeffs),
    }
    if args.t is not None:
        if args.p is None:
            raise UsageError("--t needs --p")
        report = congruence_filtration_check(element, args.t, args.p)
        payload["congruence_check"] = {
            "depth": report.depth,
            "failed_premises": report.failed_premises,
            "failed_premises_alternate": report.failed_premises_alternate,
            "conclusion_holds": report.conclusion_holds,
            "consistent": report.consistent,
        }
    return payload


def _scan(args, config: RunConfig) -> tuple[pd.DataFrame, list[VerificationReport]]:
    contexts: list[CurveContext] = [create_context(label, config) for label in args.curve]
    reports: list[VerificationReport] = []
    for context in contexts:
        family = scan_family(
            context.profile, args.bound, args.max_factors, include_split=args.theorem != "rank_part"
        )
        logger.info("%s: scanning %d values of S", context.label, len(family))
        reports.extend(
            scan([context], family, args.theorem, config.workers, p_bound=config.p_bound, t_max=config.t_max)
        )
    return scan_summary(reports), reports


# -- output ----------------------------------------------------------------------


def _default(value: Any) -> Any:
    if isinstance(value, Fraction):
        return fraction_text(value)
    raise TypeError(f"cannot serialize {type(value).__name__}")


def _render(payload: Payload, fmt: str) -> str:
    if isinstance(payload, pd.DataFrame):
        frame = payload
    elif fmt == "json":
        return json.dumps(payload, sort_keys=True, indent=2, default=_default)
    else:
        frame = pd.json_normalize([json.loads(json.dumps(payload, default=_default))])
    if fmt == "csv":
        return frame.to_csv(index=False).rstrip("\n")
    if fmt == "json":
        return frame.to_json(orient="records", indent=2)
    return frame.to_string(index=False)


COMMANDS = {
    "space": _space,
    "theta": _theta,
    "ord": _ord,
    "lvalue": _lvalue,
    "derive": _derive,
}


def run_command(argv: Optional[Sequence[str]] = None, stdout: Optional[TextIO] = None, stderr: Optional[TextIO] = None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        config = _config(args)
        configure_logging(config.log_level)
        if args.command == "verify":
            report = _verify(args, config)
            if config.output_format == "json":
                text = json.dumps(json.loads(report.to_json()), sort_keys=True, indent=2)
            else:
                text = _render(scan_summary([report]), config.output_format)
            print(text, file=stdout)
            return 1 if report.verdict is Verdict.INCONSISTENCY else 0
        if args.command == "scan":
            frame, reports = _scan(args, config)
            if config.output_format == "text":
                print(frame.to_string(index=False), file=stdout)
                print(", ".join(f"{k}: {v}" for k, v in frame.attrs["counts"].items()), file=stdout)
            else:
                print(_render(frame, config.output_format), file=stdout)
            return 1 if any(r.verdict is Verdict.INCONSISTENCY for r in reports) else 0
        print(_render(COMMANDS[args.command](args, config), config.output_format), file=stdout)
        return 0
    except (UsageError, ValidationError) as exc:
        print(f"mtlab {args.command}: {exc}", file=stderr)
        parser.print_usage(stderr)
        return 2
    except (MtlabError, ValueError) as exc:
        print(f"mtlab {args.command}: {exc}", file=stderr)
        print(f"run 'mtlab {args.command} --help' for usage", file=stderr)
        return 2
