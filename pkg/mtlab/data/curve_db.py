"""Reader for the pipe-separated curve database.

One curve per line, eight fields::

    label | a1 a2 a3 a4 a6 | N | rank | torsion | x/z^2,y/z^3;... | l:m,l:m | p,p

Blank lines and lines starting with ``#`` are skipped. Generators use the
weighted form ``x1/z1^2,y1/z1^3`` with one z per point (``1/2^2,-5/2^3``);
plain fractions (``1/4,-5/8``) and integers are accepted as well. Column
numbers in diagnostics count fields from 1.
"""

from __future__ import annotations

import logging
import re
from fractions import Fraction
from pathlib import Path
from typing import Callable, Optional, TypeVar, Union

from ..errors import CurveDataError
from ..ec_arithmetic import CurveProfile, Point, WeierstrassCurve, on_curve, torsion_points

logger = logging.getLogger(__name__)

FIELD_COUNT = 8

T = TypeVar("T")


def _field(parse: Callable[[str], T], text: str, line: int, column: int, what: str) -> T:
    try:
        return parse(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise CurveDataError(f"malformed {what} {text!r}", line, column) from exc


def _ainvs(text: str) -> tuple[int, ...]:
    values = tuple(int(v) for v in text.split())
    if len(values) != 5:
        raise ValueError("five coefficients expected")
    return values


_WEIGHTED = re.compile(r"([+-]?\d+)\s*/\s*(\d+)\s*\^\s*(\d+)")


def _coordinate(text: str, weight: int) -> tuple[Fraction, Optional[int]]:
    """A coordinate and its z, for ``n/z^weight``; z is ``None`` for a plain fraction."""
    match = _WEIGHTED.fullmatch(text.strip())
    if match is None:
        return Fraction(text.strip()), None
    numerator, z, exponent = (int(g) for g in match.groups())
    if exponent != weight:
        raise ValueError(f"exponent {exponent} where {weight} is expected")
    return Fraction(numerator, z**weight), z


def _generators(text: str) -> tuple[Point, ...]:
    points = []
    for item in filter(None, (s.strip() for s in text.split(";"))):
        x_text, y_text = item.split(",")
        x, zx = _coordinate(x_text, 2)
        y, zy = _coordinate(y_text, 3)
        if zx != zy:
            raise ValueError("x and y must share one z")
        points.append(Point(x, y))
    return tuple(points)


def _tamagawa(text: str) -> dict[int, int]:
    table = {}
    for item in filter(None, (s.strip() for s in text.split(","))):
        ell, m = item.split(":")
        table[int(ell)] = int(m)
    return table


def _primes(text: str) -> frozenset[int]:
    return frozenset(int(p) for p in text.split(",") if p.strip())


def parse_curve_line(text: str, line: int = 1) -> Optional[CurveProfile]:
    """Parse one database line; ``None`` for blank and comment lines."""
    stripped = text.strip()
    if not stripped or stripped.startswith("#"):
        return None
    fields = [f.strip() for f in stripped.split("|")]
    if len(fields) != FIELD_COUNT:
        raise CurveDataError(f"expected {FIELD_COUNT} fields, found {len(fields)}", line)
    label = fields[0]
    if not label:
        raise CurveDataError("empty label", line, 1)
    ainvs = _field(_ainvs, fields[1], line, 2, "a-invariants")
    N = _field(int, fields[2], line, 3, "conductor")
    rank = _field(int, fields[3], line, 4, "rank")
    torsion = _field(int, fields[4], line, 5, "torsion order")
    generators = _field(_generators, fields[5], line, 6, "generators")
    tamagawa = _field(_tamagawa, fields[6], line, 7, "Tamagawa numbers")
    galois = _field(_primes, fields[7], line, 8, "prime list")

    try:
        curve = WeierstrassCurve(*ainvs, N=N)
    except CurveDataError as exc:
        raise CurveDataError(str(exc), line, 2) from exc
    for point in generators:
        if not on_curve(curve, point):
            raise CurveDataError(f"generator {point} is not on the curve", line, 6)
    if len(generators) > rank:
        logger.warning("%s: %d generators listed for rank %d", label, len(generators), rank)
    found = len(torsion_points(curve))
    if found != torsion:
        raise CurveDataError(f"torsion order {torsion} but {found} rational torsion points", line, 5)
    try:
        return CurveProfile(
            label=label,
            curve=curve,
            rank=rank,
            torsion_order=torsion,
            generators=generators,
            tamagawa=tamagawa,
            galois_nonsurjective=galois,
        )
    except CurveDataError as exc:
        raise CurveDataError(str(exc), line) from exc


def parse_curve_file(path: Union[str, Path]) -> list[CurveProfile]:
    """All profiles in ``path``, in file order. Labels must be unique."""
    path = Path(path)
    profiles: list[CurveProfile] = []
    seen: set[str] = set()
    with path.open(encoding="utf-8") as handle:
        for number, text in enumerate(handle, start=1):
            profile = parse_curve_line(text, number)
            if profile is None:
                continue
            if profile.label in seen:
                raise CurveDataError(f"duplicate label {profile.label}", number, 1)
            seen.add(profile.label)
            profiles.append(profile)
    logger.debug("Loaded %d curves from %s", len(profiles), path)
    return profiles


def find_curve(path: Union[str, Path], label: str) -> CurveProfile:
    for profile in parse_curve_file(path):
        if profile.label == label:
            return profile
    raise CurveDataError(f"curve {label!r} is not in {path}")
