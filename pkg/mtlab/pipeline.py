"""Curve -> symbol space -> eigensymbol -> normalized symbols, behind one call.

``create_context`` is what the CLI and the verifier scan use; contexts are
memoized per (label, precision, database) so repeated queries on the same
curve share the exact linear algebra.
"""

from __future__ import annotations

import logging
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .config import RunConfig
from .data import SpaceCache, find_curve
from .ec_arithmetic import CurveProfile, PeriodLattice
from .lseries import AnalyticOracle
from .modular_symbols import EigenSymbol, ManinSymbolSpace, build_space, isolate_eigensymbol, normalize
from .verifier import RingSpec, ring_spec

logger = logging.getLogger(__name__)

_CONTEXTS: dict[tuple[str, int, str], "CurveContext"] = {}
_CONTEXTS_LOCK = threading.Lock()


def configure_logging(level: str = "INFO") -> None:
    logging.basicConfig(level=getattr(logging, level.upper(), logging.INFO))


@dataclass(frozen=True)
class CurveContext:
    profile: CurveProfile
    space: ManinSymbolSpace
    eig: EigenSymbol
    epsilon: int
    ring: RingSpec
    periods: PeriodLattice
    oracle: AnalyticOracle

    @property
    def label(self) -> str:
        return self.profile.label


def load_space(N: int, config: RunConfig) -> ManinSymbolSpace:
    cache = SpaceCache(config.cache_dir) if config.cache_dir is not None else None
    if cache is not None:
        space = cache.load(N)
        if space is not None:
            return space
    space = build_space(N, max_level=config.max_level)
    if cache is not None:
        cache.store(space)
    return space


def build_context(profile: CurveProfile, config: RunConfig) -> CurveContext:
    space = load_space(profile.N, config)
    oracle = AnalyticOracle(profile, config.precision)
    eig = normalize(isolate_eigensymbol(space, profile), profile, oracle)
    ring = ring_spec(profile, config.p_bound)
    logger.info(
        "%s: eps = %+d, R inverts %s, primes used for isolation %s",
        profile.label,
        oracle.epsilon,
        ring.inverted_primes,
        list(eig.primes_used),
    )
    return CurveContext(
        profile=profile,
        space=space,
        eig=eig,
        epsilon=oracle.epsilon,
        ring=ring,
        periods=oracle.periods,
        oracle=oracle,
    )


def load_profile(label: str, config: Optional[RunConfig] = None) -> CurveProfile:
    config = config or RunConfig.from_env()
    return find_curve(config.curve_db, label)


def create_context(label: str, config: Optional[RunConfig] = None) -> CurveContext:
    """The fully normalized context of the curve ``label`` from ``config.curve_db``."""
    config = config or RunConfig.from_env()
    key = (label, config.precision, str(Path(config.curve_db).resolve()))
    with _CONTEXTS_LOCK:
        context = _CONTEXTS.get(key)
        if context is None:
            logger.info("create_context: building %s at %d digits", label, config.precision)
            context = build_context(load_profile(label, config), config)
            _CONTEXTS[key] = context
    return context
