# mtlab package
from .config import RunConfig
from .pipeline import CurveContext, create_context
from .theta import ThetaElement, build_theta
from .verifier import VerificationReport, Verdict, check_rank_part, check_trivial_zeros, scan

__all__ = [
    "CurveContext",
    "RunConfig",
    "ThetaElement",
    "VerificationReport",
    "Verdict",
    "build_theta",
    "check_rank_part",
    "check_trivial_zeros",
    "create_context",
    "scan",
]
