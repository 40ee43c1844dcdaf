"""Exact super and Weil-Petersson volumes, psi-class brackets, tau functions
and topological recursion over the rationals extended by pi^2."""
from .algebra import EvenPoly, LaurentSeries, OddPoly, PiScalar, Poly, TruncationError, TruncSeries
from .kdv import kdv_check, kdv_residual, translate, verify_translation
from .specrec import AIRY, SINE, THETA, CorrForm, SpectralCurve, tr_correlator, tr_partition
from .virasoro import Bounds, VirasoroOp, assemble_log_tau, assemble_tau, bracket, kw_bracket, theta_bracket
from .volumes import UnstableError, VolCache, vol_theta, vol_theta_top, vol_wp, vol_wp_top, volume

__version__ = "0.1.0"

__all__ = [
    "AIRY", "SINE", "THETA", "Bounds", "CorrForm", "EvenPoly", "LaurentSeries", "OddPoly",
    "PiScalar", "Poly", "SpectralCurve", "TruncSeries", "TruncationError", "UnstableError",
    "VirasoroOp", "VolCache", "assemble_log_tau", "assemble_tau", "bracket", "kdv_check",
    "kdv_residual", "kw_bracket", "theta_bracket", "tr_correlator", "tr_partition", "translate",
    "verify_translation", "vol_theta", "vol_theta_top", "vol_wp", "vol_wp_top", "volume",
]
