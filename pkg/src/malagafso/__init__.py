"""FSO link statistics over Malaga turbulence with pointing errors."""

from .channel import (DetectionMode, LinkGeometry, MalagaParams, PointingError, UnifiedChannel,
                      build_unified, derive, gamma_gamma_limit, lognormal_sigma_map, preset,
                      rytov_variance)
from .metrics import (BinaryModulation, CapacityMethod, MAryScheme, ber_binary,
                      diversity_coding_gain, ergodic_capacity, outage_probability,
                      scintillation_index, ser_mary)
from .specfun import MeijerGSpec, SeriesControl, meijer_g, meijer_g_mb_oracle
from .stats import EvalMethod, cdf_snr, dominant_terms, mgf, moment, moment_derivative_at, pdf_snr

__all__ = [
    "DetectionMode",
    "LinkGeometry",
    "MalagaParams",
    "PointingError",
    "UnifiedChannel",
    "build_unified",
    "derive",
    "gamma_gamma_limit",
    "lognormal_sigma_map",
    "preset",
    "rytov_variance",
    "BinaryModulation",
    "CapacityMethod",
    "MAryScheme",
    "ber_binary",
    "diversity_coding_gain",
    "ergodic_capacity",
    "outage_probability",
    "scintillation_index",
    "ser_mary",
    "MeijerGSpec",
    "SeriesControl",
    "meijer_g",
    "meijer_g_mb_oracle",
    "EvalMethod",
    "cdf_snr",
    "dominant_terms",
    "mgf",
    "moment",
    "moment_derivative_at",
    "pdf_snr",
]

__version__ = "0.1.0"
