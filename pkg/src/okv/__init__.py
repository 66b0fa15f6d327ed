"""Exact lattice-point counting, valuation vectors and volume experiments on projective space over Z."""
from .errors import (CapExceeded, ConfigError, DimensionMismatch, FlagError, NotPrime, NotSymmetric, OkvError,
                     UnboundedError, ZeroSection)
from .flags import AffineFlag, Flag, ValuationTable, good_flag_pn, valuation_section, valuation_vector_poly
from .poly import Section
from .series import (L1_TWIST, SUP_NUMERIC, VARIANTS, ArithLinearSeries, MetricModel, SubvarietyY, h0_hat,
                     h0_hat_count, model_sum, nu_image, nu_image_fast, restricted_series, twist)
from .volume import (GapReport, NormedModule, VolumeSequence, check_sandwich, check_sandwich_model,
                     fujita_kfold, generation_check, lambda_norms, okounkov_body, superadditivity_check,
                     valuation_gap, vhat_closed_form, vhat_vol_estimate)

__version__ = "0.1.0"

__all__ = [
    "CapExceeded", "ConfigError", "DimensionMismatch", "FlagError", "NotPrime", "NotSymmetric", "OkvError",
    "UnboundedError", "ZeroSection", "AffineFlag", "Flag", "ValuationTable", "good_flag_pn", "valuation_section",
    "valuation_vector_poly", "Section", "L1_TWIST", "SUP_NUMERIC", "VARIANTS", "ArithLinearSeries", "MetricModel",
    "SubvarietyY", "h0_hat", "h0_hat_count", "model_sum", "nu_image", "nu_image_fast", "restricted_series", "twist",
    "GapReport", "NormedModule", "VolumeSequence", "check_sandwich", "check_sandwich_model", "fujita_kfold",
    "generation_check", "lambda_norms", "okounkov_body", "superadditivity_check", "valuation_gap",
    "vhat_closed_form", "vhat_vol_estimate",
]
