"""Secrecy outage analysis through the interference-eavesdropping duality."""
from .errors import (DegenerateThresholdError, DomainError, InsufficientConditioningError,
                     SecDualityError, SeriesMismatchError, UnsupportedConfigurationError,
                     ValidationError)
from .fading import (Family, FadingModel, ScaledModel, cdf, log_mgf_derivative, mgf,
                     mgf_derivative, sample, sf)
from .mgf_product import TiltedMomentSeries, factor_series, product_series
from .montecarlo import Estimate, McConfig, Metric, estimate, estimate_many, verify
from .outage import InterferenceScenario, Probability, op_i, op_n, op_ni
from .secrecy import DualityMap, SecrecyScenario, duality_map, p_s, p_s_plus, p_so

__version__ = "0.1.0"
