"""Secrecy outage metrics obtained from the interference-side outage.

A secrecy problem maps onto an interference problem: with
``gamma = 2^R - 1`` and each eavesdropper branch scaled by
``c = 2^R / (2^R - 1)``,

    P_s      = OP_NI(gamma)                 (scaled branches as interferers)
    P_so     = [P_s - F_d(mu)]^+ / (1 - F_d(mu))
    P_s_plus = 1 - OP_I(1)                   (unscaled branches)

The eavesdropper combines its branches by MRC, so its SNR is the sum of
the branch SNRs, exactly like the aggregate interference power.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DegenerateThresholdError, ValidationError
from .fading import N_MAX, FadingModel, ScaledModel, cdf, sf
from .outage import InterferenceScenario, Probability, op_i, op_ni


@dataclass(frozen=True)
class SecrecyScenario:
    """Legitimate link, eavesdropper MRC branches, secrecy rate and threshold.

    ``rate`` is in bits per channel use; ``mu`` is a linear SNR.
    """

    desired: FadingModel
    eavesdropper_branches: tuple
    rate: float = 1.0
    mu: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "eavesdropper_branches", tuple(self.eavesdropper_branches))
        if not self.eavesdropper_branches:
            raise ValidationError("at least one eavesdropper branch is required")
        if not isinstance(self.desired, FadingModel):
            raise ValidationError("desired link must be a FadingModel")
        if not (math.isfinite(self.rate) and self.rate >= 0):
            raise ValidationError(f"secrecy rate must be finite and >= 0, got {self.rate!r}")
        if not (math.isfinite(self.mu) and self.mu >= 0):
            raise ValidationError(f"mu must be finite and >= 0, got {self.mu!r}")

    @property
    def threshold(self) -> float:
        """``2^R - 1``, the SNR the legitimate link must exceed at rate R."""
        return math.expm1(self.rate * math.log(2.0))


@dataclass(frozen=True)
class DualityMap:
    gamma: float
    scale: float

    def apply(self, branches) -> tuple:
        if self.scale == 1.0:
            return tuple(branches)
        return tuple(ScaledModel(b, self.scale) for b in branches)


# Mapping used for the strictly-positive-capacity metric.
POSITIVE_CAPACITY_MAP = DualityMap(1.0, 1.0)


def duality_map(rate: float) -> DualityMap:
    """Threshold and branch scale translating rate ``R > 0`` to OP_NI."""
    if not (math.isfinite(rate) and rate > 0):
        raise ValidationError(f"duality map needs rate > 0 (use p_s_plus for R = 0), got {rate!r}")
    gamma = math.expm1(rate * math.log(2.0))
    return DualityMap(gamma, (gamma + 1.0) / gamma)


def interference_dual(scenario: SecrecyScenario) -> tuple[InterferenceScenario, float]:
    """Interference scenario and threshold whose OP_NI equals ``p_s``."""
    dm = duality_map(scenario.rate)
    return InterferenceScenario(scenario.desired, dm.apply(scenario.eavesdropper_branches)), dm.gamma


def p_s(scenario: SecrecyScenario, n_max: int = N_MAX) -> Probability:
    """Secrecy outage probability ``Pr{C_s < R}``."""
    dual, gamma = interference_dual(scenario)
    return op_ni(dual, gamma, n_max=n_max)


def p_s_plus(scenario: SecrecyScenario, n_max: int = N_MAX) -> Probability:
    """Probability of strictly positive secrecy capacity ``Pr{gamma_d > gamma_e}``.

    ``rate`` and ``mu`` are ignored.
    """
    dual = InterferenceScenario(scenario.desired,
                                POSITIVE_CAPACITY_MAP.apply(scenario.eavesdropper_branches))
    op = op_i(dual, POSITIVE_CAPACITY_MAP.gamma, n_max=n_max)
    return Probability(1.0 - op)


def p_so(scenario: SecrecyScenario, n_max: int = N_MAX) -> Probability:
    """Secrecy outage conditioned on transmission, ``Pr{C_s < R | gamma_d > mu}``.

    Computed as ``[P_s - F_d(mu)]^+ / (1 - F_d(mu))``. This is exact for
    ``mu <= 2^R - 1``; above that it is a lower bound of the conditional
    probability and the result carries ``lower_bound=True``.

    Raises
    ------
    DegenerateThresholdError
        If ``Pr{gamma_d > mu}`` vanishes to machine precision.
    """
    ps = p_s(scenario, n_max=n_max)
    mu = scenario.mu
    f_mu = cdf(scenario.desired, mu) if mu > 0 else 0.0
    surv = sf(scenario.desired, mu) if mu > 0 else 1.0
    if surv <= 1e-300 or f_mu >= 1.0:
        raise DegenerateThresholdError(f"Pr{{gamma_d > mu}} vanishes at mu={mu!r}")
    value = max(0.0, float(ps) - f_mu) / surv
    return Probability(value, underflow=ps.underflow, lower_bound=mu > duality_map(scenario.rate).gamma)
