"""Outage probability of a Nakagami-m link under co-channel interference.

With integer shape ``m`` the desired power satisfies
``Pr{gamma_d > t} = exp(-a t) sum_{i<m} (a t)^i / i!`` with
``a = m / mean_d``. Conditioning on the interference ``X`` gives

    OP_NI(gamma) = 1 - sum_{i<m} (p^i / i!) E[(1 + X)^i exp(-p (1 + X))]
    OP_I(gamma)  = 1 - sum_{i<m} (p^i / i!) E[X^i exp(-p X)]

with ``p = m gamma / mean_d``. Expanding ``(1 + X)^i`` binomially recovers
the familiar ``exp(-p) sum_i p^i/i! sum_j C(i,j) T_j`` form; here it is the
tilted-moment series of ``Y = 1 + X`` (a constant branch convolved with
the interferers), which keeps every summand nonnegative.

Each summand is a mixed Poisson probability ``E[Pois(i; p Y)]``, so the
outage is the upper tail ``sum_{i>=m}`` of the same sequence. When the
complement is at least one half the tail is summed directly, which keeps
full relative precision for small outage probabilities instead of forming
``1 - (1 - eps)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import special

from .errors import UnsupportedConfigurationError, ValidationError
from .fading import N_MAX, AnyModel, Family, FadingModel, cdf, logsumexp_rows
from .mgf_product import TiltedMomentSeries, constant_series, factor_series, product_series

UNDERFLOW = 1e-300

_TAIL_REL_TOL = 1e-17
_TAIL_CONSISTENCY = 1e-9


class Probability(float):
    """A probability value with result metadata.

    Attributes
    ----------
    underflow : bool
        The true value lies below ``1e-300`` and was reported as 0.
    lower_bound : bool
        The value is a lower bound of the target metric, not its exact value.
    """

    underflow: bool
    lower_bound: bool

    def __new__(cls, value: float, underflow: bool = False, lower_bound: bool = False):
        obj = super().__new__(cls, value)
        obj.underflow = underflow
        obj.lower_bound = lower_bound
        return obj

    def __repr__(self):
        flags = [name for name in ("underflow", "lower_bound") if getattr(self, name)]
        return f"Probability({float(self)!r}{', ' + ', '.join(flags) if flags else ''})"


@dataclass(frozen=True)
class InterferenceScenario:
    """Desired link plus independent interferers (their powers add)."""

    desired: FadingModel
    interferers: tuple

    def __post_init__(self):
        if not isinstance(self.desired, FadingModel):
            raise ValidationError("desired link must be a FadingModel")
        object.__setattr__(self, "interferers", tuple(self.interferers))
        if not self.interferers:
            raise ValidationError("at least one interferer is required")


def integer_shape(desired: FadingModel) -> int:
    """Nakagami shape of the desired link as an int, or raise.

    Rayleigh is accepted as ``m = 1``.
    """
    if desired.family is Family.RAYLEIGH:
        return 1
    if desired.family is Family.NAKAGAMI and float(desired.m).is_integer():
        return int(desired.m)
    if desired.family is Family.NAKAGAMI:
        raise UnsupportedConfigurationError(
            f"analytic outage needs integer Nakagami m (got {desired.m}); "
            "use the Monte Carlo estimator instead")
    raise UnsupportedConfigurationError(
        f"analytic outage needs a Nakagami-m or Rayleigh desired link (got {desired.family.value}); "
        "use the Monte Carlo estimator instead")


def _check_gamma(gamma: float) -> None:
    if not (math.isfinite(gamma) and gamma > 0):
        raise ValidationError(f"threshold gamma must be positive and finite, got {gamma!r}")


def _interference_series(interferers: Sequence[AnyModel], p: float, n: int,
                         with_noise: bool, n_max: int) -> TiltedMomentSeries:
    factors = [factor_series(mdl, p, n, n_max=n_max) for mdl in interferers]
    if with_noise:
        factors.insert(0, constant_series(1.0, p, n))
    return product_series(factors, n)


def _log_poisson_weights(p: float, series: TiltedMomentSeries, start: int) -> np.ndarray:
    i = np.arange(start, series.n + 1)
    log_p_pow = np.where(i == 0, 0.0, i * math.log(p))
    return log_p_pow - special.gammaln(i + 1) + series.log_terms[start:]


def _mixed_poisson_tail(p: float, m: int, interferers, with_noise: bool, n_max: int) -> Probability:
    """``Pr{N >= m}`` for ``N ~ Pois(p Y)`` mixed over the interference."""
    head = _interference_series(interferers, p, m - 1, with_noise, n_max)
    log_head = float(logsumexp_rows(_log_poisson_weights(p, head, 0)[None, :])[0])
    head_mass = math.exp(log_head)
    if head_mass >= 0.5:
        for n in sorted({min(n_max, m + 64), n_max}):
            if n < m:
                continue
            series = _interference_series(interferers, p, n, with_noise, n_max)
            log_w = _log_poisson_weights(p, series, m)
            log_tail = float(logsumexp_rows(log_w[None, :])[0])
            if log_tail == -math.inf:
                return Probability(0.0, underflow=True)
            converged = log_w[-1] - log_tail < math.log(_TAIL_REL_TOL)
            if converged and abs(math.exp(log_tail) + head_mass - 1.0) <= _TAIL_CONSISTENCY:
                value = math.exp(log_tail)
                if value < UNDERFLOW:
                    return Probability(0.0, underflow=True)
                return Probability(value)
    return Probability(-math.expm1(log_head))


def op_n(desired: AnyModel, gamma: float) -> Probability:
    """Noise-limited outage ``Pr{gamma_d < gamma}``."""
    _check_gamma(gamma)
    return Probability(cdf(desired, gamma))


def op_ni(scenario: InterferenceScenario, gamma: float, n_max: int = N_MAX) -> Probability:
    """Outage with interference and noise, ``Pr{gamma_d < gamma (gamma_i + 1)}``."""
    _check_gamma(gamma)
    m = integer_shape(scenario.desired)
    p = m * gamma / scenario.desired.mean_snr
    return _mixed_poisson_tail(p, m, scenario.interferers, True, n_max)


def op_i(scenario: InterferenceScenario, gamma: float, n_max: int = N_MAX) -> Probability:
    """Interference-limited outage ``Pr{gamma_d < gamma * gamma_i}``."""
    _check_gamma(gamma)
    m = integer_shape(scenario.desired)
    p = m * gamma / scenario.desired.mean_snr
    return _mixed_poisson_tail(p, m, scenario.interferers, False, n_max)
