"""Fading laws of a single link: MGF, MGF derivatives, CDF and samplers.

Three families are supported, all parameterised by the mean of the
(linear) SNR or received power:

* Rayleigh: exponential power with mean ``mean_snr``.
* Nakagami-m: gamma power with shape ``m`` and scale ``mean_snr / m``.
* Rice: ``mean_snr * |LoS + diffuse|**2`` with Rician factor ``K``.

MGF derivatives are evaluated in the log domain (:func:`log_mgf_derivative`)
because ``mean_snr**n * n!`` overflows doubles well before ``n = 128``.
For ``s`` inside the domain every derivative ``E[X^n e^{sX}]`` is strictly
positive, so the log magnitude carries all the information.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Union

import numpy as np
from scipy import special

from .errors import DomainError, ValidationError

N_MAX = 128

# Additive truncation bound on the Poisson tail of the Marcum-Q series.
_MARCUM_TAIL = 1e-14


class Family(str, Enum):
    RAYLEIGH = "rayleigh"
    NAKAGAMI = "nakagami"
    RICE = "rice"


@dataclass(frozen=True)
class FadingModel:
    """Fading law of one link.

    Parameters
    ----------
    family : Family
        Distribution family.
    mean_snr : float
        Mean of the positive variable, linear scale.
    m : float, optional
        Nakagami shape, ``m >= 0.5``. Ignored for other families.
    K : float, optional
        Rician factor, ``K >= 0``. Ignored for other families.
    """

    family: Family
    mean_snr: float
    m: float = 1.0
    K: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        if not (math.isfinite(self.mean_snr) and self.mean_snr > 0):
            raise ValidationError(f"mean_snr must be positive and finite, got {self.mean_snr!r}")
        if self.family is Family.NAKAGAMI and not (math.isfinite(self.m) and self.m >= 0.5):
            raise ValidationError(f"Nakagami shape m must be >= 0.5, got {self.m!r}")
        if self.family is Family.RICE and not (math.isfinite(self.K) and self.K >= 0):
            raise ValidationError(f"Rician factor K must be >= 0, got {self.K!r}")

    @classmethod
    def rayleigh(cls, mean_snr: float) -> "FadingModel":
        return cls(Family.RAYLEIGH, mean_snr)

    @classmethod
    def nakagami(cls, m: float, mean_snr: float) -> "FadingModel":
        return cls(Family.NAKAGAMI, mean_snr, m=m)

    @classmethod
    def rice(cls, K: float, mean_snr: float) -> "FadingModel":
        return cls(Family.RICE, mean_snr, K=K)

    def scaled(self, scale: float) -> "ScaledModel":
        return ScaledModel(self, scale)

    def with_mean(self, mean_snr: float) -> "FadingModel":
        return FadingModel(self.family, mean_snr, m=self.m, K=self.K)


@dataclass(frozen=True)
class ScaledModel:
    """The variable ``scale * X`` with ``X`` following ``base``.

    The MGF is scaled in its argument, so this works for any family, not
    only those closed under scaling.
    """

    base: FadingModel
    scale: float

    def __post_init__(self):
        if not (math.isfinite(self.scale) and self.scale > 0):
            raise ValidationError(f"scale must be positive and finite, got {self.scale!r}")
        if isinstance(self.base, ScaledModel):
            # flatten nested scalings
            object.__setattr__(self, "scale", self.scale * self.base.scale)
            object.__setattr__(self, "base", self.base.base)

    @property
    def mean_snr(self) -> float:
        return self.scale * self.base.mean_snr

    def scaled(self, scale: float) -> "ScaledModel":
        return ScaledModel(self, scale)


AnyModel = Union[FadingModel, ScaledModel]


def _unwrap(model: AnyModel) -> tuple[FadingModel, float]:
    if isinstance(model, ScaledModel):
        return model.base, model.scale
    if isinstance(model, FadingModel):
        return model, 1.0
    raise ValidationError(f"expected a fading model, got {type(model).__name__}")


def s_max(model: AnyModel) -> float:
    """Right end of the MGF domain (the MGF diverges at and beyond it)."""
    base, c = _unwrap(model)
    if base.family is Family.RAYLEIGH:
        edge = 1.0 / base.mean_snr
    elif base.family is Family.NAKAGAMI:
        edge = base.m / base.mean_snr
    else:
        edge = (1.0 + base.K) / base.mean_snr
    return edge / c


def _check_domain(model: AnyModel, s: float) -> None:
    if not math.isfinite(s):
        raise DomainError(f"MGF argument must be finite, got {s!r}")
    if s >= s_max(model):
        raise DomainError(f"MGF diverges at s={s!r} (domain is s < {s_max(model)!r})")


def _base_log_derivative(model: FadingModel, n: int, s: float) -> float:
    g = model.mean_snr
    if model.family is Family.RAYLEIGH:
        # g^n n! / (1 - s g)^(n+1)
        return n * math.log(g) + math.lgamma(n + 1) - (n + 1) * math.log1p(-s * g)
    if model.family is Family.NAKAGAMI:
        m = model.m
        # g^n m^m Gamma(m+n) / ((m - s g)^(n+m) Gamma(m))
        return (n * math.log(g) + m * math.log(m) + math.lgamma(m + n) - math.lgamma(m)
                - (n + m) * math.log(m - s * g))
    K = model.K
    d = 1.0 + K - s * g
    log_pre = (n * math.log(g) + 2.0 * math.lgamma(n + 1) + math.log1p(K)
               - (n + 1) * math.log(d) + s * K * g / d)
    if K == 0.0:
        # only the i = 0 summand survives
        return log_pre - math.lgamma(n + 1)
    i = np.arange(n + 1)
    log_ratio = math.log(K) + math.log1p(K) - math.log(d)
    summands = -2.0 * special.gammaln(i + 1) - special.gammaln(n - i + 1) + i * log_ratio
    return log_pre + float(special.logsumexp(summands))


def logsumexp_rows(a: np.ndarray) -> np.ndarray:
    """Row-wise ``log(sum(exp(a)))`` of a 2-D array; all ``-inf`` rows give ``-inf``.

    Same result as ``scipy.special.logsumexp(a, axis=1)`` without its
    per-call dispatch cost, which dominates on the small arrays used here.
    """
    top = a.max(axis=1)
    shift = np.where(np.isfinite(top), top, 0.0)
    with np.errstate(divide="ignore"):
        return np.log(np.exp(a - shift[:, None]).sum(axis=1)) + shift


def log_mgf_derivative(model: AnyModel, n: int, s: float, n_max: int = N_MAX) -> float:
    """Natural log of the n-th derivative of the MGF at ``s``.

    Raises
    ------
    DomainError
        If ``s`` is outside the MGF domain.
    ValidationError
        If ``n`` is negative or exceeds ``n_max``.
    """
    if int(n) != n or n < 0:
        raise ValidationError(f"derivative order must be a nonnegative integer, got {n!r}")
    n = int(n)
    if n > n_max:
        raise ValidationError(f"derivative order {n} exceeds cap n_max={n_max}")
    _check_domain(model, s)
    base, c = _unwrap(model)
    out = _base_log_derivative(base, n, c * s)
    if c != 1.0:
        out += n * math.log(c)
    return out


def log_mgf_derivatives(model: AnyModel, n: int, s: float, n_max: int = N_MAX) -> np.ndarray:
    """Vectorised :func:`log_mgf_derivative` for orders ``0..n``."""
    if n < 0 or n > n_max:
        raise ValidationError(f"derivative order {n!r} outside [0, {n_max}]")
    _check_domain(model, s)
    base, c = _unwrap(model)
    s = c * s
    g = base.mean_snr
    j = np.arange(n + 1, dtype=float)
    if base.family is Family.RAYLEIGH:
        out = j * math.log(g) + special.gammaln(j + 1) - (j + 1) * math.log1p(-s * g)
    elif base.family is Family.NAKAGAMI:
        m = base.m
        out = (j * math.log(g) + m * math.log(m) + special.gammaln(m + j) - math.lgamma(m)
               - (j + m) * math.log(m - s * g))
    else:
        K = base.K
        d = 1.0 + K - s * g
        out = (j * math.log(g) + 2.0 * special.gammaln(j + 1) + math.log1p(K)
               - (j + 1) * math.log(d) + s * K * g / d)
        if K == 0.0:
            out = out - special.gammaln(j + 1)
        else:
            log_ratio = math.log(K) + math.log1p(K) - math.log(d)
            i = j[None, :]
            jj = j[:, None]
            with np.errstate(invalid="ignore"):
                summands = -2.0 * special.gammaln(i + 1) - special.gammaln(jj - i + 1) + i * log_ratio
            summands = np.where(i <= jj, summands, -np.inf)
            out = out + logsumexp_rows(summands)
    if c != 1.0:
        out = out + j * math.log(c)
    return out


def mgf_derivative(model: AnyModel, n: int, s: float, n_max: int = N_MAX) -> float:
    """n-th derivative of the MGF at ``s`` as a plain float.

    Raises ``OverflowError`` when the value is not representable.
    """
    return math.exp(log_mgf_derivative(model, n, s, n_max=n_max))


def mgf(model: AnyModel, s: float) -> float:
    """MGF ``E[exp(s X)]``; exactly 1 at ``s = 0``."""
    _check_domain(model, s)
    if s == 0:
        return 1.0
    base, c = _unwrap(model)
    s = c * s
    g = base.mean_snr
    if base.family is Family.RAYLEIGH:
        return 1.0 / (1.0 - s * g)
    if base.family is Family.NAKAGAMI:
        return math.exp(-base.m * math.log1p(-s * g / base.m))
    K = base.K
    d = 1.0 + K - s * g
    return (1.0 + K) / d * math.exp(s * K * g / d)


def _rice_cdf_sf(K: float, z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """CDF and survival of the unit-mean Rician power at ``z / (1 + K)``.

    Poisson(K) mixture of Gamma(j+1, 1) laws, which is the series form of
    ``1 - Q1(sqrt(2K), sqrt(2z))``. Truncated once the remaining Poisson
    mass drops below ``_MARCUM_TAIL``.
    """
    cdf = np.zeros_like(z)
    sf = np.zeros_like(z)
    log_pmf = -K
    mass = 0.0
    j = 0
    while True:
        w = math.exp(log_pmf)
        cdf += w * special.gammainc(j + 1, z)
        sf += w * special.gammaincc(j + 1, z)
        mass += w
        j += 1
        if j > K and 1.0 - mass < _MARCUM_TAIL:
            break
        if K == 0.0:
            break
        log_pmf += math.log(K) - math.log(j)
    return cdf, sf


def _cdf_sf(model: AnyModel, x) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(x, dtype=float)
    if np.any(np.isnan(x)) or np.any(x < 0):
        raise ValidationError("cdf argument must be nonnegative")
    base, c = _unwrap(model)
    x = x / c
    g = base.mean_snr
    if base.family is Family.RAYLEIGH:
        return -np.expm1(-x / g), np.exp(-x / g)
    if base.family is Family.NAKAGAMI:
        z = base.m * x / g
        return special.gammainc(base.m, z), special.gammaincc(base.m, z)
    return _rice_cdf_sf(base.K, (1.0 + base.K) * x / g)


def cdf(model: AnyModel, x):
    """``Pr{X <= x}``. Accepts scalars or arrays of nonnegative ``x``."""
    out = _cdf_sf(model, x)[0]
    return float(out) if out.ndim == 0 else out


def sf(model: AnyModel, x):
    """Survival function ``Pr{X > x}`` without cancellation in the upper tail."""
    out = _cdf_sf(model, x)[1]
    return float(out) if out.ndim == 0 else out


def sample(model: AnyModel, rng: np.random.Generator, size=None):
    """Draw SNR values. Deterministic for a given generator state."""
    base, c = _unwrap(model)
    g = base.mean_snr * c
    if base.family is Family.RAYLEIGH:
        return rng.exponential(g, size)
    if base.family is Family.NAKAGAMI:
        return rng.gamma(base.m, g / base.m, size)
    K = base.K
    los = math.sqrt(K / (K + 1.0))
    sd = math.sqrt(0.5 / (K + 1.0))
    re = los + sd * rng.standard_normal(size)
    im = sd * rng.standard_normal(size)
    return g * (re * re + im * im)
