"""Tilted moments of a sum of independent link SNRs.

For ``X = X_1 + ... + X_L`` with independent branches, the series

    T_j(p) = E[X^j exp(-p X)] = (-1)^j d^j/dp^j prod_k Phi_k(-p)

is obtained from the per-branch series by binomial convolution, because
``X^j = sum_a C(j, a) A^a B^(j-a)`` for ``X = A + B``. Every term is
nonnegative, so all sums below are cancellation-free; values are kept as
natural logs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache, reduce
from typing import Sequence

import numpy as np

from .errors import SeriesMismatchError, ValidationError
from .fading import N_MAX, AnyModel, log_mgf_derivatives, logsumexp_rows


@lru_cache(maxsize=None)
def log_binomial_table(n: int) -> np.ndarray:
    """Lower-triangular ``log C(j, a)`` for ``0 <= a <= j <= n``; ``-inf`` above.

    Logs of exact integer binomials: log-gamma differences lose ~1e-13 at
    ``n = 128``.
    """
    table = np.full((n + 1, n + 1), -np.inf)
    for j in range(n + 1):
        for a in range(j + 1):
            table[j, a] = math.log(math.comb(j, a))
    table.setflags(write=False)
    return table


@dataclass(frozen=True)
class TiltedMomentSeries:
    """``log T_j`` for ``j = 0..n`` at evaluation point ``p``."""

    p: float
    log_terms: np.ndarray

    def __post_init__(self):
        arr = np.array(self.log_terms, dtype=float)
        arr.setflags(write=False)
        object.__setattr__(self, "log_terms", arr)

    @property
    def n(self) -> int:
        return len(self.log_terms) - 1

    @property
    def terms(self) -> np.ndarray:
        with np.errstate(over="ignore"):
            return np.exp(self.log_terms)

    def truncated(self, n: int) -> "TiltedMomentSeries":
        if n > self.n:
            raise SeriesMismatchError(f"series has {self.n + 1} terms, {n + 1} requested")
        return TiltedMomentSeries(self.p, self.log_terms[: n + 1])

    def __len__(self):
        return len(self.log_terms)


def factor_series(model: AnyModel, p: float, n: int, n_max: int = N_MAX) -> TiltedMomentSeries:
    """Tilted moments ``E[X^j exp(-pX)]``, ``j = 0..n``, of one link."""
    if not (math.isfinite(p) and p > 0):
        raise ValidationError(f"evaluation point p must be positive, got {p!r}")
    return TiltedMomentSeries(p, log_mgf_derivatives(model, n, -p, n_max=n_max))


def constant_series(value: float, p: float, n: int) -> TiltedMomentSeries:
    """Series of the deterministic variable ``X = value``."""
    if not value > 0:
        raise ValidationError("constant must be positive")
    j = np.arange(n + 1)
    return TiltedMomentSeries(p, j * math.log(value) - p * value)


def _convolve(a: TiltedMomentSeries, b: TiltedMomentSeries, n: int) -> TiltedMomentSeries:
    A = a.log_terms[: n + 1]
    B = b.log_terms[: n + 1]
    idx = np.arange(n + 1)
    diff = idx[:, None] - idx[None, :]
    Bshift = np.where(diff >= 0, B[np.clip(diff, 0, n)], -np.inf)
    M = log_binomial_table(n) + A[None, :] + Bshift
    return TiltedMomentSeries(a.p, logsumexp_rows(M))


def product_series(factors: Sequence[TiltedMomentSeries], n: int) -> TiltedMomentSeries:
    """Series of the sum variable, i.e. of the product of the factor MGFs.

    Raises
    ------
    SeriesMismatchError
        If factors were evaluated at different ``p`` or hold fewer than
        ``n + 1`` terms.
    """
    if not factors:
        raise ValidationError("product_series needs at least one factor")
    p = factors[0].p
    for f in factors:
        if f.p != p:
            raise SeriesMismatchError(f"factors evaluated at different points ({p!r} vs {f.p!r})")
        if f.n < n:
            raise SeriesMismatchError(f"factor has {f.n + 1} terms, {n + 1} required")
    if len(factors) == 1:
        return factors[0].truncated(n)
    return reduce(lambda x, y: _convolve(x, y, n), factors)


def sum_series(models: Sequence[AnyModel], p: float, n: int, n_max: int = N_MAX) -> TiltedMomentSeries:
    """Shortcut: :func:`product_series` over :func:`factor_series` of each model."""
    return product_series([factor_series(mdl, p, n, n_max=n_max) for mdl in models], n)
