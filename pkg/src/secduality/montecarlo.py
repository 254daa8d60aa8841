"""Seeded Monte Carlo estimates of every outage metric, and cross-checks.

Estimates come straight from the defining events. Eavesdropper branches
and interferers are drawn one by one and summed; no duality mapping is
used, so the estimator stays independent of the analytic path.

Samples are split into fixed blocks of ``BLOCK_SIZE``. Block ``b`` draws
from a Philox stream keyed on ``(seed, b)``, so a result depends only on
``(seed, samples, scenario)`` and never on how blocks are spread across
workers.
"""
from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Optional, Union

import numpy as np

from .errors import InsufficientConditioningError, ValidationError
from .fading import sample
from .outage import InterferenceScenario, Probability, op_i, op_n, op_ni
from .secrecy import SecrecyScenario, p_s, p_s_plus, p_so

BLOCK_SIZE = 1 << 16
MIN_CONDITIONING_HITS = 100
# Below 25 expected events the normal approximation is not trusted.
RESOLUTION_EVENTS = 25

Scenario = Union[SecrecyScenario, InterferenceScenario]


class Metric(str, Enum):
    OP_N = "op_n"
    OP_I = "op_i"
    OP_NI = "op_ni"
    P_S = "p_s"
    P_SO = "p_so"
    P_S_PLUS = "p_s_plus"


INTERFERENCE_METRICS = (Metric.OP_N, Metric.OP_I, Metric.OP_NI)
SECRECY_METRICS = (Metric.P_S, Metric.P_SO, Metric.P_S_PLUS)


@dataclass(frozen=True)
class McConfig:
    samples: int = 1_000_000
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if int(self.samples) != self.samples or self.samples < 1:
            raise ValidationError(f"samples must be a positive integer, got {self.samples!r}")
        if not 0 <= self.seed < 2**64:
            raise ValidationError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")
        if self.workers < 1:
            raise ValidationError(f"workers must be >= 1, got {self.workers!r}")


@dataclass(frozen=True)
class Estimate:
    p_hat: float
    std_err: float
    n_effective: int
    hits: int

    @classmethod
    def from_counts(cls, hits: int, n: int) -> "Estimate":
        if n == 0:
            return cls(math.nan, math.nan, 0, 0)
        p = hits / n
        return cls(p, math.sqrt(p * (1.0 - p) / n), n, hits)


def block_rng(seed: int, block: int) -> np.random.Generator:
    ss = np.random.SeedSequence(seed, spawn_key=(block,))
    return np.random.Generator(np.random.Philox(ss))


def draw(scenario: Scenario, rng: np.random.Generator, size: int) -> tuple[np.ndarray, np.ndarray]:
    """Desired SNR and summed eavesdropper/interferer SNR, drawn in link order."""
    if isinstance(scenario, SecrecyScenario):
        branches = scenario.eavesdropper_branches
    else:
        branches = scenario.interferers
    desired = sample(scenario.desired, rng, size)
    total = np.zeros(size)
    for b in branches:
        total += sample(b, rng, size)
    return desired, total


def events(scenario: Scenario, desired: np.ndarray, other: np.ndarray,
           gamma: Optional[float] = None) -> dict:
    """Boolean indicator arrays of each metric's defining event.

    For ``p_so`` two arrays are returned: the joint event and the
    conditioning event ``gamma_d > mu``.
    """
    if isinstance(scenario, SecrecyScenario):
        two_r = 2.0 ** scenario.rate
        outage = 1.0 + desired < two_r * (1.0 + other)
        sent = desired > scenario.mu
        return {
            Metric.P_S: outage,
            Metric.P_SO: (outage & sent, sent),
            Metric.P_S_PLUS: desired > other,
        }
    if gamma is None:
        raise ValidationError("interference metrics need a threshold gamma")
    return {
        Metric.OP_N: desired < gamma,
        Metric.OP_I: desired < gamma * other,
        Metric.OP_NI: desired < gamma * (other + 1.0),
    }


def _block_counts(scenario, gamma, seed, block, size, metrics):
    desired, other = draw(scenario, block_rng(seed, block), size)
    ev = events(scenario, desired, other, gamma)
    out = {}
    for m in metrics:
        e = ev[m]
        if isinstance(e, tuple):
            out[m] = (int(np.count_nonzero(e[0])), int(np.count_nonzero(e[1])))
        else:
            out[m] = (int(np.count_nonzero(e)), size)
    return out


def _metric_list(metrics, scenario) -> list:
    allowed = SECRECY_METRICS if isinstance(scenario, SecrecyScenario) else INTERFERENCE_METRICS
    ms = [Metric(m) for m in metrics]
    for m in ms:
        if m not in allowed:
            raise ValidationError(f"metric {m.value} does not apply to {type(scenario).__name__}")
    return ms


def estimate_many(metrics: Iterable, scenario: Scenario, cfg: McConfig = McConfig(),
                  gamma: Optional[float] = None, strict: bool = True) -> dict:
    """Estimates of several metrics from one shared set of draws.

    With ``strict=False`` a ``p_so`` estimate with too few conditioning hits
    is returned as-is instead of raising.
    """
    metrics = _metric_list(metrics, scenario)
    n = int(cfg.samples)
    sizes = [BLOCK_SIZE] * (n // BLOCK_SIZE)
    if n % BLOCK_SIZE:
        sizes.append(n % BLOCK_SIZE)
    jobs = [(scenario, gamma, cfg.seed, b, size, metrics) for b, size in enumerate(sizes)]
    if cfg.workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            parts = list(pool.map(lambda a: _block_counts(*a), jobs))
    else:
        parts = [_block_counts(*a) for a in jobs]
    result = {}
    for m in metrics:
        hits = sum(part[m][0] for part in parts)
        trials = sum(part[m][1] for part in parts)
        if strict and m is Metric.P_SO and trials < MIN_CONDITIONING_HITS:
            raise InsufficientConditioningError(
                f"only {trials} of {n} samples satisfy gamma_d > mu "
                f"(need {MIN_CONDITIONING_HITS})")
        result[m] = Estimate.from_counts(hits, trials)
    return result


def estimate(metric, scenario: Scenario, cfg: McConfig = McConfig(),
             gamma: Optional[float] = None) -> Estimate:
    """Indicator-mean estimate of one metric."""
    return estimate_many([metric], scenario, cfg, gamma)[Metric(metric)]


def analytic(metric, scenario: Scenario, gamma: Optional[float] = None) -> Probability:
    metric = Metric(metric)
    if metric is Metric.P_S:
        return p_s(scenario)
    if metric is Metric.P_SO:
        return p_so(scenario)
    if metric is Metric.P_S_PLUS:
        return p_s_plus(scenario)
    if metric is Metric.OP_N:
        return op_n(scenario.desired, gamma)
    if metric is Metric.OP_I:
        return op_i(scenario, gamma)
    return op_ni(scenario, gamma)


@dataclass(frozen=True)
class MetricCheck:
    metric: Metric
    analytic: float
    estimate: Estimate
    k_sigma: float
    lower_bound: bool = False

    @property
    def z(self) -> float:
        if self.estimate.n_effective == 0:
            return math.nan
        diff = self.analytic - self.estimate.p_hat
        if self.estimate.std_err == 0:
            return 0.0 if diff == 0 else math.inf
        return abs(diff) / self.estimate.std_err

    @property
    def status(self) -> str:
        n = self.estimate.n_effective
        a = self.analytic
        if self.metric is Metric.P_SO and n < MIN_CONDITIONING_HITS:
            return "inconclusive"
        if min(a, 1.0 - a) < RESOLUTION_EVENTS / n or self.estimate.std_err == 0:
            return "inconclusive"
        if self.lower_bound:
            ok = a <= self.estimate.p_hat + self.k_sigma * self.estimate.std_err
        else:
            ok = self.z <= self.k_sigma
        return "pass" if ok else "fail"


def check(metric, analytic_value: float, est: Estimate, k_sigma: float = 4.0,
          lower_bound: bool = False) -> MetricCheck:
    return MetricCheck(Metric(metric), float(analytic_value), est, k_sigma, lower_bound)


@dataclass
class VerificationReport:
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.status != "fail" for c in self.checks)

    @property
    def inconclusive(self) -> list:
        return [c for c in self.checks if c.status == "inconclusive"]

    def format(self) -> str:
        lines = [f"{'metric':<10}{'analytic':>20}{'mc':>20}{'std_err':>14}{'|d|/se':>10}  status"]
        for c in self.checks:
            note = " (lower bound)" if c.lower_bound else ""
            lines.append(f"{c.metric.value:<10}{c.analytic:>20.12g}{c.estimate.p_hat:>20.12g}"
                         f"{c.estimate.std_err:>14.6g}{c.z:>10.3f}  {c.status}{note}")
        lines.append("overall: " + ("PASS" if self.passed else "FAIL"))
        return "\n".join(lines)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["metric", "analytic", "mc", "std_err", "n_effective", "z", "k_sigma",
                    "lower_bound", "status"])
        for c in self.checks:
            w.writerow([c.metric.value, f"{c.analytic:.12g}", f"{c.estimate.p_hat:.12g}",
                        f"{c.estimate.std_err:.12g}", c.estimate.n_effective, f"{c.z:.6g}",
                        f"{c.k_sigma:g}", int(c.lower_bound), c.status])
        return buf.getvalue()


def default_metrics(scenario: Scenario) -> tuple:
    if isinstance(scenario, SecrecyScenario):
        return SECRECY_METRICS if scenario.rate > 0 else (Metric.P_S_PLUS,)
    return INTERFERENCE_METRICS


def verify(scenario: Scenario, metrics: Optional[Iterable] = None, cfg: McConfig = McConfig(),
           k_sigma: float = 4.0, gamma: Optional[float] = None) -> VerificationReport:
    """Compare the analytic value of each metric with its MC estimate.

    ``p_so`` values flagged as lower bounds are checked one-sided.
    """
    metrics = _metric_list(metrics if metrics is not None else default_metrics(scenario), scenario)
    values = {m: analytic(m, scenario, gamma) for m in metrics}
    estimates = estimate_many(metrics, scenario, cfg, gamma, strict=False)
    report = VerificationReport()
    for m in metrics:
        v = values[m]
        report.checks.append(check(m, v, estimates[m], k_sigma,
                                   lower_bound=getattr(v, "lower_bound", False)))
    return report
