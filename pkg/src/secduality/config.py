"""Scenario configuration files.

A config is an INI-style file with sections ``desired``, ``eavesdropper``,
``secrecy`` and ``mc``::

    [desired]
    model = nakagami        ; rayleigh | nakagami | rice
    m = 2
    mean_snr_db = 10

    [eavesdropper]
    count = 3               ; MRC branches
    model = rayleigh        ; shared by all branches ...
    mean_snr_db = 5

    [eavesdropper.2]        ; ... unless overridden per branch (1-based)
    model = rice
    K = 5

    [secrecy]
    rate_bits = 1
    mu_db = gamma           ; "gamma" means mu = 2^rate - 1; "-inf" means mu = 0

    [mc]
    samples = 1000000
    seed = 1
    workers = 1
    enabled = false

SNRs are given in dB here and converted to linear once, in
:meth:`ScenarioConfig.scenario`.
"""
from __future__ import annotations

import configparser
import dataclasses
import math
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .errors import ValidationError
from .fading import Family, FadingModel
from .montecarlo import McConfig
from .secrecy import SecrecyScenario

MU_GAMMA = "gamma"

SWEEP_FIELDS = (
    "desired.mean_snr_db",
    "secrecy.rate_bits",
    "eavesdropper.mean_snr_db",
    "eavesdropper.count",
)

_FAMILY_ALIASES = {
    "rayleigh": Family.RAYLEIGH,
    "nakagami": Family.NAKAGAMI,
    "nakagami-m": Family.NAKAGAMI,
    "nakagamim": Family.NAKAGAMI,
    "rice": Family.RICE,
    "rician": Family.RICE,
}

_BRANCH_SECTION = re.compile(r"^eavesdropper\.(\d+)$")


class ConfigError(ValidationError):
    """Malformed or invalid config; the message names file, line and field."""


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


@dataclass(frozen=True)
class LinkConfig:
    model: Family
    mean_snr_db: float
    m: float = 1.0
    K: float = 0.0

    def fading(self) -> FadingModel:
        return FadingModel(self.model, db_to_linear(self.mean_snr_db), m=self.m, K=self.K)


@dataclass(frozen=True)
class ScenarioConfig:
    desired: LinkConfig
    branches: tuple
    rate_bits: float
    mu_db: object = MU_GAMMA
    mc: McConfig = McConfig()
    mc_enabled: bool = False

    @property
    def count(self) -> int:
        return len(self.branches)

    @property
    def mu(self) -> float:
        if self.mu_db == MU_GAMMA:
            return math.expm1(self.rate_bits * math.log(2.0))
        return db_to_linear(float(self.mu_db))

    def scenario(self) -> SecrecyScenario:
        return SecrecyScenario(self.desired.fading(), [b.fading() for b in self.branches],
                               rate=self.rate_bits, mu=self.mu)

    def with_field(self, name: str, value: float) -> "ScenarioConfig":
        """Copy with one sweepable field replaced."""
        if name == "desired.mean_snr_db":
            return dataclasses.replace(self, desired=dataclasses.replace(self.desired, mean_snr_db=value))
        if name == "secrecy.rate_bits":
            if value < 0:
                raise ConfigError(f"secrecy.rate_bits must be >= 0, got {value!r}")
            return dataclasses.replace(self, rate_bits=value)
        if name == "eavesdropper.mean_snr_db":
            return dataclasses.replace(
                self, branches=tuple(dataclasses.replace(b, mean_snr_db=value) for b in self.branches))
        if name == "eavesdropper.count":
            if value != int(value) or value < 1:
                raise ConfigError(f"eavesdropper.count must be a positive integer, got {value!r}")
            # extra branches copy the last configured one
            n = int(value)
            last = self.branches[-1]
            branches = self.branches[:n] + (last,) * max(0, n - len(self.branches))
            return dataclasses.replace(self, branches=branches)
        raise ConfigError(f"unknown sweep field {name!r}; expected one of {', '.join(SWEEP_FIELDS)}")


class _Reader:
    """configparser plus line numbers for diagnostics."""

    def __init__(self, text: str, source: str):
        self.source = source
        self.parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
        self.parser.optionxform = str.lower
        try:
            self.parser.read_string(text, source=source)
        except configparser.Error as exc:
            raise ConfigError(f"{source}: {exc}") from None
        self.lines = {}
        section = None
        for lineno, line in enumerate(text.splitlines(), 1):
            stripped = line.strip()
            if stripped.startswith("[") and "]" in stripped:
                section = stripped[1:stripped.index("]")].strip()
                self.lines[(section, None)] = lineno
            elif section and ("=" in stripped or ":" in stripped) and not stripped.startswith((";", "#")):
                key = re.split(r"[=:]", stripped, maxsplit=1)[0].strip().lower()
                self.lines[(section, key)] = lineno

    def where(self, section: str, key: Optional[str] = None) -> str:
        line = self.lines.get((section, key)) or self.lines.get((section, None))
        loc = f"{self.source}:{line}" if line else self.source
        field = f"{section}.{key}" if key else f"[{section}]"
        return f"{loc}: {field}"

    def has(self, section, key):
        return self.parser.has_option(section, key)

    def raw(self, section: str, key: str, default=None, required=False):
        if not self.parser.has_section(section):
            if required:
                raise ConfigError(f"{self.source}: missing section [{section}] (needed for {section}.{key})")
            return default
        if not self.parser.has_option(section, key):
            if required:
                raise ConfigError(f"{self.where(section)}: missing required field {section}.{key}")
            return default
        return self.parser.get(section, key).strip()

    def number(self, section, key, default=None, required=False, integer=False):
        raw = self.raw(section, key, default=None, required=required)
        if raw is None:
            return default
        try:
            value = int(raw) if integer else float(raw)
        except ValueError:
            kind = "an integer" if integer else "a number"
            raise ConfigError(f"{self.where(section, key)}: expected {kind}, got {raw!r}") from None
        return value

    def boolean(self, section, key, default=False):
        raw = self.raw(section, key)
        if raw is None:
            return default
        try:
            return self.parser.getboolean(section, key)
        except ValueError:
            raise ConfigError(f"{self.where(section, key)}: expected a boolean, got {raw!r}") from None


def _link(reader: _Reader, section: str, fallback: Optional[LinkConfig] = None) -> LinkConfig:
    name = reader.raw(section, "model", required=fallback is None)
    if name is None:
        family = fallback.model
    else:
        family = _FAMILY_ALIASES.get(name.lower())
        if family is None:
            raise ConfigError(f"{reader.where(section, 'model')}: unknown model {name!r}; "
                              f"expected rayleigh, nakagami or rice")
    mean = reader.number(section, "mean_snr_db", required=fallback is None,
                         default=fallback.mean_snr_db if fallback else None)
    m = reader.number(section, "m", default=fallback.m if fallback else 1.0)
    K = reader.number(section, "k", default=fallback.K if fallback else 0.0)
    if family is Family.NAKAGAMI and not reader.has(section, "m") and fallback is None:
        raise ConfigError(f"{reader.where(section)}: missing required field {section}.m for nakagami")
    if family is Family.RICE and not reader.has(section, "k") and fallback is None:
        raise ConfigError(f"{reader.where(section)}: missing required field {section}.K for rice")
    if not math.isfinite(mean):
        raise ConfigError(f"{reader.where(section, 'mean_snr_db')}: must be finite")
    link = LinkConfig(family, mean, m=m, K=K)
    try:
        link.fading()
    except ValidationError as exc:
        raise ConfigError(f"{reader.where(section)}: {exc}") from None
    return link


def parse_config(text: str, source: str = "<config>") -> ScenarioConfig:
    reader = _Reader(text, source)
    desired = _link(reader, "desired")
    shared = _link(reader, "eavesdropper")
    count = reader.number("eavesdropper", "count", default=1, integer=True)
    if count < 1:
        raise ConfigError(f"{reader.where('eavesdropper', 'count')}: must be >= 1, got {count}")
    overrides = {}
    for section in reader.parser.sections():
        match = _BRANCH_SECTION.match(section)
        if match:
            k = int(match.group(1))
            if not 1 <= k <= count:
                raise ConfigError(f"{reader.where(section)}: branch index {k} outside 1..{count}")
            overrides[k] = _link(reader, section, fallback=shared)
    branches = tuple(overrides.get(k, shared) for k in range(1, count + 1))

    rate = reader.number("secrecy", "rate_bits", required=True)
    if not (math.isfinite(rate) and rate >= 0):
        raise ConfigError(f"{reader.where('secrecy', 'rate_bits')}: must be finite and >= 0, got {rate!r}")
    mu_raw = reader.raw("secrecy", "mu_db", default=MU_GAMMA)
    if mu_raw.lower() == MU_GAMMA:
        mu_db = MU_GAMMA
    else:
        try:
            mu_db = float(mu_raw)
        except ValueError:
            raise ConfigError(f"{reader.where('secrecy', 'mu_db')}: expected a number or "
                              f"'gamma', got {mu_raw!r}") from None
        if math.isnan(mu_db) or mu_db == math.inf:
            raise ConfigError(f"{reader.where('secrecy', 'mu_db')}: invalid threshold {mu_raw!r}")

    samples = reader.number("mc", "samples", default=1_000_000, integer=True)
    seed = reader.number("mc", "seed", default=0, integer=True)
    workers = reader.number("mc", "workers", default=1, integer=True)
    try:
        mc = McConfig(samples, seed, workers)
    except ValidationError as exc:
        raise ConfigError(f"{reader.where('mc')}: {exc}") from None
    enabled = reader.boolean("mc", "enabled", default=False)
    return ScenarioConfig(desired, branches, rate, mu_db, mc, enabled)


def load_config(path) -> ScenarioConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config ({exc.strerror})") from None
    return parse_config(text, str(path))
