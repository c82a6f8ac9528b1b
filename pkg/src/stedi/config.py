"""Run configuration and the constant hierarchy ``eps < delta < rho < mu``.

Two modes exist. ``paper_strict`` derives every constant from mu by the
closed forms below; the resulting eps is far too small to do anything at
desk scale. ``practical`` (the default) takes eps, delta and rho from the
user and only checks their ordering.
"""
from __future__ import annotations

import configparser
import dataclasses
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from stedi.errors import DomainError
from stedi.matching import NIBBLE_BITE, NIBBLE_STALL_ROUNDS

PROPERTIES = ("a", "b", "c", "d", "e")
MODES = ("practical", "paper_strict")


@dataclass
class Constants:
    mu: float
    eps: float
    delta: float
    rho: float
    K: float
    mode: str

    @property
    def gamma_floor(self):
        """Lower bound on the reservoir probability when ``m >= (1+mu) n``."""
        mu = min(self.mu, 0.25)
        return (3 * mu - mu * mu) / (4 * (1 + mu))


def strict_rho(mu):
    return ((3 * mu - mu * mu) / (8 * (1 + mu))) ** 2


def strict_delta(mu):
    return (1 + mu) * strict_rho(mu) / 20


def strict_eps(mu):
    """Half of ``min(delta^2, mu^2 / 16, 1e-100)``."""
    return min(strict_delta(mu) ** 2, mu * mu / 16, 1e-100) / 2


def derive_constants(mu, n=None, d=None, mode="practical", eps=None, delta=None, rho=None, K=8.0):
    """Constants for a run. ``n`` and ``d`` are accepted for symmetry with
    the plan builder; none of the formulas depend on them.

    Strict mode uses ``min(mu, 1/4)``: a larger mu only makes the problem
    easier, so the constants for 1/4 still apply.
    """
    if not mu > 0:
        raise DomainError("mu must be positive")
    if mode == "paper_strict":
        m4 = min(mu, 0.25)
        return Constants(mu, strict_eps(m4), strict_delta(m4), strict_rho(m4), K, mode)
    if mode != "practical":
        raise DomainError(f"unknown mode {mode!r}")
    if None in (eps, delta, rho):
        raise DomainError("practical mode needs eps, delta and rho")
    if not 0 < eps < delta < rho < mu:
        raise DomainError(f"need 0 < eps < delta < rho < mu, got {eps}, {delta}, {rho}, {mu}")
    return Constants(mu, eps, delta, rho, K, mode)


@dataclass
class EmbedConfig:
    mu: float = 0.25
    mode: str = "practical"
    eps: float = 0.02
    delta: float = 0.05
    rho: float = 0.1
    K: float = 8.0
    p0: float | None = None
    e_exception_frac: float | None = None
    max_resamples: int = 10
    max_pipeline_retries: int = 5
    seed: int | None = None
    matcher: str = "nibble"
    bite: float = NIBBLE_BITE
    stall_rounds: int = NIBBLE_STALL_ROUNDS
    fast_paths: bool = True
    checks: dict = field(default_factory=lambda: {p: True for p in PROPERTIES})
    tolerances: dict = field(default_factory=lambda: {p: 1.0 for p in PROPERTIES})

    def __post_init__(self):
        if self.mode not in MODES:
            raise DomainError(f"unknown mode {self.mode!r}")
        if self.matcher not in ("greedy", "nibble"):
            raise DomainError(f"unknown matcher {self.matcher!r}")
        if self.max_resamples < 1 or self.max_pipeline_retries < 1:
            raise DomainError("resample and retry budgets must be >= 1")
        self.checks = {p: bool(self.checks.get(p, True)) for p in PROPERTIES}
        self.tolerances = {p: float(self.tolerances.get(p, 1.0)) for p in PROPERTIES}
        # The ordering against mu is enforced when a plan is built, so a run
        # with mu below rho can still take a shortcut path and report.
        if self.mu < 0:
            raise DomainError("mu must be nonnegative")
        if self.mode == "practical" and not 0 < self.eps < self.delta < self.rho:
            raise DomainError(f"need 0 < eps < delta < rho, got {self.eps}, {self.delta}, {self.rho}")

    def constants(self):
        if self.mode == "paper_strict":
            return derive_constants(self.mu, mode="paper_strict", K=self.K)
        return derive_constants(self.mu, mode="practical", eps=self.eps, delta=self.delta,
                                rho=self.rho, K=self.K)

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)

    def to_dict(self):
        return dataclasses.asdict(self)

    @classmethod
    def from_mapping(cls, data):
        """Build from a flat mapping. ``check_X`` / ``tol_X`` keys set the
        per-property toggles and tolerance multipliers."""
        known = {f.name: f for f in dataclasses.fields(cls)}
        kwargs, checks, tols = {}, {}, {}
        for key, value in data.items():
            if key.startswith("check_") and key[6:] in PROPERTIES:
                checks[key[6:]] = _to_bool(value)
            elif key.startswith("tol_") and key[4:] in PROPERTIES:
                tols[key[4:]] = float(value)
            elif key in ("checks", "tolerances") and isinstance(value, dict):
                (checks if key == "checks" else tols).update(value)
            elif key in known:
                kwargs[key] = _coerce(known[key], value)
            else:
                raise DomainError(f"unknown config key {key!r}")
        kwargs["checks"] = {p: checks.get(p, True) for p in PROPERTIES}
        kwargs["tolerances"] = {p: tols.get(p, 1.0) for p in PROPERTIES}
        return cls(**kwargs)


def _to_bool(value):
    if isinstance(value, bool):
        return value
    text = str(value).strip().lower()
    if text in ("1", "true", "yes", "on"):
        return True
    if text in ("0", "false", "no", "off"):
        return False
    raise DomainError(f"not a boolean: {value!r}")


def _coerce(f, value):
    if value is None or (isinstance(value, str) and value.strip().lower() in ("", "none")):
        return None
    kind = f.type if isinstance(f.type, str) else getattr(f.type, "__name__", "")
    if kind.startswith("bool"):
        return _to_bool(value)
    if kind.startswith("int"):
        return int(value)
    if kind.startswith("float"):
        return float(value)
    return value.strip() if isinstance(value, str) else value


def load_config(path):
    """Read a JSON object or flat ``key = value`` lines (``#`` comments)."""
    text = Path(path).read_text()
    if text.lstrip().startswith("{"):
        return EmbedConfig.from_mapping(json.loads(text))
    parser = configparser.ConfigParser(interpolation=None, comment_prefixes=("#", ";"))
    parser.optionxform = str
    try:
        parser.read_string("[config]\n" + text)
    except configparser.Error as exc:
        raise DomainError(f"bad config file {path}: {exc}") from None
    return EmbedConfig.from_mapping(dict(parser["config"]))


def band(x, K, tol=1.0):
    """``tol K sqrt(x max(ln x, 1))``, the concentration half-width used by
    every degree and size check."""
    if x <= 0:
        return 0.0
    return tol * K * math.sqrt(x * max(math.log(x), 1.0))
