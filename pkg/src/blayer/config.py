"""Experiment configuration: flat key = value files with [section] headers.

Example:

    [kernel]
    name = wall

    [confinement]
    family = linear:1.0

    [run]
    n = 200, 800, 3200
    gamma = 0.25*n^0.4
    L = 40.0
    K = 8192

Unknown sections or keys are rejected with their line number; values are
typed per key.  The gamma rule grammar accepts a constant, `c*n^p`, or
`c*sqrt(n/log n)`; each run row carries an `in_regime` flag saying whether
the rule keeps the blur parameter inside the regime where the boundary-layer
expansion is valid (γ_n → ∞ but slowly: below n^{1/(1+a)} for kernels with a
|x|^-a singularity, below √(n/log n) for logarithmic ones).
"""

from __future__ import annotations

import dataclasses
import math
import re

from .errors import ConfigError

__all__ = ["ExperimentConfig", "GammaRule", "parse_config", "load_config"]

_RULE_POWER = re.compile(
    r"^\s*(?:([0-9.eE+\-]+)\s*\*\s*)?n\s*\^\s*([0-9.eE+\-]+)\s*$"
)
_RULE_SQRTLOG = re.compile(
    r"^\s*(?:([0-9.eE+\-]+)\s*\*\s*)?sqrt\(\s*n\s*/\s*log\s+n\s*\)\s*$"
)
_RULE_CONST = re.compile(r"^\s*([0-9.eE+\-]+)\s*$")


@dataclasses.dataclass(frozen=True)
class GammaRule:
    """γ_n rule: kind 'power' (c·n^p), 'sqrtlog' (c·√(n/log n)) or 'const'."""

    kind: str
    c: float
    p: float = 0.0
    text: str = ""

    def gamma(self, n: int) -> float:
        if self.kind == "power":
            return self.c * n**self.p
        if self.kind == "sqrtlog":
            return self.c * math.sqrt(n / math.log(n))
        return self.c

    def in_regime(self, a: float) -> bool:
        """Whether γ_n → ∞ strictly slower than the critical growth.

        Critical growth is n^{1/(1+a)} for a > 0 and √(n/log n) for a = 0;
        a constant rule never diverges, a rule at the critical rate is not
        strictly below it, and both are flagged out of regime.
        """
        if self.kind == "const":
            return False
        p_max = 0.5 if a == 0.0 else 1.0 / (1.0 + a)
        if self.kind == "power":
            return 0.0 < self.p < p_max
        # sqrtlog grows like n^(1/2) up to logs: critical for a = 0
        return a > 0.0
    def __str__(self):
        return self.text


def parse_gamma_rule(text: str) -> GammaRule:
    m = _RULE_POWER.match(text)
    if m:
        c = float(m.group(1)) if m.group(1) else 1.0
        return GammaRule("power", c, float(m.group(2)), text.strip())
    m = _RULE_SQRTLOG.match(text)
    if m:
        c = float(m.group(1)) if m.group(1) else 1.0
        return GammaRule("sqrtlog", c, 0.5, text.strip())
    m = _RULE_CONST.match(text)
    if m:
        return GammaRule("const", float(m.group(1)), 0.0, text.strip())
    raise ValueError(
        f"cannot parse gamma rule {text!r}: expected a constant, 'c*n^p' "
        f"or 'c*sqrt(n/log n)'"
    )


@dataclasses.dataclass(frozen=True)
class ExperimentConfig:
    kernel: str = "wall"
    confinement: str = "linear:1.0"
    n_list: tuple = (200, 800, 3200)
    gamma_rule: GammaRule = dataclasses.field(
        default_factory=lambda: parse_gamma_rule("n^0.25")
    )
    L: float = 40.0
    K: int = 8192
    tol: float = 1e-9
    vague_M: float = 20.0
    seed: int = 0
    out: str = "out"

    def rows(self, a: float):
        in_reg = self.gamma_rule.in_regime(a)
        return [
            {"n": n, "gamma": self.gamma_rule.gamma(n), "in_regime": in_reg}
            for n in self.n_list
        ]


_SCHEMA = {
    ("kernel", "name"): ("kernel", str),
    ("confinement", "family"): ("confinement", str),
    ("run", "n"): ("n_list", "int_list"),
    ("run", "gamma"): ("gamma_rule", "rule"),
    ("run", "L"): ("L", float),
    ("run", "K"): ("K", int),
    ("run", "tol"): ("tol", float),
    ("run", "vague_M"): ("vague_M", float),
    ("run", "seed"): ("seed", int),
    ("run", "out"): ("out", str),
}
_SECTIONS = {"kernel", "confinement", "run"}


def parse_config(text: str, origin: str = "<config>") -> ExperimentConfig:
    fields = {}
    section = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            if section not in _SECTIONS:
                raise ConfigError(
                    f"{origin}:{lineno}: unknown section [{section}] "
                    f"(expected one of {sorted(_SECTIONS)})"
                )
            continue
        if "=" not in line:
            raise ConfigError(f"{origin}:{lineno}: expected 'key = value', got {raw!r}")
        if section is None:
            raise ConfigError(f"{origin}:{lineno}: key outside any [section]")
        key, value = (part.strip() for part in line.split("=", 1))
        if (section, key) not in _SCHEMA:
            raise ConfigError(f"{origin}:{lineno}: unknown key '{key}' in [{section}]")
        field, typ = _SCHEMA[(section, key)]
        try:
            if typ == "int_list":
                parsed = tuple(int(tok) for tok in value.split(","))
            elif typ == "rule":
                parsed = parse_gamma_rule(value)
            else:
                parsed = typ(value)
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"{origin}:{lineno}: bad value for '{key}': {exc}") from exc
        if field in fields:
            raise ConfigError(f"{origin}:{lineno}: duplicate key '{key}'")
        fields[field] = parsed
    cfg = ExperimentConfig(**fields)
    _validate(cfg, origin)
    return cfg


def _validate(cfg: ExperimentConfig, origin: str):
    if cfg.K < 2 or (cfg.K & (cfg.K - 1)) != 0:
        raise ConfigError(f"{origin}: K must be a power of two >= 2, got {cfg.K}")
    if cfg.L <= 0:
        raise ConfigError(f"{origin}: L must be positive, got {cfg.L}")
    if not cfg.n_list or any(n < 2 for n in cfg.n_list):
        raise ConfigError(f"{origin}: n values must all be >= 2, got {cfg.n_list}")
    if cfg.tol <= 0 or cfg.tol >= 1:
        raise ConfigError(f"{origin}: tol must be in (0, 1), got {cfg.tol}")
    if cfg.vague_M <= 0:
        raise ConfigError(f"{origin}: vague_M must be positive")
    for n in cfg.n_list:
        g = cfg.gamma_rule.gamma(n)
        if not (g > 0 and math.isfinite(g)):
            raise ConfigError(f"{origin}: gamma rule gives non-positive γ at n={n}")


def load_config(path: str) -> ExperimentConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from exc
    return parse_config(text, origin=path)
