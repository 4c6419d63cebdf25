"""Run configuration: a flat ``key = value`` file merged with command-line flags."""
from __future__ import annotations

import ast
import math
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from .errors import ConfigError

COMMANDS = ("kernel", "counterexample", "torus", "verify-appendix", "plot")
PIPELINES = ("theorem_t1", "large_p", "small_p")

_DEFAULT_S = {
    "kernel": [1.0, 2.0, 3.0, 4.0],
    "counterexample": [4.0],
    "torus": [1.0, 2.0],
    "plot": [3.0],
}
_DEFAULT_P = {"counterexample": [40.0], "torus": [1.5, 3.0, 4.0]}


@dataclass
class RunConfig:
    command: str
    out: str = "fracbern-out"
    seed: int = 0
    jobs: int = 1
    tol: float | None = None
    dim: int = 1
    L: float | None = None
    n: int | None = None
    M: int = 64
    s_values: list[float] = field(default_factory=list)
    p_values: list[float] = field(default_factory=list)
    N_list: list[float] = field(default_factory=list)
    pipelines: list[str] = field(default_factory=lambda: ["theorem_t1"])
    r_max: float = 20.0
    n_samples: int = 64
    moments: bool = False
    function: str = "random"
    samples: int = 4
    t_max: float = 1.0

    def to_dict(self) -> dict:
        return asdict(self)

    def validate(self) -> "RunConfig":
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.jobs < 1:
            raise ConfigError("jobs must be at least 1")
        if self.tol is not None and not self.tol > 0:
            raise ConfigError("tol must be positive")
        if self.dim not in (1, 2, 3):
            raise ConfigError("dim must be 1, 2 or 3")
        if self.command in ("kernel", "plot") and not self.s_values:
            raise ConfigError("s_values is empty")
        if any(not (isinstance(s, (int, float)) and s > 0 and math.isfinite(s)) for s in self.s_values):
            raise ConfigError("s values must be positive")
        if any(not (isinstance(p, (int, float)) and p > 1 and math.isfinite(p)) for p in self.p_values):
            raise ConfigError("p values must lie in (1, inf)")
        if self.command == "counterexample":
            self._validate_counterexample()
        if self.command == "torus":
            if not self.s_values or not self.p_values:
                raise ConfigError("torus needs s_values and p_values")
            if any(s > 2 for s in self.s_values):
                raise ConfigError("torus checks need 0 < s <= 2")
            if self.function not in ("random", "mode"):
                raise ConfigError("function must be 'random' or 'mode'")
        return self

    def _validate_counterexample(self) -> None:
        bad = [p for p in self.pipelines if p not in PIPELINES]
        if bad or not self.pipelines:
            raise ConfigError(f"pipelines must be chosen from {PIPELINES}, got {self.pipelines}")
        if "theorem_t1" in self.pipelines:
            if self.dim not in (1, 2):
                raise ConfigError("theorem_t1 supports dim 1 or 2")
            if not self.N_list or any(n < 4 for n in self.N_list) or sorted(self.N_list) != self.N_list:
                raise ConfigError("N_list must be increasing with entries >= 4")
        if {"large_p", "small_p"} & set(self.pipelines):
            if not self.s_values or any(s <= 2 for s in self.s_values):
                raise ConfigError("witness searches need every s to exceed 2")
            if not self.p_values:
                raise ConfigError("p_values is empty")
        if "large_p" in self.pipelines and "small_p" not in self.pipelines:
            if any(p < 4 for p in self.p_values):
                raise ConfigError("large_p needs p >= 4")
        if "small_p" in self.pipelines and "large_p" not in self.pipelines:
            if any(p >= 2 for p in self.p_values):
                raise ConfigError("small_p needs 1 < p < 2")


def parse_config_text(text: str) -> dict:
    """``key = value`` per line; values are Python literals, ``#`` starts a comment.

    Bare words on the right are read as strings.
    """
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line or (line.startswith("[") and line.endswith("]")):
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key.isidentifier():
            raise ConfigError(f"line {lineno}: bad key {key!r}")
        try:
            out[key] = ast.literal_eval(value)
        except (ValueError, SyntaxError):
            if value.replace("_", "").replace("-", "").isalnum():
                out[key] = value
            else:
                raise ConfigError(f"line {lineno}: cannot parse value {value!r}") from None
        if value.lower() in ("true", "false"):
            out[key] = value.lower() == "true"
    return out


def load_config_file(path: str | Path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return parse_config_text(text)


def build_config(command: str, file_values: dict, overrides: dict) -> RunConfig:
    """Merge defaults, file values and flags (flags win)."""
    known = {f.name for f in fields(RunConfig)}
    merged = {}
    for source in (file_values, overrides):
        for key, value in source.items():
            if value is None:
                continue
            if key not in known or key == "command":
                raise ConfigError(f"unknown config key {key!r}")
            merged[key] = value
    merged.setdefault("s_values", list(_DEFAULT_S.get(command, [])))
    merged.setdefault("p_values", list(_DEFAULT_P.get(command, [])))
    if command == "counterexample":
        merged.setdefault("N_list", [16.0, 32.0, 64.0, 128.0])
    if command == "torus":
        merged.setdefault("N_list", [4.0, 8.0, 16.0])
    for key in ("s_values", "p_values", "N_list"):
        value = merged[key] if key in merged else []
        if isinstance(value, (int, float)):
            value = [value]
        if not isinstance(value, (list, tuple)):
            raise ConfigError(f"{key} must be a list of numbers")
        try:
            merged[key] = [float(v) for v in value]
        except (TypeError, ValueError):
            raise ConfigError(f"{key} must be a list of numbers") from None
    if isinstance(merged.get("pipelines"), str):
        merged["pipelines"] = [merged["pipelines"]]
    try:
        cfg = RunConfig(command=command, **merged)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None
    for name, kind in (("seed", int), ("jobs", int), ("dim", int), ("M", int), ("n_samples", int),
                       ("samples", int)):
        if not isinstance(getattr(cfg, name), kind) or isinstance(getattr(cfg, name), bool):
            raise ConfigError(f"{name} must be an integer")
    return cfg.validate()
