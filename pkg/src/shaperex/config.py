"""Run configuration: one TOML or JSON file, overridable by flags, which
are in turn overridable by SHAPEREX_* environment variables."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, fields
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:
    import tomli as tomllib

ENV_PREFIX = "SHAPEREX_"


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    input: str | None = None
    store: str = "out/store"
    shape: str | None = None
    rules: str | None = None
    out: str = "out"
    folds: int = 10
    seed: int = 7
    margin: int = 100
    samples: list = field(default_factory=list)
    extractor: str = "heuristic"
    endpoint: str | None = None
    timeout_ms: int = 30000
    parallel: int = 4
    host: str = "127.0.0.1"
    port: int = 8777
    annotator: str = "anonymous"

    def validate(self):
        if self.folds < 2:
            raise ConfigError("folds must be >= 2")
        for label, path in (("shape", self.shape), ("rules", self.rules),
                            ("input", self.input)):
            if path is not None and not Path(path).exists():
                raise ConfigError(f"{label} file {path!r} does not exist")
        if self.extractor not in ("heuristic", "remote"):
            raise ConfigError(f"unknown extractor {self.extractor!r}")
        if self.extractor == "remote" and not self.endpoint:
            raise ConfigError("remote extractor needs an endpoint")
        return self

    @property
    def timeout_s(self) -> float:
        return self.timeout_ms / 1000.0


def _read_file(path: Path) -> dict:
    if path.suffix == ".toml":
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def load_config(path=None, overrides: dict | None = None) -> RunConfig:
    """Build the effective configuration: file values, then non-None flag
    overrides, then SHAPEREX_* environment variables."""
    data: dict = {}
    if path is not None:
        data.update(_read_file(Path(path)))
    if overrides:
        data.update({k: v for k, v in overrides.items() if v is not None})

    known = {f.name: f.type for f in fields(RunConfig)}
    unknown = set(data) - set(known)
    if unknown:
        raise ConfigError(f"unknown configuration keys: {sorted(unknown)}")

    config = RunConfig(**data)
    for f in fields(RunConfig):
        env = os.environ.get(ENV_PREFIX + f.name.upper())
        if env is None:
            continue
        current = getattr(config, f.name)
        if f.name == "samples":
            setattr(config, f.name, json.loads(env))
        elif isinstance(current, bool):
            setattr(config, f.name, env.lower() in ("1", "true", "yes"))
        elif isinstance(current, int) and not isinstance(current, bool):
            setattr(config, f.name, int(env))
        else:
            setattr(config, f.name, env)
    return config.validate()
