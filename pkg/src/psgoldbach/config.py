"""Run configuration: a JSON file merged with command-line flags (flags win)."""
from __future__ import annotations

import json
import os
import re
from dataclasses import asdict, dataclass, field

WORKERS_ENV = "PSG_WORKERS"

COMMON_KEYS = ("sieve_limit", "workers", "out", "seed", "sieve_cache")

# parameters accepted by each subcommand (config keys and flag dests)
SUBCOMMAND_KEYS = {
    "ps-count": ("x", "profile"),
    "ternary": ("n", "mode", "profile"),
    "singular": ("n", "P"),
    "admissible": ("p1", "p2", "p3"),
    "expsum-scan": ("spec",),
    "hb-check": ("limit", "nu", "z"),
    "psi-scan": ("N", "profile", "delta", "alphas"),
}


class ConfigError(ValueError):
    pass


def parse_int(text) -> int:
    """Integer literal allowing 10^6, 2**20, 1e6 and 1_000_000."""
    if isinstance(text, bool):
        raise ConfigError(f"not an integer: {text!r}")
    if isinstance(text, int):
        return text
    s = str(text).strip().replace("_", "")
    m = re.fullmatch(r"(\d+)\s*(\^|\*\*)\s*(\d+)", s)
    if m:
        return int(m.group(1)) ** int(m.group(3))
    m = re.fullmatch(r"(\d+)[eE](\d+)", s)
    if m:
        return int(m.group(1)) * 10 ** int(m.group(2))
    if re.fullmatch(r"[+-]?\d+", s):
        return int(s)
    raise ConfigError(f"not an integer: {text!r}")


@dataclass
class RunConfig:
    subcommand: str
    sieve_limit: int | None = None
    workers: int = 1
    out: str | None = None
    seed: int = 0
    sieve_cache: str | None = None
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if self.subcommand not in SUBCOMMAND_KEYS:
            raise ConfigError(f"unknown subcommand {self.subcommand!r}")
        unknown = set(self.params) - set(SUBCOMMAND_KEYS[self.subcommand])
        if unknown:
            raise ConfigError(f"unknown keys for {self.subcommand}: {sorted(unknown)}")
        if not isinstance(self.workers, int) or self.workers < 1:
            raise ConfigError("workers must be a positive integer")
        if self.sieve_limit is not None and self.sieve_limit < 2:
            raise ConfigError("sieve_limit must be >= 2")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        d = dict(d)
        allowed = {"subcommand", "params", *COMMON_KEYS}
        unknown = set(d) - allowed
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        if "subcommand" not in d:
            raise ConfigError("config lacks a subcommand")
        return cls(**d)

    @classmethod
    def merge(cls, subcommand: str, file_data: dict | None, flags: dict) -> "RunConfig":
        """Config file values, then the worker env var, then explicit flags."""
        data = dict(file_data or {})
        sub = data.pop("subcommand", subcommand)
        if sub != subcommand:
            raise ConfigError(f"config is for {sub!r}, not {subcommand!r}")
        params = dict(data.pop("params", {}))
        for key in list(data):
            if key in SUBCOMMAND_KEYS.get(subcommand, ()):
                params[key] = data.pop(key)
        unknown = set(data) - set(COMMON_KEYS)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        env = os.environ.get(WORKERS_ENV)
        if env:
            data["workers"] = parse_int(env)
        for key, val in flags.items():
            if val is None:
                continue
            if key in COMMON_KEYS:
                data[key] = val
            else:
                params[key] = val
        if data.get("sieve_limit") is not None:
            data["sieve_limit"] = parse_int(data["sieve_limit"])
        if "workers" in data:
            data["workers"] = parse_int(data["workers"])
        return cls(subcommand, params=params, **data)


def load_config_file(path) -> dict:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    return data
