"""Run configuration: an INI file with one section per parameter block.

Example::

    [distribution]
    family = pareto_shift
    alpha = 3
    drift_c = 2.5

    [theorem1]
    beta = 2
    taylor_bounds = exact

    [grid]
    y = 10, 20, 40
    x = geom:1:100:5

    [mc]
    n_paths = 1000000
    seed = 7

Grids are comma-separated numbers, ``lin:start:stop:n`` or ``geom:start:stop:n``.
"""

import configparser
from dataclasses import dataclass, field
import io
import json
import math
from typing import Dict, List, Optional

import numpy as np

from .dist import DistributionSpec, Family
from .errors import ConfigError

FORMAT_VERSION = "1"

SCHEMA = {
    "distribution": {"family", "alpha", "drift_c", "scale", "weibull_exponent",
                     "log_exponent", "table_x", "table_tail"},
    "theorem1": {"beta", "taylor_bounds", "sharper_offset_xi", "sharper_threshold"},
    "theorem2": {"eta", "kappa", "y_kappa"},
    "grid": {"x", "y", "delta"},
    "mc": {"n_paths", "seed", "eps", "eps_factor", "workers", "step_cap"},
    "reinsure": {"alpha", "scale", "a", "T", "premium_rate", "beta", "x", "n_paths",
                 "seed", "eps", "slope", "slope_n_paths", "c_samples"},
    "output": {"path"},
}


def parse_grid(text: str) -> List[float]:
    """Numbers from ``1, 2, 3``, ``lin:a:b:n`` or ``geom:a:b:n``."""
    text = text.strip()
    try:
        if text.startswith(("lin:", "geom:")):
            kind, a, b, n = text.split(":")
            a, b, n = float(a), float(b), int(n)
            if n < 1:
                raise ValueError
            pts = np.linspace(a, b, n) if kind == "lin" else np.geomspace(a, b, n)
            return [float(v) for v in pts]
        vals = [float(v) for v in text.replace(";", ",").split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"cannot parse grid {text!r}") from None
    if not vals or not all(math.isfinite(v) for v in vals):
        raise ConfigError(f"grid {text!r} is empty or not finite")
    return vals


@dataclass
class RunConfig:
    """Sections of raw string values, with typed accessors."""

    sections: Dict[str, Dict[str, str]] = field(default_factory=dict)

    @classmethod
    def from_text(cls, text: str) -> "RunConfig":
        cp = configparser.ConfigParser(interpolation=None)
        cp.optionxform = str
        try:
            cp.read_string(text)
        except configparser.Error as exc:
            raise ConfigError(f"malformed config: {exc}") from None
        return cls.from_dict({s: dict(cp[s]) for s in cp.sections()})

    @classmethod
    def from_file(cls, path) -> "RunConfig":
        try:
            with open(path, encoding="utf-8") as fh:
                return cls.from_text(fh.read())
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None

    @classmethod
    def from_dict(cls, d) -> "RunConfig":
        out = {}
        for sec, kv in d.items():
            if sec not in SCHEMA:
                raise ConfigError(f"unknown config section [{sec}]")
            unknown = set(kv) - SCHEMA[sec]
            if unknown:
                raise ConfigError(f"unknown keys in [{sec}]: {sorted(unknown)}")
            out[sec] = {k: str(v).strip() for k, v in kv.items()}
        return cls(out)

    def to_dict(self):
        return {s: dict(sorted(kv.items())) for s, kv in sorted(self.sections.items())}

    def to_text(self) -> str:
        cp = configparser.ConfigParser(interpolation=None)
        cp.optionxform = str
        cp.read_dict(self.to_dict())
        buf = io.StringIO()
        cp.write(buf)
        return buf.getvalue()

    def __eq__(self, other):
        return isinstance(other, RunConfig) and self.to_dict() == other.to_dict()

    # -- typed access ----------------------------------------------------------

    def has(self, section, key=None):
        if section not in self.sections:
            return False
        return key is None or key in self.sections[section]

    def raw(self, section, key, default=None):
        return self.sections.get(section, {}).get(key, default)

    def set(self, section, key, value):
        self.sections.setdefault(section, {})[key] = str(value)

    def get_float(self, section, key, default=None, required=False) -> Optional[float]:
        v = self.raw(section, key)
        if v is None or v == "":
            if required:
                raise ConfigError(f"missing [{section}] {key}")
            return default
        try:
            return float(v)
        except ValueError:
            raise ConfigError(f"[{section}] {key} = {v!r} is not a number") from None

    def get_int(self, section, key, default=None, required=False) -> Optional[int]:
        v = self.get_float(section, key, None, required)
        if v is None:
            return default
        if v != int(v):
            raise ConfigError(f"[{section}] {key} must be an integer")
        return int(v)

    def get_bool(self, section, key, default=False) -> bool:
        v = self.raw(section, key)
        if v is None:
            return default
        low = v.lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"[{section}] {key} = {v!r} is not a boolean")

    def get_grid(self, section, key, required=True) -> Optional[List[float]]:
        v = self.raw(section, key)
        if v is None:
            if required:
                raise ConfigError(f"missing [{section}] {key}")
            return None
        return parse_grid(v)

    def distribution(self) -> DistributionSpec:
        if "distribution" not in self.sections:
            raise ConfigError("missing [distribution] section")
        d = dict(self.sections["distribution"])
        try:
            Family(d.get("family", ""))
        except ValueError:
            raise ConfigError(f"unknown family {d.get('family')!r}") from None
        typed = {"family": d.pop("family")}
        for k in ("table_x", "table_tail"):
            if k in d:
                typed[k] = parse_grid(d.pop(k))
        for k, v in d.items():
            try:
                typed[k] = float(v)
            except ValueError:
                raise ConfigError(f"[distribution] {k} = {v!r} is not a number") from None
        return DistributionSpec.from_dict(typed)


def run_record(command: str, config: RunConfig, extra=None) -> dict:
    rec = {"format_version": FORMAT_VERSION, "command": command, "config": config.to_dict()}
    if extra:
        rec.update(extra)
    return rec


def write_run_record(path, record):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(record, fh, indent=2, sort_keys=True)
        fh.write("\n")


def config_from_record(record) -> RunConfig:
    if record.get("format_version") != FORMAT_VERSION:
        raise ConfigError(f"unsupported run record version {record.get('format_version')!r}")
    return RunConfig.from_dict(record["config"])
