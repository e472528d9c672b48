"""Run configuration: TOML file plus command-line overrides."""

from __future__ import annotations

import math
import os
import sys
from dataclasses import dataclass, field, fields, replace
from typing import Any, Dict, List, Optional, Tuple

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover
    import tomli as tomllib

from .errors import DomainError
from .integral_engine import SplitParams, validate_deltas
from .numerics import PrecisionContext
from .quadrature import QuadratureSpec

CONFIG_ENV = "ZLAB_CONFIG"
MODES = ("reference", "fast")


class ConfigError(ValueError):
    """Invalid configuration (maps to the usage exit code)."""


def parse_t_grid(spec: str) -> Tuple[float, float, int]:
    """'a:b:n' -> (a, b, n): n geometrically spaced points from a to b."""
    parts = spec.split(":")
    if len(parts) != 3:
        raise ConfigError(f"t-grid must look like a:b:n, got {spec!r}")
    try:
        a, b, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise ConfigError(f"bad t-grid {spec!r}: {exc}") from None
    if not (0 < a <= b) or n < 1 or (n == 1 and a != b):
        raise ConfigError(f"t-grid needs 0 < a <= b and n >= 1 (n = 1 only when a = b), got {spec!r}")
    return a, b, n


def geometric_grid(a: float, b: float, n: int) -> List[float]:
    if n == 1:
        return [a]
    r = math.log(b / a) / (n - 1)
    pts = [a * math.exp(k * r) for k in range(n)]
    pts[-1] = b
    return pts


@dataclass
class RunConfig:
    precision_bits: int = 256
    sigma: float = 0.5
    t: Optional[float] = None
    t_grid: Optional[Tuple[float, float, int]] = None
    delta1: float = 0.1
    delta2: float = 0.05
    delta3: float = 0.2
    delta4: float = 0.1
    c_policy: str = "quarter"
    panels_per_wavelength: int = 8
    gl_nodes: int = 8
    window_extension: float = 0.0
    quad_levels: List[int] = field(default_factory=list)
    mode: str = "reference"
    threads: int = 1
    output_path: Optional[str] = None
    record_timing: bool = False
    identity_t_max: float = 2 * math.pi * 2000
    delta3_sweep: List[float] = field(default_factory=list)
    # test hook: widen one S1 row so the identity checks must fail
    inject_off_by_one: bool = False

    def validate(self) -> None:
        errors = validate_deltas(self.delta1, self.delta2, self.delta3, self.delta4)
        if self.mode not in MODES:
            errors.append(f"mode must be one of {MODES}")
        if self.threads < 1:
            errors.append("threads must be at least 1")
        if self.precision_bits < 64:
            errors.append("precision_bits must be at least 64")
        for d3 in self.delta3_sweep:
            errors.extend(validate_deltas(self.delta1, self.delta2, d3, self.delta4))
        if errors:
            raise ConfigError("; ".join(errors))
        try:
            self.params()
            self.quad()
        except (DomainError, ValueError) as exc:
            raise ConfigError(str(exc)) from None

    def t_values(self, default: List[float]) -> List[float]:
        if self.t_grid is not None:
            return geometric_grid(*self.t_grid)
        if self.t is not None:
            return [self.t]
        return list(default)

    def context(self) -> PrecisionContext:
        return PrecisionContext(self.precision_bits)

    def params(self, delta3: Optional[float] = None) -> SplitParams:
        d3 = self.delta3 if delta3 is None else delta3
        return SplitParams(self.delta1, self.delta2, d3, self.delta4, self.c_policy)

    def quad(self, level: Optional[int] = None) -> QuadratureSpec:
        ppw = self.panels_per_wavelength if level is None else level
        return QuadratureSpec(panels_per_wavelength=ppw, gl_nodes=self.gl_nodes, window_extension=self.window_extension)

    @property
    def deltas(self) -> Tuple[float, float, float, float]:
        return self.delta1, self.delta2, self.delta3, self.delta4


_FIELD_NAMES = {f.name for f in fields(RunConfig)}


def _normalise(raw: Dict[str, Any]) -> Dict[str, Any]:
    out = {}
    for key, value in raw.items():
        name = key.replace("-", "_")
        if name == "deltas":
            if len(value) != 4:
                raise ConfigError("deltas must list four exponents")
            out.update(dict(zip(("delta1", "delta2", "delta3", "delta4"), map(float, value))))
            continue
        if name == "t_grid" and isinstance(value, str):
            value = parse_t_grid(value)
        elif name == "t_grid":
            value = (float(value[0]), float(value[1]), int(value[2]))
        if name not in _FIELD_NAMES:
            raise ConfigError(f"unknown configuration key {key!r}")
        out[name] = value
    return out


def load_toml(path: str) -> Dict[str, Any]:
    with open(path, "rb") as fh:
        data = tomllib.load(fh)
    # an optional [run] table holds the same keys as the top level
    data = {**{k: v for k, v in data.items() if not isinstance(v, dict)}, **data.get("run", {})}
    return _normalise(data)


def build_config(path: Optional[str], overrides: Dict[str, Any]) -> RunConfig:
    """Defaults, then the TOML file (path or $ZLAB_CONFIG), then non-None overrides."""
    path = path or os.environ.get(CONFIG_ENV)
    values: Dict[str, Any] = load_toml(path) if path else {}
    values.update(_normalise({k: v for k, v in overrides.items() if v is not None}))
    cfg = replace(RunConfig(), **values)
    cfg.validate()
    return cfg
