"""Run configuration: ``key = value`` sections or a JSON fragment.

Text files use INI-style sections ``[material]``, ``[quadrature]``,
``[sweep]``, ``[device]`` and ``[output]`` with ``#`` comments.  A JSON file
holding the same sections (optionally nested under ``"config"``, as written
by the JSON output format) is accepted too, so outputs can be fed back in.
"""

from __future__ import annotations

import configparser
import json
import math
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from magnetocasimir.lifshitz import QuadratureConfig
from magnetocasimir.material import MaterialSpec


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending location."""


DEFAULT_FIELDS = (0.0, 1.0, 2.0, 5.0, 6.0)


@dataclass(frozen=True)
class SweepConfig:
    fields: tuple | None = None  # None: chosen per command
    separations: tuple = (1.0,)
    L0_hat: float = 1.0
    points: int = 101
    z_min: float = 0.05
    z_max: float = 0.999
    eta_mode: str = "pointwise"
    fixed_z: float = 0.8
    reference: bool = False

    def validate(self, where="sweep"):
        if self.fields is not None and not self.fields:
            raise ConfigError(f"[{where}] fields: must not be empty")
        if any(w < 0 or not math.isfinite(w) for w in self.fields or ()):
            raise ConfigError(f"[{where}] fields: cyclotron ratios must be finite and >= 0")
        if any(not (v > 0 and math.isfinite(v)) for v in self.separations):
            raise ConfigError(f"[{where}] separations: must be positive")
        if not (self.L0_hat > 0 and math.isfinite(self.L0_hat)):
            raise ConfigError(f"[{where}] L0_hat: must be positive, got {self.L0_hat}")
        if self.points < 3:
            raise ConfigError(f"[{where}] points: minimum is 3, got {self.points}")
        if not 0.0 < self.z_min < self.z_max < 1.0:
            raise ConfigError(f"[{where}] z_min/z_max: need 0 < z_min < z_max < 1")
        if self.eta_mode not in ("pointwise", "fixed"):
            raise ConfigError(f"[{where}] eta_mode: must be 'pointwise' or 'fixed'")
        if not 0.0 < self.fixed_z < 1.0:
            raise ConfigError(f"[{where}] fixed_z: must lie in (0, 1)")


@dataclass(frozen=True)
class DeviceConfig:
    """Cantilever in SI units; ``omega_p`` in rad/s (derived from L0_hat if absent)."""

    E: float
    w: float
    t: float
    l: float
    L0: float
    A: float | None = None
    omega_p: float | None = None


@dataclass(frozen=True)
class OutputConfig:
    format: str = "csv"
    path: str | None = None


@dataclass(frozen=True)
class RunConfig:
    material: MaterialSpec = field(default_factory=MaterialSpec)
    quadrature: QuadratureConfig = field(default_factory=QuadratureConfig)
    sweep: SweepConfig = field(default_factory=SweepConfig)
    device: DeviceConfig | None = None
    output: OutputConfig = field(default_factory=OutputConfig)

    def as_dict(self) -> dict:
        out = {
            "material": self.material.as_dict(),
            "quadrature": self.quadrature.as_dict(),
            "sweep": {
                f.name: _plain(getattr(self.sweep, f.name))
                for f in fields(SweepConfig)
                if getattr(self.sweep, f.name) is not None
            },
        }
        if self.device is not None:
            out["device"] = {
                f.name: getattr(self.device, f.name)
                for f in fields(DeviceConfig)
                if getattr(self.device, f.name) is not None
            }
        return out


def _plain(value):
    return list(value) if isinstance(value, tuple) else value


def _float_list(text):
    if isinstance(text, (list, tuple)):
        return tuple(float(v) for v in text)
    parts = [p.strip() for p in str(text).split(",") if p.strip()]
    return tuple(float(p) for p in parts)


def _bool(text):
    if isinstance(text, bool):
        return text
    lowered = str(text).strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


_MATERIAL_KEYS = {"model": str, "eps_L": float, "gamma_hat": float, "omega_c_hat": float}
_QUAD_KEYS = {"rel_tol": float, "abs_tol": float, "max_depth": int}
_SWEEP_KEYS = {
    "fields": _float_list,
    "separations": _float_list,
    "L0_hat": float,
    "points": int,
    "z_min": float,
    "z_max": float,
    "eta_mode": str,
    "fixed_z": float,
    "reference": _bool,
}
_DEVICE_KEYS = {k: float for k in ("E", "w", "t", "l", "L0", "A", "omega_p")}
_OUTPUT_KEYS = {"format": str, "path": str}

SECTIONS = {
    "material": _MATERIAL_KEYS,
    "quadrature": _QUAD_KEYS,
    "sweep": _SWEEP_KEYS,
    "device": _DEVICE_KEYS,
    "output": _OUTPUT_KEYS,
}


def _key_line(text: str, section: str, key: str) -> int | None:
    current = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1].strip()
        elif current == section and line.split("=", 1)[0].strip() == key:
            return lineno
    return None


def _convert(sections: dict, source: str, locate=lambda s, k: None) -> dict:
    """Type-check raw section dicts against the schema."""
    out = {}
    for section, values in sections.items():
        if section not in SECTIONS:
            raise ConfigError(f"{source}: unknown section [{section}]")
        schema = SECTIONS[section]
        typed = {}
        for key, raw in values.items():
            where = f"{source}: [{section}] {key}"
            line = locate(section, key)
            if line is not None:
                where = f"{source}:{line}: [{section}] {key}"
            if key not in schema:
                raise ConfigError(f"{where}: unknown key")
            try:
                typed[key] = schema[key](raw)
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"{where}: {exc}") from None
        out[section] = typed
    return out


def parse_text(text: str, source: str = "<config>") -> dict:
    parser = configparser.ConfigParser(
        interpolation=None, comment_prefixes=("#",), inline_comment_prefixes=("#",)
    )
    parser.optionxform = str  # keys are case sensitive (eps_L, L0_hat)
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc}") from None
    raw = {s: dict(parser.items(s)) for s in parser.sections()}
    return _convert(raw, source, lambda s, k: _key_line(text, s, k))


def parse_json(text: str, source: str = "<config>") -> dict:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{source}: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"{source}: top level must be an object")
    if "config" in data:
        data = data["config"]
    for section, values in data.items():
        if not isinstance(values, dict):
            raise ConfigError(f"{source}: [{section}] must be an object")
    return _convert(data, source)


def load(path: str | Path) -> dict:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror}") from None
    if path.suffix == ".json" or text.lstrip().startswith("{"):
        return parse_json(text, str(path))
    return parse_text(text, str(path))


def build(overrides: dict, base: RunConfig | None = None) -> RunConfig:
    """Apply typed section overrides on top of ``base`` (defaults if None)."""
    cfg = base or RunConfig()
    try:
        material = cfg.material
        if overrides.get("material"):
            merged = {**material.as_dict(), **overrides["material"]}
            material = MaterialSpec(**merged)
        quad = cfg.quadrature
        if overrides.get("quadrature"):
            quad = replace(quad, **overrides["quadrature"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    sweep = replace(cfg.sweep, **overrides.get("sweep", {}))
    sweep.validate()
    device = cfg.device
    if overrides.get("device"):
        values = {**({} if device is None else device.__dict__), **overrides["device"]}
        missing = [k for k in ("E", "w", "t", "l", "L0") if values.get(k) is None]
        if missing:
            raise ConfigError(f"[device] missing keys: {', '.join(missing)}")
        device = DeviceConfig(**values)
    output = replace(cfg.output, **overrides.get("output", {}))
    if output.format not in ("csv", "json"):
        raise ConfigError(f"[output] format: must be csv or json, got {output.format!r}")
    return RunConfig(material, quad, sweep, device, output)
