"""Run configuration: a small TOML document with flat sections.

Example (every key optional, defaults shown)::

    mode = "direct"            # or "circuit"

    [spec]
    omega2 = 5.0               # units of Omega
    lambda = 4.0               # anharmonicity of the primary device
    g_ratio = 0.01             # g / omega1
    alpha_ratio = 0.01         # bath coupling / g

    [baths]
    T_S = 2.0                  # units of Omega
    T_D = 0.2
    Q = 100.0
    R = 1.0

    [sweep]
    T_M_min = 0.05
    T_M_max = 1.0
    points = 200
    lambdas = [1.0, 2.0, 3.0, 4.0]

    [output]
    csv = ""                   # empty: stdout
    svg = ""                   # empty: no plot
    precision = 12             # significant digits in the CSV

    [circuit]                  # circuit mode only
    C1 = ...                   # C1 C2 C3 Cg1 Cg2 L2 EJ3 required, EJ1 optional

In circuit mode the device is derived from the lumped elements, Omega is set
to omega2 / 5 and the sweep covers that single device. Without ``EJ1`` the
qubit junction is solved for exact resonance with the qutrit.
"""
from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .circuit import (
    RawCircuitParams,
    derive_device_params,
    dispersive_coupling,
    solve_josephson_for_target,
    transmon_levels,
)
from .errors import NumericalError, ParseError, ValidationError
from .spectrum import TransistorSpec
from .thermo import OperatingConditions

MODES = ("direct", "circuit")

_SCHEMA = {
    "spec": {"omega2": float, "lambda": float, "g_ratio": float, "alpha_ratio": float},
    "baths": {"T_S": float, "T_D": float, "Q": float, "R": float},
    "sweep": {"T_M_min": float, "T_M_max": float, "points": int, "lambdas": list},
    "output": {"csv": str, "svg": str, "precision": int},
    "circuit": {k: float for k in ("C1", "C2", "C3", "Cg1", "Cg2", "L2", "EJ1", "EJ3")},
}
# config key -> RunConfig attribute where they differ
_ATTR = {"lambda": "lam", "csv": "csv_path", "svg": "svg_path"}
_CIRCUIT_REQUIRED = ("C1", "C2", "C3", "Cg1", "Cg2", "L2", "EJ3")


@dataclass(frozen=True)
class RunConfig:
    mode: str = "direct"
    # spec
    omega2: float = 5.0
    lam: float = 4.0
    g_ratio: float = 0.01
    alpha_ratio: float = 0.01
    # baths
    T_S: float = 2.0
    T_D: float = 0.2
    Q: float = 100.0
    R: float = 1.0
    # sweep
    T_M_min: float = 0.05
    T_M_max: float = 1.0
    points: int = 200
    lambdas: tuple[float, ...] = (1.0, 2.0, 3.0, 4.0)
    # output
    csv_path: str = ""
    svg_path: str = ""
    precision: int = 12
    # circuit mode
    circuit: dict = field(default_factory=dict)

    def conditions(self) -> OperatingConditions:
        return OperatingConditions(
            T_S=self.T_S, T_D=self.T_D, Q=self.Q, R=self.R, alpha_ratio=self.alpha_ratio
        )

    def T_M_grid(self):
        import numpy as np

        if self.points == 1:
            return np.array([self.T_M_min])
        return np.linspace(self.T_M_min, self.T_M_max, self.points)

    def device(self, lam: float | None = None) -> TransistorSpec:
        """Transistor spec for anharmonicity ``lam`` (direct) or from the circuit."""
        if self.mode == "circuit":
            return circuit_spec(self.raw_circuit())
        lam = self.lam if lam is None else lam
        return TransistorSpec.from_anharmonicity(lam, omega2=self.omega2, g_ratio=self.g_ratio)

    def devices(self) -> list[tuple[float, TransistorSpec]]:
        if self.mode == "circuit":
            spec = self.device()
            return [(spec.anharmonicity, spec)]
        return [(lam, self.device(lam)) for lam in self.lambdas]

    def raw_circuit(self) -> RawCircuitParams:
        values = dict(self.circuit)
        if "EJ1" not in values:
            # EJ1 does not enter the qutrit levels, so any placeholder works here
            probe = RawCircuitParams(**values, EJ1=1.0)
            dp = derive_device_params(probe, regime_threshold=math.inf, dispersive_threshold=math.inf)
            _, w2, w3 = transmon_levels(dp)
            values["EJ1"] = solve_josephson_for_target(w3 - w2, dp.EC1)
        return RawCircuitParams(**values)


def circuit_spec(raw: RawCircuitParams) -> TransistorSpec:
    dp = derive_device_params(raw)
    levels = transmon_levels(dp)
    g = dispersive_coupling(dp, levels)
    w1, w2, w3 = levels
    return TransistorSpec.from_levels(w1, w2, w3, g, Omega=w2 / 5.0)


def _positive(name, value):
    if not (value > 0 and math.isfinite(value)):
        raise ValidationError(f"{name} must be positive and finite, got {value!r}")


def validate(cfg: RunConfig) -> RunConfig:
    """Check every invariant; return ``cfg`` unchanged on success."""
    if cfg.mode not in MODES:
        raise ValidationError(f"mode must be one of {MODES}, got {cfg.mode!r}")
    for name in ("omega2", "g_ratio", "alpha_ratio", "T_S", "T_D", "Q", "R", "T_M_min", "T_M_max"):
        _positive(name, getattr(cfg, name))
    if cfg.g_ratio >= 0.1:
        raise ValidationError("g_ratio must be below 0.1 (dispersive swap coupling)")
    if cfg.alpha_ratio >= 0.1:
        raise ValidationError("alpha_ratio must be below 0.1 (weak bath coupling)")
    if cfg.points < 1:
        raise ValidationError("points must be at least 1")
    if cfg.points > 1 and not cfg.T_M_min < cfg.T_M_max:
        raise ValidationError("T_M_min must be below T_M_max")
    if not 1 <= cfg.precision <= 17:
        raise ValidationError("precision must lie in 1..17")
    if cfg.mode == "direct":
        if not cfg.lambdas:
            raise ValidationError("lambdas must not be empty")
        for lam in (cfg.lam, *cfg.lambdas):
            if not (math.isfinite(lam) and 0 <= lam and 10 - lam > cfg.omega2):
                raise ValidationError(
                    f"lambda = {lam!r} needs 0 <= lambda < {10 - cfg.omega2:g} so that omega1 > 0"
                )
        if len(set(cfg.lambdas)) != len(cfg.lambdas):
            raise ValidationError("lambdas must be distinct")
    else:
        missing = [k for k in _CIRCUIT_REQUIRED if k not in cfg.circuit]
        if missing:
            raise ValidationError(f"circuit mode needs {', '.join(missing)}")
        for k, v in cfg.circuit.items():
            _positive(f"circuit.{k}", v)
        try:
            cfg.device()
        except (NumericalError, ValueError) as exc:
            raise ValidationError(f"circuit parameters fail the regime checks: {exc}") from exc
    return cfg


def _line_of(text: str, section: str | None, key: str) -> int | None:
    current = None
    for n, line in enumerate(text.splitlines(), 1):
        s = line.strip()
        if s.startswith("[") and s.endswith("]"):
            current = s[1:-1].strip()
        elif current == section and s.split("=", 1)[0].strip() == key:
            return n
    return None


def _coerce(section, key, value, expected, text):
    where = f"{section}.{key}" if section else key
    line = _line_of(text, section, key)
    loc = f" (line {line})" if line else ""
    if expected is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ParseError(f"{where}{loc}: expected a number, got {value!r}")
        return float(value)
    if expected is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ParseError(f"{where}{loc}: expected an integer, got {value!r}")
        return value
    if expected is str:
        if not isinstance(value, str):
            raise ParseError(f"{where}{loc}: expected a string, got {value!r}")
        return value
    if not isinstance(value, list) or any(
        isinstance(v, bool) or not isinstance(v, (int, float)) for v in value
    ):
        raise ParseError(f"{where}{loc}: expected a list of numbers, got {value!r}")
    return tuple(float(v) for v in value)


def parse_config(text: str) -> RunConfig:
    """Parse and validate a configuration document.

    Raises
    ------
    ParseError
        Malformed TOML, unknown sections or keys, or wrongly typed values.
    ValidationError
        A value is well formed but violates a physical invariant.
    """
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ParseError(str(exc)) from exc

    kwargs = {}
    circuit = {}
    for key, value in doc.items():
        if key == "mode":
            if not isinstance(value, str):
                raise ParseError(f"mode (line {_line_of(text, None, 'mode')}): expected a string")
            kwargs["mode"] = value
            continue
        if key not in _SCHEMA:
            raise ParseError(f"unknown key or section {key!r} (line {_line_of(text, None, key) or '?'})")
        if not isinstance(value, dict):
            raise ParseError(f"{key!r} must be a section")
        schema = _SCHEMA[key]
        for sub, v in value.items():
            if sub not in schema:
                line = _line_of(text, key, sub)
                raise ParseError(f"unknown key {key}.{sub}" + (f" (line {line})" if line else ""))
            v = _coerce(key, sub, v, schema[sub], text)
            if key == "circuit":
                circuit[sub] = v
            else:
                kwargs[_ATTR.get(sub, sub)] = v
    if circuit:
        kwargs["circuit"] = circuit
    return validate(RunConfig(**kwargs))


def _fmt(value) -> str:
    if isinstance(value, str):
        return '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(value, tuple):
        return "[" + ", ".join(_fmt(v) for v in value) + "]"
    return repr(value)


def serialize_config(cfg: RunConfig) -> str:
    """Inverse of :func:`parse_config`; floats use ``repr`` so they round-trip."""
    out = [f"mode = {_fmt(cfg.mode)}"]
    for section, keys in _SCHEMA.items():
        if section == "circuit":
            continue
        out.append("")
        out.append(f"[{section}]")
        for key in keys:
            out.append(f"{key} = {_fmt(getattr(cfg, _ATTR.get(key, key)))}")
    if cfg.circuit:
        out.append("")
        out.append("[circuit]")
        for key in _SCHEMA["circuit"]:
            if key in cfg.circuit:
                out.append(f"{key} = {_fmt(cfg.circuit[key])}")
    return "\n".join(out) + "\n"


def load_config(path) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    return parse_config(text)


__all__ = [
    "RunConfig",
    "circuit_spec",
    "load_config",
    "parse_config",
    "serialize_config",
    "validate",
]
