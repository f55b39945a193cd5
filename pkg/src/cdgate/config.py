"""JSON run configuration.

Frequencies are plain Hz, angles radians, gate times ns and the integrator
step seconds.  Everything is converted to rad/s and seconds exactly once, in
:meth:`RunConfig.setup`.
"""

import json
import math
from dataclasses import asdict, dataclass, field, fields
from typing import Optional

from .circuit import REFERENCE_PUMP_OVER_KERR, REFERENCE_PUMP_TRIMS, REFERENCE_TARGETS, CircuitParams, derive_circuit_params
from .experiment import MODEL_KINDS, Flags, GateSetup
from .units import NS, hz_to_angular

EXPERIMENTS = ("simulate", "optimize", "sweep", "trace", "verify-static", "basis-report")
PRESETS = ("reference",)


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending field."""


def _hz(x):
    return x / (2.0 * math.pi)


@dataclass
class CircuitConfig:
    """Circuit design targets.  ``preset`` fills every field left as ``None``."""

    preset: Optional[str] = "reference"
    omega_1_hz: Optional[float] = None
    omega_2_hz: Optional[float] = None
    E_C1_hz: Optional[float] = None
    E_C2_hz: Optional[float] = None
    theta_0: Optional[float] = None
    squid_count: Optional[int] = None
    g_hz: Optional[float] = None

    def resolved(self) -> dict:
        if self.preset is not None and self.preset not in PRESETS:
            raise ConfigError(f"circuit.preset: unknown preset {self.preset!r} (known: {PRESETS})")
        base = {}
        if self.preset == "reference":
            t = REFERENCE_TARGETS
            base = dict(
                omega_1_hz=_hz(t["omega_1"]), omega_2_hz=_hz(t["omega_2"]),
                E_C1_hz=_hz(t["E_C1"]), E_C2_hz=_hz(t["E_C2"]), theta_0=t["theta_0"],
                squid_count=t["squid_count"], g_hz=_hz(t["g_target"]),
            )
        out = {}
        for f in fields(self):
            if f.name == "preset":
                continue
            value = getattr(self, f.name)
            if value is None:
                value = base.get(f.name)
            if value is None:
                raise ConfigError(f"circuit.{f.name}: required when no preset is given")
            out[f.name] = value
        return out

    def params(self) -> CircuitParams:
        r = self.resolved()
        if not isinstance(r["squid_count"], int) or r["squid_count"] < 1:
            raise ConfigError("circuit.squid_count: must be a positive integer")
        if not 0 < r["theta_0"] < math.pi / 2:
            raise ConfigError("circuit.theta_0: must lie in (0, pi/2)")
        try:
            return derive_circuit_params(
                hz_to_angular(r["omega_1_hz"]), hz_to_angular(r["omega_2_hz"]),
                hz_to_angular(r["E_C1_hz"]), hz_to_angular(r["E_C2_hz"]),
                r["theta_0"], r["squid_count"], hz_to_angular(r["g_hz"]),
            )
        except ValueError as exc:
            raise ConfigError(f"circuit: {exc}") from exc


@dataclass
class ExperimentConfig:
    """Per-experiment settings; fields irrelevant to ``kind`` are ignored."""

    kind: str = "simulate"
    T_g_ns: list = field(default_factory=lambda: [25.0])
    flags: list = field(default_factory=lambda: ["pulse"])
    A: Optional[list] = None
    B: Optional[list] = None
    C: Optional[list] = None
    init: Optional[str] = None
    state_index: int = 0
    sample_ns: float = 0.1
    reference_T_g_ns: float = 25.0
    max_iterations: int = 200

    def validate(self, N_f: int) -> None:
        if self.kind not in EXPERIMENTS:
            raise ConfigError(f"experiment.kind: must be one of {EXPERIMENTS}, got {self.kind!r}")
        if not isinstance(self.T_g_ns, list) or not self.T_g_ns:
            raise ConfigError("experiment.T_g_ns: must be a non-empty list of gate times in ns")
        for k, T in enumerate(self.T_g_ns):
            if not isinstance(T, (int, float)) or not T > 0:
                raise ConfigError(f"experiment.T_g_ns[{k}]: gate time must be positive, got {T!r}")
        if not isinstance(self.flags, list) or not self.flags:
            raise ConfigError("experiment.flags: must be a non-empty list such as [\"pulse\", \"canc\", \"sta+canc\"]")
        for k, label in enumerate(self.flags):
            try:
                Flags.parse(label)
            except (ValueError, AttributeError) as exc:
                raise ConfigError(f"experiment.flags[{k}]: {exc}") from exc
        for name in ("A", "B", "C"):
            value = getattr(self, name)
            if value is not None:
                if not isinstance(value, list) or len(value) != N_f:
                    raise ConfigError(f"experiment.{name}: must be a list of N_f={N_f} angles in rad")
                if any(not isinstance(v, (int, float)) or not math.isfinite(v) for v in value):
                    raise ConfigError(f"experiment.{name}: entries must be finite numbers")
        if self.state_index not in (0, 1, 2, 3):
            raise ConfigError("experiment.state_index: must be 0..3")
        if not self.sample_ns > 0:
            raise ConfigError("experiment.sample_ns: must be positive")
        if not isinstance(self.max_iterations, int) or self.max_iterations < 1:
            raise ConfigError("experiment.max_iterations: must be a positive integer")
        if not self.reference_T_g_ns > 0:
            raise ConfigError("experiment.reference_T_g_ns: must be positive")

    @property
    def gate_times(self) -> list:
        return [float(T) * NS for T in self.T_g_ns]

    @property
    def flag_sets(self) -> list:
        return [Flags.parse(s) for s in self.flags]


@dataclass
class RunConfig:
    circuit: CircuitConfig = field(default_factory=CircuitConfig)
    model: str = "rwa"
    truncation: int = 20
    dt: Optional[float] = None
    frame: str = "auto"
    pump_over_kerr: float = REFERENCE_PUMP_OVER_KERR
    pump_trims_hz: list = field(default_factory=lambda: [_hz(x) for x in REFERENCE_PUMP_TRIMS])
    N_f: int = 2
    workers: int = 1
    max_leakage: float = 1e-6
    experiment: ExperimentConfig = field(default_factory=ExperimentConfig)

    def validate(self) -> "RunConfig":
        if self.model not in MODEL_KINDS:
            raise ConfigError(f"model: must be one of {MODEL_KINDS}, got {self.model!r}")
        if not isinstance(self.truncation, int) or self.truncation < 2:
            raise ConfigError("truncation: must be an integer photon cutoff >= 2")
        if self.dt is not None and not (isinstance(self.dt, (int, float)) and self.dt > 0):
            raise ConfigError("dt: must be a positive step in seconds or null")
        if self.frame not in ("auto", "pump", "normal"):
            raise ConfigError("frame: must be 'auto', 'pump' or 'normal'")
        if not self.pump_over_kerr > 0:
            raise ConfigError("pump_over_kerr: must be positive")
        if not isinstance(self.pump_trims_hz, list) or len(self.pump_trims_hz) != 2:
            raise ConfigError("pump_trims_hz: must be a list of two frequencies in Hz")
        if not isinstance(self.N_f, int) or self.N_f < 1:
            raise ConfigError("N_f: must be a positive integer")
        if not isinstance(self.workers, int) or self.workers < 1:
            raise ConfigError("workers: must be a positive integer")
        if not 0 < self.max_leakage < 1:
            raise ConfigError("max_leakage: must lie in (0, 1)")
        self.circuit.resolved()
        self.experiment.validate(self.N_f)
        return self

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        if not isinstance(data, dict):
            raise ConfigError("top level: expected a JSON object")
        data = dict(data)
        try:
            circuit = CircuitConfig(**data.pop("circuit", {}))
        except TypeError as exc:
            raise ConfigError(f"circuit: {exc}") from exc
        try:
            experiment = ExperimentConfig(**data.pop("experiment", {}))
        except TypeError as exc:
            raise ConfigError(f"experiment: {exc}") from exc
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"top level: unknown field(s) {sorted(unknown)}")
        return cls(circuit=circuit, experiment=experiment, **data).validate()

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
        return cls.from_dict(data)

    @classmethod
    def load(cls, path) -> "RunConfig":
        try:
            with open(path) as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
        return cls.from_json(text)

    def setup(self) -> GateSetup:
        return GateSetup(
            params=self.circuit.params(),
            model=self.model,
            dim=self.truncation + 1,
            dt=self.dt,
            P_over_K=self.pump_over_kerr,
            pump_trims=tuple(hz_to_angular(f) for f in self.pump_trims_hz),
            frame=self.frame,
            N_f=self.N_f,
            max_leakage=self.max_leakage,
        )
