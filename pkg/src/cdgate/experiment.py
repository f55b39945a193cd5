"""One-stop assembly of a gate simulation: parameters, model, basis and frame."""

import math
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import NamedTuple, Optional, Sequence

import numpy as np
from scipy.optimize import minimize

from .basis import ComputationalBasis, computational_basis_for
from .circuit import (
    REFERENCE_PUMP_OVER_KERR,
    REFERENCE_PUMP_TRIMS,
    CircuitModel,
    CircuitParams,
    Eigenfrequencies,
    eigenfrequencies,
    reference_params,
)
from .propagate import GateMatrix, PhotonTrace, photon_trace, run_gate
from .pulses import PulseProgram
from .rwa import RwaModel, RwaParams, kpo_targets_to_amplitudes, rwa_params
from .static import StaticModel

MODEL_KINDS = ("circuit", "rwa", "static")


class Flags(NamedTuple):
    sta: bool = False
    cancellation: bool = False

    @property
    def label(self) -> str:
        parts = [name for name, on in (("sta", self.sta), ("canc", self.cancellation)) if on]
        return "+".join(parts) if parts else "pulse"

    @classmethod
    def parse(cls, label: str) -> "Flags":
        label = label.strip().lower()
        if label in ("pulse", "none", ""):
            return cls()
        parts = set(label.replace(" ", "").split("+"))
        unknown = parts - {"sta", "canc"}
        if unknown:
            raise ValueError(f"unknown flag(s) {sorted(unknown)} in {label!r}")
        return cls(sta="sta" in parts, cancellation="canc" in parts)


PULSE_ALONE = Flags()
WITH_CANCELLATION = Flags(cancellation=True)
WITH_STA = Flags(sta=True)
WITH_BOTH = Flags(sta=True, cancellation=True)


@dataclass(frozen=True)
class GateSetup:
    """Everything needed to evaluate a gate except the pulse coefficients.

    ``frame="auto"`` selects the pump frame for every model.  Pumped cats lock
    to half the pump frequency, so this is the frame in which an idle KPO is
    stationary; for the RWA and static models it coincides with their own
    rotating frame.  ``"normal"`` rotates at the dressed normal-mode
    frequencies instead.
    """

    params: CircuitParams = field(default_factory=reference_params)
    model: str = "rwa"
    dim: int = 21
    dt: Optional[float] = None
    P_over_K: float = REFERENCE_PUMP_OVER_KERR
    pump_trims: tuple = REFERENCE_PUMP_TRIMS
    frame: str = "auto"
    N_f: int = 2
    max_leakage: float = 1e-6

    def __post_init__(self):
        if self.model not in MODEL_KINDS:
            raise ValueError(f"model must be one of {MODEL_KINDS}, got {self.model!r}")
        if self.dim < 3:
            raise ValueError("gate simulations need at least 3 Fock levels per mode")
        if self.N_f < 1:
            raise ValueError("N_f must be at least 1")
        if self.frame not in ("auto", "pump", "normal"):
            raise ValueError(f"unknown frame {self.frame!r}")

    def replace(self, **kw) -> "GateSetup":
        return replace(self, **kw)

    @cached_property
    def eig(self) -> Eigenfrequencies:
        return eigenfrequencies(self.params, self.dim)

    @cached_property
    def pump_amplitudes(self) -> tuple:
        return kpo_targets_to_amplitudes(self.params, self.P_over_K)

    @property
    def frame_choice(self) -> str:
        return "pump" if self.frame == "auto" else self.frame

    def program(
        self, T_g: float, A: Sequence[float] = None, B: Sequence[float] = None,
        C: Sequence[float] = None, flags: Flags = PULSE_ALONE,
    ) -> PulseProgram:
        zero = (0.0,) * self.N_f
        e = self.eig
        d1, d2 = self.pump_amplitudes
        return PulseProgram(
            delta_1=d1,
            delta_2=d2,
            omega_p1=2.0 * e.omega_tilde_1 + self.pump_trims[0],
            omega_p2=2.0 * e.omega_tilde_2 + self.pump_trims[1],
            omega_g=e.omega_tilde_1 + e.omega_tilde_2,
            T_g=T_g,
            A=zero if A is None else tuple(A),
            B=zero if B is None else tuple(B),
            C=zero if C is None else tuple(C),
            enable_sta=flags.sta,
            enable_cancellation=flags.cancellation,
        )

    @cached_property
    def rwa(self) -> RwaParams:
        return rwa_params(self.params, self.program(1e-9), self.eig)

    @cached_property
    def basis(self) -> ComputationalBasis:
        return computational_basis_for(self.rwa, self.dim, max_leakage=self.max_leakage)

    def build_model(self, program: PulseProgram, kind: Optional[str] = None):
        kind = kind or self.model
        if kind == "circuit":
            return CircuitModel(self.params, program, self.dim, eig=self.eig)
        rwa = replace(self.rwa, gate_detuning=2.0 * self.eig.omega_tilde_1 - program.omega_g)
        if kind == "rwa":
            return RwaModel(rwa, program, self.dim)
        if kind == "static":
            return StaticModel(rwa, program, self.dim)
        raise ValueError(f"unknown model kind {kind!r}")

    def run(self, program: PulseProgram, keep_states: bool = False) -> GateMatrix:
        return run_gate(
            self.basis, self.build_model(program), frame=self.frame_choice, dt=self.dt,
            keep_states=keep_states,
        )

    def trace(self, program: PulseProgram, index: int = 0, sample_dt: float = 0.1e-9) -> PhotonTrace:
        return photon_trace(self.basis, index, self.build_model(program), sample_dt, dt=self.dt)


def model_overlaps(
    setup: GateSetup, program: PulseProgram, kinds: tuple = ("rwa", "circuit"), frame: str = "pump"
) -> np.ndarray:
    """Per-logical-state overlap ``|<psi_a|psi_b>|^2`` of two models' final states.

    Both runs are rotated into the same measurement ``frame`` so only the
    dynamics differ.  Global phases drop out of the modulus.
    """
    finals = [
        run_gate(setup.basis, setup.build_model(program, kind), frame=frame, dt=setup.dt,
                 keep_states=True).final_states
        for kind in kinds
    ]
    a, b = (f.reshape(4, -1) for f in finals)
    return np.abs(np.einsum("kn,kn->k", a.conj(), b)) ** 2


def calibrate_trims(
    setup: GateSetup, T_idle: float = 5e-9, initial: Optional[tuple] = None, maxiter: int = 40
) -> tuple[tuple, float]:
    """Pump trims that best preserve the logical states during idle evolution.

    The objective is ``1 - mean_i |U_ii|^2`` for an idle run of length
    ``T_idle`` in the chosen measurement frame.  Returns ``(trims, objective)``.
    """
    start = np.asarray(initial if initial is not None else setup.pump_trims, dtype=float)
    scale = 2.0 * math.pi * 1e6

    def loss(x):
        trial = setup.replace(pump_trims=tuple(x * scale))
        U = trial.run(trial.program(T_idle)).U
        return float(1.0 - np.mean(np.abs(np.diag(U)) ** 2))

    res = minimize(loss, start / scale, method="Nelder-Mead",
                   options=dict(maxiter=maxiter, xatol=1e-3, fatol=1e-7))
    return tuple(float(v) * scale for v in res.x), float(res.fun)
