"""Rotating-wave (RWA) model of the two KPOs.

In the frame rotating at the dressed frequencies the Hamiltonian reads

    H = sum_j [D_j n_j - K_j/2 a_j^dag^2 a_j^2 + P_j/2 (a_j^dag^2 + a_j^2)]
        + p_g/2 (a1^dag^2 e^{i D12 t} + h.c.) + p_g'/(2i) (a1^dag^2 e^{i D12 t} - h.c.)
        + g (a1^dag a2 e^{i D12 t} + h.c.)

The drive-induced frequency shifts are assumed compensated (``D_j = 0``); a
cancellation flux enters as an extra detuning of KPO1.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from . import _kernels
from .circuit import CircuitParams, Eigenfrequencies, single_mode_levels
from .fock import annihilation, two_mode_embed
from .pulses import PulseProgram


@dataclass(frozen=True)
class RwaParams:
    """Coefficients of the RWA model (angular frequencies).

    ``drive_conversion`` maps a KPO1 flux amplitude to a drive strength:
    ``P_1 = drive_conversion * delta_1``, ``p_g = drive_conversion * delta_g``.
    ``gate_detuning`` is ``2 w~_1 - omega_g`` and defaults to ``Delta_12``.
    """

    Delta_1: float
    Delta_2: float
    K_1: float
    K_2: float
    P_1: float
    P_2: float
    g: float
    Delta_12: float
    drive_conversion: float
    gate_detuning: Optional[float] = None

    @property
    def gate_rate(self) -> float:
        return self.Delta_12 if self.gate_detuning is None else self.gate_detuning

    @property
    def alpha(self) -> tuple[float, float]:
        """Isolated-KPO coherent amplitudes ``sqrt(P_j / K_j)``."""
        return math.sqrt(self.P_1 / self.K_1), math.sqrt(self.P_2 / self.K_2)

    def p_g(self, t, program: PulseProgram):
        return self.drive_conversion * program.gate_envelope(t)

    def p_g_prime(self, t, program: PulseProgram):
        return self.drive_conversion * program.sta_envelope(t)

    def cancellation_shift(self, t, program: PulseProgram):
        """Detuning of KPO1 produced by the cancellation flux."""
        return 2.0 * self.drive_conversion * program.cancellation(t)


def kpo_targets_to_amplitudes(circuit: CircuitParams, P_over_K: float = 4.0) -> tuple[float, float]:
    """Pump flux amplitudes ``delta_j`` that give ``P_j = P_over_K * K_j``."""
    if not P_over_K > 0:
        raise ValueError("P_over_K must be positive")
    return tuple(P_over_K * circuit.kerr(j) / circuit.drive_conversion(j) for j in (1, 2))


def rwa_params(
    circuit: CircuitParams, program: PulseProgram, eig: Eigenfrequencies
) -> RwaParams:
    """RWA coefficients for a circuit driven by ``program``."""
    return RwaParams(
        Delta_1=0.0,
        Delta_2=0.0,
        K_1=circuit.kerr(1),
        K_2=circuit.kerr(2),
        P_1=program.delta_1 * circuit.drive_conversion(1),
        P_2=program.delta_2 * circuit.drive_conversion(2),
        g=circuit.g,
        Delta_12=eig.Delta_12,
        drive_conversion=circuit.drive_conversion(1),
        gate_detuning=2.0 * eig.omega_tilde_1 - program.omega_g,
    )


def _single_mode_rwa(dim: int, Delta: float, K: float, P: float) -> np.ndarray:
    a = annihilation(dim)
    ad = a.conj().T
    return Delta * ad @ a - 0.5 * K * ad @ ad @ a @ a + 0.5 * P * (ad @ ad + a @ a)


def build_rwa_hamiltonian(t: float, rwa: RwaParams, program: PulseProgram, ops) -> np.ndarray:
    """Dense RWA Hamiltonian at time ``t`` over the two-mode space.

    ``ops`` is a :class:`~cdgate.fock.FockOperators` (only the truncation is
    used) or an integer dimension.
    """
    dim = ops if isinstance(ops, int) else ops.dim_per_mode
    a = annihilation(dim)
    ad = a.conj().T
    shift = float(rwa.cancellation_shift(t, program))
    H = two_mode_embed(_single_mode_rwa(dim, rwa.Delta_1 + shift, rwa.K_1, rwa.P_1), 1, dim)
    H += two_mode_embed(_single_mode_rwa(dim, rwa.Delta_2, rwa.K_2, rwa.P_2), 2, dim)
    pg = float(rwa.p_g(t, program))
    pgp = float(rwa.p_g_prime(t, program))
    drive = 0.5 * (pg - 1j * pgp) * np.exp(1j * rwa.gate_rate * t)
    a1d2 = two_mode_embed(ad @ ad, 1, dim)
    H += drive * a1d2 + np.conj(drive) * a1d2.conj().T
    hop = rwa.g * np.exp(1j * rwa.Delta_12 * t) * (
        two_mode_embed(ad, 1, dim) @ two_mode_embed(a, 2, dim)
    )
    H += hop + hop.conj().T
    return H


class BandedModel:
    """Shared machinery for models whose Hamiltonian is number-basis banded."""

    default_dt = 10e-12

    def __init__(self, dim: int):
        self.dim = dim
        m = np.arange(dim, dtype=float)
        self._m = m
        self._sq = np.sqrt(m)
        self._kerr_diag = m * (m - 1.0)

    def coefficients(self, t: float):  # pragma: no cover - abstract
        raise NotImplementedError

    def to_internal(self, psi: np.ndarray, t: float) -> np.ndarray:
        return np.array(psi, dtype=complex, copy=True)

    def from_internal(self, X: np.ndarray, t: float) -> np.ndarray:
        return X

    def derivative(self, t: float, X: np.ndarray) -> np.ndarray:
        out = np.empty_like(X)
        _kernels.banded_apply(np.ascontiguousarray(X), out, *self.coefficients(t), self._sq)
        return out

    def rk4_step(self, t: float, X: np.ndarray, dt: float) -> np.ndarray:
        return _kernels.banded_rk4_step(
            X, dt, self.coefficients(t), self.coefficients(t + 0.5 * dt),
            self.coefficients(t + dt), self._sq,
        )

    def hamiltonian(self, t: float) -> np.ndarray:
        """Dense matrix of the banded Hamiltonian (for checks, not propagation)."""
        diag1, c1, diag2, c2, x, y = self.coefficients(t)
        d = self.dim
        a = annihilation(d)
        ad = a.conj().T
        A1, A2 = two_mode_embed(a, 1, d), two_mode_embed(a, 2, d)
        H = np.diag(np.add.outer(diag1, diag2).ravel()).astype(complex)
        H += c1 * A1.conj().T @ A1.conj().T + c2 * A2.conj().T @ A2.conj().T
        H += x * A1.conj().T @ A2 + y * A1.conj().T @ A2.conj().T
        upper = H - np.diag(np.diag(H))
        return np.diag(np.diag(H)) + upper + upper.conj().T

    def _bound_terms(self, diag_max, c1, c2, x, y) -> float:
        d = self.dim
        top = math.sqrt((d - 1) * max(d - 2, 0))
        return diag_max + 2 * top * (abs(c1) + abs(c2)) + 2 * (d - 1) * (abs(x) + abs(y))


class RwaModel(BandedModel):
    """Propagation source for the RWA Hamiltonian (frame of the dressed modes)."""

    kind = "rwa"

    def __init__(self, rwa: RwaParams, program: PulseProgram, dim: int = 21):
        super().__init__(dim)
        self.rwa = rwa
        self.program = program
        m = self._m
        self._diag1 = rwa.Delta_1 * m - 0.5 * rwa.K_1 * self._kerr_diag
        self._diag2 = (rwa.Delta_2 * m - 0.5 * rwa.K_2 * self._kerr_diag).astype(complex)
        self._c2 = complex(0.5 * rwa.P_2)
        # frequencies relative to mode 2's rotating frame; only differences matter
        self.frame_frequencies = (rwa.Delta_12, 0.0)
        self.mode_frequencies = (rwa.Delta_12, 0.0)
        self.pump_half_frequencies = (rwa.Delta_12, 0.0)
        self.coupling = rwa.g

    def fastest_frequency(self) -> float:
        return max(abs(self.rwa.Delta_12), abs(self.rwa.gate_rate))

    def coefficients(self, t: float):
        p, r = self.program, self.rwa
        in_window = 0.0 <= t <= p.T_g
        pg = r.drive_conversion * float(p.gate_envelope(t)) if in_window else 0.0
        pgp = r.drive_conversion * float(p.sta_envelope(t)) if in_window else 0.0
        shift = 2.0 * r.drive_conversion * float(p.cancellation(t)) if in_window else 0.0
        c1 = 0.5 * r.P_1 + 0.5 * (pg - 1j * pgp) * np.exp(1j * r.gate_rate * t)
        x = r.g * np.exp(1j * r.Delta_12 * t)
        diag1 = (self._diag1 + shift * self._m).astype(complex)
        return diag1, complex(c1), self._diag2, self._c2, complex(x), 0j

    def rate_bound(self) -> float:
        p, r = self.program, self.rwa
        d = self.dim
        diag_max = 0.5 * (r.K_1 + r.K_2) * (d - 1) * (d - 2) + (
            abs(r.Delta_1) + abs(r.Delta_2) + 2 * r.drive_conversion * p.max_cancellation()
        ) * (d - 1)
        c1 = 0.5 * (abs(r.P_1) + r.drive_conversion * p.max_drive())
        return self._bound_terms(diag_max, c1, 0.5 * abs(r.P_2), r.g, 0.0)


class RwaCrosscheck(NamedTuple):
    anharmonicity: tuple
    kerr: tuple
    relative_deviation: tuple


def crosscheck_rwa_vs_circuit(
    circuit: CircuitParams, dim: int = 21, harmonic: bool = False
) -> RwaCrosscheck:
    """Compare the circuit's numerical anharmonicity with ``K_j = E_Cj / N^2``."""
    anh, kerr, dev = [], [], []
    for j in (1, 2):
        levels = single_mode_levels(circuit, j, dim, harmonic=harmonic)
        value = levels[1] - (levels[2] - levels[1])
        K = circuit.kerr(j)
        anh.append(float(value))
        kerr.append(K)
        dev.append(abs(value - K) / K)
    return RwaCrosscheck(tuple(anh), tuple(kerr), tuple(dev))
