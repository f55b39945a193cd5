"""Lab-frame superconducting-circuit model of two capacitively coupled KPOs.

Each KPO is a shunted array of ``N`` DC-SQUIDs.  The Hamiltonian is

    H(t) = sum_j [w_j n_j - Ej~/(2N) phi_j^2] + V_cap
           - sum_j cos(theta_0 - angle_j(t)) * N E_Jj cos(phi_j / N)

with ``V_cap = 8 E_C1 E_C2 / (E_C + E_C1 + E_C2) * n_1 n_2``.  Only the two
scalar cosine prefactors depend on time, so the model is stored as fixed
matrices plus scalar coefficient functions.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .fock import FockOperators, build_mode_operators, two_mode_embed
from .pulses import PulseProgram
from .units import GHZ, MHZ


@dataclass(frozen=True)
class CircuitParams:
    """Physical parameters of the two-KPO circuit (angular frequencies)."""

    omega_1: float
    omega_2: float
    E_C1: float
    E_C2: float
    E_Ccpl: float
    E_J1: float
    E_J2: float
    theta_0: float
    squid_count: int

    def __post_init__(self):
        for name in ("omega_1", "omega_2", "E_C1", "E_C2", "E_Ccpl", "E_J1", "E_J2"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise ValueError(f"{name} must be positive and finite, got {value}")
        if not 0 < self.theta_0 < math.pi / 2:
            raise ValueError(f"theta_0 must lie in (0, pi/2), got {self.theta_0}")
        if self.squid_count < 1:
            raise ValueError("squid_count must be >= 1")
        for j in (1, 2):
            w = self.omega(j)
            target = 8.0 * self.E_C(j) * self.E_Jeff(j) / self.squid_count
            if abs(w * w - target) > 1e-12 * target:
                raise ValueError(
                    f"omega_{j}^2 != 8 E_C{j} E_Jeff{j} / N (relative mismatch "
                    f"{abs(w * w - target) / target:.3e})"
                )

    @property
    def E_Jeff1(self) -> float:
        return self.E_J1 * math.cos(self.theta_0)

    @property
    def E_Jeff2(self) -> float:
        return self.E_J2 * math.cos(self.theta_0)

    def omega(self, j: int) -> float:
        return (self.omega_1, self.omega_2)[j - 1]

    def E_C(self, j: int) -> float:
        return (self.E_C1, self.E_C2)[j - 1]

    def E_J(self, j: int) -> float:
        return (self.E_J1, self.E_J2)[j - 1]

    def E_Jeff(self, j: int) -> float:
        return self.E_J(j) * math.cos(self.theta_0)

    @property
    def coupling_prefactor(self) -> float:
        """Coefficient of ``n_1 n_2`` in the capacitive coupling."""
        return 8.0 * self.E_C1 * self.E_C2 / (self.E_Ccpl + self.E_C1 + self.E_C2)

    @property
    def g(self) -> float:
        """Beam-splitter coupling strength seen in the rotating frame."""
        return _coupling_from_capacitance(
            self.E_Ccpl, self.E_C1, self.E_C2, self.E_Jeff1, self.E_Jeff2, self.squid_count
        )

    def drive_conversion(self, j: int) -> float:
        """Pump strength per radian of flux angle, ``sqrt(Ej~ E_Cj / 2N) tan(theta_0)``."""
        return math.sqrt(self.E_Jeff(j) * self.E_C(j) / (2.0 * self.squid_count)) * math.tan(
            self.theta_0
        )

    def kerr(self, j: int) -> float:
        return self.E_C(j) / self.squid_count**2


def _coupling_factor(E_C1, E_C2, E_Jeff1, E_Jeff2, N) -> float:
    return 2.0 * E_C1 * E_C2 * (E_Jeff1 * E_Jeff2 / (4.0 * N * N * E_C1 * E_C2)) ** 0.25


def _coupling_from_capacitance(E_Ccpl, E_C1, E_C2, E_Jeff1, E_Jeff2, N) -> float:
    return _coupling_factor(E_C1, E_C2, E_Jeff1, E_Jeff2, N) / (E_Ccpl + E_C1 + E_C2)


def derive_circuit_params(
    omega_1: float,
    omega_2: float,
    E_C1: float,
    E_C2: float,
    theta_0: float,
    squid_count: int,
    g_target: float,
) -> CircuitParams:
    """Solve the Josephson and coupling-capacitor energies from design targets."""
    for name, value in (("omega_1", omega_1), ("omega_2", omega_2), ("E_C1", E_C1), ("E_C2", E_C2)):
        if not value > 0:
            raise ValueError(f"{name} must be positive, got {value}")
    if omega_1 == omega_2:
        raise ValueError("the two KPOs must be detuned (omega_1 == omega_2)")
    if not g_target > 0:
        raise ValueError("g_target must be positive; no finite coupling capacitor gives g = 0")
    N = squid_count
    E_Jeff1 = N * omega_1**2 / (8.0 * E_C1)
    E_Jeff2 = N * omega_2**2 / (8.0 * E_C2)
    E_Ccpl = _coupling_factor(E_C1, E_C2, E_Jeff1, E_Jeff2, N) / g_target - E_C1 - E_C2
    if not E_Ccpl > 0:
        raise ValueError(
            f"g_target={g_target:.4g} rad/s is too large: the coupling capacitor "
            "charging energy would be non-positive"
        )
    cos0 = math.cos(theta_0)
    return CircuitParams(
        omega_1=omega_1,
        omega_2=omega_2,
        E_C1=E_C1,
        E_C2=E_C2,
        E_Ccpl=E_Ccpl,
        E_J1=E_Jeff1 / cos0,
        E_J2=E_Jeff2 / cos0,
        theta_0=theta_0,
        squid_count=N,
    )


REFERENCE_TARGETS = dict(
    omega_1=10 * GHZ,
    omega_2=11 * GHZ,
    E_C1=300 * MHZ,
    E_C2=300 * MHZ,
    theta_0=math.pi / 4,
    squid_count=5,
    g_target=10 * MHZ,
)
REFERENCE_PUMP_TRIMS = (1.9 * MHZ, 1.7 * MHZ)
REFERENCE_PUMP_OVER_KERR = 4.0


def reference_params() -> CircuitParams:
    """Built-in reference preset: 10 and 11 GHz KPOs, g/2pi = 10 MHz."""
    return derive_circuit_params(**REFERENCE_TARGETS)


def flux_angle(t, mode: int, program: PulseProgram, params: CircuitParams):
    """Total angle subtracted from ``theta_0`` for SQUID array ``mode`` at time ``t``.

    Includes the pump, the gate pulse and STA quadrature (mode 1 only), the
    static compensation of the drive-induced frequency shift, and the
    cancellation flux (mode 1 only).
    """
    t = np.asarray(t, dtype=float)
    tan0 = math.tan(params.theta_0)
    if mode == 1:
        dg = program.gate_envelope(t)
        dgp = program.sta_envelope(t)
        modulated = (
            program.delta_1 * np.cos(program.omega_p1 * t)
            + dg * np.cos(program.omega_g * t)
            + dgp * np.sin(program.omega_g * t)
        )
        compensation = (program.delta_1**2 + dg**2 + dgp**2) / (4.0 * tan0)
        return modulated + compensation + program.cancellation(t)
    if mode == 2:
        return program.delta_2 * np.cos(program.omega_p2 * t) + program.delta_2**2 / (4.0 * tan0)
    raise ValueError(f"mode must be 1 or 2, got {mode}")


def mode_operators(params: CircuitParams, dim: int) -> tuple[FockOperators, FockOperators]:
    return tuple(
        build_mode_operators(dim, params.E_C(j), params.E_Jeff(j), params.squid_count)
        for j in (1, 2)
    )


def single_mode_static(params: CircuitParams, ops: FockOperators, j: int, harmonic=False):
    """Drive-free single-KPO Hamiltonian (dense ``dim x dim``)."""
    N = params.squid_count
    quad = ops.phase_op @ ops.phase_op
    if harmonic:
        cos_op = np.eye(ops.dim_per_mode) - quad / (2.0 * N * N)
    else:
        cos_op = ops.cos_phi_over_N
    return (
        params.omega(j) * ops.number
        - params.E_Jeff(j) / (2.0 * N) * quad
        - N * params.E_Jeff(j) * cos_op
    )


@dataclass(frozen=True)
class CircuitTerms:
    """Fixed matrices of ``H(t)`` over the two-mode space.

    ``H(t) = static - sum_j cos(theta_0 - angle_j(t)) * josephson[j]``.
    """

    params: CircuitParams
    dim: int
    static: np.ndarray
    josephson: tuple

    def hamiltonian(self, t: float, program: PulseProgram) -> np.ndarray:
        H = self.static.copy()
        for j in (1, 2):
            angle = float(flux_angle(t, j, program, self.params))
            H -= math.cos(self.params.theta_0 - angle) * self.josephson[j - 1]
        return H


def hamiltonian_terms(params: CircuitParams, ops=None, dim: int = 21) -> CircuitTerms:
    """Decompose the circuit Hamiltonian into fixed matrices."""
    if ops is None:
        ops = mode_operators(params, dim)
    d = ops[0].dim_per_mode
    if ops[1].dim_per_mode != d:
        raise ValueError("both modes must share the same truncation")
    N = params.squid_count
    static = np.zeros((d * d, d * d), dtype=complex)
    josephson = []
    for j, op in zip((1, 2), ops):
        local = params.omega(j) * op.number - params.E_Jeff(j) / (2.0 * N) * (
            op.phase_op @ op.phase_op
        )
        static += two_mode_embed(local, j, d)
        josephson.append(two_mode_embed(N * params.E_J(j) * op.cos_phi_over_N, j, d))
    static += params.coupling_prefactor * (
        two_mode_embed(ops[0].charge_op, 1, d) @ two_mode_embed(ops[1].charge_op, 2, d)
    )
    return CircuitTerms(params=params, dim=d, static=static, josephson=tuple(josephson))


class Eigenfrequencies(NamedTuple):
    omega_tilde_1: float
    omega_tilde_2: float

    @property
    def Delta_12(self) -> float:
        return self.omega_tilde_1 - self.omega_tilde_2


def static_hamiltonian(params: CircuitParams, dim: int = 21, coupling=True, harmonic=False):
    """Drive-free two-mode Hamiltonian as a dense ``dim**2`` matrix."""
    ops = mode_operators(params, dim)
    H = sum(
        two_mode_embed(single_mode_static(params, op, j, harmonic=harmonic), j, dim)
        for j, op in zip((1, 2), ops)
    )
    if coupling:
        H = H + params.coupling_prefactor * (
            two_mode_embed(ops[0].charge_op, 1, dim) @ two_mode_embed(ops[1].charge_op, 2, dim)
        )
    return H


def eigenfrequencies(
    params: CircuitParams, dim: int = 21, coupling=True, harmonic=False
) -> Eigenfrequencies:
    """Dressed 0->1 transition frequencies of both KPOs with the drives off.

    Each frequency belongs to the eigenstate with maximal overlap with the
    bare single-excitation Fock state of that mode.
    """
    H = static_hamiltonian(params, dim, coupling=coupling, harmonic=harmonic)
    evals, evecs = np.linalg.eigh(H)
    ground = evals[0]
    out = []
    for idx in (dim, 1):  # |1,0> and |0,1> in mode-1-major order
        overlaps = np.abs(evecs[idx, :]) ** 2
        k = int(np.argmax(overlaps))
        if overlaps[k] < 0.5:
            raise RuntimeError(
                "ambiguous mode identification (overlap "
                f"{overlaps[k]:.3f} < 0.5); check truncation and parameters"
            )
        out.append(evals[k] - ground)
    return Eigenfrequencies(*out)


def single_mode_levels(params: CircuitParams, j: int, dim: int = 21, harmonic=False):
    """Sorted eigenvalues of one uncoupled KPO relative to its ground state."""
    ops = build_mode_operators(dim, params.E_C(j), params.E_Jeff(j), params.squid_count)
    evals = np.linalg.eigvalsh(single_mode_static(params, ops, j, harmonic=harmonic))
    return evals - evals[0]


class CircuitModel:
    """Propagation source for the circuit Hamiltonian.

    States are integrated in the interaction picture of the drive-free,
    uncoupled single-KPO Hamiltonians.  Those are diagonalised once, which
    removes the ~10 GHz carrier from the stepper, and every remaining term
    (cosine modulation, capacitive coupling) keeps a single-mode tensor
    structure.  Identity components of the modulated Josephson operators are
    dropped: they only add a global phase shared by all states.
    """

    kind = "circuit"
    default_dt = 0.25e-12

    def __init__(
        self, params: CircuitParams, program: PulseProgram, dim: int = 21, eig: "Eigenfrequencies" = None
    ):
        self.params = params
        self.program = program
        self.dim = dim
        if eig is None:
            eig = eigenfrequencies(params, dim)
        ops = mode_operators(params, dim)
        self.ops = ops
        N = params.squid_count
        self.levels = []
        self.bases = []
        self.josephson = []
        self.charges = []
        for j, op in zip((1, 2), ops):
            h = single_mode_static(params, op, j).real
            evals, W = np.linalg.eigh(h)
            C = W.T @ (N * params.E_J(j) * op.cos_phi_over_N.real) @ W
            C -= C[0, 0] * np.eye(dim)
            self.levels.append(evals - evals[0])
            self.bases.append(W)
            self.josephson.append(np.ascontiguousarray(C))
            # n_j = i * zpf * (a^dag - a) -> real antisymmetric part times i
            self.charges.append(W.T @ op.charge_op @ W)
        self.energies = self.levels[0][:, None] + self.levels[1][None, :]
        self.kappa = params.coupling_prefactor
        self._cos0 = math.cos(params.theta_0)
        self._tan0 = math.tan(params.theta_0)
        self._n2T = np.ascontiguousarray(self.charges[1].T)
        self._C2T = np.ascontiguousarray(self.josephson[1].T)
        self.frame_frequencies = (0.0, 0.0)
        self.pump_half_frequencies = (0.5 * program.omega_p1, 0.5 * program.omega_p2)
        self.mode_frequencies = (eig.omega_tilde_1, eig.omega_tilde_2)
        self.coupling = params.g

    def fastest_frequency(self) -> float:
        p = self.program
        return max(abs(p.omega_p1), abs(p.omega_p2), abs(p.omega_g))

    def modulation(self, t: float) -> tuple[float, float]:
        """``cos(theta_0 - angle_j(t)) - cos(theta_0)`` for both modes."""
        p = self.program
        T = p.T_g
        dg = dgp = thc = 0.0
        if 0.0 <= t <= T:
            dg = float(p.gate_envelope(t))
            dgp = float(p.sta_envelope(t))
            thc = float(p.cancellation(t))
        wg = p.omega_g * t
        ang1 = (
            p.delta_1 * math.cos(p.omega_p1 * t)
            + dg * math.cos(wg)
            + dgp * math.sin(wg)
            + (p.delta_1**2 + dg * dg + dgp * dgp) / (4.0 * self._tan0)
            + thc
        )
        ang2 = p.delta_2 * math.cos(p.omega_p2 * t) + p.delta_2**2 / (4.0 * self._tan0)
        th0 = self.params.theta_0
        return math.cos(th0 - ang1) - self._cos0, math.cos(th0 - ang2) - self._cos0

    def rate_bound(self) -> float:
        p = self.program
        x1 = abs(p.delta_1) + p.max_drive() + p.max_cancellation() + (
            p.delta_1**2 + p.max_drive() ** 2
        ) / (4.0 * self._tan0)
        x2 = abs(p.delta_2) + p.delta_2**2 / (4.0 * self._tan0)
        bound = 0.0
        for x, C in zip((x1, x2), self.josephson):
            bound += x * np.linalg.norm(C, 2)
        bound += self.kappa * np.linalg.norm(self.charges[0], 2) * np.linalg.norm(self.charges[1], 2)
        return float(bound)

    def to_internal(self, psi: np.ndarray, t: float) -> np.ndarray:
        W1, W2 = self.bases
        X = np.matmul(np.matmul(W1.T, psi), W2)
        return X * np.exp(1j * self.energies * t)

    def from_internal(self, X: np.ndarray, t: float) -> np.ndarray:
        W1, W2 = self.bases
        Y = X * np.exp(-1j * self.energies * t)
        return np.matmul(np.matmul(W1, Y), W2.T)

    def derivative(self, t: float, X: np.ndarray) -> np.ndarray:
        f1, f2 = self.modulation(t)
        phase = np.exp(-1j * self.energies * t)
        Y = X * phase
        HY = (-f1) * np.matmul(self.josephson[0], Y)
        HY -= f2 * np.matmul(Y, self._C2T)
        HY += self.kappa * np.matmul(np.matmul(self.charges[0], Y), self._n2T)
        return -1j * HY * phase.conj()

    def hamiltonian(self, t: float) -> np.ndarray:
        """Dense lab-frame ``H(t)`` in the bare Fock basis."""
        return hamiltonian_terms(self.params, self.ops).hamiltonian(t, self.program)

    def dropped_scalar(self, t: float) -> float:
        """Identity component removed from ``H(t)`` relative to :meth:`hamiltonian`.

        The static single-mode ground energies are also removed.
        """
        f1, f2 = self.modulation(t)
        N = self.params.squid_count
        out = 0.0
        for j, (f, W, op) in enumerate(zip((f1, f2), self.bases, self.ops), start=1):
            h = single_mode_static(self.params, op, j).real
            c0 = (W.T @ (N * self.params.E_J(j) * op.cos_phi_over_N.real) @ W)[0, 0]
            out += np.linalg.eigvalsh(h)[0] - f * c0
        return out
