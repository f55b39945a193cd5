"""Computational basis of the coupled cat qubits.

The linear part of the coupled system is diagonalised into normal ("b")
modes, the isolated-KPO cat states are built for the b-mode Kerr and pump
parameters, and every product coherent state ``|±b1>|±b2>`` is finally mapped
back onto the bare modes, ``|alpha_1>|alpha_2>`` with
``alpha = U~ (±b1, ±b2)``.
"""

import csv
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.special import gammaln

from .rwa import RwaParams

LABELS = ("00", "01", "10", "11")


class NormalModes(NamedTuple):
    """Hybridised modes of ``[[w1, g], [g, w2]]``.

    Column ``j`` of ``U_tilde`` is the b-mode most similar to bare mode ``j``;
    for ``w1 < w2`` that is ``(b1, b2) <-> (omega_minus, omega_plus)``.
    """

    omega_minus: float
    omega_plus: float
    U_tilde: np.ndarray
    mode_frequencies: tuple


def normal_modes(omega_1: float, omega_2: float, g: float) -> NormalModes:
    if omega_1 == omega_2 and g == 0:
        raise ValueError("degenerate uncoupled modes have no unique normal modes")
    split = math.hypot(omega_1 - omega_2, 2.0 * g)
    w_minus = 0.5 * (omega_1 + omega_2 - split)
    w_plus = 0.5 * (omega_1 + omega_2 + split)
    if g == 0:
        U = np.eye(2)
        freqs = (omega_1, omega_2)
        return NormalModes(w_minus, w_plus, U, freqs)
    # eigenvectors are proportional to (-g, omega_1 - omega_pm); eigh gives the
    # same columns without cancellation when g is tiny
    _, U = np.linalg.eigh(np.array([[omega_1, g], [g, omega_2]], dtype=float))
    if abs(U[0, 0]) < abs(U[0, 1]):
        U = U[:, ::-1]
        freqs = (w_plus, w_minus)
    else:
        freqs = (w_minus, w_plus)
    # the normalisation constants are free in sign; make the diagonal positive
    U = U * np.sign(np.diag(U))
    return NormalModes(w_minus, w_plus, U, freqs)


@dataclass(frozen=True)
class BModeParams:
    K_1b: float
    K_2b: float
    K_12b: float
    P_1b: float
    P_2b: float
    beta_1: float
    beta_2: float
    beta_approx: tuple

    @property
    def beta(self) -> tuple[float, float]:
        return self.beta_1, self.beta_2


def b_mode_params(modes: NormalModes, rwa: RwaParams) -> BModeParams:
    U = modes.U_tilde
    K = (rwa.K_1, rwa.K_2)
    P = (rwa.P_1, rwa.P_2)
    Kb = [K[0] * U[0, j] ** 4 + K[1] * U[1, j] ** 4 for j in range(2)]
    if min(Kb) <= 0:
        raise ValueError("non-positive b-mode Kerr coefficient; check the Kerr inputs")
    Pb = [P[j] * U[j, j] ** 2 for j in range(2)]
    K12 = 2.0 * (K[0] * U[0, 0] ** 2 * U[0, 1] ** 2 + K[1] * U[1, 0] ** 2 * U[1, 1] ** 2)
    beta = [math.sqrt(Pb[j] / Kb[j]) for j in range(2)]
    alpha = rwa.alpha
    approx = tuple(alpha[j] / abs(U[j, j]) for j in range(2))
    return BModeParams(Kb[0], Kb[1], K12, Pb[0], Pb[1], beta[0], beta[1], approx)


def coherent_state(alpha: complex, dim: int, max_leakage: float = 1e-6) -> np.ndarray:
    """Truncated coherent state renormalised to unit norm.

    Raises if the weight lost to truncation exceeds ``max_leakage``.
    """
    m = np.arange(dim)
    r = abs(alpha)
    if r == 0:
        v = np.zeros(dim, dtype=complex)
        v[0] = 1.0
        return v
    alpha = complex(alpha)
    log_amp = -0.5 * r * r + m * math.log(r) - 0.5 * gammaln(m + 1)
    powers = np.cumprod(np.r_[1.0 + 0j, np.full(dim - 1, alpha / r)])
    v = np.exp(log_amp) * powers
    leakage = 1.0 - float(np.vdot(v, v).real)
    if leakage > max_leakage:
        raise ValueError(
            f"coherent state |{alpha}> loses {leakage:.2e} of its weight at dim={dim}"
        )
    return v / np.linalg.norm(v)


def qubit_amplitudes(beta: float) -> np.ndarray:
    """Weights of ``|+beta>`` and ``|-beta>`` in the qubit states.

    Row ``i`` is logical ``i``; columns are the coherent-state signs ``(+, -)``.
    """
    ov = math.exp(-2.0 * beta * beta)
    inv_p = 1.0 / math.sqrt(2.0 + 2.0 * ov)
    inv_m = 1.0 / math.sqrt(2.0 - 2.0 * ov)
    s = 1.0 / math.sqrt(2.0)
    return s * np.array([[inv_p + inv_m, inv_p - inv_m], [inv_p - inv_m, inv_p + inv_m]])


@dataclass(frozen=True)
class ComputationalBasis:
    """Four logical states in bare-mode Fock representation ``(4, d, d)``."""

    states: np.ndarray
    gram: np.ndarray
    modes: NormalModes
    bparams: BModeParams

    @property
    def dim(self) -> int:
        return self.states.shape[-1]

    @property
    def gram_deviation(self) -> float:
        return float(np.abs(self.gram - np.eye(4)).max())

    def vectors(self) -> np.ndarray:
        """States as rows of a ``(4, d**2)`` matrix (mode-1-major)."""
        return self.states.reshape(4, -1)


def computational_basis(
    bparams: BModeParams,
    modes: NormalModes,
    dim: int,
    orthonormalize: bool = False,
    max_gram_deviation: float = 0.05,
    max_leakage: float = 1e-6,
) -> ComputationalBasis:
    """Logical two-qubit basis ``|00>, |01>, |10>, |11>`` on the bare modes."""
    U = modes.U_tilde
    b1, b2 = bparams.beta
    q1, q2 = qubit_amplitudes(b1), qubit_amplitudes(b2)
    states = np.zeros((4, dim, dim), dtype=complex)
    for s1_idx, s1 in enumerate((1.0, -1.0)):
        for s2_idx, s2 in enumerate((1.0, -1.0)):
            a1 = s1 * U[0, 0] * b1 + s2 * U[0, 1] * b2
            a2 = s1 * U[1, 0] * b1 + s2 * U[1, 1] * b2
            product = np.outer(
                coherent_state(a1, dim, max_leakage), coherent_state(a2, dim, max_leakage)
            )
            for i in range(2):
                for j in range(2):
                    states[2 * i + j] += q1[i, s1_idx] * q2[j, s2_idx] * product
    if orthonormalize:
        flat = states.reshape(4, -1)
        S = flat.conj() @ flat.T
        evals, evecs = np.linalg.eigh(S)
        inv_sqrt = (evecs / np.sqrt(evals)) @ evecs.conj().T
        states = (inv_sqrt.T @ flat).reshape(4, dim, dim)
    flat = states.reshape(4, -1)
    gram = flat.conj() @ flat.T
    deviation = float(np.abs(gram - np.eye(4)).max())
    if deviation > max_gram_deviation:
        raise ValueError(
            f"basis Gram deviation {deviation:.3g} exceeds {max_gram_deviation}; "
            "parameters are outside the cat-qubit regime"
        )
    return ComputationalBasis(states=states, gram=gram, modes=modes, bparams=bparams)


def computational_basis_for(rwa: RwaParams, dim: int, **kwargs) -> ComputationalBasis:
    """Basis for a given set of RWA coefficients (modes from ``Delta_12`` and ``g``)."""
    modes = normal_modes(rwa.Delta_12, 0.0, rwa.g)
    return computational_basis(b_mode_params(modes, rwa), modes, dim, **kwargs)


def basis_to_csv(basis: ComputationalBasis, path) -> None:
    """Write the basis amplitudes, one row per two-mode Fock state."""
    d = basis.dim
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        header = ["n1", "n2"]
        for label in LABELS:
            header += [f"re_{label}", f"im_{label}"]
        writer.writerow(header)
        for m in range(d):
            for n in range(d):
                row = [m, n]
                for k in range(4):
                    z = basis.states[k, m, n]
                    row += [repr(float(z.real)), repr(float(z.imag))]
                writer.writerow(row)
