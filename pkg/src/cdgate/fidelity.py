"""Average gate fidelity against the ideal ZZ rotation."""

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize


@dataclass(frozen=True)
class IdealGate:
    angle: float = math.pi / 2

    @property
    def matrix(self) -> np.ndarray:
        ph = np.exp(1j * self.angle)
        return np.diag([1.0, ph, ph, 1.0])


def average_gate_fidelity(U: np.ndarray, ideal: IdealGate = IdealGate()) -> float:
    """``(|tr(R^dag U)|^2 + tr(U U^dag)) / 20`` for a 4x4 gate matrix."""
    U = np.asarray(U)
    R = ideal.matrix
    overlap = np.trace(R.conj().T @ U)
    value = (abs(overlap) ** 2 + np.trace(U @ U.conj().T).real) / 20.0
    if value > 1.0 + 1e-6:
        warnings.warn(
            f"average gate fidelity {value:.8f} exceeds 1; the basis is not normalised",
            RuntimeWarning,
            stacklevel=2,
        )
    return float(value)


def virtual_z_fidelity(U: np.ndarray, ideal: IdealGate = IdealGate()) -> tuple[float, tuple]:
    """Fidelity after the best single-qubit Z corrections.

    Diagnostic only: the returned phases ``(phi_1, phi_2)`` are applied as
    ``diag(1, e^{i phi}) `` on each qubit after the gate.
    """
    U = np.asarray(U)

    def corrected(phases):
        z1 = np.array([1.0, np.exp(1j * phases[0])])
        z2 = np.array([1.0, np.exp(1j * phases[1])])
        return np.kron(z1, z2)[:, None] * U

    best = None
    for start in ((0.0, 0.0), (math.pi / 2, math.pi / 2), (-math.pi / 2, -math.pi / 2), (math.pi, math.pi)):
        res = minimize(lambda p: -average_gate_fidelity(corrected(p), ideal), start, method="Nelder-Mead",
                       options=dict(xatol=1e-10, fatol=1e-14))
        if best is None or res.fun < best.fun:
            best = res
    return float(-best.fun), tuple(float(x) for x in best.x)
