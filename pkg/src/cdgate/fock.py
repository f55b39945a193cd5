"""Truncated Fock-space operators for one and two bosonic modes.

Two-mode states are stored as ``(dim, dim)`` arrays (row index = photon number
of mode 1, column index = photon number of mode 2), which is the mode-1-major
ordering of the flattened ``dim**2`` vector.  Operators that act on a single
mode are applied with :func:`apply_mode1` / :func:`apply_mode2` instead of
being embedded, which keeps the cost at ``dim**3`` rather than ``dim**4``.
"""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class FockOperators:
    """Single-mode operators of one Kerr parametric oscillator."""

    dim_per_mode: int
    annihilate: np.ndarray
    number: np.ndarray
    phase_op: np.ndarray
    charge_op: np.ndarray
    cos_phi_over_N: np.ndarray
    squid_count: int

    @property
    def create(self) -> np.ndarray:
        return self.annihilate.conj().T


def annihilation(dim: int) -> np.ndarray:
    """Truncated annihilation operator with ``a[m-1, m] = sqrt(m)``."""
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1).astype(complex)


def hermitian_function(op: np.ndarray, fn) -> np.ndarray:
    """Apply a scalar function to a Hermitian matrix by spectral calculus."""
    evals, evecs = np.linalg.eigh(op)
    return (evecs * fn(evals)) @ evecs.conj().T


def build_mode_operators(
    dim_per_mode: int,
    charging_energy: float,
    josephson_energy_eff: float,
    squid_count: int,
) -> FockOperators:
    """Build ladder, phase, charge and ``cos(phi/N)`` operators for one mode.

    ``cos(phi/N)`` is evaluated exactly inside the truncated space through the
    eigendecomposition of ``phi/N``; no Taylor expansion is involved.
    """
    if dim_per_mode < 1:
        raise ValueError(f"dim_per_mode must be >= 1, got {dim_per_mode}")
    if charging_energy <= 0 or josephson_energy_eff <= 0:
        raise ValueError("charging and Josephson energies must be positive")
    if squid_count < 1:
        raise ValueError(f"squid_count must be >= 1, got {squid_count}")

    a = annihilation(dim_per_mode)
    ad = a.conj().T
    n_scale = 32.0 * squid_count * charging_energy
    phi_zpf = (2.0 * squid_count * charging_energy / josephson_energy_eff) ** 0.25
    charge_zpf = (josephson_energy_eff / n_scale) ** 0.25

    phase = phi_zpf * (ad + a)
    charge = 1j * charge_zpf * (ad - a)
    cos_op = hermitian_function(phase / squid_count, np.cos)
    # remove the O(eps) anti-Hermitian residue left by the eigensolver
    cos_op = 0.5 * (cos_op + cos_op.conj().T)
    return FockOperators(
        dim_per_mode=dim_per_mode,
        annihilate=a,
        # exact integers; equals ad @ a up to the rounding of sqrt(m)**2
        number=np.diag(np.arange(dim_per_mode, dtype=float)).astype(complex),
        phase_op=phase,
        charge_op=charge,
        cos_phi_over_N=cos_op,
        squid_count=squid_count,
    )


def two_mode_embed(op: np.ndarray, mode_index: int, dim_per_mode: int) -> np.ndarray:
    """Embed a single-mode operator into the ``dim**2`` two-mode space."""
    op = np.asarray(op)
    if op.shape != (dim_per_mode, dim_per_mode):
        raise ValueError(
            f"operator has shape {op.shape}, expected ({dim_per_mode}, {dim_per_mode})"
        )
    eye = np.eye(dim_per_mode, dtype=op.dtype)
    if mode_index == 1:
        return np.kron(op, eye)
    if mode_index == 2:
        return np.kron(eye, op)
    raise ValueError(f"mode_index must be 1 or 2, got {mode_index}")


def apply_mode1(op: np.ndarray, states: np.ndarray) -> np.ndarray:
    """``(op ⊗ I) psi`` for a batch of matrix-form states ``(..., d, d)``."""
    return np.matmul(op, states)


def apply_mode2(op: np.ndarray, states: np.ndarray) -> np.ndarray:
    """``(I ⊗ op) psi`` for a batch of matrix-form states ``(..., d, d)``."""
    return np.matmul(states, op.T)


def fock_state(n1: int, n2: int, dim: int) -> np.ndarray:
    psi = np.zeros((dim, dim), dtype=complex)
    psi[n1, n2] = 1.0
    return psi


def expectation_numbers(states: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Mean photon numbers of both modes for matrix-form states ``(..., d, d)``."""
    prob = np.abs(states) ** 2
    m = np.arange(states.shape[-1])
    n1 = prob.sum(axis=-1) @ m
    n2 = prob.sum(axis=-2) @ m
    return n1, n2
