"""Static effective model obtained by averaging out the ``Delta_12`` oscillation.

Writing the RWA Hamiltonian as ``H_KPO + O_t e^{-i D12 t} + O_t^dag e^{i D12 t}``
with ``O_t = g a1 a2^dag + (p_g + i p_g')/2 a1^2``, the leading high-frequency
correction is the commutator ``[O_t^dag, O_t] / D12``:

    g^2 (n1 - n2) - g p_g (a1^dag a2^dag + a1 a2) + i g p_g' (a1^dag a2^dag - a1 a2)
    - (p_g^2 + p_g'^2)(n1 + 1/2)

The last term is the drive-induced (AC-Zeeman) shift of KPO1.
"""

from dataclasses import dataclass

import numpy as np

from .fock import annihilation, two_mode_embed
from .pulses import PulseProgram
from .rwa import BandedModel, RwaModel, RwaParams, _single_mode_rwa


@dataclass(frozen=True)
class StaticModelTerms:
    rwa: RwaParams
    program: PulseProgram
    dim: int

    def __post_init__(self):
        if self.rwa.Delta_12 == 0:
            raise ValueError("the static model requires a nonzero detuning Delta_12")

    def _ops(self):
        d = self.dim
        a = annihilation(d)
        A1, A2 = two_mode_embed(a, 1, d), two_mode_embed(a, 2, d)
        return A1, A2, A1.conj().T, A2.conj().T

    def drives(self, t: float) -> tuple[float, float]:
        return float(self.rwa.p_g(t, self.program)), float(self.rwa.p_g_prime(t, self.program))

    @property
    def H_KPO(self) -> np.ndarray:
        r, d = self.rwa, self.dim
        return two_mode_embed(_single_mode_rwa(d, r.Delta_1, r.K_1, r.P_1), 1, d) + two_mode_embed(
            _single_mode_rwa(d, r.Delta_2, r.K_2, r.P_2), 2, d
        )

    def O(self, t: float) -> np.ndarray:
        """Operator multiplying ``exp(-i D12 t)`` in the RWA Hamiltonian."""
        A1, A2, A1d, A2d = self._ops()
        pg, pgp = self.drives(t)
        return self.rwa.g * A1 @ A2d + 0.5 * (pg + 1j * pgp) * A1 @ A1

    def brute_force_commutator(self, t: float) -> np.ndarray:
        """``O^dag O - O O^dag`` by direct matrix products."""
        O = self.O(t)
        Od = O.conj().T
        return Od @ O - O @ Od

    def commutator(self, t: float) -> np.ndarray:
        """Closed-form expansion of the commutator (exact away from the cutoff)."""
        A1, A2, A1d, A2d = self._ops()
        g = self.rwa.g
        pg, pgp = self.drives(t)
        n1, n2 = A1d @ A1, A2d @ A2
        sq = A1d @ A2d
        pair = A1 @ A2
        eye = np.eye(self.dim * self.dim)
        return (
            g * g * (n1 - n2)
            - g * pg * (sq + pair)
            + 1j * g * pgp * (sq - pair)
            - (pg * pg + pgp * pgp) * (n1 + 0.5 * eye)
        )

    def commutator_over_detuning(self, t: float) -> np.ndarray:
        return self.commutator(t) / self.rwa.Delta_12


def build_static_hamiltonian(t: float, terms: StaticModelTerms) -> np.ndarray:
    """``H_KPO + [O^dag, O] / D12`` plus the cancellation detuning of KPO1."""
    A1 = two_mode_embed(annihilation(terms.dim), 1, terms.dim)
    shift = float(terms.rwa.cancellation_shift(t, terms.program))
    return terms.H_KPO + shift * (A1.conj().T @ A1) + terms.commutator_over_detuning(t)


def ac_zeeman_shift(t, terms: StaticModelTerms):
    """Drive-induced detuning of KPO1, ``-(p_g^2 + p_g'^2) / D12``."""
    pg = terms.rwa.p_g(t, terms.program)
    pgp = terms.rwa.p_g_prime(t, terms.program)
    return -(pg * pg + pgp * pgp) / terms.rwa.Delta_12


class StaticModel(BandedModel):
    """Propagation source for the static model (same frame as the RWA model).

    The c-number part ``-(p_g^2 + p_g'^2) / (2 D12)`` is omitted from the
    propagator since it is a global phase.
    """

    kind = "static"

    def __init__(self, rwa: RwaParams, program: PulseProgram, dim: int = 21):
        if rwa.Delta_12 == 0:
            raise ValueError("the static model requires a nonzero detuning Delta_12")
        super().__init__(dim)
        self.rwa = rwa
        self.program = program
        m = self._m
        D = rwa.Delta_12
        self._diag1 = rwa.Delta_1 * m - 0.5 * rwa.K_1 * self._kerr_diag + (rwa.g**2 / D) * m
        self._diag2 = (rwa.Delta_2 * m - 0.5 * rwa.K_2 * self._kerr_diag - (rwa.g**2 / D) * m).astype(
            complex
        )
        self._c1 = complex(0.5 * rwa.P_1)
        self._c2 = complex(0.5 * rwa.P_2)
        self.frame_frequencies = (rwa.Delta_12, 0.0)
        self.mode_frequencies = (rwa.Delta_12, 0.0)
        self.pump_half_frequencies = (rwa.Delta_12, 0.0)
        self.coupling = rwa.g

    def fastest_frequency(self) -> float:
        # nothing oscillates; resolve the slowest physical scale instead
        return 0.0

    def coefficients(self, t: float):
        p, r = self.program, self.rwa
        in_window = 0.0 <= t <= p.T_g
        pg = r.drive_conversion * float(p.gate_envelope(t)) if in_window else 0.0
        pgp = r.drive_conversion * float(p.sta_envelope(t)) if in_window else 0.0
        shift = 2.0 * r.drive_conversion * float(p.cancellation(t)) if in_window else 0.0
        D = r.Delta_12
        diag1 = (self._diag1 + (shift - (pg * pg + pgp * pgp) / D) * self._m).astype(complex)
        y = r.g * (-pg + 1j * pgp) / D
        return diag1, self._c1, self._diag2, self._c2, 0j, complex(y)

    def rate_bound(self) -> float:
        p, r = self.program, self.rwa
        d = self.dim
        drive = r.drive_conversion * p.max_drive()
        diag_max = 0.5 * (r.K_1 + r.K_2) * (d - 1) * (d - 2) + (
            abs(r.Delta_1) + abs(r.Delta_2) + 2 * r.drive_conversion * p.max_cancellation()
            + (2 * r.g**2 + drive**2) / abs(r.Delta_12)
        ) * (d - 1)
        return self._bound_terms(diag_max, 0.5 * r.P_1, 0.5 * r.P_2, 0.0, r.g * drive / abs(r.Delta_12))


def verify_static_vs_rwa(
    program: PulseProgram, rwa: RwaParams, T_g: float = None, dim: int = 21, states=None, dt=None
) -> float:
    """Minimum overlap fidelity between RWA and static propagation.

    ``states`` defaults to the four computational basis states.
    """
    from .basis import computational_basis_for
    from .propagate import evolve_batch

    if T_g is not None:
        program = program.with_coefficients(T_g=T_g)
    if states is None:
        states = computational_basis_for(rwa, dim).states
    states = np.asarray(states, dtype=complex)
    if states.ndim == 2:
        states = states[None]
    final_rwa = evolve_batch(states, RwaModel(rwa, program, dim), 0.0, program.T_g, dt=dt)
    final_static = evolve_batch(states, StaticModel(rwa, program, dim), 0.0, program.T_g, dt=dt)
    overlaps = np.abs(np.einsum("kmn,kmn->k", final_rwa.conj(), final_static)) ** 2
    return float(overlaps.min())
