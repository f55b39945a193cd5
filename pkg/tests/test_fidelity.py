import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.stats import unitary_group

from cdgate.fidelity import IdealGate, average_gate_fidelity, virtual_z_fidelity

R = IdealGate().matrix


def test_anchor_values():
    assert abs(average_gate_fidelity(R) - 1.0) < 1e-12
    assert abs(average_gate_fidelity(np.eye(4)) - 0.6) < 1e-12
    assert abs(average_gate_fidelity(IdealGate(-math.pi / 2).matrix) - 0.2) < 1e-12


def test_ideal_gate_unitary():
    M = IdealGate(0.37).matrix
    assert np.allclose(M.conj().T @ M, np.eye(4), atol=0)


@settings(max_examples=50, deadline=None)
@given(st.floats(0, 2 * math.pi), st.integers(0, 2**31 - 1))
def test_global_phase_invariance(phi, seed):
    U = unitary_group.rvs(4, random_state=seed)
    assert abs(average_gate_fidelity(np.exp(1j * phi) * U) - average_gate_fidelity(U)) < 1e-12


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**31 - 1), st.floats(1e-4, 0.3))
def test_unitaries_score_below_ideal(seed, eps):
    U = unitary_group.rvs(4, random_state=seed)
    f = average_gate_fidelity(U)
    assert 0.0 <= f <= 1.0 + 1e-12
    rng = np.random.default_rng(seed)
    H = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    H = (H + H.conj().T) / 2
    H -= np.trace(H) / 4 * np.eye(4)  # a pure global phase would not lower F
    w, V = np.linalg.eigh(H)
    pert = (V * np.exp(1j * eps * w)) @ V.conj().T
    assert average_gate_fidelity(R @ pert) < 1.0


def test_overnormalised_input_warns():
    with pytest.warns(RuntimeWarning):
        average_gate_fidelity(1.1 * R)


def test_virtual_z_recovers_local_phases():
    z = np.kron([1, np.exp(0.3j)], [1, np.exp(-0.2j)])
    U = np.diag(z.conj()) @ R
    assert average_gate_fidelity(U) < 0.99
    f, phases = virtual_z_fidelity(U)
    assert f == pytest.approx(1.0, abs=1e-9)
    assert phases[0] % (2 * math.pi) == pytest.approx(0.3, abs=1e-4)
