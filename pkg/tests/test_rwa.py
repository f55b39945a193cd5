import math

import numpy as np
import pytest
from dataclasses import replace

from cdgate.basis import coherent_state
from cdgate.circuit import derive_circuit_params, REFERENCE_TARGETS
from cdgate.rwa import (
    RwaModel,
    _single_mode_rwa,
    build_rwa_hamiltonian,
    crosscheck_rwa_vs_circuit,
    kpo_targets_to_amplitudes,
    rwa_params,
)
from cdgate.units import MHZ


def test_kerr_value(params):
    for j in (1, 2):
        assert abs(params.kerr(j) / (12 * MHZ) - 1) < 1e-12


def test_alpha_is_two(setup21):
    a1, a2 = setup21.rwa.alpha
    assert a1 == pytest.approx(2.0, rel=1e-12) and a2 == pytest.approx(2.0, rel=1e-12)


def test_conversion_shared_by_pump_and_gate(setup21):
    r = setup21.rwa
    d1, _ = setup21.pump_amplitudes
    assert r.P_1 / d1 == pytest.approx(r.drive_conversion, rel=1e-12)
    prog = setup21.program(20e-9, (0.05, 0.0))
    assert r.p_g(10e-9, prog) / prog.gate_envelope(10e-9) == pytest.approx(r.drive_conversion, rel=1e-12)


def test_doubling_tan_halves_pump_angle():
    base = derive_circuit_params(**REFERENCE_TARGETS)
    theta = math.atan(2 * math.tan(base.theta_0))
    other = derive_circuit_params(**dict(REFERENCE_TARGETS, theta_0=theta))
    d_base = kpo_targets_to_amplitudes(base)
    d_other = kpo_targets_to_amplitudes(other)
    assert d_other[0] == pytest.approx(d_base[0] / 2, rel=1e-12)


def test_hamiltonian_hermitian(setup21):
    d = 8
    prog = setup21.program(20e-9, (0.05, 0.01), (0.02, 0.0), (-0.01, 0.0))
    prog = replace(prog, enable_sta=True, enable_cancellation=True)
    for t in (1e-9, 7.3e-9, 15e-9):
        H = build_rwa_hamiltonian(t, setup21.rwa, prog, d)
        assert np.abs(H - H.conj().T).max() < 1e-12 * np.abs(H).max()


def test_decoupled_block_structure(setup21):
    d = 6
    r = replace(setup21.rwa, g=0.0)
    prog = setup21.program(20e-9)
    H1 = build_rwa_hamiltonian(1e-9, r, prog, d)
    H2 = build_rwa_hamiltonian(9e-9, r, prog, d)
    assert np.array_equal(H1, H2)
    local = np.kron(_single_mode_rwa(d, 0, r.K_1, r.P_1), np.eye(d)) + np.kron(
        np.eye(d), _single_mode_rwa(d, 0, r.K_2, r.P_2)
    )
    assert np.allclose(H1, local)


def test_coherent_states_are_kerr_pump_eigenstates(setup21):
    r = setup21.rwa
    H = _single_mode_rwa(21, 0.0, r.K_1, r.P_1)
    for sign in (1, -1):
        v = coherent_state(sign * 2.0, 21)
        E = np.vdot(v, H @ v).real
        residual = (H @ v - E * v) / r.K_1
        # only the two highest Fock rows see the cutoff
        assert np.linalg.norm(residual[:-2]) < 1e-6
        assert np.linalg.norm(residual) < 1e-2


def test_banded_model_matches_dense(setup21):
    d = 7
    prog = replace(setup21.program(20e-9, (0.05, 0.01), (0.02, 0.0), (-0.01, 0.0)),
                   enable_sta=True, enable_cancellation=True)
    model = RwaModel(setup21.rwa, prog, d)
    for t in (2e-9, 11e-9):
        assert np.allclose(model.hamiltonian(t), build_rwa_hamiltonian(t, setup21.rwa, prog, d))


def test_parity_conserved_without_coupling(setup21):
    from cdgate.propagate import evolve_batch

    d = 21
    r = replace(setup21.rwa, g=0.0)
    prog = setup21.program(20e-9, (0.05, 0.0))
    psi = np.outer(coherent_state(2.0, d, 1e-3), coherent_state(1.0, d))
    parity = np.outer((-1.0) ** np.arange(d), (-1.0) ** np.arange(d))
    before = [np.sum(np.abs(psi) ** 2 * P) for P in (np.outer((-1.0) ** np.arange(d), np.ones(d)),)]
    out = evolve_batch(psi, RwaModel(r, prog, d), 0.0, prog.T_g, dt=2.5e-12)
    P1 = np.outer((-1.0) ** np.arange(d), np.ones(d))
    assert abs(np.sum(np.abs(out) ** 2 * P1) - before[0]) < 1e-8
    assert abs(np.sum(np.abs(out) ** 2 * parity) - np.sum(np.abs(psi) ** 2 * parity)) < 1e-8


def test_crosscheck_against_circuit(params):
    report = crosscheck_rwa_vs_circuit(params)
    assert max(report.relative_deviation) < 0.15
    harmonic = crosscheck_rwa_vs_circuit(params, dim=10, harmonic=True)
    assert max(abs(a) for a in harmonic.anharmonicity) < 1e-3 * params.kerr(1)


def test_crosscheck_improves_with_squid_count():
    devs = []
    for N in (5, 10, 20):
        p = derive_circuit_params(**dict(REFERENCE_TARGETS, squid_count=N))
        devs.append(crosscheck_rwa_vs_circuit(p, dim=21).relative_deviation[0])
    assert devs[0] > devs[1] > devs[2]


def test_rwa_params_reference(setup21):
    r = rwa_params(setup21.params, setup21.program(20e-9), setup21.eig)
    assert r.Delta_1 == 0 and r.Delta_2 == 0
    assert r.gate_rate == pytest.approx(r.Delta_12, rel=1e-12)
