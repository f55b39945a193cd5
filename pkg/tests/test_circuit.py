import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cdgate.circuit import (
    REFERENCE_TARGETS,
    CircuitModel,
    derive_circuit_params,
    eigenfrequencies,
    flux_angle,
    hamiltonian_terms,
    reference_params,
)
from cdgate.fock import two_mode_embed
from cdgate.pulses import PulseProgram
from cdgate.units import GHZ, MHZ


def idle_program(p, **kw):
    base = dict(delta_1=0.02, delta_2=0.02, omega_p1=2 * p.omega_1, omega_p2=2 * p.omega_2,
                omega_g=p.omega_1 + p.omega_2, T_g=10e-9)
    base.update(kw)
    return PulseProgram(**base)


def test_reference_energies(params):
    assert params.E_Jeff1 / GHZ == pytest.approx(208.3333333, rel=1e-9)
    assert params.E_J1 / GHZ == pytest.approx(294.628, rel=1e-5)
    assert params.E_Jeff1 == params.E_J1 * math.cos(params.theta_0)


def test_plasma_relation(params):
    N = params.squid_count
    for j in (1, 2):
        lhs = params.omega(j) ** 2
        assert abs(lhs - 8 * params.E_C(j) * params.E_Jeff(j) / N) / lhs < 1e-12


def test_coupling_round_trip(params):
    assert abs(params.g / (10 * MHZ) - 1) < 1e-10


def test_kerr_is_charging_over_n_squared(params):
    assert abs(params.kerr(1) / (12 * MHZ) - 1) < 1e-12


@pytest.mark.parametrize("g", [0.0, -1.0])
def test_zero_coupling_rejected(g):
    kw = dict(REFERENCE_TARGETS, g_target=g)
    with pytest.raises(ValueError):
        derive_circuit_params(**kw)


def test_too_strong_coupling_rejected():
    with pytest.raises(ValueError):
        derive_circuit_params(**dict(REFERENCE_TARGETS, g_target=5 * GHZ))


def test_flux_angle_examples(params):
    prog = idle_program(params, delta_2=0.1)
    t = math.pi / 2 / prog.omega_p2
    assert flux_angle(t, 2, prog, params) == pytest.approx(0.0025, abs=1e-15)
    assert flux_angle(0.0, 1, prog, params) == pytest.approx(0.02 + 0.02**2 / 4, rel=1e-14)
    gate = idle_program(params, A=(0.07, 0.03))
    envelope = gate.gate_envelope(gate.T_g / 2)
    assert envelope == pytest.approx(0.07, abs=1e-15)


@settings(max_examples=30, deadline=None)
@given(st.floats(0, 1e-8), st.sampled_from([1, 2]))
def test_flux_angle_periodic_without_gate(t, mode):
    params = reference_params()
    prog = idle_program(params)
    period = 2 * math.pi / (prog.omega_p1 if mode == 1 else prog.omega_p2)
    assert abs(flux_angle(t + period, mode, prog, params) - flux_angle(t, mode, prog, params)) < 1e-12


@settings(max_examples=50, deadline=None)
@given(st.floats(0, 0.05), st.floats(0, 0.1), st.floats(0, 0.1))
def test_compensation_cancels_rwa_shift(d1, dg, dgp):
    # first-order response of cos(theta_0 - x) to the static angle cancels the quadratic shift
    p = reference_params()
    theta_1 = (d1**2 + dg**2 + dgp**2) / (4 * math.tan(p.theta_0))
    zpf = math.sqrt(p.E_Jeff1 * p.E_C1 / (2 * p.squid_count))
    shift = -0.5 * zpf * (d1**2 + dg**2 + dgp**2)
    response = 2 * zpf * math.tan(p.theta_0) * theta_1
    assert abs(shift + response) <= 1e-12 * max(abs(shift), 1e-300)


def test_hamiltonian_hermitian_and_static(params):
    terms = hamiltonian_terms(params, dim=6)
    prog = idle_program(params, A=(0.05, 0.01), B=(0.01, 0.0), C=(-0.01, 0.0),
                        enable_sta=True, enable_cancellation=True)
    for t in np.random.default_rng(1).uniform(0, prog.T_g, 4):
        H = terms.hamiltonian(t, prog)
        assert np.abs(H - H.conj().T).max() < 1e-10 * np.abs(H).max()
    off = idle_program(params, delta_1=0.0, delta_2=0.0)
    assert np.array_equal(terms.hamiltonian(1e-9, off), terms.hamiltonian(3.7e-9, off))


def test_capacitive_coupling_changes_both_parities(params):
    d = 4
    terms = hamiltonian_terms(params, dim=d)
    from cdgate.circuit import mode_operators

    ops = mode_operators(params, d)
    V = two_mode_embed(ops[0].charge_op, 1, d) @ two_mode_embed(ops[1].charge_op, 2, d)
    psi = np.zeros(d * d)
    psi[1 * d + 1] = 1
    out = V @ psi
    for m, n in ((0, 0), (2, 0), (0, 2), (2, 2)):
        assert abs(out[m * d + n]) > 0
    assert out[1 * d + 0] == 0
    assert terms.static.shape == (d * d, d * d)


def test_eigenfrequencies_harmonic_uncoupled_limit(params):
    e = eigenfrequencies(params, dim=8, coupling=False, harmonic=True)
    assert e.omega_tilde_1 == pytest.approx(params.omega_1, rel=1e-12)
    assert e.omega_tilde_2 == pytest.approx(params.omega_2, rel=1e-12)


def test_eigenfrequencies_reference(params):
    e = eigenfrequencies(params, dim=21)
    assert e.omega_tilde_1 < params.omega_1 and e.omega_tilde_2 < params.omega_2
    assert abs(abs(e.Delta_12) / GHZ - 1) < 0.05
    assert e.Delta_12 < 0


def test_interaction_picture_derivative_matches_dense(params):
    d = 6
    prog = idle_program(params, A=(0.05, 0.0))
    model = CircuitModel(params, prog, d)
    rng = np.random.default_rng(3)
    psi = rng.normal(size=(1, d, d)) + 1j * rng.normal(size=(1, d, d))
    t = 1.234e-9
    X = model.to_internal(psi, t)
    # d/dt of the lab state: from_internal(X + h dX) vs -iH psi
    h = 1e-18
    dX = model.derivative(t, X)
    lab_rate = (model.from_internal(X + h * dX, t) - psi) / h
    H = model.hamiltonian(t)
    eye = np.eye(d * d)
    # dropped pieces: ground energies and identity parts of the Josephson operators
    W1, W2 = model.bases
    E0 = H - model.dropped_scalar(t) * eye
    free = np.kron(W1 @ np.diag(model.levels[0]) @ W1.T, np.eye(d)) + np.kron(
        np.eye(d), W2 @ np.diag(model.levels[1]) @ W2.T
    )
    expected = -1j * ((E0 - free) @ psi[0].ravel())
    assert np.allclose(lab_rate[0].ravel(), expected, rtol=1e-6, atol=1e-6 * np.abs(expected).max())
