import numpy as np
import pytest
from dataclasses import replace
from hypothesis import given, settings, strategies as st

from cdgate.fock import annihilation, two_mode_embed
from cdgate.rwa import RwaParams
from cdgate.pulses import PulseProgram
from cdgate.static import StaticModel, StaticModelTerms, ac_zeeman_shift, build_static_hamiltonian, verify_static_vs_rwa
from cdgate.units import MHZ

D = 9


def terms_for(g, a, b, delta=-1000 * MHZ, dim=D):
    rwa = RwaParams(0.0, 0.0, 12 * MHZ, 12 * MHZ, 48 * MHZ, 48 * MHZ, g, delta, 1.0)
    prog = PulseProgram(0.0, 0.0, 1.0, 1.0, 1.0, 2.0, (a, 0.0), (b, 0.0), (0.0, 0.0), enable_sta=True)
    # at t = T/2 the gate envelope equals a; the STA envelope equals b sin(pi) = 0, so use t = T/4
    return StaticModelTerms(rwa, prog, dim)


def interior(M, dim=D, margin=2):
    idx = [m * dim + n for m in range(dim - margin) for n in range(dim - margin)]
    return M[np.ix_(idx, idx)]


@settings(max_examples=100, deadline=None, derandomize=True)
@given(st.floats(-50, 50), st.floats(-500, 500), st.floats(-500, 500), st.floats(0, 2))
def test_closed_form_matches_brute_force(g, a, b, t):
    terms = terms_for(g * MHZ, a * MHZ, b * MHZ)
    err = np.abs(interior(terms.commutator(t) - terms.brute_force_commutator(t)))
    scale = max(1.0, np.abs(terms.commutator(t)).max())
    assert err.max() < 1e-10 * scale


def test_commutator_limits():
    d = D
    a = annihilation(d)
    n1 = two_mode_embed(a.conj().T @ a, 1, d)
    n2 = two_mode_embed(a.conj().T @ a, 2, d)
    terms = terms_for(10 * MHZ, 0.0, 0.0)
    assert np.allclose(terms.commutator(0.3), (10 * MHZ) ** 2 * (n1 - n2))
    terms = terms_for(0.0, 30 * MHZ, 0.0)
    pg = float(terms.drives(1.0)[0])
    expected = -(pg**2) * (n1 + 0.5 * np.eye(d * d))
    assert np.allclose(interior(terms.brute_force_commutator(1.0)), interior(expected))


def test_commutator_antisymmetric_and_hermitian():
    terms = terms_for(7 * MHZ, 20 * MHZ, -13 * MHZ)
    O = terms.O(0.5)
    C = terms.commutator(0.5)
    swapped = O @ O.conj().T - O.conj().T @ O
    assert np.allclose(swapped, -terms.brute_force_commutator(0.5))
    assert np.abs(C - C.conj().T).max() < 1e-12 * np.abs(C).max()


def test_static_hamiltonian_hermitian_and_excitation_structure():
    terms = terms_for(10 * MHZ, 0.0, 0.0)
    H = build_static_hamiltonian(0.3, terms)
    assert np.abs(H - H.conj().T).max() < 1e-12 * np.abs(H).max()
    a = annihilation(D)
    diff = two_mode_embed(a.conj().T @ a, 1, D) - two_mode_embed(a.conj().T @ a, 2, D)
    extra = H - terms.H_KPO
    assert np.abs(extra @ diff - diff @ extra).max() == 0


def test_zero_delta_rejected():
    with pytest.raises(ValueError):
        terms_for(1.0, 0.0, 0.0, delta=0.0)


def test_ac_zeeman_shift_signs_and_scaling():
    t = 0.5
    assert ac_zeeman_shift(t, terms_for(1.0, 0.0, 0.0)) == 0
    pos = ac_zeeman_shift(t, terms_for(1.0, 30 * MHZ, 10 * MHZ, delta=+1000 * MHZ))
    neg = ac_zeeman_shift(t, terms_for(1.0, 30 * MHZ, 10 * MHZ, delta=-1000 * MHZ))
    assert pos < 0 < neg
    scaled = ac_zeeman_shift(t, terms_for(1.0, 90 * MHZ, 30 * MHZ, delta=+1000 * MHZ))
    assert scaled == pytest.approx(9 * pos, rel=1e-12)


def test_banded_static_matches_dense(setup21):
    d = 7
    prog = replace(setup21.program(20e-9, (0.05, 0.01), (0.02, 0.0), (-0.01, 0.0)),
                   enable_sta=True, enable_cancellation=True)
    model = StaticModel(setup21.rwa, prog, d)
    terms = StaticModelTerms(setup21.rwa, prog, d)
    for t in (3e-9, 12e-9):
        dense = build_static_hamiltonian(t, terms)
        c_number = -(np.array(terms.drives(t)) ** 2).sum() / (2 * setup21.rwa.Delta_12)
        assert np.allclose(model.hamiltonian(t) + c_number * np.eye(d * d), dense, atol=1e-6 * np.abs(dense).max())


def test_drives_off_static_equals_rwa_without_coupling(setup21):
    r = replace(setup21.rwa, g=0.0)
    prog = setup21.program(10e-9)
    assert verify_static_vs_rwa(prog, r, dim=21) > 1 - 1e-8
