import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cdgate.fock import (
    annihilation,
    apply_mode1,
    apply_mode2,
    build_mode_operators,
    expectation_numbers,
    fock_state,
    two_mode_embed,
)
from cdgate.units import GHZ, MHZ

E_C = 300 * MHZ
E_J = 5 * (10 * GHZ) ** 2 / (8 * E_C)


def test_ladder_dim3():
    ops = build_mode_operators(3, E_C, E_J, 5)
    expected = np.zeros((3, 3))
    expected[0, 1], expected[1, 2] = 1.0, np.sqrt(2)
    assert np.array_equal(ops.annihilate, expected)
    assert np.array_equal(ops.number, np.diag([0.0, 1.0, 2.0]))


def test_single_level_cosine_is_identity():
    ops = build_mode_operators(1, E_C, E_J, 5)
    assert np.all(ops.phase_op == 0)
    assert np.allclose(ops.cos_phi_over_N, np.eye(1), atol=0)


@pytest.mark.parametrize("bad", [dict(dim=0), dict(E_C=0.0), dict(E_J=-1.0), dict(N=0)])
def test_rejects_bad_inputs(bad):
    kw = dict(dim=5, E_C=E_C, E_J=E_J, N=5) | bad
    with pytest.raises(ValueError):
        build_mode_operators(kw["dim"], kw["E_C"], kw["E_J"], kw["N"])


@pytest.mark.parametrize("dim", [5, 12, 21])
def test_canonical_commutator_interior(dim):
    ops = build_mode_operators(dim, E_C, E_J, 5)
    comm = ops.phase_op @ ops.charge_op - ops.charge_op @ ops.phase_op
    k = dim - 2
    assert np.abs(comm[:k, :k] - 1j * np.eye(k)).max() < 1e-10


@settings(max_examples=25, deadline=None)
@given(
    dim=st.integers(2, 25),
    ec=st.floats(10 * MHZ, 2 * GHZ),
    ratio=st.floats(20.0, 5000.0),
    N=st.integers(1, 8),
)
def test_hermiticity_and_cosine_range(dim, ec, ratio, N):
    ops = build_mode_operators(dim, ec, ec * ratio, N)
    for op in (ops.number, ops.phase_op, ops.charge_op, ops.cos_phi_over_N):
        assert np.abs(op - op.conj().T).max() < 1e-12
    evals = np.linalg.eigvalsh(ops.cos_phi_over_N)
    assert evals.min() >= -1 - 1e-12 and evals.max() <= 1 + 1e-12
    assert np.abs(ops.number - ops.create @ ops.annihilate).max() < 1e-12 * dim


def test_number_on_fock_vectors():
    n = build_mode_operators(8, E_C, E_J, 5).number
    for m in range(8):
        e = np.zeros(8)
        e[m] = 1
        assert np.array_equal(n @ e, m * e)


def test_cosine_matches_series_for_small_phase():
    # large E_J keeps phi/N small: cos ~ 1 - x^2/2 + x^4/24 on low levels
    ops = build_mode_operators(30, E_C, 1e4 * E_J, 5)
    x = ops.phase_op / 5
    series = np.eye(30) - x @ x / 2 + x @ x @ x @ x / 24
    assert np.abs(ops.cos_phi_over_N - series)[:10, :10].max() < 1e-9


def test_embed_identity_and_numbers():
    d = 5
    assert np.array_equal(two_mode_embed(np.eye(d), 1, d), np.eye(d * d))
    n = annihilation(d).conj().T @ annihilation(d)
    N1, N2 = two_mode_embed(n, 1, d), two_mode_embed(n, 2, d)
    psi = fock_state(2, 3, d).ravel()
    assert np.allclose(N1 @ N2 @ psi, 6 * psi)


def test_embedded_modes_commute_exactly():
    d = 6
    a = annihilation(d)
    A1, A2d = two_mode_embed(a, 1, d), two_mode_embed(a.conj().T, 2, d)
    assert np.abs(A1 @ A2d - A2d @ A1).max() == 0


def test_embed_shape_mismatch():
    with pytest.raises(ValueError):
        two_mode_embed(np.eye(3), 1, 4)
    with pytest.raises(ValueError):
        two_mode_embed(np.eye(3), 3, 3)


@settings(max_examples=20, deadline=None)
@given(st.integers(2, 7), st.integers(0, 2**31 - 1))
def test_matrix_form_application_matches_kron(d, seed):
    rng = np.random.default_rng(seed)
    op = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    psi = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    assert np.allclose(apply_mode1(op, psi).ravel(), two_mode_embed(op, 1, d) @ psi.ravel())
    assert np.allclose(apply_mode2(op, psi).ravel(), two_mode_embed(op, 2, d) @ psi.ravel())


def test_expectation_numbers():
    psi = (fock_state(1, 2, 4) + fock_state(3, 0, 4)) / np.sqrt(2)
    n1, n2 = expectation_numbers(psi)
    assert np.isclose(n1, 2.0) and np.isclose(n2, 1.0)
