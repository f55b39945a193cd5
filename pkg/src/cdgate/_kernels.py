"""Compiled inner loops for number-basis-banded two-mode Hamiltonians.

A banded Hamiltonian here is

    H = D1(n1) + c1 a1^dag^2 + c1* a1^2 + D2(n2) + c2 a2^dag^2 + c2* a2^2
        + x a1^dag a2 + x* a1 a2^dag + y a1^dag a2^dag + y* a1 a2

which covers both the rotating-wave and the static effective model.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def banded_apply(X, out, diag1, c1, diag2, c2, x, y, sq):
    """``out = -1j * H @ X`` for a batch of matrix-form states."""
    nb, d, _ = X.shape
    c1c = np.conj(c1)
    c2c = np.conj(c2)
    xc = np.conj(x)
    yc = np.conj(y)
    for b in range(nb):
        for m in range(d):
            for n in range(d):
                acc = (diag1[m] + diag2[n]) * X[b, m, n]
                if m >= 2:
                    acc += c1 * sq[m] * sq[m - 1] * X[b, m - 2, n]
                if m + 2 < d:
                    acc += c1c * sq[m + 1] * sq[m + 2] * X[b, m + 2, n]
                if n >= 2:
                    acc += c2 * sq[n] * sq[n - 1] * X[b, m, n - 2]
                if n + 2 < d:
                    acc += c2c * sq[n + 1] * sq[n + 2] * X[b, m, n + 2]
                if m >= 1 and n + 1 < d:
                    acc += x * sq[m] * sq[n + 1] * X[b, m - 1, n + 1]
                if m + 1 < d and n >= 1:
                    acc += xc * sq[m + 1] * sq[n] * X[b, m + 1, n - 1]
                if m >= 1 and n >= 1:
                    acc += y * sq[m] * sq[n] * X[b, m - 1, n - 1]
                if m + 1 < d and n + 1 < d:
                    acc += yc * sq[m + 1] * sq[n + 1] * X[b, m + 1, n + 1]
                out[b, m, n] = -1j * acc


@njit(cache=True)
def banded_rk4_step(X, dt, coeffs0, coeffs_half, coeffs1, sq):
    """One classic RK4 step; each ``coeffs*`` is ``(diag1, c1, diag2, c2, x, y)``."""
    k1 = np.empty_like(X)
    k2 = np.empty_like(X)
    k3 = np.empty_like(X)
    k4 = np.empty_like(X)
    banded_apply(X, k1, coeffs0[0], coeffs0[1], coeffs0[2], coeffs0[3], coeffs0[4], coeffs0[5], sq)
    banded_apply(
        X + 0.5 * dt * k1, k2,
        coeffs_half[0], coeffs_half[1], coeffs_half[2], coeffs_half[3], coeffs_half[4], coeffs_half[5], sq,
    )
    banded_apply(
        X + 0.5 * dt * k2, k3,
        coeffs_half[0], coeffs_half[1], coeffs_half[2], coeffs_half[3], coeffs_half[4], coeffs_half[5], sq,
    )
    banded_apply(X + dt * k3, k4, coeffs1[0], coeffs1[1], coeffs1[2], coeffs1[3], coeffs1[4], coeffs1[5], sq)
    return X + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
