import numpy as np


class HarmonicModel:
    """``H = w1 n1 + w2 n2`` in the lab frame; an analytic reference for the integrator."""

    kind = "harmonic"
    default_dt = 1e-12

    def __init__(self, dim, w1, w2=0.0, bound=None):
        self.dim = dim
        m = np.arange(dim)
        self.E = w1 * m[:, None] + w2 * m[None, :]
        self._bound = bound

    def fastest_frequency(self):
        return 0.0

    def rate_bound(self):
        return float(np.abs(self.E).max()) if self._bound is None else self._bound

    def to_internal(self, psi, t):
        return np.array(psi, dtype=complex)

    def from_internal(self, X, t):
        return np.array(X)

    def derivative(self, t, X):
        return -1j * self.E * X
