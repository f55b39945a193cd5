"""Flux-pulse waveforms of the conditional-driving gate.

The gate pulse, the counterdiabatic (STA) quadrature and the cancellation
flux are each a short Fourier series on ``[0, T_g]`` whose terms vanish, together
with the needed derivatives, at both ends of the gate window.
"""

from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np


def raised_cosine_series(t, coeffs: Sequence[float], T_g: float):
    """``sum_n c_n/2 * (1 - cos(2 n pi t / T_g))``."""
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    for n, c in enumerate(coeffs, start=1):
        out = out + 0.5 * c * (1.0 - np.cos(2.0 * n * np.pi * t / T_g))
    return out


def sine_series(t, coeffs: Sequence[float], T_g: float):
    """``sum_n c_n * n * sin(2 n pi t / T_g)``."""
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    for n, c in enumerate(coeffs, start=1):
        out = out + c * n * np.sin(2.0 * n * np.pi * t / T_g)
    return out


@dataclass(frozen=True)
class PulseProgram:
    """All time-dependent flux angles applied during one gate.

    Angles are in radians, frequencies in rad/s and ``T_g`` in seconds.
    ``A``, ``B`` and ``C`` hold the gate-pulse, counterdiabatic and
    cancellation coefficients; ``B`` and ``C`` are ignored unless the
    corresponding flag is set.
    """

    delta_1: float
    delta_2: float
    omega_p1: float
    omega_p2: float
    omega_g: float
    T_g: float
    A: tuple = field(default=(0.0, 0.0))
    B: tuple = field(default=(0.0, 0.0))
    C: tuple = field(default=(0.0, 0.0))
    enable_sta: bool = False
    enable_cancellation: bool = False

    def __post_init__(self):
        object.__setattr__(self, "A", tuple(float(x) for x in self.A))
        object.__setattr__(self, "B", tuple(float(x) for x in self.B))
        object.__setattr__(self, "C", tuple(float(x) for x in self.C))
        if not len(self.A) == len(self.B) == len(self.C):
            raise ValueError("A, B and C must have the same length N_f")
        if not self.T_g > 0:
            raise ValueError(f"gate time must be positive, got {self.T_g}")

    @property
    def N_f(self) -> int:
        return len(self.A)

    def gate_envelope(self, t):
        """Gate-pulse amplitude ``delta_g(t)``."""
        return raised_cosine_series(t, self.A, self.T_g)

    def sta_envelope(self, t):
        """Counterdiabatic amplitude ``delta_g'(t)``; zero when STA is off."""
        if not self.enable_sta:
            return np.zeros_like(np.asarray(t, dtype=float))
        return sine_series(t, self.B, self.T_g)

    def cancellation(self, t):
        """Cancellation angle ``theta_c(t)``; zero when cancellation is off."""
        if not self.enable_cancellation:
            return np.zeros_like(np.asarray(t, dtype=float))
        return raised_cosine_series(t, self.C, self.T_g)

    @property
    def gate_off(self) -> bool:
        return not any(self.A) and not (self.enable_sta and any(self.B))

    def max_drive(self) -> float:
        """Upper bound on ``sqrt(delta_g^2 + delta_g'^2)`` over the window."""
        a = sum(abs(x) for x in self.A)
        b = sum(abs(x) * n for n, x in enumerate(self.B, start=1)) if self.enable_sta else 0.0
        return float(a + b)

    def max_cancellation(self) -> float:
        if not self.enable_cancellation:
            return 0.0
        return float(sum(abs(x) for x in self.C))

    def with_coefficients(self, A=None, B=None, C=None, T_g=None) -> "PulseProgram":
        return replace(
            self,
            A=self.A if A is None else tuple(A),
            B=self.B if B is None else tuple(B),
            C=self.C if C is None else tuple(C),
            T_g=self.T_g if T_g is None else T_g,
        )
