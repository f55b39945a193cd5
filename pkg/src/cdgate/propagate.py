"""Fixed-step RK4 integration of the Schrödinger equation and gate assembly.

A *model* is any object exposing

* ``dim``, ``kind``, ``program`` and ``default_dt``;
* ``to_internal(psi, t)`` / ``from_internal(X, t)`` mapping matrix-form
  states ``(k, d, d)`` to and from the representation that is integrated;
* ``derivative(t, X)`` returning ``dX/dt`` (optionally ``rk4_step``);
* ``rate_bound()``, an upper bound on the generator norm, and
  ``fastest_frequency()``;
* ``frame_frequencies``, ``mode_frequencies``, ``pump_half_frequencies`` and
  ``coupling`` used to build the measurement frame.

:class:`~cdgate.circuit.CircuitModel`, :class:`~cdgate.rwa.RwaModel` and
:class:`~cdgate.static.StaticModel` implement it.
"""

import csv
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .basis import ComputationalBasis, normal_modes
from .fidelity import IdealGate, average_gate_fidelity
from .fock import annihilation, expectation_numbers, two_mode_embed

STEPS_PER_PERIOD = 40
STABILITY_LIMIT = 0.5


class PropagationError(RuntimeError):
    """Raised when an integration violates unitarity or produces non-finite values."""


@dataclass
class TwoModeState:
    """Amplitudes over the truncated two-mode Fock basis (mode-1-major)."""

    amplitudes: np.ndarray
    time: float = 0.0

    @classmethod
    def from_matrix(cls, psi: np.ndarray, time: float = 0.0) -> "TwoModeState":
        return cls(np.asarray(psi, dtype=complex).reshape(-1), time)

    @property
    def dim(self) -> int:
        return math.isqrt(self.amplitudes.size)

    @property
    def matrix(self) -> np.ndarray:
        d = self.dim
        return self.amplitudes.reshape(d, d)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


def step_grid(model, t0: float, t1: float, dt: Optional[float] = None) -> tuple[int, float]:
    """Number of steps and step size covering ``[t0, t1]``.

    The step never exceeds the model default, the RK4 stability margin
    ``STABILITY_LIMIT / rate_bound`` or ``1/STEPS_PER_PERIOD`` of the fastest
    drive period.  An explicit ``dt`` that under-resolves the drive is rejected.
    """
    if not t1 > t0:
        raise ValueError(f"t1 must exceed t0 (got {t0}, {t1})")
    fastest = model.fastest_frequency()
    resolve = 2.0 * math.pi / (STEPS_PER_PERIOD * fastest) if fastest > 0 else math.inf
    if dt is not None:
        if not dt > 0:
            raise ValueError("dt must be positive")
        if dt > resolve * (1 + 1e-9):
            raise ValueError(
                f"dt={dt:.3e} s resolves the fastest drive with fewer than {STEPS_PER_PERIOD} steps per period"
            )
        step = dt
    else:
        step = min(model.default_dt, resolve)
    bound = model.rate_bound()
    if bound > 0:
        step = min(step, STABILITY_LIMIT / bound)
    steps = max(1, math.ceil((t1 - t0) / step - 1e-9))
    return steps, (t1 - t0) / steps


def _rk4(model, t: float, X: np.ndarray, dt: float) -> np.ndarray:
    k1 = model.derivative(t, X)
    k2 = model.derivative(t + 0.5 * dt, X + 0.5 * dt * k1)
    k3 = model.derivative(t + 0.5 * dt, X + 0.5 * dt * k2)
    k4 = model.derivative(t + dt, X + dt * k3)
    return X + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def evolve_batch(
    states: np.ndarray,
    model,
    t0: float,
    t1: float,
    dt: Optional[float] = None,
    max_norm_drift: float = 1e-6,
    observer: Optional[Callable[[float, np.ndarray], None]] = None,
    observe_every: int = 0,
    refine: int = 0,
) -> np.ndarray:
    """Propagate matrix-form states ``(k, d, d)`` from ``t0`` to ``t1``.

    Norms are not renormalised; a drift beyond ``max_norm_drift`` raises
    :class:`PropagationError`, unless ``refine > 0``, in which case the whole
    run is repeated on a grid with half the step (at most ``refine`` times).
    ``observer(t, psi)`` is called at ``t0``, every ``observe_every`` steps and
    at ``t1``.
    """
    try:
        return _evolve_fixed(states, model, t0, t1, dt, max_norm_drift, observer, observe_every)
    except PropagationError:
        if refine <= 0:
            raise
    _, h = step_grid(model, t0, t1, dt)
    return evolve_batch(
        states, model, t0, t1, 0.5 * h, max_norm_drift, observer, 2 * observe_every, refine - 1
    )


def _evolve_fixed(states, model, t0, t1, dt, max_norm_drift, observer, observe_every):
    states = np.asarray(states, dtype=complex)
    single = states.ndim == 2
    if single:
        states = states[None]
    steps, h = step_grid(model, t0, t1, dt)
    norms0 = np.linalg.norm(states.reshape(states.shape[0], -1), axis=1)
    X = np.ascontiguousarray(model.to_internal(states, t0))
    stepper = getattr(model, "rk4_step", None)
    if observer is not None:
        observer(t0, states)
    for k in range(steps):
        t = t0 + k * h
        X = stepper(t, X, h) if stepper is not None else _rk4(model, t, X, h)
        if observer is not None and observe_every and (k + 1) % observe_every == 0 and k + 1 < steps:
            observer(t0 + (k + 1) * h, model.from_internal(X, t0 + (k + 1) * h))
    out = model.from_internal(X, t1)
    if not np.all(np.isfinite(out)):
        raise PropagationError("non-finite amplitudes after propagation")
    drift = np.abs(np.linalg.norm(out.reshape(out.shape[0], -1), axis=1) - norms0)
    if drift.max() > max_norm_drift:
        raise PropagationError(
            f"norm drift {drift.max():.3e} exceeds {max_norm_drift:.1e} "
            f"({model.kind} model, {steps} steps of {h:.3e} s)"
        )
    if observer is not None:
        observer(t1, out)
    return out[0] if single else out


def evolve(
    state: TwoModeState, model, t0: float, t1: float, dt: Optional[float] = None,
    max_norm_drift: float = 1e-6,
) -> TwoModeState:
    """Advance a single state with classic fixed-step RK4."""
    out = evolve_batch(state.matrix, model, t0, t1, dt=dt, max_norm_drift=max_norm_drift)
    return TwoModeState.from_matrix(out, t1)


def frame_frequencies(model, choice: str = "pump") -> tuple[float, float]:
    """Rotation frequencies of the two b-modes in the measurement frame.

    ``"pump"`` rotates each b-mode at half its pump frequency, the frame in
    which the pumped KPO is stationary; ``"normal"`` uses the normal-mode
    frequencies of the dressed modes.
    """
    if choice == "pump":
        return tuple(model.pump_half_frequencies)
    if choice == "normal":
        return normal_modes(*model.mode_frequencies, model.coupling).mode_frequencies
    raise ValueError(f"unknown frame choice {choice!r}")


_FRAME_CACHE: dict = {}


def measurement_frame(T: float, U_tilde: np.ndarray, nu, reference, dim: int) -> np.ndarray:
    """Map a model-frame state at time ``T`` into the rotating b-mode frame.

    Returns ``exp(+iT sum_j nu_j b_j^dag b_j) exp(-iT sum_j ref_j a_j^dag a_j)``
    as a dense ``dim**2`` unitary.
    """
    key = (float(T), tuple(map(float, nu)), tuple(map(float, reference)), U_tilde.tobytes(), dim)
    cached = _FRAME_CACHE.get(key)
    if cached is not None:
        return cached
    a = annihilation(dim)
    A = (two_mode_embed(a, 1, dim), two_mode_embed(a, 2, dim))
    M = U_tilde @ np.diag(nu) @ U_tilde.T
    G = sum(M[i, j] * A[i].conj().T @ A[j] for i in range(2) for j in range(2))
    G = 0.5 * (G + G.conj().T)
    evals, evecs = np.linalg.eigh(G)
    rot = (evecs * np.exp(1j * T * evals)) @ evecs.conj().T
    m = np.arange(dim)
    ref = np.exp(-1j * T * (reference[0] * m[:, None] + reference[1] * m[None, :])).ravel()
    out = rot * ref[None, :]
    if len(_FRAME_CACHE) > 64:
        _FRAME_CACHE.clear()
    _FRAME_CACHE[key] = out
    return out


@dataclass
class GateMatrix:
    U: np.ndarray
    fidelity: float
    final_states: Optional[np.ndarray] = None

    def column_norms(self) -> np.ndarray:
        return np.linalg.norm(self.U, axis=0)


def run_gate(
    basis: ComputationalBasis,
    model,
    frame: str = "pump",
    dt: Optional[float] = None,
    ideal: IdealGate = IdealGate(),
    keep_states: bool = False,
    refine: int = 3,
) -> GateMatrix:
    """Propagate the four logical states through ``model.program`` and build ``U``.

    ``U[2i+j, 2i'+j']`` is the overlap of logical state ``ij`` with the
    frame-rotated final state that started in ``i'j'``.
    """
    T = model.program.T_g
    final = evolve_batch(basis.states, model, 0.0, T, dt=dt, refine=refine)
    F = measurement_frame(
        T, basis.modes.U_tilde, frame_frequencies(model, frame), model.frame_frequencies, basis.dim
    )
    rotated = (F @ final.reshape(4, -1).T).T
    U = basis.vectors().conj() @ rotated.T
    fid = average_gate_fidelity(U, ideal)
    return GateMatrix(U=U, fidelity=fid, final_states=rotated if keep_states else None)


@dataclass
class PhotonTrace:
    t: np.ndarray
    n1: np.ndarray
    n2: np.ndarray
    norm: np.ndarray

    @property
    def peak_n1(self) -> float:
        return float(self.n1.max())


def photon_trace(
    basis: ComputationalBasis, index: int, model, sample_dt: float, dt: Optional[float] = None,
    refine: int = 3,
) -> PhotonTrace:
    """Mean photon numbers of both bare modes sampled during a gate run.

    On excess norm drift the step is halved up to ``refine`` times, keeping the
    sample times fixed.
    """
    T = model.program.T_g
    steps, h = step_grid(model, 0.0, T, dt)
    if sample_dt < h * (1 - 1e-9):
        raise ValueError(f"sample_dt={sample_dt:.3e} s is shorter than the integrator step {h:.3e} s")
    every = max(1, int(round(sample_dt / h)))
    rows = []

    def record(t, psi):
        n1, n2 = expectation_numbers(psi)
        norm = np.linalg.norm(psi.reshape(psi.shape[0], -1), axis=1)
        rows.append((t, float(n1[0]), float(n2[0]), float(norm[0])))

    for level in range(refine + 1):
        rows.clear()
        try:
            evolve_batch(basis.states[index][None], model, 0.0, T, dt=h / 2**level,
                         observer=record, observe_every=every * 2**level)
            break
        except PropagationError:
            if level == refine:
                raise
    data = np.array(rows)
    return PhotonTrace(t=data[:, 0], n1=data[:, 1], n2=data[:, 2], norm=data[:, 3])


def write_trace_csv(trace: PhotonTrace, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t_ns", "n1", "n2", "norm"])
        for t, a, b, c in zip(trace.t, trace.n1, trace.n2, trace.norm):
            writer.writerow([repr(t * 1e9), repr(a), repr(b), repr(c)])


def write_gate_csv(gate: GateMatrix, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["row", "col", "re", "im", "fidelity"])
        for i in range(4):
            for j in range(4):
                z = gate.U[i, j]
                writer.writerow([i, j, repr(float(z.real)), repr(float(z.imag)), repr(gate.fidelity)])
