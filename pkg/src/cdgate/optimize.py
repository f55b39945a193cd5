"""Pulse optimisation: bound-constrained L-BFGS on finite-difference gradients."""

import csv
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy.optimize import minimize

from .experiment import Flags, GateSetup, PULSE_ALONE
from .propagate import PropagationError
from .rwa import RwaParams

FD_STEP = 1e-4
# theta_c acts as a detuning of order GHz/rad, so its direction is much stiffer
CANCELLATION_FD_STEP = 2.5e-5
COEFF_BOUND = 0.5
MAX_ITERATIONS = 200
STALL_TOLERANCE = 1e-6
# optimiser works in units of VARIABLE_SCALE rad so its first unit-length step stays physical
VARIABLE_SCALE = 0.01
STALL_WINDOW = 3


@dataclass
class OptimizationRecord:
    T_g: float
    sta: bool
    cancellation: bool
    A: list
    B: list
    C: list
    fidelity: float
    infidelity_history: list = field(default_factory=list)
    objective_evaluations: int = 0
    wall_time: float = 0.0
    model: str = "rwa"
    dim: int = 21
    converged: bool = True
    message: str = ""

    @property
    def flags(self) -> Flags:
        return Flags(self.sta, self.cancellation)

    @property
    def infidelity(self) -> float:
        return 1.0 - self.fidelity

    def coefficients(self) -> np.ndarray:
        """``A, B, C`` concatenated (``C`` only with cancellation)."""
        blocks = [self.A, self.B] + ([self.C] if self.cancellation else [])
        return np.concatenate([np.asarray(b, dtype=float) for b in blocks])

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2)

    @classmethod
    def from_json(cls, text: str) -> "OptimizationRecord":
        return cls(**json.loads(text))

    def save(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(self.to_json())

    @classmethod
    def load(cls, path) -> "OptimizationRecord":
        with open(path) as fh:
            return cls.from_json(fh.read())


def split_coefficients(x: Sequence[float], flags: Flags, N_f: int):
    """Unpack ``(A, B[, C])``; the vector has ``2 N_f`` or ``3 N_f`` entries."""
    x = np.asarray(x, dtype=float)
    expected = 3 * N_f if flags.cancellation else 2 * N_f
    if x.shape != (expected,):
        raise ValueError(f"expected {expected} coefficients for flags {flags.label!r}, got {x.shape}")
    A, B = x[:N_f], x[N_f : 2 * N_f]
    C = x[2 * N_f :] if flags.cancellation else np.zeros(N_f)
    return tuple(A), tuple(B), tuple(C)


def objective(x: Sequence[float], T_g: float, flags: Flags, setup: GateSetup) -> float:
    """Gate infidelity ``1 - F`` for coefficients ``x`` (see :func:`split_coefficients`)."""
    A, B, C = split_coefficients(x, flags, setup.N_f)
    return 1.0 - setup.run(setup.program(T_g, A, B, C, flags)).fidelity


def _active_mask(flags: Flags, N_f: int) -> np.ndarray:
    """Entries of the full coefficient vector that actually shape the pulse."""
    mask = [True] * N_f + [flags.sta] * N_f
    if flags.cancellation:
        mask += [True] * N_f
    return np.array(mask)


_WORKER_CONTEXT = None


def _init_worker(context):
    global _WORKER_CONTEXT
    _WORKER_CONTEXT = context


def _worker_objective(x):
    setup, T_g, flags = _WORKER_CONTEXT
    return objective(x, T_g, flags, setup)


class Evaluator:
    """Memoised, optionally parallel objective over the full coefficient vector."""

    def __init__(self, setup: GateSetup, T_g: float, flags: Flags, workers: int = 1):
        self.setup, self.T_g, self.flags = setup, T_g, flags
        self.workers = max(1, int(workers))
        self.evaluations = 0
        self._cache = {}
        self._pool = None

    def __enter__(self):
        if self.workers > 1:
            self._pool = ProcessPoolExecutor(
                max_workers=self.workers, initializer=_init_worker,
                initargs=((self.setup, self.T_g, self.flags),),
            )
        return self

    def __exit__(self, *exc):
        if self._pool is not None:
            self._pool.shutdown()
            self._pool = None

    def batch(self, points: Iterable[np.ndarray]) -> list:
        points = [np.asarray(p, dtype=float) for p in points]
        keys = [p.tobytes() for p in points]
        todo = {k: p for k, p in zip(keys, points) if k not in self._cache}
        if todo:
            if self._pool is not None and len(todo) > 1:
                values = list(self._pool.map(_worker_objective, todo.values()))
            else:
                values = [objective(p, self.T_g, self.flags, self.setup) for p in todo.values()]
            for k, v in zip(todo, values):
                if not math.isfinite(v):
                    raise PropagationError("objective returned a non-finite value")
                self._cache[k] = v
            self.evaluations += len(todo)
        return [self._cache[k] for k in keys]

    def __call__(self, x) -> float:
        return self.batch([x])[0]

    def fd_steps(self, n: int) -> np.ndarray:
        """Per-coordinate finite-difference steps for a vector of length ``n``."""
        steps = np.full(n, FD_STEP)
        if self.flags.cancellation:
            steps[2 * (n // 3):] = CANCELLATION_FD_STEP
        return steps

    def value_and_gradient(self, x, mask=None, step=None):
        """Objective and central finite-difference gradient over the masked entries.

        ``step`` may be a scalar or a per-coordinate array; by default
        :meth:`fd_steps` is used.
        """
        x = np.asarray(x, dtype=float)
        idx = np.flatnonzero(mask) if mask is not None else np.arange(x.size)
        step = self.fd_steps(x.size) if step is None else np.broadcast_to(np.asarray(step, float), x.shape)
        points = [x]
        for i in idx:
            for s in (1.0, -1.0):
                p = x.copy()
                p[i] += s * step[i]
                points.append(p)
        values = self.batch(points)
        grad = np.zeros(x.size)
        for k, i in enumerate(idx):
            grad[i] = (values[1 + 2 * k] - values[2 + 2 * k]) / (2.0 * step[i])
        return values[0], grad


def conditional_phase(U: np.ndarray) -> float:
    """ZZ phase ``arg(U01 U10 / (U00 U11))`` of a near-diagonal gate, in ``(-pi, pi]``."""
    d = np.diag(U)
    return float(np.angle(d[1] * d[2] / (d[0] * d[3])))


def cold_start_amplitude(
    setup: GateSetup, T_g: float, grid: Optional[Sequence[float]] = None, target: float = math.pi
) -> float:
    """``A_1`` at which the conditional phase first reaches ``target`` in magnitude.

    The ideal gate ``diag(1, i, i, 1)`` has conditional phase ``pi``.  The
    phase grows roughly as ``A_1**2 T_g`` and wraps, so it is unwrapped along
    an ascending scan and the first crossing is interpolated in ``A_1**2``.
    Larger amplitudes reaching ``3 pi``, ``5 pi``, ... are never selected.
    """
    if grid is None:
        grid = np.geomspace(0.01, 0.2, 16)
    grid = np.sort(np.asarray(grid, dtype=float))
    prev_a, prev_phase, raw_prev = 0.0, 0.0, None
    for a in grid:
        A = (float(a),) + (0.0,) * (setup.N_f - 1)
        raw = conditional_phase(setup.run(setup.program(T_g, A)).U)
        phase = raw if raw_prev is None else prev_phase + math.remainder(raw - raw_prev, 2 * math.pi)
        if abs(phase) >= abs(target):
            w = (abs(target) - abs(prev_phase)) / (abs(phase) - abs(prev_phase))
            return float(math.sqrt(prev_a**2 + w * (a**2 - prev_a**2)))
        prev_a, prev_phase, raw_prev = float(a), phase, raw
    return float(grid[-1])


def seed_cancellation(
    A: Sequence[float], B: Sequence[float], T_g: float, rwa: RwaParams, sta: bool = True,
    samples: int = 256,
) -> tuple:
    """Least-squares raised-cosine fit of the flux that cancels the drive-induced shift.

    The KPO1 shift ``-(p_g^2 + p_g'^2) / D12`` is compensated by a cancellation
    angle ``(p_g^2 + p_g'^2) / (2 c D12)`` where ``c`` is the drive conversion.
    """
    from .pulses import raised_cosine_series, sine_series

    if rwa.Delta_12 == 0:
        raise ValueError("cancellation seeding requires a nonzero Delta_12")
    N_f = len(A)
    t = np.linspace(0.0, T_g, samples)
    c = rwa.drive_conversion
    pg = c * raised_cosine_series(t, A, T_g)
    pgp = c * sine_series(t, B, T_g) if sta else np.zeros_like(t)
    target = (pg**2 + pgp**2) / (2.0 * c * rwa.Delta_12)
    basis = np.column_stack(
        [raised_cosine_series(t, np.eye(N_f)[n], T_g) for n in range(N_f)]
    )
    C, *_ = np.linalg.lstsq(basis, target, rcond=None)
    return tuple(float(v) for v in C)


def _initial_vector(setup, T_g, flags, init):
    N_f = setup.N_f
    if init is None or (isinstance(init, str) and init == "auto"):
        A = np.zeros(N_f)
        A[0] = cold_start_amplitude(setup, T_g)
        B = np.zeros(N_f)
        C = np.zeros(N_f)
    elif isinstance(init, OptimizationRecord):
        A, B, C = map(np.asarray, (init.A, init.B, init.C))
        if flags.cancellation and not init.cancellation:
            C = np.asarray(seed_cancellation(A, B, T_g, setup.rwa, init.sta and flags.sta))
    else:
        A, B, C = map(np.asarray, split_coefficients(init, flags, N_f))
    if not flags.sta:
        B = np.zeros(N_f)
    blocks = [A, B] + ([C] if flags.cancellation else [])
    return np.clip(np.concatenate(blocks).astype(float), -COEFF_BOUND, COEFF_BOUND)


class _Stall(Exception):
    pass


def optimize_pulse(
    setup: GateSetup,
    T_g: float,
    flags: Flags = PULSE_ALONE,
    init=None,
    workers: int = 1,
    max_iterations: int = MAX_ITERATIONS,
    seed_c: bool = True,
) -> OptimizationRecord:
    """Maximise the gate fidelity at ``T_g`` with L-BFGS-B.

    ``init`` may be ``None``/``"auto"`` (coarse ``A_1`` scan), a coefficient
    vector or a previous :class:`OptimizationRecord` (warm start).  With
    cancellation on and no ``C`` supplied, ``C`` starts from
    :func:`seed_cancellation`.
    """
    if not 5e-9 <= T_g <= 50e-9:
        raise ValueError(f"T_g must lie in [5, 50] ns, got {T_g * 1e9:.3g} ns")
    start = time.perf_counter()
    x0 = _initial_vector(setup, T_g, flags, init)
    N_f = setup.N_f
    if flags.cancellation and seed_c and not np.any(x0[2 * N_f :]):
        x0[2 * N_f :] = np.clip(
            seed_cancellation(x0[:N_f], x0[N_f : 2 * N_f], T_g, setup.rwa, flags.sta),
            -COEFF_BOUND, COEFF_BOUND,
        )
    mask = _active_mask(flags, N_f)
    free = np.flatnonzero(mask)
    history, best = [], {"x": x0.copy(), "f": math.inf}

    with Evaluator(setup, T_g, flags, workers) as ev:

        def full(z):
            x = x0.copy()
            x[free] = np.clip(z * VARIABLE_SCALE, -COEFF_BOUND, COEFF_BOUND)
            return x

        def fun(z):
            f, g = ev.value_and_gradient(full(z), mask)
            if f < best["f"]:
                best["x"], best["f"] = full(z), f
            return f, g[free] * VARIABLE_SCALE

        def callback(intermediate_result):
            f = float(intermediate_result.fun)
            history.append(min(f, history[-1]) if history else f)
            if len(history) > STALL_WINDOW and history[-1 - STALL_WINDOW] - history[-1] < STALL_TOLERANCE:
                raise StopIteration

        f0 = ev(x0)
        history.append(f0)
        best["f"] = f0
        res = minimize(
            fun, x0[free] / VARIABLE_SCALE, jac=True, method="L-BFGS-B",
            bounds=[(-COEFF_BOUND / VARIABLE_SCALE, COEFF_BOUND / VARIABLE_SCALE)] * free.size,
            callback=callback,
            options=dict(maxiter=max_iterations, ftol=1e-12, gtol=1e-10, maxls=20),
        )
        x_best = best["x"]
        f_best = ev(x_best)
        evaluations = ev.evaluations

    stalled = len(history) > STALL_WINDOW and history[-1 - STALL_WINDOW] - history[-1] < STALL_TOLERANCE
    converged = bool(res.success or stalled)
    A, B, C = split_coefficients(x_best, flags, N_f)
    return OptimizationRecord(
        T_g=T_g, sta=flags.sta, cancellation=flags.cancellation,
        A=[float(v) for v in A], B=[float(v) for v in B], C=[float(v) for v in C],
        fidelity=float(1.0 - f_best),
        infidelity_history=[float(v) for v in history],
        objective_evaluations=evaluations,
        wall_time=time.perf_counter() - start,
        model=setup.model, dim=setup.dim,
        converged=converged,
        message=str(res.message) if not stalled else "infidelity improvement stalled",
    )


def reevaluate(record: OptimizationRecord, setup: GateSetup) -> float:
    """Fresh fidelity at the stored coefficients."""
    return 1.0 - objective(record.coefficients(), record.T_g, record.flags, setup)


SWEEP_COLUMNS = (
    "T_g_ns", "flags", "fidelity", "evaluations", "status", "converged", "wall_time_s", "A", "B", "C",
)


@dataclass
class SweepCell:
    T_g: float
    flags: Flags
    record: Optional[OptimizationRecord]
    status: str

    def row(self) -> dict:
        r = self.record
        fmt = lambda v: " ".join(repr(float(a)) for a in v)
        return {
            "T_g_ns": repr(self.T_g * 1e9),
            "flags": self.flags.label,
            "fidelity": repr(r.fidelity) if r else "",
            "evaluations": r.objective_evaluations if r else 0,
            "status": self.status,
            "converged": r.converged if r else "",
            "wall_time_s": f"{r.wall_time:.3f}" if r else "",
            "A": fmt(r.A) if r else "",
            "B": fmt(r.B) if r else "",
            "C": fmt(r.C) if r else "",
        }


def sweep_gate_times(
    setup: GateSetup,
    T_list: Sequence[float],
    flag_sets: Sequence[Flags] = (PULSE_ALONE,),
    workers: int = 1,
    init: Optional[dict] = None,
    progress=None,
    **options,
) -> list:
    """Optimise every ``(T_g, flags)`` cell, warm-starting along decreasing ``T_g``.

    ``init`` optionally maps a flag label to a starting record or vector for the
    longest gate time.  Failing cells are reported with their error and the
    sweep continues.  Extra keyword options go to :func:`optimize_pulse`.
    """
    if len(T_list) == 0:
        raise ValueError("T_list must not be empty")
    cells = []
    for flags in flag_sets:
        previous = (init or {}).get(flags.label)
        for T in sorted(T_list, reverse=True):
            try:
                rec = optimize_pulse(setup, T, flags, init=previous, workers=workers, **options)
                status = "ok" if rec.converged else "not-converged"
                previous = rec
            except (PropagationError, ValueError, FloatingPointError) as exc:
                rec, status = None, f"error: {exc}"
            cell = SweepCell(T, flags, rec, status)
            cells.append(cell)
            if progress is not None:
                progress(cell)
    return cells


def write_sweep_csv(cells: Sequence[SweepCell], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=SWEEP_COLUMNS)
        writer.writeheader()
        for cell in cells:
            writer.writerow(cell.row())


def threshold_time(cells: Sequence[SweepCell], flags: Flags, level: float = 0.999) -> Optional[float]:
    """Shortest gate time from which every longer sampled time also passes ``level``."""
    rows = sorted(
        (c for c in cells if c.flags == flags and c.record is not None), key=lambda c: -c.T_g
    )
    shortest = None
    for c in rows:
        if c.record.fidelity >= level:
            shortest = c.T_g
        else:
            break
    return shortest
