"""Command-line front end.

Exit codes: 0 success, 1 configuration error, 2 numerical failure.
"""

import argparse
import csv
import json
import os
import platform
import subprocess
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .basis import LABELS, basis_to_csv
from .config import EXPERIMENTS, ConfigError, RunConfig
from .fidelity import virtual_z_fidelity
from .optimize import (
    OptimizationRecord,
    optimize_pulse,
    sweep_gate_times,
    threshold_time,
    write_sweep_csv,
)
from .propagate import PropagationError, write_gate_csv, write_trace_csv
from .static import verify_static_vs_rwa

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 1, 2


def _code_version() -> str:
    try:
        rev = subprocess.run(
            ["git", "rev-parse", "--short", "HEAD"], cwd=Path(__file__).parent,
            capture_output=True, text=True, timeout=5,
        )
        if rev.returncode == 0:
            return f"{__version__}+g{rev.stdout.strip()}"
    except (OSError, subprocess.SubprocessError):
        pass
    return __version__


def write_manifest(out: Path, config: RunConfig, command: str) -> None:
    manifest = {
        "command": command,
        "code_version": _code_version(),
        "python": platform.python_version(),
        "numpy": np.__version__,
        "config": config.to_dict(),
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True))


def _coefficients(exp, N_f):
    zero = [0.0] * N_f
    return tuple(exp.A or zero), tuple(exp.B or zero), tuple(exp.C or zero)


def cmd_simulate(config: RunConfig, out: Path) -> None:
    setup, exp = config.setup(), config.experiment
    A, B, C = _coefficients(exp, config.N_f)
    program = setup.program(exp.gate_times[0], A, B, C, exp.flag_sets[0])
    gate = setup.run(program)
    write_gate_csv(gate, out / "gate.csv")
    vz, phases = virtual_z_fidelity(gate.U)
    summary = {"T_g_ns": exp.T_g_ns[0], "flags": exp.flag_sets[0].label, "fidelity": gate.fidelity,
               "virtual_z_fidelity": vz, "virtual_z_phases_rad": list(phases)}
    (out / "result.json").write_text(json.dumps(summary, indent=2))
    print(f"fidelity {gate.fidelity:.6f}")
    print(f"fidelity after virtual-Z fit (diagnostic only) {vz:.6f}")


def _load_init(exp):
    if exp.init is None:
        return None
    try:
        return OptimizationRecord.load(exp.init)
    except (OSError, TypeError, ValueError) as exc:
        raise ConfigError(f"experiment.init: cannot load record {exp.init!r}: {exc}") from exc


def cmd_optimize(config: RunConfig, out: Path) -> None:
    setup, exp = config.setup(), config.experiment
    init = _load_init(exp)
    if init is None and exp.A is not None:
        A, B, C = _coefficients(exp, config.N_f)
        init = list(A) + list(B) + (list(C) if exp.flag_sets[0].cancellation else [])
    rec = optimize_pulse(setup, exp.gate_times[0], exp.flag_sets[0], init=init, workers=config.workers,
                         max_iterations=exp.max_iterations)
    rec.save(out / "record.json")
    gate = setup.run(setup.program(rec.T_g, rec.A, rec.B, rec.C, rec.flags))
    write_gate_csv(gate, out / "gate.csv")
    print(f"T_g {rec.T_g * 1e9:g} ns, {rec.flags.label}: fidelity {rec.fidelity:.6f} "
          f"after {rec.objective_evaluations} evaluations ({rec.message})")


def cmd_sweep(config: RunConfig, out: Path) -> None:
    setup, exp = config.setup(), config.experiment
    records = out / "records"
    records.mkdir(exist_ok=True)

    def progress(cell):
        line = f"{cell.T_g * 1e9:6.2f} ns  {cell.flags.label:9s}  {cell.status}"
        if cell.record is not None:
            line += f"  F={cell.record.fidelity:.6f}"
            cell.record.save(records / f"{cell.flags.label.replace('+', '_')}_{cell.T_g * 1e9:g}ns.json")
        print(line, flush=True)

    cells = sweep_gate_times(setup, exp.gate_times, exp.flag_sets, workers=config.workers, progress=progress,
                             max_iterations=exp.max_iterations)
    write_sweep_csv(cells, out / "sweep.csv")
    for flags in exp.flag_sets:
        T = threshold_time(cells, flags)
        print(f"threshold {flags.label}: " + (f"{T * 1e9:g} ns" if T else "not reached"))
    if all(c.record is None for c in cells):
        raise PropagationError("every sweep cell failed")


def cmd_trace(config: RunConfig, out: Path) -> None:
    setup, exp = config.setup(), config.experiment
    A, B, C = _coefficients(exp, config.N_f)
    program = setup.program(exp.gate_times[0], A, B, C, exp.flag_sets[0])
    trace = setup.trace(program, exp.state_index, exp.sample_ns * 1e-9)
    write_trace_csv(trace, out / "trace.csv")
    print(f"peak n1 {trace.n1.max():.3f}, peak n2 {trace.n2.max():.3f}")


def cmd_verify_static(config: RunConfig, out: Path) -> None:
    setup, exp = config.setup(), config.experiment
    A, B, C = _coefficients(exp, config.N_f)
    if not any(A):
        A = (0.05,) + (0.0,) * (config.N_f - 1)
    ref = exp.reference_T_g_ns
    rows = []
    for T_ns in sorted(exp.T_g_ns):
        scale = ref / T_ns  # fixed pulse area
        program = setup.program(
            T_ns * 1e-9, [a * scale for a in A], [b * scale for b in B], [c * scale for c in C],
            exp.flag_sets[0],
        )
        overlap = verify_static_vs_rwa(program, setup.rwa, dim=setup.dim, states=setup.basis.states, dt=config.dt)
        rows.append((T_ns, scale * A[0], overlap))
        print(f"T_g {T_ns:g} ns: min overlap {overlap:.6f}")
    with open(out / "verify_static.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["T_g_ns", "A1_rad", "min_overlap"])
        writer.writerows(rows)


def cmd_basis_report(config: RunConfig, out: Path) -> None:
    setup = config.setup()
    basis = setup.basis
    basis_to_csv(basis, out / "basis.csv")
    gram = basis.gram
    off = float(np.abs(gram - np.diag(np.diag(gram))).max())
    report = {
        "labels": list(LABELS),
        "dim": basis.dim,
        "gram_offdiagonal_max": off,
        "gram_deviation": basis.gram_deviation,
        "beta": list(basis.bparams.beta),
        "U_tilde": basis.modes.U_tilde.tolist(),
        "omega_minus_hz": basis.modes.omega_minus / (2 * np.pi),
        "omega_plus_hz": basis.modes.omega_plus / (2 * np.pi),
    }
    (out / "basis_report.json").write_text(json.dumps(report, indent=2))
    print(f"Gram off-diagonal max {off:.3e}")


COMMANDS = {
    "simulate": cmd_simulate,
    "optimize": cmd_optimize,
    "sweep": cmd_sweep,
    "trace": cmd_trace,
    "verify-static": cmd_verify_static,
    "basis-report": cmd_basis_report,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cdgate", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in EXPERIMENTS:
        p = sub.add_parser(name)
        p.add_argument("--config", type=Path, help="JSON run configuration")
        p.add_argument("--out", type=Path, default=Path("out"), help="output directory")
        p.add_argument("--workers", type=int, help="parallel objective evaluations")
        p.add_argument("--model", choices=("circuit", "rwa", "static"))
        p.add_argument("--truncation", type=int, help="photon-number cutoff per mode")
        p.add_argument("--dt", type=float, help="integrator step in seconds")
    return parser


def resolve_config(args) -> RunConfig:
    config = RunConfig.load(args.config) if args.config else RunConfig()
    config.experiment.kind = args.command
    for name in ("workers", "model", "truncation", "dt"):
        value = getattr(args, name)
        if value is not None:
            setattr(config, name, value)
    return config.validate()


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = resolve_config(args)
        config.setup()
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = args.out
    out.mkdir(parents=True, exist_ok=True)
    write_manifest(out, config, args.command)
    try:
        COMMANDS[args.command](config, out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (PropagationError, FloatingPointError, np.linalg.LinAlgError, RuntimeError, ValueError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
