"""Re-evaluate frozen sweep optima on the full circuit model.

For each configuration the record at its 99.9 % threshold is propagated with
the circuit Hamiltonian in both measurement frames.  With
``--refine-iterations N`` the optimum is then refined on the circuit model
itself, starting from the RWA coefficients.  Writes ``OUT`` as JSON.

    python3 scripts/circuit_check.py --sweep results/rwa_t20 --out results/circuit_check.json
"""

import argparse
import json
import time
from pathlib import Path

from cdgate.experiment import GateSetup
from cdgate.fidelity import virtual_z_fidelity
from cdgate.optimize import OptimizationRecord, optimize_pulse

LABELS = ("pulse", "sta", "canc", "sta+canc")


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sweep", type=Path, default=Path("results/rwa_t20"))
    ap.add_argument("--out", type=Path, default=Path("results/circuit_check.json"))
    ap.add_argument("--truncation", type=int, default=20)
    ap.add_argument("--labels", nargs="*", default=["pulse", "canc", "sta+canc"], choices=LABELS)
    ap.add_argument("--refine-iterations", type=int, default=0)
    args = ap.parse_args(argv)

    thresholds = json.loads((args.sweep / "thresholds.json").read_text())["thresholds_ns"]
    setups = {fr: GateSetup(model="circuit", dim=args.truncation + 1, frame=fr) for fr in ("normal", "pump")}
    # cells already in OUT for other labels are kept
    previous = json.loads(args.out.read_text())["cells"] if args.out.exists() else []
    cells = [c for c in previous if c["flags"] not in args.labels]
    for label in args.labels:
        T_ns = thresholds.get(label)
        if T_ns is None:
            print(f"{label}: no threshold in sweep, skipped", flush=True)
            continue
        rec = OptimizationRecord.load(args.sweep / "records" / f"{label.replace('+', '_')}_{T_ns:g}ns.json")
        cell = {"flags": label, "T_g_ns": T_ns, "rwa_fidelity": rec.fidelity}
        for frame, setup in setups.items():
            t0 = time.time()
            gate = setup.run(setup.program(rec.T_g, rec.A, rec.B, rec.C, rec.flags))
            cell[f"fidelity_{frame}"] = gate.fidelity
            cell[f"virtual_z_{frame}"] = virtual_z_fidelity(gate.U)[0]
            print(f"{label} {T_ns:g} ns {frame}: F={gate.fidelity:.5f} "
                  f"(virtual-Z {cell[f'virtual_z_{frame}']:.5f}) {time.time() - t0:.0f}s", flush=True)
        cell["circuit_fidelity"] = cell[f"fidelity_{GateSetup(model='circuit').frame_choice}"]
        if args.refine_iterations > 0:
            refined = optimize_pulse(GateSetup(model="circuit", dim=args.truncation + 1), rec.T_g, rec.flags,
                                     init=rec, max_iterations=args.refine_iterations)
            refined.save(args.out.parent / f"circuit_{label.replace('+', '_')}_{T_ns:g}ns.json")
            cell["refined_fidelity"] = refined.fidelity
            cell["refined_evaluations"] = refined.objective_evaluations
            print(f"{label} {T_ns:g} ns refined on circuit: F={refined.fidelity:.5f} "
                  f"({refined.objective_evaluations} evals, {refined.wall_time:.0f}s)", flush=True)
        cells.append(cell)
        cells.sort(key=lambda c: LABELS.index(c["flags"]))
        args.out.write_text(json.dumps({"truncation": args.truncation, "cells": cells}, indent=2))


if __name__ == "__main__":
    main()
