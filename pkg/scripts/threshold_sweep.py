"""Gate-time sweep for the four pulse configurations and their 99.9 % thresholds.

Each configuration is warm-started along decreasing gate time.  Results go to
``OUT/sweep.csv``, ``OUT/records/*.json`` and ``OUT/thresholds.json``.

    python3 scripts/threshold_sweep.py --out results/rwa21
    python3 scripts/threshold_sweep.py --out results/rwa21 --extend sta:19,18,17
"""

import argparse
import json
from pathlib import Path

from cdgate.experiment import PULSE_ALONE, WITH_BOTH, WITH_CANCELLATION, WITH_STA, GateSetup
from cdgate.optimize import OptimizationRecord, SweepCell, sweep_gate_times, threshold_time, write_sweep_csv

GRID_NS = {
    PULSE_ALONE: [28, 27, 26, 25, 24, 23, 22, 20],
    WITH_STA: [26, 25, 24, 23, 22, 21, 20],
    WITH_CANCELLATION: [24, 22, 21, 20, 19, 18, 17, 16],
    WITH_BOTH: [18, 16, 15, 14, 13, 12, 11, 10],
}


def load_cells(out, flags):
    cells = []
    for path in sorted((out / "records").glob(f"{flags.label.replace('+', '_')}_*ns.json")):
        rec = OptimizationRecord.load(path)
        if rec.flags != flags:
            continue
        cells.append(SweepCell(rec.T_g, flags, rec, "ok" if rec.converged else "not-converged"))
    return sorted(cells, key=lambda c: -c.T_g)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path("results/sweep"))
    ap.add_argument("--model", default="rwa", choices=("rwa", "circuit", "static"))
    ap.add_argument("--truncation", type=int, default=20)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--only", nargs="*", help="flag labels to run (pulse, sta, canc, sta+canc)")
    ap.add_argument("--extend", nargs="*", default=[], metavar="LABEL:T1,T2",
                    help="continue a configuration to further gate times from its shortest saved record")
    args = ap.parse_args(argv)

    setup = GateSetup(model=args.model, dim=args.truncation + 1,
                      max_leakage=1e-6 if args.truncation >= 20 else 1e-3)
    out = args.out
    (out / "records").mkdir(parents=True, exist_ok=True)
    cells = []

    def progress(cell):
        r = cell.record
        msg = f"{cell.T_g * 1e9:5.1f} ns {cell.flags.label:9s} {cell.status}"
        if r is not None:
            msg += f" 1-F={r.infidelity:.3e} evals={r.objective_evaluations} t={r.wall_time:.0f}s"
            r.save(out / "records" / f"{cell.flags.label.replace('+', '_')}_{cell.T_g * 1e9:g}ns.json")
        print(msg, flush=True)

    by_label = {flags.label: flags for flags in GRID_NS}
    if args.extend:
        for item in args.extend:
            label, times = item.split(":")
            saved = load_cells(out, by_label[label])
            start = min(saved, key=lambda c: c.T_g).record if saved else None
            sweep_gate_times(setup, [float(T) * 1e-9 for T in times.split(",")], [by_label[label]],
                             workers=args.workers, init={label: start}, progress=progress)
    else:
        for flags, grid in GRID_NS.items():
            if args.only and flags.label not in args.only:
                continue
            sweep_gate_times(setup, [T * 1e-9 for T in grid], [flags],
                             workers=args.workers, progress=progress)

    # thresholds and the CSV cover every saved record, so partial runs merge
    cells = [c for flags in GRID_NS for c in load_cells(out, flags)]
    write_sweep_csv(cells, out / "sweep.csv")
    thresholds = {}
    for flags in GRID_NS:
        T = threshold_time(cells, flags)
        thresholds[flags.label] = None if T is None else round(T * 1e9, 6)
    (out / "thresholds.json").write_text(json.dumps(
        {"model": args.model, "truncation": args.truncation, "thresholds_ns": thresholds}, indent=2))
    print(json.dumps(thresholds))


if __name__ == "__main__":
    main()
