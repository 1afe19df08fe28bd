"""Spectrum sweeps: twist angle (full and reduced Hamiltonians), critical angle
against ring radius, and the triple-point family."""
import argparse
from pathlib import Path

from dimerhex.experiments import ExperimentPreset, run_preset

ap = argparse.ArgumentParser()
ap.add_argument("--out", default="out/sweeps")
ap.add_argument("--points", type=int, default=65)
args = ap.parse_args()

for name, ov in (("fig2a", {"points": args.points}), ("fig1.1", {"points": args.points}), ("fig2c", {})):
    m = run_preset(ExperimentPreset(name, ov), Path(args.out) / name)
    print(name, m["results"])
