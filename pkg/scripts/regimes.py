"""Run the three symmetry-breaking regimes into bundles under ./out/regimes."""
import argparse
import json
from pathlib import Path

from dimerhex.experiments import ExperimentPreset, run_regime

ap = argparse.ArgumentParser()
ap.add_argument("--out", default="out/regimes")
ap.add_argument("--seed", type=int, default=0)
args = ap.parse_args()

for name in ("regime-i", "regime-ii", "regime-iii"):
    m = run_regime(ExperimentPreset(name, {"seed": args.seed}), Path(args.out) / name)
    print(name, json.dumps(m["results"], sort_keys=True))
