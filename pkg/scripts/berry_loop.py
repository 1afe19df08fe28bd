"""Wilson-loop phase around a small circle in (dh, phi), for a range of radii."""
import argparse
import math

from dimerhex.ensemble import ParameterLoop, berry_phase
from dimerhex.model import CouplingSet

ap = argparse.ArgumentParser()
ap.add_argument("--level", type=int, default=2)
ap.add_argument("--points", type=int, default=80)
args = ap.parse_args()

n = args.points
for r in (0.1, 0.2, 0.3, 0.4, 0.5):
    ts = [2 * math.pi * i / n for i in range(n)] + [0.0]
    pts = tuple(CouplingSet(dd=1.0, dh=1 + r * math.cos(t), ds=0.05, phi=math.pi / 3 + r * math.sin(t)) for t in ts)
    print(f"radius={r:.1f} phase={berry_phase(ParameterLoop(points=pts), args.level):+.12f}")
