"""Degeneracy counters for chains of hexamers, exact and with weak inter-block hopping."""
import argparse

from dimerhex.ensemble import critical_chain, scaling_report

ap = argparse.ArgumentParser()
ap.add_argument("--n-max", type=int, default=6)
ap.add_argument("--eps", type=float, nargs="*", default=[0.0, 1e-6, 1e-3])
args = ap.parse_args()

print("eps,n,k,g,l_ratio,action")
for eps in args.eps:
    for n in range(1, args.n_max + 1):
        for k in range(1, n + 1):
            r = scaling_report(critical_chain(n, k, eps=eps))
            print(f"{eps:g},{n},{k},{r.g},{r.l_ratio:.6g},{r.action}")
