"""``dimerhex`` command line.

Exit codes: 0 success, 2 invalid input, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

import numpy as np

from . import io
from .algebra import verification_report
from .ensemble import NoReferenceClass, ParameterLoop, berry_phase, critical_chain, scaling_report
from .experiments import DEFAULTS, ExperimentPreset, parse_overrides, run_manifest, run_preset
from .locus import CrossingNotConverged, NoCrossing, find_critical_angle, locus_energy, locus_point, sweep_couplings, sweep_geometry, sweep_locus
from .model import CouplingSet, DecayLaw, build_full_hamiltonian, build_layout, build_model_hamiltonian
from .spectral import DEFAULT_TOL, ConvergenceError, cluster_degeneracies, eigensolve, run_pipeline
from .wigner import state_vector, wigner_c3, wigner_full, wigner_z2

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL = 0, 2, 3


class UsageError(ValueError):
    pass


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("global")
    g.add_argument("--out", help="output file (directory for regime bundles); stdout if omitted")
    g.add_argument("--seed", type=int, default=None)
    g.add_argument("--tol", type=float, default=None, help=f"degeneracy tolerance (default {DEFAULT_TOL})")
    g.add_argument("--format", choices=("csv", "json"), default=None)
    g.add_argument("--config", help="flat key=value file with couplings and geometry")
    return p


def _coupling_args(p):
    for k in ("e0", "dd", "dh", "ds", "phi"):
        p.add_argument(f"--{k}", type=float, default=None)


def _geometry_args(p):
    p.add_argument("--L", type=float, default=None)
    p.add_argument("--R", type=float, default=None)
    p.add_argument("--theta", type=float, default=None)
    p.add_argument("--delta0", type=float, default=None)
    p.add_argument("--lambda", dest="lam", type=float, default=None)


def _config(args) -> dict:
    return io.read_config(args.config) if args.config else {}


def _couplings(args) -> CouplingSet:
    cfg = _config(args)
    for k in ("e0", "dd", "dh", "ds", "phi"):
        if getattr(args, k, None) is not None:
            cfg[k] = getattr(args, k)
    return io.couplings_from_config(cfg)


def _geometry(args) -> dict:
    cfg = _config(args)
    for k, attr in (("L", "L"), ("R", "R"), ("theta", "theta"), ("delta0", "delta0"), ("lambda", "lam"), ("e0", "e0")):
        if getattr(args, attr, None) is not None:
            cfg[k] = getattr(args, attr)
    return io.geometry_from_config(cfg)


def _tol(args, default=DEFAULT_TOL) -> float:
    tol = default if args.tol is None else args.tol
    if not tol > 0:
        raise UsageError("--tol must be positive")
    return tol


def _emit(args, text: str) -> None:
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _kv(d: dict) -> str:
    return "".join(f"{k}={float(v) if isinstance(v, np.floating) else v!r}\n" for k, v in d.items())


def cmd_spectrum(args):
    tol = _tol(args)
    if args.full:
        geo = _geometry(args)
        h = build_full_hamiltonian(build_layout(geo["L"], geo["R"], geo["theta"]), geo["law"], geo["e0"])
    else:
        h = build_model_hamiltonian(_couplings(args))
    s = eigensolve(h, tol)
    classes = cluster_degeneracies(s, tol)
    if args.format == "json":
        _emit(args, io.dumps({"eigenvalues": s.eigenvalues, "pattern": classes.pattern,
                              "multiplicities": list(classes.multiplicities), "tol": tol}))
    else:
        _emit(args, io.spectrum_to_csv(s, classes))


def cmd_pipeline(args):
    tr = run_pipeline(build_model_hamiltonian(_couplings(args)))
    unitary_dev = float(np.max(np.abs(tr.u_total.conj().T @ tr.u_total - np.eye(6))))
    if args.format == "json":
        enc = lambda m: [[io.format_complex(z) for z in row] for row in m]
        _emit(args, io.dumps({"h2": enc(tr.h2), "h3": enc(tr.h3), "unitarity_deviation": unitary_dev}))
    else:
        _emit(args, "# H2\n" + io.matrix_to_csv(tr.h2) + "# H3\n" + io.matrix_to_csv(tr.h3))


def cmd_locus(args):
    pt = locus_point(args.x)
    d = {"x": pt.x, "f": pt.f, "energy": locus_energy(args.x)}
    if args.format == "json":
        _emit(args, io.dumps(d))
    elif args.format == "csv":
        _emit(args, "x,f,energy\n" + ",".join(io.fmt(v) for v in d.values()) + "\n")
    else:
        _emit(args, _kv(d))


def cmd_critical_angle(args):
    geo = _geometry(args)
    d = {"L": geo["L"], "R": geo["R"], "delta0": geo["law"].amplitude, "lambda": geo["law"].length_scale,
         "model": args.model}
    try:
        d["theta_c"] = find_critical_angle(geo["L"], geo["R"], geo["law"], geo["e0"], model=args.model)
        d["crossing"] = True
    except NoCrossing:
        d["theta_c"], d["crossing"] = None, False
    if args.format == "json":
        _emit(args, io.dumps(d))
    else:
        _emit(args, "no crossing\n" if not d["crossing"] else _kv({"theta_c": d["theta_c"]}))


def cmd_sweep(args):
    tol = _tol(args)
    if args.preset:
        if args.preset not in ("fig2a", "fig2c"):
            raise UsageError("sweep presets are fig2a and fig2c")
        p = dict(DEFAULTS[args.preset])
        param = "theta" if args.preset == "fig2a" else "locus"
        start, stop, points = p["start"], p["stop"], p["points"]
    else:
        if not args.param:
            raise UsageError("give --preset or --param")
        param, start, stop, points = args.param, args.start, args.stop, 50
        if start is None or stop is None:
            raise UsageError("--start and --stop are required with --param")
    if args.start is not None:
        start = args.start
    if args.stop is not None:
        stop = args.stop
    if args.points is not None:
        points = args.points
    grid = np.linspace(start, stop, points)
    if param == "locus":
        c = _couplings(args)
        table = sweep_locus(grid, dd=c.dd, e0=c.e0, tol=tol)
    elif param in ("theta", "R"):
        geo = _geometry(args)
        table = sweep_geometry(param, grid, L=geo["L"], R=geo["R"], theta=geo["theta"], law=geo["law"], e0=geo["e0"],
                               model=args.model, tol=tol)
    else:
        table = sweep_couplings(param, grid, base=_couplings(args), tol=tol)
    if args.format == "json":
        _emit(args, io.dumps({"parameter": table.parameter, "values": table.values, "energies": table.energies,
                              "patterns": list(table.patterns), "tol": tol}))
    else:
        _emit(args, io.sweep_to_csv(table))


def _parse_state(text: str) -> np.ndarray:
    cells = [c.strip() for c in text.split(",") if c.strip()]
    vals = []
    for c in cells:
        vals.append(io.parse_complex(c) if c.endswith("i") else complex(float(c)))
    return state_vector(vals)


def cmd_wigner(args):
    if args.preset:
        tol = _tol(args, DEFAULTS[args.preset]["tol"])
        c = ExperimentPreset(args.preset).couplings()
        s = eigensolve(build_model_hamiltonian(c), tol)
        if not 0 <= args.index < 6:
            raise UsageError("--index must be in 0..5")
        psi = s.eigenvectors[:, args.index]
    elif args.state:
        psi = _parse_state(args.state)
    else:
        raise UsageError("give --preset or --state")
    fn = {2: wigner_z2, 3: wigner_c3, 6: wigner_full}[psi.size]
    g = fn(psi)
    if args.pgm:
        Path(args.pgm).write_text(io.grid_to_pgm(g), encoding="utf-8")
    if args.format == "json":
        _emit(args, io.dumps({"values": g.values, "row_labels": list(g.row_labels), "col_labels": list(g.col_labels)}))
    else:
        _emit(args, io.grid_to_csv(g))


def cmd_regime(args):
    if not args.out:
        raise UsageError("regime needs --out <directory>")
    if args.manifest:
        if args.preset or args.set:
            raise UsageError("--manifest replaces --preset and --set")
        m = run_manifest(args.manifest, args.out)
    else:
        if not args.preset:
            raise UsageError("give --preset or --manifest")
        ov = parse_overrides(args.set)
        if args.seed is not None:
            ov["seed"] = args.seed
        if args.tol is not None:
            ov["tol"] = args.tol
        m = run_preset(ExperimentPreset(args.preset, ov), args.out)
    sys.stdout.write(io.dumps(m["results"]))


def cmd_algebra_verify(args):
    seed = 0 if args.seed is None else args.seed
    _emit(args, io.dumps(verification_report(x=args.x, delta=args.delta, n_draws=args.draws, seed=seed)))


def cmd_ensemble(args):
    tol = _tol(args)
    spec = critical_chain(args.n, args.critical, args.eps, x=args.x, detune=args.detune, hop_site=args.hop_site)
    rep = scaling_report(spec, tol=tol)
    _emit(args, io.dumps(rep.as_dict()))


_COUPLING_COLS = ("e0", "dd", "dh", "ds", "phi")


def read_loop(path, geometry: dict | None = None) -> ParameterLoop:
    """Loop points from CSV: a ``theta`` column, or any of the coupling columns."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise UsageError("loop CSV has no rows")
    cols = set(rows[0])
    geo = geometry or io.geometry_from_config({})
    if cols == {"theta"}:
        pts = [float(r["theta"]) for r in rows]
        return ParameterLoop(points=pts, L=geo["L"], R=geo["R"], law=geo["law"], e0=geo["e0"])
    unknown = cols - set(_COUPLING_COLS)
    if unknown:
        raise UsageError(f"unknown loop columns {sorted(unknown)}")
    pts = [CouplingSet(**{k: float(v) for k, v in r.items()}) for r in rows]
    return ParameterLoop(points=pts)


def cmd_berry(args):
    tol = _tol(args)
    loop = read_loop(args.loop, _geometry(args))
    phase = berry_phase(loop, args.level, tol)
    _emit(args, io.dumps({"phase": phase, "level": args.level, "points": len(loop.points), "tol": tol}))


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    ap = argparse.ArgumentParser(prog="dimerhex", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", parents=[common], help="eigenvalues and degeneracy classes")
    _coupling_args(p)
    _geometry_args(p)
    p.add_argument("--full", action="store_true", help="all-pairs Hamiltonian of a geometric layout")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("pipeline", parents=[common], help="symmetry-adapted block form")
    _coupling_args(p)
    p.set_defaults(func=cmd_pipeline)

    p = sub.add_parser("locus", parents=[common], help="triple-degeneracy locus at dh/dd = x")
    p.add_argument("--x", type=float, required=True)
    p.set_defaults(func=cmd_locus)

    p = sub.add_parser("critical-angle", parents=[common], help="twist angle of the singlet/doublet crossing")
    _geometry_args(p)
    p.add_argument("--model", action="store_true", help="use the three-coupling reduction")
    p.set_defaults(func=cmd_critical_angle)

    p = sub.add_parser("sweep", parents=[common], help="spectrum along a parameter")
    p.add_argument("--preset", choices=("fig2a", "fig2c"))
    p.add_argument("--param", choices=("e0", "dd", "dh", "ds", "phi", "theta", "R", "locus"))
    p.add_argument("--start", type=float)
    p.add_argument("--stop", type=float)
    p.add_argument("--points", type=int)
    p.add_argument("--model", action="store_true")
    _coupling_args(p)
    _geometry_args(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("wigner", parents=[common], help="discrete Wigner grid of a state")
    p.add_argument("--preset", choices=("regime-i", "regime-ii", "regime-iii", "hexagon", "star"))
    p.add_argument("--index", type=int, default=0, help="eigenstate index for --preset")
    p.add_argument("--state", help="comma-separated amplitudes, complex as 're+imi'")
    p.add_argument("--pgm", help="also write a P2 graymap here")
    p.set_defaults(func=cmd_wigner)

    p = sub.add_parser("regime", parents=[common], help="run a preset into an output bundle")
    p.add_argument("--preset", choices=sorted(DEFAULTS))
    p.add_argument("--set", action="append", metavar="KEY=VALUE")
    p.add_argument("--manifest", help="re-run a bundle from its manifest.json")
    p.set_defaults(func=cmd_regime)

    p = sub.add_parser("algebra-verify", parents=[common], help="generator identities and symmetry operator")
    p.add_argument("--x", type=float, default=1.9)
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--draws", type=int, default=100)
    p.set_defaults(func=cmd_algebra_verify)

    p = sub.add_parser("ensemble", parents=[common], help="degeneracy bookkeeping for a chain")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--critical", type=int, required=True)
    p.add_argument("--eps", type=float, default=0.0)
    p.add_argument("--x", type=float, default=1.9)
    p.add_argument("--detune", type=float, default=0.1)
    p.add_argument("--hop-site", type=int, default=0)
    p.set_defaults(func=cmd_ensemble)

    p = sub.add_parser("berry", parents=[common], help="Wilson-loop phase around a CSV loop")
    p.add_argument("--loop", required=True)
    p.add_argument("--level", type=int, default=0)
    _geometry_args(p)
    p.set_defaults(func=cmd_berry)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        args.func(args)
    except (ConvergenceError, CrossingNotConverged, NoReferenceClass, ArithmeticError) as exc:
        print(f"dimerhex: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ValueError, IndexError, KeyError, OSError) as exc:
        # DegenerateLoop is a refused precondition, reported like bad input
        print(f"dimerhex: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
