"""Named, reproducible experiment presets and their output bundles.

A bundle is a directory holding ``manifest.json`` plus CSV / PGM files.  The
manifest stores the fully resolved parameters, so ``run_manifest`` on it
rewrites the same bundle byte for byte.
"""
from __future__ import annotations

import dataclasses
import itertools
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import io
from .algebra import triplet_states
from .locus import (
    NoCrossing,
    find_critical_angle,
    locus_couplings,
    locus_energy,
    sector_energies,
    sweep_geometry,
    sweep_locus,
)
from .model import CouplingSet, DecayLaw, build_model_hamiltonian
from .spectral import cluster_degeneracies, eigensolve
from .wigner import FULL_LABELS, invariant_rows, support, wigner_full

# the only parameter values quoted for the three regimes
TRIPLE_X = 1.9
STAR_DETUNE = 0.1
FLUX_PHI = 1e-9 * math.pi / 2

_REGIME_COMMON = {"dd": 1.0, "e0": 0.0, "tol": 1e-9, "seed": 0, "n_samples": 100, "eps_rel": 1e-8}
_GEOMETRY = {"L": 1.0, "R": 1.0, "delta0": 1.0, "lambda": 1.0, "e0": 0.0, "tol": 1e-9}

DEFAULTS = {
    "regime-i": dict(_REGIME_COMMON),
    "regime-ii": dict(_REGIME_COMMON),
    "regime-iii": dict(_REGIME_COMMON, tol=1e-12),
    "fig2a": dict(_GEOMETRY, start=0.0, stop=math.pi / 2, points=65),
    "fig2c": {"dd": 1.0, "e0": 0.0, "start": 0.0, "stop": 3.0, "points": 50, "tol": 1e-9},
    "fig1.1": dict(_GEOMETRY, start=0.0, stop=math.pi / 2, points=65, r_start=1.0, r_stop=3.0, r_points=9),
    "hexagon": {"dd": 1.0, "dh": 1.0, "ds": 0.0, "phi": 0.0, "e0": 0.0, "tol": 1e-9},
    "star": {"dd": 1.0, "dh": 0.0, "ds": 1.0, "phi": 0.0, "e0": 0.0, "tol": 1e-9},
}
FIXED = {
    "regime-i": {"x": TRIPLE_X},
    "regime-ii": {"x": TRIPLE_X, "delta": STAR_DETUNE},
    "regime-iii": {"x": TRIPLE_X, "phi": FLUX_PHI},
}
_INTEGER_KEYS = {"seed", "n_samples", "points", "r_points"}


@dataclass(frozen=True)
class ExperimentPreset:
    name: str
    overrides: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.name not in DEFAULTS:
            raise ValueError(f"unknown preset {self.name!r}; choose from {sorted(DEFAULTS)}")
        ov = dict(self.overrides)
        fixed = FIXED.get(self.name, {})
        for k, v in ov.items():
            if k in fixed:
                raise ValueError(f"{k} is fixed at {fixed[k]!r} in preset {self.name}")
            if k not in DEFAULTS[self.name]:
                raise ValueError(f"preset {self.name} has no parameter {k!r}")
            if k in _INTEGER_KEYS:
                if float(v) != int(float(v)):
                    raise ValueError(f"{k} must be an integer")
                ov[k] = int(float(v))
            else:
                ov[k] = float(v)
                if not math.isfinite(ov[k]):
                    raise ValueError(f"{k} must be finite")
        object.__setattr__(self, "overrides", ov)
        self._validate(self.params)

    @property
    def params(self) -> dict:
        return {**DEFAULTS[self.name], **FIXED.get(self.name, {}), **self.overrides}

    def _validate(self, p):
        if p.get("tol", 1.0) <= 0:
            raise ValueError("tol must be positive")
        if "n_samples" in p and p["n_samples"] < 1:
            raise ValueError("n_samples must be at least 1")
        if "eps_rel" in p and not 0 < p["eps_rel"] < 1:
            raise ValueError("eps_rel must lie in (0, 1)")
        if "points" in p and p["points"] < 2:
            raise ValueError("a sweep needs at least 2 points")
        if "r_points" in p and p["r_points"] < 1:
            raise ValueError("r_points must be at least 1")
        # couplings and geometry check themselves
        if self.name.startswith("regime") or self.name in ("hexagon", "star"):
            self.couplings()
        if "lambda" in p:
            DecayLaw(p["delta0"], p["lambda"])

    def couplings(self) -> CouplingSet:
        p = self.params
        if self.name in ("hexagon", "star"):
            return CouplingSet(e0=p["e0"], dd=p["dd"], dh=p["dh"], ds=p["ds"], phi=p["phi"])
        c = locus_couplings(p["x"], dd=p["dd"], e0=p["e0"], delta=p.get("delta", 0.0))
        return c.replace(phi=p.get("phi", 0.0))


def parse_overrides(pairs) -> dict:
    out = {}
    for item in pairs or ():
        if "=" not in item:
            raise ValueError(f"override must look like key=value, got {item!r}")
        k, v = (s.strip() for s in item.split("=", 1))
        try:
            out[k] = float(v)
        except ValueError:
            raise ValueError(f"override {k} is not a number: {v!r}") from None
    return out


def _write(out_dir: Path, name: str, text: str) -> None:
    (out_dir / name).write_text(text, encoding="utf-8")


def _labels(rows) -> list:
    return [list(FULL_LABELS[r]) for r in sorted(rows)]


def _grids(out_dir: Path, states, prefix: str, eps_rel: float) -> list:
    supports = []
    for i, psi in enumerate(states):
        g = wigner_full(psi)
        _write(out_dir, f"{prefix}{i}.csv", io.grid_to_csv(g))
        _write(out_dir, f"{prefix}{i}.pgm", io.grid_to_pgm(g))
        supports.append(support(g, eps_rel))
    return supports


def _spectrum(out_dir: Path, h, tol):
    s = eigensolve(h, tol)
    classes = cluster_degeneracies(s, tol)
    _write(out_dir, "spectrum.csv", io.spectrum_to_csv(s, classes))
    return s, classes


def _regime_i(p, c, out_dir):
    h = build_model_hamiltonian(c)
    s, classes = _spectrum(out_dir, h, p["tol"])
    trip = triplet_states(c, p["tol"])
    _grids(out_dir, trip.T, "triplet_", p["eps_rel"])
    rows = invariant_rows(trip, n_samples=p["n_samples"], seed=p["seed"], eps_rel=p["eps_rel"])
    low = classes.classes[0]
    return {
        "triple_energy": low.energy,
        "expected_energy": c.e0 + c.dd * locus_energy(c.dh / c.dd),
        "multiplicity": low.multiplicity,
        "pattern": classes.pattern,
        "invariant_rows": _labels(rows),
        "n_invariant_rows": len(rows),
    }


def _regime_ii(p, c, out_dir):
    h = build_model_hamiltonian(c)
    s, classes = _spectrum(out_dir, h, p["tol"])
    lowest = classes.classes[:2]
    supports = _grids(out_dir, s.eigenvectors[:, :3].T, "state_", p["eps_rel"])
    singlet = next(cl for cl in lowest if cl.multiplicity == 1)
    sup = supports[singlet.members[0]]
    return {
        "lowest_multiplicities": [cl.multiplicity for cl in lowest],
        "pattern": classes.pattern,
        "singlet_index": singlet.members[0],
        "singlet_fringes": sup.fringes,
        "singlet_rows": _labels(sup.rows),
        "fringes": [sp.fringes for sp in supports],
    }


def _regime_iii(p, c, out_dir):
    h = build_model_hamiltonian(c)
    s, classes = _spectrum(out_dir, h, p["tol"])
    supports = _grids(out_dir, s.eigenvectors[:, :3].T, "state_", p["eps_rel"])
    overlaps = {f"{i}-{j}": len(supports[i].cells & supports[j].cells) for i, j in itertools.combinations(range(3), 2)}
    sec = sector_energies(h)
    splitting = abs(sec[1] - sec[2])
    e = s.eigenvalues
    return {
        "pattern": classes.pattern,
        "doublet_splitting": splitting,
        "adjacent_gaps": [float(e[1] - e[0]), float(e[2] - e[1])],
        "splitting_window": [1e-12, 1e-10],
        "splitting_in_window": bool(1e-12 <= splitting <= 1e-10),
        "support_intersections": overlaps,
        "pairwise_disjoint": all(v == 0 for v in overlaps.values()),
        "support_rows": [_labels(sp.rows) for sp in supports],
    }


def _law(p) -> DecayLaw:
    return DecayLaw(amplitude=p["delta0"], length_scale=p["lambda"])


def _theta_c(p, R, model):
    try:
        return find_critical_angle(p["L"], R, _law(p), p["e0"], model=model)
    except NoCrossing:
        return None


def _fig2a(p, out_dir):
    grid = np.linspace(p["start"], p["stop"], p["points"])
    table = sweep_geometry("theta", grid, L=p["L"], R=p["R"], law=_law(p), e0=p["e0"], tol=p["tol"])
    _write(out_dir, "sweep.csv", io.sweep_to_csv(table))
    return {"theta_c": _theta_c(p, p["R"], False), "patterns": sorted(set(table.patterns))}


def _fig2c(p, out_dir):
    grid = np.linspace(p["start"], p["stop"], p["points"])
    table = sweep_locus(grid, dd=p["dd"], e0=p["e0"], tol=p["tol"])
    _write(out_dir, "sweep.csv", io.sweep_to_csv(table))
    low = table.lowest_multiplicities()
    return {"rows": len(low), "lowest_multiplicities": sorted(set(low)), "all_triplets": all(m == 3 for m in low)}


def _fig11(p, out_dir):
    grid = np.linspace(p["start"], p["stop"], p["points"])
    kw = dict(L=p["L"], R=p["R"], law=_law(p), e0=p["e0"], tol=p["tol"])
    _write(out_dir, "sweep_full.csv", io.sweep_to_csv(sweep_geometry("theta", grid, model=False, **kw)))
    _write(out_dir, "sweep_model.csv", io.sweep_to_csv(sweep_geometry("theta", grid, model=True, **kw)))
    radii = np.linspace(p["r_start"], p["r_stop"], p["r_points"])
    rows = ["R,theta_c_full,theta_c_model"]
    crit = []
    for R in radii:
        full, mod = _theta_c(p, float(R), False), _theta_c(p, float(R), True)
        crit.append({"R": float(R), "full": full, "model": mod})
        rows.append(",".join([io.fmt(R)] + ["none" if v is None else io.fmt(v) for v in (full, mod)]))
    _write(out_dir, "critical_angles.csv", "\n".join(rows) + "\n")
    return {"critical_angles": crit}


def _single(p, c, out_dir):
    s, classes = _spectrum(out_dir, build_model_hamiltonian(c), p["tol"])
    return {"eigenvalues": s.eigenvalues.tolist(), "pattern": classes.pattern}


def run_preset(preset: ExperimentPreset, out_dir) -> dict:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    p = preset.params
    if preset.name == "regime-i":
        results = _regime_i(p, preset.couplings(), out_dir)
    elif preset.name == "regime-ii":
        results = _regime_ii(p, preset.couplings(), out_dir)
    elif preset.name == "regime-iii":
        results = _regime_iii(p, preset.couplings(), out_dir)
    elif preset.name == "fig2a":
        results = _fig2a(p, out_dir)
    elif preset.name == "fig2c":
        results = _fig2c(p, out_dir)
    elif preset.name == "fig1.1":
        results = _fig11(p, out_dir)
    else:
        results = _single(p, preset.couplings(), out_dir)
    manifest = {"preset": preset.name, "params": p, "results": results}
    if preset.name.startswith("regime") or preset.name in ("hexagon", "star"):
        manifest["couplings"] = dataclasses.asdict(preset.couplings())
    _write(out_dir, "manifest.json", io.dumps(manifest))
    return manifest


def run_regime(preset: ExperimentPreset, out_dir) -> dict:
    if not preset.name.startswith("regime"):
        raise ValueError(f"{preset.name} is not a regime preset")
    return run_preset(preset, out_dir)


def preset_from_manifest(path) -> ExperimentPreset:
    m = json.loads(Path(path).read_text(encoding="utf-8"))
    name = m["preset"]
    fixed = FIXED.get(name, {})
    for k, v in fixed.items():
        if m["params"].get(k) != v:
            raise ValueError(f"manifest {k}={m['params'].get(k)!r} disagrees with the fixed value {v!r}")
    return ExperimentPreset(name, {k: v for k, v in m["params"].items() if k not in fixed})


def run_manifest(path, out_dir) -> dict:
    return run_preset(preset_from_manifest(path), out_dir)
