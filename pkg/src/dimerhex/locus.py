"""Triple-degeneracy locus, critical twist angles and spectral sweeps."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import (
    CouplingSet,
    DecayLaw,
    build_full_hamiltonian,
    build_layout,
    build_model_hamiltonian,
    model_couplings_from_layout,
)
from .spectral import DEFAULT_TOL, U_C3, cluster_degeneracies, eigensolve

BISECTION_MAX_ITER = 200
BRACKET_WIDTH = 1e-12
SCAN_POINTS = 65


class NoCrossing(Exception):
    """The lower singlet and doublet never exchange order on [0, pi/2]."""


class CrossingNotConverged(RuntimeError):
    pass


@dataclass(frozen=True)
class LocusPoint:
    x: float
    f: float


def locus_F(x: float) -> float:
    """Star/intra-dimer ratio that makes the lower doublet and singlet meet."""
    if not x >= 0:
        raise ValueError(f"x must be non-negative, got {x!r}")
    return x / math.sqrt(1.0 + x * x)


def locus_point(x: float) -> LocusPoint:
    return LocusPoint(x=float(x), f=locus_F(x))


def locus_energy(x: float) -> float:
    """Energy of the triplet on the locus, in units of dd."""
    if not x >= 0:
        raise ValueError(f"x must be non-negative, got {x!r}")
    return -math.sqrt(1.0 + x * x)


def locus_couplings(x: float, dd: float = 1.0, e0: float = 0.0, delta: float = 0.0) -> CouplingSet:
    """Coupling set on the locus (optionally detuned by ``delta`` in ds/dd)."""
    if not dd > 0:
        raise ValueError("dd must be positive on the locus")
    return CouplingSet(e0=e0, dd=dd, dh=x * dd, ds=(locus_F(x) + delta) * dd)


def _lowest_2x2(b: np.ndarray) -> float:
    mean = 0.5 * (b[0, 0].real + b[1, 1].real)
    half = 0.5 * (b[0, 0].real - b[1, 1].real)
    return mean - math.hypot(half, abs(b[0, 1]))


def sector_energies(h: np.ndarray) -> dict:
    """Lowest energy in each C3 sector of a C3-symmetric 6x6 Hamiltonian.

    The sector with trivial phase (k = 3) holds the singlets, k = 1 and k = 2
    the two partners of each doublet.
    """
    out = {}
    for k in range(3):
        # basis |k, n> = sum_m U_C3[m, k] |m, n>
        b = np.zeros((6, 2), dtype=complex)
        for n in range(2):
            b[n::2, n] = U_C3[:, k]
        out[k + 1] = _lowest_2x2(b.conj().T @ h @ b)
    return out


def singlet_doublet_gap(h: np.ndarray) -> float:
    """Lower singlet minus lower doublet energy."""
    e = sector_energies(h)
    return e[3] - e[1]


def _resolution_floor(h: np.ndarray) -> float:
    return 1e3 * np.finfo(float).eps * float(np.max(np.abs(h)))


def find_critical_angle(L: float, R: float, law: DecayLaw, e0: float = 0.0, scan_points: int = SCAN_POINTS,
                        model: bool = False) -> float:
    """Twist angle where the lower singlet and doublet of the all-pairs
    Hamiltonian (or, with ``model=True``, its three-coupling reduction) cross,
    by bracketed bisection.

    Singlet and doublet are told apart by their C3 sector, which stays
    unambiguous through the crossing.  Gaps inside the roundoff band of the
    matrix do not count as a sign, so exponentially separated dimers report
    :class:`NoCrossing`.
    """

    def gap(theta):
        layout = build_layout(L, R, theta)
        if model:
            h = build_model_hamiltonian(model_couplings_from_layout(layout, law, e0))
        else:
            h = build_full_hamiltonian(layout, law, e0)
        g = singlet_doublet_gap(h)
        return g, (0 if abs(g) <= _resolution_floor(h) else (1 if g > 0 else -1))

    grid = np.linspace(0.0, math.pi / 2, scan_points)
    # at theta = pi/2 with 2R <= L the layout is invalid; stay just inside
    if 2 * R <= L:
        grid[-1] = math.nextafter(math.pi / 2, 0.0)
    signs = [gap(t)[1] for t in grid]
    bracket = None
    for i in range(len(grid) - 1):
        if signs[i] * signs[i + 1] < 0:
            bracket = (grid[i], grid[i + 1], signs[i])
            break
        if signs[i] != 0 and signs[i + 1] == 0:
            # exact zero on the grid
            j = i + 1
            while j < len(grid) and signs[j] == 0:
                j += 1
            if j < len(grid) and signs[j] * signs[i] < 0:
                bracket = (grid[i], grid[j], signs[i])
                break
    if bracket is None:
        raise NoCrossing(f"no singlet/doublet crossing for L={L}, R={R}, law={law}")
    lo, hi, s_lo = bracket
    for _ in range(BISECTION_MAX_ITER):
        if hi - lo < BRACKET_WIDTH:
            break
        mid = 0.5 * (lo + hi)
        g, s = gap(mid)
        if s == 0:
            lo = hi = mid
            break
        if s == s_lo:
            lo = mid
        else:
            hi = mid
    else:
        raise CrossingNotConverged(f"bracket [{lo}, {hi}] after {BISECTION_MAX_ITER} iterations")
    theta_c = 0.5 * (lo + hi)
    if abs(gap(theta_c)[0]) >= 1e-11:
        raise CrossingNotConverged(f"gap {gap(theta_c)[0]:.3e} at theta_c={theta_c}")
    return float(theta_c)


@dataclass(frozen=True)
class SweepTable:
    parameter: str
    values: np.ndarray
    energies: np.ndarray  # (n_points, 6)
    patterns: tuple
    tol: float = DEFAULT_TOL

    def lowest_multiplicities(self) -> list:
        return [int(p.split("|")[0]) for p in self.patterns]


def _validate_grid(grid) -> np.ndarray:
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise ValueError("sweep grid is empty")
    if grid.size < 2:
        raise ValueError("sweep grid needs at least 2 points")
    d = np.diff(grid)
    if not (np.all(d > 0) or np.all(d < 0)):
        raise ValueError("sweep grid must be strictly monotone")
    return grid


def _table(name, grid, hamiltonians, tol) -> SweepTable:
    energies, patterns = [], []
    for h in hamiltonians:
        s = eigensolve(h, tol)
        energies.append(s.eigenvalues)
        patterns.append(cluster_degeneracies(s, tol).pattern)
    return SweepTable(parameter=name, values=grid, energies=np.array(energies), patterns=tuple(patterns), tol=tol)


def sweep_couplings(parameter: str, grid, base: CouplingSet = CouplingSet(), tol: float = DEFAULT_TOL) -> SweepTable:
    """Model-Hamiltonian sweep over one coupling (``e0``, ``dd``, ``dh``, ``ds``,
    ``phi``) with the others fixed at ``base``."""
    grid = _validate_grid(grid)
    if parameter not in ("e0", "dd", "dh", "ds", "phi"):
        raise ValueError(f"unknown coupling parameter {parameter!r}")
    hs = [build_model_hamiltonian(base.replace(**{parameter: float(v)})) for v in grid]
    return _table(parameter, grid, hs, tol)


def sweep_locus(grid, dd: float = 1.0, e0: float = 0.0, tol: float = DEFAULT_TOL) -> SweepTable:
    """Walk along the locus: for each dh set ds = dd * F(dh / dd)."""
    grid = _validate_grid(grid)
    hs = [build_model_hamiltonian(locus_couplings(v / dd, dd=dd, e0=e0)) for v in grid]
    return _table("dh", grid, hs, tol)


def sweep_geometry(parameter: str, grid, L: float = 1.0, R: float = 1.0, theta: float = 0.0, law: DecayLaw = DecayLaw(),
                   e0: float = 0.0, model: bool = False, tol: float = DEFAULT_TOL) -> SweepTable:
    """Sweep ``theta`` or ``R`` of a geometric configuration.

    With ``model=True`` each layout is reduced to its three bond families and
    fed to the model Hamiltonian instead of the all-pairs one.
    """
    grid = _validate_grid(grid)
    if parameter not in ("theta", "R"):
        raise ValueError(f"unknown geometric parameter {parameter!r}")
    hs = []
    for v in grid:
        geo = dict(L=L, R=R, theta=theta)
        geo[parameter] = float(v)
        layout = build_layout(**geo)
        if model:
            hs.append(build_model_hamiltonian(model_couplings_from_layout(layout, law, e0)))
        else:
            hs.append(build_full_hamiltonian(layout, law, e0))
    return _table(parameter, grid, hs, tol)


def compare_model_full(parameter: str, grid, **kwargs) -> tuple:
    """All-pairs and model tables on the same grid."""
    return sweep_geometry(parameter, grid, model=False, **kwargs), sweep_geometry(parameter, grid, model=True, **kwargs)
