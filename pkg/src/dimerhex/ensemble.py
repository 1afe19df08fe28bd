"""Chains of hexamers, degeneracy bookkeeping and discrete Berry phases."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .locus import locus_F, locus_couplings, locus_energy
from .model import CouplingSet, DecayLaw, build_full_hamiltonian, build_layout, build_model_hamiltonian
from .spectral import DEFAULT_TOL, cluster_degeneracies, eigensolve

LOCUS_ATOL = 1e-12
DEFAULT_WINDOW = 1e-3
# consecutive loop states overlapping less than this are treated as a level
# crossing between samples (or a loop sampled too coarsely)
MIN_OVERLAP = 1e-3


class NoReferenceClass(LookupError):
    pass


class DegenerateLoop(ValueError):
    pass


def on_locus(c: CouplingSet, atol: float = LOCUS_ATOL) -> bool:
    return c.dd > 0 and c.phi == 0 and abs(c.ds - c.dd * locus_F(c.dh / c.dd)) <= atol * c.dd


@dataclass(frozen=True)
class ChainSpec:
    block_couplings: tuple
    inter_hop: float = 0.0
    hop_site: int = 0
    n_critical: int | None = None

    def __post_init__(self):
        blocks = tuple(self.block_couplings)
        object.__setattr__(self, "block_couplings", blocks)
        if not blocks:
            raise ValueError("a chain needs at least one polymer")
        if not (math.isfinite(self.inter_hop) and self.inter_hop >= 0):
            raise ValueError("inter_hop must be finite and non-negative")
        if not 0 <= self.hop_site < 6:
            raise ValueError("hop_site must index one of the six sites")
        counted = sum(on_locus(c) for c in blocks)
        if self.n_critical is None:
            object.__setattr__(self, "n_critical", counted)
        elif self.n_critical != counted:
            raise ValueError(f"n_critical={self.n_critical} but {counted} blocks lie on the locus")

    @property
    def n_polymers(self) -> int:
        return len(self.block_couplings)


def critical_chain(n: int, k: int, eps: float = 0.0, x: float = 1.9, detune: float = 0.1, hop_site: int = 0) -> ChainSpec:
    """``n`` blocks, the first ``k`` on the locus at ``x``, the rest with ds
    raised by ``detune``."""
    if n < 1:
        raise ValueError("n must be at least 1")
    if not 0 <= k <= n:
        raise ValueError("need 0 <= k <= n")
    blocks = [locus_couplings(x) if i < k else locus_couplings(x, delta=detune) for i in range(n)]
    return ChainSpec(block_couplings=tuple(blocks), inter_hop=eps, hop_site=hop_site, n_critical=k)


def build_chain(spec: ChainSpec) -> np.ndarray:
    """Block-diagonal model Hamiltonians joined by an open-chain hop ``inter_hop``
    between ``hop_site`` of block i and the same site of block i + 1."""
    n = spec.n_polymers
    h = np.zeros((6 * n, 6 * n), dtype=complex)
    for i, c in enumerate(spec.block_couplings):
        h[6 * i : 6 * i + 6, 6 * i : 6 * i + 6] = build_model_hamiltonian(c)
    for i in range(n - 1):
        a, b = 6 * i + spec.hop_site, 6 * (i + 1) + spec.hop_site
        h[a, b] = h[b, a] = spec.inter_hop
    return h


@dataclass(frozen=True)
class ScalingReport:
    g: int
    n: int
    l_ratio: float
    action: int

    def as_dict(self) -> dict:
        return {"g": self.g, "n": self.n, "l_ratio": self.l_ratio, "action": self.action}


def reference_energy(spec: ChainSpec) -> float:
    for c in spec.block_couplings:
        if on_locus(c):
            return c.e0 + c.dd * locus_energy(c.dh / c.dd)
    raise NoReferenceClass("no block lies on the locus, so there is no triplet energy to track")


def scaling_report(spec: ChainSpec, tol: float = DEFAULT_TOL, window: float = DEFAULT_WINDOW, energy: float | None = None) -> ScalingReport:
    """Degeneracy g of the class nearest the single-block triplet energy.

    The class representative must fall within ``window`` of the reference.
    The action is reported in units of hbar.
    """
    ref = reference_energy(spec) if energy is None else energy
    classes = cluster_degeneracies(eigensolve(build_chain(spec), tol), tol)
    best = classes.nearest(ref)
    if abs(best.energy - ref) > window:
        raise NoReferenceClass(f"no class within {window} of E = {ref}")
    g = best.multiplicity
    n = spec.n_polymers
    return ScalingReport(g=g, n=n, l_ratio=g / n, action=3 * g)


@dataclass(frozen=True)
class ParameterLoop:
    """Closed loop of coupling sets, or of twist angles on a fixed geometry."""

    points: tuple
    L: float = 1.0
    R: float = 1.0
    law: DecayLaw = field(default_factory=DecayLaw)
    e0: float = 0.0

    def __post_init__(self):
        pts = tuple(self.points)
        object.__setattr__(self, "points", pts)
        if len(pts) < 4:
            raise ValueError("a loop needs at least three points plus the closing point")
        if pts[0] != pts[-1]:
            raise ValueError("loop is not closed (last point must equal the first)")
        kinds = {isinstance(p, CouplingSet) for p in pts}
        if len(kinds) != 1:
            raise ValueError("loop mixes coupling sets and angles")

    @property
    def is_geometric(self) -> bool:
        return not isinstance(self.points[0], CouplingSet)

    def hamiltonian(self, p) -> np.ndarray:
        if self.is_geometric:
            return build_full_hamiltonian(build_layout(self.L, self.R, float(p)), self.law, self.e0)
        return build_model_hamiltonian(p)

    def reversed(self) -> "ParameterLoop":
        return ParameterLoop(points=self.points[::-1], L=self.L, R=self.R, law=self.law, e0=self.e0)


def loop_states(loop: ParameterLoop, level_index: int, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Eigenvectors of the tracked level at each open point of the loop."""
    states = []
    for i, p in enumerate(loop.points[:-1]):
        s = eigensolve(loop.hamiltonian(p), tol)
        e = s.eigenvalues
        if not 0 <= level_index < len(e):
            raise IndexError(level_index)
        gaps = [abs(e[level_index] - e[j]) for j in (level_index - 1, level_index + 1) if 0 <= j < len(e)]
        if gaps and min(gaps) <= 10 * tol:
            raise DegenerateLoop(f"level {level_index} is degenerate at loop point {i} (gap {min(gaps):.3e})")
        states.append(s.eigenvectors[:, level_index])
    return np.array(states)


def wilson_phase(states) -> float:
    """-arg of the product of successive overlaps around the closed loop,
    in (-pi, pi]."""
    states = np.asarray(states)
    prod = 1.0 + 0j
    for i in range(len(states)):
        ov = np.vdot(states[i], states[(i + 1) % len(states)])
        if abs(ov) < MIN_OVERLAP:
            raise DegenerateLoop(f"overlap {abs(ov):.3e} between loop points {i} and {(i + 1) % len(states)}; "
                                 "the level changes character between samples")
        prod *= ov
    phase = -float(np.angle(prod))
    return math.pi if phase <= -math.pi else phase + 0.0


def berry_phase(loop: ParameterLoop, level_index: int = 0, tol: float = DEFAULT_TOL) -> float:
    return wilson_phase(loop_states(loop, level_index, tol))
