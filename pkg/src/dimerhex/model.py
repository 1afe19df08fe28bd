"""Six-site Hamiltonians of the dimeric hexagonal complex.

Sites are numbered 0..5 (1..6 in the printed matrix) in dimer-major order
``(1,1), (1,2), (2,1), (2,2), (3,1), (3,2)``.  Bonds:

* intra-dimer ``dd``: (1,2), (3,4), (5,6)
* hexagon ring ``dh``: (2,3), (4,5), (6,1)
* star triangle ``ds``: (2,4), (2,6), (4,6)

so the inner (star) sites are the ``n = 2`` members of each dimer.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

N_SITES = 6

DIMER_BONDS = ((0, 1), (2, 3), (4, 5))
# oriented (m,2) -> (m+1,1) so the flux phase circulates consistently
RING_BONDS = ((1, 2), (3, 4), (5, 0))
STAR_BONDS = ((1, 3), (1, 5), (3, 5))

# sites 1..6 -> 3,4,5,6,1,2 (dimer m -> m+1)
SHIFT_PERM = (2, 3, 4, 5, 0, 1)

HERMITIAN_ATOL = 1e-14


def _check_finite(**values):
    for name, v in values.items():
        if not math.isfinite(v):
            raise ValueError(f"{name} must be finite, got {v!r}")


@dataclass(frozen=True)
class CouplingSet:
    """Parameters of the model Hamiltonian.

    ``phi`` is the flux phase attached to each hexagon bond, in radians.
    """

    e0: float = 0.0
    dd: float = 1.0
    dh: float = 0.0
    ds: float = 0.0
    phi: float = 0.0

    def __post_init__(self):
        _check_finite(e0=self.e0, dd=self.dd, dh=self.dh, ds=self.ds, phi=self.phi)
        if self.dd < 0 or self.dh < 0 or self.ds < 0:
            raise ValueError("couplings dd, dh, ds must be non-negative")
        if not (-math.pi < self.phi <= math.pi):
            raise ValueError(f"phi must lie in (-pi, pi], got {self.phi!r}")

    def replace(self, **changes) -> "CouplingSet":
        values = dict(e0=self.e0, dd=self.dd, dh=self.dh, ds=self.ds, phi=self.phi)
        values.update(changes)
        return CouplingSet(**values)


@dataclass(frozen=True)
class DecayLaw:
    """Exponential distance law ``amplitude * exp(-r / length_scale)``."""

    amplitude: float = 1.0
    length_scale: float = 1.0

    def __post_init__(self):
        _check_finite(amplitude=self.amplitude, length_scale=self.length_scale)
        if self.amplitude <= 0 or self.length_scale <= 0:
            raise ValueError("amplitude and length_scale must be positive")

    def coupling(self, r):
        return self.amplitude * np.exp(-np.asarray(r, dtype=float) / self.length_scale)


@dataclass(frozen=True)
class SiteLayout:
    positions: np.ndarray = field(repr=False)
    dimer_length: float
    ring_radius: float
    twist: float

    def distance_matrix(self) -> np.ndarray:
        diff = self.positions[:, None, :] - self.positions[None, :, :]
        return np.sqrt((diff**2).sum(axis=-1))


def check_hermitian(h, atol: float = HERMITIAN_ATOL) -> np.ndarray:
    h = np.asarray(h)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {h.shape}")
    if not np.all(np.isfinite(h)):
        raise ValueError("matrix has non-finite entries")
    dev = np.max(np.abs(h - h.conj().T)) if h.size else 0.0
    if dev > atol:
        raise ValueError(f"matrix is not Hermitian (max |H - H^+| = {dev:.3e})")
    return h


def shift_matrix(n_dimers: int = 3) -> np.ndarray:
    """Permutation matrix S with S|m,n> = |m+1,n>."""
    dim = 2 * n_dimers
    s = np.zeros((dim, dim))
    for i in range(dim):
        s[(i + 2) % dim, i] = 1.0
    return s


def build_model_hamiltonian(c: CouplingSet) -> np.ndarray:
    """The 6x6 model Hamiltonian, as complex128.

    With ``phi != 0`` each ring bond (m,2) -> (m+1,1) carries ``dh * exp(i phi)``
    in the same orientation, so the hexagon encloses ``3 phi`` and C3 survives.
    The imaginary part is exactly zero when ``phi == 0``.
    """
    h = np.zeros((N_SITES, N_SITES))
    np.fill_diagonal(h, c.e0)
    for a, b in DIMER_BONDS:
        h[a, b] = h[b, a] = c.dd
    for a, b in STAR_BONDS:
        h[a, b] = h[b, a] = c.ds
    for a, b in RING_BONDS:
        h[a, b] = h[b, a] = c.dh
    h = h.astype(complex)
    if c.phi != 0.0:
        phase = complex(math.cos(c.phi), math.sin(c.phi))
        for a, b in RING_BONDS:
            h[a, b] = c.dh * phase
            h[b, a] = c.dh * phase.conjugate()
    return h


def build_layout(L: float, R: float, theta: float) -> SiteLayout:
    """Place three dimers of length ``L`` on a circle of radius ``R``.

    Dimer centres sit at polar angles 90, 210 and 330 degrees.  The dimer axis
    is the counter-clockwise tangent rotated inward by ``theta``: site (m,2)
    lies at ``centre + L/2 * u`` and (m,1) at ``centre - L/2 * u``.  At
    ``theta = 0`` the (m,2) site faces (m+1,1) along the ring; at
    ``theta = pi/2`` the (m,2) sites point at the origin (star).
    """
    _check_finite(L=L, R=R, theta=theta)
    if L <= 0 or R <= 0:
        raise ValueError("L and R must be positive")
    if not (0.0 <= theta <= math.pi / 2):
        raise ValueError(f"theta must lie in [0, pi/2], got {theta!r}")
    if theta == math.pi / 2 and 2 * R <= L:
        raise ValueError("inner sites would reach the origin (2R <= L at theta = pi/2)")
    positions = np.empty((N_SITES, 2))
    for m in range(3):
        angle = math.pi / 2 + 2 * math.pi * m / 3
        radial = np.array([math.cos(angle), math.sin(angle)])
        tangent = np.array([-math.sin(angle), math.cos(angle)])
        axis = math.cos(theta) * tangent - math.sin(theta) * radial
        centre = R * radial
        positions[2 * m] = centre - 0.5 * L * axis
        positions[2 * m + 1] = centre + 0.5 * L * axis
    return SiteLayout(positions=positions, dimer_length=float(L), ring_radius=float(R), twist=float(theta))


def build_full_hamiltonian(layout: SiteLayout, law: DecayLaw, e0: float = 0.0) -> np.ndarray:
    """All-pairs tight-binding Hamiltonian with exponentially decaying hopping."""
    _check_finite(e0=e0)
    h = law.coupling(layout.distance_matrix())
    np.fill_diagonal(h, e0)
    return h.astype(complex)


def model_couplings_from_layout(layout: SiteLayout, law: DecayLaw, e0: float = 0.0) -> CouplingSet:
    """Nearest-structure couplings of a layout: keep only the three bond families
    of the model Hamiltonian and drop the remaining pairs."""
    d = layout.distance_matrix()
    coupling = lambda a, b: float(law.coupling(d[a, b]))
    return CouplingSet(
        e0=e0,
        dd=coupling(*DIMER_BONDS[0]),
        dh=coupling(*RING_BONDS[0]),
        ds=coupling(*STAR_BONDS[0]),
    )
