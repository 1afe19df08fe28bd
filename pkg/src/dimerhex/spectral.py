"""Exact diagonalization: the symmetry-adapted pipeline, the closed-form
spectrum, a cyclic Jacobi eigensolver and degeneracy clustering."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import CouplingSet, check_hermitian

HADAMARD = np.array([[1.0, 1.0], [1.0, -1.0]]) / math.sqrt(2.0)

# (1,+),(2,+),(3,+),(1,-),(2,-),(3,-) from the dimer-major (m,+/-) basis
PM_ORDER = (0, 2, 4, 1, 3, 5)

_W = complex(math.cos(2 * math.pi / 3), math.sin(2 * math.pi / 3))
U_C3 = np.array(
    [
        [1.0, 1.0, 1.0],
        [_W, _W * _W, 1.0],
        [_W * _W, _W, 1.0],
    ]
) / math.sqrt(3.0)

DEFAULT_TOL = 1e-9
JACOBI_TOL = 1e-14
MAX_SWEEPS = 100


class ConvergenceError(RuntimeError):
    def __init__(self, sweeps: int, off_norm: float):
        super().__init__(f"Jacobi did not converge after {sweeps} sweeps (off-norm {off_norm:.3e})")
        self.sweeps = sweeps
        self.off_norm = off_norm


def _require_dim6(h):
    h = np.asarray(h)
    if h.shape != (6, 6):
        raise ValueError(f"expected a 6x6 matrix, got shape {h.shape}")
    return h


def hadamard_unitary() -> np.ndarray:
    return np.kron(np.eye(3), HADAMARD)


def permutation_matrix() -> np.ndarray:
    p = np.zeros((6, 6))
    for new, old in enumerate(PM_ORDER):
        p[old, new] = 1.0
    return p


def c3_unitary() -> np.ndarray:
    return np.kron(np.eye(2), U_C3)


def hadamard_step(h) -> np.ndarray:
    h = _require_dim6(h)
    u = hadamard_unitary()
    return u.T @ h @ u


def permute_step(h1) -> np.ndarray:
    h1 = _require_dim6(h1)
    idx = np.array(PM_ORDER)
    return h1[np.ix_(idx, idx)]


@dataclass(frozen=True)
class PipelineTrace:
    h1: np.ndarray
    h2: np.ndarray
    h3: np.ndarray
    u_total: np.ndarray

    @property
    def x_plus(self):
        return self.h3[:3, :3]

    @property
    def x_minus(self):
        return self.h3[3:, 3:]

    @property
    def y(self):
        return self.h3[:3, 3:]

    def block(self, k: int) -> np.ndarray:
        """The uncoupled 2x2 block on basis states (k, k+3), k in {0, 1, 2}."""
        idx = np.array([k, k + 3])
        return self.h3[np.ix_(idx, idx)]


def c3_step(h2) -> PipelineTrace:
    """Rotate both 3x3 diagonal blocks into the C3 eigenbasis.

    The earlier intermediates are recovered by undoing the (fixed, exact)
    permutation, so the trace is complete from ``h2`` alone.
    """
    h2 = _require_dim6(h2)
    uc = c3_unitary()
    h3 = uc.conj().T @ h2 @ uc
    inv = np.argsort(PM_ORDER)
    h1 = h2[np.ix_(inv, inv)]
    u_total = hadamard_unitary() @ permutation_matrix() @ uc
    return PipelineTrace(h1=h1, h2=h2, h3=h3, u_total=u_total)


def run_pipeline(h) -> PipelineTrace:
    return c3_step(permute_step(hadamard_step(h)))


def closed_form_spectrum(c: CouplingSet) -> dict:
    """Lower/upper doublet and singlet energies of the model Hamiltonian."""
    if c.phi != 0.0:
        raise ValueError("closed-form spectrum requires phi = 0")
    dd, dh, ds = c.dd, c.dh, c.ds
    rd = math.sqrt((dd - dh / 2) ** 2 + (ds / 2) ** 2 + 3 * (dh / 2) ** 2)
    rs = math.sqrt((dd + dh) ** 2 + ds**2)
    return {
        "doublet_minus": c.e0 - ds / 2 - rd,
        "doublet_plus": c.e0 - ds / 2 + rd,
        "singlet_minus": c.e0 + ds - rs,
        "singlet_plus": c.e0 + ds + rs,
    }


def closed_form_levels(c: CouplingSet) -> np.ndarray:
    e = closed_form_spectrum(c)
    levels = [e["doublet_minus"]] * 2 + [e["doublet_plus"]] * 2 + [e["singlet_minus"], e["singlet_plus"]]
    return np.sort(np.array(levels))


@dataclass(frozen=True)
class Spectrum:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    sweeps: int = 0

    def __len__(self):
        return len(self.eigenvalues)


def _off_norm(a) -> float:
    off = a[~np.eye(a.shape[0], dtype=bool)]
    return math.sqrt(float(np.sum(np.abs(off) ** 2)))


def _jacobi_sweep(a, v, floor) -> None:
    n = a.shape[0]
    for p in range(n - 1):
        for q in range(p + 1, n):
            apq = a[p, q]
            r = abs(apq)
            if r <= floor:
                a[p, q] = a[q, p] = 0
                continue
            phase = apq / r
            app = a[p, p].real
            aqq = a[q, q].real
            theta = (aqq - app) / (2 * r)
            if abs(theta) > 1e150:
                t = 1 / (2 * theta)
            else:
                t = (1 if theta >= 0 else -1) / (abs(theta) + np.sqrt(theta * theta + 1))
            cs = 1 / np.sqrt(t * t + 1)
            sn = t * cs
            # G = diag(1, conj(phase)) @ [[c, s], [-s, c]] on columns p, q
            g = np.array([[cs, sn], [-sn * np.conj(phase), cs * np.conj(phase)]], dtype=a.dtype)
            cols = a[:, [p, q]] @ g
            a[:, p], a[:, q] = cols[:, 0], cols[:, 1]
            rows = g.conj().T @ a[[p, q], :]
            a[p, :], a[q, :] = rows[0], rows[1]
            a[p, q] = a[q, p] = 0
            a[p, p] = app - t * r
            a[q, q] = aqq + t * r
            vc = v[:, [p, q]] @ g
            v[:, p], v[:, q] = vc[:, 0], vc[:, 1]


def jacobi_eigh(h, tol: float = JACOBI_TOL, max_sweeps: int = MAX_SWEEPS):
    """Cyclic Jacobi on a Hermitian matrix, in extended precision.

    Sweeps until the off-diagonal Frobenius norm drops below ``tol * ||H||_F``,
    then performs one polishing sweep.  Returns unsorted (eigenvalues,
    eigenvectors, sweeps) as float64 / complex128.
    """
    h = check_hermitian(h)
    n = h.shape[0]
    a = np.array(h, dtype=np.clongdouble)
    a = (a + a.conj().T) / 2
    v = np.eye(n, dtype=np.clongdouble)
    norm = math.sqrt(float(np.sum(np.abs(a) ** 2)))
    # elements this small cannot move any eigenvalue in extended precision
    floor = norm * np.finfo(np.longdouble).eps ** 2
    sweeps = 0
    if norm > 0 and n > 1:
        while _off_norm(a) >= tol * norm:
            if sweeps >= max_sweeps:
                raise ConvergenceError(sweeps, _off_norm(a))
            _jacobi_sweep(a, v, floor)
            sweeps += 1
        if sweeps:
            _jacobi_sweep(a, v, floor)
            sweeps += 1
    return np.real(np.diagonal(a)).astype(float), v.astype(complex), sweeps


def _fix_phase(vec: np.ndarray) -> np.ndarray:
    i = int(np.argmax(np.abs(vec)))
    if vec[i] == 0:
        return vec
    out = vec * (abs(vec[i]) / vec[i])
    out[i] = abs(vec[i])
    return out


def _gram_schmidt(cols: np.ndarray) -> np.ndarray:
    out = np.array(cols, dtype=complex)
    for j in range(out.shape[1]):
        for i in range(j):
            out[:, j] -= np.vdot(out[:, i], out[:, j]) * out[:, i]
        out[:, j] /= np.linalg.norm(out[:, j])
    return out


def eigensolve(h, degeneracy_tol: float = DEFAULT_TOL) -> Spectrum:
    """Full spectral decomposition with deterministic eigenvector conventions.

    Eigenvalues ascend.  Within each cluster of eigenvalues closer than
    ``degeneracy_tol`` the vectors are re-orthonormalized in index order; every
    vector is then rotated so its largest component is real positive.
    """
    vals, vecs, sweeps = jacobi_eigh(h)
    order = np.argsort(vals, kind="stable")
    vals = vals[order]
    vecs = vecs[:, order]
    for members in _linkage_groups(vals, degeneracy_tol):
        if len(members) > 1:
            vecs[:, members] = _gram_schmidt(vecs[:, members])
    for j in range(vecs.shape[1]):
        vecs[:, j] = _fix_phase(vecs[:, j])
    return Spectrum(eigenvalues=vals, eigenvectors=vecs, sweeps=sweeps)


@dataclass(frozen=True)
class DegeneracyClass:
    energy: float
    multiplicity: int
    members: tuple


@dataclass(frozen=True)
class DegeneracyClasses:
    classes: tuple
    tol: float

    @property
    def multiplicities(self) -> tuple:
        return tuple(c.multiplicity for c in self.classes)

    @property
    def pattern(self) -> str:
        return "|".join(str(m) for m in self.multiplicities)

    def class_of(self, index: int) -> int:
        for cid, c in enumerate(self.classes):
            if index in c.members:
                return cid
        raise IndexError(index)

    def nearest(self, energy: float) -> DegeneracyClass:
        return min(self.classes, key=lambda c: abs(c.energy - energy))


def _linkage_groups(sorted_vals, tol):
    groups = []
    for i, e in enumerate(sorted_vals):
        if groups and e - sorted_vals[i - 1] < tol:
            groups[-1].append(i)
        else:
            groups.append([i])
    return groups


def cluster_degeneracies(s, tol: float = DEFAULT_TOL) -> DegeneracyClasses:
    """Single-linkage clustering of the sorted eigenvalues: neighbours closer
    than ``tol`` share a class."""
    if not tol > 0:
        raise ValueError("tol must be positive")
    vals = np.asarray(s.eigenvalues if isinstance(s, Spectrum) else s, dtype=float)
    if np.any(np.diff(vals) < 0):
        raise ValueError("eigenvalues must be sorted ascending")
    classes = tuple(
        DegeneracyClass(energy=float(np.mean(vals[g])), multiplicity=len(g), members=tuple(g))
        for g in _linkage_groups(vals, tol)
    )
    return DegeneracyClasses(classes=classes, tol=tol)
