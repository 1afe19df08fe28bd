"""Finite Fourier transforms over C3 and Z2 and the discrete Wigner functions
on the 2x2, 3x3 and 6x6 phase-space grids.

Index labels run over {1, 2, 3} (C3) and {1, 2} (Z2); "mod 3" maps back into
{1, 2, 3}.  Six-component states are stored in the model site order, i.e.
``psi[2*(m-1) + (n-1)]`` for site (m, n), and transformed states likewise as
``psi_t[2*(k-1) + (s-1)]``.

Grid layout: rows carry eigenphase labels and columns position labels.  For
the full grid the rows are ``(k, s) = (1,1),(2,1),(3,1),(1,2),(2,2),(3,2)`` and
the columns ``(m, n)`` in the same pattern.  Marginals:

* summing a row over columns gives the eigenphase probability of that row;
* summing a column ``(m, n)`` over rows gives ``|psi(-m mod 3, 3-n)|^2``
  (``|psi(-m mod 3)|^2`` on the C3 grid, ``|psi(3-l)|^2`` on the Z2 grid).
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

NORM_ATOL = 1e-12
DEFAULT_EPS_REL = 1e-8

C3_LABELS = (1, 2, 3)
Z2_LABELS = (1, 2)
FULL_LABELS = tuple((a, b) for b in Z2_LABELS for a in C3_LABELS)


def _mod3(i: int) -> int:
    return (i - 1) % 3 + 1


def _omega(x) -> complex:
    return cmath.exp(2j * math.pi * x / 3)


def state_vector(amplitudes) -> np.ndarray:
    """Normalized complex copy of ``amplitudes`` (length 2, 3 or 6)."""
    psi = np.array(amplitudes, dtype=complex).ravel()
    if psi.size not in (2, 3, 6):
        raise ValueError(f"state must have 2, 3 or 6 components, got {psi.size}")
    n = np.linalg.norm(psi)
    if n == 0:
        raise ValueError("zero state")
    return psi / n


def _require(psi, size: int, normalized: bool = False) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex).ravel()
    if psi.size != size:
        raise ValueError(f"expected {size} components, got {psi.size}")
    if normalized and abs(np.linalg.norm(psi) - 1.0) > NORM_ATOL:
        raise ValueError(f"state is not normalized (norm {np.linalg.norm(psi)!r})")
    return psi


def c3_matrix() -> np.ndarray:
    """F[k-1, q-1] = exp(2 pi i q k / 3) / sqrt(3)."""
    return np.array([[_omega(q * k) for q in C3_LABELS] for k in C3_LABELS]) / math.sqrt(3)


def z2_matrix() -> np.ndarray:
    """Z[s-1, r-1] = (-1)^(r s) / sqrt(2) for r = 1 and 1 / sqrt(2) for r = 2."""
    return np.array([[(-1) ** (r * s) for r in Z2_LABELS] for s in Z2_LABELS]) / math.sqrt(2)


def full_matrix() -> np.ndarray:
    m = np.empty((6, 6), dtype=complex)
    for k in C3_LABELS:
        for s in Z2_LABELS:
            for q in C3_LABELS:
                for r in Z2_LABELS:
                    m[2 * (k - 1) + s - 1, 2 * (q - 1) + r - 1] = _omega(q * k) * (-1) ** (r * s) / math.sqrt(6)
    return m


def c3_transform(psi) -> np.ndarray:
    return c3_matrix() @ _require(psi, 3)


def z2_transform(psi) -> np.ndarray:
    return z2_matrix() @ _require(psi, 2)


def full_transform(psi) -> np.ndarray:
    return full_matrix() @ _require(psi, 6)


def inverse_transform(psi_t) -> np.ndarray:
    psi_t = np.asarray(psi_t, dtype=complex).ravel()
    mats = {2: z2_matrix, 3: c3_matrix, 6: full_matrix}
    if psi_t.size not in mats:
        raise ValueError(f"unsupported length {psi_t.size}")
    return mats[psi_t.size]().conj().T @ psi_t


@dataclass(frozen=True)
class WignerGrid:
    values: np.ndarray
    row_labels: tuple
    col_labels: tuple
    imag_residue: float = 0.0

    @property
    def shape(self):
        return self.values.shape

    def total(self) -> float:
        return float(self.values.sum())

    def row_marginal(self) -> np.ndarray:
        return self.values.sum(axis=1)

    def col_marginal(self) -> np.ndarray:
        return self.values.sum(axis=0)


def _finish(w: np.ndarray, rows, cols) -> WignerGrid:
    residue = float(np.max(np.abs(w.imag)))
    if residue > 1e-12:
        raise ArithmeticError(f"Wigner grid has imaginary residue {residue:.3e}")
    return WignerGrid(values=np.ascontiguousarray(w.real), row_labels=tuple(rows), col_labels=tuple(cols), imag_residue=residue)


def kernel_z2(l: int, beta: int) -> np.ndarray:
    """Coefficients C[a-1, b-1] of the Z2 bilinear form at (l, beta)."""
    sl, sb = (-1) ** l, (-1) ** beta
    return np.array([[(1 + sl) / 4, sb / 4], [sb / 4, (1 - sl) / 4]])


@dataclass(frozen=True)
class WignerKernelZ2:
    """General Z2 kernel with real parameters (a, b, c).

    ``Re{z}`` here means ``z + conj(z)``.  The default (1/2, 0, 1/4) is the
    choice that :func:`kernel_z2` writes in closed form.
    """

    a: float = 0.5
    b: float = 0.0
    c: float = 0.25

    def evaluate(self, psi) -> np.ndarray:
        """Direct table W[l-1, beta-1] (position l, eigenphase beta)."""
        psi = _require(psi, 2)
        p1, p2 = abs(psi[0]) ** 2, abs(psi[1]) ** 2
        re = 2 * (psi[0] * np.conj(psi[1])).real
        a, b, c = self.a, self.b, self.c
        return np.array(
            [
                [a * p1 + b * p2 + c * re, (0.5 - a) * p1 + (0.5 - b) * p2 + (0.5 - c) * re],
                [(1 - a) * p1 - b * p2 - c * re, (a - 0.5) * p1 + (b + 0.5) * p2 + (c - 0.5) * re],
            ]
        )


def wigner_z2(psi, kernel: WignerKernelZ2 | None = None) -> WignerGrid:
    """2x2 grid with rows beta (eigenphase) and columns l (position).

    With the default kernel the closed-form coefficients are used; any other
    kernel is evaluated from its (a, b, c) table.
    """
    psi = _require(psi, 2, normalized=True)
    if kernel is None or kernel == WignerKernelZ2():
        w = np.empty((2, 2), dtype=complex)
        for l in Z2_LABELS:
            for beta in Z2_LABELS:
                w[beta - 1, l - 1] = psi @ kernel_z2(l, beta) @ psi.conj()
    else:
        w = kernel.evaluate(psi).T.astype(complex)
    return _finish(w, Z2_LABELS, Z2_LABELS)


def wigner_c3(psi) -> WignerGrid:
    """3x3 grid with rows k (eigenphase) and columns q' (position)."""
    psi = _require(psi, 3, normalized=True)
    w = np.zeros((3, 3), dtype=complex)
    for qp in C3_LABELS:
        for k in C3_LABELS:
            acc = 0j
            for q in C3_LABELS:
                acc += psi[q - 1] * np.conj(psi[_mod3(qp - q) - 1]) * _omega(k * (2 * q - qp))
            w[k - 1, qp - 1] = acc / 3
    return _finish(w, C3_LABELS, C3_LABELS)


def wigner_full(psi) -> WignerGrid:
    """6x6 grid of the C3 x Z2 Wigner function.

    The Z2 kernel and the C3 phase factor are combined over both site indices;
    the 1/3 of the C3 function is kept so the grid sums to one.
    """
    psi = _require(psi, 6, normalized=True).reshape(3, 2)  # psi[m-1, n-1]
    kernels = {(l, b): kernel_z2(l, b) for l in Z2_LABELS for b in Z2_LABELS}
    w = np.zeros((6, 6), dtype=complex)
    for l1 in Z2_LABELS:
        for l2 in C3_LABELS:
            # pair[a, b] = sum over q of psi(q, a) conj(psi(l2 - q, b)) * phase
            for b2 in C3_LABELS:
                pair = np.zeros((2, 2), dtype=complex)
                for q in C3_LABELS:
                    pair += np.outer(psi[q - 1], psi[_mod3(l2 - q) - 1].conj()) * _omega(b2 * (2 * q - l2))
                for b1 in Z2_LABELS:
                    w[(b1 - 1) * 3 + b2 - 1, (l1 - 1) * 3 + l2 - 1] = np.sum(kernels[(l1, b1)] * pair) / 3
    return _finish(w, FULL_LABELS, FULL_LABELS)


def site_permutation() -> list:
    """Column index whose marginal equals the probability of site j.

    Entry j corresponds to site (m, n) = FULL_LABELS[j]; the column carrying
    |psi(m, n)|^2 is the one labelled (-m mod 3, 3 - n).
    """
    out = []
    for m, n in FULL_LABELS:
        out.append(FULL_LABELS.index((_mod3(-m), 3 - n)))
    return out


def site_probabilities(psi) -> np.ndarray:
    """|psi(m, n)|^2 in grid column order."""
    p = np.abs(np.asarray(psi).reshape(3, 2)) ** 2
    return np.array([p[m - 1, n - 1] for m, n in FULL_LABELS])


def eigenphase_probabilities(psi) -> np.ndarray:
    """|psi_t(k, s)|^2 in grid row order."""
    p = np.abs(full_transform(psi).reshape(3, 2)) ** 2
    return np.array([p[k - 1, s - 1] for k, s in FULL_LABELS])


@dataclass(frozen=True)
class Support:
    cells: frozenset
    rows: frozenset

    @property
    def fringes(self) -> int:
        return len(self.rows)


def support(grid: WignerGrid, eps_rel: float = DEFAULT_EPS_REL) -> Support:
    """Cells with |W| above ``eps_rel * max|W|`` and the rows containing them."""
    if not 0 < eps_rel < 1:
        raise ValueError("eps_rel must lie in (0, 1)")
    mag = np.abs(grid.values)
    top = mag.max()
    if top == 0:
        raise ValueError("grid is identically zero")
    occ = np.argwhere(mag > eps_rel * top)
    cells = frozenset((int(r), int(c)) for r, c in occ)
    return Support(cells=cells, rows=frozenset(r for r, _ in cells))


def random_combinations(triplet, n_samples: int, seed: int) -> np.ndarray:
    """Seeded unit-norm combinations of the columns of ``triplet``."""
    rng = np.random.default_rng(seed)
    k = triplet.shape[1]
    coeffs = rng.normal(size=(n_samples, k)) + 1j * rng.normal(size=(n_samples, k))
    coeffs /= np.linalg.norm(coeffs, axis=1, keepdims=True)
    states = coeffs @ triplet.T
    return states / np.linalg.norm(states, axis=1, keepdims=True)


def invariant_rows(triplet, n_samples: int = 100, seed: int = 0, eps_rel: float = DEFAULT_EPS_REL) -> frozenset:
    """Rows occupied by every sampled combination of the given states."""
    from .algebra import check_orthonormal

    t = np.asarray(triplet, dtype=complex)
    if t.ndim == 1:
        t = t[:, None]
    check_orthonormal(t)
    if n_samples < 1:
        raise ValueError("n_samples must be at least 1")
    rows = None
    for psi in random_combinations(t, n_samples, seed):
        r = support(wigner_full(psi), eps_rel).rows
        rows = r if rows is None else rows & r
    return rows
