"""Dynamical-algebra generators, the vector-coupling form of the model
Hamiltonian and the accidental-symmetry operator of the triplet."""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .model import CouplingSet, build_model_hamiltonian
from .spectral import cluster_degeneracies, eigensolve

SIGMA_1 = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_3 = np.array([[1, 0], [0, -1]], dtype=complex)

ORTHONORMAL_ATOL = 1e-10


@dataclass(frozen=True)
class GeneratorSet:
    j_plus: np.ndarray
    j_minus: np.ndarray
    j3: np.ndarray
    sigma_plus: np.ndarray
    sigma_minus: np.ndarray
    sigma3: np.ndarray
    t: np.ndarray
    # [J+, J-] = j_bracket * J3 and [s+, s-] = sigma_bracket * s3
    j_bracket: float
    sigma_bracket: float

    @property
    def site_shift(self) -> np.ndarray:
        """The dimer shift e_m -> e_(m+1); equals T^+ = T^2 in this basis."""
        return self.t.T.copy()


def _comm(a, b):
    return a @ b - b @ a


def generator_residuals(g: GeneratorSet) -> dict:
    eye3 = np.eye(3)
    return {
        "j_bracket": float(np.max(np.abs(_comm(g.j_plus, g.j_minus) - g.j_bracket * g.j3))),
        "j_plus_cubed": float(np.max(np.abs(np.linalg.matrix_power(g.j_plus, 3)))),
        "j_minus_cubed": float(np.max(np.abs(np.linalg.matrix_power(g.j_minus, 3)))),
        "sigma_bracket": float(np.max(np.abs(_comm(g.sigma_plus, g.sigma_minus) - g.sigma_bracket * g.sigma3))),
        "sigma_plus_squared": float(np.max(np.abs(g.sigma_plus @ g.sigma_plus))),
        "sigma_minus_squared": float(np.max(np.abs(g.sigma_minus @ g.sigma_minus))),
        "t_cubed": float(np.max(np.abs(np.linalg.matrix_power(g.t, 3) - eye3))),
        "t_unitary": float(np.max(np.abs(g.t.T @ g.t - eye3))),
        "t_normal": float(np.max(np.abs(_comm(g.t, g.t.T)))),
    }


def build_generators() -> GeneratorSet:
    """Unit-entry ladders on the J3 basis (1, 0, -1) and T = J+ + J-^2.

    Everything is integer valued, so the identities are checked exactly.
    """
    j_plus = np.array([[0, 1, 0], [0, 0, 1], [0, 0, 0]])
    j_minus = j_plus.T.copy()
    j3 = np.diag([1, 0, -1])
    s_plus = np.array([[0, 1], [0, 0]])
    s_minus = s_plus.T.copy()
    s3 = np.diag([1, -1])
    t = j_plus + j_minus @ j_minus
    g = GeneratorSet(j_plus, j_minus, j3, s_plus, s_minus, s3, t, j_bracket=1.0, sigma_bracket=1.0)
    bad = {k: v for k, v in generator_residuals(g).items() if v != 0}
    if bad:
        raise AssertionError(f"generator identities violated: {bad}")
    return g


@dataclass(frozen=True)
class VectorCoupling:
    v0: np.ndarray
    v1: np.ndarray
    v2: np.ndarray
    v3: np.ndarray

    def as_tuple(self):
        return self.v0, self.v1, self.v2, self.v3


def vector_decomposition(c: CouplingSet) -> VectorCoupling:
    if c.phi != 0.0:
        raise ValueError("vector decomposition is only defined for phi = 0")
    t = build_generators().t.astype(complex)
    ring = t + t.conj().T
    v0 = 0.5 * c.ds * ring
    v1 = c.dd * np.eye(3) + c.dh * ring
    v2 = 1j * c.dh * (t.conj().T - t)
    return VectorCoupling(v0=v0, v1=v1, v2=v2, v3=-v0)


@dataclass(frozen=True)
class Convention:
    """How the vector coupling is laid onto the six sites."""

    dimer_major: bool = True
    swap_intra: bool = False
    v2_sign: int = 1


ALL_CONVENTIONS = tuple(
    Convention(dimer_major=dm, swap_intra=sw, v2_sign=sg)
    for dm, sw, sg in itertools.product((True, False), (False, True), (1, -1))
)

# Reference point for the one-off convention selection; any generic point works.
_REFERENCE = CouplingSet(dd=1.0, dh=0.7, ds=0.3)


def _assemble(v: VectorCoupling, conv: Convention) -> np.ndarray:
    s1, s2, s3 = SIGMA_1, conv.v2_sign * SIGMA_2, SIGMA_3
    if conv.swap_intra:
        swap = SIGMA_1
        s1, s2, s3 = swap @ s1 @ swap, swap @ s2 @ swap, swap @ s3 @ swap
    pairs = ((v.v0, np.eye(2)), (v.v1, s1), (v.v2, s2), (v.v3, s3))
    if conv.dimer_major:
        return sum(np.kron(a, b) for a, b in pairs)
    return sum(np.kron(b, a) for a, b in pairs)


def _deviation(v, conv, c) -> float:
    ref = build_model_hamiltonian(c.replace(e0=0.0))
    return float(np.max(np.abs(_assemble(v, conv) - ref)))


def select_convention(c: CouplingSet = _REFERENCE) -> Convention:
    """Variant with the smallest reassembly deviation at ``c`` (first on ties)."""
    v = vector_decomposition(c)
    return min(ALL_CONVENTIONS, key=lambda conv: _deviation(v, conv, c))


# frozen result of select_convention(); a test re-derives it
FROZEN_CONVENTION = Convention(dimer_major=True, swap_intra=False, v2_sign=1)


def reassemble(v: VectorCoupling, reference: CouplingSet | None = None, conv: Convention = FROZEN_CONVENTION):
    """``v0 x 1 + sum_j v_j x sigma_j`` under the frozen convention.

    Returns ``(matrix, deviation)`` where deviation is the max-abs difference
    from the model Hamiltonian at ``reference`` (``None`` when not given).
    Under the frozen convention the hexagon bonds come out doubled, so the
    deviation equals ``dh`` exactly.
    """
    m = _assemble(v, conv)
    if reference is None:
        return m, None
    return m, _deviation(v, conv, reference)


@dataclass(frozen=True)
class SymmetryOperator:
    alpha: complex
    beta: complex
    gamma: complex
    matrix: np.ndarray


def _as_columns(triplet) -> np.ndarray:
    t = np.asarray(triplet, dtype=complex)
    if t.ndim == 2 and t.shape[0] == 3 and t.shape[1] != 3:
        t = t.T
    if t.ndim != 2 or t.shape[1] != 3:
        raise ValueError(f"expected three state vectors, got shape {t.shape}")
    return t


def check_orthonormal(vectors, atol: float = ORTHONORMAL_ATOL) -> np.ndarray:
    v = np.asarray(vectors, dtype=complex)
    dev = float(np.max(np.abs(v.conj().T @ v - np.eye(v.shape[1]))))
    if dev > atol:
        raise ValueError(f"vectors are not orthonormal (Gram deviation {dev:.3e})")
    return v


def build_symmetry_operator(triplet, alpha=0.0, beta=0.0, gamma=0.0) -> SymmetryOperator:
    """``alpha |d1><s| + beta |d1><d2| + gamma |d2><s| + h.c.``

    ``triplet`` holds the states in the order (d1, d2, s): the two doublet
    members followed by the singlet.
    """
    d1, d2, s = check_orthonormal(_as_columns(triplet)).T
    op = alpha * np.outer(d1, s.conj()) + beta * np.outer(d1, d2.conj()) + gamma * np.outer(d2, s.conj())
    return SymmetryOperator(complex(alpha), complex(beta), complex(gamma), op + op.conj().T)


def commutator_norm(h, op) -> float:
    m = op.matrix if isinstance(op, SymmetryOperator) else np.asarray(op)
    return float(np.linalg.norm(h @ m - m @ h))


def triplet_states(c: CouplingSet, tol: float = 1e-9, delta: float = 1e-3) -> np.ndarray:
    """The three lowest eigenstates ordered (doublet, doublet, singlet).

    The singlet direction is continued from a Hamiltonian with ds raised by
    ``delta * dd`` (where the lower doublet sits below the singlet) and
    projected into the three-state span; the doublet members complete an
    orthonormal basis in index order.
    """
    s = eigensolve(build_model_hamiltonian(c), tol)
    low = s.eigenvectors[:, :3]
    probe = eigensolve(build_model_hamiltonian(c.replace(ds=c.ds + delta * c.dd)), tol)
    if cluster_degeneracies(probe, tol).multiplicities[:2] != (2, 1):
        raise ValueError("continuation did not separate a lower doublet from the singlet")
    singlet = low @ (low.conj().T @ probe.eigenvectors[:, 2])
    singlet /= np.linalg.norm(singlet)
    doublet = []
    for j in range(3):
        r = low[:, j]
        for _ in range(2):  # second pass restores orthogonality lost to cancellation
            for q in [singlet] + doublet:
                r = r - q * np.vdot(q, r)
        if np.linalg.norm(r) > 1e-6:
            doublet.append(r / np.linalg.norm(r))
        if len(doublet) == 2:
            break
    return np.column_stack(doublet + [singlet])


def verification_report(x: float = 1.9, delta: float = 0.1, n_draws: int = 100, seed: int = 0) -> dict:
    """Generator residuals, reassembly deviation and commutator norms."""
    from .locus import locus_couplings

    rng = np.random.default_rng(seed)
    g = build_generators()
    on = locus_couplings(x)
    off = locus_couplings(x, delta=delta)
    _, dev = reassemble(vector_decomposition(on), on)
    norms = {}
    for name, c in (("on_locus", on), ("off_locus", off)):
        h = build_model_hamiltonian(c)
        trip = triplet_states(c) if name == "on_locus" else eigensolve(h).eigenvectors[:, :3]
        ratios = []
        for _ in range(n_draws):
            a, b, cc = rng.normal(size=3) + 1j * rng.normal(size=3)
            op = build_symmetry_operator(trip, a, b, cc)
            ratios.append(commutator_norm(h, op) / np.linalg.norm(op.matrix))
        norms[name] = {"min": float(min(ratios)), "max": float(max(ratios))}
    return {
        "generator_residuals": generator_residuals(g),
        "j_bracket": g.j_bracket,
        "sigma_bracket": g.sigma_bracket,
        "convention": FROZEN_CONVENTION.__dict__,
        "reassembly_deviation": dev,
        "reassembly_deviation_over_dh": dev / on.dh if on.dh else None,
        "commutator_ratio": norms,
        "x": x,
        "delta": delta,
        "n_draws": n_draws,
        "seed": seed,
    }
