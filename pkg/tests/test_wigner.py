import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from dimerhex.algebra import triplet_states
from dimerhex.locus import locus_couplings
from dimerhex.model import build_model_hamiltonian
from dimerhex.spectral import eigensolve
from dimerhex.wigner import (
    FULL_LABELS,
    WignerKernelZ2,
    c3_transform,
    eigenphase_probabilities,
    full_matrix,
    full_transform,
    inverse_transform,
    invariant_rows,
    site_permutation,
    site_probabilities,
    state_vector,
    support,
    wigner_c3,
    wigner_full,
    wigner_z2,
    z2_transform,
)

S3 = 1 / math.sqrt(3)
S2 = 1 / math.sqrt(2)


def complex_state(n):
    comp = st.floats(-1, 1)
    return st.lists(st.tuples(comp, comp), min_size=n, max_size=n).filter(
        lambda z: sum(a * a + b * b for a, b in z) > 1e-3
    ).map(lambda z: state_vector([complex(a, b) for a, b in z]))


def random_states(n, count, seed):
    rng = np.random.default_rng(seed)
    z = rng.normal(size=(count, n)) + 1j * rng.normal(size=(count, n))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def test_c3_transform_examples():
    np.testing.assert_allclose(c3_transform([S3, S3, S3]), [0, 0, 1], atol=1e-15)
    np.testing.assert_allclose(np.abs(c3_transform([1, 0, 0])), S3, atol=1e-15)


def test_z2_transform_examples():
    np.testing.assert_allclose(z2_transform([1, 0]), [-S2, S2], atol=1e-15)
    np.testing.assert_allclose(z2_transform([S2, S2]), [0, 1], atol=1e-15)


def test_full_transform_examples():
    out = full_transform(np.ones(6) / math.sqrt(6))
    expected = np.zeros(6)
    expected[2 * 2 + 1] = 1  # (k, s) = (3, 2)
    np.testing.assert_allclose(out, expected, atol=1e-15)
    np.testing.assert_allclose(np.abs(full_transform(np.eye(6)[0])), 1 / math.sqrt(6), atol=1e-15)


def test_full_is_product_of_partial_transforms():
    from dimerhex.wigner import c3_matrix, z2_matrix

    assert np.max(np.abs(full_matrix() - np.kron(c3_matrix(), z2_matrix()))) < 1e-14


@pytest.mark.parametrize("n", [2, 3, 6])
def test_transforms_unitary(n):
    psi = random_states(n, 1000, n)
    fwd = {2: z2_transform, 3: c3_transform, 6: full_transform}[n]
    for p in psi:
        t = fwd(p)
        assert abs(np.linalg.norm(t) - 1) < 1e-13
        np.testing.assert_allclose(inverse_transform(t), p, atol=1e-14)


def test_z2_grid_examples():
    g = wigner_z2([1, 0])
    # rows beta, columns l
    np.testing.assert_allclose(g.values[:, 0], 0, atol=1e-16)
    np.testing.assert_allclose(g.values[:, 1], 0.5, atol=1e-16)
    h = wigner_z2([S2, S2])
    # diagonal terms give 1/4 in every cell, the cross term -1/4 (beta=1) or +1/4 (beta=2)
    np.testing.assert_allclose(h.values, [[0, 0], [0.5, 0.5]], atol=1e-15)
    assert h.total() == pytest.approx(1.0, abs=1e-13)


@given(complex_state(2))
@settings(max_examples=100, deadline=None)
def test_z2_grid_marginals(psi):
    g = wigner_z2(psi)
    for beta in (1, 2):
        for l in (1, 2):
            assert g.values[beta - 1, l - 1] == pytest.approx(oracles.z2_wigner_cell(psi, l, beta).real, abs=1e-14)
    assert g.total() == pytest.approx(1.0, abs=1e-13)
    np.testing.assert_allclose(g.row_marginal(), np.abs(z2_transform(psi)) ** 2, atol=1e-12)
    np.testing.assert_allclose(g.col_marginal(), np.abs(psi[::-1]) ** 2, atol=1e-12)


@given(complex_state(2), st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1))
@settings(max_examples=50, deadline=None)
def test_general_z2_kernel_marginals(psi, a, b, c):
    # the general table keeps the position marginal |psi_l|^2 over eigenphases
    # and the eigenphase marginal over positions, for any (a, b, c)
    g = wigner_z2(psi, WignerKernelZ2(a, b, c))
    np.testing.assert_allclose(g.total(), 1.0, atol=1e-12)
    np.testing.assert_allclose(g.row_marginal(), np.abs(psi) ** 2, atol=1e-12)


def test_default_kernel_table_differs_from_closed_form():
    # the (1/2, 0, 1/4) table and the closed-form coefficients are different
    # quasi-distributions; the closed form is the default
    psi = state_vector([0.6, 0.8])
    table = WignerKernelZ2().evaluate(psi).T
    closed = wigner_z2(psi).values
    assert not np.allclose(table, closed)
    # with a purely imaginary overlap the two agree
    psi = state_vector([1, 1j])
    np.testing.assert_allclose(WignerKernelZ2().evaluate(psi).T, wigner_z2(psi).values, atol=1e-15)


def test_c3_grid_examples():
    g = wigner_c3([1, 0, 0])
    expected = np.zeros((3, 3))
    expected[:, 1] = 1 / 3
    np.testing.assert_allclose(g.values, expected, atol=1e-15)
    u = wigner_c3([S3, S3, S3])
    np.testing.assert_allclose(u.row_marginal(), [0, 0, 1], atol=1e-15)


def test_c3_marginals_on_random_states():
    for psi in random_states(3, 1000, 30):
        g = wigner_c3(psi)
        np.testing.assert_allclose(g.row_marginal(), np.abs(c3_transform(psi)) ** 2, atol=1e-12)
        # column q' carries |psi(-q' mod 3)|^2, labels in {1, 2, 3}
        expected = [abs(psi[(-qp - 1) % 3]) ** 2 for qp in (1, 2, 3)]
        np.testing.assert_allclose(g.col_marginal(), expected, atol=1e-12)
        assert g.imag_residue < 1e-12


@given(complex_state(3))
@settings(max_examples=50, deadline=None)
def test_c3_grid_matches_defining_sum(psi):
    g = wigner_c3(psi)
    for k in (1, 2, 3):
        for qp in (1, 2, 3):
            assert g.values[k - 1, qp - 1] == pytest.approx(oracles.c3_wigner_cell(psi, qp, k).real, abs=1e-14)


@given(complex_state(6))
@settings(max_examples=30, deadline=None)
def test_full_grid_matches_defining_sum(psi):
    g = wigner_full(psi)
    p = psi.reshape(3, 2)
    for (b2, b1), row in zip(FULL_LABELS, range(6)):
        for (l2, l1), col in zip(FULL_LABELS, range(6)):
            ref = oracles.full_wigner_cell(p, l1, l2, b1, b2)
            assert g.values[row, col] == pytest.approx(ref.real, abs=1e-14)


def test_full_grid_marginal_permutations_fixed():
    perm = site_permutation()
    assert sorted(perm) == list(range(6))
    for psi in random_states(6, 1000, 60):
        g = wigner_full(psi)
        assert g.imag_residue < 1e-12
        assert abs(g.total() - 1) < 1e-12
        np.testing.assert_allclose(g.row_marginal(), eigenphase_probabilities(psi), atol=1e-12)
        np.testing.assert_allclose(g.col_marginal()[perm], site_probabilities(psi), atol=1e-12)


def test_full_grid_permutation_found_by_brute_force():
    # identify the column -> site map from one state and confirm it on others
    states = random_states(6, 20, 61)
    g = wigner_full(states[0])
    sp = site_probabilities(states[0])
    found = [int(np.argmin(np.abs(g.col_marginal() - sp[j]))) for j in range(6)]
    assert found == site_permutation()


def test_product_state_separates():
    z2 = np.array([S2, S2])
    c3 = np.array([1, 0, 0])
    psi = np.kron(c3, z2)
    g = wigner_full(psi).values
    wz, wc = wigner_z2(z2).values, wigner_c3(c3).values
    outer = np.empty((6, 6))
    for b1 in range(2):
        for b2 in range(3):
            for l1 in range(2):
                for l2 in range(3):
                    outer[b1 * 3 + b2, l1 * 3 + l2] = wz[b1, l1] * wc[b2, l2]
    np.testing.assert_allclose(g, outer, atol=1e-12)


def test_uniform_state_flat_site_marginal():
    g = wigner_full(np.ones(6) / math.sqrt(6))
    np.testing.assert_allclose(g.col_marginal(), 1 / 6, atol=1e-15)


def test_support_examples():
    g = wigner_c3([1, 0, 0])
    s = support(g)
    assert s.cells == frozenset({(0, 1), (1, 1), (2, 1)})
    assert s.rows == frozenset({0, 1, 2})
    with pytest.raises(ValueError):
        support(g, 0.0)


@given(complex_state(6), st.floats(-math.pi, math.pi))
@settings(max_examples=30, deadline=None)
def test_support_phase_invariant(psi, phase):
    a = support(wigner_full(psi))
    b = support(wigner_full(psi * complex(math.cos(phase), math.sin(phase))))
    assert a == b


def test_unoccupied_rows_stay_empty():
    # a single k-sector state leaves the other sectors' rows empty
    h = build_model_hamiltonian(locus_couplings(1.9, delta=0.1))
    psi = eigensolve(h).eigenvectors[:, 2]
    for eps in (1e-14, 1e-8, 1e-2):
        assert support(wigner_full(psi), eps).rows == frozenset({2, 5})


def test_invariant_rows_triple_point():
    trip = triplet_states(locus_couplings(1.9))
    rows = invariant_rows(trip, n_samples=100, seed=0)
    assert len(rows) >= 3


def test_invariant_rows_single_state():
    c = locus_couplings(1.9).replace(phi=1e-9 * math.pi / 2)
    s = eigensolve(build_model_hamiltonian(c), 1e-12)
    rows_each = []
    for j in range(3):
        psi = s.eigenvectors[:, j]
        own = support(wigner_full(psi)).rows
        assert invariant_rows(psi, n_samples=3, seed=1) == own
        assert len(own) == 2
        rows_each.append(own)
    assert len(frozenset().union(*rows_each)) == 6


def test_invariant_rows_one_sample_is_that_sample():
    trip = triplet_states(locus_couplings(1.9))
    from dimerhex.wigner import random_combinations

    psi = random_combinations(trip, 1, 9)[0]
    assert invariant_rows(trip, n_samples=1, seed=9) == support(wigner_full(psi)).rows


def test_state_validation():
    with pytest.raises(ValueError):
        state_vector([0, 0, 0])
    with pytest.raises(ValueError):
        state_vector([1, 0, 0, 0])
    with pytest.raises(ValueError):
        wigner_full(np.ones(6))
