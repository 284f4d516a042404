"""Tensor product structures, index bijections, and refactorizations."""

import numpy as np
import pytest

from tpslab.errors import BijectionError, ContractError, GridSpecError, SpectrumError
from tpslab.linalg import tensor_op
from tpslab.sampling import haar_state, random_product_state, random_unitary
from tpslab.schmidt import schmidt, schmidt_values
from tpslab.tps import (
    IndexBijection,
    TensorProductStructure,
    coefficient_matrix,
    disentangling_tps,
    factor_local_bijection,
    identity_bijection,
    local_unitary_tps,
    random_bijection,
    relabel_tps,
    sum_diff_bijection,
    swap_bijection,
    tps_from_joint_eigenbasis,
    trivial_tps,
)

SQ2 = np.sqrt(2.0)
BELL = np.array([1, 0, 0, 1], dtype=complex) / SQ2


def test_tps_rejects_non_unitary():
    with pytest.raises(ContractError):
        TensorProductStructure(2, 2, np.ones((4, 4), dtype=complex))


def test_tps_rejects_wrong_dimension():
    with pytest.raises(Exception):
        TensorProductStructure(2, 3, np.eye(4, dtype=complex))


def test_coefficient_matrix_basis_state():
    c = coefficient_matrix(np.array([1, 0, 0, 0], dtype=complex), trivial_tps(2, 2))
    np.testing.assert_array_equal(c, [[1, 0], [0, 0]])


def test_coefficient_matrix_bell_reshape():
    c = coefficient_matrix(BELL, trivial_tps(2, 2))
    np.testing.assert_allclose(c, np.eye(2) / SQ2)


@pytest.mark.parametrize("d1,d2", [(2, 2), (2, 3), (3, 3), (4, 2)])
def test_coefficient_matrix_product_state_rank_one(d1, d2):
    rng = np.random.default_rng(d1 * 10 + d2)
    for _ in range(10):
        psi = random_product_state(d1, d2, rng)
        c = coefficient_matrix(psi, trivial_tps(d1, d2))
        s = np.linalg.svd(c, compute_uv=False)
        assert s[1] <= 1e-10 * s[0]


def test_index_bijection_rejects_repeats():
    fa = np.array([[0, 0], [1, 1]])
    fb = np.array([[0, 0], [1, 1]])
    with pytest.raises(BijectionError, match="hit 2 times"):
        IndexBijection(2, 2, fa, fb)


def test_index_bijection_inverse_tables():
    bij = sum_diff_bijection(5)
    for i in range(5):
        for j in range(5):
            a, b = bij.forward(i, j)
            assert bij.inverse(a, b) == (i, j)


def test_relabel_identity_is_identity_matrix():
    tps = relabel_tps(identity_bijection(2, 2))
    np.testing.assert_array_equal(tps.unitary, np.eye(4))


def test_relabel_swap_is_swap_matrix():
    tps = relabel_tps(swap_bijection(2))
    swap = np.zeros((4, 4))
    swap[0, 0] = swap[3, 3] = swap[1, 2] = swap[2, 1] = 1.0
    np.testing.assert_array_equal(tps.unitary.real, swap)


def test_relabel_permutation_structure():
    # exactly one unit entry per row and column
    for bij in (sum_diff_bijection(3), random_bijection(3, 4, np.random.default_rng(0))):
        u = relabel_tps(bij).unitary
        assert np.count_nonzero(u) == u.shape[0]
        np.testing.assert_array_equal(np.sort(np.nonzero(u)[0]), np.arange(u.shape[0]))
        np.testing.assert_array_equal(np.sort(np.nonzero(u)[1]), np.arange(u.shape[0]))
        np.testing.assert_allclose(np.abs(u[np.nonzero(u)]), 1.0)


def test_relabel_moves_coefficients_forward():
    # the amplitude at (i, j) reappears at label bij(i, j)
    d = 3
    bij = sum_diff_bijection(d)
    rng = np.random.default_rng(1)
    psi = haar_state(d * d, rng)
    c_old = coefficient_matrix(psi, trivial_tps(d, d))
    c_new = coefficient_matrix(psi, relabel_tps(bij))
    for i in range(d):
        for j in range(d):
            a, b = bij.forward(i, j)
            assert c_new[a, b] == pytest.approx(c_old[i, j])


def test_sum_diff_trivial_point():
    assert sum_diff_bijection(3).forward(0, 0) == (0, 0)


def test_sum_diff_hand_modular_arithmetic():
    bij = sum_diff_bijection(3)
    assert bij.forward(1, 2) == (0, 2)
    assert bij.inverse(0, 2) == (1, 2)


@pytest.mark.parametrize("d", [3, 5, 7, 9])
def test_sum_diff_forward_inverse_exhaustive(d):
    bij = sum_diff_bijection(d)
    inv2 = (d + 1) // 2
    for i in range(d):
        for j in range(d):
            a, b = bij.forward(i, j)
            assert (a, b) == ((i + j) % d, (i - j) % d)
            assert bij.inverse(a, b) == ((inv2 * (a + b)) % d, (inv2 * (a - b)) % d)


@pytest.mark.parametrize("d", [2, 4, 6])
def test_sum_diff_rejects_even_grids(d):
    with pytest.raises(GridSpecError, match="odd"):
        sum_diff_bijection(d)


def test_joint_eigenbasis_already_product():
    sz = np.diag([1.0, -1.0]).astype(complex)
    f = tensor_op(sz, np.eye(2))
    g = tensor_op(np.eye(2), sz)
    tps = tps_from_joint_eigenbasis(f, g, 2, 2)
    np.testing.assert_allclose(tps.unitary, np.eye(4), atol=1e-12)


def test_joint_eigenbasis_rejects_noncommuting():
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    sz = np.diag([1.0, -1.0]).astype(complex)
    with pytest.raises(ContractError, match="commute"):
        tps_from_joint_eigenbasis(tensor_op(sz, np.eye(2)), tensor_op(sx, np.eye(2)), 2, 2)


def test_joint_eigenbasis_rejects_bad_grid():
    f = np.diag([3.0, 2.0, 1.0, 0.0]).astype(complex)  # four distinct values, d1=2 wanted
    g = np.eye(4, dtype=complex)
    with pytest.raises(SpectrumError):
        tps_from_joint_eigenbasis(f, g, 2, 2)


def test_joint_eigenbasis_rejects_degenerate_g_inside_cluster():
    f = np.diag([1.0, 1.0, 0.0, 0.0]).astype(complex)
    g = np.diag([1.0, 1.0, 1.0, 0.0]).astype(complex)  # no split inside the F=1 block
    with pytest.raises(SpectrumError):
        tps_from_joint_eigenbasis(f, g, 2, 2)


@pytest.mark.parametrize("d1,d2", [(2, 2), (2, 3), (3, 2)])
def test_joint_eigenbasis_reproduces_construction(d1, d2):
    rng = np.random.default_rng(d1 * 7 + d2)
    dim = d1 * d2
    v = random_unitary(dim, rng)
    fvals = np.repeat(np.arange(d1, 0, -1, dtype=float), d2)     # d1 distinct, mult d2
    gvals = np.tile(np.arange(d2, 0, -1, dtype=float), d1)       # grid pattern
    f = v @ np.diag(fvals) @ v.conj().T
    g = v @ np.diag(gvals) @ v.conj().T
    tps = tps_from_joint_eigenbasis(f, g, d1, d2)
    # columns must match v's columns up to phase, in (descending, descending) order
    overlaps = np.abs(tps.unitary.conj().T @ v)
    np.testing.assert_allclose(overlaps, np.eye(dim), atol=1e-8)


def test_local_unitary_identity_preserves_tps():
    tps = trivial_tps(2, 2)
    out = local_unitary_tps(tps, np.eye(2), np.eye(2))
    np.testing.assert_array_equal(out.unitary, tps.unitary)


def test_local_unitary_rejects_non_unitary():
    with pytest.raises(ContractError):
        local_unitary_tps(trivial_tps(2, 2), np.ones((2, 2)), np.eye(2))


@pytest.mark.parametrize("d1,d2", [(2, 2), (2, 3), (3, 3)])
def test_local_unitary_keeps_products_rank_one(d1, d2):
    rng = np.random.default_rng(100 + d1 * d2)
    tps = trivial_tps(d1, d2)
    for _ in range(25):
        psi = random_product_state(d1, d2, rng)
        rotated = local_unitary_tps(tps, random_unitary(d1, rng), random_unitary(d2, rng))
        vals = schmidt_values(psi, rotated)
        assert vals[1] <= 1e-10 * vals[0]


def test_local_unitary_hadamard_keeps_bell_rank_two():
    h = np.array([[1, 1], [1, -1]], dtype=complex) / SQ2
    rotated = local_unitary_tps(trivial_tps(2, 2), h, h)
    sd = schmidt(BELL, rotated)
    assert sd.rank == 2


def test_schmidt_coefficients_invariant_under_local_unitaries():
    rng = np.random.default_rng(8)
    tps = trivial_tps(3, 3)
    psi = haar_state(9, rng)
    base = schmidt_values(psi, tps)
    for _ in range(10):
        rotated = local_unitary_tps(tps, random_unitary(3, rng), random_unitary(3, rng))
        np.testing.assert_allclose(schmidt_values(psi, rotated), base, atol=1e-10)


def test_factor_local_bijection_never_mixes():
    rng = np.random.default_rng(9)
    bij = factor_local_bijection(rng.permutation(3), rng.permutation(4))
    psi = random_product_state(3, 4, rng)
    vals = schmidt_values(psi, relabel_tps(bij))
    assert vals[1] <= 1e-10 * vals[0]


@pytest.mark.parametrize("case", ["product", "bell", "random9"])
def test_disentangling_tps_reaches_rank_one(case):
    rng = np.random.default_rng(hash(case) % 2**32)
    if case == "product":
        psi = random_product_state(2, 2, rng)
        tps = trivial_tps(2, 2)
    elif case == "bell":
        psi = BELL
        tps = trivial_tps(2, 2)
    else:
        psi = haar_state(9, rng)
        tps = trivial_tps(3, 3)
    out = disentangling_tps(psi, tps)
    assert (out.d1, out.d2) == (tps.d1, tps.d2)
    sd = schmidt(psi, out)
    assert sd.rank == 1
    np.testing.assert_allclose(sd.coefficients[0], 1.0, atol=1e-12)


def test_disentangling_tps_unitarity_near_basis_states():
    # adversarial: psi nearly parallel to a computational basis vector
    psi = np.zeros(6, dtype=complex)
    psi[2] = 1.0
    psi[4] = 1e-7
    psi /= np.linalg.norm(psi)
    out = disentangling_tps(psi, trivial_tps(2, 3))
    u = out.unitary
    assert np.max(np.abs(u.conj().T @ u - np.eye(6))) <= 1e-9
    assert schmidt(psi, out).rank == 1


def test_relabel_random_bijection_roundtrip_dimension():
    bij = random_bijection(3, 5, np.random.default_rng(4))
    tps = relabel_tps(bij)
    assert (tps.d1, tps.d2, tps.dim) == (3, 5, 15)
