"""Two-spin demo: total-spin squares, the chi basis, and the covariance closed form."""

import numpy as np
import pytest

from tpslab.errors import ContractError
from tpslab.linalg import commutator_maxnorm, tensor_op
from tpslab.qcf import qcf
from tpslab.sampling import haar_state
from tpslab.schmidt import schmidt_values
from tpslab.spins import (
    SpinConfig,
    chi_basis,
    demo_spins,
    spin_operators,
    spin_qcf_closed_form,
    total_spin_squares,
)

SQ2 = np.sqrt(2.0)


@pytest.mark.parametrize("hbar", [1.0, 2.0, 0.5])
def test_spin_operator_eigenvalues(hbar):
    ops = spin_operators(SpinConfig(hbar=hbar))
    for s in ops:
        w = np.linalg.eigvalsh(s)
        np.testing.assert_allclose(w, [-hbar / 2, hbar / 2], atol=1e-12)


def test_spin_squares_are_scalar():
    ops = spin_operators()
    np.testing.assert_allclose(ops.x @ ops.x, np.eye(2) / 4.0, atol=1e-14)


@pytest.mark.parametrize("hbar", [1.0, 2.0])
def test_spin_commutators(hbar):
    ops = spin_operators(SpinConfig(hbar=hbar))
    np.testing.assert_allclose(
        ops.x @ ops.y - ops.y @ ops.x, 1j * hbar * ops.z, atol=1e-12
    )
    np.testing.assert_allclose(
        ops.y @ ops.z - ops.z @ ops.y, 1j * hbar * ops.x, atol=1e-12
    )
    np.testing.assert_allclose(
        ops.z @ ops.x - ops.x @ ops.z, 1j * hbar * ops.y, atol=1e-12
    )


@pytest.mark.parametrize("hbar", [1.0, 2.0])
def test_total_spin_squares_structure(hbar):
    cfg = SpinConfig(hbar=hbar)
    ops = spin_operators(cfg)
    squares = total_spin_squares(cfg)
    np.testing.assert_allclose(
        squares.z2,
        hbar**2 / 2 * np.eye(4) + 2 * tensor_op(ops.z, ops.z),
        atol=1e-14,
    )
    assert commutator_maxnorm(squares.z2, squares.x2) <= 1e-12
    for sq in squares:
        w = np.sort(np.linalg.eigvalsh(sq))
        np.testing.assert_allclose(w, [0.0, 0.0, hbar**2, hbar**2], atol=1e-12)


def test_total_spin_square_eigenstates():
    squares = total_spin_squares()
    up_up = np.array([1, 0, 0, 0], dtype=complex)
    up_down = np.array([0, 1, 0, 0], dtype=complex)
    np.testing.assert_allclose(squares.z2 @ up_up, up_up, atol=1e-14)
    np.testing.assert_allclose(squares.z2 @ up_down, np.zeros(4), atol=1e-14)


def test_chi_basis_matches_known_matrix():
    # rows (s, t) over the product basis (uu, ud, du, dd), hbar^2 before 0:
    #   chi_11 = (uu + dd)/sqrt(2), chi_10 = (uu - dd)/sqrt(2),
    #   chi_01 = (ud + du)/sqrt(2), chi_00 = (ud - du)/sqrt(2)
    _, rows = chi_basis()
    expected = np.array(
        [
            [1, 0, 0, 1],
            [1, 0, 0, -1],
            [0, 1, 1, 0],
            [0, 1, -1, 0],
        ]
    ) / SQ2
    np.testing.assert_allclose(np.abs(rows), np.abs(expected), atol=1e-12)
    # phases are fixed, so the match is exact, not just entrywise modulus
    np.testing.assert_allclose(rows, expected, atol=1e-12)


@pytest.mark.parametrize("hbar", [1.0, 0.7])
def test_chi_vectors_satisfy_both_eigenvalue_equations(hbar):
    cfg = SpinConfig(hbar=hbar)
    squares = total_spin_squares(cfg)
    tps, rows = chi_basis(cfg)
    eigs = [(1, 1), (1, 0), (0, 1), (0, 0)]  # (s, t) per row
    for k, (s, t) in enumerate(eigs):
        chi = rows[k]
        np.testing.assert_allclose(squares.z2 @ chi, s * hbar**2 * chi, atol=1e-12)
        np.testing.assert_allclose(squares.x2 @ chi, t * hbar**2 * chi, atol=1e-12)
    # the TPS columns are the same vectors
    np.testing.assert_allclose(tps.unitary, rows.T, atol=1e-14)


def test_closed_form_vanishes_for_both_up():
    up = np.array([1.0, 0.0], dtype=complex)
    assert spin_qcf_closed_form(up, up) == pytest.approx(0.0, abs=1e-14)


@pytest.mark.parametrize("hbar", [1.0, 2.0])
def test_closed_form_both_plus_y(hbar):
    plus_y = np.array([1.0, 1j]) / SQ2
    val = spin_qcf_closed_form(plus_y, plus_y, SpinConfig(hbar=hbar))
    assert val == pytest.approx(-(hbar**4) / 4.0, abs=1e-12)


def test_closed_form_matches_direct_covariance():
    squares = total_spin_squares()
    rng = np.random.default_rng(0)
    worst = 0.0
    for _ in range(1000):
        psi1, psi2 = haar_state(2, rng), haar_state(2, rng)
        direct = qcf(squares.z2, squares.x2, np.kron(psi1, psi2))
        closed = spin_qcf_closed_form(psi1, psi2)
        worst = max(worst, abs(direct - closed))
    assert worst <= 1e-12


def test_closed_form_rejects_unnormalized():
    with pytest.raises(ContractError):
        spin_qcf_closed_form(np.array([1.0, 1.0]), np.array([1.0, 0.0]))


def test_demo_spins_report():
    report = demo_spins(samples=2000, seed=7)
    assert report.closed_form_residual_max <= 1e-12
    assert report.fraction_nonzero >= 0.99
    # the four z-product basis states are the stationary exceptions: they stay
    # factorizable in the chi TPS (all transverse expectations vanish)
    assert report.chi_tps_rank_examples == (1, 1, 1, 1)
    # generic product states become entangled there
    assert report.sampled_rank2_fraction >= 0.99


def test_demo_spins_deterministic():
    a = demo_spins(samples=200, seed=5)
    b = demo_spins(samples=200, seed=5)
    assert a == b


def test_generic_product_state_rank_two_in_chi_tps():
    tps, _ = chi_basis()
    plus_y = np.array([1.0, 1j]) / SQ2
    vals = schmidt_values(np.kron(plus_y, plus_y), tps)
    assert vals[1] > 1e-3 * vals[0]


def test_chi_tps_from_scaled_hbar_matches_default_up_to_phase():
    t1, _ = chi_basis(SpinConfig(hbar=1.0))
    t2, _ = chi_basis(SpinConfig(hbar=3.0))
    np.testing.assert_allclose(np.abs(t1.unitary), np.abs(t2.unitary), atol=1e-12)


def test_demo_spins_rejects_zero_samples():
    with pytest.raises(ContractError):
        demo_spins(samples=0)
