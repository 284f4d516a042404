"""Seeded random states and operators for demos and property tests."""

from __future__ import annotations

import numpy as np

from .linalg import tensor_vec


def haar_state(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Unit vector with Haar-uniform direction (normalized complex normals)."""
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def random_product_pair(d1: int, d2: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    return haar_state(d1, rng), haar_state(d2, rng)


def random_product_state(d1: int, d2: int, rng: np.random.Generator) -> np.ndarray:
    u, v = random_product_pair(d1, d2, rng)
    return tensor_vec(u, v)


def random_hermitian(dim: int, rng: np.random.Generator) -> np.ndarray:
    m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return (m + m.conj().T) / 2.0


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR with the standard phase correction."""
    m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(m)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_entangled_state(
    d1: int,
    d2: int,
    rng: np.random.Generator,
    min_alpha_ratio: float = 1e-3,
) -> np.ndarray:
    """Haar state rejected until the second Schmidt coefficient clears a floor.

    The floor keeps downstream entanglement margins bounded away from zero;
    Haar states are almost surely full rank, so rejections are rare.
    """
    while True:
        psi = haar_state(d1 * d2, rng)
        s = np.linalg.svd(psi.reshape(d1, d2), compute_uv=False)
        if s[1] >= min_alpha_ratio * s[0]:
            return psi
