"""Tensor product structures over a global Hilbert space, and their refactorizations.

A tensor product structure (TPS) is encoded by a factorization unitary U on
the global space: column ``k*d2 + r`` of U is the product basis vector
|k, r> of the TPS expressed in the global computational basis.  The trivial
TPS is U = identity.  Coefficients of a state in a TPS are the entries of
``U^dagger psi`` reshaped to d1 x d2 (left factor slow).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BijectionError,
    ContractError,
    GridSpecError,
    NumericalError,
    ShapeError,
    SpectrumError,
)
from .linalg import (
    HERMITIAN_TOL,
    UNITARY_TOL,
    _fix_phase,
    as_matrix,
    check_hermitian,
    check_state,
    commutator_maxnorm,
    eigh,
    tensor_op,
)


def _check_unitary(u: np.ndarray, tol: float = UNITARY_TOL) -> np.ndarray:
    u = as_matrix(u)
    if u.shape[0] != u.shape[1]:
        raise ShapeError(f"unitary must be square, got {u.shape}")
    d = u.shape[0]
    # Permutation-structured matrices are common here; check them in O(D^2)
    # instead of forming U^dagger U.
    nz = np.count_nonzero(u)
    if nz == d:
        rows, cols = np.nonzero(u)
        if (
            np.array_equal(np.sort(rows), np.arange(d))
            and np.array_equal(np.sort(cols), np.arange(d))
            and np.max(np.abs(np.abs(u[rows, cols]) - 1.0)) <= tol
        ):
            return u
    defect = float(np.max(np.abs(u.conj().T @ u - np.eye(d))))
    if defect > tol:
        raise ContractError(f"factorization matrix is not unitary: max defect {defect:.3e}")
    return u


@dataclass(frozen=True)
class TensorProductStructure:
    """Factor dimensions plus the unitary identifying global and product bases."""

    d1: int
    d2: int
    unitary: np.ndarray
    label_left: tuple[str, ...] | None = None
    label_right: tuple[str, ...] | None = None

    def __post_init__(self):
        if self.d1 < 1 or self.d2 < 1:
            raise ShapeError(f"factor dimensions must be positive, got ({self.d1}, {self.d2})")
        u = _check_unitary(self.unitary)
        if u.shape[0] != self.d1 * self.d2:
            raise ShapeError(
                f"unitary dimension {u.shape[0]} != d1*d2 = {self.d1 * self.d2}"
            )
        object.__setattr__(self, "unitary", u)

    @property
    def dim(self) -> int:
        return self.d1 * self.d2

    def product_coordinates(self, psi: np.ndarray) -> np.ndarray:
        """Components of psi over this TPS's product basis (U^dagger psi)."""
        psi = check_state(psi)
        if psi.size != self.dim:
            raise ShapeError(f"state dim {psi.size} vs TPS dim {self.dim}")
        return self.unitary.conj().T @ psi


def trivial_tps(d1: int, d2: int) -> TensorProductStructure:
    return TensorProductStructure(d1, d2, np.eye(d1 * d2, dtype=complex))


def coefficient_matrix(psi, tps: TensorProductStructure) -> np.ndarray:
    """d1 x d2 coefficient matrix of psi in the given TPS (unit Frobenius norm)."""
    c = tps.product_coordinates(psi).reshape(tps.d1, tps.d2)
    fro = float(np.linalg.norm(c))
    if abs(fro - 1.0) > 1e-10:
        raise ContractError(f"coefficient matrix norm {fro!r} deviates from 1")
    return c


@dataclass(frozen=True)
class IndexBijection:
    """A bijection of the d1 x d2 product index grid onto itself.

    ``forward_a``/``forward_b`` hold the image (a, b) = map(i, j) per grid
    point; the inverse tables are derived at construction, which also proves
    bijectivity by exhaustion.
    """

    d1: int
    d2: int
    forward_a: np.ndarray
    forward_b: np.ndarray
    inverse_i: np.ndarray = field(init=False)
    inverse_j: np.ndarray = field(init=False)

    def __post_init__(self):
        fa = np.asarray(self.forward_a, dtype=int)
        fb = np.asarray(self.forward_b, dtype=int)
        if fa.shape != (self.d1, self.d2) or fb.shape != (self.d1, self.d2):
            raise ShapeError(
                f"forward tables must be shaped ({self.d1}, {self.d2}), "
                f"got {fa.shape} and {fb.shape}"
            )
        if fa.min() < 0 or fa.max() >= self.d1 or fb.min() < 0 or fb.max() >= self.d2:
            raise BijectionError("image indices fall outside the grid")
        flat = fa.ravel() * self.d2 + fb.ravel()
        order = np.argsort(flat, kind="stable")
        if not np.array_equal(flat[order], np.arange(self.d1 * self.d2)):
            seen = np.bincount(flat, minlength=self.d1 * self.d2)
            dup = int(np.argmax(seen))
            raise BijectionError(
                f"index map is not a bijection: target ({dup // self.d2}, {dup % self.d2}) "
                f"is hit {int(seen[dup])} times"
            )
        inv_i, inv_j = np.divmod(order, self.d2)
        object.__setattr__(self, "forward_a", fa)
        object.__setattr__(self, "forward_b", fb)
        object.__setattr__(self, "inverse_i", inv_i.reshape(self.d1, self.d2))
        object.__setattr__(self, "inverse_j", inv_j.reshape(self.d1, self.d2))

    @classmethod
    def from_callable(cls, d1: int, d2: int, fn) -> "IndexBijection":
        fa = np.empty((d1, d2), dtype=int)
        fb = np.empty((d1, d2), dtype=int)
        for i in range(d1):
            for j in range(d2):
                fa[i, j], fb[i, j] = fn(i, j)
        return cls(d1, d2, fa, fb)

    def forward(self, i: int, j: int) -> tuple[int, int]:
        return int(self.forward_a[i, j]), int(self.forward_b[i, j])

    def inverse(self, a: int, b: int) -> tuple[int, int]:
        return int(self.inverse_i[a, b]), int(self.inverse_j[a, b])

    def flat_targets(self) -> np.ndarray:
        """Length-D array t with t[i*d2+j] = global index of map(i, j)."""
        return (self.forward_a * self.d2 + self.forward_b).ravel()


def identity_bijection(d1: int, d2: int) -> IndexBijection:
    i, j = np.meshgrid(np.arange(d1), np.arange(d2), indexing="ij")
    return IndexBijection(d1, d2, i, j)


def swap_bijection(d: int) -> IndexBijection:
    """Exchange the two factors of a d x d grid: (i, j) -> (j, i)."""
    i, j = np.meshgrid(np.arange(d), np.arange(d), indexing="ij")
    return IndexBijection(d, d, j, i)


def factor_local_bijection(perm1, perm2) -> IndexBijection:
    """(i, j) -> (perm1[i], perm2[j]); never mixes the factors."""
    p1 = np.asarray(perm1, dtype=int)
    p2 = np.asarray(perm2, dtype=int)
    i, j = np.meshgrid(np.arange(p1.size), np.arange(p2.size), indexing="ij")
    return IndexBijection(p1.size, p2.size, p1[i], p2[j])


def random_bijection(d1: int, d2: int, rng: np.random.Generator) -> IndexBijection:
    """Uniformly random relabeling of the whole grid (generically factor-mixing)."""
    perm = rng.permutation(d1 * d2)
    a, b = np.divmod(perm, d2)
    return IndexBijection(d1, d2, a.reshape(d1, d2), b.reshape(d1, d2))


def sum_diff_bijection(d: int) -> IndexBijection:
    """Modular sum/difference relabeling (i, j) -> ((i+j) mod d, (i-j) mod d).

    The grid must be odd so 2 is invertible mod d; the inverse uses
    inv2 = (d+1)/2: i = inv2*(a+b) mod d, j = inv2*(a-b) mod d.
    """
    if d < 1 or d % 2 == 0:
        raise GridSpecError(
            f"sum/difference relabeling needs an odd grid, got d={d}: "
            "2 has no modular inverse mod an even d, so the map would not be a bijection"
        )
    i, j = np.meshgrid(np.arange(d), np.arange(d), indexing="ij")
    return IndexBijection(d, d, (i + j) % d, (i - j) % d)


def relabel_tps(bij: IndexBijection) -> TensorProductStructure:
    """TPS whose product labels are the bijection's images of the trivial labels.

    The coefficient of a state at new label map(i, j) equals its coefficient
    at (i, j) in the trivial TPS.
    """
    dim = bij.d1 * bij.d2
    u = np.zeros((dim, dim), dtype=complex)
    u[np.arange(dim), bij.flat_targets()] = 1.0
    return TensorProductStructure(bij.d1, bij.d2, u)


def local_unitary_tps(
    tps: TensorProductStructure, u_a, u_b
) -> TensorProductStructure:
    """Rotate each factor basis by a local unitary; the TPS itself is preserved."""
    u_a = _check_unitary(u_a)
    u_b = _check_unitary(u_b)
    if u_a.shape[0] != tps.d1 or u_b.shape[0] != tps.d2:
        raise ShapeError(
            f"local unitaries {u_a.shape[0]}x{u_b.shape[0]} vs factors ({tps.d1}, {tps.d2})"
        )
    return TensorProductStructure(tps.d1, tps.d2, tps.unitary @ tensor_op(u_a, u_b))


def _cluster_eigenvalues(vals: np.ndarray, tol: float) -> list[tuple[float, slice]]:
    """Group ascending eigenvalues into near-degenerate clusters."""
    clusters = []
    start = 0
    for k in range(1, vals.size + 1):
        if k == vals.size or abs(vals[k] - vals[k - 1]) > tol:
            clusters.append((float(np.mean(vals[start:k])), slice(start, k)))
            start = k
    return clusters


def tps_from_joint_eigenbasis(
    f_obs,
    g_obs,
    d1: int,
    d2: int,
    herm_tol: float = HERMITIAN_TOL,
    cluster_tol: float = 1e-8,
) -> TensorProductStructure:
    """TPS whose product basis is the joint eigenbasis of two commuting observables.

    The joint spectrum must separate into d1 distinct eigenvalues of the first
    observable times d2 distinct eigenvalues of the second, each F-eigenspace
    carrying the same G-spectrum.  Product label (s, t) pairs the s-th
    F-eigenvalue (descending) with the t-th G-eigenvalue (descending).

    Raises:
        ContractError: non-commuting or non-Hermitian inputs.
        SpectrumError: joint spectrum is not a d1 x d2 grid.
    """
    f_obs = check_hermitian(f_obs, herm_tol)
    g_obs = check_hermitian(g_obs, herm_tol)
    dim = f_obs.shape[0]
    if g_obs.shape[0] != dim or dim != d1 * d2:
        raise ShapeError(f"observable dims {f_obs.shape[0]}, {g_obs.shape[0]} vs d1*d2 = {d1 * d2}")
    comm = commutator_maxnorm(f_obs, g_obs)
    if comm > herm_tol:
        raise ContractError(f"observables do not commute: max|[F,G]| = {comm:.3e}")

    fvals, fvecs = eigh(f_obs, herm_tol)
    scale = max(1.0, float(np.max(np.abs(fvals))))
    clusters = _cluster_eigenvalues(fvals, cluster_tol * scale)
    if len(clusters) != d1:
        raise SpectrumError(
            f"first observable has {len(clusters)} distinct eigenvalues with "
            f"multiplicities {[c[1].stop - c[1].start for c in clusters]}, expected {d1}"
        )
    clusters.sort(key=lambda c: -c[0])
    f_labels = tuple(f"F={c[0]:.12g}" for c in clusters)

    columns = []
    g_grid = None
    for fval, block in clusters:
        w = fvecs[:, block]
        mult = w.shape[1]
        if mult != d2:
            raise SpectrumError(
                f"eigenvalue {fval:.6g} of the first observable has multiplicity "
                f"{mult}, expected {d2}"
            )
        restricted = w.conj().T @ g_obs @ w
        gvals, gvecs = eigh(restricted, herm_tol * 10)
        order = np.argsort(-gvals, kind="stable")
        gvals = gvals[order]
        gvecs = gvecs[:, order]
        gscale = max(1.0, float(np.max(np.abs(gvals))))
        if d2 > 1 and np.min(np.abs(np.diff(gvals))) <= cluster_tol * gscale:
            raise SpectrumError(
                f"second observable is degenerate inside the F={fval:.6g} eigenspace: "
                f"eigenvalues {gvals.tolist()}"
            )
        if g_grid is None:
            g_grid = gvals
        elif np.max(np.abs(gvals - g_grid)) > cluster_tol * gscale:
            raise SpectrumError(
                f"G-spectrum {gvals.tolist()} inside the F={fval:.6g} eigenspace "
                f"differs from the first eigenspace's {g_grid.tolist()}"
            )
        for t in range(d2):
            col = w @ gvecs[:, t]
            columns.append(col * _fix_phase(col))
    u = np.column_stack(columns)
    g_labels = tuple(f"G={v:.12g}" for v in g_grid)
    return TensorProductStructure(d1, d2, u, label_left=f_labels, label_right=g_labels)


def disentangling_tps(psi, tps: TensorProductStructure) -> TensorProductStructure:
    """A TPS with the same factor dimensions in which psi is a product state.

    psi becomes the product basis state (0, 0): the factorization unitary's
    first column is psi itself, completed to an orthonormal basis by
    Gram-Schmidt over the computational basis.  One canonical choice among
    many; deterministic.
    """
    psi = check_state(psi)
    dim = tps.dim
    if psi.size != dim:
        raise ShapeError(f"state dim {psi.size} vs TPS dim {dim}")
    cols = [psi / np.linalg.norm(psi)]
    for k in range(dim):
        if len(cols) == dim:
            break
        v = np.zeros(dim, dtype=complex)
        v[k] = 1.0
        # two orthogonalization passes keep the basis orthonormal to ~1e-15
        for _ in range(2):
            for c in cols:
                v = v - c * np.vdot(c, v)
        n = float(np.linalg.norm(v))
        if n > 1e-6:
            cols.append(v / n)
    if len(cols) != dim:  # pragma: no cover - impossible by rank counting
        raise NumericalError("basis completion lost rank")
    return TensorProductStructure(tps.d1, tps.d2, np.column_stack(cols))
