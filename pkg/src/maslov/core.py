"""Linear-algebra substrate: symplectic and unitary matrix types, Lagrangian
frames, the Souriau identification of Lag(n) with symmetric unitaries, and the
shared tolerance policy.

Conventions (fixed throughout the library):

* points of phase space are ordered (q_1..q_n, p_1..p_n);
* J0 is the block matrix [[0, -I], [I, 0]] and omega(z, z') = <J0 z, z'>,
  so that omega(e_j, f_k) = delta_jk and g(.,.) = omega(., J0 .);
* U(n, C) embeds into Sp(2n) via A + iB  ->  [[A, -B], [B, A]];
* the vertical Lagrangian L0 = {0} x R^n is the basepoint, and a Lagrangian
  L = embed(r) L0 maps to the symmetric unitary w = r r^T.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, InvariantViolation


@dataclass(frozen=True)
class Tolerances:
    """Numerical policy threaded through every operation.

    residual_tol bounds structural residuals (unitarity, isotropy,
    symplecticity), rank_tol thresholds singular values and eigenvalues,
    phase_tol bounds the distance of a computed index from the nearest
    integer and of a phase from its predicted value.
    """

    residual_tol: float = 1e-9
    rank_tol: float = 1e-8
    phase_tol: float = 1e-6

    def __post_init__(self):
        for name in ("residual_tol", "rank_tol", "phase_tol"):
            if not getattr(self, name) > 0:
                raise InvariantViolation("%s must be strictly positive" % name)

    def rank_floor(self, dim):
        # rank_tol may never undercut machine precision at the given size
        return max(self.rank_tol, np.finfo(float).eps * dim)


DEFAULT_TOLERANCES = Tolerances()


@functools.lru_cache(maxsize=None)
def standard_j(n: int) -> np.ndarray:
    """The standard complex structure J0 on R^{2n}."""
    Z, I = np.zeros((n, n)), np.eye(n)
    J = np.block([[Z, -I], [I, Z]])
    J.setflags(write=False)
    return J


def omega_gram(F: np.ndarray, G: np.ndarray) -> np.ndarray:
    """Matrix of omega(F_i, G_j) for two column collections in R^{2n}."""
    n = F.shape[0] // 2
    return (standard_j(n) @ F).T @ G


@dataclass(frozen=True)
class KahlerPair:
    """The fixed compatible pair (J0, g0) on R^{2n}."""

    n: int

    def __post_init__(self):
        if self.n < 1:
            raise InvariantViolation("n must be a positive integer")
        # g0(u, v) = omega(u, J0 v) must be the standard inner product
        J = standard_j(self.n)
        G = omega_gram(np.eye(2 * self.n), J @ np.eye(2 * self.n))
        if np.max(np.abs(G - np.eye(2 * self.n))) > DEFAULT_TOLERANCES.residual_tol:
            raise InvariantViolation("compatibility g = omega(., J0 .) failed")

    @property
    def j0(self):
        return standard_j(self.n)

    @property
    def g0(self):
        return np.eye(2 * self.n)


def _as_array(x, dtype=float):
    a = np.array(x, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class SymplecticMatrix:
    """A 2n x 2n real matrix S with S^T J0 S = J0 (within residual_tol)."""

    entries: np.ndarray
    n: int = 0

    def __init__(self, entries, tol: Tolerances = DEFAULT_TOLERANCES):
        entries = np.asarray(entries, dtype=float)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1] or entries.shape[0] % 2:
            raise InvariantViolation("symplectic matrix must be square of even size")
        n = entries.shape[0] // 2
        J = standard_j(n)
        resid = np.max(np.abs(entries.T @ J @ entries - J))
        if resid > tol.residual_tol:
            raise InvariantViolation(
                "not symplectic: ||S^T J S - J||_inf = %.3e" % resid)
        object.__setattr__(self, "entries", _as_array(entries))
        object.__setattr__(self, "n", n)

    def __matmul__(self, other):
        if isinstance(other, SymplecticMatrix):
            return SymplecticMatrix(self.entries @ other.entries)
        return self.entries @ other

    def inverse(self) -> "SymplecticMatrix":
        J = standard_j(self.n)
        # S^{-1} = J^{-1} S^T J for symplectic S; avoids a linear solve
        return SymplecticMatrix(-J @ self.entries.T @ J)

    @property
    def blocks(self):
        """The (A, B, C, D) blocks of [[A, B], [C, D]]."""
        n = self.n
        S = self.entries
        return S[:n, :n], S[:n, n:], S[n:, :n], S[n:, n:]


@dataclass(frozen=True)
class UnitaryComplex:
    """An n x n complex matrix U with U*U = I (within residual_tol)."""

    entries: np.ndarray

    def __init__(self, entries, tol: Tolerances = DEFAULT_TOLERANCES):
        entries = np.asarray(entries, dtype=complex)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise InvariantViolation("unitary matrix must be square")
        resid = np.max(np.abs(entries.conj().T @ entries - np.eye(entries.shape[0])))
        if resid > tol.residual_tol:
            raise InvariantViolation("not unitary: ||U*U - I||_inf = %.3e" % resid)
        object.__setattr__(self, "entries", _as_array(entries, dtype=complex))

    @property
    def n(self):
        return self.entries.shape[0]


@dataclass(frozen=True)
class LagrangianFrame:
    """A 2n x n real matrix whose columns span a Lagrangian subspace."""

    columns: np.ndarray
    n: int = 0

    def __init__(self, columns, tol: Tolerances = DEFAULT_TOLERANCES):
        columns = np.asarray(columns, dtype=float)
        if columns.ndim != 2 or columns.shape[0] != 2 * columns.shape[1]:
            raise InvariantViolation("frame must be a 2n x n matrix")
        n = columns.shape[1]
        iso = np.max(np.abs(omega_gram(columns, columns)))
        sv = np.linalg.svd(columns, compute_uv=False)
        if iso > tol.residual_tol * max(1.0, sv[0] ** 2):
            raise InvariantViolation("frame is not isotropic: residual %.3e" % iso)
        if sv[-1] < tol.rank_floor(2 * n):
            raise InvariantViolation("frame is rank deficient: sigma_min %.3e" % sv[-1])
        object.__setattr__(self, "columns", _as_array(columns))
        object.__setattr__(self, "n", n)

    def orthonormalized(self) -> "LagrangianFrame":
        Q, R = np.linalg.qr(self.columns)
        # keep a deterministic column orientation
        Q = Q * np.sign(np.diagonal(R))
        return LagrangianFrame(Q)


def l0_frame(n: int) -> LagrangianFrame:
    """Frame of the vertical basepoint L0 = {0} x R^n."""
    return LagrangianFrame(np.vstack([np.zeros((n, n)), np.eye(n)]))


def line_frame(alpha: float) -> LagrangianFrame:
    """The line at angle alpha in R^2 (every line is Lagrangian for n = 1)."""
    return LagrangianFrame(np.array([[np.cos(alpha)], [np.sin(alpha)]]))


def embed_unitary(U, tol: Tolerances = DEFAULT_TOLERANCES) -> SymplecticMatrix:
    """Embed U = A + iB in U(n, C) as the symplectic-orthogonal [[A, -B], [B, A]]."""
    if not isinstance(U, UnitaryComplex):
        U = UnitaryComplex(U, tol)
    A, B = U.entries.real, U.entries.imag
    return SymplecticMatrix(np.block([[A, -B], [B, A]]), tol)


def unitary_from_symplectic(S: SymplecticMatrix,
                            tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """Recover U with embed_unitary(U) = S; S must lie in the unitary image."""
    A, B, C, D = S.blocks
    resid = max(np.max(np.abs(A - D)), np.max(np.abs(B + C)))
    if resid > tol.residual_tol * 10:
        raise InvariantViolation(
            "matrix is not in the unitary image: block residual %.3e" % resid)
    U = A + 1j * C
    UnitaryComplex(U, tol)  # validates
    return U


def souriau_map(L: LagrangianFrame, tol: Tolerances = DEFAULT_TOLERANCES) -> UnitaryComplex:
    """Souriau image w = r r^T of span(L), a symmetric unitary.

    For an orthonormal frame with blocks X (positions) and Y (momenta) the
    matrix V = X + iY is unitary and w = -V V^T; this is r r^T for the
    unitary r = Y - iX carrying L0 onto span(L).
    """
    F = L.orthonormalized().columns
    n = L.n
    X, Y = F[:n], F[n:]
    V = X + 1j * Y
    w = -(V @ V.T)
    w = (w + w.T) / 2  # symmetric by construction; tidy roundoff
    return UnitaryComplex(w, tol)


def lagrangian_from_souriau(w, tol: Tolerances = DEFAULT_TOLERANCES) -> LagrangianFrame:
    """Inverse of the Souriau map.

    Factors the symmetric unitary w as r r^T through a real orthonormal
    eigenbasis (w is normal with commuting real and imaginary parts), then
    returns the frame embed_unitary(r) L0.  Any admissible r yields the same
    subspace.
    """
    if isinstance(w, UnitaryComplex):
        w = w.entries
    w = np.asarray(w, dtype=complex)
    if np.max(np.abs(w - w.T)) > tol.residual_tol:
        raise InvariantViolation("Souriau matrix must be symmetric")
    UnitaryComplex(w, tol)
    n = w.shape[0]
    V = _real_eigenbasis(w, tol)
    lam = np.diagonal(V.T @ w @ V)
    r = V @ np.diag(np.exp(0.5j * np.angle(lam))) @ V.T
    A, B = r.real, r.imag
    return LagrangianFrame(np.vstack([-B, A]), tol)


def _real_eigenbasis(w, tol):
    """Common real orthonormal eigenbasis of Re(w) and Im(w) for symmetric unitary w."""
    X, Y = w.real, w.imag
    ev, V = np.linalg.eigh(X)
    cols, start = [], 0
    n = w.shape[0]
    group_tol = max(1e-7, 100 * tol.residual_tol)
    for k in range(1, n + 1):
        if k == n or abs(ev[k] - ev[start]) > group_tol:
            Vg = V[:, start:k]
            _, W = np.linalg.eigh(Vg.T @ Y @ Vg)
            cols.append(Vg @ W)
            start = k
    return np.hstack(cols)


def intersection_dim(L1: LagrangianFrame, L2: LagrangianFrame,
                     tol: Tolerances = DEFAULT_TOLERANCES) -> int:
    """dim(span L1 intersect span L2), as 2n - rank([L1 | L2])."""
    if L1.n != L2.n:
        raise DimensionMismatch("frames have n = %d and n = %d" % (L1.n, L2.n))
    F = np.hstack([L1.orthonormalized().columns, L2.orthonormalized().columns])
    sv = np.linalg.svd(F, compute_uv=False)
    rank = int(np.sum(sv > tol.rank_floor(2 * L1.n)))
    return 2 * L1.n - rank


def souriau_intersection_dim(w1, w2, tol: Tolerances = DEFAULT_TOLERANCES) -> int:
    """Intersection dimension read off the Souriau images: the multiplicity of
    eigenvalue 1 of w1 w2^{-1} (cross-check of intersection_dim)."""
    if isinstance(w1, UnitaryComplex):
        w1 = w1.entries
    if isinstance(w2, UnitaryComplex):
        w2 = w2.entries
    lam = np.linalg.eigvals(w1 @ np.linalg.inv(w2))
    return int(np.sum(np.abs(lam - 1.0) < tol.rank_floor(w1.shape[0]) * 100))


def random_unitary(n: int, rng: np.random.Generator) -> UnitaryComplex:
    """Haar-like unitary from QR of a complex Gaussian matrix."""
    Z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    Q, R = np.linalg.qr(Z)
    d = np.diagonal(R)
    return UnitaryComplex(Q * (d / np.abs(d)).conj())


def random_lagrangian(n: int, rng: np.random.Generator) -> LagrangianFrame:
    """Random Lagrangian frame embed_unitary(random U) . L0; exact by construction."""
    S = embed_unitary(random_unitary(n, rng))
    return LagrangianFrame(S.entries @ l0_frame(n).columns)
