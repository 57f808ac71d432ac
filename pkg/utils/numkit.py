"""
Complex Matrix Toolkit
======================

Small, exact building blocks for the eigen-domain model:
- Householder transition matrices that carry one unit vector onto another
- A one-sided Jacobi SVD for seeds and sorted-order reference decompositions
- Eigen-to-physical assembly and unitarity checks

Matrices are complex128 numpy arrays. Functions that accept a matrix also
accept a stack of matrices along a leading axis where noted.
"""

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from constants import Numerics
from utils.errors import ConvergenceError, DimensionError, NormError

ORDER_DESCENDING = "descending"
ORDER_NATURAL = "natural"


@dataclass(frozen=True)
class SvdTriple:
    """H = U S V^H with S carrying the singular values on its diagonal"""
    U: np.ndarray
    S: np.ndarray
    V: np.ndarray
    order: str

    @property
    def values(self) -> np.ndarray:
        return np.real(np.diagonal(self.S)).copy()


def as_cvector(x, name: str = "vector") -> np.ndarray:
    v = np.asarray(x, dtype=np.complex128)
    if v.ndim != 1 or v.size < 1:
        raise DimensionError(f"{name} must be a non-empty 1-D array, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise NormError(f"{name} has non-finite entries")
    return v


def as_cmatrix(x, name: str = "matrix") -> np.ndarray:
    a = np.asarray(x, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise DimensionError(f"{name} must be a non-empty 2-D array, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise NormError(f"{name} has non-finite entries")
    return a


def _check_unit(v: np.ndarray, name: str):
    err = abs(np.linalg.norm(v) - 1.0)
    if err >= Numerics.UNIT_NORM_TOL:
        raise NormError(f"{name} is not unit-norm (| ||v|| - 1 | = {err:.3e})")


def _transition_z(w: np.ndarray, u_prev: np.ndarray) -> complex:
    # Re z = ||w||^2 / 2 keeps I - w w^H / z exactly unitary
    return 0.5 * float(np.vdot(w, w).real) + 1j * float(np.vdot(w, u_prev).imag)


def householder_transition(u_prev, u_next, tol: float = Numerics.HOUSEHOLDER_TOL) -> np.ndarray:
    """
    Unitary T with T @ u_prev == u_next, built as I - w w^H / (w^H u_prev)
    where w = u_prev - u_next. Identical (or numerically degenerate) inputs
    give the identity.
    """
    u_prev = as_cvector(u_prev, "u_prev")
    u_next = as_cvector(u_next, "u_next")
    if u_prev.shape != u_next.shape:
        raise DimensionError(f"length mismatch: {u_prev.size} vs {u_next.size}")
    _check_unit(u_prev, "u_prev")
    _check_unit(u_next, "u_next")

    n = u_prev.size
    w = u_prev - u_next
    if np.linalg.norm(w) < tol:
        return np.eye(n, dtype=np.complex128)
    return np.eye(n, dtype=np.complex128) - np.outer(w, w.conj()) / _transition_z(w, u_prev)


def householder_step(U: np.ndarray, u_prev: np.ndarray, u_next: np.ndarray,
                     tol: float = Numerics.HOUSEHOLDER_TOL) -> np.ndarray:
    """
    Rank-one form of apply_transition(householder_transition(u_prev, u_next), U).
    No validation; meant for long chains where inputs are already known good.
    """
    w = u_prev - u_next
    if np.linalg.norm(w) < tol:
        return U.copy()
    return U - np.outer(w, w.conj() @ U) / _transition_z(w, u_prev)


def transport_step(U: np.ndarray, u_prev: np.ndarray, u_next: np.ndarray,
                   tol: float = Numerics.HOUSEHOLDER_TOL) -> np.ndarray:
    """
    householder_step followed by a phase fix on the complement of u_next.

    A Householder transition has det T = -conj(z)/z, which jumps between
    neighbouring samples however small the step. Multiplying the direction
    orthogonal to u_next inside span{u_prev, u_next} by conj(det T) leaves
    det(U) unchanged along a chain, so columns 2..N move as smoothly as
    column one.
    """
    w = u_prev - u_next
    if np.linalg.norm(w) < tol:
        return U.copy()
    z = _transition_z(w, u_prev)
    out = U - np.outer(w, w.conj() @ U) / z
    q = u_prev - np.vdot(u_next, u_prev) * u_next
    rho = np.linalg.norm(q)
    if rho < tol:
        return out
    e = q / rho
    det_t = -np.conj(z) / z
    return out + np.outer((np.conj(det_t) - 1.0) * e, e.conj() @ out)


def apply_transition(T, U_prev) -> np.ndarray:
    T = as_cmatrix(T, "T")
    U_prev = as_cmatrix(U_prev, "U_prev")
    if T.shape[0] != T.shape[1]:
        raise DimensionError(f"transition must be square, got {T.shape}")
    if T.shape[1] != U_prev.shape[0]:
        raise DimensionError(f"cannot apply {T.shape} transition to {U_prev.shape} matrix")
    return T @ U_prev


def unitarity_error(M) -> float:
    """max |M^H M - I|; accepts a single square matrix or a stack of them"""
    a = np.asarray(M, dtype=np.complex128)
    if a.ndim < 2 or a.shape[-1] != a.shape[-2]:
        raise DimensionError(f"unitarity needs square matrices, got shape {a.shape}")
    gram = np.conj(np.swapaxes(a, -1, -2)) @ a
    eye = np.eye(a.shape[-1], dtype=np.complex128)
    return float(np.max(np.abs(gram - eye))) if gram.size else 0.0


def assemble(U, S, V) -> np.ndarray:
    """U S V^H for one triple or for stacks with a shared leading axis"""
    U = np.asarray(U, dtype=np.complex128)
    S = np.asarray(S, dtype=np.complex128)
    V = np.asarray(V, dtype=np.complex128)
    if U.ndim < 2 or S.ndim < 2 or V.ndim < 2:
        raise DimensionError("assemble needs matrices")
    n, m = S.shape[-2], S.shape[-1]
    if U.shape[-2:] != (n, n) or V.shape[-2:] != (m, m):
        raise DimensionError(
            f"expected U {n}x{n}, V {m}x{m} for S {n}x{m}; got U {U.shape[-2:]}, V {V.shape[-2:]}"
        )
    return U @ S @ np.conj(np.swapaxes(V, -1, -2))


def reorthonormalize(U: np.ndarray, keep_first: bool = True) -> np.ndarray:
    """Modified Gram-Schmidt over the columns; column 0 only gets renormalized."""
    Q = np.array(U, dtype=np.complex128, copy=True)
    Q[:, 0] /= np.linalg.norm(Q[:, 0])
    start = 1 if keep_first else 0
    for k in range(start, Q.shape[1]):
        v = Q[:, k]
        for j in range(k):
            v = v - np.vdot(Q[:, j], v) * Q[:, j]
        Q[:, k] = v / np.linalg.norm(v)
    return Q


def _complete_basis(Q: np.ndarray, n: int) -> np.ndarray:
    """Extend orthonormal columns Q (n x r, r may be 0) to an n x n unitary."""
    cols = [Q[:, k] for k in range(Q.shape[1])]
    for e in np.eye(n, dtype=np.complex128):
        if len(cols) == n:
            break
        v = e.copy()
        for _ in range(2):
            for q in cols:
                v = v - np.vdot(q, v) * q
        norm = np.linalg.norm(v)
        if norm > 1e-8:
            cols.append(v / norm)
    return np.column_stack(cols)


def _jacobi_columns(A: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """One-sided (Hestenes) Jacobi: returns W = A J and J with W's columns orthogonal."""
    W = A.copy()
    r = W.shape[1]
    J = np.eye(r, dtype=np.complex128)
    for _ in range(Numerics.SVD_MAX_SWEEPS):
        rotated = False
        for p in range(r - 1):
            for q in range(p + 1, r):
                alpha = np.real(np.vdot(W[:, p], W[:, p]))
                beta = np.real(np.vdot(W[:, q], W[:, q]))
                gamma = np.vdot(W[:, p], W[:, q])
                g = abs(gamma)
                if g == 0.0 or g <= Numerics.SVD_OFF_DIAGONAL * np.sqrt(alpha * beta):
                    continue
                rotated = True
                phase = gamma / g
                zeta = (beta - alpha) / (2.0 * g)
                t = (1.0 if zeta >= 0 else -1.0) / (abs(zeta) + np.sqrt(1.0 + zeta * zeta))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = c * t
                wp, wq = W[:, p].copy(), W[:, q] * np.conj(phase)
                W[:, p] = c * wp - s * wq
                W[:, q] = s * wp + c * wq
                jp, jq = J[:, p].copy(), J[:, q] * np.conj(phase)
                J[:, p] = c * jp - s * jq
                J[:, q] = s * jp + c * jq
        if not rotated:
            return W, J
    raise ConvergenceError(f"Jacobi SVD did not converge in {Numerics.SVD_MAX_SWEEPS} sweeps")


def svd(H, order: str = ORDER_DESCENDING) -> SvdTriple:
    """
    Jacobi SVD for matrices up to 8x8. The first nonzero element of every V
    column is made real-positive so repeated decompositions agree.
    """
    H = as_cmatrix(H, "H")
    if order not in (ORDER_DESCENDING, ORDER_NATURAL):
        raise ValueError(f"unknown order {order!r}")
    n, m = H.shape
    if max(n, m) > Numerics.SVD_MAX_DIM:
        raise DimensionError(f"svd supports up to {Numerics.SVD_MAX_DIM}x{Numerics.SVD_MAX_DIM}, got {n}x{m}")

    flipped = m > n
    A = np.conj(H.T) if flipped else H
    rows, r = A.shape

    W, J = _jacobi_columns(A)
    sigma = np.linalg.norm(W, axis=0)
    if order == ORDER_DESCENDING:
        perm = np.argsort(-sigma, kind="stable")
        sigma, W, J = sigma[perm], W[:, perm], J[:, perm]

    scale = float(sigma.max()) if sigma.size else 0.0
    live = sigma > scale * 1e-15 if scale > 0 else np.zeros(r, dtype=bool)
    left = np.zeros((rows, r), dtype=np.complex128)
    left[:, live] = W[:, live] / sigma[live]
    if not np.all(live):
        # zero singular values take their left vectors from the orthogonal complement
        sigma = np.where(live, sigma, 0.0)
        full = _complete_basis(left[:, live], rows)
        spare = full[:, int(np.count_nonzero(live)):]
        for i, k in enumerate(np.flatnonzero(~live)):
            left[:, k] = spare[:, i]
    left_full = _complete_basis(left, rows)

    if flipped:
        U, V = J, left_full
    else:
        U, V = left_full, J

    # phase gauge on V, mirrored onto the paired U columns
    for k in range(V.shape[1]):
        nz = np.flatnonzero(np.abs(V[:, k]) > 1e-300)
        if nz.size == 0:
            continue
        ph = V[nz[0], k] / abs(V[nz[0], k])
        V[:, k] *= np.conj(ph)
        if k < U.shape[1]:
            U[:, k] *= np.conj(ph)

    S = np.zeros((n, m), dtype=np.complex128)
    S[np.arange(r), np.arange(r)] = sigma
    return SvdTriple(U=U, S=S, V=V, order=order)
