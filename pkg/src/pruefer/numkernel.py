"""Dense kernels at fiber sizes L and 2L.

Hermitian and unitary eigendecompositions, polar decomposition, matrix
exponential and the positive square root.  Every tolerance is a module
constant that can be overridden per call.
"""
from typing import NamedTuple

import numpy as np
import scipy.linalg

from .errors import NonHermitian, NonUnitary, NotPositive, Overflow, Singular

TOL_SYM = 1e-12
TOL_UNIT = 1e-10
TOL_INV = 1e-13
# exp overflows float64 a little above 709
EXPM_NORM_LIMIT = 700.0


class HermEig(NamedTuple):
    values: np.ndarray
    vectors: np.ndarray


class UnitaryEig(NamedTuple):
    phases: np.ndarray
    vectors: np.ndarray


def dagger(A):
    """Conjugate transpose over the last two axes."""
    return np.conj(np.swapaxes(A, -1, -2))


def _norm(A):
    return np.linalg.norm(A, ord=2) if A.size else 0.0


def hermiticity_residual(A):
    A = np.asarray(A)
    return float(np.linalg.norm(A - dagger(A)))


def unitarity_residual(U):
    U = np.asarray(U)
    return float(np.linalg.norm(dagger(U) @ U - np.eye(U.shape[-1])))


def herm_eig(A, tol=TOL_SYM):
    """Eigendecomposition of a Hermitian matrix.

    Parameters
    ----------
    A : (n, n) array_like
        Hermitian matrix; symmetry is checked to ``tol * ||A||``.
    tol : float, optional
        Relative symmetry tolerance.

    Returns
    -------
    HermEig
        Ascending eigenvalues and the unitary matrix of eigenvectors
        (columns).
    """
    A = np.asarray(A, dtype=complex)
    scale = max(_norm(A), 1.0)
    if hermiticity_residual(A) > tol * scale:
        raise NonHermitian(
            f"matrix is not Hermitian: residual {hermiticity_residual(A):.3g}"
        )
    A = 0.5 * (A + dagger(A))
    w, v = np.linalg.eigh(A)
    return HermEig(w, v)


def wrap_phase(phi):
    """Map angles into (-pi, pi]."""
    phi = np.asarray(phi, dtype=float)
    out = np.mod(phi + np.pi, 2 * np.pi) - np.pi
    return np.where(out <= -np.pi, out + 2 * np.pi, out)


def unitary_phases(U):
    """Eigenphases in (-pi, pi] of a unitary or a stack of unitaries.

    No unitarity check and no eigenvectors; used by the phase trackers.
    The phases of each matrix are returned in ascending order.
    """
    lam = np.linalg.eigvals(np.asarray(U))
    return np.sort(wrap_phase(np.angle(lam)), axis=-1)


def unitary_eig(U, tol=TOL_UNIT):
    """Eigenphases and eigenvectors of a unitary matrix.

    A complex Schur decomposition is used; for a normal matrix the
    triangular factor is diagonal and the Schur vectors are orthonormal
    eigenvectors, also inside degenerate clusters.

    Returns
    -------
    UnitaryEig
        Phases in (-pi, pi], ascending, and the unitary eigenvector matrix.
    """
    U = np.asarray(U, dtype=complex)
    if unitarity_residual(U) > tol:
        raise NonUnitary(f"matrix is not unitary: residual {unitarity_residual(U):.3g}")
    T, Z = scipy.linalg.schur(U, output="complex")
    phases = wrap_phase(np.angle(np.diag(T)))
    order = np.argsort(phases, kind="stable")
    return UnitaryEig(phases[order], Z[:, order])


def unitary_log(U, tol=TOL_UNIT):
    """Hermitian Q with exp(iQ) = U, principal branch (spectrum in (-pi, pi])."""
    phases, Z = unitary_eig(U, tol)
    return (Z * phases) @ dagger(Z)


def polar_unitary(T, tol=TOL_INV):
    """Unitary factor G of the polar decomposition T = G (T*T)^(1/2)."""
    T = np.asarray(T, dtype=complex)
    W, s, Vh = np.linalg.svd(T)
    if s[-1] <= tol * max(s[0], 1.0):
        raise Singular(f"matrix is numerically singular: smallest singular value {s[-1]:.3g}")
    return W @ Vh


def expm(A):
    """Matrix exponential by scaling and squaring with Pade approximants."""
    A = np.asarray(A)
    if not np.all(np.isfinite(A)):
        raise Overflow("non-finite entries in exponent")
    if np.linalg.norm(A, ord=1) > EXPM_NORM_LIMIT:
        raise Overflow(f"exponent norm {np.linalg.norm(A, ord=1):.3g} too large")
    out = scipy.linalg.expm(A)
    if not np.all(np.isfinite(out)):
        raise Overflow("matrix exponential overflowed")
    return out


def sqrt_psd(A, tol=TOL_SYM):
    """Hermitian positive square root of a positive definite matrix."""
    w, v = herm_eig(A, tol)
    if w[0] <= 0:
        raise NotPositive(f"smallest eigenvalue {w[0]:.3g} is not positive")
    return (v * np.sqrt(w)) @ dagger(v)


def inv_sqrt_psd(A, tol=TOL_SYM):
    w, v = herm_eig(A, tol)
    if w[0] <= 0:
        raise NotPositive(f"smallest eigenvalue {w[0]:.3g} is not positive")
    return (v / np.sqrt(w)) @ dagger(v)


def is_positive_definite(A, tol=0.0):
    A = np.asarray(A)
    if hermiticity_residual(A) > TOL_SYM * max(_norm(A), 1.0):
        return False
    return bool(np.linalg.eigvalsh(0.5 * (A + dagger(A)))[0] > tol)
