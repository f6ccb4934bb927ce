"""Lagrangian frames, the group of J-unitary matrices and the chart Pi.

A frame is a plain ``(2L, L)`` complex array whose columns span a
Lagrangian plane.  Only its span matters, so every function here is
invariant under ``Phi -> Phi @ c`` for invertible ``c``.  Most functions
also accept stacks ``(..., 2L, L)``.
"""
from functools import lru_cache

import numpy as np

from .errors import NotLagrangian, RankLoss, SingularDenominator
from .numkernel import TOL_UNIT, dagger, unitary_phases, wrap_phase

TOL_LAG = 1e-10
TOL_RANK = 1e-12
TOL_PHASE = 1e-6


@lru_cache(maxsize=None)
def _J(L):
    J = np.zeros((2 * L, 2 * L))
    J[:L, L:] = -np.eye(L)
    J[L:, :L] = np.eye(L)
    J.flags.writeable = False
    return J


def symplectic_form(L):
    """The block matrix [[0, -1], [1, 0]] of size 2L."""
    return _J(int(L)).copy()


def fiber_size(Phi):
    n = np.shape(Phi)[-2]
    if n % 2:
        raise ValueError(f"frame has odd row count {n}")
    return n // 2


def dirichlet_frame(L):
    """Frame (0; 1) of the Dirichlet plane."""
    return np.vstack([np.zeros((L, L)), np.eye(L)]).astype(complex)


def neumann_frame(L):
    """Frame (1; 0); the initial condition of the Jacobi recursion."""
    return np.vstack([np.eye(L), np.zeros((L, L))]).astype(complex)


def lagrangian_residual(Phi):
    """||Phi* J Phi|| / ||Phi||^2, zero for a Lagrangian frame."""
    Phi = np.asarray(Phi)
    L = fiber_size(Phi)
    r = dagger(Phi) @ _J(L) @ Phi
    return np.linalg.norm(r, axis=(-2, -1)) / np.maximum(
        np.linalg.norm(Phi, axis=(-2, -1)) ** 2, 1e-300
    )


def validate_frame(Phi, tol_lag=TOL_LAG, tol_rank=TOL_RANK):
    """Check rank and the Lagrangian property of a single frame."""
    Phi = np.asarray(Phi, dtype=complex)
    if Phi.ndim != 2 or Phi.shape[0] != 2 * Phi.shape[1]:
        raise NotLagrangian(f"frame must have shape (2L, L), got {Phi.shape}")
    s = np.linalg.svd(Phi, compute_uv=False)
    if s[-1] <= tol_rank * s[0]:
        raise NotLagrangian("frame does not have full rank")
    res = lagrangian_residual(Phi)
    if res > tol_lag:
        raise NotLagrangian(f"frame is not Lagrangian: residual {res:.3g}")
    return Phi


def lagrangian_frame(upper, lower, validate=True):
    """Stack two L x L blocks into a frame, optionally validating it."""
    Phi = np.vstack([np.atleast_2d(upper), np.atleast_2d(lower)]).astype(complex)
    return validate_frame(Phi) if validate else Phi


def renormalize(Phi):
    """Orthonormal factor of the thin QR decomposition (same span)."""
    Q, _ = np.linalg.qr(Phi)
    return Q


def stereo(Phi, validate=False):
    """Stereographic projection of a Lagrangian frame onto U(L).

    Returns ``(phi_up - i phi_low) (phi_up + i phi_low)^{-1}``.
    """
    Phi = np.asarray(Phi, dtype=complex)
    if validate:
        validate_frame(Phi)
    L = fiber_size(Phi)
    up, lo = Phi[..., :L, :], Phi[..., L:, :]
    num = up - 1j * lo
    den = up + 1j * lo
    try:
        # X den = num  <=>  den^T X^T = num^T
        X = np.linalg.solve(np.swapaxes(den, -1, -2), np.swapaxes(num, -1, -2))
    except np.linalg.LinAlgError as exc:
        raise SingularDenominator("frame is not Lagrangian or rank deficient") from exc
    return np.swapaxes(X, -1, -2)


def intersection_multiplicity(U, W, target=1, tol_phase=TOL_PHASE):
    """Number of eigenphases of W* U within ``tol_phase`` of the target.

    ``target`` is +1 (phase 0) or -1 (phase pi).
    """
    from .numkernel import unitary_eig

    if target not in (1, -1):
        raise ValueError("target must be +1 or -1")
    phases, _ = unitary_eig(dagger(np.asarray(W)) @ np.asarray(U), tol=max(TOL_UNIT, 1e-8))
    theta = 0.0 if target == 1 else np.pi
    return int(np.sum(np.abs(wrap_phase(phases - theta)) <= tol_phase))


def check_group(T):
    """Residual ||T* J T - J|| of membership in the group G(L)."""
    T = np.asarray(T)
    L = T.shape[-1] // 2
    J = _J(L)
    return np.linalg.norm(dagger(T) @ J @ T - J, axis=(-2, -1))


def relative_group_residual(T):
    T = np.asarray(T)
    scale = np.maximum(np.linalg.norm(T, ord=2, axis=(-2, -1)) ** 2, 1.0)
    return check_group(T) / scale


def act(T, Phi, renormalize_frame=True, tol_rank=TOL_RANK):
    """Apply a group element to a frame, ``T @ Phi``.

    With ``renormalize_frame`` the result is replaced by its orthonormal
    QR factor, which keeps hyperbolic products bounded.
    """
    out = np.asarray(T) @ np.asarray(Phi)
    s = np.linalg.svd(out, compute_uv=False)
    if np.any(s[..., -1] <= tol_rank * s[..., 0]):
        raise RankLoss("frame lost rank under the group action")
    return renormalize(out) if renormalize_frame else out


def stereo_phases(Phi):
    """Eigenphases of stereo(Phi), ascending, for a stack of frames."""
    return unitary_phases(stereo(Phi))
