"""Block Jacobi operators and their discrete Pruefer phases.

The operator acts on ``(C^L)^N`` by
``(H phi)_n = T_{n+1} phi_{n+1} + V_n phi_n + T_n* phi_{n-1}``.  After a
site-wise unitary gauge all off-diagonal blocks are positive definite and
the eigenvalue equation becomes a product of 2L x 2L transfer matrices.
Eigenvalues below E are counted three ways: by the energy rotation of the
last Pruefer phase, by Morse indices of the S-matrices and by the spectral
flow of an explicit interpolating path.
"""
from dataclasses import dataclass, field

import numpy as np

from . import specflow
from .errors import BranchCut, Singular, SingularEnergy
from .numkernel import (
    TOL_INV,
    dagger,
    is_positive_definite,
    polar_unitary,
    unitary_eig,
    unitary_phases,
    wrap_phase,
)
from .symplectic import TOL_PHASE, neumann_frame, stereo

TOL_ZERO = 1e-10
TOL_SING = 1e-8
TOL_RECURRENCE = 1e-8
SEGMENT_SAMPLES = 24


def _herm(A):
    return 0.5 * (A + dagger(A))


@dataclass(frozen=True, eq=False)
class BlockJacobiOperator:
    """Block tridiagonal Hermitian operator.

    Parameters
    ----------
    V : (N, L, L) array_like
        Hermitian diagonal blocks ``V_1 .. V_N``.
    T : (N - 1, L, L) array_like
        Invertible off-diagonal blocks ``T_2 .. T_N``; ``T[k]`` couples
        sites ``k + 1`` and ``k + 2`` (one based).
    """

    V: np.ndarray
    T: np.ndarray
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        V = np.array(self.V, dtype=complex)
        if V.ndim == 2:
            V = V[:, :, None] if V.shape[1] != V.shape[0] else V[None]
        if V.ndim == 1:
            V = V[:, None, None]
        N, L = V.shape[0], V.shape[-1]
        T = np.array(self.T, dtype=complex).reshape(N - 1, L, L) if N > 1 else np.zeros((0, L, L), complex)
        if np.abs(V - dagger(V)).max(initial=0.0) > 1e-12 * max(1.0, np.abs(V).max()):
            raise ValueError("diagonal blocks must be Hermitian")
        for k, t in enumerate(T):
            s = np.linalg.svd(t, compute_uv=False)
            if s[-1] <= TOL_INV * max(1.0, s[0]):
                raise Singular(f"off-diagonal block T_{k + 2} is not invertible")
        object.__setattr__(self, "V", _herm(V))
        object.__setattr__(self, "T", T)

    @property
    def N(self):
        return self.V.shape[0]

    @property
    def L(self):
        return self.V.shape[-1]

    @property
    def normalized(self):
        if "normalized" not in self._cache:
            self._cache["normalized"] = all(is_positive_definite(t) for t in self.T)
        return self._cache["normalized"]

    def dense(self):
        """The assembled ``NL x NL`` Hermitian matrix."""
        N, L = self.N, self.L
        H = np.zeros((N * L, N * L), dtype=complex)
        for n in range(N):
            H[n * L:(n + 1) * L, n * L:(n + 1) * L] = self.V[n]
        for k, t in enumerate(self.T):
            H[k * L:(k + 1) * L, (k + 1) * L:(k + 2) * L] = t
            H[(k + 1) * L:(k + 2) * L, k * L:(k + 1) * L] = dagger(t)
        return H

    def truncate(self, n):
        """Leading truncation to the first n sites."""
        return BlockJacobiOperator(self.V[:n], self.T[:n - 1])

    def coupling(self, n):
        """``T_n`` for one based n, with ``T_1 = T_{N+1} = 1``."""
        if n <= 1 or n > self.N:
            return np.eye(self.L, dtype=complex)
        return self.T[n - 2]

    def normalized_form(self):
        """Gauge-equivalent operator with positive couplings (cached)."""
        if self.normalized:
            return self
        if "gauged" not in self._cache:
            self._cache["gauged"] = gauge_normalize(self)[0]
        return self._cache["gauged"]

    def energy_floor(self):
        """Gershgorin-type lower bound on the spectrum, minus one."""
        lo = np.inf
        for n in range(1, self.N + 1):
            r = 0.0
            if n > 1:
                r += np.linalg.norm(self.T[n - 2], 2)
            if n < self.N:
                r += np.linalg.norm(self.T[n - 1], 2)
            lo = min(lo, np.linalg.eigvalsh(self.V[n - 1])[0] - r)
        return float(lo) - 1.0

    def energy_ceiling(self):
        hi = -np.inf
        for n in range(1, self.N + 1):
            r = 0.0
            if n > 1:
                r += np.linalg.norm(self.T[n - 2], 2)
            if n < self.N:
                r += np.linalg.norm(self.T[n - 1], 2)
            hi = max(hi, np.linalg.eigvalsh(self.V[n - 1])[-1] + r)
        return float(hi) + 1.0

    @classmethod
    def free_chain(cls, N, L=1):
        """Discrete Laplacian: ``V_n = 0`` and ``T_n = 1``."""
        return cls(np.zeros((N, L, L)), np.broadcast_to(np.eye(L), (N - 1, L, L)))

    @classmethod
    def random(cls, L, N, rng=None, coupling_floor=0.3, normalized=False):
        """Random operator with well conditioned couplings.

        The couplings are ``W (s + floor) Z*`` with random unitaries W, Z
        and singular values ``s`` uniform in [0, 1].
        """
        rng = np.random.default_rng(rng)
        A = rng.normal(size=(N, L, L)) + 1j * rng.normal(size=(N, L, L))
        V = (A + dagger(A)) / 2
        T = np.empty((N - 1, L, L), dtype=complex)
        for k in range(N - 1):
            W, _ = np.linalg.qr(rng.normal(size=(L, L)) + 1j * rng.normal(size=(L, L)))
            Z, _ = np.linalg.qr(rng.normal(size=(L, L)) + 1j * rng.normal(size=(L, L)))
            s = rng.uniform(0.0, 1.0, L) + coupling_floor
            T[k] = (W * s) @ (dagger(Z) if not normalized else dagger(W))
        return cls(V, T)


def gauge_normalize(H):
    """Unitary gauge making every coupling positive definite.

    Returns
    -------
    (BlockJacobiOperator, ndarray)
        The normalized operator ``G H G*`` and the unitaries ``G_1 .. G_N``
        with ``G_1 = 1``.
    """
    N, L = H.N, H.L
    G = np.empty((N, L, L), dtype=complex)
    G[0] = np.eye(L)
    T = np.empty_like(H.T)
    for n in range(1, N):
        A = G[n - 1] @ H.T[n - 1]
        G[n] = polar_unitary(A)
        T[n - 1] = _herm(A @ dagger(G[n]))
    V = G @ H.V @ dagger(G)
    return BlockJacobiOperator(V, T), G


def transfer_matrix(V, T, E):
    """Transfer matrix ``[[(E - V) T^-1, -T], [T^-1, 0]]``."""
    V = np.atleast_2d(np.asarray(V, dtype=complex))
    T = np.atleast_2d(np.asarray(T, dtype=complex))
    L = V.shape[0]
    try:
        Ti = np.linalg.inv(T)
    except np.linalg.LinAlgError as exc:
        raise Singular("coupling is not invertible") from exc
    out = np.zeros((2 * L, 2 * L), dtype=complex)
    out[:L, :L] = (E * np.eye(L) - V) @ Ti
    out[:L, L:] = -T
    out[L:, :L] = Ti
    return out


@dataclass(frozen=True)
class PrueferSequence:
    """Discrete Pruefer data at one energy.

    ``frames[n]`` is the orthonormalized frame at site n = 0..N,
    ``unitaries[n]`` its stereographic image and ``phi[n]`` the scaled
    solution blocks for n = 0..N+1, with ``log_scales[n]`` the natural log
    of the scale divided out at step n.
    """

    energy: float
    frames: np.ndarray
    unitaries: np.ndarray
    phi: np.ndarray
    log_scales: np.ndarray


def _require_normalized(H):
    if not H.normalized:
        raise ValueError("operator must be gauge normalized (positive couplings)")


def pruefer_sequence(H, E):
    """Frames, unitaries and scaled solution blocks at energy E."""
    _require_normalized(H)
    N, L = H.N, H.L
    I = np.eye(L, dtype=complex)
    frames = np.empty((N + 1, 2 * L, L), dtype=complex)
    frames[0] = neumann_frame(L)
    F = frames[0]
    for n in range(1, N + 1):
        F, _ = np.linalg.qr(transfer_matrix(H.V[n - 1], H.coupling(n), E) @ F)
        frames[n] = F
    phi = np.empty((N + 2, L, L), dtype=complex)
    phi[0] = 0
    phi[1] = I
    logs = np.zeros(N + 2)
    for n in range(1, N + 1):
        w = (E * I - H.V[n - 1]) @ phi[n] - H.coupling(n) @ phi[n - 1]
        phi[n + 1] = np.linalg.solve(H.coupling(n + 1), w)
        s = max(np.linalg.norm(phi[n], 2), np.linalg.norm(phi[n + 1], 2))
        if s > 2.0 or s < 0.5:
            phi[n] /= s
            phi[n + 1] /= s
            logs[n + 1] = np.log(s)
    return PrueferSequence(float(E), frames, stereo(frames), phi, np.cumsum(logs))


def _end_unitaries(H, energies):
    """U^e_N for a batch of energies (normalized operator)."""
    energies = np.atleast_1d(np.asarray(energies, dtype=float))
    L = H.L
    I = np.eye(L)
    F = np.broadcast_to(neumann_frame(L), (len(energies), 2 * L, L)).copy()
    e = energies[:, None, None]
    for n in range(1, H.N + 1):
        T = H.coupling(n)
        Ti = np.linalg.inv(T)
        up, lo = F[:, :L], F[:, L:]
        new = np.empty_like(F)
        new[:, :L] = (e * I - H.V[n - 1]) @ (Ti @ up) - T @ lo
        new[:, L:] = Ti @ up
        F, _ = np.linalg.qr(new)
    return stereo(F)


def _boundary_resonances(H):
    """Eigenvalues of H with an absorbing term ``-i`` on the last site.

    They are the zeros of ``det(phi_{N+1}(z) + i phi_N(z))``, so that
    ``arg det U^e_N = -2 sum_j arg(e - z_j) + const`` on the real axis.
    """
    if "resonances" not in H._cache:
        A = H.dense()
        L = H.L
        A[-L:, -L:] -= 1j * np.eye(L)
        H._cache["resonances"] = np.linalg.eigvals(A)
    return H._cache["resonances"]


def phase_sum_increments(H, energies):
    """Exact change of the summed eigenphases of U^e_N between samples.

    The per-interval values are free of 2 pi ambiguities and are used to
    detect full turns of a Pruefer phase hidden between two samples.
    """
    z = _boundary_resonances(H)
    e = np.asarray(energies, dtype=float)
    ang = np.angle(e[:, None] - z[None, :])
    return -2.0 * np.diff(ang, axis=0).sum(axis=1)


def energy_flow_jacobi(H, E, E_min=None, max_depth=60):
    """Flow report and path of ``e -> U^e_N`` through -1 on (E_min, E].

    The energy grid is refined until every matched eigenphase step is
    below the tracking threshold and the summed steps agree with the
    exact increment of ``arg det U^e_N``.  Near eigenvalues of strongly
    localized states the phases turn inside exponentially narrow energy
    windows, which plain step-size control cannot see.
    """
    H = H.normalized_form()
    if E_min is None:
        E_min = H.energy_floor()
    path = specflow.refine_adaptively(
        lambda es: unitary_phases(_end_unitaries(H, es)), (E_min, E),
        vectorized=True, phases_only=True, max_depth=max_depth,
        increment=lambda xs: phase_sum_increments(H, xs),
    )
    return specflow.spectral_flow(path, np.pi), path


def count_by_energy_jacobi(H, E, E_min=None):
    """Number of eigenvalues <= E from the energy rotation of U^e_N."""
    E = float(E)
    floor = H.normalized_form().energy_floor() if E_min is None else float(E_min)
    if E <= floor:
        return 0
    return energy_flow_jacobi(H, E, floor)[0].net_flow


@dataclass(frozen=True)
class SMatrixSequence:
    """S-matrices ``S_1 .. S_N`` in a scalar rescaled gauge."""

    energy: float
    S: np.ndarray
    morse: np.ndarray
    complement: np.ndarray
    recurrence_residual: float
    hermiticity_residual: float


def inertia_complement(S, tol_zero=TOL_ZERO):
    """Number of eigenvalues >= -tol_zero * ||S||."""
    w = np.linalg.eigvalsh(_herm(S))
    scale = np.abs(w).max(axis=-1, initial=0.0) if w.ndim == 1 else np.abs(w).max(axis=-1)
    return np.sum(w >= -tol_zero * np.asarray(scale)[..., None], axis=-1)


def s_matrices(H, E):
    """S-matrices ``phi_n* T_{n+1} phi_{n+1}`` with their Morse indices.

    Solution blocks are rescaled by positive scalars to stay bounded; this
    multiplies each S by a positive number and leaves all inertias and the
    projectors onto nonnegative eigenspaces unchanged.
    """
    _require_normalized(H)
    N, L = H.N, H.L
    I = np.eye(L, dtype=complex)
    prev, cur = np.zeros((L, L), complex), I.copy()
    S = np.empty((N, L, L), dtype=complex)
    rec = 0.0
    herm = 0.0
    S_prev = None
    for n in range(1, N + 1):
        a = (E * I - H.V[n - 1]) @ cur
        w = a - H.coupling(n) @ prev
        Sn = dagger(cur) @ w
        herm = max(herm, np.linalg.norm(Sn - dagger(Sn)) / max(1.0, np.linalg.norm(Sn)))
        if S_prev is not None:
            r = Sn - (dagger(cur) @ a - S_prev)
            scale = max(1.0, np.linalg.norm(dagger(cur) @ a), np.linalg.norm(S_prev))
            rec = max(rec, np.linalg.norm(r) / scale)
        Sn = _herm(Sn)
        S[n - 1] = Sn
        nxt = np.linalg.solve(H.coupling(n + 1), w)
        s = max(np.linalg.norm(cur, 2), np.linalg.norm(nxt, 2))
        S_prev = Sn / s ** 2
        prev, cur = cur / s, nxt / s
    comp = np.array([inertia_complement(s) for s in S])
    return SMatrixSequence(float(E), S, L - comp, comp, rec, herm)


def singular_set(H):
    """Sorted union of the spectra of the truncations H_1 .. H_{N-1}."""
    if "singular" not in H._cache:
        vals = [np.linalg.eigvalsh(H.truncate(n).dense()) for n in range(1, H.N)]
        H._cache["singular"] = np.sort(np.concatenate(vals)) if vals else np.zeros(0)
    return H._cache["singular"]


def spectral_diameter(H):
    if "diameter" not in H._cache:
        w = np.linalg.eigvalsh(H.dense())
        H._cache["diameter"] = float(max(w[-1] - w[0], 1.0))
    return H._cache["diameter"]


def check_regular_energy(H, E, tol_sing=TOL_SING):
    """Raise SingularEnergy if E is within tol_sing * diameter of the singular set."""
    sing = singular_set(H)
    if sing.size == 0:
        return np.inf
    d = float(np.min(np.abs(sing - E)))
    if d <= tol_sing * spectral_diameter(H):
        raise SingularEnergy(E, d)
    return d


def morse_count(H, E, tol_sing=TOL_SING, tol_zero=TOL_ZERO):
    """Sum of the nonnegative inertias of the S-matrices.

    Each step is orthonormalized by a QR factorization of the frame
    ``(T_{n+1} phi_{n+1}; phi_n)``.  The common right factor acts on
    ``S_n`` by congruence, so the inertia is preserved while the matrices
    stay well conditioned.

    Raises
    ------
    SingularEnergy
        If E is too close to the spectrum of a leading truncation.
    """
    E = float(E)
    check_regular_energy(H, E, tol_sing)
    S = orthonormal_s_matrices(H.normalized_form(), E)
    return int(sum(inertia_complement(s, tol_zero) for s in S))


def orthonormal_s_matrices(H, E):
    """S-matrices in the gauge where every frame is orthonormal.

    Returns ``b_n* c_n`` for the orthonormalized frame
    ``(c_n; b_n) ~ (T_{n+1} phi_{n+1}; phi_n)``.  Each is congruent to the
    S-matrix of the unnormalized recursion.
    """
    _require_normalized(H)
    N, L = H.N, H.L
    I = np.eye(L, dtype=complex)
    c, b = I.copy(), np.zeros((L, L), complex)  # T_1 phi_1 and phi_0
    out = np.empty((N, L, L), dtype=complex)
    for n in range(1, N + 1):
        T = H.coupling(n)
        phi_n = np.linalg.solve(T, c)
        c_next = (E * I - H.V[n - 1]) @ phi_n - T @ b
        Q, _ = np.linalg.qr(np.vstack([c_next, phi_n]))
        c, b = Q[:L], Q[L:]
        out[n - 1] = _herm(dagger(b) @ c)
    return out


def _principal_log(U, tol_phase):
    ph, Z = unitary_eig(U, tol=1e-8)
    if np.any(np.abs(wrap_phase(ph - np.pi)) <= tol_phase):
        raise BranchCut("a Pruefer unitary has eigenvalue -1; the principal logarithm is undefined")
    return ph, Z


def interpolation_path(H, E, samples=SEGMENT_SAMPLES, tol_phase=TOL_PHASE,
                       tol_sing=TOL_SING):
    """Three-segment interpolating path of unitaries over [0, N].

    On ``[n-1, n]`` the path contracts ``U_{n-1}`` to the identity along
    its principal logarithm, then winds ``exp(2 pi i t P_n)`` with
    ``P_n`` the projector onto the nonnegative eigenspace of ``S_n``, then
    grows the identity into ``U_n``.

    Raises
    ------
    BranchCut, SingularEnergy
    """
    E = float(E)
    check_regular_energy(H, E, tol_sing)
    H = H.normalized_form()
    seq = pruefer_sequence(H, E)
    N = H.N
    logs = [_principal_log(U, tol_phase) for U in seq.unitaries]
    # the loop projector is taken in the orthonormal gauge; it has the
    # rank of the nonnegative spectral projector of the S-matrix
    S = orthonormal_s_matrices(H, E)
    t = np.linspace(0.0, 1.0, samples + 1)
    params, mats = [], []
    for n in range(1, N + 1):
        ph0, Z0 = logs[n - 1]
        ph1, Z1 = logs[n]
        w, Y = np.linalg.eigh(_herm(S[n - 1]))
        scale = np.abs(w).max(initial=0.0)
        proj = (w >= -TOL_ZERO * scale).astype(float)
        seg = [
            (Z0, lambda s: (1 - s)[:, None] * ph0[None]),
            (Y, lambda s: 2 * np.pi * s[:, None] * proj[None]),
            (Z1, lambda s: s[:, None] * ph1[None]),
        ]
        for j, (B, phases) in enumerate(seg):
            s = t if (n == 1 and j == 0) else t[1:]
            P = phases(s)
            mats.append(np.einsum("ij,kj,lj->kil", B, np.exp(1j * P), B.conj()))
            params.append(n - 1 + (j + s) / 3.0)
    params = np.concatenate(params)
    U = np.concatenate(mats)
    return specflow.track_phases(U, params)


def interpolation_flow(H, E, **kwargs):
    """Spectral flow through -1 of the interpolating path."""
    return specflow.spectral_flow(interpolation_path(H, E, **kwargs), np.pi).net_flow


def energy_monotonicity_jacobi(H, E, dE=1e-6):
    """Smallest eigenvalue of the finite-difference (1/i) U_N* dU_N/dE."""
    H = H.normalized_form()
    Um, U0, Up = _end_unitaries(H, [E - dE, E, E + dE])
    D = dagger(U0) @ (Up - Um) / (2j * dE)
    return float(np.linalg.eigvalsh(_herm(D))[0])


def end_unitary(H, E):
    """U^E_N of the normalized form of H."""
    return _end_unitaries(H.normalized_form(), [E])[0]


def locate_eigenvalues_jacobi(H, window, tol_E=1e-8):
    """Eigenvalues of H in (a, b] with multiplicities.

    Eigenphases of ``U^E_N`` pass -1 upward exactly at eigenvalues, so the
    energy sweep is bracketed and refined like the continuum case.
    """
    Hn = H.normalized_form()

    def gen(es):
        return unitary_phases(_end_unitaries(Hn, es))

    return specflow.locate_crossings(gen, window, tol_E=tol_E, target=np.pi,
                                     increment=lambda xs: phase_sum_increments(Hn, xs))


def parse_builtin(name):
    """``free_chain(N)`` or ``free_chain(N, L)``."""
    name = name.strip()
    if name.startswith("free_chain(") and name.endswith(")"):
        args = [int(a) for a in name[len("free_chain("):-1].split(",") if a.strip()]
        return BlockJacobiOperator.free_chain(*args)
    raise KeyError(name)
