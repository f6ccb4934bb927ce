"""Selfadjoint logarithms of Jacobi transfer matrices.

For ``T > 0`` the transfer matrix ``[[(E - V) T^-1, -T], [T^-1, 0]]`` is
similar, through ``X = diag(T^(1/2) M, T^(-1/2) M)`` in the group, to a
direct sum of 2 x 2 blocks ``[[d, -1], [1, 0]]`` where ``d`` runs over the
eigenvalues of ``T^(-1/2) (E - V) T^(-1/2) = M D M*``.  Each block has an
explicit Hermitian ``h`` with ``exp(J h) = [[d, -1], [1, 0]]``; the lower
right entry of ``h`` is negative on the negative branch (no eigenvalue
``d >= 2``) and positive on the positive branch (no ``d <= -2``).

Exponentiating the logarithms piecewise yields a continuous interpolation
of the discrete Pruefer phases whose spectral flow through -1 counts
eigenvalues.
"""
import json
import logging
from dataclasses import dataclass

import numpy as np

from . import specflow
from .errors import (
    AboveCritical,
    BelowCritical,
    BranchViolation,
    StepTooCoarse,
    Uncovered,
)
from .jacobi import pruefer_sequence, transfer_matrix
from .numkernel import dagger, expm, herm_eig, inv_sqrt_psd, sqrt_psd
from .symplectic import _J, dirichlet_frame, stereo

log = logging.getLogger(__name__)

TOL_PAR = 1e-9
SERIES_CUTOFF = 1e-4
TOL_LOG = 1e-8
TOL_ENDPOINT = 1e-8
SUBSTEPS = 16
NEGATIVE = "negative"
POSITIVE = "positive"


@dataclass(frozen=True)
class BlockClassification:
    """Spectral data of one transfer matrix.

    Attributes
    ----------
    M : (L, L) ndarray
        Unitary diagonalizer of ``T^(-1/2) (E - V) T^(-1/2)``.
    D : (L,) ndarray
        Its eigenvalues, ascending.
    kinds : tuple of str
        Per eigenvalue one of ``hyperbolic-``, ``parabolic-``,
        ``elliptic``, ``parabolic+``, ``hyperbolic+``.
    sizes : tuple of int
        Counts of the five kinds in that order.
    kappa : (L,) ndarray
        ``arccosh(|d| / 2)`` for hyperbolic entries, else nan.
    theta : (L,) ndarray
        Elliptic angle for the chosen branch, else nan.
    branch : str
    """

    M: np.ndarray
    D: np.ndarray
    kinds: tuple
    sizes: tuple
    kappa: np.ndarray
    theta: np.ndarray
    branch: str

    def as_dict(self):
        return {
            "D": self.D.tolist(),
            "kinds": list(self.kinds),
            "sizes": list(self.sizes),
            "kappa": [None if np.isnan(k) else float(k) for k in self.kappa],
            "theta": [None if np.isnan(t) else float(t) for t in self.theta],
            "branch": self.branch,
        }


KINDS = ("hyperbolic-", "parabolic-", "elliptic", "parabolic+", "hyperbolic+")


def _kind(d, tol_par):
    if abs(d + 2) <= tol_par:
        return "parabolic-"
    if abs(d - 2) <= tol_par:
        return "parabolic+"
    if d < -2:
        return "hyperbolic-"
    if d > 2:
        return "hyperbolic+"
    return "elliptic"


def _kappa(d):
    """arccosh(|d|/2) for |d| > 2, computed without cancellation."""
    u = abs(d) / 2 - 1
    return float(np.arcsinh(np.sqrt(u * (u + 2))))


def _theta(d, branch):
    """Elliptic angle: cos = -d/2 in (-pi, 0) or cos = d/2 in (0, pi)."""
    s = np.sqrt(max(0.0, (1 - d / 2) * (1 + d / 2)))
    if branch == NEGATIVE:
        return float(np.arctan2(-s, -d / 2))
    return float(np.arctan2(s, d / 2))


def _normalized(V, T):
    """Return ``T^(-1/2)`` and ``T^(1/2)``."""
    Ti = inv_sqrt_psd(T)
    Ts = sqrt_psd(T)
    return Ti, Ts


def classify(V, T, E, branch=NEGATIVE, tol_par=TOL_PAR):
    """Block classification of the transfer matrix at energy E."""
    V = np.atleast_2d(np.asarray(V, dtype=complex))
    T = np.atleast_2d(np.asarray(T, dtype=complex))
    L = V.shape[0]
    Ti, _ = _normalized(V, T)
    A = Ti @ (E * np.eye(L) - V) @ Ti
    D, M = herm_eig(0.5 * (A + dagger(A)))
    kinds = tuple(_kind(d, tol_par) for d in D)
    sizes = tuple(kinds.count(k) for k in KINDS)
    kappa = np.array([_kappa(d) if k.startswith("hyperbolic") else np.nan
                      for d, k in zip(D, kinds)])
    theta = np.array([_theta(d, branch) if k == "elliptic" else np.nan
                      for d, k in zip(D, kinds)])
    return BlockClassification(M, D, kinds, sizes, kappa, theta, branch)


def transfer_spectrum(V, T, E, tol=1e-8):
    """Eigenvalues of the transfer matrix with structural diagnostics.

    Returns a dict with the eigenvalues, flags for lying on the unit
    circle or the real axis, and the residual of the symmetry
    ``lambda -> 1 / conj(lambda)`` of the multiset.
    """
    lam = np.linalg.eigvals(transfer_matrix(V, T, E))
    on_circle = np.abs(np.abs(lam) - 1) <= tol
    on_real = np.abs(lam.imag) <= tol * np.maximum(1, np.abs(lam))
    mirrored = 1 / np.conj(lam)
    sym = max(np.min(np.abs(lam - m)) / max(1.0, abs(m)) for m in mirrored)
    return {
        "eigenvalues": lam,
        "on_circle": on_circle,
        "on_real": on_real,
        "structured": bool(np.all(on_circle | on_real)),
        "symmetry_residual": float(sym),
    }


def spectrum_check(V, T, E, tol=1e-8):
    return transfer_spectrum(V, T, E, tol)


@dataclass(frozen=True)
class CriticalEnergies:
    E_c: float
    E_c_prime: float

    @property
    def ordered(self):
        """Whether the ordering E_c <= E_c' holds for this operator."""
        return self.E_c <= self.E_c_prime


def critical_energies(H):
    """Thresholds of the negative and positive logarithm branches.

    ``E_c = min_n lambda_min(V_n + 2 T_n)`` is the first energy where some
    ``d`` reaches 2, ``E_c' = max_n lambda_max(V_n - 2 T_n)`` the last one
    where some ``d`` reaches -2, with ``T_1 = 1``.
    """
    H = H.normalized_form()
    lo, hi = np.inf, -np.inf
    for n in range(1, H.N + 1):
        V, T = H.V[n - 1], H.coupling(n)
        lo = min(lo, np.linalg.eigvalsh(V + 2 * T)[0])
        hi = max(hi, np.linalg.eigvalsh(V - 2 * T)[-1])
    return CriticalEnergies(float(lo), float(hi))


def verify_critical_energies(H, eps=1e-3, tol=1e-8):
    """Scan check of the thresholds through the transfer spectra.

    Returns ``(below_ok, above_ok)``: at ``E_c - eps`` every site spectrum
    lies in the negative reals or the circle, at ``E_c + eps`` some site has
    an eigenvalue in the positive reals off the circle.
    """
    crit = critical_energies(H)
    Hn = H.normalized_form()

    def spectra(E):
        for n in range(1, Hn.N + 1):
            yield transfer_spectrum(Hn.V[n - 1], Hn.coupling(n), E, tol)

    def admissible(sp):
        lam = sp["eigenvalues"]
        pos_off = sp["on_real"] & (lam.real > 0) & ~sp["on_circle"]
        return not np.any(pos_off)

    below = all(admissible(sp) for sp in spectra(crit.E_c - eps))
    above = not all(admissible(sp) for sp in spectra(crit.E_c + eps))
    return below, above


def _block_negative(d, kind, theta, kappa):
    """(a, b, c) with h = [[a, b], [conj b, c]] on the negative branch."""
    if kind == "parabolic-":
        return -1.0, -1.0 + 1j * np.pi, -1.0
    if kind == "hyperbolic-":
        s = np.sinh(kappa)
        r = 1 - s * s / 6 + 3 * s ** 4 / 40 if s < SERIES_CUTOFF else kappa / s
        ch = abs(d) / 2
        return -r, -r * ch + 1j * np.pi, -r
    # elliptic, theta in (-pi, 0): sin < 0, cos = -d / 2
    sn = np.sin(theta)
    if abs(sn) < SERIES_CUTOFF and theta > -np.pi / 2:
        r = 1 + sn * sn / 6 + 3 * sn ** 4 / 40
    else:
        r = theta / sn
    return -r, -r * np.cos(theta) + 1j * np.pi, -r


def _block_positive(d, kind, theta, kappa):
    if kind == "parabolic+":
        return 1.0, -1.0, 1.0
    if kind == "hyperbolic+":
        s = np.sinh(kappa)
        r = 1 - s * s / 6 + 3 * s ** 4 / 40 if s < SERIES_CUTOFF else kappa / s
        return r, -r * (d / 2), r
    sn = np.sin(theta)
    if abs(sn) < SERIES_CUTOFF and theta < np.pi / 2:
        r = 1 + sn * sn / 6 + 3 * sn ** 4 / 40
    else:
        r = theta / sn
    return r, -r * np.cos(theta), r


def block_log(d, branch=NEGATIVE, tol_par=TOL_PAR):
    """Hermitian 2 x 2 ``h`` with ``exp(J h) = [[d, -1], [1, 0]]``."""
    kind = _kind(d, tol_par)
    _check_branch(kind, d, branch)
    theta = _theta(d, branch) if kind == "elliptic" else np.nan
    kappa = _kappa(d) if kind.startswith("hyperbolic") else np.nan
    f = _block_negative if branch == NEGATIVE else _block_positive
    a, b, c = f(d, kind, theta, kappa)
    return np.array([[a, b], [np.conj(b), c]], dtype=complex)


def _check_branch(kind, d, branch):
    if branch == NEGATIVE and kind in ("parabolic+", "hyperbolic+"):
        raise BranchViolation(
            f"d = {d:.6g} >= 2: the transfer matrix has a positive real eigenvalue",
            eigenvalue=float(d),
        )
    if branch == POSITIVE and kind in ("parabolic-", "hyperbolic-"):
        raise BranchViolation(
            f"d = {d:.6g} <= -2: the transfer matrix has a negative real eigenvalue",
            eigenvalue=float(d),
        )


@dataclass(frozen=True)
class BlockLog:
    H: np.ndarray
    branch: str
    classification: BlockClassification

    @property
    def lower_right(self):
        L = self.H.shape[0] // 2
        return self.H[L:, L:]


def log_transfer(V, T, E, branch=NEGATIVE, tol_par=TOL_PAR, check=True):
    """Hermitian H with ``expm(J H)`` equal to the transfer matrix.

    Raises
    ------
    BranchViolation
        If the spectrum of the transfer matrix is not admissible for the
        requested branch.
    """
    V = np.atleast_2d(np.asarray(V, dtype=complex))
    T = np.atleast_2d(np.asarray(T, dtype=complex))
    L = V.shape[0]
    cls = classify(V, T, E, branch, tol_par)
    f = _block_negative if branch == NEGATIVE else _block_positive
    a = np.empty(L, dtype=complex)
    b = np.empty(L, dtype=complex)
    c = np.empty(L, dtype=complex)
    for k, (d, kind) in enumerate(zip(cls.D, cls.kinds)):
        _check_branch(kind, d, branch)
        a[k], b[k], c[k] = f(d, kind, cls.theta[k], cls.kappa[k])
    Ti, Ts = _normalized(V, T)
    Mh = dagger(cls.M)
    Xi_up = Mh @ Ti      # upper block of X^-1
    Xi_lo = Mh @ Ts      # lower block of X^-1
    H = np.empty((2 * L, 2 * L), dtype=complex)
    H[:L, :L] = dagger(Xi_up) @ (a.real[:, None] * Xi_up)
    H[:L, L:] = dagger(Xi_up) @ (b[:, None] * Xi_lo)
    H[L:, :L] = dagger(Xi_lo) @ (np.conj(b)[:, None] * Xi_up)
    H[L:, L:] = dagger(Xi_lo) @ (c.real[:, None] * Xi_lo)
    H = 0.5 * (H + dagger(H))
    out = BlockLog(H, branch, cls)
    if check:
        Tm = transfer_matrix(V, T, E)
        err = np.linalg.norm(expm(_J(L) @ H) - Tm, 2) / np.linalg.norm(Tm, 2)
        if err > TOL_LOG:
            log.warning("exp(J H) misses the transfer matrix by %.3g (relative)", err)
    return out


def _sites(H):
    """(V_n, T_n) for n = 0..N including the artificial site 0."""
    H = H.normalized_form()
    L = H.L
    yield np.zeros((L, L)), np.eye(L)
    for n in range(1, H.N + 1):
        yield H.V[n - 1], H.coupling(n)


# below this margin to E = 2 the artificial site is evaluated at E = 0
SITE0_MARGIN = 1e-3


def interpolating_hamiltonian(H, E, tol=1e-12):
    """Piecewise constant Hamiltonians ``H_0 .. H_N`` on the negative branch.

    ``H_n`` governs ``x in (n - 1, n]``.  The artificial site 0 carries
    ``V = 0`` and ``T = 1``.  Its transfer matrix only acts on the
    Dirichlet frame, whose image ``(-1; 0)`` does not depend on E, so for
    E near or above 2 it is taken at E = 0.

    Raises
    ------
    AboveCritical
    """
    crit = critical_energies(H)
    if E >= crit.E_c - tol:
        raise AboveCritical(f"E = {E:.6g} is not below the critical energy {crit.E_c:.6g}")
    logs = []
    for n, (V, T) in enumerate(_sites(H)):
        e = E
        if n == 0 and E >= 2 - SITE0_MARGIN:
            e = 0.0
        logs.append(log_transfer(V, T, e, NEGATIVE, check=False).H)
    return np.array(logs)


def positive_hamiltonians(H, E, tol=1e-12):
    """Positive-branch Hamiltonians ``H_1 .. H_N`` (experimental)."""
    crit = critical_energies(H)
    if E <= crit.E_c_prime + tol:
        raise BelowCritical(
            f"E = {E:.6g} is not above the critical energy {crit.E_c_prime:.6g}"
        )
    Hn = H.normalized_form()
    return np.array([
        log_transfer(Hn.V[n - 1], Hn.coupling(n), E, POSITIVE, check=False).H
        for n in range(1, Hn.N + 1)
    ])


def _piece_path(Hs, start_frame, x0, substeps=SUBSTEPS, max_doublings=8):
    """Frames along ``x -> exp((x - x0 - k) J H_k) Phi`` piece by piece."""
    L = start_frame.shape[1]
    J = _J(L)
    F = start_frame
    xs = [x0]
    frames = [F]
    ends = []
    for k, Hk in enumerate(Hs):
        m = substeps
        for _ in range(max_doublings + 1):
            step = expm(J @ Hk / m)
            piece = []
            G = F
            for _ in range(m):
                G, _ = np.linalg.qr(step @ G)
                piece.append(G)
            U = stereo(np.array([F] + piece))
            try:
                specflow.track_phases(U, np.linspace(0, 1, m + 1))
                break
            except StepTooCoarse:
                m *= 2
        xs.extend(x0 + k + np.arange(1, m + 1) / m)
        frames.extend(piece)
        F = piece[-1]
        ends.append(F)
    return np.array(xs), np.array(frames), np.array(ends)


@dataclass(frozen=True)
class TranslogReport:
    count: int
    flow: specflow.FlowReport
    path: specflow.PhasePath
    endpoint_error: float
    branch: str


def space_flow_translog(H, E):
    """Flow of the interpolated Pruefer phase on [-1, N] through -1."""
    Hs = interpolating_hamiltonian(H, E)
    L = H.L
    xs, frames, ends = _piece_path(Hs, dirichlet_frame(L), -1.0)
    U = stereo(frames)
    path = specflow.track_phases(U, xs)
    rep = specflow.spectral_flow(path, np.pi)
    seq = pruefer_sequence(H.normalized_form(), E)
    err = float(np.max(np.linalg.norm(stereo(ends) - seq.unitaries, 2, axis=(-2, -1))))
    if err > TOL_ENDPOINT:
        log.warning("interpolated phases miss the discrete ones by %.3g", err)
    return TranslogReport(rep.net_flow, rep, path, err, NEGATIVE)


def count_by_space_translog(H, E):
    """Number of eigenvalues <= E for E below the critical energy."""
    return space_flow_translog(H, E).count


def space_flow_translog_positive(H, E):
    """Positive-branch flow on [0, N]; crossings through -1 are negative.

    The count of eigenvalues <= E is ``N L`` plus the (nonpositive) flow.
    Experimental.
    """
    Hs = positive_hamiltonians(H, E)
    L = H.L
    start = np.vstack([np.eye(L), np.zeros((L, L))]).astype(complex)
    xs, frames, ends = _piece_path(Hs, start, 0.0)
    path = specflow.track_phases(stereo(frames), xs)
    rep = specflow.spectral_flow(path, np.pi)
    seq = pruefer_sequence(H.normalized_form(), E)
    err = float(np.max(np.linalg.norm(stereo(ends) - seq.unitaries[1:], 2, axis=(-2, -1))))
    return TranslogReport(H.N * L + rep.net_flow, rep, path, err, POSITIVE)


def count_by_space_translog_positive(H, E):
    """Experimental positive-branch count for E above E_c'."""
    return space_flow_translog_positive(H, E).count


def count_translog(H, E):
    """Dispatch to the branch covering E.

    Raises
    ------
    Uncovered
        If E lies in neither ``(-inf, E_c)`` nor ``(E_c', inf)``.
    """
    crit = critical_energies(H)
    if E < crit.E_c:
        return count_by_space_translog(H, E)
    if E > crit.E_c_prime:
        return count_by_space_translog_positive(H, E)
    raise Uncovered(f"E = {E:.6g} lies in [{crit.E_c:.6g}, {crit.E_c_prime:.6g}]")


def classification_records(H, E, branch=NEGATIVE):
    """JSON text with one classification record per site."""
    Hn = H.normalized_form()
    recs = []
    for n in range(1, Hn.N + 1):
        c = classify(Hn.V[n - 1], Hn.coupling(n), E, branch)
        recs.append({"site": n, **c.as_dict()})
    return json.dumps(recs, indent=2)
