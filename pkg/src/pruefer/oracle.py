"""Independent reference spectra.

Dense diagonalization for block Jacobi operators, a finite element
discretization of Sturm-Liouville problems, and closed forms for the
builtin problems.  None of this uses phases or frames, so it checks the
oscillation counts from outside.
"""
import csv
import io
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eig_banded

from .errors import TooLarge, UnsupportedBoundary
from .numkernel import dagger

MAX_DENSE = 4096
TOL_COUNT = 1e-9


@dataclass(frozen=True)
class ReferenceSpectrum:
    """Ascending eigenvalues with the method that produced them.

    ``parameter`` is the mesh size for discretizations and None for exact
    spectra.
    """

    eigenvalues: np.ndarray
    method: str
    parameter: int | None = None

    def __post_init__(self):
        ev = np.sort(np.asarray(self.eigenvalues, dtype=float))
        object.__setattr__(self, "eigenvalues", ev)

    def __len__(self):
        return len(self.eigenvalues)

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["index", "eigenvalue"])
        for k, e in enumerate(self.eigenvalues):
            w.writerow([k, repr(float(e))])
        return buf.getvalue()


def dense_jacobi_spectrum(H):
    """Eigenvalues of the assembled ``N L x N L`` Hermitian matrix."""
    if H.N * H.L > MAX_DENSE:
        raise TooLarge(f"N L = {H.N * H.L} exceeds {MAX_DENSE}")
    return ReferenceSpectrum(np.linalg.eigvalsh(H.dense()), "dense")


def count_below(spec, E, tol=TOL_COUNT):
    """Number of eigenvalues ``<= E`` with a small slack."""
    return int(np.searchsorted(spec.eigenvalues, E + tol, side="right"))


def _robin_matrix(frame, side):
    """Boundary matrix R with ``p phi' + q phi = R phi`` or None for Dirichlet."""
    L = frame.shape[1]
    A, B = frame[:L], frame[L:]
    sA = np.linalg.svd(A, compute_uv=False)
    if sA[0] <= 1e-12 * max(1.0, np.linalg.norm(B, 2)):
        return None
    if sA[-1] <= 1e-10 * sA[0]:
        raise UnsupportedBoundary(f"{side} boundary mixes Dirichlet and Robin channels")
    R = B @ np.linalg.inv(A)
    return 0.5 * (R + dagger(R))


def fd_sl_spectrum(problem, mesh=2000):
    """Linear finite elements for ``-(p phi' + q phi)' + q* phi' + v phi``.

    The quadratic form is assembled on ``mesh`` elements with midpoint
    coefficients and a lumped mass, which keeps the matrix Hermitian and
    block tridiagonal.  Dirichlet ends remove the end node; ends with an
    invertible upper frame block contribute the Robin term
    ``phi* B A^-1 phi``.  Eigenvalue errors are O(mesh^-2).

    Raises
    ------
    UnsupportedBoundary
        For general Hamiltonian systems or partially Dirichlet ends.
    """
    if problem.kind != "sturm_liouville":
        raise UnsupportedBoundary("finite elements need a Sturm-Liouville problem")
    M, L = int(mesh), problem.L
    h = 1.0 / M
    R0 = _robin_matrix(problem.psi0, "left")
    R1 = _robin_matrix(problem.psi1, "right")
    xm = (np.arange(M) + 0.5) * h
    p, q = problem.p(xm), problem.q(xm)
    qh = dagger(q)
    xn = np.arange(M + 1) * h
    vn = problem.v(xn)

    # element stiffness blocks between node j (a=0) and j+1 (a=1)
    d = np.array([-1.0, 1.0]) / h
    diag = np.zeros((M + 1, L, L), dtype=complex)
    off = np.zeros((M, L, L), dtype=complex)  # block (j+1, j)
    for a in range(2):
        for b in range(2):
            blk = h * (d[a] * d[b] * p + d[a] * 0.5 * q + 0.5 * d[b] * qh)
            if a == b:
                diag[a:M + a] += blk
            elif a == 1:
                off += blk
    w = np.full(M + 1, h)
    w[0] = w[-1] = h / 2
    diag += w[:, None, None] * vn
    if R0 is not None:
        diag[0] += R0
    if R1 is not None:
        diag[-1] -= R1
    lo = 1 if R0 is None else 0
    hi = M if R1 is None else M + 1
    diag, off, w = diag[lo:hi], off[lo:hi - 1], w[lo:hi]

    # symmetric scaling by the lumped mass, then lower banded storage
    s = 1 / np.sqrt(w)
    diag = diag * (s[:, None, None] ** 2)
    off = off * (s[1:, None, None] * s[:-1, None, None])
    n = len(w)
    band = np.zeros((2 * L, n * L), dtype=complex)
    for j in range(n):
        blocks = [(diag[j], j)] + ([(off[j], j + 1)] if j + 1 < n else [])
        for blk, row_site in blocks:
            for r in range(L):
                for c in range(L):
                    i_row, i_col = row_site * L + r, j * L + c
                    if i_row >= i_col:
                        band[i_row - i_col, i_col] = blk[r, c]
    ev = eig_banded(band, lower=True, eigvals_only=True)
    return ReferenceSpectrum(ev, "fem", M)


def free_scalar_spectrum(k=20):
    """``n^2 pi^2`` for n = 1..k."""
    n = np.arange(1, k + 1)
    return ReferenceSpectrum((n * np.pi) ** 2, "closed_form")


def free_chain_spectrum(N, L=1):
    """``2 cos(k pi / (N + 1))`` for k = 1..N, each L times."""
    k = np.arange(1, N + 1)
    return ReferenceSpectrum(np.repeat(2 * np.cos(k * np.pi / (N + 1)), L), "closed_form")
