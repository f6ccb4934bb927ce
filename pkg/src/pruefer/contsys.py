"""Continuum Hamiltonian systems on [0, 1].

A matrix Sturm-Liouville problem ``-(p phi' + q phi)' + q* phi' + v phi``
with Lagrangian boundary frames is rewritten as the first order system
``Phi' = J (V(x) - E P) Phi`` for the frame ``Phi = (phi; p phi' + q phi)``.
Eigenvalues are counted by the rotation of the matrix Pruefer phase
``U^E(x) = Pi(Phi^E(x))`` either in energy at ``x = 1`` or in space at
fixed energy.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import specflow
from .errors import (
    AccuracyExhausted,
    CoefficientSingular,
    NegativeCrossingDetected,
    NotDirichletRight,
    NotPositive,
    StepTooCoarse,
)
from .numkernel import dagger, unitary_eig, unitary_phases
from .symplectic import (
    _J,
    dirichlet_frame,
    lagrangian_residual,
    relative_group_residual,
    stereo,
    validate_frame,
)

log = logging.getLogger(__name__)

TOL_GRP = 1e-8
DEFAULT_STEPS = 1024
MAX_DOUBLINGS = 6
ENERGY_CHUNK = 32
STEP_BLOCK = 256
TOL_FD = 1e-4


def _as_matrix_function(f, L):
    """Wrap a constant or a callable into ``x -> (len(x), L, L)``."""
    if callable(f):
        def g(x):
            out = np.asarray(f(np.asarray(x, dtype=float)), dtype=complex)
            return np.broadcast_to(out, (len(x), L, L)) if out.ndim == 2 else out
        return g
    c = np.asarray(f, dtype=complex).reshape(L, L)
    return lambda x: np.broadcast_to(c, (len(np.atleast_1d(x)), L, L))


def _interp_table(xs, table):
    xs = np.asarray(xs, dtype=float)
    tab = np.asarray(table, dtype=complex)
    flat = tab.reshape(len(xs), -1)

    def f(x):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        re = np.stack([np.interp(x, xs, flat[:, j].real) for j in range(flat.shape[1])], -1)
        im = np.stack([np.interp(x, xs, flat[:, j].imag) for j in range(flat.shape[1])], -1)
        return (re + 1j * im).reshape((len(x),) + tab.shape[1:])

    return f


@dataclass(frozen=True, eq=False)
class ContinuumProblem:
    """Coefficients and boundary frames of a Hamiltonian system on [0, 1].

    Use the constructors :meth:`sturm_liouville`, :meth:`from_tables` and
    :meth:`general` rather than the raw initializer.
    """

    L: int
    kind: str
    psi0: np.ndarray
    psi1: np.ndarray
    p: Callable | None = None
    q: Callable | None = None
    v: Callable | None = None
    V: Callable | None = None
    P: Callable | None = None
    name: str = "custom"
    _cache: dict = field(default_factory=dict, repr=False)

    @classmethod
    def sturm_liouville(cls, p, q, v, psi0=None, psi1=None, L=None, name="custom",
                        validate=True):
        """Sturm-Liouville problem from constants or vectorized callables.

        Callables take an array of positions of length K and return a
        ``(K, L, L)`` array.  Frames default to Dirichlet.
        """
        if L is None:
            L = np.atleast_2d(np.asarray(p if not callable(p) else p(np.zeros(1))[0])).shape[-1]
        psi0 = dirichlet_frame(L) if psi0 is None else validate_frame(psi0)
        psi1 = dirichlet_frame(L) if psi1 is None else validate_frame(psi1)
        prob = cls(
            L=L, kind="sturm_liouville", psi0=psi0, psi1=psi1,
            p=_as_matrix_function(p, L), q=_as_matrix_function(q, L),
            v=_as_matrix_function(v, L), name=name,
        )
        if validate:
            prob.validate()
        return prob

    @classmethod
    def from_tables(cls, x, p, q, v, psi0=None, psi1=None, name="table"):
        """Sturm-Liouville problem from samples, interpolated linearly."""
        x = np.asarray(x, dtype=float)
        if x.ndim != 1 or x.size < 2 or np.any(np.diff(x) <= 0):
            raise ValueError("table grid must be strictly increasing with at least two points")
        if x[0] > 0 or x[-1] < 1:
            raise ValueError("table grid must cover [0, 1]")
        p = np.asarray(p, dtype=complex)
        L = p.shape[-1]
        return cls.sturm_liouville(
            _interp_table(x, p), _interp_table(x, q), _interp_table(x, v),
            psi0, psi1, L=L, name=name,
        )

    @classmethod
    def general(cls, V, P, psi0, psi1, L=None, name="custom", validate=True):
        """General Hamiltonian ``H^E(x) = V(x) - E P(x)`` with P >= 0."""
        if L is None:
            V0 = V(np.zeros(1))[0] if callable(V) else np.asarray(V)
            L = np.shape(V0)[-1] // 2
        prob = cls(
            L=L, kind="general", psi0=validate_frame(psi0), psi1=validate_frame(psi1),
            V=_as_matrix_function(V, 2 * L), P=_as_matrix_function(P, 2 * L), name=name,
        )
        if validate:
            prob.validate()
        return prob

    def validate(self, grid=257, tol=1e-12):
        """Check positivity of p (or P) and Hermiticity on a uniform grid."""
        xs = np.linspace(0.0, 1.0, grid)
        if self.kind == "sturm_liouville":
            p, _, v = self.p(xs), self.q(xs), self.v(xs)
            for name, a in (("p", p), ("v", v)):
                res = np.abs(a - dagger(a)).max()
                if res > tol * max(1.0, np.abs(a).max()):
                    raise ValueError(f"{name}(x) is not Hermitian (residual {res:.3g})")
            if np.linalg.eigvalsh(0.5 * (p + dagger(p))).min() <= 0:
                raise NotPositive("p(x) is not positive definite on the validation grid")
        else:
            V, P = self.V(xs), self.P(xs)
            for name, a in (("V", V), ("P", P)):
                res = np.abs(a - dagger(a)).max()
                if res > tol * max(1.0, np.abs(a).max()):
                    raise ValueError(f"{name}(x) is not Hermitian (residual {res:.3g})")
            if np.linalg.eigvalsh(0.5 * (P + dagger(P))).min() < -tol:
                raise NotPositive("P(x) is not positive semidefinite on the validation grid")
        return self

    def parts(self, xs):
        """Energy independent part V(x) and weight P(x) at positions xs."""
        xs = np.atleast_1d(np.asarray(xs, dtype=float))
        L = self.L
        if self.kind == "general":
            return np.array(self.V(xs), dtype=complex), np.array(self.P(xs), dtype=complex)
        p, q, v = self.p(xs), self.q(xs), self.v(xs)
        try:
            pinv = np.linalg.inv(p)
        except np.linalg.LinAlgError as exc:
            raise CoefficientSingular("p(x) is not invertible") from exc
        qh = dagger(q)
        V = np.empty((len(xs), 2 * L, 2 * L), dtype=complex)
        V[:, :L, :L] = v - qh @ pinv @ q
        V[:, :L, L:] = qh @ pinv
        V[:, L:, :L] = pinv @ q
        V[:, L:, L:] = -pinv
        V = 0.5 * (V + dagger(V))
        P = np.zeros((len(xs), 2 * L, 2 * L), dtype=complex)
        P[:, :L, :L] = np.eye(L)
        return V, np.broadcast_to(P, V.shape)

    def nodes(self, steps):
        """Cached (J V, J P) at the 2 * steps + 1 half-step nodes."""
        key = ("nodes", steps)
        if key not in self._cache:
            xs = np.linspace(0.0, 1.0, 2 * steps + 1)
            V, P = self.parts(xs)
            J = _J(self.L)
            self._cache[key] = (J @ V, J @ P)
        return self._cache[key]

    @property
    def dirichlet_right(self):
        return _spans_equal(self.psi1, dirichlet_frame(self.L))

    def energy_scale(self):
        """Crude magnitude of the coefficients, used to pick step counts."""
        key = "scale"
        if key not in self._cache:
            V, _ = self.parts(np.linspace(0, 1, 257))
            self._cache[key] = float(np.abs(np.linalg.eigvalsh(V)).max())
        return self._cache[key]


def _spans_equal(A, B, tol=1e-10):
    QA, _ = np.linalg.qr(A)
    QB, _ = np.linalg.qr(B)
    return bool(np.linalg.norm(QA - QB @ (dagger(QB) @ QA)) <= tol)


@dataclass(frozen=True)
class ClassicalHamiltonian:
    """Evaluator ``x -> H^E(x) = V(x) - E P(x)``."""

    problem: ContinuumProblem
    energy: float

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        V, P = self.problem.parts(np.atleast_1d(x))
        H = V - self.energy * P
        return H[0] if x.ndim == 0 else H


def build_hamiltonian(problem, E):
    """Hamiltonian of the first order system at energy E."""
    return ClassicalHamiltonian(problem, float(E))


def default_steps(problem, energies=0.0):
    """Power of two step count resolving the local frequency sqrt(|E|)."""
    e = float(np.max(np.abs(np.atleast_1d(energies))))
    freq = math.sqrt(e + problem.energy_scale() + 1.0)
    need = 24.0 * freq
    return max(DEFAULT_STEPS, 1 << int(math.ceil(math.log2(need))))


def _step_maps(problem, energies, steps, start, stop):
    """RK4 one-step maps for steps ``start..stop-1`` at several energies."""
    JV, JP = problem.nodes(steps)
    h = 1.0 / steps
    e = np.asarray(energies, dtype=float)[:, None, None, None]
    sl = slice(2 * start, 2 * stop + 1)
    A = JV[None, sl] - e * JP[None, sl]
    A0, Ah, A1 = A[:, 0:-1:2], A[:, 1::2], A[:, 2::2]
    n = A.shape[-1]
    I = np.eye(n)
    B2 = Ah @ (I + 0.5 * h * A0)
    B3 = Ah @ (I + 0.5 * h * B2)
    B4 = A1 @ (I + h * B3)
    return I + (h / 6.0) * (A0 + 2.0 * B2 + 2.0 * B3 + B4)


def _propagate_frames(problem, energies, steps, keep=False, renorm_every=4):
    """Propagate the left boundary frame to x = 1 for many energies.

    Returns the final orthonormal frames ``(nE, 2L, L)`` and, with ``keep``,
    the frames at every grid node ``(nE, steps + 1, 2L, L)``.
    """
    energies = np.atleast_1d(np.asarray(energies, dtype=float))
    nE = len(energies)
    F = np.broadcast_to(problem.psi0, (nE,) + problem.psi0.shape).copy()
    F, _ = np.linalg.qr(F)
    hist = None
    if keep:
        hist = np.empty((nE, steps + 1) + F.shape[1:], dtype=complex)
        hist[:, 0] = F
    for s0 in range(0, steps, STEP_BLOCK):
        s1 = min(steps, s0 + STEP_BLOCK)
        S = _step_maps(problem, energies, steps, s0, s1)
        for k in range(s1 - s0):
            F = S[:, k] @ F
            if keep or (s0 + k + 1) % renorm_every == 0:
                F, _ = np.linalg.qr(F)
            if keep:
                hist[:, s0 + k + 1] = F
    F, _ = np.linalg.qr(F)
    return F, hist


def end_frames(problem, energies, steps=None):
    """Frames at x = 1, with the Lagrangian residual used as accuracy monitor.

    The step count is doubled until the largest residual is below the
    group tolerance.
    """
    energies = np.atleast_1d(np.asarray(energies, dtype=float))
    steps = default_steps(problem, energies) if steps is None else int(steps)
    out = np.empty((len(energies), 2 * problem.L, problem.L), dtype=complex)
    for c in range(0, len(energies), ENERGY_CHUNK):
        chunk = energies[c:c + ENERGY_CHUNK]
        k = steps
        for _ in range(MAX_DOUBLINGS + 1):
            F, _ = _propagate_frames(problem, chunk, k)
            if np.max(lagrangian_residual(F)) <= TOL_GRP:
                break
            k *= 2
        else:
            raise AccuracyExhausted("Lagrangian residual did not reach tolerance")
        out[c:c + ENERGY_CHUNK] = F
    return out


def end_unitaries(problem, energies, steps=None):
    """U^e(1) for an array of energies."""
    return stereo(end_frames(problem, energies, steps))


def boundary_unitaries(problem, energies, steps=None):
    """Pi(Psi1)* U^e(1); its eigenvalue 1 signals an eigenvalue at e."""
    W = stereo(problem.psi1)
    return dagger(W) @ end_unitaries(problem, energies, steps)


@dataclass(frozen=True)
class FundamentalPath:
    grid: np.ndarray
    transfer: np.ndarray
    residuals: np.ndarray
    steps: int


def integrate_fundamental(problem, E, steps=None):
    """Fundamental solution ``T^E(x)`` with ``T^E(0) = 1`` on a uniform grid.

    Classical RK4.  The relative group residual
    ``||T* J T - J|| / max(1, ||T||^2)`` is monitored at every node; if it
    exceeds the tolerance the step count is doubled and the integration
    restarted, at most six times.

    Raises
    ------
    AccuracyExhausted
    """
    steps = default_steps(problem, E) if steps is None else int(steps)
    if steps < 16:
        raise ValueError("at least 16 steps are required")
    n = 2 * problem.L
    for _ in range(MAX_DOUBLINGS + 1):
        T = np.empty((steps + 1, n, n), dtype=complex)
        T[0] = np.eye(n)
        for s0 in range(0, steps, STEP_BLOCK):
            s1 = min(steps, s0 + STEP_BLOCK)
            S = _step_maps(problem, [E], steps, s0, s1)[0]
            for k in range(s1 - s0):
                T[s0 + k + 1] = S[k] @ T[s0 + k]
        res = relative_group_residual(T)
        if np.all(np.isfinite(res)) and res.max() <= TOL_GRP:
            return FundamentalPath(np.linspace(0, 1, steps + 1), T, res, steps)
        steps *= 2
    raise AccuracyExhausted(f"group residual {res.max():.3g} above {TOL_GRP}")


def pruefer_path(problem, E, steps=None, max_step=specflow.MAX_STEP):
    """Tracked eigenphases of ``x -> U^E(x)`` on the integration grid."""
    steps = default_steps(problem, E) if steps is None else int(steps)
    for _ in range(MAX_DOUBLINGS + 1):
        _, hist = _propagate_frames(problem, [E], steps, keep=True)
        frames = hist[0]
        if lagrangian_residual(frames).max() <= TOL_GRP:
            U = stereo(frames)
            try:
                return specflow.track_phases(U, np.linspace(0, 1, steps + 1), max_step)
            except StepTooCoarse:
                pass
        steps *= 2
    raise AccuracyExhausted("space path could not be resolved")


def _det_phase(F):
    """det U for U = Pi(F), without forming U."""
    L = F.shape[-1]
    a, b = F[..., :L, :], F[..., L:, :]
    d = np.linalg.det(a - 1j * b) / np.linalg.det(a + 1j * b)
    return d / np.abs(d)


def lifted_phase_sum(problem, energies, steps=None):
    """Summed eigenphases of U^e(1), lifted continuously along x.

    All energies share the start frame, so differences between energies
    carry no 2 pi ambiguity.  The increments of ``arg det U^e(x)`` per
    integration step are far below pi on the default grid.
    """
    energies = np.atleast_1d(np.asarray(energies, dtype=float))
    steps = default_steps(problem, energies) if steps is None else int(steps)
    out = np.empty(len(energies))
    for c in range(0, len(energies), ENERGY_CHUNK):
        chunk = energies[c:c + ENERGY_CHUNK]
        F = np.broadcast_to(problem.psi0, (len(chunk),) + problem.psi0.shape).copy()
        prev = _det_phase(F)
        total = np.zeros(len(chunk))
        for s0 in range(0, steps, STEP_BLOCK):
            s1 = min(steps, s0 + STEP_BLOCK)
            S = _step_maps(problem, chunk, steps, s0, s1)
            for k in range(s1 - s0):
                F = S[:, k] @ F
                n = s0 + k + 1
                if n % 4 == 0:
                    F, _ = np.linalg.qr(F)
                if n % 2 == 0 or n == steps:
                    d = _det_phase(F)
                    total += np.angle(d / prev)
                    prev = d
        out[c:c + ENERGY_CHUNK] = total
    return out


def _increment_guard(problem, steps):
    """Cached exact phase-sum increments for :func:`specflow.refine_adaptively`."""
    cache = {}

    def increment(xs):
        xs = np.asarray(xs, dtype=float)
        new = [x for x in xs if x not in cache]
        if new:
            cache.update(zip(new, lifted_phase_sum(problem, new, steps)))
        return np.diff([cache[x] for x in xs])

    return increment


def energy_generator(problem, steps=None):
    """Vectorized map from energies to eigenphases of Pi(Psi1)* U^e(1)."""
    def gen(es):
        return unitary_phases(boundary_unitaries(problem, es, steps))
    return gen


def _floor_guess(problem):
    xs = np.linspace(0.0, 1.0, 257)
    if problem.kind == "sturm_liouville":
        lo = np.linalg.eigvalsh(problem.v(xs)).min()
    else:
        V, _ = problem.parts(xs)
        lo = np.linalg.eigvalsh(V).min()
    return float(lo) - 1.0


def asymptotic_distance(problem, energies, x=1.0, steps=None):
    """||U^E(x) + 1|| for each energy."""
    energies = np.atleast_1d(np.asarray(energies, dtype=float))
    if x == 1.0:
        U = end_unitaries(problem, energies, steps)
    else:
        U = np.array([_unitary_at(problem, e, x, steps) for e in energies])
    return np.linalg.norm(U + np.eye(problem.L), ord=2, axis=(-2, -1))


def find_energy_floor(problem, start=None, max_doublings=12, steps=None):
    """Energy below the spectrum of the boundary value problem.

    Starts from ``min lambda(v) - 1`` and moves down by doubling until the
    check passes.  With a Dirichlet right boundary the check is an exact
    space count of zero; otherwise the energy flow over
    ``[2 E0 - 1, E0]`` must vanish and ``||U^E(1) + 1||`` must decrease.
    """
    E0 = _floor_guess(problem) if start is None else float(start)
    for _ in range(max_doublings):
        if problem.dirichlet_right and _space_positive(problem):
            if count_by_space(problem, E0, steps) == 0:
                return E0
        else:
            lower = 2 * E0 - 1.0 if E0 < 0 else -1.0 - abs(E0)
            report, _ = specflow.flow_of_generator(
                energy_generator(problem, steps), (lower, E0), target=0.0,
                vectorized=True, phases_only=True,
            )
            d = asymptotic_distance(problem, [E0, lower], steps=steps)
            if report.net_flow == 0 and report.endpoint_hits[1] == 0 and d[1] <= d[0] + 1e-12:
                return E0
        E0 = 2 * E0 - 1.0 if E0 < 0 else -1.0 - abs(E0)
    log.warning("could not verify an energy below the spectrum; using %g", E0)
    return E0


def energy_flow(problem, E, E_min=None, steps=None, max_step=specflow.MAX_STEP):
    """Flow report and path of ``e -> Pi(Psi1)* U^e(1)`` through +1 on (E_min, E]."""
    if E_min is None:
        E_min = find_energy_floor(problem, steps=steps)
    if E <= E_min:
        raise ValueError("E must lie above E_min")
    path = specflow.refine_adaptively(
        energy_generator(problem, steps), (E_min, E), max_step=max_step,
        vectorized=True, phases_only=True, increment=_increment_guard(problem, steps),
    )
    return specflow.spectral_flow(path, 0.0), path


def count_by_energy(problem, E, E_min=None, steps=None):
    """Number of eigenvalues <= E, from the energy rotation at x = 1."""
    E = float(E)
    if E_min is None:
        E_min = find_energy_floor(problem, steps=steps)
    if E <= E_min:
        return 0
    report, _ = energy_flow(problem, E, E_min, steps)
    return report.net_flow


def _space_positive(problem):
    """Negativity of the lower-right block of H on a validation grid."""
    if problem.kind == "sturm_liouville":
        return True
    V, P = problem.parts(np.linspace(0, 1, 257))
    L = problem.L
    if np.abs(P[:, L:, L:]).max() > 0:
        return False
    return bool(np.linalg.eigvalsh(V[:, L:, L:]).max() < 0)


def space_flow(problem, E, steps=None):
    """Flow report and path of ``x -> U^E(x)`` through -1 over [0, 1]."""
    if not problem.dirichlet_right:
        raise NotDirichletRight("space counting needs a Dirichlet right boundary")
    if not _space_positive(problem):
        raise NotPositive("lower-right block of the Hamiltonian is not negative definite")
    path = pruefer_path(problem, E, steps)
    return specflow.spectral_flow(path, np.pi), path


def count_by_space(problem, E, steps=None):
    """Number of eigenvalues <= E, from conjugate points in [0, 1].

    Requires the Dirichlet right boundary condition.  Negative crossings
    trigger a refinement; if they persist ``NegativeCrossingDetected`` is
    raised.
    """
    report, path = space_flow(problem, E, steps)
    if any(c.direction < 0 for c in report.crossings):
        k = 2 * (len(path.params) - 1)
        report, _ = space_flow(problem, E, k)
        check_space_positivity_at_minus_one(report.crossings)
    return report.net_flow


def check_space_positivity_at_minus_one(crossings):
    """Directions of crossings through -1; all must be +1."""
    dirs = [c.direction for c in crossings]
    if any(d < 0 for d in dirs):
        bad = [c.param for c in crossings if c.direction < 0]
        raise NegativeCrossingDetected(f"negative passages through -1 at x = {bad}")
    return dirs


def _unitary_at(problem, E, x, steps=None):
    steps = default_steps(problem, E) if steps is None else int(steps)
    if x <= 0:
        return stereo(problem.psi0)
    _, hist = _propagate_frames(problem, [E], steps, keep=True)
    k = int(round(x * steps))
    if abs(k - x * steps) > 1e-9:
        raise ValueError("x must lie on the integration grid")
    return stereo(hist[0, k])


def check_energy_monotonicity(problem, E, x=1.0, dE=1e-5, steps=None):
    """Smallest eigenvalue of the finite-difference estimate of (1/i) U* dU/dE."""
    if x <= 0:
        return 0.0
    steps = default_steps(problem, E) if steps is None else int(steps)
    if x == 1.0:
        Um, U0, Up = end_unitaries(problem, [E - dE, E, E + dE], steps)
    else:
        Um, U0, Up = (_unitary_at(problem, e, x, steps) for e in (E - dE, E, E + dE))
    D = dagger(U0) @ (Up - Um) / (2j * dE)
    return float(np.linalg.eigvalsh(0.5 * (D + dagger(D)))[0])


def check_low_energy_asymptotics(problem, energies, x=1.0, steps=None):
    """Distances ||U^E(x) + 1|| along a sequence of decreasing energies."""
    if x <= 0:
        raise ValueError("x must be positive")
    return asymptotic_distance(problem, energies, x, steps)


def initial_phase_slopes(problem, E):
    """Slopes d/dx of the eigenphases of U^E(x) at x = 0.

    Exact derivative of the stereographic projection along
    ``Phi' = J H Phi``; the slopes are the diagonal entries of
    ``(1/i) U* U'`` in an eigenbasis of ``U``.
    """
    L = problem.L
    Phi = problem.psi0
    H = build_hamiltonian(problem, E)(0.0)
    dPhi = _J(L) @ H @ Phi
    a, b = Phi[:L], Phi[L:]
    da, db = dPhi[:L], dPhi[L:]
    plus = a + 1j * b
    U = (a - 1j * b) @ np.linalg.inv(plus)
    dU = ((da - 1j * db) - U @ (da + 1j * db)) @ np.linalg.inv(plus)
    G = dagger(U) @ dU / 1j
    _, vecs = unitary_eig(U)
    return np.real(np.einsum("ij,ik,kj->j", vecs.conj(), G, vecs))


def locate_eigenvalues(problem, window, tol_E=1e-8, E_min=None, steps=None,
                       max_step=specflow.MAX_STEP):
    """Eigenvalues in the half-open window (a, b] with multiplicities.

    One energy sweep brackets every passage of an eigenphase of
    ``Pi(Psi1)* U^e(1)`` through +1; each bracket is then bisected with
    local flow counts and finished by Brent's method on the crossing
    phase.

    Returns
    -------
    list of (float, int)
    """
    gen = energy_generator(problem, steps)
    return specflow.locate_crossings(gen, window, tol_E=tol_E, max_step=max_step,
                                     increment=_increment_guard(problem, steps))


# builtin problems

def free_scalar():
    """-phi'' on [0, 1] with Dirichlet conditions; eigenvalues n^2 pi^2."""
    return ContinuumProblem.sturm_liouville(1.0, 0.0, 0.0, L=1, name="free_scalar")


def two_channel_example():
    """Two-channel problem with oscillating coefficients and a mixed left boundary.

    ``psi0 = (M; 1)`` with ``M = [[2, 1], [1, -3]]`` and Dirichlet on the
    right.
    """
    def p(x):
        out = np.empty(x.shape + (2, 2), dtype=complex)
        out[:, 0, 0] = 2 + np.cos(12 * x)
        out[:, 0, 1] = out[:, 1, 0] = np.sin(11.5 * x)
        out[:, 1, 1] = 3 - np.sin(16 * x)
        return out

    def q(x):
        out = np.zeros(x.shape + (2, 2), dtype=complex)
        out[:, 0, 0] = 3
        out[:, 0, 1] = np.cos(10 * x)
        out[:, 1, 1] = 3 * np.sin(20 * x)
        return out

    def v(x):
        out = np.empty(x.shape + (2, 2), dtype=complex)
        out[:, 0, 0] = np.cos(5 * x)
        out[:, 0, 1] = out[:, 1, 0] = 7 * np.sin(61.5 * x)
        out[:, 1, 1] = -2 + np.sin(27.5 * x)
        return out

    M = np.array([[2.0, 1.0], [1.0, -3.0]])
    psi0 = np.vstack([M, np.eye(2)])
    return ContinuumProblem.sturm_liouville(p, q, v, psi0, None, L=2,
                                            name="two_channel_example")


BUILTINS = {
    "free_scalar": free_scalar,
    "paper_example_sec7": two_channel_example,
    "two_channel_example": two_channel_example,
}
