"""Eigenphase tracking along sampled unitary paths and spectral flow.

A path is a list of unitaries at ascending parameters.  Consecutive
eigenphase multisets are matched by an assignment that minimizes the
total circular distance; each track is then unwrapped by accumulating
wrapped increments.  The spectral flow through ``e^{i theta}`` counts
lifted copies of ``theta`` crossed by the tracks, with a closed right
and open left endpoint.
"""
import csv
import io
import itertools
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, linear_sum_assignment

from .errors import RefinementExhausted, StepTooCoarse
from .numkernel import unitary_phases, wrap_phase
from .symplectic import TOL_PHASE

MAX_STEP = 0.5

log = logging.getLogger(__name__)
EXHAUSTIVE_MAX_L = 4
HUNGARIAN_MAX_L = 8


@dataclass(frozen=True)
class PhasePath:
    """Sampled unitary path with continuously tracked eigenphases.

    Attributes
    ----------
    params : (K,) ndarray
        Ascending parameter samples.
    tracks : (K, L) ndarray
        Unwrapped eigenphases; ``tracks[k] mod 2 pi`` is the eigenphase
        multiset of the k-th unitary.
    unitaries : (K, L, L) ndarray or None
        The sampled unitaries, if kept.
    """

    params: np.ndarray
    tracks: np.ndarray
    unitaries: np.ndarray | None = None

    @property
    def size(self):
        return self.tracks.shape[1]

    def to_csv(self, prefix="track"):
        return path_to_csv(self, prefix)


@dataclass(frozen=True)
class Crossing:
    param: float
    track: int
    direction: int


@dataclass(frozen=True)
class FlowReport:
    net_flow: int
    crossings: list = field(default_factory=list)
    endpoint_hits: tuple = (0, 0)
    near_misses: list = field(default_factory=list)

    def as_dict(self):
        return {
            "net_flow": self.net_flow,
            "crossings": [
                {"param": c.param, "track": c.track, "direction": c.direction}
                for c in self.crossings
            ],
            "endpoint_hits": list(self.endpoint_hits),
            "near_misses": list(self.near_misses),
        }


def _circ(a, b):
    return np.abs(wrap_phase(a - b))


def _perm_table(L):
    return np.array(list(itertools.permutations(range(L))), dtype=int)


def match_phases(prev, nxt):
    """Assignment of the phases ``nxt`` to the slots of ``prev``.

    Works on stacks: ``prev`` and ``nxt`` have shape ``(K, L)``.  Returns
    an index array ``idx`` of the same shape such that ``nxt[k, idx[k, j]]``
    continues ``prev[k, j]``.
    """
    prev = np.atleast_2d(prev)
    nxt = np.atleast_2d(nxt)
    K, L = prev.shape
    if L == 1:
        return np.zeros((K, 1), dtype=int)
    cost = _circ(prev[:, :, None], nxt[:, None, :])
    if L <= EXHAUSTIVE_MAX_L:
        perms = _perm_table(L)
        totals = cost[:, np.arange(L)[None, :], perms].sum(axis=-1)
        return perms[np.argmin(totals, axis=1)]
    idx = np.empty((K, L), dtype=int)
    if L <= HUNGARIAN_MAX_L:
        for k in range(K):
            _, cols = linear_sum_assignment(cost[k])
            idx[k] = cols
        return idx
    for k in range(K):
        c = cost[k].copy()
        for _ in range(L):
            i, j = np.unravel_index(np.argmin(c), c.shape)
            idx[k, i] = j
            c[i, :] = np.inf
            c[:, j] = np.inf
    return idx


def track_phase_arrays(params, phases, max_step=MAX_STEP, unitaries=None):
    """Track eigenphases given as a ``(K, L)`` array of raw phases."""
    params = np.asarray(params, dtype=float)
    phases = np.asarray(phases, dtype=float)
    if phases.ndim == 1:
        phases = phases[:, None]
    K, L = phases.shape
    if K < 2:
        raise ValueError("a path needs at least two samples")
    if np.any(np.diff(params) < 0):
        raise ValueError("parameters must be ascending")
    # the matching cost only sees circular distances, so all neighbour
    # pairs are matched at once and the permutations composed afterwards
    idx = match_phases(phases[:-1], phases[1:])
    perm = np.empty((K, L), dtype=int)
    perm[0] = np.arange(L)
    for k in range(1, K):
        perm[k] = idx[k - 1][perm[k - 1]]
    ordered = np.take_along_axis(phases, perm, axis=1)
    steps = wrap_phase(np.diff(ordered, axis=0))
    jumps = np.abs(steps).max(axis=1)
    bad = np.nonzero(jumps > max_step)[0]
    if bad.size:
        k = int(bad[0])
        raise StepTooCoarse(k, float(jumps[k]), max_step)
    tracks = np.vstack([ordered[:1], ordered[:1] + np.cumsum(steps, axis=0)])
    return PhasePath(params, tracks, unitaries)


def track_phases(unitaries, params, max_step=MAX_STEP, keep_unitaries=True):
    """Continuously tracked eigenphases of a sampled unitary path.

    Parameters
    ----------
    unitaries : (K, L, L) array_like
        Unitaries at the sampled parameters.
    params : (K,) array_like
        Ascending parameters.
    max_step : float
        Largest accepted phase change of a matched track between
        consecutive samples.

    Raises
    ------
    StepTooCoarse
        With the index k of the first interval that has to be refined.
    """
    U = np.asarray(unitaries, dtype=complex)
    return track_phase_arrays(params, unitary_phases(U), max_step, U if keep_unitaries else None)


def _lift_count(values, target, tol):
    """floor((t - target) / 2 pi) with values within tol of a lift snapped."""
    z = (values - target) / (2 * np.pi)
    r = np.round(z)
    z = np.where(np.abs(z - r) * 2 * np.pi <= tol, r, z)
    return np.floor(z).astype(int)


def spectral_flow(path, target=np.pi, tol_phase=TOL_PHASE):
    """Signed number of passages of tracked eigenphases through ``target``.

    The convention is closed on the right and open on the left: a track
    that ends on the target counts as having arrived, a track that starts
    on it does not count as leaving.

    Parameters
    ----------
    path : PhasePath
    target : float
        Angle of the marked point; ``pi`` for -1 and ``0`` for +1.
    tol_phase : float
        Distance below which a phase is considered to sit on the target.
    """
    tr = path.tracks
    lifted = _lift_count(tr, target, tol_phase)
    per_track = lifted[-1] - lifted[0]
    net = int(per_track.sum())
    crossings = []
    near = []
    dl = np.diff(lifted, axis=0)
    ks, js = np.nonzero(dl)
    for k, j in sorted(zip(ks.tolist(), js.tolist())):
        d = int(dl[k, j])
        a, b = tr[k, j], tr[k + 1, j]
        lvl = target + 2 * np.pi * (lifted[k + 1, j] if d > 0 else lifted[k, j])
        s = 0.0 if b == a else np.clip((lvl - a) / (b - a), 0.0, 1.0)
        x = path.params[k] + s * (path.params[k + 1] - path.params[k])
        for _ in range(abs(d)):
            crossings.append(Crossing(float(x), int(j), 1 if d > 0 else -1))
    dist = _circ(tr, target)
    close = (dist > tol_phase) & (dist < 10 * tol_phase)
    for k, j in zip(*np.nonzero(close)):
        near.append((float(path.params[k]), int(j)))
    hits = (int(np.sum(dist[0] <= tol_phase)), int(np.sum(dist[-1] <= tol_phase)))
    return FlowReport(net, crossings, hits, near)


def concatenate(first, second):
    """Join two paths sharing an endpoint; the second is relabeled and shifted."""
    if not np.isclose(first.params[-1], second.params[0]):
        raise ValueError("paths do not share an endpoint")
    a = first.tracks[-1]
    b = second.tracks[0]
    perm = match_phases(wrap_phase(a)[None], wrap_phase(b)[None])[0]
    tr2 = second.tracks[:, perm]
    tr2 = tr2 + (a - tr2[0])
    U = None
    if first.unitaries is not None and second.unitaries is not None:
        U = np.concatenate([first.unitaries, second.unitaries[1:]])
    return PhasePath(
        np.concatenate([first.params, second.params[1:]]),
        np.vstack([first.tracks, tr2[1:]]),
        U,
    )


def default_workers():
    """Thread cap from ``PRUEFER_THREADS`` (default 1)."""
    try:
        return max(1, int(os.environ.get("PRUEFER_THREADS", "1")))
    except ValueError:
        return 1


def _evaluate(generator, xs, vectorized, workers):
    xs = np.asarray(xs, dtype=float)
    if workers is None:
        workers = default_workers()
    if vectorized:
        return np.asarray(generator(xs))
    if workers and workers > 1 and len(xs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return np.array(list(pool.map(generator, xs)))
    return np.array([generator(x) for x in xs])


def refine_adaptively(
    generator,
    interval,
    max_step=MAX_STEP,
    max_depth=30,
    initial=9,
    vectorized=False,
    phases_only=False,
    workers=None,
    increment=None,
):
    """Sample a unitary-valued generator finely enough to track its phases.

    Intervals whose phase jump exceeds ``max_step`` are bisected until
    tracking succeeds.  All midpoints of a refinement round are evaluated
    in one batch.

    Parameters
    ----------
    generator : callable
        Parameter to unitary.  With ``vectorized`` it maps an array of
        parameters to a stack of unitaries; with ``phases_only`` it returns
        raw eigenphases ``(K, L)`` instead of unitaries.
    interval : (float, float)
    initial : int
        Number of initial uniform samples.  A few more than two avoids
        aliasing of full 2 pi turns.
    max_depth : int
        Maximal number of bisections of an initial interval.
    increment : callable, optional
        ``increment(xs)`` returns the exact change of the summed
        eigenphases over each sampling interval.  Intervals where the
        tracked change differs by more than pi are bisected; this catches
        full turns hidden between two samples.

    Raises
    ------
    RefinementExhausted
    """
    a, b = map(float, interval)
    if not a < b:
        raise ValueError("interval must satisfy a < b")
    xs = np.linspace(a, b, max(int(initial), 2))
    depth = np.zeros(len(xs) - 1, dtype=int)
    vals = _evaluate(generator, xs, vectorized, workers)
    for _ in range(10 * max_depth + 10):
        ph = vals if phases_only else unitary_phases(vals)
        ph = np.asarray(ph, dtype=float)
        if ph.ndim == 1:
            ph = ph[:, None]
        # jumps of the optimal matching between neighbours
        idx = match_phases(ph[:-1], ph[1:])
        moved = np.take_along_axis(ph[1:], idx, axis=1)
        steps = wrap_phase(moved - ph[:-1])
        flag = np.abs(steps).max(axis=1) > max_step
        if increment is not None:
            exact = np.asarray(increment(xs), dtype=float)
            flag |= np.abs(steps.sum(axis=1) - exact) > np.pi
        bad = np.nonzero(flag)[0]
        if bad.size == 0:
            try:
                if phases_only:
                    return track_phase_arrays(xs, ph, max_step)
                return track_phase_arrays(xs, ph, max_step, vals)
            except StepTooCoarse as exc:
                bad = np.array([exc.index])
        if np.any(depth[bad] >= max_depth):
            k = int(bad[np.argmax(depth[bad])])
            raise RefinementExhausted(
                f"phase jump persists near parameter {xs[k]:.6g} after {max_depth} bisections"
            )
        mids = 0.5 * (xs[bad] + xs[bad + 1])
        new = _evaluate(generator, mids, vectorized, workers)
        xs = np.insert(xs, bad + 1, mids)
        vals = np.insert(vals, bad + 1, new, axis=0)
        d = depth[bad] + 1
        depth[bad] = d
        depth = np.insert(depth, bad + 1, d)
    raise RefinementExhausted("refinement did not converge")


def flow_of_generator(generator, interval, target=np.pi, **kwargs):
    """Spectral flow of a generator over an interval, with its path."""
    path = refine_adaptively(generator, interval, **kwargs)
    return spectral_flow(path, target), path


def locate_crossings(generator, window, tol_E=1e-8, max_step=MAX_STEP, target=0.0,
                     increment=None):
    """Parameters in (a, b] where eigenphases of a vectorized phase generator pass target.

    One adaptive sweep brackets every passage; brackets are bisected with
    local counts and finished by Brent's method on the crossing track.
    Only upward passages are reported.  ``increment`` is forwarded to
    :func:`refine_adaptively`.

    Returns
    -------
    list of (float, int)
        Crossing parameter and multiplicity.
    """
    a, b = map(float, window)
    if not a < b:
        raise ValueError("window must satisfy a < b")

    def gen(xs):
        return wrap_phase(generator(xs) - target)

    path = refine_adaptively(gen, (a, b), max_step=max_step, vectorized=True,
                             phases_only=True, increment=increment)
    rep = spectral_flow(path, 0.0)
    if any(c.direction < 0 for c in rep.crossings):
        log.warning("downward crossings found; the sweep may be under-resolved")
    counts = _lift_count(path.tracks, 0.0, TOL_PHASE).sum(axis=1)
    found = []
    for k in np.nonzero(np.diff(counts))[0]:
        m = int(counts[k + 1] - counts[k])
        if m > 0:
            found.extend(_resolve_bracket(gen, path.params[k], path.params[k + 1],
                                          path.tracks[k], m, tol_E))
    return found


def _local_flow(gen, lo, hi, start_tracks):
    """Crossings of +1 between lo and hi for a step of at most max_step."""
    ph = gen(np.array([hi]))[0]
    perm = match_phases(wrap_phase(start_tracks)[None], ph[None])[0]
    end = start_tracks + wrap_phase(ph[perm] - start_tracks)
    c0 = _lift_count(start_tracks, 0.0, TOL_PHASE)
    c1 = _lift_count(end, 0.0, TOL_PHASE)
    return int((c1 - c0).sum()), end


def _track_root(gen, lo, hi, tracks_lo, j, level, tol_E):
    def f(e):
        if e <= lo:
            return tracks_lo[j] - level
        return _local_flow(gen, lo, e, tracks_lo)[1][j] - level

    flo, fhi = f(lo), f(hi)
    if fhi == 0 or flo * fhi > 0:
        return hi if abs(fhi) <= abs(flo) else lo
    return brentq(f, lo, hi, xtol=tol_E, rtol=4 * np.finfo(float).eps)


def _merge_roots(roots, tol_E):
    """Group roots closer than a few tolerances into (mean, multiplicity)."""
    roots = sorted(roots)
    groups = [[roots[0]]]
    for r in roots[1:]:
        if r - groups[-1][-1] <= 4 * tol_E + 1e-12 * max(1.0, abs(r)):
            groups[-1].append(r)
        else:
            groups.append([r])
    return [(float(np.mean(g)), len(g)) for g in groups]


def _resolve_bracket(gen, lo, hi, tracks_lo, m, tol_E):
    _, end = _local_flow(gen, lo, hi, tracks_lo)
    c0 = _lift_count(tracks_lo, 0.0, TOL_PHASE)
    c1 = _lift_count(end, 0.0, TOL_PHASE)
    dc = c1 - c0
    if dc.min() >= 0 and dc.max() <= 1:
        # every crossing track passes a single level: root-find each one
        roots = [_track_root(gen, lo, hi, tracks_lo, j, 2 * np.pi * c1[j], tol_E)
                 for j in np.nonzero(dc)[0]]
        return _merge_roots(roots, tol_E)
    if hi - lo <= tol_E:
        return [(0.5 * (lo + hi), m)]
    mid = 0.5 * (lo + hi)
    left, tracks_mid = _local_flow(gen, lo, mid, tracks_lo)
    out = []
    if left > 0:
        out += _resolve_bracket(gen, lo, mid, tracks_lo, left, tol_E)
    if m - left > 0:
        out += _resolve_bracket(gen, mid, hi, tracks_mid, m - left, tol_E)
    return out


def path_to_csv(path, prefix="track"):
    """CSV text with columns ``param, <prefix>_0, ...`` in radians."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["param"] + [f"{prefix}_{j}" for j in range(path.size)])
    for x, row in zip(path.params, path.tracks):
        w.writerow([repr(float(x))] + [repr(float(t)) for t in row])
    return buf.getvalue()
