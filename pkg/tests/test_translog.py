import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pruefer import jacobi, oracle, translog
from pruefer.errors import AboveCritical, BelowCritical, BranchViolation, Uncovered
from pruefer.jacobi import BlockJacobiOperator, transfer_matrix
from pruefer.numkernel import expm
from pruefer.symplectic import _J

from .helpers import fibers, random_hermitian, random_unitary, seeds

Z1, I1 = np.zeros((1, 1)), np.eye(1)
ELLIPTIC_ZERO = np.array([[-np.pi / 2, 1j * np.pi], [-1j * np.pi, -np.pi / 2]])


def exp_error(V, T, E, H):
    Tm = transfer_matrix(V, T, E)
    L = Tm.shape[0] // 2
    return np.linalg.norm(expm(_J(L) @ H) - Tm, 2) / np.linalg.norm(Tm, 2)


def lower_right(H):
    L = H.shape[0] // 2
    return np.linalg.eigvalsh(H[L:, L:])


def test_classify_examples():
    c = translog.classify(Z1, I1, 0.0)
    assert c.kinds == ("elliptic",) and np.isclose(c.theta[0], -np.pi / 2)
    c = translog.classify(Z1, I1, -3.0)
    assert c.kinds == ("hyperbolic-",)
    assert np.isclose(c.kappa[0], np.log((3 + np.sqrt(5)) / 2))
    assert translog.classify(Z1, I1, -2.0).kinds == ("parabolic-",)
    assert translog.classify(Z1, I1, 2.0 + 1e-10).kinds == ("parabolic+",)
    c = translog.classify(Z1, I1, 0.0, branch="positive")
    assert np.isclose(c.theta[0], np.pi / 2)


@given(seeds, fibers, st.floats(-6, 6))
def test_classification_invariants(seed, L, E):
    rng = np.random.default_rng(seed)
    V = random_hermitian(rng, L)
    B = rng.normal(size=(L, L))
    T = B @ B.T + 0.5 * np.eye(L)
    c = translog.classify(V, T, E)
    assert sum(c.sizes) == L
    assert np.all(np.diff(c.D) >= 0)
    for d, kind, th in zip(c.D, c.kinds, c.theta):
        if kind == "elliptic":
            assert -np.pi < th < 0
            assert np.isclose(-np.exp(1j * th), d / 2 + 1j * np.sqrt(1 - d * d / 4))


def test_spectrum_check_examples():
    s = translog.spectrum_check(Z1, I1, 0.0)
    assert np.allclose(sorted(s["eigenvalues"], key=np.imag), [-1j, 1j])
    assert s["on_circle"].all()
    for E, sign in ((-3.0, -1), (3.0, 1)):
        lam = translog.spectrum_check(Z1, I1, E)["eigenvalues"]
        assert np.allclose(lam.imag, 0) and np.all(np.sign(lam.real) == sign)
        assert np.isclose(np.prod(lam), 1)


@given(seeds, fibers, st.floats(-8, 8))
def test_transfer_spectrum_structure(seed, L, E):
    rng = np.random.default_rng(seed)
    V = random_hermitian(rng, L)
    B = rng.normal(size=(L, L))
    s = translog.spectrum_check(V, B @ B.T + 0.5 * np.eye(L), E)
    assert s["structured"]
    assert s["symmetry_residual"] <= 1e-8


def test_critical_energies_examples():
    c = translog.critical_energies(BlockJacobiOperator.free_chain(5))
    assert (c.E_c, c.E_c_prime) == (2.0, -2.0)
    assert not c.ordered
    V = [np.diag([1.0, -1.0])] * 4
    c = translog.critical_energies(BlockJacobiOperator(V, [np.eye(2)] * 3))
    assert np.isclose(c.E_c, 1.0) and np.isclose(c.E_c_prime, -1.0)
    c = translog.critical_energies(BlockJacobiOperator([10.0, -10.0, 10.0], [1.0, 1.0]))
    assert c.ordered


@settings(max_examples=20)
@given(seeds, fibers)
def test_critical_energy_scan(seed, L):
    H = BlockJacobiOperator.random(L, 5, np.random.default_rng(seed))
    assert translog.verify_critical_energies(H) == (True, True)


def test_log_examples():
    lg = translog.log_transfer(Z1, I1, 0.0)
    assert np.allclose(lg.H, ELLIPTIC_ZERO)
    assert np.allclose(expm(_J(1) @ lg.H), [[0, -1], [1, 0]])
    assert lower_right(lg.H)[0] < 0
    lg = translog.log_transfer(Z1, I1, -3.0)
    assert exp_error(Z1, I1, -3.0, lg.H) <= 1e-10


def test_parabolic_identities():
    neg = translog.block_log(-2.0)
    assert np.allclose(_J(1) @ neg, [[1 + 1j * np.pi, 1], [-1, -1 + 1j * np.pi]], atol=1e-15)
    assert np.allclose(expm(_J(1) @ neg), [[-2, -1], [1, 0]], atol=1e-12)
    pos = translog.block_log(2.0, branch="positive")
    assert np.allclose(_J(1) @ pos, [[1, -1], [1, -1]], atol=1e-15)
    assert np.allclose(expm(_J(1) @ pos), [[2, -1], [1, 0]], atol=1e-12)


def test_branch_violations():
    with pytest.raises(BranchViolation) as info:
        translog.log_transfer(Z1, I1, 3.0)
    assert np.isclose(info.value.eigenvalue, 3.0)
    with pytest.raises(BranchViolation):
        translog.log_transfer(Z1, I1, -3.0, branch="positive")


REGIMES = {
    "elliptic": (-1.9, 1.9),
    "hyperbolic-": (-30.0, -2.1),
    "hyperbolic+": (2.1, 30.0),
}


@pytest.mark.parametrize("branch", ["negative", "positive"])
@given(seed=seeds, L=fibers)
def test_exp_log_identity(branch, seed, L):
    rng = np.random.default_rng(seed)
    T = random_unitary(rng, L) @ np.diag(rng.uniform(0.4, 2.0, L))
    T = T @ T.conj().T
    bad = "hyperbolic+" if branch == "negative" else "hyperbolic-"
    pools = [k for k in REGIMES if k != bad]
    d = np.array([rng.uniform(*REGIMES[pools[rng.integers(len(pools))]]) for _ in range(L)])
    M = random_unitary(rng, L)
    E = rng.normal()
    # V chosen so the normalized matrix has the drawn diagonal entries
    w, U = np.linalg.eigh(T)
    Th = (U * np.sqrt(w)) @ U.conj().T
    V = E * np.eye(L) - Th @ M @ np.diag(d) @ M.conj().T @ Th
    V = (V + V.conj().T) / 2
    lg = translog.log_transfer(V, T, E, branch)
    assert np.allclose(lg.H, lg.H.conj().T)
    assert exp_error(V, T, E, lg.H) <= 1e-8
    lr = lower_right(lg.H)
    if branch == "negative":
        assert lr[-1] < -1e-12
    else:
        assert lr[0] > 1e-12


@pytest.mark.parametrize("d,branch", [(-2 + 1e-6, "negative"), (-2 - 1e-6, "negative"),
                                      (2 - 1e-6, "positive"), (2 + 1e-6, "positive")])
def test_near_parabolic(d, branch):
    h = translog.block_log(d, branch)
    assert np.linalg.norm(expm(_J(1) @ h) - [[d, -1], [1, 0]], 2) <= 1e-8 * np.linalg.norm([[d, -1], [1, 0]], 2)
    limit = translog.block_log(-2.0 if branch == "negative" else 2.0, branch)
    assert np.linalg.norm(h - limit) <= 1e-2


def test_continuity_away_from_collisions():
    delta = 1e-6
    rng = np.random.default_rng(1)
    V = random_hermitian(rng, 2)
    T = np.eye(2) + 0.2 * random_hermitian(rng, 2)
    for E in (-4.0, -1.0, 0.5):
        if translog.classify(V, T, E).sizes[3:] != (0, 0):
            continue
        a = translog.log_transfer(V, T, E).H
        b = translog.log_transfer(V, T, E + delta).H
        assert np.linalg.norm(b - a) <= 1e3 * delta


def test_degenerate_entries_are_basis_free():
    rng = np.random.default_rng(2)
    W = random_unitary(rng, 3)
    V = W @ np.diag([0.5, 0.5, -1.0]) @ W.conj().T
    H = translog.log_transfer(V, np.eye(3), 0.0).H
    # conjugating back by W must give decoupled scalar logarithms
    X = np.kron(np.eye(2), W.conj().T)
    Hd = X @ H @ X.conj().T
    for k, v in enumerate((0.5, 0.5, -1.0)):
        h = translog.log_transfer(np.array([[v]]), I1, 0.0).H
        assert np.allclose(Hd[np.ix_([k, 3 + k], [k, 3 + k])], h)
    off = Hd.copy()
    for k in range(3):
        off[np.ix_([k, 3 + k], [k, 3 + k])] = 0
    assert np.allclose(off, 0)


def test_interpolating_hamiltonian_examples():
    Hs = translog.interpolating_hamiltonian(BlockJacobiOperator.free_chain(4), 0.0)
    assert Hs.shape == (5, 2, 2)
    assert np.allclose(Hs, ELLIPTIC_ZERO)
    Hs = translog.interpolating_hamiltonian(BlockJacobiOperator.free_chain(4), -2.0)
    assert np.allclose(Hs[1:], translog.block_log(-2.0))
    with pytest.raises(AboveCritical):
        translog.interpolating_hamiltonian(BlockJacobiOperator.free_chain(4), 2.5)


@pytest.mark.parametrize("E,count", [(0.0, 3), (-2.5, 0), (1.5, 4), (1.99, 5)])
def test_space_count_free_chain(E, count):
    rep = translog.space_flow_translog(BlockJacobiOperator.free_chain(5), E)
    assert rep.count == count
    assert rep.endpoint_error <= 1e-8
    assert all(c.direction == 1 for c in rep.flow.crossings)


@settings(max_examples=15)
@given(seeds, fibers)
def test_space_count_random_below_critical(seed, L):
    rng = np.random.default_rng(seed)
    H = BlockJacobiOperator.random(L, int(rng.integers(3, 9)), rng)
    ref = oracle.dense_jacobi_spectrum(H)
    Ec = translog.critical_energies(H).E_c
    for E in rng.uniform(ref.eigenvalues[0] - 2, Ec, 4):
        if Ec - E < 1e-6 or np.min(np.abs(ref.eigenvalues - E)) < 1e-6:
            continue
        rep = translog.space_flow_translog(H, E)
        assert rep.count == oracle.count_below(ref, E)
        assert rep.endpoint_error <= 1e-8


@pytest.mark.parametrize("E", [-1.5, 0.5, 1.2, 2.5])
def test_positive_branch_free_chain(E):
    H = BlockJacobiOperator.free_chain(5)
    assert translog.count_by_space_translog_positive(H, E) == jacobi.count_by_energy_jacobi(H, E)


@settings(max_examples=10)
@given(seeds, fibers)
def test_positive_branch_random(seed, L):
    rng = np.random.default_rng(seed)
    H = BlockJacobiOperator.random(L, 5, rng)
    ref = oracle.dense_jacobi_spectrum(H)
    Ecp = translog.critical_energies(H).E_c_prime
    for E in rng.uniform(Ecp, ref.eigenvalues[-1] + 2, 3):
        if E - Ecp < 1e-6 or np.min(np.abs(ref.eigenvalues - E)) < 1e-6:
            continue
        assert translog.count_by_space_translog_positive(H, E) == oracle.count_below(ref, E)


def test_positive_branch_refuses_low_energy():
    with pytest.raises(BelowCritical):
        translog.count_by_space_translog_positive(BlockJacobiOperator.free_chain(4), -2.5)


def test_uncovered_gap():
    H = BlockJacobiOperator([10.0, -10.0, 10.0], [1.0, 1.0])
    with pytest.raises(Uncovered):
        translog.count_translog(H, 0.0)
    ref = oracle.dense_jacobi_spectrum(H)
    assert translog.count_translog(H, -9.0) == oracle.count_below(ref, -9.0)
    assert translog.count_translog(H, 9.0) == oracle.count_below(ref, 9.0)


def test_classification_records_are_json():
    recs = json.loads(translog.classification_records(BlockJacobiOperator.free_chain(3), -2.5))
    assert [r["site"] for r in recs] == [1, 2, 3]
    assert recs[0]["kinds"] == ["hyperbolic-"]
