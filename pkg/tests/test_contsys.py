import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pruefer import contsys, oracle
from pruefer.contsys import ContinuumProblem
from pruefer.errors import NotDirichletRight, NotPositive
from pruefer.numkernel import expm
from pruefer.symplectic import _J, dirichlet_frame, neumann_frame, stereo

PI2 = np.pi ** 2


@pytest.fixture(scope="module")
def free():
    return contsys.free_scalar()


@pytest.fixture(scope="module")
def two_channel():
    return contsys.two_channel_example()


def smooth_problem(seed, psi0=None):
    """Random smooth two-channel Sturm-Liouville problem."""
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(3, 2, 2))
    f = rng.uniform(1, 6, size=3)

    def herm(m):
        return (m + m.T) / 2

    def p(x):
        return np.array([np.eye(2) * 2 + 0.5 * np.sin(f[0] * t) * herm(a[0]) for t in x])

    def q(x):
        return np.array([np.cos(f[1] * t) * a[1] for t in x], dtype=complex)

    def v(x):
        return np.array([3 * np.sin(f[2] * t) * herm(a[2]) for t in x])

    return ContinuumProblem.sturm_liouville(p, q, v, psi0=psi0, L=2, name="smooth")


def test_hamiltonian_free_examples(free):
    assert np.allclose(contsys.build_hamiltonian(free, 0.0)(0.3), [[0, 0], [0, -1]])
    assert np.allclose(contsys.build_hamiltonian(free, 5.0)(0.3), [[-5, 0], [0, -1]])


def test_hamiltonian_two_channel_at_origin(two_channel):
    p = np.diag([3.0, 3.0])
    q = np.array([[3.0, 1.0], [0.0, 0.0]])
    v = np.diag([1.0, -2.0])
    assert np.allclose(two_channel.p(np.zeros(1))[0], p)
    assert np.allclose(two_channel.q(np.zeros(1))[0], q)
    assert np.allclose(two_channel.v(np.zeros(1))[0], v)
    pi = np.linalg.inv(p)
    expected = np.block([[v - q.T @ pi @ q - 0.7 * np.eye(2), q.T @ pi], [pi @ q, -pi]])
    H = contsys.build_hamiltonian(two_channel, 0.7)(0.0)
    assert np.allclose(H, expected)
    assert np.allclose(H, H.conj().T)


def test_fundamental_trivial_system():
    zero = np.zeros((2, 2))
    prob = ContinuumProblem.general(zero, zero, neumann_frame(1), dirichlet_frame(1), L=1)
    path = contsys.integrate_fundamental(prob, 3.0, 64)
    assert np.allclose(path.transfer, np.eye(2))


@pytest.mark.parametrize("E", [-1.0, -30.0, 4.0])
def test_fundamental_constant_coefficients(free, E):
    path = contsys.integrate_fundamental(free, E)
    exact = expm(np.array([[0, 1], [-E, 0]]))
    assert np.allclose(path.transfer[-1], exact, atol=1e-8 * np.linalg.norm(exact))
    assert path.residuals.max() <= 1e-8


def test_fundamental_dirichlet_eigenfunction(free):
    T = contsys.integrate_fundamental(free, PI2).transfer[-1]
    assert abs(T[0, 1]) <= 1e-8


def test_fundamental_rejects_few_steps(free):
    with pytest.raises(ValueError):
        contsys.integrate_fundamental(free, 0.0, 8)


def test_pruefer_path_start_and_eigenvalue(free, two_channel):
    path = contsys.pruefer_path(two_channel, 1.3)
    assert np.allclose(path.unitaries[0], stereo(two_channel.psi0))
    U1 = contsys.pruefer_path(free, PI2).unitaries[-1]
    assert np.allclose(U1, [[-1]], atol=1e-6)


@pytest.mark.parametrize("E,count", [(5.0, 0), (50.0, 2), (PI2 + 1e-6, 1)])
def test_counts_free(free, E, count):
    assert contsys.count_by_energy(free, E) == count
    assert contsys.count_by_space(free, E) == count


def test_count_includes_eigenvalue_at_endpoint(free):
    assert contsys.count_by_energy(free, 4 * PI2) == 2


def test_space_count_needs_dirichlet_right(free):
    prob = ContinuumProblem.sturm_liouville(1.0, 0.0, 0.0, psi1=neumann_frame(1), L=1)
    with pytest.raises(NotDirichletRight):
        contsys.count_by_space(prob, 10.0)
    # Neumann at the right: eigenvalues (n - 1/2)^2 pi^2
    assert contsys.count_by_energy(prob, 10.0) == 1
    assert contsys.count_by_energy(prob, 25.0) == 2


def test_space_count_refused_without_positivity():
    V = np.diag([0.0, 0.0]).astype(complex)
    P = np.diag([1.0, 1.0]).astype(complex)
    prob = ContinuumProblem.general(V, P, dirichlet_frame(1), dirichlet_frame(1), L=1)
    with pytest.raises(NotPositive):
        contsys.count_by_space(prob, 1.0)


def test_general_system_matches_sturm_liouville(two_channel):
    gen = ContinuumProblem.general(
        lambda x: two_channel.parts(x)[0], lambda x: two_channel.parts(x)[1],
        two_channel.psi0, two_channel.psi1, L=2,
    )
    for E in (-4.0, 0.0, 2.0):
        assert contsys.count_by_energy(gen, E) == contsys.count_by_energy(two_channel, E)
        assert contsys.count_by_space(gen, E) == contsys.count_by_space(two_channel, E)


def test_locate_free(free):
    found = contsys.locate_eigenvalues(free, (5, 50), tol_E=1e-8)
    assert [m for _, m in found] == [1, 1]
    got = np.array([e for e, _ in found])
    assert np.allclose(got, [PI2, 4 * PI2], rtol=1e-6)
    assert contsys.locate_eigenvalues(free, (5, 6)) == []


def test_locate_rejects_bad_window(free):
    with pytest.raises(ValueError):
        contsys.locate_eigenvalues(free, (3, 3))


def test_energy_monotonicity(free, two_channel):
    assert contsys.check_energy_monotonicity(free, 1.0) >= 0
    assert contsys.check_energy_monotonicity(two_channel, 0.0) >= -1e-4
    assert contsys.check_energy_monotonicity(free, 1.0, x=0.0) == 0.0


def test_energy_derivative_positive_matrix(two_channel):
    d = 1e-5
    T0, Tp, Tm = (contsys.integrate_fundamental(two_channel, e, 2048).transfer[-1]
                  for e in (0.3, 0.3 + d, 0.3 - d))
    M = T0.conj().T @ _J(2) @ (Tp - Tm) / (2 * d)
    assert np.abs(M - M.conj().T).max() <= 1e-4
    assert np.linalg.eigvalsh((M + M.conj().T) / 2)[0] >= -1e-4


def test_space_crossings_positive(free):
    rep, _ = contsys.space_flow(free, 50.0)
    assert contsys.check_space_positivity_at_minus_one(rep.crossings) == [1, 1]
    rep, _ = contsys.space_flow(free, -3.0)
    assert contsys.check_space_positivity_at_minus_one(rep.crossings) == []


def test_low_energy_asymptotics(free):
    d = contsys.check_low_energy_asymptotics(free, [-1e2, -1e4])
    assert d[1] < d[0] < 0.5
    with pytest.raises(ValueError):
        contsys.check_low_energy_asymptotics(free, [-1.0], x=0.0)


def test_energy_floor_below_spectrum(two_channel, free):
    for prob in (free, two_channel):
        E0 = contsys.find_energy_floor(prob)
        assert contsys.count_by_space(prob, E0) == 0


def test_from_tables_reproduces_closed_form(free):
    x = np.linspace(0, 1, 5)
    one = np.ones((5, 1, 1))
    tab = ContinuumProblem.from_tables(x, one, 0 * one, 0 * one)
    assert contsys.count_by_energy(tab, 50.0) == 2
    with pytest.raises(ValueError):
        ContinuumProblem.from_tables([0, 0.5], one[:2], one[:2], one[:2])


def test_rejects_indefinite_p():
    with pytest.raises(NotPositive):
        ContinuumProblem.sturm_liouville(-1.0, 0.0, 0.0, L=1)


@settings(max_examples=6)
@given(st.integers(0, 10_000), st.floats(-20.0, 120.0))
def test_energy_space_and_fem_agree(seed, E):
    prob = smooth_problem(seed)
    ref = oracle.fd_sl_spectrum(prob, 1500)
    if np.min(np.abs(ref.eigenvalues - E)) < 0.05 * max(1, abs(E)) ** 0.5:
        return
    n = oracle.count_below(ref, E)
    assert contsys.count_by_energy(prob, E) == n
    assert contsys.count_by_space(prob, E) == n


def test_energy_count_sees_fast_turns(two_channel):
    # the sweep from the floor to 45 once hid a full turn near -3.3
    ref = oracle.fd_sl_spectrum(two_channel, 2000)
    for E in (40.0, 45.0, 47.0):
        assert contsys.count_by_energy(two_channel, E) == oracle.count_below(ref, E)


def test_lifted_phase_sum_matches_end_phases(two_channel):
    es = np.array([-4.0, 3.0, 30.0])
    lift = contsys.lifted_phase_sum(two_channel, es)
    dets = np.linalg.det(contsys.end_unitaries(two_channel, es))
    assert np.allclose(np.exp(1j * np.diff(lift)), dets[1:] / dets[:-1], atol=1e-6)
    assert np.all(np.diff(lift) > 0)
