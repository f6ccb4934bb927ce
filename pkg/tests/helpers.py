"""Random generators shared by the test modules."""
import numpy as np
from hypothesis import strategies as st

seeds = st.integers(min_value=0, max_value=2**32 - 1)
fibers = st.integers(min_value=1, max_value=3)


def random_hermitian(rng, L, scale=1.0):
    A = rng.normal(size=(L, L)) + 1j * rng.normal(size=(L, L))
    return scale * (A + A.conj().T) / 2


def random_unitary(rng, L):
    Q, R = np.linalg.qr(rng.normal(size=(L, L)) + 1j * rng.normal(size=(L, L)))
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def random_lagrangian(rng, L):
    """Frame (1; B) with B Hermitian."""
    B = random_hermitian(rng, L)
    return np.vstack([np.eye(L), B]).astype(complex)
