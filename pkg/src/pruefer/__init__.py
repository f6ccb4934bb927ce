"""Oscillation theory for matrix Hamiltonian systems and block Jacobi operators.

Eigenvalues are counted through the winding of unitary Pruefer phases,
either along the energy axis at the right boundary or along the space
axis at fixed energy.
"""
from . import contsys, jacobi, numkernel, oracle, specflow, symplectic, translog
from .contsys import (
    ContinuumProblem,
    count_by_energy,
    count_by_space,
    free_scalar,
    locate_eigenvalues,
    two_channel_example,
)
from .errors import PrueferError
from .jacobi import (
    BlockJacobiOperator,
    count_by_energy_jacobi,
    interpolation_flow,
    morse_count,
)
from .problems import load_problem
from .translog import count_by_space_translog, critical_energies, log_transfer

__version__ = "0.1.0"

__all__ = [
    "BlockJacobiOperator",
    "ContinuumProblem",
    "PrueferError",
    "contsys",
    "count_by_energy",
    "count_by_energy_jacobi",
    "count_by_space",
    "count_by_space_translog",
    "critical_energies",
    "free_scalar",
    "interpolation_flow",
    "jacobi",
    "load_problem",
    "locate_eigenvalues",
    "log_transfer",
    "morse_count",
    "numkernel",
    "oracle",
    "specflow",
    "symplectic",
    "translog",
    "two_channel_example",
]
