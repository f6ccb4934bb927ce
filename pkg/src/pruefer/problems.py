"""Loading problems from builtin names or JSON files.

Complex entries may be written as plain numbers or as ``[re, im]`` pairs;
pairs are recognized by one extra trailing axis of length 2.

Continuum file::

    {"kind": "sturm_liouville", "L": 2,
     "psi0": [[...]], "psi1": [[...]],
     "coefficients": {"x": [...], "p": [...], "q": [...], "v": [...]}}

``kind`` may also be ``"general"`` with tables ``V`` and ``P`` of size
2L, or ``"builtin"`` with a ``"name"``.  Operator file::

    {"kind": "jacobi", "L": 1, "N": 3, "V": [...], "T": [...]}

with N diagonal blocks and N - 1 couplings.
"""
import json
from pathlib import Path

import numpy as np

from . import contsys
from .contsys import ContinuumProblem, _interp_table
from .jacobi import BlockJacobiOperator, parse_builtin


class ProblemError(ValueError):
    """Malformed problem description."""


def complex_array(data, rank):
    """Array of the given rank from numbers or ``[re, im]`` pairs."""
    a = np.asarray(data)
    if a.dtype.kind in "OUS":
        raise ProblemError("entries must be numbers or [re, im] pairs")
    if a.ndim == rank + 1 and a.shape[-1] == 2:
        return a[..., 0] + 1j * a[..., 1]
    if a.ndim != rank:
        raise ProblemError(f"expected an array of rank {rank}, got shape {a.shape}")
    return a.astype(complex)


def encode_complex(a):
    """Nested ``[re, im]`` lists for JSON output."""
    a = np.asarray(a, dtype=complex)
    return np.stack([a.real, a.imag], axis=-1).tolist()


def _coeff(spec, key, L, K):
    if key not in spec:
        return np.zeros((K, L, L), dtype=complex)
    a = np.asarray(spec[key])
    # scalar tables for L = 1 may be plain lists
    rank = 3 if L > 1 or (a.ndim >= 3) else 1
    arr = complex_array(spec[key], rank)
    if arr.ndim == 1:
        arr = arr[:, None, None]
    if arr.shape != (K, L, L):
        raise ProblemError(f"table {key!r} has shape {arr.shape}, expected {(K, L, L)}")
    return arr


def _frame(spec, key, L):
    if key not in spec or spec[key] is None:
        return None
    F = complex_array(spec[key], 2)
    if F.shape != (2 * L, L):
        raise ProblemError(f"frame {key!r} has shape {F.shape}, expected {(2 * L, L)}")
    return F


def continuum_from_dict(d):
    kind = d.get("kind", "sturm_liouville")
    if kind == "builtin":
        return builtin_continuum(d["name"])
    L = int(d["L"])
    tab = d.get("coefficients", d)
    x = np.asarray(tab["x"], dtype=float)
    K = len(x)
    psi0, psi1 = _frame(d, "psi0", L), _frame(d, "psi1", L)
    name = d.get("name", "file")
    if kind == "sturm_liouville":
        p, q, v = (_coeff(tab, k, L, K) for k in ("p", "q", "v"))
        if "p" not in tab:
            raise ProblemError("table 'p' is required")
        return ContinuumProblem.from_tables(x, p, q, v, psi0, psi1, name=name)
    if kind == "general":
        V, P = (_coeff(tab, k, 2 * L, K) for k in ("V", "P"))
        if psi0 is None or psi1 is None:
            raise ProblemError("general systems need both boundary frames")
        return ContinuumProblem.general(_interp_table(x, V), _interp_table(x, P),
                                        psi0, psi1, L=L, name=name)
    raise ProblemError(f"unknown problem kind {kind!r}")


def operator_from_dict(d):
    L, N = int(d["L"]), int(d["N"])
    V = complex_array(d["V"], 3 if L > 1 or np.ndim(d["V"]) >= 3 else 1)
    V = V.reshape(N, L, L)
    T = np.asarray(d.get("T", []))
    T = complex_array(T, 3 if L > 1 or T.ndim >= 3 else 1) if T.size else np.zeros((0, L, L))
    return BlockJacobiOperator(V, T.reshape(N - 1, L, L))


def operator_to_dict(H):
    return {"kind": "jacobi", "L": H.L, "N": H.N,
            "V": encode_complex(H.V), "T": encode_complex(H.T)}


def builtin_continuum(name):
    try:
        return contsys.BUILTINS[name]()
    except KeyError:
        raise ProblemError(f"unknown builtin {name!r}") from None


def load_problem(source):
    """ContinuumProblem or BlockJacobiOperator from a name or a JSON path."""
    if source in contsys.BUILTINS:
        return contsys.BUILTINS[source]()
    if source.startswith("free_chain("):
        try:
            return parse_builtin(source)
        except (KeyError, ValueError, TypeError) as exc:
            raise ProblemError(f"cannot parse {source!r}") from exc
    path = Path(source)
    if not path.is_file():
        raise ProblemError(f"{source!r} is neither a builtin nor a file")
    try:
        d = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ProblemError(f"{source}: {exc}") from exc
    try:
        if d.get("kind") == "jacobi":
            return operator_from_dict(d)
        return continuum_from_dict(d)
    except KeyError as exc:
        raise ProblemError(f"{source}: missing field {exc}") from exc
