import json

import numpy as np
import pytest

from pruefer import contsys, problems
from pruefer.contsys import ContinuumProblem
from pruefer.jacobi import BlockJacobiOperator
from pruefer.problems import ProblemError


def test_complex_array_pairs_and_plain():
    assert np.allclose(problems.complex_array([[1, 2], [3, 4]], 1), [1 + 2j, 3 + 4j])
    assert np.allclose(problems.complex_array([[1, 2], [3, 4]], 2), [[1, 2], [3, 4]])
    with pytest.raises(ProblemError):
        problems.complex_array(["a"], 1)
    with pytest.raises(ProblemError):
        problems.complex_array([1.0, 2.0], 3)


def test_operator_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    H = BlockJacobiOperator.random(2, 4, rng)
    path = tmp_path / "op.json"
    path.write_text(json.dumps(problems.operator_to_dict(H)))
    K = problems.load_problem(str(path))
    assert np.allclose(K.dense(), H.dense())


def test_scalar_operator_plain_lists(tmp_path):
    path = tmp_path / "op.json"
    path.write_text(json.dumps({"kind": "jacobi", "L": 1, "N": 3, "V": [0, 1, 2], "T": [1, 1]}))
    H = problems.load_problem(str(path))
    assert (H.N, H.L) == (3, 1)
    assert np.allclose(np.diag(H.dense()), [0, 1, 2])


def test_continuum_tables(tmp_path):
    x = np.linspace(0, 1, 9).tolist()
    d = {"kind": "sturm_liouville", "L": 1,
         "coefficients": {"x": x, "p": [1.0] * 9, "v": [0.0] * 9}}
    path = tmp_path / "sl.json"
    path.write_text(json.dumps(d))
    prob = problems.load_problem(str(path))
    assert isinstance(prob, ContinuumProblem)
    assert contsys.count_by_energy(prob, 50.0) == 2


def test_general_needs_frames():
    x = [0.0, 1.0]
    z = np.zeros((2, 2, 2)).tolist()
    with pytest.raises(ProblemError):
        problems.continuum_from_dict({"kind": "general", "L": 1, "x": x, "V": z, "P": z})


def test_builtins_and_errors(tmp_path):
    assert problems.load_problem("two_channel_example").L == 2
    assert problems.load_problem("free_chain(4, 2)").N == 4
    assert problems.continuum_from_dict({"kind": "builtin", "name": "free_scalar"}).L == 1
    with pytest.raises(ProblemError):
        problems.load_problem("nowhere.json")
    with pytest.raises(ProblemError):
        problems.load_problem("free_chain(x)")
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    with pytest.raises(ProblemError):
        problems.load_problem(str(bad))
    bad.write_text(json.dumps({"kind": "sturm_liouville", "L": 1}))
    with pytest.raises(ProblemError):
        problems.load_problem(str(bad))
    bad.write_text(json.dumps({"kind": "mystery", "L": 1, "x": [0, 1]}))
    with pytest.raises(ProblemError):
        problems.load_problem(str(bad))
