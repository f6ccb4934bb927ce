import json
import subprocess
import sys

import pytest

from pruefer import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_count_free_chain(capsys):
    code, out, _ = run(capsys, "count", "--problem", "free_chain(5)", "--energy", "0.5")
    assert code == 0
    assert json.loads(out)["count"] == 3


@pytest.mark.parametrize("method", ["energy", "space", "translog", "interpolation", "morse"])
def test_count_methods_agree(capsys, method):
    code, out, _ = run(capsys, "count", "--problem", "free_chain(5)", "--energy", "-0.5",
                       "--method", method)
    assert code == 0
    assert json.loads(out)["count"] == 2


def test_morse_at_singular_energy_is_input_error(capsys):
    code, _, err = run(capsys, "count", "--problem", "free_chain(5)", "--energy", "0",
                       "--method", "morse")
    assert code == 3
    assert "SingularEnergy" in err


def test_count_continuum(capsys):
    code, out, _ = run(capsys, "count", "--problem", "free_scalar", "--energy", "50")
    assert code == 0 and json.loads(out)["count"] == 2


def test_input_errors(capsys):
    assert run(capsys, "count", "--problem", "nowhere", "--energy", "1")[0] == 3
    for argv in (["bogus"], ["count", "--problem", "free_chain(3)"]):
        with pytest.raises(SystemExit) as info:
            cli.main(argv)
        assert info.value.code == 3
    assert run(capsys, "locate", "--problem", "free_chain(3)", "--window", "2,1")[0] == 3


def test_locate_negative_window(capsys):
    code, out, _ = run(capsys, "locate", "--problem", "free_chain(3)", "--window", "-2.5,2.5")
    assert code == 0
    got = [r["eigenvalue"] for r in json.loads(out)["eigenvalues"]]
    assert got == pytest.approx([-2 ** 0.5, 0.0, 2 ** 0.5], abs=1e-7)


def test_verify_agree_and_mismatch(capsys):
    code, out, _ = run(capsys, "verify", "--problem", "free_chain(4)", "--energy", "-1.5,0.3")
    assert code == 0 and json.loads(out)["all_agree"]
    code, out, _ = run(capsys, "verify", "--problem", "free_chain(4)", "--energy", "0.3",
                       "--expect", "1")
    assert code == 2 and not json.loads(out)["all_agree"]


def test_verify_is_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for p in (a, b):
        code, _, _ = run(capsys, "verify", "--problem", "random_jacobi(2,5)", "--seed", "7",
                         "--window", "-3,3", "--samples", "8", "--out", str(p))
        assert code == 0
    assert a.read_bytes() == b.read_bytes()


def test_trace_csv(capsys):
    code, out, _ = run(capsys, "trace", "--problem", "free_chain(3,2)", "--axis", "energy",
                       "--window", "-3,3", "--samples", "9")
    lines = out.splitlines()
    assert code == 0
    assert lines[0] == "param,phase_0,phase_1"
    assert len(lines) >= 10
    code, out, _ = run(capsys, "trace", "--problem", "free_scalar", "--energy", "20")
    assert code == 0 and out.startswith("param,phase_0")


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "pruefer", "count", "--problem", "free_chain(2)",
                        "--energy", "2"], capture_output=True, text=True)
    assert r.returncode == 0
    assert json.loads(r.stdout)["count"] == 2
