"""The command line tool on a few builtin problems."""
import subprocess
import sys


def run(*args):
    cmd = [sys.executable, "-m", "pruefer", *args]
    print("$ pruefer", " ".join(args))
    r = subprocess.run(cmd, capture_output=True, text=True)
    out = r.stdout if len(r.stdout) < 1200 else r.stdout[:1200] + "...\n"
    print(out + r.stderr, end="")
    print(f"[exit {r.returncode}]\n")


run("count", "--problem", "free_chain(5)", "--energy", "0.5", "--method", "translog")
run("count", "--problem", "free_chain(5)", "--energy", "0", "--method", "morse")
run("locate", "--problem", "free_scalar", "--window", "5,100")
run("verify", "--problem", "random_jacobi(2,6)", "--seed", "3", "--window", "-3,3",
    "--samples", "4")
run("verify", "--problem", "free_chain(4)", "--energy", "0.3", "--expect", "1")
run("trace", "--problem", "free_chain(3,2)", "--axis", "energy", "--window", "-3,3",
    "--samples", "5")
