"""Command line front end.

``pruefer count|locate|trace|verify --problem <name|path> ...``

Problems are builtin continuum names (``free_scalar``,
``two_channel_example``), ``free_chain(N[,L])``, ``random_jacobi(L,N)``
seeded by ``--seed``, or JSON files.  Output is JSON (count, locate,
verify) or CSV (trace), written to ``--out`` or stdout.

Exit codes: 0 success, 2 verification mismatch, 3 input error.
"""
import argparse
import json
import logging
import os
import sys
import tempfile

import numpy as np

from . import contsys, jacobi, oracle, specflow, translog
from .contsys import ContinuumProblem
from .errors import PrueferError, SingularEnergy, Uncovered
from .jacobi import BlockJacobiOperator
from .numkernel import unitary_phases
from .problems import ProblemError, load_problem

EXIT_OK = 0
EXIT_MISMATCH = 2
EXIT_INPUT = 3

JACOBI_METHODS = ("energy", "space", "morse", "translog", "interpolation")


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        sys.exit(EXIT_INPUT)


def _floats(text):
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma separated list of numbers: {text!r}")


def build_parser():
    p = _Parser(prog="pruefer", description="Oscillation counts for Hamiltonian systems "
                "and block Jacobi operators.")
    sub = p.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--problem", required=True,
                        help="builtin name, free_chain(N[,L]), random_jacobi(L,N) or JSON path")
    common.add_argument("--steps", type=int, help="integration steps for continuum problems")
    common.add_argument("--mesh", type=int, default=2000, help="finite element mesh for the oracle")
    common.add_argument("--tol", type=float, help="tolerance override (energy resolution)")
    common.add_argument("--seed", type=int, default=0, help="seed for random instances")
    common.add_argument("--out", help="output path (default stdout)")
    common.add_argument("-v", "--verbose", action="store_true")

    c = sub.add_parser("count", parents=[common], help="count eigenvalues <= E")
    c.add_argument("--energy", type=float, required=True)
    c.add_argument("--method", default="energy", choices=sorted(set(JACOBI_METHODS)))

    loc = sub.add_parser("locate", parents=[common], help="eigenvalues in a window (a, b]")
    loc.add_argument("--window", type=_floats, required=True)

    t = sub.add_parser("trace", parents=[common], help="CSV of eigenphase tracks")
    t.add_argument("--axis", choices=("space", "energy"), default="space")
    t.add_argument("--energy", type=float)
    t.add_argument("--window", type=_floats)
    t.add_argument("--samples", type=int, default=65, help="initial energy samples")

    v = sub.add_parser("verify", parents=[common], help="compare all methods with the oracle")
    v.add_argument("--energy", type=_floats, help="comma separated energies")
    v.add_argument("--window", type=_floats, help="draw random energies from a,b")
    v.add_argument("--samples", type=int, default=50)
    v.add_argument("--expect", type=lambda s: [int(x) for x in s.split(",")],
                   help="expected counts at the listed energies")
    return p


def _load(args):
    src = args.problem.strip()
    if src.startswith("random_jacobi(") and src.endswith(")"):
        try:
            L, N = (int(a) for a in src[len("random_jacobi("):-1].split(","))
        except ValueError:
            raise InputError(f"cannot parse {src!r}")
        return BlockJacobiOperator.random(L, N, np.random.default_rng(args.seed))
    try:
        return load_problem(src)
    except (ProblemError, ValueError) as exc:
        raise InputError(str(exc))


def _window(args, required=True):
    w = getattr(args, "window", None)
    if w is None:
        if required:
            raise InputError("--window a,b is required")
        return None
    if len(w) != 2 or not w[0] < w[1]:
        raise InputError("--window needs two increasing numbers a,b")
    return w


def _count(prob, E, method, steps=None):
    """(count, extra report) for one method."""
    if isinstance(prob, ContinuumProblem):
        if method == "energy":
            rep, _ = contsys.energy_flow(prob, E, steps=steps)
            return rep.net_flow, rep.as_dict()
        if method == "space":
            rep, _ = contsys.space_flow(prob, E, steps)
            if any(c.direction < 0 for c in rep.crossings):
                return contsys.count_by_space(prob, E, steps), {}
            return rep.net_flow, rep.as_dict()
        raise InputError(f"method {method!r} needs a Jacobi operator")
    if method == "energy":
        H = prob.normalized_form()
        floor = H.energy_floor()
        if E <= floor:
            return 0, {"net_flow": 0, "crossings": []}
        rep, _ = jacobi.energy_flow_jacobi(H, E, floor)
        return rep.net_flow, rep.as_dict()
    if method == "morse":
        return jacobi.morse_count(prob, E), {}
    if method == "interpolation":
        return jacobi.interpolation_flow(prob, E), {}
    if method in ("space", "translog"):
        crit = translog.critical_energies(prob)
        extra = {"E_c": crit.E_c, "E_c_prime": crit.E_c_prime}
        if E < crit.E_c:
            r = translog.space_flow_translog(prob, E)
        elif E > crit.E_c_prime:
            r = translog.space_flow_translog_positive(prob, E)
            extra["experimental"] = True
        else:
            raise Uncovered(f"E = {E:.6g} lies in [{crit.E_c:.6g}, {crit.E_c_prime:.6g}]")
        extra.update(r.flow.as_dict(), branch=r.branch, endpoint_error=r.endpoint_error)
        return r.count, extra
    raise InputError(f"unknown method {method!r}")


def cmd_count(args, prob):
    n, extra = _count(prob, args.energy, args.method, args.steps)
    return {"command": "count", "problem": args.problem, "energy": args.energy,
            "method": args.method, "count": int(n), "report": extra, "seed": args.seed}, EXIT_OK


def cmd_locate(args, prob):
    a, b = _window(args)
    tol = args.tol or 1e-8
    if isinstance(prob, ContinuumProblem):
        found = contsys.locate_eigenvalues(prob, (a, b), tol_E=tol, steps=args.steps)
    else:
        found = jacobi.locate_eigenvalues_jacobi(prob, (a, b), tol)
    rows = [{"eigenvalue": float(e), "multiplicity": int(m)} for e, m in found]
    return {"command": "locate", "problem": args.problem, "window": [a, b],
            "eigenvalues": rows, "seed": args.seed}, EXIT_OK


def cmd_trace(args, prob):
    if args.axis == "space":
        if args.energy is None:
            raise InputError("--energy is required for a space trace")
        if isinstance(prob, ContinuumProblem):
            path = contsys.pruefer_path(prob, args.energy, args.steps)
        else:
            crit = translog.critical_energies(prob)
            if args.energy < crit.E_c:
                path = translog.space_flow_translog(prob, args.energy).path
            else:
                path = jacobi.interpolation_path(prob, args.energy)
    else:
        a, b = _window(args)
        if isinstance(prob, ContinuumProblem):
            gen = contsys.energy_generator(prob, args.steps)
        else:
            H = prob.normalized_form()

            def gen(es):
                return unitary_phases(jacobi._end_unitaries(H, es))
        path = specflow.refine_adaptively(gen, (a, b), initial=args.samples,
                                          vectorized=True, phases_only=True)
    return specflow.path_to_csv(path, prefix="phase"), EXIT_OK


def _verify_energies(args):
    if args.energy:
        return list(args.energy)
    a, b = _window(args)
    rng = np.random.default_rng(args.seed)
    return sorted(rng.uniform(a, b, args.samples).tolist())


def _reference(prob, args):
    if isinstance(prob, ContinuumProblem):
        try:
            return oracle.fd_sl_spectrum(prob, args.mesh)
        except PrueferError:
            return None
    return oracle.dense_jacobi_spectrum(prob)


def _methods_for(prob):
    if isinstance(prob, ContinuumProblem):
        return ["energy", "space"] if prob.dirichlet_right else ["energy"]
    return ["energy", "morse", "interpolation", "translog"]


def cmd_verify(args, prob):
    energies = _verify_energies(args)
    if args.expect is not None and len(args.expect) != len(energies):
        raise InputError("--expect needs one count per energy")
    ref = _reference(prob, args)
    methods = _methods_for(prob)
    gap = 1e-6
    rows = []
    ok = True
    for i, E in enumerate(energies):
        row = {"energy": E, "counts": {}, "skipped": {}}
        if ref is not None:
            row["counts"]["oracle"] = oracle.count_below(ref, E)
            near = np.min(np.abs(ref.eigenvalues - E)) if len(ref) else np.inf
            if near <= gap * max(1.0, abs(E)):
                row["skipped"]["all"] = "energy within tolerance of an eigenvalue"
        if not isinstance(prob, ContinuumProblem):
            try:
                jacobi.check_regular_energy(prob, E)
            except SingularEnergy:
                row["skipped"]["morse"] = "singular energy"
        for m in methods:
            if m in row["skipped"]:
                continue
            try:
                row["counts"][m] = int(_count(prob, E, m, args.steps)[0])
            except PrueferError as exc:
                row["skipped"][m] = f"{type(exc).__name__}: {exc}"
        values = set(row["counts"].values())
        if args.expect is not None:
            row["expected"] = args.expect[i]
            values.add(args.expect[i])
        row["agree"] = "all" in row["skipped"] or len(values) <= 1
        ok &= row["agree"]
        rows.append(row)
    rec = {"command": "verify", "problem": args.problem, "seed": args.seed,
           "methods": methods, "oracle": None if ref is None else ref.method,
           "rows": rows, "all_agree": bool(ok)}
    return rec, EXIT_OK if ok else EXIT_MISMATCH


def _write(text, path):
    if path is None:
        sys.stdout.write(text)
        return
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".pruefer-")
    with os.fdopen(fd, "w") as f:
        f.write(text)
    os.replace(tmp, path)


COMMANDS = {"count": cmd_count, "locate": cmd_locate, "trace": cmd_trace,
            "verify": cmd_verify}


VALUE_FLAGS = ("--energy", "--window", "--expect", "--tol")


def _glue_negative(argv):
    """Join ``--window -2,2`` into ``--window=-2,2`` so argparse accepts it."""
    out = []
    it = iter(argv)
    for tok in it:
        if tok in VALUE_FLAGS:
            nxt = next(it, None)
            if nxt is not None and nxt.startswith("-") and nxt[1:2].isdigit() or (
                    nxt is not None and nxt.startswith("-.")):
                out.append(f"{tok}={nxt}")
                continue
            out.append(tok)
            if nxt is not None:
                out.append(nxt)
            continue
        out.append(tok)
    return out


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(_glue_negative(argv))
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        prob = _load(args)
        out, code = COMMANDS[args.command](args, prob)
    except (InputError, PrueferError, ValueError) as exc:
        sys.stderr.write(f"pruefer: {type(exc).__name__}: {exc}\n")
        return EXIT_INPUT
    if not isinstance(out, str):
        out = json.dumps(out, indent=2, sort_keys=True) + "\n"
    _write(out, args.out)
    return code


if __name__ == "__main__":
    sys.exit(main())
