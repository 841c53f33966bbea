"""Command-line front end. Every subcommand writes JSON (``sweep`` writes CSV).

Exit codes: 0 success, 2 invalid input, 3 infeasible request, 4 failed
verification. Failures print ``{"error": {"kind": ..., "detail": ...}}``.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import fields, replace
from typing import Sequence

import numpy as np

from . import multifunc, prob, sim
from .errors import (
    CapacityError,
    CompatibilityError,
    DomainError,
    NumericError,
    QQBFError,
    VerificationError,
)
from .poly import INF, fn_from_json, is_inf
from .policy import NumericPolicy, policy_from_env, using_policy
from .synth import QQBFCircuit, matrix_from_json, matrix_to_json, synthesize

EXIT_OK, EXIT_INPUT, EXIT_INFEASIBLE, EXIT_VERIFY = 0, 2, 3, 4
TOL_FIELDS = [f.name for f in fields(NumericPolicy) if f.name.endswith("_tol")]


class UsageError(Exception):
    kind = "usage"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _load_json(text: str, stdin=None):
    if text == "-":
        text = (stdin or sys.stdin).read()
    elif text.startswith("@"):
        with open(text[1:]) as fh:
            text = fh.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise DomainError(f"bad JSON: {exc}") from None


def parse_complex(s: str) -> complex:
    """``"1.5-2i"``, ``"3"``, ``"2i"`` or ``"inf"``."""
    t = s.strip().replace(" ", "")
    if t.lower() in ("inf", "+inf", "infinity", "∞"):
        return INF
    if t.endswith("i"):
        t = t[:-1] + "j"
        if t in ("j", "+j", "-j"):
            t = t.replace("j", "1j")
    try:
        return complex(t)
    except ValueError:
        raise DomainError(f"cannot parse complex number {s!r}") from None


def parse_point(s: str) -> list:
    return [parse_complex(p) for p in s.split(",") if p.strip()]


def parse_ints(s: str) -> list:
    try:
        return [int(v) for v in s.split(",") if v.strip()]
    except ValueError:
        raise DomainError(f"expected comma-separated integers, got {s!r}") from None


def _fn(args, name="fn"):
    text = getattr(args, name)
    if text is None:
        raise DomainError(f"--{name.replace('_', '-')} is required")
    return fn_from_json(_load_json(text))


def _circuit(args):
    if args.circuit is not None:
        return QQBFCircuit.from_json(_load_json(args.circuit))
    f = _fn(args)
    ns = parse_ints(args.n) if args.n else None
    return synthesize(f, ns, args.m)


def _ns(args, f):
    return parse_ints(args.n) if args.n else list(f.degrees)


def _point(args, k):
    if args.z is None:
        raise DomainError("--z is required")
    zs = parse_point(args.z)
    if len(zs) != k:
        raise DomainError(f"--z has {len(zs)} values for {k} variables")
    return zs


def _c(z):
    return "inf" if is_inf(z) else [z.real, z.imag]


def cmd_synth(args):
    f = _fn(args)
    ns = parse_ints(args.n) if args.n else None
    return synthesize(f, ns, args.m).to_json()


def cmd_run(args):
    c = _circuit(args)
    return sim.run(c, _point(args, c.k)).to_json()


def cmd_sample(args):
    c = _circuit(args)
    return sim.sample(c, _point(args, c.k), args.shots, args.seed).to_json()


def cmd_verify(args):
    c = _circuit(args)
    f = _fn(args) if args.fn else c.fn
    if args.grid:
        grid = [parse_point(p) for p in args.grid.split(";") if p.strip()]
    else:
        axis = [0j, 1 + 0j, 1j, -1 + 0j, INF]
        grid = [list(p) for p in np.array(np.meshgrid(*[axis] * c.k)).reshape(c.k, -1).T]
    return sim.verify(c, f, grid).to_json()


def cmd_prob(args):
    f = _fn(args)
    ns = _ns(args, f)
    if args.ensemble:
        if len(ns) != 1:
            raise DomainError("ensemble means need a univariate function")
        mean = prob.mean_uniform if args.ensemble == "uniform" else prob.mean_covariant
        return {"ensemble": args.ensemble, "n": ns[0], "mean_prob": mean(f, ns[0])}
    zs = _point(args, len(ns))
    return {"ns": ns, "z": [_c(z) for z in zs], "success_prob": prob.success_probability(f, ns, zs)}


def _params(args) -> list:
    if args.params:
        return [float(v) for v in args.params.split(",") if v.strip()]
    if args.log_grid:
        lo, hi, num = args.log_grid.split(",")
        return list(np.geomspace(float(lo), float(hi), int(num)))
    raise DomainError("give --params or --log-grid")


def cmd_sweep(args):
    f = _fn(args)
    if f.k != 1:
        raise DomainError("sweep needs a univariate function")
    ns = parse_ints(args.n) if args.n else [f.degree, f.degree + 1, f.degree + 2]

    def family(eta):
        return type(f)(f.P.scale(eta), f.Q)

    rows = prob.sweep(family, _params(args), ns, args.ensemble or "uniform")
    return prob.sweep_csv(rows)


def cmd_compat(args):
    g0, g1 = _fn(args, "g0"), _fn(args, "g1")
    n = parse_ints(args.n) if args.n else [max(a, b) for a, b in zip(g0.degrees, g1.degrees)]
    return multifunc.compatibility(g0, g1, n).to_json()


def cmd_multifunc(args):
    g0, g1 = _fn(args, "g0"), _fn(args, "g1")
    n = parse_ints(args.n) if args.n else [max(a, b) for a, b in zip(g0.degrees, g1.degrees)]
    if args.method == "dilation":
        c = multifunc.synthesize_dilation(g0, g1, n, args.r)
    else:
        c = multifunc.synthesize_priority(g0, g1, n)
    out = c.to_json()
    if args.z is not None:
        b0, b1 = sim.run_multifunctional(c, _point(args, c.k))
        out["branches"] = [b0.to_json(), b1.to_json()]
    return out


def cmd_dilate(args):
    if args.matrix is None:
        raise DomainError("--matrix is required")
    A = matrix_from_json(_load_json(args.matrix))
    return {"unitary": matrix_to_json(multifunc.dilation_unitary(A))}


COMMANDS = {
    "synth": cmd_synth,
    "run": cmd_run,
    "sample": cmd_sample,
    "verify": cmd_verify,
    "prob": cmd_prob,
    "sweep": cmd_sweep,
    "compat": cmd_compat,
    "multifunc": cmd_multifunc,
    "dilate": cmd_dilate,
}


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qqbf", description="Quantum-to-quantum Bernoulli factory toolkit")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--fn", help="rational function JSON, or @file")
        s.add_argument("--g0")
        s.add_argument("--g1")
        s.add_argument("--circuit", help="circuit JSON, @file, or - for stdin")
        s.add_argument("--n", help="coins per variable, comma-separated")
        s.add_argument("--m", type=int)
        s.add_argument("--z", help="point such as 1+2i,inf")
        s.add_argument("--grid", help="points separated by ';'")
        s.add_argument("--shots", type=int, default=10000)
        s.add_argument("--seed", type=int, default=0)
        s.add_argument("--ensemble", choices=prob.ENSEMBLES)
        s.add_argument("--params")
        s.add_argument("--log-grid", help="lo,hi,count")
        s.add_argument("--method", choices=["priority", "dilation"], default="priority")
        s.add_argument("--r", type=float, default=1.0)
        s.add_argument("--matrix")
        s.add_argument("--out")
        for t in TOL_FIELDS:
            s.add_argument("--tol-" + t[: -len("_tol")].replace("_", "-"), dest=t, type=float)
    return p


def _exit_code(exc) -> int:
    if isinstance(exc, VerificationError):
        return EXIT_VERIFY
    if isinstance(exc, (CapacityError, CompatibilityError, NumericError)):
        return EXIT_INFEASIBLE
    return EXIT_INPUT


def _emit(text: str, out: str | None, stdout):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        stdout.write(text)


def main(argv: Sequence[str] | None = None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    try:
        args = build_parser().parse_args(argv)
        pol = policy_from_env()
        overrides = {t: getattr(args, t) for t in TOL_FIELDS if getattr(args, t) is not None}
        if overrides:
            pol = replace(pol, **overrides)
        with using_policy(pol):
            result = COMMANDS[args.command](args)
    except (QQBFError, UsageError, ValueError, OSError, KeyError, TypeError) as exc:
        kind = getattr(exc, "kind", "domain")
        payload = {"error": {"kind": kind, "detail": str(exc)}}
        if isinstance(exc, VerificationError) and exc.report is not None:
            payload["report"] = exc.report.to_json()
        stdout.write(json.dumps(payload) + "\n")
        return _exit_code(exc)
    text = result if isinstance(result, str) else json.dumps(result) + "\n"
    _emit(text, args.out, stdout)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
