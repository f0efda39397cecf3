"""Command-line entry point: ``hermlat <command> ...``.

Exit status is 0 on success, 1 when a verification suite has a failing case,
and 2 on malformed input.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from .density import dden, int_number, siegel_series
from .efield import frac_str
from .enumerate import corank1_integral_lattices, integral_overlattices, vertex_overlattices
from .lattice import HermLattice, is_selfdual, is_vertex
from .schwartz import dden_v_function, fourier, support_outside_vint
from .enumerate import Corank1Frame
from .verify import SUITES, VerifyParams, verify


class InputError(Exception):
    pass


def load_lattice(path: str) -> HermLattice:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from None
    try:
        return HermLattice.from_json(data)
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise InputError(f"bad lattice in {path}: {exc}") from None


def _vector_json(v) -> list:
    return [e.to_json() for e in v]


def cmd_invariants(args) -> object:
    L = load_lattice(args.lattice)
    inv = L.invariants
    return {"a": list(inv.a), "t": inv.t, "val": inv.val, "vertex": is_vertex(L), "selfdual": is_selfdual(L)}


def cmd_den(args) -> object:
    L = load_lattice(args.lattice)
    poly = siegel_series(L, L.cfg.q)
    if args.at is not None:
        try:
            s = int(args.at)
        except ValueError:
            raise InputError("--at needs an integer s") from None
        return frac_str(poly(Fraction(L.cfg.q) ** (-s)))
    return poly.to_json()


def cmd_dden(args) -> object:
    L = load_lattice(args.lattice)
    return dden(L, L.cfg.q) if args.command == "dden" else int_number(L, L.cfg.q)


def cmd_enumerate(args) -> object:
    L = load_lattice(args.lattice)
    if args.kind == "overlattices":
        return [M.to_json() for M in integral_overlattices(L)]
    if args.kind == "vertex":
        return [M.to_json() for M in vertex_overlattices(L)]
    return [
        {"lattice": e.lattice.to_json(), "slice": e.slice.to_json(), "delta": e.delta, "type": e.type}
        for e in corank1_integral_lattices(L)
    ]


def cmd_ft_support(args) -> object:
    L = load_lattice(args.lattice)
    if L.rank != L.space.dim - 1:
        raise InputError("ft-support needs a corank-one lattice")
    w = support_outside_vint(fourier(dden_v_function(L)), direction=Corank1Frame(L).w0)
    return {"witness": None if w is None else _vector_json(w)}


def _seed(value: int | None) -> int:
    if value is not None:
        return value
    env = os.environ.get("HERMLAT_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise InputError(f"HERMLAT_SEED must be an integer, got {env!r}") from None


def cmd_verify(args) -> tuple[object, int]:
    params = VerifyParams(p=args.p, eps0=args.eps0, max_val=args.max_val, seed=_seed(args.seed), count=args.cases)
    report = verify(args.suite, params, jobs=args.jobs, timing=not args.no_timing)
    s = report["summary"]
    return report, 0 if s["passed"] == s["total"] else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hermlat", description="Hermitian lattices over a ramified quadratic extension.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("invariants", help="fundamental invariants, type, val")
    p.add_argument("lattice")
    p.set_defaults(func=cmd_invariants)

    p = sub.add_parser("den", help="local Siegel series")
    p.add_argument("lattice")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--poly", action="store_true", help="print the polynomial (default)")
    g.add_argument("--at", metavar="S", help="evaluate at X = q^-S")
    p.set_defaults(func=cmd_den)

    for name in ("dden", "int"):
        p = sub.add_parser(name, help="central derivative" if name == "dden" else "intersection number")
        p.add_argument("lattice")
        p.set_defaults(func=cmd_dden)

    p = sub.add_parser("enumerate", help="list overlattices")
    p.add_argument("lattice")
    p.add_argument("--kind", choices=("overlattices", "vertex", "corank1"), default="overlattices")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("ft-support", help="search for Fourier support outside the integral cone")
    p.add_argument("lattice")
    p.set_defaults(func=cmd_ft_support)

    p = sub.add_parser("verify", help="run a verification suite and print a JSON report")
    p.add_argument("--suite", choices=SUITES + ("all",), default="all")
    p.add_argument("--p", type=int, default=3)
    p.add_argument("--eps0", type=int, default=1)
    p.add_argument("--max-val", type=int, default=4)
    p.add_argument("--seed", type=int, default=None, help="defaults to $HERMLAT_SEED, then 0")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--cases", type=int, default=None, help="number of random cases per suite")
    p.add_argument("--no-timing", action="store_true", help="report runtime_ms as 0 for byte-stable output")
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "verify":
            if args.jobs < 1 or args.max_val < 0:
                raise InputError("--jobs must be positive and --max-val nonnegative")
            try:
                from .efield import FieldConfig

                FieldConfig(args.p, args.eps0)
            except ValueError as exc:
                raise InputError(str(exc)) from None
            result, code = cmd_verify(args)
        else:
            result, code = args.func(args), 0
    except InputError as exc:
        print(f"hermlat: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"hermlat: {exc}", file=sys.stderr)
        return 2
    json.dump(result, sys.stdout, sort_keys=True)
    sys.stdout.write("\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
