"""Command-line front end.

Exit codes: 0 success, 1 a verification check failed, 2 bad configuration,
3 an orbit hit a singularity or overflowed.
"""
from __future__ import annotations

import argparse
import json
import sys

from . import hamiltonians as H
from .errors import PainleveError
from .model import (REQUIRED_PARAMS, PhasePoint, SurfaceType, complex_to_json, load_spec)
from .orbit import iterate, to_csv
from .specialfn import li2
from .verify import Check, run_all

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_SINGULAR = 0, 1, 2, 3


class ConfigError(Exception):
    pass


def parse_complex(text: str) -> complex:
    """``re,im`` (or a bare real) to complex."""
    parts = text.split(",")
    try:
        if len(parts) == 1:
            return complex(float(parts[0]), 0.0)
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise argparse.ArgumentTypeError(f"expected re,im but got {text!r}")


def _fmt(x: float) -> str:
    x = x + 0.0  # drop the sign of zero
    return "%.17g" % x


def _load(path):
    try:
        return load_spec(path)
    except (OSError, json.JSONDecodeError, ValueError, KeyError) as exc:
        raise ConfigError(f"{type(exc).__name__}: {exc}") from exc


def _open_out(path):
    return sys.stdout if path in (None, "-") else open(path, "w", encoding="utf-8", newline="")


def cmd_verify(args) -> int:
    spec = _load(args.spec)
    checks = None
    if args.checks:
        try:
            checks = [Check(c.strip()) for c in args.checks.split(",") if c.strip()]
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    try:
        reports = run_all(spec, args.n, args.seed, checks)
    except PainleveError as exc:
        raise ConfigError(f"{type(exc).__name__}: {exc}") from exc
    fh = _open_out(args.out)
    try:
        json.dump([r.to_json() for r in reports], fh, indent=2)
        fh.write("\n")
    finally:
        if fh is not sys.stdout:
            fh.close()
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


def cmd_orbit(args) -> int:
    spec = _load(args.spec)
    if args.steps < 1:
        raise ConfigError(f"--steps must be >= 1, got {args.steps}")
    try:
        rec = iterate(spec, PhasePoint(args.f0, args.g0), args.steps)
    except (PainleveError, ValueError) as exc:
        raise ConfigError(f"{type(exc).__name__}: {exc}") from exc
    fh = _open_out(args.out)
    try:
        to_csv(rec, fh)
    finally:
        if fh is not sys.stdout:
            fh.close()
    if rec.terminated_by != "completed":
        idx, name = rec.singular_info
        print(f"orbit terminated by {rec.terminated_by} at step {idx}: {name}", file=sys.stderr)
        return EXIT_SINGULAR
    return EXIT_OK


def cmd_li2(args) -> int:
    v = li2(args.z)
    print(f"{_fmt(v.real)} {_fmt(v.imag)}")
    return EXIT_OK


def cmd_hamiltonian(args) -> int:
    spec = _load(args.spec)
    try:
        w = H.eval_W(spec, args.f, args.gbar, printed=args.printed)
        grad = H.grad_W(spec, args.f, args.gbar)
        g, fbar = H.map_from_W(spec, args.f, args.gbar)
    except PainleveError as exc:
        raise ConfigError(f"{type(exc).__name__}: {exc}") from exc
    out = {
        "surface": spec.surface.value,
        "W": complex_to_json(w.value),
        "branch_note": w.branch_note,
        "dW_df": complex_to_json(grad[0]),
        "dW_dgbar": complex_to_json(grad[1]),
        "g": complex_to_json(g),
        "fbar": complex_to_json(fbar),
    }
    print(json.dumps(out, indent=2))
    return EXIT_OK


def cmd_list(args) -> int:
    for t in SurfaceType:
        params = ",".join(REQUIRED_PARAMS[t]) or "-"
        print(f"{t.value:<11} {t.family.value:<15} {params}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dpainleve", description="Discrete Painleve maps and their Hamiltonians.")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run identity checks on an equation spec")
    v.add_argument("--spec", required=True, help="JSON equation spec")
    v.add_argument("--checks", help="comma-separated check names (default: all applicable)")
    v.add_argument("--n", type=int, default=100)
    v.add_argument("--seed", type=int, default=1)
    v.add_argument("--out", help="report path (default stdout)")
    v.set_defaults(func=cmd_verify)

    o = sub.add_parser("orbit", help="iterate the map and write a CSV trajectory")
    o.add_argument("--spec", required=True)
    o.add_argument("--f0", type=parse_complex, required=True)
    o.add_argument("--g0", type=parse_complex, required=True)
    o.add_argument("--steps", type=int, required=True)
    o.add_argument("--out", help="CSV path (default stdout)")
    o.set_defaults(func=cmd_orbit)

    d = sub.add_parser("li2", help="evaluate the dilogarithm")
    d.add_argument("--z", type=parse_complex, required=True)
    d.set_defaults(func=cmd_li2)

    h = sub.add_parser("hamiltonian", help="evaluate W, its gradient and the induced map")
    h.add_argument("--spec", required=True)
    h.add_argument("--f", type=parse_complex, required=True)
    h.add_argument("--gbar", type=parse_complex, required=True)
    h.add_argument("--printed", action="store_true", help="q-P(A2): use the literal typeset W~")
    h.set_defaults(func=cmd_hamiltonian)

    ls = sub.add_parser("list", help="list surface types, families and parameters")
    ls.set_defaults(func=cmd_list)
    return p


COMPLEX_OPTS = ("--f0", "--g0", "--z", "--f", "--gbar")


def _join_negative(argv):
    # argparse reads "-0.3,0.2" as an option flag; glue it to its option
    out, it = [], iter(argv)
    for tok in it:
        if tok in COMPLEX_OPTS:
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = parser.parse_args(_join_negative(argv))
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
