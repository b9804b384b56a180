"""``catgrad`` command-line interface.

Exit codes: 0 success, 2 parse or shape error, 3 point does not fit the
shape, 4 unknown mode, 5 result is not scalar, 6 derivative check failed,
7 descent diverged, 8 I/O failure.
"""

from __future__ import annotations

import argparse
import sys

from . import driver
from .front import SourceError, compile_source, show_cat
from .linmap import chain_order, format_chain, format_dense
from .rad import ModeError
from .shape import ShapeError, dim, flatten, parse_shape, unflatten

EXIT_SOURCE, EXIT_POINT, EXIT_MODE, EXIT_NONSCALAR, EXIT_CHECK, EXIT_DIVERGE, EXIT_IO = 2, 3, 4, 5, 6, 7, 8

DOT_MODES = ("plain", "forward", "dual", "cont")


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def fmt_numbers(xs) -> str:
    return ", ".join(f"{float(x):.17g}" for x in xs)


def _source(args) -> str:
    if args.file and args.expr:
        raise CliError("give either --file or --expr, not both", EXIT_SOURCE)
    if args.file:
        try:
            with open(args.file, encoding="utf-8") as fh:
                return fh.read()
        except OSError as exc:
            raise CliError(f"cannot read {args.file}: {exc.strerror or exc}", EXIT_IO)
    if args.expr is None:
        raise CliError("no program given; use --file or --expr", EXIT_SOURCE)
    return args.expr


def _program(args):
    try:
        shape = parse_shape(args.shape)
    except ShapeError as exc:
        raise CliError(f"bad --shape: {exc}", EXIT_SOURCE)
    text = _source(args)
    try:
        return compile_source(text, shape)
    except SourceError as exc:
        raise CliError(f"{args.file or '<expr>'}: {exc}", EXIT_SOURCE)
    except ShapeError as exc:
        raise CliError(f"shape error: {exc}", EXIT_SOURCE)


def _point(args, prog, name: str = "--point"):
    raw = args.point
    n = dim(prog.dom)
    if raw is None:
        if n == 0:
            raw = ""
        else:
            raise CliError(f"{name} is required for shape {prog.dom}", EXIT_POINT)
    parts = [p.strip() for p in raw.split(",") if p.strip()]
    try:
        xs = [float(p) for p in parts]
    except ValueError:
        raise CliError(f"{name} must be comma-separated numbers, got {raw!r}", EXIT_POINT)
    if len(xs) != n:
        raise CliError(
            f"{name} has {len(xs)} coordinates but shape {prog.dom} needs {n}", EXIT_POINT
        )
    return unflatten(prog.dom, xs)


def _mode(args, allowed, default):
    m = args.mode or default
    if m not in allowed:
        raise CliError(f"unknown mode {m!r}; choose from {', '.join(allowed)}", EXIT_MODE)
    return m


def _write(args, text: str, out) -> None:
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            raise CliError(f"cannot write {args.out}: {exc.strerror or exc}", EXIT_IO)
    else:
        out.write(text)


# --- commands ---------------------------------------------------------------------


def cmd_show(args, out):
    prog = _program(args)
    _write(args, show_cat(prog.term) + "\n", out)


def cmd_eval(args, out):
    prog = _program(args)
    y = driver.evaluate(prog, _point(args, prog))
    _write(args, fmt_numbers(flatten(y)) + "\n", out)


def cmd_jacobian(args, out):
    mode = _mode(args, driver.JACOBIAN_MODES, "forward")
    prog = _program(args)
    jac = driver.jacobian(prog, _point(args, prog), mode)
    _write(args, format_dense(jac) + "\n", out)


def cmd_gradient(args, out):
    prog = _program(args)
    x = _point(args, prog)
    if prog.cod != parse_shape("R"):
        raise CliError(f"gradient needs a scalar result, but the program returns {prog.cod}", EXIT_NONSCALAR)
    _write(args, fmt_numbers(flatten(driver.gradient(prog, x))) + "\n", out)


def cmd_check(args, out):
    modes = driver.JACOBIAN_MODES
    if args.mode:
        modes = (_mode(args, driver.JACOBIAN_MODES, None),)
    prog = _program(args)
    if args.h <= 0:
        raise CliError(f"--h must be positive, got {args.h}", EXIT_SOURCE)
    rep = driver.check(prog, args.trials, args.h, args.tol, args.seed, modes, args.parallel)
    lines = [f"points: {rep.points}"]
    lines += [f"{m}: max relative error {e:.3e}" for m, e in rep.per_mode.items()]
    if rep.passed:
        lines.append(f"PASS (max {rep.max_error:.3e} <= tol {rep.tol:.3e})")
        _write(args, "\n".join(lines) + "\n", out)
        return 0
    m, x, i, j, ad, fd = rep.worst
    lines.append(
        f"FAIL (max {rep.max_error:.3e} > tol {rep.tol:.3e}): mode {m} at point "
        f"{fmt_numbers(flatten(x))}, entry [{i}, {j}]: ad {ad:.17g} vs fd {fd:.17g}"
    )
    _write(args, "\n".join(lines) + "\n", out)
    return EXIT_CHECK


def cmd_descend(args, out):
    prog = _program(args)
    x0 = _point(args, prog)
    if prog.cod != parse_shape("R"):
        raise CliError(f"descent needs a scalar objective, but the program returns {prog.cod}", EXIT_NONSCALAR)
    if args.eta < 0:
        raise CliError(f"--eta must be non-negative, got {args.eta}", EXIT_SOURCE)
    try:
        res = driver.descend(prog, x0, args.eta, args.iters, args.tol)
    except driver.DivergenceError as exc:
        raise CliError(f"descent diverged: {exc}", EXIT_DIVERGE)
    lines = [f"iter {k} objective {f:.17g}" for k, f in enumerate(res.objectives)]
    status = (
        f"converged after {res.iterations} iterations"
        if res.converged
        else f"iteration cap {args.iters} reached"
    )
    lines.append(f"{status} (gradient norm {res.grad_norm:.3e})")
    lines.append("final " + fmt_numbers(flatten(res.x)))
    _write(args, "\n".join(lines) + "\n", out)


def cmd_chain_order(args, out):
    try:
        dims = [int(d) for d in args.dims]
        cost, tree = chain_order(dims)
    except ValueError as exc:
        raise CliError(str(exc), EXIT_SOURCE)
    _write(args, f"cost {cost}\n{format_chain(tree)}\n", out)


def cmd_dot(args, out):
    from .viz import emit_dot, to_graph, to_graph_d

    mode = _mode(args, DOT_MODES, "plain")
    prog = _program(args)
    g = to_graph(prog.term) if mode == "plain" else to_graph_d(prog.term, mode)
    _write(args, emit_dot(g), out)


COMMANDS = {
    "show": cmd_show,
    "eval": cmd_eval,
    "jacobian": cmd_jacobian,
    "gradient": cmd_gradient,
    "check": cmd_check,
    "descend": cmd_descend,
    "chain-order": cmd_chain_order,
    "dot": cmd_dot,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="catgrad", description="Categorical automatic differentiation toolkit.")
    sub = ap.add_subparsers(dest="command", required=True)

    def program_args(p):
        src = p.add_argument_group("program")
        src.add_argument("--file", help="source file")
        src.add_argument("--expr", help="inline source text")
        src.add_argument("--shape", default="R", help="argument shape, e.g. '(R, R)' or '[3 x R]'")
        p.add_argument("--out", help="write output here instead of stdout")

    helps = {
        "show": "print the normalized categorical form",
        "eval": "evaluate at --point",
        "jacobian": "dense Jacobian at --point",
        "gradient": "gradient of a scalar program at --point",
        "check": "compare every mode against finite differences",
        "descend": "gradient descent from --point",
        "dot": "emit a DOT graph",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, help=text)
        program_args(p)
        if name in ("eval", "jacobian", "gradient", "descend"):
            p.add_argument("--point", help="comma-separated coordinates, flattened")
        if name in ("jacobian", "check", "dot"):
            p.add_argument("--mode", help="differentiation or graph mode")
        if name == "check":
            p.add_argument("--trials", type=int, default=100)
            p.add_argument("--h", type=float, default=1e-6)
            p.add_argument("--tol", type=float, default=1e-5)
            p.add_argument("--seed", type=int, default=0)
            p.add_argument("--parallel", action="store_true", help="evaluate points concurrently")
        if name == "descend":
            p.add_argument("--eta", type=float, default=0.1)
            p.add_argument("--iters", type=int, default=1000)
            p.add_argument("--tol", type=float, default=1e-6)
    p = sub.add_parser("chain-order", help="cheapest association of a matrix chain")
    p.add_argument("dims", nargs="+", help="dimensions d0 d1 ... dn")
    p.add_argument("--out", help="write output here instead of stdout")
    return ap


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        code = COMMANDS[args.command](args, out)
    except CliError as exc:
        print(f"catgrad: {exc}", file=err)
        return exc.code
    except ModeError as exc:
        print(f"catgrad: {exc}", file=err)
        return EXIT_NONSCALAR
    return code or 0


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
