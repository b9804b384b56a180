"""High-level operations over compiled programs: Jacobians by mode, gradients,
finite-difference checking and gradient descent."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .category import ADD, FUN
from .front import Program
from .gad import Deriv
from .linmap import MAT
from .rad import Begin, Cont, Dual, ModeError, gradient as _gradient, to_dense
from .shape import R, ScalarV, Value, dim, flatten, shape_of, unflatten

JACOBIAN_MODES = ("forward", "reverse-cont", "reverse-dual", "matrix", "additive")


class DivergenceError(RuntimeError):
    pass


def deriv_category(mode: str) -> Deriv:
    if mode == "forward":
        return Deriv(Begin(ADD, R))
    if mode == "reverse-cont":
        return Deriv(Cont(ADD, R))
    if mode == "reverse-dual":
        return Deriv(Dual(ADD))
    if mode == "matrix":
        return Deriv(MAT)
    if mode == "additive":
        return Deriv(ADD)
    raise ModeError(f"unknown mode {mode!r}; choose from {', '.join(JACOBIAN_MODES)}")


def evaluate(prog: Program, x: Value) -> Value:
    return FUN.apply(prog.morphism(FUN), x)


def jacobian(prog: Program, x: Value, mode: str = "forward") -> np.ndarray:
    f = prog.morphism(deriv_category(mode))
    _, d = f.run(x)
    return to_dense(d)


def gradient(prog: Program, x: Value) -> Value:
    """Gradient through the dual of additive functions."""
    if prog.cod != R:
        raise ModeError(f"gradient needs a scalar result, but the program returns {prog.cod}")
    return _gradient(prog.morphism(deriv_category("reverse-dual")), x)


def fd_jacobian(fn, x: Value, h: float = 1e-6) -> np.ndarray:
    """Central differences ``(f(x + h e_j) - f(x - h e_j)) / 2h``, column by column."""
    s = shape_of(x)
    xs = np.asarray(flatten(x), dtype=float)
    cols = []
    for j in range(xs.size):
        e = np.zeros_like(xs)
        e[j] = h
        hi = np.asarray(flatten(fn(unflatten(s, (xs + e).tolist()))), dtype=float)
        lo = np.asarray(flatten(fn(unflatten(s, (xs - e).tolist()))), dtype=float)
        cols.append((hi - lo) / (2 * h))
    rows = len(flatten(fn(x)))
    return np.array(cols).T.reshape(rows, xs.size) if cols else np.zeros((rows, 0))


def rel_error(ad: np.ndarray, ref: np.ndarray) -> np.ndarray:
    return np.abs(ad - ref) / np.maximum(1.0, np.abs(ref))


@dataclass
class CheckReport:
    passed: bool
    max_error: float
    per_mode: dict
    worst: tuple | None  # (mode, point, row, col, ad, fd)
    points: int
    tol: float


def random_points(prog: Program, trials: int, seed: int = 0) -> list:
    rng = np.random.default_rng(seed)
    n = dim(prog.dom)
    return [unflatten(prog.dom, rng.uniform(-2.0, 2.0, n).tolist()) for _ in range(trials)]


def check(prog: Program, trials: int = 100, h: float = 1e-6, tol: float = 1e-5,
          seed: int = 0, modes=JACOBIAN_MODES, parallel: bool = False) -> CheckReport:
    """Compare every mode's Jacobian against central differences at random points."""
    if h <= 0:
        raise ValueError(f"finite-difference step must be positive, got {h}")
    plain = prog.morphism(FUN)
    cats = {m: prog.morphism(deriv_category(m)) for m in modes}
    points = random_points(prog, trials, seed)

    def one(x):
        fd = fd_jacobian(plain.fn, x, h)
        out = {}
        for m, f in cats.items():
            ad = to_dense(f.run(x)[1])
            err = rel_error(ad, fd)
            if err.size:
                i, j = np.unravel_index(int(np.argmax(err)), err.shape)
                out[m] = (float(err[i, j]), int(i), int(j), float(ad[i, j]), float(fd[i, j]))
            else:
                out[m] = (0.0, -1, -1, 0.0, 0.0)
        return out

    if parallel:
        with ThreadPoolExecutor() as pool:
            results = list(pool.map(one, points))
    else:
        results = [one(x) for x in points]

    per_mode = {m: 0.0 for m in modes}
    worst = None
    worst_err = -1.0
    for x, res in zip(points, results):
        for m in modes:
            err, i, j, ad, fd = res[m]
            per_mode[m] = max(per_mode[m], err)
            if err > worst_err:
                worst_err = err
                worst = (m, x, i, j, ad, fd)
    max_error = max(per_mode.values()) if per_mode else 0.0
    return CheckReport(max_error <= tol, max_error, per_mode, worst, len(points), tol)


@dataclass
class DescentResult:
    x: Value
    iterations: int
    converged: bool
    objectives: list = field(default_factory=list)
    grad_norm: float = math.nan


def descend(prog: Program, start: Value, eta: float = 0.1, iters: int = 1000,
            tol: float = 1e-6) -> DescentResult:
    """``x <- x - eta * grad f(x)`` until ``|grad f| <= tol`` or ``iters`` steps.

    ``objectives[k]`` is ``f`` at the k-th iterate.  Raises
    :class:`DivergenceError` if the objective stops being finite.
    """
    if prog.cod != R:
        raise ModeError(f"descent needs a scalar objective, but the program returns {prog.cod}")
    if eta < 0:
        raise ValueError(f"step size must be non-negative, got {eta}")
    f = prog.morphism(deriv_category("reverse-dual"))
    x = np.asarray(flatten(start), dtype=float)
    objectives = []
    k = 0
    while True:
        point = unflatten(prog.dom, x.tolist())
        y, d = f.run(point)
        if not math.isfinite(y.x):
            raise DivergenceError(f"objective became {y.x} at iteration {k}")
        objectives.append(y.x)
        g = np.asarray(flatten(d.rev.fn(ScalarV(1.0))), dtype=float)
        gnorm = float(np.linalg.norm(g))
        if not np.all(np.isfinite(g)):
            raise DivergenceError(f"gradient became non-finite at iteration {k}")
        if gnorm <= tol:
            return DescentResult(point, k, True, objectives, gnorm)
        if k >= iters:
            return DescentResult(point, k, False, objectives, gnorm)
        x = x - eta * g
        k += 1


__all__ = [
    "JACOBIAN_MODES",
    "DivergenceError",
    "deriv_category",
    "evaluate",
    "jacobian",
    "gradient",
    "fd_jacobian",
    "rel_error",
    "CheckReport",
    "check",
    "random_points",
    "DescentResult",
    "descend",
]
