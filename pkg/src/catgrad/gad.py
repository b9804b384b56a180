"""Differentiable functions over a pluggable derivative category.

A :class:`DFun` pairs a computation with its derivative: ``run(a)`` returns
``(f a, f' a)`` where ``f' a`` is a morphism of the chosen derivative category
``k``.  :class:`Deriv` makes DFuns themselves a category; choosing ``k``
(additive functions, structural matrices, continuations, duals, ...) chooses
how derivatives are represented and therefore the differentiation mode.
"""

from __future__ import annotations

from typing import Callable

from .category import (
    ADD,
    MATH,
    Category,
    CompositionError,
    Morph,
    _same_shapes,
    check_composable,
)
from .shape import (
    PairS,
    PairV,
    R,
    ScalarV,
    Shape,
    UNIT,
    UNIT_V,
    Value,
    VecS,
    VecV,
    add,
    check_conforms,
    shape_of,
    sum_values,
    zero,
)


class DFun(Morph):
    """``run: Value -> (Value, k-morphism)``.  Immutable."""

    __slots__ = ("run",)

    def __init__(self, dom: Shape, cod: Shape, run: Callable[[Value], tuple]):
        super().__init__(dom, cod)
        self.run = run


def linearD(dom: Shape, cod: Shape, f: Callable[[Value], Value], fk) -> DFun:
    """A linear map is its own derivative, everywhere."""
    return DFun(dom, cod, lambda a: (f(a), fk))


def eval_d(f: DFun, a: Value) -> tuple:
    check_conforms(a, f.dom)
    return f.run(a)


class Deriv(Category):
    """The category of DFuns whose derivatives live in ``k``.

    ``prims`` supplies the scalar ``sin``/``cos``/``exp`` used for values
    (the graph renderer passes symbolic versions).
    """

    def __init__(self, k: Category = ADD, prims=MATH):
        self.k = k
        self.prims = prims
        self.name = f"D[{k.name}]"

    # --- category structure ---------------------------------------------------

    def id(self, s):
        return linearD(s, s, lambda v: v, self.k.id(s))

    def compose(self, g, f):
        check_composable(g, f)
        k, frun, grun = self.k, f.run, g.run

        def run(a):
            b, fd = frun(a)
            c, gd = grun(b)
            return c, k.compose(gd, fd)

        return DFun(f.dom, g.cod, run)

    def cross(self, f, g):
        k, frun, grun = self.k, f.run, g.run

        def run(v):
            c, fd = frun(v.left)
            d, gd = grun(v.right)
            return PairV(c, d), k.cross(fd, gd)

        return DFun(PairS(f.dom, g.dom), PairS(f.cod, g.cod), run)

    def fork(self, f, g):
        if f.dom != g.dom:
            raise CompositionError(f"fork needs a shared domain, got {f.dom} and {g.dom}")
        k, frun, grun = self.k, f.run, g.run

        def run(a):
            c, fd = frun(a)
            d, gd = grun(a)
            return PairV(c, d), k.fork(fd, gd)

        return DFun(f.dom, PairS(f.cod, g.cod), run)

    def join(self, f, g):
        if f.cod != g.cod:
            raise CompositionError(f"join needs a shared codomain, got {f.cod} and {g.cod}")
        k, frun, grun = self.k, f.run, g.run

        def run(v):
            c, fd = frun(v.left)
            d, gd = grun(v.right)
            return add(c, d), k.join(fd, gd)

        return DFun(PairS(f.dom, g.dom), f.cod, run)

    def exl(self, a, b):
        return linearD(PairS(a, b), a, lambda v: v.left, self.k.exl(a, b))

    def exr(self, a, b):
        return linearD(PairS(a, b), b, lambda v: v.right, self.k.exr(a, b))

    def dup(self, a):
        return linearD(a, PairS(a, a), lambda v: PairV(v, v), self.k.dup(a))

    def inl(self, a, b):
        zb = zero(b)
        return linearD(a, PairS(a, b), lambda v: PairV(v, zb), self.k.inl(a, b))

    def inr(self, a, b):
        za = zero(a)
        return linearD(b, PairS(a, b), lambda v: PairV(za, v), self.k.inr(a, b))

    def jam(self, a):
        return linearD(PairS(a, a), a, lambda v: add(v.left, v.right), self.k.jam(a))

    def it(self, a):
        return linearD(a, UNIT, lambda v: UNIT_V, self.k.it(a))

    def ti(self, a):
        z = zero(a)
        return linearD(UNIT, a, lambda v: z, self.k.ti(a))

    # --- numeric primitives ---------------------------------------------------

    def scale(self, c):
        return linearD(R, R, lambda v: ScalarV(c * v.x), self.k.scale(c))

    def negateC(self):
        return linearD(R, R, lambda v: ScalarV(-v.x), self.k.negateC())

    def addC(self):
        return linearD(PairS(R, R), R, lambda v: ScalarV(v.left.x + v.right.x), self.k.addC())

    def mulC(self):
        k = self.k

        def run(v):
            a, b = v.left.x, v.right.x
            return ScalarV(a * b), k.join(k.scale(b), k.scale(a))

        return DFun(PairS(R, R), R, run)

    def sinC(self):
        k, sin, cos = self.k, self.prims.sin, self.prims.cos
        return DFun(R, R, lambda v: (ScalarV(sin(v.x)), k.scale(cos(v.x))))

    def cosC(self):
        k, sin, cos = self.k, self.prims.sin, self.prims.cos
        return DFun(R, R, lambda v: (ScalarV(cos(v.x)), k.scale(-sin(v.x))))

    def expC(self):
        k, exp = self.k, self.prims.exp

        def run(v):
            e = exp(v.x)
            return ScalarV(e), k.scale(e)

        return DFun(R, R, run)

    def constC(self, v, dom):
        cod = shape_of(v)
        dz = self.k.hom_zero(dom, cod)
        return DFun(dom, cod, lambda _: (v, dz))

    # --- indexed products -----------------------------------------------------

    def crossI(self, fs):
        dom, cod = _same_shapes(fs, "crossI")
        k = self.k
        runs = [f.run for f in fs]
        n = len(fs)

        def run(v):
            outs = [r(e) for r, e in zip(runs, v.elements)]
            return VecV(tuple(o[0] for o in outs)), k.crossI([o[1] for o in outs])

        return DFun(VecS(n, dom), VecS(n, cod), run)

    def forkI(self, fs):
        dom, cod = _same_shapes(fs, "forkI")
        k = self.k
        runs = [f.run for f in fs]

        def run(a):
            outs = [r(a) for r in runs]
            return VecV(tuple(o[0] for o in outs)), k.forkI([o[1] for o in outs])

        return DFun(dom, VecS(len(fs), cod), run)

    def joinI(self, fs):
        dom, cod = _same_shapes(fs, "joinI")
        k = self.k
        runs = [f.run for f in fs]

        def run(v):
            outs = [r(e) for r, e in zip(runs, v.elements)]
            return sum_values([o[0] for o in outs], cod), k.joinI([o[1] for o in outs])

        return DFun(VecS(len(fs), dom), cod, run)

    def exI(self, n, a):
        ks = self.k.exI(n, a)
        return [
            linearD(VecS(n, a), a, (lambda i: lambda v: v.elements[i])(i), ks[i]) for i in range(n)
        ]

    def replI(self, n, a):
        return linearD(a, VecS(n, a), lambda v: VecV((v,) * n), self.k.replI(n, a))

    def inI(self, n, a):
        z = zero(a)
        ks = self.k.inI(n, a)

        def inject(i):
            return lambda v: VecV(tuple(v if j == i else z for j in range(n)))

        return [linearD(a, VecS(n, a), inject(i), ks[i]) for i in range(n)]

    def jamI(self, n, a):
        return linearD(VecS(n, a), a, lambda v: sum_values(v.elements, a), self.k.jamI(n, a))

    # --- access ---------------------------------------------------------------

    def apply(self, m, v):
        return eval_d(m, v)[0]


def deriv_of(f: DFun, a: Value):
    """Just the derivative morphism at ``a``."""
    return eval_d(f, a)[1]


__all__ = ["DFun", "Deriv", "linearD", "eval_d", "deriv_of"]
