"""Categorical vocabulary shared by every morphism representation.

:class:`Category` is the interface: identity and composition, products
(``cross``/``exl``/``exr``/``dup``), biproduct injections and merge
(``inl``/``inr``/``jam``), terminal/initial maps, scaling, numeric primitives and
the indexed (n-ary) variants.  Derived combinators -- fork, join and their
inverses, hom-set zero and sum -- are written once here in terms of the
primitives, so every representation gets them for free and may override them.

Two base instances live here: :data:`FUN` (plain functions, used for
evaluation) and :data:`ADD` (additive functions, the simplest derivative
carrier).
"""

from __future__ import annotations

import math
from types import SimpleNamespace
from typing import Callable, Sequence

from .shape import (
    PairS,
    PairV,
    R,
    ScalarS,
    ScalarV,
    Shape,
    ShapeError,
    UNIT,
    UNIT_V,
    UnitS,
    Value,
    VecS,
    VecV,
    add,
    check_conforms,
    scale_value,
    shape_of,
    sum_values,
    zero,
)


class UnsupportedOperation(NotImplementedError):
    """The instance has no such operation (e.g. ``jam`` on plain functions)."""


class CompositionError(ShapeError):
    pass


def _safe_exp(x):
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf


# Scalar primitives used by the function-like instances.  The graph renderer
# swaps in a namespace whose operations build nodes instead of numbers.
MATH = SimpleNamespace(sin=math.sin, cos=math.cos, exp=_safe_exp)


class Morph:
    """Base for morphisms: every morphism knows its domain and codomain shapes."""

    __slots__ = ("dom", "cod")

    def __init__(self, dom: Shape, cod: Shape):
        self.dom = dom
        self.cod = cod

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.dom} -> {self.cod})"


def check_composable(g: Morph, f: Morph) -> None:
    if f.cod != g.dom:
        raise CompositionError(
            f"cannot compose: inner morphism has codomain {f.cod}, outer has domain {g.dom}"
        )


def pair_parts(s: Shape, what: str) -> tuple:
    if not isinstance(s, PairS):
        raise ShapeError(f"{what} needs a pair shape, got {s}")
    return s.left, s.right


def vec_parts(s: Shape, what: str) -> tuple:
    if not isinstance(s, VecS):
        raise ShapeError(f"{what} needs a vector shape, got {s}")
    return s.n, s.elem


def _same_shapes(ms: Sequence[Morph], what: str) -> tuple:
    if not ms:
        raise ShapeError(f"{what} needs at least one morphism")
    dom, cod = ms[0].dom, ms[0].cod
    for m in ms[1:]:
        if m.dom != dom or m.cod != cod:
            raise ShapeError(f"{what}: morphisms disagree ({dom} -> {cod} vs {m.dom} -> {m.cod})")
    return dom, cod


class Category:
    """Interface for a category of morphisms between shapes.

    Subclasses implement whichever primitives they support; everything else
    raises :class:`UnsupportedOperation` naming the instance.
    """

    name = "category"

    def _unsupported(self, op: str):
        raise UnsupportedOperation(f"{op} is not supported by the {self.name} category")

    # Category
    def id(self, s: Shape):
        self._unsupported("id")

    def compose(self, g, f):
        self._unsupported("compose")

    # Monoidal
    def cross(self, f, g):
        self._unsupported("cross")

    # Cartesian
    def exl(self, a: Shape, b: Shape):
        self._unsupported("exl")

    def exr(self, a: Shape, b: Shape):
        self._unsupported("exr")

    def dup(self, a: Shape):
        self._unsupported("dup")

    # Cocartesian
    def inl(self, a: Shape, b: Shape):
        self._unsupported("inl")

    def inr(self, a: Shape, b: Shape):
        self._unsupported("inr")

    def jam(self, a: Shape):
        self._unsupported("jam")

    # Terminal / Initial
    def it(self, a: Shape):
        self._unsupported("it")

    def ti(self, a: Shape):
        self._unsupported("ti")

    # Scalable, NumCat, FloatingCat
    def scale(self, c):
        self._unsupported("scale")

    def negateC(self):
        self._unsupported("negateC")

    def addC(self):
        self._unsupported("addC")

    def mulC(self):
        self._unsupported("mulC")

    def sinC(self):
        self._unsupported("sinC")

    def cosC(self):
        self._unsupported("cosC")

    def expC(self):
        self._unsupported("expC")

    def constC(self, v: Value, dom: Shape):
        self._unsupported("constC")

    # Indexed (n-ary) products over VecS
    def crossI(self, fs: Sequence):
        self._unsupported("crossI")

    def exI(self, n: int, a: Shape) -> list:
        self._unsupported("exI")

    def replI(self, n: int, a: Shape):
        self._unsupported("replI")

    def inI(self, n: int, a: Shape) -> list:
        self._unsupported("inI")

    def jamI(self, n: int, a: Shape):
        self._unsupported("jamI")

    # Representation access
    def apply(self, m, v: Value) -> Value:
        """Run morphism ``m`` on a value (only for representations that are runnable)."""
        self._unsupported("apply")

    def lift(self, dom: Shape, cod: Shape, fn: Callable[[Value], Value]):
        """Embed a linear function as a morphism of this category."""
        self._unsupported("lift")

    # --- derived operations ---------------------------------------------------

    def fork(self, f, g):
        if f.dom != g.dom:
            raise CompositionError(f"fork needs a shared domain, got {f.dom} and {g.dom}")
        return self.compose(self.cross(f, g), self.dup(f.dom))

    def join(self, f, g):
        if f.cod != g.cod:
            raise CompositionError(f"join needs a shared codomain, got {f.cod} and {g.cod}")
        return self.compose(self.jam(f.cod), self.cross(f, g))

    def unfork(self, h) -> tuple:
        c, d = pair_parts(h.cod, "unfork")
        return self.compose(self.exl(c, d), h), self.compose(self.exr(c, d), h)

    def unjoin(self, h) -> tuple:
        c, d = pair_parts(h.dom, "unjoin")
        return self.compose(h, self.inl(c, d)), self.compose(h, self.inr(c, d))

    def forkI(self, fs: Sequence):
        dom, _ = _same_shapes(fs, "forkI")
        return self.compose(self.crossI(fs), self.replI(len(fs), dom))

    def joinI(self, fs: Sequence):
        _, cod = _same_shapes(fs, "joinI")
        return self.compose(self.jamI(len(fs), cod), self.crossI(fs))

    def hom_zero(self, a: Shape, b: Shape):
        return self.compose(self.ti(b), self.it(a))

    def hom_add(self, f, g):
        if f.dom != g.dom or f.cod != g.cod:
            raise CompositionError(
                f"cannot add morphisms {f.dom} -> {f.cod} and {g.dom} -> {g.cod}"
            )
        return self.compose(self.jam(f.cod), self.compose(self.cross(f, g), self.dup(f.dom)))

    def hom_sum(self, fs: Sequence):
        acc = fs[0]
        for f in fs[1:]:
            acc = self.hom_add(acc, f)
        return acc

    def __repr__(self) -> str:
        return f"<{self.name} category>"


# --- function-like instances ---------------------------------------------------


class FnMorph(Morph):
    __slots__ = ("fn",)

    def __init__(self, dom: Shape, cod: Shape, fn: Callable[[Value], Value]):
        super().__init__(dom, cod)
        self.fn = fn

    def __call__(self, v: Value) -> Value:
        return self.fn(v)


class AddFun(FnMorph):
    """A function asserted to be additive and homogeneous."""

    __slots__ = ()


def _identity(v):
    return v


def _exl(v):
    return v.left


def _exr(v):
    return v.right


def _dup(v):
    return PairV(v, v)


def _jam(v):
    return add(v.left, v.right)


class _FunctionLike(Category):
    """Shared structure of plain functions and additive functions."""

    morph = FnMorph

    def __init__(self, prims=MATH):
        self.prims = prims

    def _m(self, dom, cod, fn):
        return self.morph(dom, cod, fn)

    def id(self, s):
        return self._m(s, s, _identity)

    def compose(self, g, f):
        check_composable(g, f)
        gf, ff = g.fn, f.fn
        return self._m(f.dom, g.cod, lambda v: gf(ff(v)))

    def cross(self, f, g):
        ff, gf = f.fn, g.fn
        return self._m(
            PairS(f.dom, g.dom), PairS(f.cod, g.cod), lambda v: PairV(ff(v.left), gf(v.right))
        )

    def fork(self, f, g):
        if f.dom != g.dom:
            raise CompositionError(f"fork needs a shared domain, got {f.dom} and {g.dom}")
        ff, gf = f.fn, g.fn
        return self._m(f.dom, PairS(f.cod, g.cod), lambda v: PairV(ff(v), gf(v)))

    def exl(self, a, b):
        return self._m(PairS(a, b), a, _exl)

    def exr(self, a, b):
        return self._m(PairS(a, b), b, _exr)

    def dup(self, a):
        return self._m(a, PairS(a, a), _dup)

    def it(self, a):
        return self._m(a, UNIT, lambda v: UNIT_V)

    def ti(self, a):
        z = zero(a)
        return self._m(UNIT, a, lambda v: z)

    def scale(self, c):
        return self._m(R, R, lambda v: ScalarV(c * v.x))

    def negateC(self):
        return self._m(R, R, lambda v: ScalarV(-v.x))

    def addC(self):
        return self._m(PairS(R, R), R, lambda v: ScalarV(v.left.x + v.right.x))

    def crossI(self, fs):
        dom, cod = _same_shapes(fs, "crossI")
        fns = [f.fn for f in fs]
        n = len(fs)
        return self._m(
            VecS(n, dom),
            VecS(n, cod),
            lambda v: VecV(tuple(fn(e) for fn, e in zip(fns, v.elements))),
        )

    def exI(self, n, a):
        return [self._m(VecS(n, a), a, (lambda i: lambda v: v.elements[i])(i)) for i in range(n)]

    def replI(self, n, a):
        return self._m(a, VecS(n, a), lambda v: VecV((v,) * n))

    def jamI(self, n, a):
        return self._m(VecS(n, a), a, lambda v: sum_values(v.elements, a))

    def apply(self, m, v):
        check_conforms(v, m.dom)
        return m.fn(v)

    def lift(self, dom, cod, fn):
        return self._m(dom, cod, fn)


class Functions(_FunctionLike):
    """Plain (possibly nonlinear) functions.

    There are no biproduct injections here; ``inl``/``inr``/``jam``/``inI``
    raise :class:`UnsupportedOperation`.  ``jamI`` is kept as the bulk sum so
    that vector sums in source programs can be evaluated.
    """

    name = "function"
    morph = FnMorph

    def mulC(self):
        return FnMorph(PairS(R, R), R, lambda v: ScalarV(v.left.x * v.right.x))

    def sinC(self):
        sin = self.prims.sin
        return FnMorph(R, R, lambda v: ScalarV(sin(v.x)))

    def cosC(self):
        cos = self.prims.cos
        return FnMorph(R, R, lambda v: ScalarV(cos(v.x)))

    def expC(self):
        exp = self.prims.exp
        return FnMorph(R, R, lambda v: ScalarV(exp(v.x)))

    def constC(self, v, dom):
        return FnMorph(dom, shape_of(v), lambda _: v)


class Additive(_FunctionLike):
    """Additive functions: the function representation of linear maps."""

    name = "additive-function"
    morph = AddFun

    def inl(self, a, b):
        zb = zero(b)
        return AddFun(a, PairS(a, b), lambda v: PairV(v, zb))

    def inr(self, a, b):
        za = zero(a)
        return AddFun(b, PairS(a, b), lambda v: PairV(za, v))

    def jam(self, a):
        return AddFun(PairS(a, a), a, _jam)

    def join(self, f, g):
        if f.cod != g.cod:
            raise CompositionError(f"join needs a shared codomain, got {f.cod} and {g.cod}")
        ff, gf = f.fn, g.fn
        return AddFun(PairS(f.dom, g.dom), f.cod, lambda v: add(ff(v.left), gf(v.right)))

    def inI(self, n, a):
        z = zero(a)

        def inject(i):
            return lambda v: VecV(tuple(v if j == i else z for j in range(n)))

        return [AddFun(a, VecS(n, a), inject(i)) for i in range(n)]

    def hom_zero(self, a, b):
        z = zero(b)
        return AddFun(a, b, lambda v: z)

    def hom_add(self, f, g):
        if f.dom != g.dom or f.cod != g.cod:
            raise CompositionError(
                f"cannot add morphisms {f.dom} -> {f.cod} and {g.dom} -> {g.cod}"
            )
        ff, gf = f.fn, g.fn
        return AddFun(f.dom, f.cod, lambda v: add(ff(v), gf(v)))

    def hom_scale(self, s, f):
        ff = f.fn
        return AddFun(f.dom, f.cod, lambda v: scale_value(s, ff(v)))


FUN = Functions()
ADD = Additive()


def is_scalar(s: Shape) -> bool:
    return isinstance(s, ScalarS)


def is_unit(s: Shape) -> bool:
    return isinstance(s, UnitS)
