"""Derivative representations that fix the association of chain products.

* :class:`Cont` (continuation transformer): a morphism ``a -> b`` is carried
  as a transformer of continuations ``(b -> r) -> (a -> r)``.  Composition
  becomes left association, which is reverse mode.
* :class:`Dual`: a morphism ``a -> b`` is carried as its transpose
  ``b -> a``.  With additive functions underneath this is reverse mode with no
  matrices at all.
* :class:`Begin`: ``(r -> a) -> (r -> b)``, right association, forward mode.

All three are built over a base linear category ``k`` (usually :data:`ADD`).
The module also contains ``dot``/``undot`` and Jacobian extraction for every
derivative representation.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from .category import (
    ADD,
    Category,
    CompositionError,
    FnMorph,
    Morph,
    _same_shapes,
    check_composable,
)
from .gad import DFun, eval_d
from .linmap import LinMap, lm_to_dense
from .shape import (
    PairS,
    PairV,
    R,
    ScalarV,
    Shape,
    ShapeError,
    UNIT,
    UnitV,
    Value,
    VecS,
    VecV,
    basis,
    dim,
    flatten,
    scale_value,
    unflatten,
)


class ModeError(ValueError):
    """The requested differentiation mode does not apply (e.g. non-scalar codomain)."""


# --- continuations -------------------------------------------------------------


class ContMorph(Morph):
    """``trans: k(cod -> r) -> k(dom -> r)``."""

    __slots__ = ("r", "trans", "base")

    def __init__(self, dom, cod, r, trans, base):
        super().__init__(dom, cod)
        self.r = r
        self.trans = trans
        self.base = base


class Cont(Category):
    def __init__(self, k: Category = ADD, r: Shape = R):
        self.k = k
        self.r = r
        self.name = f"Cont[{k.name}, {r}]"

    def _c(self, dom, cod, trans):
        return ContMorph(dom, cod, self.r, trans, self.k)

    def wrap(self, f) -> ContMorph:
        k = self.k
        return self._c(f.dom, f.cod, lambda h: k.compose(h, f))

    def id(self, s):
        return self._c(s, s, lambda h: h)

    def compose(self, g, f):
        check_composable(g, f)
        gt, ft = g.trans, f.trans
        return self._c(f.dom, g.cod, lambda h: ft(gt(h)))

    def cross(self, f, g):
        k = self.k
        ft, gt = f.trans, g.trans

        def trans(h):
            hl, hr = k.unjoin(h)
            return k.join(ft(hl), gt(hr))

        return self._c(PairS(f.dom, g.dom), PairS(f.cod, g.cod), trans)

    def fork(self, f, g):
        if f.dom != g.dom:
            raise CompositionError(f"fork needs a shared domain, got {f.dom} and {g.dom}")
        k = self.k
        ft, gt = f.trans, g.trans

        def trans(h):
            hl, hr = k.unjoin(h)
            return k.hom_add(ft(hl), gt(hr))

        return self._c(f.dom, PairS(f.cod, g.cod), trans)

    def join(self, f, g):
        if f.cod != g.cod:
            raise CompositionError(f"join needs a shared codomain, got {f.cod} and {g.cod}")
        k = self.k
        ft, gt = f.trans, g.trans
        return self._c(PairS(f.dom, g.dom), f.cod, lambda h: k.join(ft(h), gt(h)))

    def exl(self, a, b):
        k, r = self.k, self.r
        return self._c(PairS(a, b), a, lambda h: k.join(h, k.hom_zero(b, r)))

    def exr(self, a, b):
        k, r = self.k, self.r
        return self._c(PairS(a, b), b, lambda h: k.join(k.hom_zero(a, r), h))

    def dup(self, a):
        k = self.k
        return self._c(a, PairS(a, a), lambda h: k.hom_add(*k.unjoin(h)))

    def inl(self, a, b):
        k = self.k
        return self._c(a, PairS(a, b), lambda h: k.unjoin(h)[0])

    def inr(self, a, b):
        k = self.k
        return self._c(b, PairS(a, b), lambda h: k.unjoin(h)[1])

    def jam(self, a):
        k = self.k
        return self._c(PairS(a, a), a, lambda h: k.join(h, h))

    def it(self, a):
        k, r = self.k, self.r
        return self._c(a, UNIT, lambda h: k.hom_zero(a, r))

    def ti(self, a):
        k, r = self.k, self.r
        return self._c(UNIT, a, lambda h: k.hom_zero(UNIT, r))

    def scale(self, c):
        k = self.k
        return self._c(R, R, lambda h: k.compose(h, k.scale(c)))

    def negateC(self):
        k = self.k
        return self._c(R, R, lambda h: k.compose(h, k.negateC()))

    def addC(self):
        return self.jam(R)

    def hom_zero(self, a, b):
        k, r = self.k, self.r
        return self._c(a, b, lambda h: k.hom_zero(a, r))

    def hom_add(self, f, g):
        if f.dom != g.dom or f.cod != g.cod:
            raise CompositionError(f"cannot add morphisms {f.dom} -> {f.cod} and {g.dom} -> {g.cod}")
        k = self.k
        ft, gt = f.trans, g.trans
        return self._c(f.dom, f.cod, lambda h: k.hom_add(ft(h), gt(h)))

    # indexed
    def crossI(self, fs):
        dom, cod = _same_shapes(fs, "crossI")
        k, n = self.k, len(fs)
        ts = [f.trans for f in fs]

        def trans(h):
            injs = k.inI(n, cod)
            return k.joinI([t(k.compose(h, j)) for t, j in zip(ts, injs)])

        return self._c(VecS(n, dom), VecS(n, cod), trans)

    def exI(self, n, a):
        k, r = self.k, self.r

        def proj(i):
            def trans(h):
                z = k.hom_zero(a, r)
                return k.joinI([h if j == i else z for j in range(n)])

            return self._c(VecS(n, a), a, trans)

        return [proj(i) for i in range(n)]

    def replI(self, n, a):
        k = self.k
        return self._c(a, VecS(n, a), lambda h: k.hom_sum([k.compose(h, j) for j in k.inI(n, a)]))

    def inI(self, n, a):
        k = self.k
        return [
            self._c(a, VecS(n, a), (lambda i: lambda h: k.compose(h, k.inI(n, a)[i]))(i))
            for i in range(n)
        ]

    def jamI(self, n, a):
        k = self.k
        return self._c(VecS(n, a), a, lambda h: k.joinI([h] * n))

    def forkI(self, fs):
        dom, cod = _same_shapes(fs, "forkI")
        k, n = self.k, len(fs)
        ts = [f.trans for f in fs]

        def trans(h):
            injs = k.inI(n, cod)
            return k.hom_sum([t(k.compose(h, j)) for t, j in zip(ts, injs)])

        return self._c(dom, VecS(n, cod), trans)

    def joinI(self, fs):
        dom, cod = _same_shapes(fs, "joinI")
        k = self.k
        ts = [f.trans for f in fs]
        return self._c(VecS(len(fs), dom), cod, lambda h: k.joinI([t(h) for t in ts]))

    def lift(self, dom, cod, fn):
        return self.wrap(self.k.lift(dom, cod, fn))


def cont_wrap(f, k: Category = ADD, r: Shape = R) -> ContMorph:
    return Cont(k, r).wrap(f)


# --- duals ---------------------------------------------------------------------


class DualMorph(Morph):
    """A map ``dom -> cod`` stored as its transpose ``rev: cod -> dom``."""

    __slots__ = ("rev",)

    def __init__(self, dom, cod, rev):
        super().__init__(dom, cod)
        self.rev = rev


def _d(rev) -> DualMorph:
    return DualMorph(rev.cod, rev.dom, rev)


class Dual(Category):
    def __init__(self, k: Category = ADD):
        self.k = k
        self.name = f"Dual[{k.name}]"

    def id(self, s):
        return _d(self.k.id(s))

    def compose(self, g, f):
        check_composable(g, f)
        return _d(self.k.compose(f.rev, g.rev))

    def cross(self, f, g):
        return _d(self.k.cross(f.rev, g.rev))

    def fork(self, f, g):
        if f.dom != g.dom:
            raise CompositionError(f"fork needs a shared domain, got {f.dom} and {g.dom}")
        return _d(self.k.join(f.rev, g.rev))

    def join(self, f, g):
        if f.cod != g.cod:
            raise CompositionError(f"join needs a shared codomain, got {f.cod} and {g.cod}")
        return _d(self.k.fork(f.rev, g.rev))

    def exl(self, a, b):
        return _d(self.k.inl(a, b))

    def exr(self, a, b):
        return _d(self.k.inr(a, b))

    def dup(self, a):
        return _d(self.k.jam(a))

    def inl(self, a, b):
        return _d(self.k.exl(a, b))

    def inr(self, a, b):
        return _d(self.k.exr(a, b))

    def jam(self, a):
        return _d(self.k.dup(a))

    def it(self, a):
        return _d(self.k.ti(a))

    def ti(self, a):
        return _d(self.k.it(a))

    def scale(self, c):
        return _d(self.k.scale(c))

    def negateC(self):
        return _d(self.k.negateC())

    def addC(self):
        return _d(self.k.dup(R))

    def hom_zero(self, a, b):
        return _d(self.k.hom_zero(b, a))

    def hom_add(self, f, g):
        return _d(self.k.hom_add(f.rev, g.rev))

    def crossI(self, fs):
        return _d(self.k.crossI([f.rev for f in fs]))

    def exI(self, n, a):
        return [_d(m) for m in self.k.inI(n, a)]

    def replI(self, n, a):
        return _d(self.k.jamI(n, a))

    def inI(self, n, a):
        return [_d(m) for m in self.k.exI(n, a)]

    def jamI(self, n, a):
        return _d(self.k.replI(n, a))

    def forkI(self, fs):
        return _d(self.k.joinI([f.rev for f in fs]))

    def joinI(self, fs):
        return _d(self.k.forkI([f.rev for f in fs]))

    def apply(self, m, v):
        return transpose_fn(m.rev)(v)

    def lift(self, dom, cod, fn):
        return _d(self.k.lift(cod, dom, transpose_fn_raw(fn, dom, cod)))


# --- forward (begin) -----------------------------------------------------------


class BeginMorph(Morph):
    """``trans: k(r -> dom) -> k(r -> cod)``."""

    __slots__ = ("r", "trans", "base")

    def __init__(self, dom, cod, r, trans, base):
        super().__init__(dom, cod)
        self.r = r
        self.trans = trans
        self.base = base


class Begin(Category):
    def __init__(self, k: Category = ADD, r: Shape = R):
        self.k = k
        self.r = r
        self.name = f"Begin[{k.name}, {r}]"

    def _b(self, dom, cod, trans):
        return BeginMorph(dom, cod, self.r, trans, self.k)

    def wrap(self, f) -> BeginMorph:
        k = self.k
        return self._b(f.dom, f.cod, lambda h: k.compose(f, h))

    def id(self, s):
        return self._b(s, s, lambda h: h)

    def compose(self, g, f):
        check_composable(g, f)
        gt, ft = g.trans, f.trans
        return self._b(f.dom, g.cod, lambda h: gt(ft(h)))

    def cross(self, f, g):
        k = self.k
        ft, gt = f.trans, g.trans

        def trans(h):
            hl, hr = k.unfork(h)
            return k.fork(ft(hl), gt(hr))

        return self._b(PairS(f.dom, g.dom), PairS(f.cod, g.cod), trans)

    def fork(self, f, g):
        if f.dom != g.dom:
            raise CompositionError(f"fork needs a shared domain, got {f.dom} and {g.dom}")
        k = self.k
        ft, gt = f.trans, g.trans
        return self._b(f.dom, PairS(f.cod, g.cod), lambda h: k.fork(ft(h), gt(h)))

    def join(self, f, g):
        if f.cod != g.cod:
            raise CompositionError(f"join needs a shared codomain, got {f.cod} and {g.cod}")
        k = self.k
        ft, gt = f.trans, g.trans

        def trans(h):
            hl, hr = k.unfork(h)
            return k.hom_add(ft(hl), gt(hr))

        return self._b(PairS(f.dom, g.dom), f.cod, trans)

    def exl(self, a, b):
        k = self.k
        return self._b(PairS(a, b), a, lambda h: k.unfork(h)[0])

    def exr(self, a, b):
        k = self.k
        return self._b(PairS(a, b), b, lambda h: k.unfork(h)[1])

    def dup(self, a):
        k = self.k
        return self._b(a, PairS(a, a), lambda h: k.fork(h, h))

    def inl(self, a, b):
        k, r = self.k, self.r
        return self._b(a, PairS(a, b), lambda h: k.fork(h, k.hom_zero(r, b)))

    def inr(self, a, b):
        k, r = self.k, self.r
        return self._b(b, PairS(a, b), lambda h: k.fork(k.hom_zero(r, a), h))

    def jam(self, a):
        k = self.k
        return self._b(PairS(a, a), a, lambda h: k.hom_add(*k.unfork(h)))

    def it(self, a):
        k, r = self.k, self.r
        return self._b(a, UNIT, lambda h: k.hom_zero(r, UNIT))

    def ti(self, a):
        k, r = self.k, self.r
        return self._b(UNIT, a, lambda h: k.hom_zero(r, a))

    def scale(self, c):
        k = self.k
        return self._b(R, R, lambda h: k.compose(k.scale(c), h))

    def negateC(self):
        k = self.k
        return self._b(R, R, lambda h: k.compose(k.negateC(), h))

    def addC(self):
        return self.jam(R)

    def hom_zero(self, a, b):
        k, r = self.k, self.r
        return self._b(a, b, lambda h: k.hom_zero(r, b))

    def hom_add(self, f, g):
        if f.dom != g.dom or f.cod != g.cod:
            raise CompositionError(f"cannot add morphisms {f.dom} -> {f.cod} and {g.dom} -> {g.cod}")
        k = self.k
        ft, gt = f.trans, g.trans
        return self._b(f.dom, f.cod, lambda h: k.hom_add(ft(h), gt(h)))

    # indexed
    def crossI(self, fs):
        dom, cod = _same_shapes(fs, "crossI")
        k, n = self.k, len(fs)
        ts = [f.trans for f in fs]

        def trans(h):
            projs = k.exI(n, dom)
            return k.forkI([t(k.compose(p, h)) for t, p in zip(ts, projs)])

        return self._b(VecS(n, dom), VecS(n, cod), trans)

    def exI(self, n, a):
        k = self.k
        return [
            self._b(VecS(n, a), a, (lambda i: lambda h: k.compose(k.exI(n, a)[i], h))(i))
            for i in range(n)
        ]

    def replI(self, n, a):
        k = self.k
        return self._b(a, VecS(n, a), lambda h: k.forkI([h] * n))

    def inI(self, n, a):
        k, r = self.k, self.r

        def inj(i):
            def trans(h):
                z = k.hom_zero(r, a)
                return k.forkI([h if j == i else z for j in range(n)])

            return self._b(a, VecS(n, a), trans)

        return [inj(i) for i in range(n)]

    def jamI(self, n, a):
        k = self.k
        return self._b(VecS(n, a), a, lambda h: k.hom_sum([k.compose(p, h) for p in k.exI(n, a)]))

    def forkI(self, fs):
        dom, cod = _same_shapes(fs, "forkI")
        k = self.k
        ts = [f.trans for f in fs]
        return self._b(dom, VecS(len(fs), cod), lambda h: k.forkI([t(h) for t in ts]))

    def joinI(self, fs):
        dom, cod = _same_shapes(fs, "joinI")
        k, n = self.k, len(fs)
        ts = [f.trans for f in fs]

        def trans(h):
            projs = k.exI(n, dom)
            return k.hom_sum([t(k.compose(p, h)) for t, p in zip(ts, projs)])

        return self._b(VecS(n, dom), cod, trans)

    def lift(self, dom, cod, fn):
        return self.wrap(self.k.lift(dom, cod, fn))


def begin_wrap(f, k: Category = ADD, r: Shape = R) -> BeginMorph:
    return Begin(k, r).wrap(f)


# --- dot products as linear functionals -----------------------------------------


def dot(u: Value, k: Category = ADD):
    """The functional ``v -> <u, v>`` as a ``k``-morphism into ``R``."""
    if isinstance(u, ScalarV):
        return k.scale(u.x)
    if isinstance(u, PairV):
        return k.join(dot(u.left, k), dot(u.right, k))
    if isinstance(u, VecV):
        return k.joinI([dot(e, k) for e in u.elements])
    if isinstance(u, UnitV):
        return k.hom_zero(UNIT, R)
    raise TypeError(f"not a value: {u!r}")


def undot(m, k: Category = ADD) -> Value:
    """Inverse of :func:`dot`, by applying ``m`` to each basis vector."""
    if m.cod != R:
        raise ShapeError(f"undot needs a functional into R, got codomain {m.cod}")
    return unflatten(m.dom, [k.apply(m, e).x for e in basis(m.dom)])


def as_dual(c: ContMorph) -> DualMorph:
    """Turn a scalar-result continuation into its transpose."""
    if c.r != R:
        raise ModeError(f"as_dual needs a scalar result object, got {c.r}")
    k, trans = c.base, c.trans
    return DualMorph(c.dom, c.cod, k.lift(c.cod, c.dom, lambda w: undot(trans(dot(w, k)), k)))


# --- dense extraction -----------------------------------------------------------


def apply_linear(m, v: Value) -> Value:
    """Apply any runnable linear representation."""
    if isinstance(m, LinMap):
        from .linmap import lm_apply

        return lm_apply(m, v)
    if isinstance(m, FnMorph):
        return m.fn(v)
    if isinstance(m, (DualMorph, ContMorph, BeginMorph)):
        return unflatten(m.cod, to_dense(m) @ np.asarray(flatten(v), dtype=float))
    raise TypeError(f"cannot apply {m!r}")


def transpose_fn(m):
    """The transpose of the runnable linear map ``m`` as a plain callable."""
    return transpose_fn_raw(lambda v: apply_linear(m, v), m.dom, m.cod)


def transpose_fn_raw(fn: Callable[[Value], Value], dom: Shape, cod: Shape):
    cols = [flatten(fn(e)) for e in basis(dom)]
    mat = np.array(cols, dtype=float).reshape(dim(dom), dim(cod))  # row j = fn(e_j)
    return lambda w: unflatten(dom, mat @ np.asarray(flatten(w), dtype=float))


def to_dense(m) -> np.ndarray:
    """Dense ``dim(cod) x dim(dom)`` matrix of any derivative representation."""
    rows, cols = dim(m.cod), dim(m.dom)
    if isinstance(m, LinMap):
        return lm_to_dense(m)
    if isinstance(m, FnMorph):
        out = np.zeros((rows, cols))
        for j, e in enumerate(basis(m.dom)):
            out[:, j] = flatten(m.fn(e))
        return out
    if isinstance(m, DualMorph):
        return to_dense(m.rev).T.reshape(rows, cols)
    if isinstance(m, ContMorph):
        if m.r != R:
            raise ModeError(f"dense extraction from a continuation needs r = R, got {m.r}")
        k = m.base
        out = np.zeros((rows, cols))
        for i, e in enumerate(basis(m.cod)):
            out[i, :] = flatten(undot(m.trans(dot(e, k)), k))
        return out
    if isinstance(m, BeginMorph):
        if m.r != R:
            raise ModeError(f"dense extraction from a forward map needs r = R, got {m.r}")
        k = m.base
        out = np.zeros((rows, cols))
        one = ScalarV(1.0)
        for j, e in enumerate(basis(m.dom)):
            h = k.lift(R, m.dom, (lambda e: lambda s: scale_value(s.x, e))(e))
            out[:, j] = flatten(k.apply(m.trans(h), one))
        return out
    raise TypeError(f"no dense form for {m!r}")


def jacobian(f: DFun, a: Value) -> np.ndarray:
    """Dense Jacobian of ``f`` at ``a``, whatever its derivative representation."""
    return to_dense(eval_d(f, a)[1])


def forward_jacobian(f: DFun, a: Value) -> np.ndarray:
    d = eval_d(f, a)[1]
    if not isinstance(d, (BeginMorph, FnMorph, LinMap)):
        raise ModeError("forward extraction needs a forward or additive derivative")
    return to_dense(d)


def reverse_jacobian(f: DFun, a: Value) -> np.ndarray:
    d = eval_d(f, a)[1]
    if not isinstance(d, (ContMorph, DualMorph)):
        raise ModeError("reverse extraction needs a continuation or dual derivative")
    return to_dense(d)


def gradient(f: DFun, a: Value) -> Value:
    """Gradient of a scalar-valued DFun at ``a``, as a value shaped like the domain."""
    if f.cod != R:
        raise ModeError(f"gradient needs a scalar codomain, got {f.cod}")
    d = eval_d(f, a)[1]
    if isinstance(d, DualMorph):
        return apply_linear(d.rev, ScalarV(1.0))
    if isinstance(d, ContMorph):
        return undot(d.trans(dot(ScalarV(1.0), d.base)), d.base)
    return unflatten(f.dom, to_dense(d)[0])


__all__ = [
    "ModeError",
    "ContMorph",
    "Cont",
    "cont_wrap",
    "DualMorph",
    "Dual",
    "BeginMorph",
    "Begin",
    "begin_wrap",
    "dot",
    "undot",
    "as_dual",
    "to_dense",
    "jacobian",
    "forward_jacobian",
    "reverse_jacobian",
    "gradient",
    "apply_linear",
]
