"""Structural "generalized matrices".

A :class:`LinMap` is a tree of blocks: 1x1 scalings, horizontal juxtaposition
(:class:`JoinL`, a map out of a pair), vertical juxtaposition (:class:`ForkL`,
a map into a pair), their n-ary versions over vectors, and compact
:class:`ZeroL` / :class:`IdL` leaves.  Composition is computed by block
algebra, never by materializing dense arrays; :func:`lm_to_dense` extracts the
matrix (rows are output coordinates, columns are input coordinates).

:func:`chain_order` is the classic interval DP for associating a chain of
matrix products; it is an analysis tool and the AD code never reassociates.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .category import Category, CompositionError, vec_parts, _same_shapes
from .shape import (
    PairS,
    PairV,
    R,
    ScalarS,
    ScalarV,
    Shape,
    UNIT,
    UnitS,
    Value,
    VecS,
    VecV,
    add,
    basis,
    check_conforms,
    dim,
    flatten,
    sum_values,
    zero,
)


class LinMap:
    """Base class; ``dom`` and ``cod`` are computed once at construction."""

    dom: Shape
    cod: Shape


@dataclass(frozen=True)
class ZeroL(LinMap):
    dom: Shape
    cod: Shape


@dataclass(frozen=True)
class IdL(LinMap):
    s: Shape
    dom: Shape = field(init=False, repr=False, compare=False)
    cod: Shape = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "dom", self.s)
        object.__setattr__(self, "cod", self.s)


@dataclass(frozen=True)
class ScaleL(LinMap):
    c: float
    dom: Shape = field(default=R, init=False, repr=False, compare=False)
    cod: Shape = field(default=R, init=False, repr=False, compare=False)


@dataclass(frozen=True)
class JoinL(LinMap):
    """``[f | g]``: maps ``(a, b)`` to ``f a + g b``."""

    f: LinMap
    g: LinMap
    dom: Shape = field(init=False, repr=False, compare=False)
    cod: Shape = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.f.cod != self.g.cod:
            raise CompositionError(
                f"JoinL blocks need equal codomains, got {self.f.cod} and {self.g.cod}"
            )
        object.__setattr__(self, "dom", PairS(self.f.dom, self.g.dom))
        object.__setattr__(self, "cod", self.f.cod)


@dataclass(frozen=True)
class ForkL(LinMap):
    """Vertical stack: maps ``a`` to ``(f a, g a)``."""

    f: LinMap
    g: LinMap
    dom: Shape = field(init=False, repr=False, compare=False)
    cod: Shape = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.f.dom != self.g.dom:
            raise CompositionError(
                f"ForkL blocks need equal domains, got {self.f.dom} and {self.g.dom}"
            )
        object.__setattr__(self, "dom", self.f.dom)
        object.__setattr__(self, "cod", PairS(self.f.cod, self.g.cod))


@dataclass(frozen=True)
class JoinIL(LinMap):
    fs: tuple
    dom: Shape = field(init=False, repr=False, compare=False)
    cod: Shape = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        fs = tuple(self.fs)
        object.__setattr__(self, "fs", fs)
        d, c = _same_shapes(fs, "JoinIL")
        object.__setattr__(self, "dom", VecS(len(fs), d))
        object.__setattr__(self, "cod", c)


@dataclass(frozen=True)
class ForkIL(LinMap):
    fs: tuple
    dom: Shape = field(init=False, repr=False, compare=False)
    cod: Shape = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        fs = tuple(self.fs)
        object.__setattr__(self, "fs", fs)
        d, c = _same_shapes(fs, "ForkIL")
        object.__setattr__(self, "dom", d)
        object.__setattr__(self, "cod", VecS(len(fs), c))


# --- application ---------------------------------------------------------------


def lm_apply(m: LinMap, v: Value) -> Value:
    check_conforms(v, m.dom)
    return _apply(m, v)


def _apply(m: LinMap, v: Value) -> Value:
    if isinstance(m, ZeroL):
        return zero(m.cod)
    if isinstance(m, IdL):
        return v
    if isinstance(m, ScaleL):
        return ScalarV(m.c * v.x)
    if isinstance(m, JoinL):
        return add(_apply(m.f, v.left), _apply(m.g, v.right))
    if isinstance(m, ForkL):
        return PairV(_apply(m.f, v), _apply(m.g, v))
    if isinstance(m, JoinIL):
        return sum_values([_apply(f, e) for f, e in zip(m.fs, v.elements)], m.cod)
    if isinstance(m, ForkIL):
        return VecV(tuple(_apply(f, v) for f in m.fs))
    raise TypeError(f"not a LinMap: {m!r}")


# --- block algebra -------------------------------------------------------------


def lm_compose(g: LinMap, f: LinMap) -> LinMap:
    """``g . f`` by block rewriting."""
    if g.dom != f.cod:
        raise CompositionError(
            f"cannot compose: inner map has codomain {f.cod}, outer has domain {g.dom}"
        )
    if isinstance(g, ZeroL) or isinstance(f, ZeroL):
        return ZeroL(f.dom, g.cod)
    if isinstance(g, IdL):
        return f
    if isinstance(f, IdL):
        return g
    if isinstance(g, ScaleL) and isinstance(f, ScaleL):
        return ScaleL(g.c * f.c)
    if isinstance(g, ForkL):
        return ForkL(lm_compose(g.f, f), lm_compose(g.g, f))
    if isinstance(g, ForkIL):
        return ForkIL(tuple(lm_compose(p, f) for p in g.fs))
    if isinstance(f, JoinL):
        return JoinL(lm_compose(g, f.f), lm_compose(g, f.g))
    if isinstance(f, JoinIL):
        return JoinIL(tuple(lm_compose(g, p) for p in f.fs))
    if isinstance(g, JoinL) and isinstance(f, ForkL):
        return lm_add(lm_compose(g.f, f.f), lm_compose(g.g, f.g))
    if isinstance(g, JoinIL) and isinstance(f, ForkIL):
        parts = [lm_compose(p, q) for p, q in zip(g.fs, f.fs)]
        acc = parts[0]
        for p in parts[1:]:
            acc = lm_add(acc, p)
        return acc
    raise TypeError(f"no composition rule for {type(g).__name__} . {type(f).__name__}")


def _expand_id(s: Shape) -> LinMap:
    """The identity written with blocks, one level deep."""
    if isinstance(s, ScalarS):
        return ScaleL(1.0)
    if isinstance(s, UnitS):
        return ZeroL(s, s)
    if isinstance(s, PairS):
        return ForkL(JoinL(IdL(s.left), ZeroL(s.right, s.left)), JoinL(ZeroL(s.left, s.right), IdL(s.right)))
    if isinstance(s, VecS):
        return ForkIL(
            tuple(
                JoinIL(tuple(IdL(s.elem) if j == i else ZeroL(s.elem, s.elem) for j in range(s.n)))
                for i in range(s.n)
            )
        )
    raise TypeError(f"not a shape: {s!r}")


def lm_add(f: LinMap, g: LinMap) -> LinMap:
    if f.dom != g.dom or f.cod != g.cod:
        raise CompositionError(
            f"cannot add maps {f.dom} -> {f.cod} and {g.dom} -> {g.cod}"
        )
    if isinstance(f, ZeroL):
        return g
    if isinstance(g, ZeroL):
        return f
    if isinstance(f, ScaleL) and isinstance(g, ScaleL):
        return ScaleL(f.c + g.c)
    if isinstance(f, IdL):
        return lm_add(_expand_id(f.s), g)
    if isinstance(g, IdL):
        return lm_add(f, _expand_id(g.s))
    if isinstance(f, ForkL) and isinstance(g, ForkL):
        return ForkL(lm_add(f.f, g.f), lm_add(f.g, g.g))
    if isinstance(f, ForkIL) and isinstance(g, ForkIL):
        return ForkIL(tuple(lm_add(p, q) for p, q in zip(f.fs, g.fs)))
    if isinstance(f, JoinL) and isinstance(g, JoinL):
        return JoinL(lm_add(f.f, g.f), lm_add(f.g, g.g))
    if isinstance(f, JoinIL) and isinstance(g, JoinIL):
        return JoinIL(tuple(lm_add(p, q) for p, q in zip(f.fs, g.fs)))
    # mixed layouts: rewrite one side into the other's outer form
    if isinstance(f, (ForkL, ForkIL)):
        return lm_add(f, _as_fork(g))
    if isinstance(g, (ForkL, ForkIL)):
        return lm_add(_as_fork(f), g)
    if isinstance(f, (JoinL, JoinIL)):
        return lm_add(f, _as_join(g))
    if isinstance(g, (JoinL, JoinIL)):
        return lm_add(_as_join(f), g)
    raise TypeError(f"no addition rule for {type(f).__name__} + {type(g).__name__}")


def _as_fork(m: LinMap) -> LinMap:
    if isinstance(m.cod, PairS):
        c, d = m.cod.left, m.cod.right
        return ForkL(lm_compose(lm_exl(c, d), m), lm_compose(lm_exr(c, d), m))
    n, a = vec_parts(m.cod, "fork layout")
    return ForkIL(tuple(lm_compose(p, m) for p in lm_exI(n, a)))


def _as_join(m: LinMap) -> LinMap:
    if isinstance(m.dom, PairS):
        a, b = m.dom.left, m.dom.right
        return JoinL(lm_compose(m, lm_inl(a, b)), lm_compose(m, lm_inr(a, b)))
    n, a = vec_parts(m.dom, "join layout")
    return JoinIL(tuple(lm_compose(m, p) for p in lm_inI(n, a)))


def lm_transpose(m: LinMap) -> LinMap:
    if isinstance(m, ZeroL):
        return ZeroL(m.cod, m.dom)
    if isinstance(m, (IdL, ScaleL)):
        return m
    if isinstance(m, JoinL):
        return ForkL(lm_transpose(m.f), lm_transpose(m.g))
    if isinstance(m, ForkL):
        return JoinL(lm_transpose(m.f), lm_transpose(m.g))
    if isinstance(m, JoinIL):
        return ForkIL(tuple(lm_transpose(f) for f in m.fs))
    if isinstance(m, ForkIL):
        return JoinIL(tuple(lm_transpose(f) for f in m.fs))
    raise TypeError(f"not a LinMap: {m!r}")


def lm_scale_map(s: float, m: LinMap) -> LinMap:
    """``s`` times the map ``m`` (hom-set scaling)."""
    if isinstance(m, ZeroL):
        return m
    if isinstance(m, IdL):
        return lm_scale_map(s, _expand_id(m.s)) if not isinstance(m.s, ScalarS) else ScaleL(s)
    if isinstance(m, ScaleL):
        return ScaleL(s * m.c)
    if isinstance(m, JoinL):
        return JoinL(lm_scale_map(s, m.f), lm_scale_map(s, m.g))
    if isinstance(m, ForkL):
        return ForkL(lm_scale_map(s, m.f), lm_scale_map(s, m.g))
    if isinstance(m, JoinIL):
        return JoinIL(tuple(lm_scale_map(s, f) for f in m.fs))
    if isinstance(m, ForkIL):
        return ForkIL(tuple(lm_scale_map(s, f) for f in m.fs))
    raise TypeError(f"not a LinMap: {m!r}")


# --- structural vocabulary -----------------------------------------------------


def lm_exl(a: Shape, b: Shape) -> LinMap:
    return JoinL(IdL(a), ZeroL(b, a))


def lm_exr(a: Shape, b: Shape) -> LinMap:
    return JoinL(ZeroL(a, b), IdL(b))


def lm_dup(a: Shape) -> LinMap:
    return ForkL(IdL(a), IdL(a))


def lm_inl(a: Shape, b: Shape) -> LinMap:
    return ForkL(IdL(a), ZeroL(a, b))


def lm_inr(a: Shape, b: Shape) -> LinMap:
    return ForkL(ZeroL(b, a), IdL(b))


def lm_jam(a: Shape) -> LinMap:
    return JoinL(IdL(a), IdL(a))


def lm_cross(f: LinMap, g: LinMap) -> LinMap:
    return ForkL(JoinL(f, ZeroL(g.dom, f.cod)), JoinL(ZeroL(f.dom, g.cod), g))


def lm_exI(n: int, a: Shape) -> list:
    return [JoinIL(tuple(IdL(a) if j == i else ZeroL(a, a) for j in range(n))) for i in range(n)]


def lm_inI(n: int, a: Shape) -> list:
    return [ForkIL(tuple(IdL(a) if j == i else ZeroL(a, a) for j in range(n))) for i in range(n)]


def lm_crossI(fs: Sequence[LinMap]) -> LinMap:
    d, c = _same_shapes(fs, "crossI")
    n = len(fs)
    return ForkIL(
        tuple(JoinIL(tuple(fs[i] if j == i else ZeroL(d, c) for j in range(n))) for i in range(n))
    )


# --- dense matrices ------------------------------------------------------------


def lm_to_dense(m: LinMap) -> np.ndarray:
    """Matrix with column ``i`` equal to ``flatten(m(basis(dom)[i]))``."""
    rows, cols = dim(m.cod), dim(m.dom)
    out = np.zeros((rows, cols))
    for i, e in enumerate(basis(m.dom)):
        out[:, i] = flatten(_apply(m, e))
    assert out.shape == (dim(m.cod), dim(m.dom))
    return out


def lm_from_dense(mat, dom: Shape, cod: Shape) -> LinMap:
    """Block form of a dense ``dim(cod) x dim(dom)`` matrix."""
    mat = np.asarray(mat, dtype=float).reshape(dim(cod), dim(dom))
    return _from_dense(mat, dom, cod)


def _from_dense(mat: np.ndarray, dom: Shape, cod: Shape) -> LinMap:
    if mat.size == 0 or not mat.any():
        return ZeroL(dom, cod)
    if isinstance(cod, PairS):
        k = dim(cod.left)
        return ForkL(_from_dense(mat[:k], dom, cod.left), _from_dense(mat[k:], dom, cod.right))
    if isinstance(cod, VecS):
        k = dim(cod.elem)
        return ForkIL(
            tuple(_from_dense(mat[i * k:(i + 1) * k], dom, cod.elem) for i in range(cod.n))
        )
    if isinstance(dom, PairS):
        k = dim(dom.left)
        return JoinL(_from_dense(mat[:, :k], dom.left, cod), _from_dense(mat[:, k:], dom.right, cod))
    if isinstance(dom, VecS):
        k = dim(dom.elem)
        return JoinIL(
            tuple(_from_dense(mat[:, i * k:(i + 1) * k], dom.elem, cod) for i in range(dom.n))
        )
    return ScaleL(float(mat[0, 0]))


def format_dense(mat: np.ndarray) -> str:
    """Rows on separate lines, entries space-separated, 17 significant digits."""
    return "\n".join(" ".join(f"{float(x):.17g}" for x in row) for row in np.atleast_2d(mat))


# --- the LinMap category -------------------------------------------------------


class Matrices(Category):
    """Structural matrices as a category."""

    name = "linear-map"

    def id(self, s):
        return IdL(s)

    def compose(self, g, f):
        return lm_compose(g, f)

    def cross(self, f, g):
        return lm_cross(f, g)

    def fork(self, f, g):
        return ForkL(f, g)

    def join(self, f, g):
        return JoinL(f, g)

    def exl(self, a, b):
        return lm_exl(a, b)

    def exr(self, a, b):
        return lm_exr(a, b)

    def dup(self, a):
        return lm_dup(a)

    def inl(self, a, b):
        return lm_inl(a, b)

    def inr(self, a, b):
        return lm_inr(a, b)

    def jam(self, a):
        return lm_jam(a)

    def it(self, a):
        return ZeroL(a, UNIT)

    def ti(self, a):
        return ZeroL(UNIT, a)

    def scale(self, c):
        return ScaleL(c)

    def negateC(self):
        return ScaleL(-1.0)

    def addC(self):
        return JoinL(ScaleL(1.0), ScaleL(1.0))

    def crossI(self, fs):
        return lm_crossI(fs)

    def exI(self, n, a):
        return lm_exI(n, a)

    def replI(self, n, a):
        return ForkIL((IdL(a),) * n)

    def inI(self, n, a):
        return lm_inI(n, a)

    def jamI(self, n, a):
        return JoinIL((IdL(a),) * n)

    def forkI(self, fs):
        return ForkIL(tuple(fs))

    def joinI(self, fs):
        return JoinIL(tuple(fs))

    def hom_zero(self, a, b):
        return ZeroL(a, b)

    def hom_add(self, f, g):
        return lm_add(f, g)

    def apply(self, m, v):
        return lm_apply(m, v)

    def lift(self, dom, cod, fn):
        cols = [flatten(fn(e)) for e in basis(dom)]
        mat = np.array(cols, dtype=float).T if cols else np.zeros((dim(cod), 0))
        return lm_from_dense(mat, dom, cod)


MAT = Matrices()


# --- matrix-chain association --------------------------------------------------


def chain_order(dims: Sequence[int]):
    """Cheapest association of a product of ``len(dims) - 1`` matrices.

    Matrix ``i`` (1-based) is ``dims[i-1] x dims[i]``.  Returns
    ``(cost, tree)`` where ``tree`` is a matrix index or a nested pair of
    subtrees; ties go to the smallest split point.
    """
    dims = [int(d) for d in dims]
    n = len(dims) - 1
    if n < 1:
        raise ValueError("empty matrix chain: need at least two dimensions")
    if any(d < 1 for d in dims):
        raise ValueError(f"matrix dimensions must be positive, got {dims}")
    cost = [[0] * (n + 1) for _ in range(n + 1)]
    split = [[0] * (n + 1) for _ in range(n + 1)]
    for length in range(2, n + 1):
        for i in range(1, n - length + 2):
            j = i + length - 1
            best = None
            for k in range(i, j):
                c = cost[i][k] + cost[k + 1][j] + dims[i - 1] * dims[k] * dims[j]
                if best is None or c < best:
                    best, split[i][j] = c, k
            cost[i][j] = best

    def tree(i, j):
        if i == j:
            return i
        k = split[i][j]
        return (tree(i, k), tree(k + 1, j))

    return cost[1][n], tree(1, n)


def chain_cost(dims: Sequence[int], tree) -> int:
    """Scalar multiplications used by a given association ``tree``."""

    def walk(t):
        if isinstance(t, int):
            return dims[t - 1], dims[t], 0
        r1, c1, k1 = walk(t[0])
        r2, c2, k2 = walk(t[1])
        assert c1 == r2
        return r1, c2, k1 + k2 + r1 * c1 * c2

    return walk(tree)[2]


def all_associations(lo: int, hi: int):
    """Every binary bracketing of matrices ``lo..hi`` (Catalan many)."""
    if lo == hi:
        yield lo
        return
    for k in range(lo, hi):
        for left in all_associations(lo, k):
            for right in all_associations(k + 1, hi):
                yield (left, right)


def format_chain(tree) -> str:
    if isinstance(tree, int):
        return f"A{tree}"
    return f"({format_chain(tree[0])} {format_chain(tree[1])})"
