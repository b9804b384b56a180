"""Categorical terms: translation from the surface language, normalization,
printing and interpretation in any :class:`~catgrad.category.Category`.

Translation is environment passing.  The context of a subexpression is the
(extended) parameter pattern; a variable becomes the projection path to its
position in that pattern, and ``let`` extends the context with
``id △ bound``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from ..shape import PairS, R, ScalarV, Shape, ShapeError, UNIT, VecS, Value, flatten, shape_of
from .check import bind_pattern
from .syntax import (
    Add,
    Cos,
    Exp,
    Fst,
    Idx,
    Let,
    Lit,
    Mul,
    Neg,
    PairE,
    PPair,
    PVar,
    PVec,
    Sin,
    Snd,
    SumE,
    Var,
    VecE,
)


class CatTerm:
    """Base of categorical terms; every node exposes ``dom`` and ``cod``."""

    dom: Shape
    cod: Shape


@dataclass(frozen=True)
class IdT(CatTerm):
    s: Shape

    @property
    def dom(self):
        return self.s

    @property
    def cod(self):
        return self.s


@dataclass(frozen=True)
class ComposeT(CatTerm):
    g: CatTerm
    f: CatTerm

    def __post_init__(self):
        if self.g.dom != self.f.cod:
            raise ShapeError(
                f"ill-composed term: {self.f.cod} does not match {self.g.dom}"
            )

    @property
    def dom(self):
        return self.f.dom

    @property
    def cod(self):
        return self.g.cod


@dataclass(frozen=True)
class CrossT(CatTerm):
    f: CatTerm
    g: CatTerm

    @property
    def dom(self):
        return PairS(self.f.dom, self.g.dom)

    @property
    def cod(self):
        return PairS(self.f.cod, self.g.cod)


@dataclass(frozen=True)
class ForkT(CatTerm):
    f: CatTerm
    g: CatTerm

    def __post_init__(self):
        if self.f.dom != self.g.dom:
            raise ShapeError(f"ill-formed fork: {self.f.dom} vs {self.g.dom}")

    @property
    def dom(self):
        return self.f.dom

    @property
    def cod(self):
        return PairS(self.f.cod, self.g.cod)


@dataclass(frozen=True)
class ExlT(CatTerm):
    a: Shape
    b: Shape

    @property
    def dom(self):
        return PairS(self.a, self.b)

    @property
    def cod(self):
        return self.a


@dataclass(frozen=True)
class ExrT(CatTerm):
    a: Shape
    b: Shape

    @property
    def dom(self):
        return PairS(self.a, self.b)

    @property
    def cod(self):
        return self.b


@dataclass(frozen=True)
class DupT(CatTerm):
    a: Shape

    @property
    def dom(self):
        return self.a

    @property
    def cod(self):
        return PairS(self.a, self.a)


@dataclass(frozen=True)
class ItT(CatTerm):
    a: Shape

    @property
    def dom(self):
        return self.a

    @property
    def cod(self):
        return UNIT


class _Binary(CatTerm):
    dom = PairS(R, R)
    cod = R


class _Unary(CatTerm):
    dom = R
    cod = R


@dataclass(frozen=True)
class AddCT(_Binary):
    pass


@dataclass(frozen=True)
class MulCT(_Binary):
    pass


@dataclass(frozen=True)
class NegCT(_Unary):
    pass


@dataclass(frozen=True)
class SinCT(_Unary):
    pass


@dataclass(frozen=True)
class CosCT(_Unary):
    pass


@dataclass(frozen=True)
class ExpCT(_Unary):
    pass


@dataclass(frozen=True)
class ConstT(CatTerm):
    value: Value
    src: Shape

    @property
    def dom(self):
        return self.src

    @property
    def cod(self):
        return shape_of(self.value)


@dataclass(frozen=True)
class CrossIT(CatTerm):
    fs: tuple

    @property
    def dom(self):
        return VecS(len(self.fs), self.fs[0].dom)

    @property
    def cod(self):
        return VecS(len(self.fs), self.fs[0].cod)


@dataclass(frozen=True)
class ForkIT(CatTerm):
    fs: tuple

    def __post_init__(self):
        if not self.fs or any(f.dom != self.fs[0].dom for f in self.fs):
            raise ShapeError("ill-formed forkI")

    @property
    def dom(self):
        return self.fs[0].dom

    @property
    def cod(self):
        return VecS(len(self.fs), self.fs[0].cod)


@dataclass(frozen=True)
class ExIT(CatTerm):
    i: int
    n: int
    a: Shape

    @property
    def dom(self):
        return VecS(self.n, self.a)

    @property
    def cod(self):
        return self.a


@dataclass(frozen=True)
class ReplIT(CatTerm):
    n: int
    a: Shape

    @property
    def dom(self):
        return self.a

    @property
    def cod(self):
        return VecS(self.n, self.a)


@dataclass(frozen=True)
class JamIT(CatTerm):
    n: int
    a: Shape

    @property
    def dom(self):
        return VecS(self.n, self.a)

    @property
    def cod(self):
        return self.a


_UNARY_T = {Neg: NegCT, Sin: SinCT, Cos: CosCT, Exp: ExpCT}


# --- translation ------------------------------------------------------------------


def _path(p, name: str, s: Shape) -> Optional[CatTerm]:
    """Projection from a context of shape ``s`` (matching ``p``) to variable ``name``."""
    if isinstance(p, PVar):
        return IdT(s) if p.name == name else None
    if isinstance(p, PPair):
        # right first, so a let-bound name shadows anything in the outer context
        for sub, proj in ((p.right, ExrT(s.left, s.right)), (p.left, ExlT(s.left, s.right))):
            inner = _path(sub, name, proj.cod)
            if inner is not None:
                return _then(inner, proj)
        return None
    if isinstance(p, PVec):
        for i, sub in enumerate(p.items):
            inner = _path(sub, name, s.elem)
            if inner is not None:
                return _then(inner, ExIT(i, s.n, s.elem))
        return None
    return None


def _then(g: CatTerm, f: CatTerm) -> CatTerm:
    return f if isinstance(g, IdT) else ComposeT(g, f)


def to_cat(p, e, arg_shape: Shape, normal: bool = True) -> CatTerm:
    """Translate ``\\p -> e`` at argument shape ``arg_shape``; normalized by default."""
    t = _tr(p, arg_shape, bind_pattern(p, arg_shape), e)
    return normalize(t) if normal else t


def _tr(p, s: Shape, env: dict, e) -> CatTerm:
    if isinstance(e, Var):
        t = _path(p, e.name, s)
        if t is None:
            raise ShapeError(f"variable {e.name!r} is not in the context")
        return t
    if isinstance(e, Lit):
        return ConstT(ScalarV(float(e.value)), s)
    if isinstance(e, PairE):
        return ForkT(_tr(p, s, env, e.left), _tr(p, s, env, e.right))
    if isinstance(e, (Fst, Snd)):
        c = _tr(p, s, env, e.arg)
        a, b = c.cod.left, c.cod.right
        return ComposeT(ExlT(a, b) if isinstance(e, Fst) else ExrT(a, b), c)
    if isinstance(e, tuple(_UNARY_T)):
        return ComposeT(_UNARY_T[type(e)](), _tr(p, s, env, e.arg))
    if isinstance(e, (Add, Mul)):
        op = AddCT() if isinstance(e, Add) else MulCT()
        return ComposeT(op, ForkT(_tr(p, s, env, e.left), _tr(p, s, env, e.right)))
    if isinstance(e, Let):
        bound = _tr(p, s, env, e.bound)
        xs = bound.cod
        ctx = PPair(p, PVar(e.name))
        body = _tr(ctx, PairS(s, xs), {**env, e.name: xs}, e.body)
        return ComposeT(body, ForkT(IdT(s), bound))
    if isinstance(e, VecE):
        return ForkIT(tuple(_tr(p, s, env, i) for i in e.items))
    if isinstance(e, Idx):
        c = _tr(p, s, env, e.arg)
        return ComposeT(ExIT(e.index, c.cod.n, c.cod.elem), c)
    if isinstance(e, SumE):
        c = _tr(p, s, env, e.arg)
        return ComposeT(JamIT(c.cod.n, c.cod.elem), c)
    raise TypeError(f"not an expression: {e!r}")


# --- normalization ----------------------------------------------------------------


def _chain(t: CatTerm) -> list:
    """Factors of a composition, outermost first, with identities dropped."""
    if isinstance(t, ComposeT):
        return _chain(t.g) + _chain(t.f)
    if isinstance(t, IdT):
        return []
    return [t]


def _build(fs: list, dom: Shape) -> CatTerm:
    if not fs:
        return IdT(dom)
    acc = fs[-1]
    for g in reversed(fs[:-1]):
        acc = ComposeT(g, acc)
    return acc


def _step_pair(g: CatTerm, f: CatTerm) -> Optional[list]:
    """Rewrite the adjacent factors ``g . f``; returns replacement factors or None."""
    if isinstance(f, ForkT):
        if isinstance(g, ExlT):
            return _chain(f.f)
        if isinstance(g, ExrT):
            return _chain(f.g)
        if isinstance(g, CrossT):
            return [ForkT(_then2(g.f, f.f), _then2(g.g, f.g))]
    if isinstance(f, ForkIT) and isinstance(g, ExIT):
        return _chain(f.fs[g.i])
    if isinstance(f, ForkIT) and isinstance(g, CrossIT):
        return [ForkIT(tuple(_then2(a, b) for a, b in zip(g.fs, f.fs)))]
    if isinstance(f, ReplIT) and isinstance(g, ExIT):
        return []
    if isinstance(g, ConstT):
        return [ConstT(g.value, f.dom)]
    if isinstance(g, ItT):
        return [ItT(f.dom)]
    return None


def _then2(g: CatTerm, f: CatTerm) -> CatTerm:
    return _build(_chain(g) + _chain(f), f.dom)


def _common_suffix(chains: list) -> int:
    k = 0
    shortest = min(len(c) for c in chains)
    while k < shortest - 1 and all(c[len(c) - 1 - k] == chains[0][len(chains[0]) - 1 - k] for c in chains):
        k += 1
    return k


def normalize(t: CatTerm) -> CatTerm:
    """Rewrite to a fixpoint with the category laws; the result is right-nested."""
    while True:
        u = _norm(t)
        if u == t:
            return u
        t = u


def _norm(t: CatTerm) -> CatTerm:
    if isinstance(t, ComposeT):
        fs = [_norm(x) for x in _chain(t)]
        fs = [x for f in fs for x in _chain(f)]
        i = 0
        while i < len(fs) - 1:
            rep = _step_pair(fs[i], fs[i + 1])
            if rep is None:
                i += 1
            else:
                fs[i:i + 2] = rep
                i = max(i - 1, 0)
        return _build(fs, t.dom)
    if isinstance(t, ForkT):
        f, g = _norm(t.f), _norm(t.g)
        if isinstance(f, ExlT) and isinstance(g, ExrT) and (f.a, f.b) == (g.a, g.b):
            return IdT(f.dom)
        cf, cg = _chain(f), _chain(g)
        if cf and cg:
            k = _common_suffix([cf, cg])
            if k:
                return ComposeT(
                    ForkT(_build(cf[:-k], cf[-k].cod), _build(cg[:-k], cg[-k].cod)),
                    _build(cf[-k:], t.dom),
                )
        return ForkT(f, g)
    if isinstance(t, CrossT):
        return CrossT(_norm(t.f), _norm(t.g))
    if isinstance(t, ForkIT):
        fs = [_norm(f) for f in t.fs]
        if all(isinstance(f, ExIT) and f.i == i and f.n == len(fs) for i, f in enumerate(fs)):
            return IdT(t.dom)
        chains = [_chain(f) for f in fs]
        if all(chains):
            k = _common_suffix(chains)
            if k:
                head = chains[0][-k]
                return ComposeT(
                    ForkIT(tuple(_build(c[:-k], head.cod) for c in chains)),
                    _build(chains[0][-k:], t.dom),
                )
        return ForkIT(tuple(fs))
    if isinstance(t, CrossIT):
        return CrossIT(tuple(_norm(f) for f in t.fs))
    return t


# --- printing ---------------------------------------------------------------------

_NAMES = {
    AddCT: "addC",
    MulCT: "mulC",
    NegCT: "negateC",
    SinCT: "sinC",
    CosCT: "cosC",
    ExpCT: "expC",
}


def _fmt_value(v) -> str:
    xs = flatten(v)
    body = ", ".join(f"{x:.17g}" for x in xs)
    return body if len(xs) == 1 else f"({body})"


def show_cat(t: CatTerm) -> str:
    """Deterministic text: ``∘`` binds tighter than ``△`` and ``×``."""
    return _show(t, 0)


def _show(t: CatTerm, prec: int) -> str:
    # prec: 0 top, 1 operand of △/×, 2 factor of ∘
    if isinstance(t, ComposeT):
        s = " ∘ ".join(_show(f, 2) for f in _chain(t))
        return f"({s})" if prec >= 2 else s
    if isinstance(t, (ForkT, CrossT)):
        op = " △ " if isinstance(t, ForkT) else " × "
        s = _show(t.f, 1) + op + _show(t.g, 1)
        return f"({s})" if prec >= 1 else s
    if isinstance(t, IdT):
        return "id"
    if isinstance(t, ExlT):
        return "exl"
    if isinstance(t, ExrT):
        return "exr"
    if isinstance(t, DupT):
        return "dup"
    if isinstance(t, ItT):
        return "it"
    if isinstance(t, ConstT):
        return f"const({_fmt_value(t.value)})"
    if isinstance(t, ExIT):
        return f"exI({t.i})"
    if isinstance(t, ReplIT):
        return f"replI({t.n})"
    if isinstance(t, JamIT):
        return "jamI"
    if isinstance(t, ForkIT):
        return "forkI(" + ", ".join(_show(f, 0) for f in t.fs) + ")"
    if isinstance(t, CrossIT):
        return "crossI(" + ", ".join(_show(f, 0) for f in t.fs) + ")"
    return _NAMES[type(t)]


# --- interpretation ---------------------------------------------------------------


def interpret(t: CatTerm, cat):
    """Fold ``t`` into a morphism of ``cat``."""
    if isinstance(t, ComposeT):
        fs = [interpret(f, cat) for f in _chain(t)]
        if not fs:
            return cat.id(t.dom)
        acc = fs[-1]
        for g in reversed(fs[:-1]):
            acc = cat.compose(g, acc)
        return acc
    if isinstance(t, IdT):
        return cat.id(t.s)
    if isinstance(t, ForkT):
        return cat.fork(interpret(t.f, cat), interpret(t.g, cat))
    if isinstance(t, CrossT):
        return cat.cross(interpret(t.f, cat), interpret(t.g, cat))
    if isinstance(t, ExlT):
        return cat.exl(t.a, t.b)
    if isinstance(t, ExrT):
        return cat.exr(t.a, t.b)
    if isinstance(t, DupT):
        return cat.dup(t.a)
    if isinstance(t, ItT):
        return cat.it(t.a)
    if isinstance(t, AddCT):
        return cat.addC()
    if isinstance(t, MulCT):
        return cat.mulC()
    if isinstance(t, NegCT):
        return cat.negateC()
    if isinstance(t, SinCT):
        return cat.sinC()
    if isinstance(t, CosCT):
        return cat.cosC()
    if isinstance(t, ExpCT):
        return cat.expC()
    if isinstance(t, ConstT):
        return cat.constC(t.value, t.src)
    if isinstance(t, ExIT):
        return cat.exI(t.n, t.a)[t.i]
    if isinstance(t, ReplIT):
        return cat.replI(t.n, t.a)
    if isinstance(t, JamIT):
        return cat.jamI(t.n, t.a)
    if isinstance(t, ForkIT):
        return cat.forkI([interpret(f, cat) for f in t.fs])
    if isinstance(t, CrossIT):
        return cat.crossI([interpret(f, cat) for f in t.fs])
    raise TypeError(f"not a categorical term: {t!r}")


def term_size(t: CatTerm) -> int:
    if isinstance(t, (ComposeT, ForkT, CrossT)):
        a, b = (t.g, t.f) if isinstance(t, ComposeT) else (t.f, t.g)
        return 1 + term_size(a) + term_size(b)
    if isinstance(t, (ForkIT, CrossIT)):
        return 1 + sum(term_size(f) for f in t.fs)
    return 1


def count_nodes(t: CatTerm, kind) -> int:
    """Occurrences of node class ``kind`` in ``t``."""
    own = 1 if isinstance(t, kind) else 0
    if isinstance(t, ComposeT):
        return own + count_nodes(t.g, kind) + count_nodes(t.f, kind)
    if isinstance(t, (ForkT, CrossT)):
        return own + count_nodes(t.f, kind) + count_nodes(t.g, kind)
    if isinstance(t, (ForkIT, CrossIT)):
        return own + sum(count_nodes(f, kind) for f in t.fs)
    return own


__all__ = [
    "CatTerm",
    "IdT",
    "ComposeT",
    "CrossT",
    "ForkT",
    "ExlT",
    "ExrT",
    "DupT",
    "ItT",
    "AddCT",
    "MulCT",
    "NegCT",
    "SinCT",
    "CosCT",
    "ExpCT",
    "ConstT",
    "CrossIT",
    "ForkIT",
    "ExIT",
    "ReplIT",
    "JamIT",
    "to_cat",
    "normalize",
    "show_cat",
    "interpret",
    "term_size",
    "count_nodes",
]
