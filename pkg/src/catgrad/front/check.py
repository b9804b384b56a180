"""Shape checking and a direct big-step evaluator for the surface language."""

from __future__ import annotations

from ..category import MATH
from ..shape import (
    PairS,
    PairV,
    R,
    ScalarS,
    ScalarV,
    Shape,
    UnitS,
    Value,
    VecS,
    VecV,
    check_conforms,
    sum_values,
)
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
    PUnit,
    PVar,
    PVec,
    Sin,
    Snd,
    SourceError,
    SumE,
    Var,
    VecE,
)


class ShapeCheckError(SourceError):
    pass


def bind_pattern(p, s: Shape) -> dict:
    """Map each pattern name to its shape; the pattern must match ``s`` structurally."""
    env: dict = {}

    def walk(q, s):
        if isinstance(q, PVar):
            env[q.name] = s
        elif isinstance(q, PUnit):
            if not isinstance(s, UnitS):
                raise ShapeCheckError(f"pattern () does not match shape {s}", *q.pos)
        elif isinstance(q, PPair):
            if not isinstance(s, PairS):
                raise ShapeCheckError(f"pair pattern does not match shape {s}", *q.pos)
            walk(q.left, s.left)
            walk(q.right, s.right)
        elif isinstance(q, PVec):
            if not isinstance(s, VecS) or s.n != len(q.items):
                raise ShapeCheckError(
                    f"vector pattern of length {len(q.items)} does not match shape {s}", *q.pos
                )
            for r in q.items:
                walk(r, s.elem)

    walk(p, s)
    return env


def infer_shape(p, e, arg_shape: Shape) -> Shape:
    return shape_in(bind_pattern(p, arg_shape), e)


def _need_scalar(s: Shape, e, what: str) -> None:
    if not isinstance(s, ScalarS):
        raise ShapeCheckError(f"{what} needs a scalar operand, got {s}", *e.pos)


def shape_in(env: dict, e) -> Shape:
    if isinstance(e, Var):
        if e.name not in env:
            raise ShapeCheckError(f"unbound variable {e.name!r}", *e.pos)
        return env[e.name]
    if isinstance(e, Lit):
        return R
    if isinstance(e, PairE):
        return PairS(shape_in(env, e.left), shape_in(env, e.right))
    if isinstance(e, (Fst, Snd)):
        s = shape_in(env, e.arg)
        if not isinstance(s, PairS):
            name = "fst" if isinstance(e, Fst) else "snd"
            raise ShapeCheckError(f"{name} needs a pair, got {s}", *e.pos)
        return s.left if isinstance(e, Fst) else s.right
    if isinstance(e, (Neg, Sin, Cos, Exp)):
        _need_scalar(shape_in(env, e.arg), e, type(e).__name__.lower())
        return R
    if isinstance(e, (Add, Mul)):
        what = "+" if isinstance(e, Add) else "*"
        _need_scalar(shape_in(env, e.left), e, what)
        _need_scalar(shape_in(env, e.right), e, what)
        return R
    if isinstance(e, Let):
        s = shape_in(env, e.bound)
        return shape_in({**env, e.name: s}, e.body)
    if isinstance(e, VecE):
        shapes = [shape_in(env, i) for i in e.items]
        for item, s in zip(e.items[1:], shapes[1:]):
            if s != shapes[0]:
                raise ShapeCheckError(
                    f"vector elements disagree: {shapes[0]} and {s}", *item.pos
                )
        return VecS(len(shapes), shapes[0])
    if isinstance(e, Idx):
        s = shape_in(env, e.arg)
        if not isinstance(s, VecS):
            raise ShapeCheckError(f"indexing needs a vector, got {s}", *e.pos)
        if not 0 <= e.index < s.n:
            raise ShapeCheckError(f"index {e.index} out of range for {s}", *e.pos)
        return s.elem
    if isinstance(e, SumE):
        s = shape_in(env, e.arg)
        if not isinstance(s, VecS):
            raise ShapeCheckError(f"sum needs a vector, got {s}", *e.pos)
        return s.elem
    raise TypeError(f"not an expression: {e!r}")


# --- direct evaluation ------------------------------------------------------------


def bind_value(p, v: Value, env: dict) -> None:
    if isinstance(p, PVar):
        env[p.name] = v
    elif isinstance(p, PPair):
        bind_value(p.left, v.left, env)
        bind_value(p.right, v.right, env)
    elif isinstance(p, PVec):
        for q, e in zip(p.items, v.elements):
            bind_value(q, e, env)


def evaluate(p, e, arg: Value, arg_shape: Shape | None = None) -> Value:
    """Big-step evaluation of ``e`` with ``p`` bound to ``arg``."""
    if arg_shape is not None:
        check_conforms(arg, arg_shape)
    env: dict = {}
    bind_value(p, arg, env)
    return _eval(env, e)


def _eval(env: dict, e) -> Value:
    if isinstance(e, Var):
        return env[e.name]
    if isinstance(e, Lit):
        return ScalarV(float(e.value))
    if isinstance(e, PairE):
        return PairV(_eval(env, e.left), _eval(env, e.right))
    if isinstance(e, Fst):
        return _eval(env, e.arg).left
    if isinstance(e, Snd):
        return _eval(env, e.arg).right
    if isinstance(e, Neg):
        return ScalarV(-_eval(env, e.arg).x)
    if isinstance(e, Sin):
        return ScalarV(MATH.sin(_eval(env, e.arg).x))
    if isinstance(e, Cos):
        return ScalarV(MATH.cos(_eval(env, e.arg).x))
    if isinstance(e, Exp):
        return ScalarV(MATH.exp(_eval(env, e.arg).x))
    if isinstance(e, Add):
        return ScalarV(_eval(env, e.left).x + _eval(env, e.right).x)
    if isinstance(e, Mul):
        return ScalarV(_eval(env, e.left).x * _eval(env, e.right).x)
    if isinstance(e, Let):
        return _eval({**env, e.name: _eval(env, e.bound)}, e.body)
    if isinstance(e, VecE):
        return VecV(tuple(_eval(env, i) for i in e.items))
    if isinstance(e, Idx):
        return _eval(env, e.arg).elements[e.index]
    if isinstance(e, SumE):
        v = _eval(env, e.arg)
        return sum_values(v.elements, None)
    raise TypeError(f"not an expression: {e!r}")


__all__ = ["ShapeCheckError", "bind_pattern", "infer_shape", "shape_in", "evaluate"]
