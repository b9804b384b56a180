"""Seeded random well-shaped programs for property tests and the check corpus.

Every generated program is magnitude-bounded: for arguments in ``[-2, 2]``
each scalar subterm stays below ``cap`` in absolute value, and ``exp`` is
only applied to arguments bounded by 3.  Expression height never exceeds the
requested depth.  That keeps finite-difference comparisons well conditioned.
"""

from __future__ import annotations

import math

import numpy as np

from ..shape import PairS, R, ScalarS, Shape, UnitS, VecS, parse_shape
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

ARG_SHAPES = [parse_shape(s) for s in ("R", "(R, R)", "((R, R), R)", "[3 x R]", "(R, [2 x R])", "[2 x (R, R)]")]
INPUT_BOUND = 2.0
EXP_ARG_BOUND = 3.0


class _Gen:
    def __init__(self, rng: np.random.Generator, cap: float):
        self.rng = rng
        self.cap = cap
        self.names = 0

    def fresh(self) -> str:
        self.names += 1
        return f"x{self.names}"

    def coin(self, p: float = 0.5) -> bool:
        return bool(self.rng.random() < p)

    def pick(self, seq):
        return seq[int(self.rng.integers(len(seq)))]

    # patterns
    def pattern(self, s: Shape, env: dict):
        if isinstance(s, PairS) and self.coin(0.7):
            return PPair(self.pattern(s.left, env), self.pattern(s.right, env))
        if isinstance(s, VecS) and self.coin(0.5):
            return PVec(tuple(self.pattern(s.elem, env) for _ in range(s.n)))
        name = self.fresh()
        env[name] = (s, INPUT_BOUND)
        return PVar(name)

    # scalar access into a structured variable
    def access(self, e, s: Shape):
        if isinstance(s, ScalarS):
            return e
        if isinstance(s, PairS):
            if self.coin():
                return self.access(Fst(e), s.left)
            return self.access(Snd(e), s.right)
        if isinstance(s, VecS):
            return self.access(Idx(e, int(self.rng.integers(s.n))), s.elem)
        return None

    def literal(self):
        c = float(np.round(self.rng.uniform(-2.0, 2.0), 2))
        return Lit(c), abs(c)

    def leaf(self, env: dict, d: int):
        usable = [n for n, (s, _) in env.items() if not isinstance(s, UnitS)]
        if usable and self.coin(0.8):
            name = self.pick(sorted(usable))
            s, b = env[name]
            e = self.access(Var(name), s)
            if e is not None and expr_depth(e) <= d:
                return e, b
        return self.literal()

    def scalar(self, env: dict, depth: int):
        """A scalar expression of height at most ``depth`` and its magnitude bound."""
        if depth <= 1:
            return self.leaf(env, depth)
        d = depth - 1
        ops = ["add", "add", "mul", "mul", "neg", "sin", "cos", "exp", "let", "leaf"]
        if depth >= 3:
            ops += ["fst", "idx", "sum"]
        op = self.pick(ops)
        if op == "leaf":
            return self.leaf(env, depth)
        if op in ("add", "mul"):
            (a, ba), (b, bb) = self.scalar(env, d), self.scalar(env, d)
            bound = ba + bb if op == "add" else ba * bb
            if bound > self.cap:
                return Sin(a), 1.0
            return (Add(a, b) if op == "add" else Mul(a, b)), bound
        if op == "neg":
            a, ba = self.scalar(env, d)
            return Neg(a), ba
        if op in ("sin", "cos"):
            a, _ = self.scalar(env, d)
            return (Sin(a) if op == "sin" else Cos(a)), 1.0
        if op == "exp":
            a, ba = self.scalar(env, d)
            if ba > EXP_ARG_BOUND:
                return Cos(a), 1.0
            return Exp(a), math.exp(ba)
        if op == "let":
            a, ba = self.scalar(env, d)
            name = self.fresh()
            body, bb = self.scalar({**env, name: (R, ba)}, d)
            return Let(name, a, body), bb
        if op == "fst":
            (a, ba), (b, bb) = self.scalar(env, d - 1), self.scalar(env, d - 1)
            return (Fst(PairE(a, b)), ba) if self.coin() else (Snd(PairE(a, b)), bb)
        n = int(self.rng.integers(1, 4))
        items = [self.scalar(env, d - 1) for _ in range(n)]
        vec = VecE(tuple(i[0] for i in items))
        total = sum(i[1] for i in items)
        if op == "idx" or total > self.cap:
            i = int(self.rng.integers(n))
            return Idx(vec, i), items[i][1]
        return SumE(vec), total

    def body(self, env: dict, depth: int, scalar_only: bool):
        if scalar_only or depth <= 1 or self.coin(0.6):
            return self.scalar(env, depth)[0]
        if self.coin():
            return PairE(self.scalar(env, depth - 1)[0], self.scalar(env, depth - 1)[0])
        n = int(self.rng.integers(1, 4))
        return VecE(tuple(self.scalar(env, depth - 1)[0] for _ in range(n)))


def random_program(rng, depth: int = 6, arg_shape: Shape | None = None,
                   scalar_only: bool = False, cap: float = 50.0):
    """Return ``(pattern, expr, arg_shape)`` for a random well-shaped program.

    ``rng`` is a :class:`numpy.random.Generator` or an integer seed.
    """
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    g = _Gen(rng, cap)
    s = arg_shape if arg_shape is not None else g.pick(ARG_SHAPES)
    env: dict = {}
    p = g.pattern(s, env)
    e = g.body(env, max(depth, 1), scalar_only)
    return p, e, s


def expr_depth(e) -> int:
    if isinstance(e, (Var, Lit)):
        return 1
    if isinstance(e, (PairE, Add, Mul)):
        return 1 + max(expr_depth(e.left), expr_depth(e.right))
    if isinstance(e, Let):
        return 1 + max(expr_depth(e.bound), expr_depth(e.body))
    if isinstance(e, VecE):
        return 1 + max(expr_depth(i) for i in e.items)
    return 1 + expr_depth(e.arg)


__all__ = ["random_program", "expr_depth", "ARG_SHAPES"]
