"""Shared helpers for the test suites: random shapes, values and linear maps,
numpy reference semantics for every categorical operation, and the program
corpus."""

from __future__ import annotations

import math

import numpy as np

from catgrad.category import ADD
from catgrad.front import Program, compile_source
from catgrad.front.check import infer_shape
from catgrad.front.generate import random_program
from catgrad.front.translate import to_cat
from catgrad.linmap import MAT
from catgrad.rad import Begin, Cont, Dual, dot, to_dense, undot
from catgrad.shape import (
    R,
    UNIT,
    PairS,
    PairV,
    ScalarV,
    VecS,
    VecV,
    add,
    dim,
    flatten,
    parse_shape,
    scale_value,
    unflatten,
    zero,
)

SMALL_SHAPES = [parse_shape(s) for s in ("R", "(R, R)", "[2 x R]", "(R, [2 x R])", "1", "[3 x R]")]

LINEAR_CATS = {
    "additive": ADD,
    "matrix": MAT,
    "cont-additive": Cont(ADD),
    "cont-matrix": Cont(MAT),
    "dual-additive": Dual(ADD),
    "dual-matrix": Dual(MAT),
    "begin-additive": Begin(ADD),
    "begin-matrix": Begin(MAT),
}

CORPUS_SOURCES = {
    "sqr": ("\\x -> x * x", "R"),
    "magSqr": ("\\(x, y) -> x * x + y * y", "(R, R)"),
    "cosSinProd": ("\\(x, y) -> let z = x * y in (cos z, sin z)", "(R, R)"),
    "cosAffine": ("\\((x, y), z) -> cos (x + y * z)", "((R, R), R)"),
}

RANDOM_CORPUS_SEEDS = (11, 22, 33)


def corpus() -> dict:
    """The fixed corpus plus three seeded random depth-6 programs."""
    progs = {name: compile_source(src, parse_shape(sh)) for name, (src, sh) in CORPUS_SOURCES.items()}
    for seed in RANDOM_CORPUS_SEEDS:
        progs[f"random{seed}"] = program_from(*random_program(seed, depth=6))
    return progs


def program_from(p, e, s) -> Program:
    return Program(p, e, s, infer_shape(p, e, s), to_cat(p, e, s))


def rand_shape(rng) -> object:
    return SMALL_SHAPES[int(rng.integers(len(SMALL_SHAPES)))]


def rand_value(rng, s):
    return unflatten(s, rng.uniform(-2.0, 2.0, dim(s)).tolist())


def rand_matrix(rng, rows: int, cols: int) -> np.ndarray:
    return rng.uniform(-2.0, 2.0, (rows, cols))


def lift(cat, dom, cod, mat: np.ndarray):
    """The linear map ``mat`` as a morphism of ``cat``."""
    mat = np.asarray(mat, dtype=float)

    def fn(v):
        return unflatten(cod, (mat @ np.asarray(flatten(v), dtype=float)).tolist())

    return cat.lift(dom, cod, fn)


def rand_morph(rng, cat, dom, cod):
    m = rand_matrix(rng, dim(cod), dim(dom))
    return lift(cat, dom, cod, m), m


def dense(m) -> np.ndarray:
    return to_dense(m)


def close(a, b, rtol: float, atol: float = 0.0) -> bool:
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    if a.shape != b.shape:
        return False
    return bool(np.all(np.abs(a - b) <= atol + rtol * np.maximum(1.0, np.abs(b))))


# --- numpy reference semantics ---------------------------------------------------


def blockdiag(*ms) -> np.ndarray:
    rows = sum(m.shape[0] for m in ms)
    cols = sum(m.shape[1] for m in ms)
    out = np.zeros((rows, cols))
    i = j = 0
    for m in ms:
        out[i:i + m.shape[0], j:j + m.shape[1]] = m
        i += m.shape[0]
        j += m.shape[1]
    return out


def eye(s) -> np.ndarray:
    return np.eye(dim(s))


def ref_exl(a, b):
    return np.hstack([eye(a), np.zeros((dim(a), dim(b)))])


def ref_exr(a, b):
    return np.hstack([np.zeros((dim(b), dim(a))), eye(b)])


def ref_exI(n, a, i):
    return np.hstack([eye(a) if j == i else np.zeros((dim(a), dim(a))) for j in range(n)])


# --- one random instance of every operation -------------------------------------
#
# Each law builder takes ``(rng, cat)`` and returns ``(morphism, reference)``,
# where ``reference`` is the dense matrix the operation must denote when the
# inputs are the random matrices it drew.


def _law_id(rng, cat):
    s = rand_shape(rng)
    return cat.id(s), eye(s)


def _law_compose(rng, cat):
    a, b, c = rand_shape(rng), rand_shape(rng), rand_shape(rng)
    f, F = rand_morph(rng, cat, a, b)
    g, G = rand_morph(rng, cat, b, c)
    return cat.compose(g, f), G @ F


def _law_cross(rng, cat):
    a, b, c, d = (rand_shape(rng) for _ in range(4))
    f, F = rand_morph(rng, cat, a, c)
    g, G = rand_morph(rng, cat, b, d)
    return cat.cross(f, g), blockdiag(F, G)


def _law_fork(rng, cat):
    a, c, d = (rand_shape(rng) for _ in range(3))
    f, F = rand_morph(rng, cat, a, c)
    g, G = rand_morph(rng, cat, a, d)
    return cat.fork(f, g), np.vstack([F, G])


def _law_join(rng, cat):
    a, b, c = (rand_shape(rng) for _ in range(3))
    f, F = rand_morph(rng, cat, a, c)
    g, G = rand_morph(rng, cat, b, c)
    return cat.join(f, g), np.hstack([F, G])


def _law_exl(rng, cat):
    a, b = rand_shape(rng), rand_shape(rng)
    return cat.exl(a, b), ref_exl(a, b)


def _law_exr(rng, cat):
    a, b = rand_shape(rng), rand_shape(rng)
    return cat.exr(a, b), ref_exr(a, b)


def _law_dup(rng, cat):
    a = rand_shape(rng)
    return cat.dup(a), np.vstack([eye(a), eye(a)])


def _law_inl(rng, cat):
    a, b = rand_shape(rng), rand_shape(rng)
    return cat.inl(a, b), ref_exl(a, b).T


def _law_inr(rng, cat):
    a, b = rand_shape(rng), rand_shape(rng)
    return cat.inr(a, b), ref_exr(a, b).T


def _law_jam(rng, cat):
    a = rand_shape(rng)
    return cat.jam(a), np.hstack([eye(a), eye(a)])


def _law_it(rng, cat):
    a = rand_shape(rng)
    return cat.it(a), np.zeros((0, dim(a)))


def _law_ti(rng, cat):
    a = rand_shape(rng)
    return cat.ti(a), np.zeros((dim(a), 0))


def _law_scale(rng, cat):
    c = float(rng.uniform(-3, 3))
    return cat.scale(c), np.array([[c]])


def _law_negate(rng, cat):
    return cat.negateC(), np.array([[-1.0]])


def _law_add(rng, cat):
    return cat.addC(), np.array([[1.0, 1.0]])


def _law_hom_zero(rng, cat):
    a, b = rand_shape(rng), rand_shape(rng)
    return cat.hom_zero(a, b), np.zeros((dim(b), dim(a)))


def _law_hom_add(rng, cat):
    a, b = rand_shape(rng), rand_shape(rng)
    f, F = rand_morph(rng, cat, a, b)
    g, G = rand_morph(rng, cat, a, b)
    return cat.hom_add(f, g), F + G


def _indexed(rng, cat):
    n = int(rng.integers(1, 4))
    a, b = rand_shape(rng), rand_shape(rng)
    fs, Fs = zip(*(rand_morph(rng, cat, a, b) for _ in range(n)))
    return n, a, b, list(fs), list(Fs)


def _law_crossI(rng, cat):
    n, a, b, fs, Fs = _indexed(rng, cat)
    return cat.crossI(fs), blockdiag(*Fs)


def _law_forkI(rng, cat):
    n, a, b, fs, Fs = _indexed(rng, cat)
    return cat.forkI(fs), np.vstack(Fs)


def _law_joinI(rng, cat):
    n, a, b, fs, Fs = _indexed(rng, cat)
    return cat.joinI(fs), np.hstack(Fs)


def _law_exI(rng, cat):
    n = int(rng.integers(1, 4))
    a = rand_shape(rng)
    i = int(rng.integers(n))
    return cat.exI(n, a)[i], ref_exI(n, a, i)


def _law_inI(rng, cat):
    n = int(rng.integers(1, 4))
    a = rand_shape(rng)
    i = int(rng.integers(n))
    return cat.inI(n, a)[i], ref_exI(n, a, i).T


def _law_replI(rng, cat):
    n = int(rng.integers(1, 4))
    a = rand_shape(rng)
    return cat.replI(n, a), np.vstack([eye(a)] * n)


def _law_jamI(rng, cat):
    n = int(rng.integers(1, 4))
    a = rand_shape(rng)
    return cat.jamI(n, a), np.hstack([eye(a)] * n)


CATEGORY_LAWS = {
    "id": _law_id,
    "compose": _law_compose,
    "cross": _law_cross,
    "fork": _law_fork,
    "join": _law_join,
    "exl": _law_exl,
    "exr": _law_exr,
    "dup": _law_dup,
    "inl": _law_inl,
    "inr": _law_inr,
    "jam": _law_jam,
    "it": _law_it,
    "ti": _law_ti,
    "scale": _law_scale,
    "negateC": _law_negate,
    "addC": _law_add,
    "hom_zero": _law_hom_zero,
    "hom_add": _law_hom_add,
}

INDEXED_LAWS = {
    "crossI": _law_crossI,
    "forkI": _law_forkI,
    "joinI": _law_joinI,
    "exI": _law_exI,
    "inI": _law_inI,
    "replI": _law_replI,
    "jamI": _law_jamI,
}


def check_law(law, cat, seed: int, n: int, rtol: float = 1e-10) -> tuple:
    """Run ``n`` random instances; return ``(failures, first_failure_seed)``."""
    rng = np.random.default_rng(seed)
    fails, first = 0, None
    for t in range(n):
        m, ref = law(rng, cat)
        got = dense(m)
        if not close(got, ref, rtol):
            fails += 1
            first = t if first is None else first
    return fails, first


# --- differentiable-function laws -----------------------------------------------
#
# Random DFuns come from random programs.  Each builder returns the combined
# DFun, a point, and the expected value and Jacobian assembled from the parts.


def rand_program(rng, dom=None, depth: int = 3) -> Program:
    p, e, s = random_program(rng, depth=depth, arg_shape=dom)
    return program_from(p, e, s)


def _run(D, prog, x):
    y, d = prog.morphism(D).run(x)
    return np.asarray(flatten(y), dtype=float), dense(d)


def _d_compose(rng, D):
    f = rand_program(rng)
    g = rand_program(rng, f.cod)
    x = rand_value(rng, f.dom)
    fy, F = _run(D, f, x)
    gy, G = _run(D, g, unflatten(f.cod, fy.tolist()))
    return D.compose(g.morphism(D), f.morphism(D)), x, gy, G @ F


def _d_cross(rng, D):
    f, g = rand_program(rng), rand_program(rng)
    x, y = rand_value(rng, f.dom), rand_value(rng, g.dom)
    fy, F = _run(D, f, x)
    gy, G = _run(D, g, y)
    return D.cross(f.morphism(D), g.morphism(D)), PairV(x, y), np.concatenate([fy, gy]), blockdiag(F, G)


def _d_fork(rng, D):
    f = rand_program(rng)
    g = rand_program(rng, f.dom)
    x = rand_value(rng, f.dom)
    fy, F = _run(D, f, x)
    gy, G = _run(D, g, x)
    return D.fork(f.morphism(D), g.morphism(D)), x, np.concatenate([fy, gy]), np.vstack([F, G])


def _d_join(rng, D):
    f = rand_program(rng)
    g = _matching(rng, f)
    x, y = rand_value(rng, f.dom), rand_value(rng, g.dom)
    fy, F = _run(D, f, x)
    gy, G = _run(D, g, y)
    return D.join(f.morphism(D), g.morphism(D)), PairV(x, y), fy + gy, np.hstack([F, G])


def _d_primitive(name):
    """Scalar primitives against their closed-form derivatives."""

    def law(rng, D):
        x = float(rng.uniform(-2, 2))
        y = float(rng.uniform(-2, 2))
        c = float(rng.uniform(-2, 2))
        if name == "mulC":
            return D.mulC(), PairV(ScalarV(x), ScalarV(y)), np.array([x * y]), np.array([[y, x]])
        if name == "addC":
            return D.addC(), PairV(ScalarV(x), ScalarV(y)), np.array([x + y]), np.array([[1.0, 1.0]])
        if name == "negateC":
            return D.negateC(), ScalarV(x), np.array([-x]), np.array([[-1.0]])
        if name == "scale":
            return D.scale(c), ScalarV(x), np.array([c * x]), np.array([[c]])
        if name == "sinC":
            return D.sinC(), ScalarV(x), np.array([math.sin(x)]), np.array([[math.cos(x)]])
        if name == "cosC":
            return D.cosC(), ScalarV(x), np.array([math.cos(x)]), np.array([[-math.sin(x)]])
        if name == "expC":
            return D.expC(), ScalarV(x), np.array([math.exp(x)]), np.array([[math.exp(x)]])
        if name == "constC":
            a = rand_shape(rng)
            return D.constC(ScalarV(c), a), rand_value(rng, a), np.array([c]), np.zeros((1, dim(a)))
        raise KeyError(name)

    return law


def _d_structural(op):
    def law(rng, D):
        a, b = rand_shape(rng), rand_shape(rng)
        if op == "id":
            m, dom, ref = D.id(a), a, eye(a)
        elif op == "exl":
            m, dom, ref = D.exl(a, b), PairS(a, b), ref_exl(a, b)
        elif op == "exr":
            m, dom, ref = D.exr(a, b), PairS(a, b), ref_exr(a, b)
        elif op == "dup":
            m, dom, ref = D.dup(a), a, np.vstack([eye(a), eye(a)])
        elif op == "inl":
            m, dom, ref = D.inl(a, b), a, ref_exl(a, b).T
        elif op == "inr":
            m, dom, ref = D.inr(a, b), b, ref_exr(a, b).T
        elif op == "jam":
            m, dom, ref = D.jam(a), PairS(a, a), np.hstack([eye(a), eye(a)])
        elif op == "it":
            m, dom, ref = D.it(a), a, np.zeros((0, dim(a)))
        elif op == "ti":
            m, dom, ref = D.ti(a), UNIT, np.zeros((dim(a), 0))
        else:
            raise KeyError(op)
        x = rand_value(rng, dom)
        return m, x, ref @ np.asarray(flatten(x), dtype=float), ref

    return law


def _matching(rng, f, tries: int = 100) -> Program:
    """A random program with the same domain and codomain as ``f`` (``f`` itself as a fallback)."""
    for _ in range(tries):
        g = rand_program(rng, f.dom)
        if g.cod == f.cod:
            return g
    return f


def _d_indexed(op):
    def law(rng, D):
        n = int(rng.integers(1, 4))
        if op in ("crossI", "forkI", "joinI"):
            f = rand_program(rng)
            gs = [f] + [_matching(rng, f) for _ in range(n - 1)]
            ms = [g.morphism(D) for g in gs]
            if op == "forkI":
                x = rand_value(rng, f.dom)
                parts = [_run(D, g, x) for g in gs]
                return (D.forkI(ms), x, np.concatenate([p[0] for p in parts]),
                        np.vstack([p[1] for p in parts]))
            xs = [rand_value(rng, f.dom) for _ in range(n)]
            parts = [_run(D, g, x) for g, x in zip(gs, xs)]
            if op == "crossI":
                return (D.crossI(ms), VecV(tuple(xs)), np.concatenate([p[0] for p in parts]),
                        blockdiag(*[p[1] for p in parts]))
            return (D.joinI(ms), VecV(tuple(xs)), np.sum([p[0] for p in parts], axis=0),
                    np.hstack([p[1] for p in parts]))
        a = rand_shape(rng)
        if op == "exI":
            i = int(rng.integers(n))
            m, dom, ref = D.exI(n, a)[i], VecS(n, a), ref_exI(n, a, i)
        elif op == "inI":
            i = int(rng.integers(n))
            m, dom, ref = D.inI(n, a)[i], a, ref_exI(n, a, i).T
        elif op == "replI":
            m, dom, ref = D.replI(n, a), a, np.vstack([eye(a)] * n)
        elif op == "jamI":
            m, dom, ref = D.jamI(n, a), VecS(n, a), np.hstack([eye(a)] * n)
        else:
            raise KeyError(op)
        x = rand_value(rng, dom)
        return m, x, ref @ np.asarray(flatten(x), dtype=float), ref

    return law


DERIV_LAWS = {
    "compose": _d_compose,
    "cross": _d_cross,
    "fork": _d_fork,
    "join": _d_join,
    **{op: _d_structural(op) for op in ("id", "exl", "exr", "dup", "inl", "inr", "jam", "it", "ti")},
    **{op: _d_primitive(op) for op in ("mulC", "addC", "negateC", "scale", "sinC", "cosC", "expC", "constC")},
}

DERIV_INDEXED_LAWS = {op: _d_indexed(op) for op in ("crossI", "forkI", "joinI", "exI", "inI", "replI", "jamI")}


def check_deriv_law(law, D, seed: int, n: int, rtol: float = 1e-10) -> tuple:
    rng = np.random.default_rng(seed)
    fails, first = 0, None
    for t in range(n):
        m, x, y_ref, j_ref = law(rng, D)
        y, d = m.run(x)
        got = dense(d)
        ok = close(np.asarray(flatten(y), dtype=float), y_ref, rtol) and close(got, j_ref, rtol)
        if not ok:
            fails += 1
            first = t if first is None else first
    return fails, first



# --- hom-set identities and the dot lemma ------------------------------------------


def hom_identity_checks(rng, k, tol: float = 1e-12) -> list:
    """One random instance of each hom-set identity; returns the names that fail."""
    bad = []

    def same(name, m, ref):
        if not close(dense(m), ref if isinstance(ref, np.ndarray) else dense(ref), tol):
            bad.append(name)

    a, b, c, d = (rand_shape(rng) for _ in range(4))
    u, _ = rand_morph(rng, k, a, c)
    v, _ = rand_morph(rng, k, a, d)
    same("fork", k.fork(u, v), k.hom_add(k.compose(k.inl(c, d), u), k.compose(k.inr(c, d), v)))
    same("fork-zero-right", k.fork(u, k.hom_zero(a, d)), k.compose(k.inl(c, d), u))
    same("fork-zero-left", k.fork(k.hom_zero(a, c), v), k.compose(k.inr(c, d), v))

    p, _ = rand_morph(rng, k, a, c)
    q, _ = rand_morph(rng, k, b, c)
    same("join", k.join(p, q), k.hom_add(k.compose(p, k.exl(a, b)), k.compose(q, k.exr(a, b))))
    same("join-zero-right", k.join(p, k.hom_zero(b, c)), k.compose(p, k.exl(a, b)))
    same("join-zero-left", k.join(k.hom_zero(a, c), q), k.compose(q, k.exr(a, b)))

    f, F = rand_morph(rng, k, a, c)
    g, G = rand_morph(rng, k, a, c)
    same("zero", k.compose(k.ti(c), k.it(a)), np.zeros((dim(c), dim(a))))
    same("add-cross", k.compose(k.jam(c), k.compose(k.cross(f, g), k.dup(a))), F + G)
    same("add-fork", k.compose(k.jam(c), k.fork(f, g)), F + G)
    same("add-join", k.compose(k.join(f, g), k.dup(a)), F + G)
    return bad


def dot_lemma_checks(rng, k, tol: float = 1e-12) -> list:
    """One random instance of each dot/undot property; returns the names that fail."""
    bad = []
    s, t = rand_shape(rng), rand_shape(rng)
    u, v, w = rand_value(rng, s), rand_value(rng, s), rand_value(rng, t)
    a, b = rng.uniform(-3, 3, 2)
    if not close(dense(dot(add(scale_value(a, u), scale_value(b, v)), k)),
                 a * dense(dot(u, k)) + b * dense(dot(v, k)), tol):
        bad.append("dot-linear")
    combo = k.hom_add(k.compose(k.scale(a), dot(u, k)), k.compose(k.scale(b), dot(v, k)))
    if not close(flatten(undot(combo, k)), a * np.array(flatten(u)) + b * np.array(flatten(v)), tol):
        bad.append("undot-linear")
    left, right = k.unjoin(dot(PairV(u, w), k))
    if not (close(dense(left), dense(dot(u, k)), tol) and close(dense(right), dense(dot(w, k)), tol)):
        bad.append("unjoin-dot")
    joined = k.join(dot(u, k), dot(w, k))
    if not close(flatten(undot(joined, k)), flatten(u) + flatten(w), tol):
        bad.append("undot-join")
    if not close(dense(joined), dense(dot(PairV(u, w), k)), tol):
        bad.append("join-dot")
    if not close(dense(dot(zero(s), k)), dense(k.hom_zero(s, R)), tol):
        bad.append("dot-zero")
    if undot(dot(u, k), k) != u:
        bad.append("roundtrip")
    return bad
