"""Objects of every category: shapes, values living in them, and their vector-space structure.

A :class:`Shape` describes a finite-dimensional real vector space built from
scalars, the zero-dimensional unit space, binary products and fixed-length
vectors.  A :class:`Value` is a point of such a space.  Flattening enumerates
scalar coordinates left to right, depth first; dense matrices elsewhere in the
package use that order for both rows and columns.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Sequence, Union


class ShapeError(ValueError):
    """A value or morphism does not have the expected shape.

    ``path`` locates the divergence inside the value tree, e.g. ``".left[2]"``.
    """

    def __init__(self, message: str, path: str = ""):
        self.path = path
        where = f" at {path}" if path else ""
        super().__init__(f"{message}{where}")


# --- shapes -----------------------------------------------------------------


@dataclass(frozen=True)
class ScalarS:
    def __str__(self) -> str:
        return "R"


@dataclass(frozen=True)
class UnitS:
    def __str__(self) -> str:
        return "1"


@dataclass(frozen=True)
class PairS:
    left: "Shape"
    right: "Shape"

    def __str__(self) -> str:
        return f"({self.left}, {self.right})"


@dataclass(frozen=True)
class VecS:
    n: int
    elem: "Shape"

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise ShapeError(f"vector arity must be a positive integer, got {self.n!r}")

    def __str__(self) -> str:
        return f"[{self.n} x {self.elem}]"


Shape = Union[ScalarS, UnitS, PairS, VecS]

R = ScalarS()
UNIT = UnitS()


# --- values -----------------------------------------------------------------


@dataclass(frozen=True)
class ScalarV:
    # normally a float; the graph renderer substitutes symbolic wires
    x: float

    def __str__(self) -> str:
        return f"{self.x:.17g}" if isinstance(self.x, float) else str(self.x)


@dataclass(frozen=True)
class UnitV:
    def __str__(self) -> str:
        return "()"


@dataclass(frozen=True)
class PairV:
    left: "Value"
    right: "Value"

    def __str__(self) -> str:
        return f"({self.left}, {self.right})"


@dataclass(frozen=True)
class VecV:
    elements: tuple

    def __post_init__(self):
        if not isinstance(self.elements, tuple):
            object.__setattr__(self, "elements", tuple(self.elements))

    def __str__(self) -> str:
        return "[" + ", ".join(str(e) for e in self.elements) + "]"


Value = Union[ScalarV, UnitV, PairV, VecV]

UNIT_V = UnitV()


def scalar(x: float) -> ScalarV:
    return ScalarV(float(x))


def pair(a: Value, b: Value) -> PairV:
    return PairV(a, b)


# --- structure --------------------------------------------------------------


def conforms(v: Value, s: Shape) -> bool:
    if isinstance(s, ScalarS):
        return isinstance(v, ScalarV)
    if isinstance(s, UnitS):
        return isinstance(v, UnitV)
    if isinstance(s, PairS):
        return isinstance(v, PairV) and conforms(v.left, s.left) and conforms(v.right, s.right)
    if isinstance(s, VecS):
        return (
            isinstance(v, VecV)
            and len(v.elements) == s.n
            and all(conforms(e, s.elem) for e in v.elements)
        )
    raise TypeError(f"not a shape: {s!r}")


def check_conforms(v: Value, s: Shape, path: str = "") -> None:
    """Raise :class:`ShapeError` naming the first divergent path if ``v`` does not conform to ``s``."""
    if isinstance(s, ScalarS):
        if not isinstance(v, ScalarV):
            raise ShapeError(f"expected scalar, got {_kind(v)}", path)
    elif isinstance(s, UnitS):
        if not isinstance(v, UnitV):
            raise ShapeError(f"expected unit, got {_kind(v)}", path)
    elif isinstance(s, PairS):
        if not isinstance(v, PairV):
            raise ShapeError(f"expected pair, got {_kind(v)}", path)
        check_conforms(v.left, s.left, path + ".left")
        check_conforms(v.right, s.right, path + ".right")
    elif isinstance(s, VecS):
        if not isinstance(v, VecV):
            raise ShapeError(f"expected vector, got {_kind(v)}", path)
        if len(v.elements) != s.n:
            raise ShapeError(f"expected {s.n} elements, got {len(v.elements)}", path)
        for i, e in enumerate(v.elements):
            check_conforms(e, s.elem, f"{path}[{i}]")
    else:
        raise TypeError(f"not a shape: {s!r}")


def shape_of(v: Value) -> Shape:
    if isinstance(v, ScalarV):
        return R
    if isinstance(v, UnitV):
        return UNIT
    if isinstance(v, PairV):
        return PairS(shape_of(v.left), shape_of(v.right))
    if isinstance(v, VecV):
        if not v.elements:
            raise ShapeError("empty vector has no shape")
        s = shape_of(v.elements[0])
        for i, e in enumerate(v.elements[1:], 1):
            check_conforms(e, s, f"[{i}]")
        return VecS(len(v.elements), s)
    raise TypeError(f"not a value: {v!r}")


def _kind(v) -> str:
    return {ScalarV: "scalar", UnitV: "unit", PairV: "pair", VecV: "vector"}.get(
        type(v), type(v).__name__
    )


# --- vector-space operations -------------------------------------------------


def zero(s: Shape) -> Value:
    if isinstance(s, ScalarS):
        return ScalarV(0.0)
    if isinstance(s, UnitS):
        return UNIT_V
    if isinstance(s, PairS):
        return PairV(zero(s.left), zero(s.right))
    if isinstance(s, VecS):
        z = zero(s.elem)
        return VecV((z,) * s.n)
    raise TypeError(f"not a shape: {s!r}")


def add(u: Value, v: Value, path: str = "") -> Value:
    if isinstance(u, ScalarV) and isinstance(v, ScalarV):
        return ScalarV(u.x + v.x)
    if isinstance(u, PairV) and isinstance(v, PairV):
        return PairV(add(u.left, v.left, path + ".left"), add(u.right, v.right, path + ".right"))
    if isinstance(u, VecV) and isinstance(v, VecV):
        if len(u.elements) != len(v.elements):
            raise ShapeError(
                f"cannot add vectors of length {len(u.elements)} and {len(v.elements)}", path
            )
        return VecV(
            tuple(add(a, b, f"{path}[{i}]") for i, (a, b) in enumerate(zip(u.elements, v.elements)))
        )
    if isinstance(u, UnitV) and isinstance(v, UnitV):
        return UNIT_V
    raise ShapeError(f"cannot add {_kind(u)} and {_kind(v)}", path)


def neg(v: Value) -> Value:
    return scale_value(-1.0, v)


def scale_value(s: float, v: Value) -> Value:
    if isinstance(v, ScalarV):
        return ScalarV(s * v.x)
    if isinstance(v, PairV):
        return PairV(scale_value(s, v.left), scale_value(s, v.right))
    if isinstance(v, VecV):
        return VecV(tuple(scale_value(s, e) for e in v.elements))
    if isinstance(v, UnitV):
        return v
    raise TypeError(f"not a value: {v!r}")


def dot_value(u: Value, v: Value, path: str = ""):
    if isinstance(u, ScalarV) and isinstance(v, ScalarV):
        return u.x * v.x
    if isinstance(u, PairV) and isinstance(v, PairV):
        return dot_value(u.left, v.left, path + ".left") + dot_value(u.right, v.right, path + ".right")
    if isinstance(u, VecV) and isinstance(v, VecV):
        if len(u.elements) != len(v.elements):
            raise ShapeError("dot of vectors with different lengths", path)
        total = 0.0
        for i, (a, b) in enumerate(zip(u.elements, v.elements)):
            total = total + dot_value(a, b, f"{path}[{i}]")
        return total
    if isinstance(u, UnitV) and isinstance(v, UnitV):
        return 0.0
    raise ShapeError(f"cannot take dot product of {_kind(u)} and {_kind(v)}", path)


def sum_values(vs: Sequence[Value], s: Shape) -> Value:
    """Left-to-right sum of ``vs``; ``zero(s)`` when empty."""
    if not vs:
        return zero(s)
    acc = vs[0]
    for v in vs[1:]:
        acc = add(acc, v)
    return acc


# --- coordinates ------------------------------------------------------------


def dim(s: Shape) -> int:
    if isinstance(s, ScalarS):
        return 1
    if isinstance(s, UnitS):
        return 0
    if isinstance(s, PairS):
        return dim(s.left) + dim(s.right)
    if isinstance(s, VecS):
        return s.n * dim(s.elem)
    raise TypeError(f"not a shape: {s!r}")


def flatten(v: Value) -> list:
    out: list = []
    _flatten_into(v, out)
    return out


def _flatten_into(v: Value, out: list) -> None:
    if isinstance(v, ScalarV):
        out.append(v.x)
    elif isinstance(v, PairV):
        _flatten_into(v.left, out)
        _flatten_into(v.right, out)
    elif isinstance(v, VecV):
        for e in v.elements:
            _flatten_into(e, out)
    elif not isinstance(v, UnitV):
        raise TypeError(f"not a value: {v!r}")


def unflatten(s: Shape, xs: Sequence[float]) -> Value:
    xs = list(xs)
    if len(xs) != dim(s):
        raise ShapeError(f"shape {s} needs {dim(s)} coordinates, got {len(xs)}")
    it = iter(xs)
    return _build(s, it)


def _build(s: Shape, it) -> Value:
    if isinstance(s, ScalarS):
        return ScalarV(next(it))
    if isinstance(s, UnitS):
        return UNIT_V
    if isinstance(s, PairS):
        left = _build(s.left, it)
        return PairV(left, _build(s.right, it))
    if isinstance(s, VecS):
        return VecV(tuple(_build(s.elem, it) for _ in range(s.n)))
    raise TypeError(f"not a shape: {s!r}")


def one_hot(s: Shape, i: int) -> Value:
    n = dim(s)
    xs = [0.0] * n
    xs[i] = 1.0
    return unflatten(s, xs)


def basis(s: Shape) -> list:
    return [one_hot(s, i) for i in range(dim(s))]


# --- textual shape syntax ---------------------------------------------------

_SHAPE_TOKEN = re.compile(r"\s*(?:(\d+)|(R)|(x)|([()\[\],]))")


def parse_shape(text: str) -> Shape:
    """Parse ``R``, ``1`` (or ``()``), ``(S, S)`` or ``[n x S]``."""
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _SHAPE_TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ShapeError(f"bad shape syntax near {text[pos:]!r}")
        tokens.append(m.group(m.lastindex))
        pos = m.end()
        while pos < len(text) and text[pos].isspace():
            pos += 1

    def parse(i: int):
        if i >= len(tokens):
            raise ShapeError(f"unexpected end of shape {text!r}")
        t = tokens[i]
        if t == "R":
            return R, i + 1
        if t == "1":
            return UNIT, i + 1
        if t == "(":
            if i + 1 < len(tokens) and tokens[i + 1] == ")":
                return UNIT, i + 2
            a, i = parse(i + 1)
            expect(i, ",")
            b, i = parse(i + 1)
            expect(i, ")")
            return PairS(a, b), i + 1
        if t == "[":
            if i + 1 >= len(tokens) or not tokens[i + 1].isdigit():
                raise ShapeError(f"expected vector length in {text!r}")
            n = int(tokens[i + 1])
            expect(i + 2, "x")
            e, i = parse(i + 3)
            expect(i, "]")
            return VecS(n, e), i + 1
        raise ShapeError(f"unexpected {t!r} in shape {text!r}")

    def expect(i, tok):
        if i >= len(tokens) or tokens[i] != tok:
            raise ShapeError(f"expected {tok!r} in shape {text!r}")

    s, end = parse(0)
    if end != len(tokens):
        raise ShapeError(f"trailing input in shape {text!r}")
    return s
