"""Compositional automatic differentiation over pluggable linear-map representations.

A differentiable function is a map ``a -> (f a, f' a)`` whose derivative lives
in some category ``k``: additive functions, structured linear maps, or the
continuation, dual and forward transformers built on top of them.  The same
program, interpreted in different ``k``, yields forward or reverse mode.
"""

from .category import ADD, FUN, Additive, Category, Functions
from .front import Program, compile_source, show_cat
from .gad import DFun, Deriv, eval_d
from .linmap import MAT, Matrices, chain_order, lm_to_dense
from .rad import Begin, Cont, Dual, as_dual, gradient, jacobian, to_dense
from .shape import R, UNIT, PairS, ScalarS, Shape, ShapeError, UnitS, VecS, parse_shape

__version__ = "0.1.0"

__all__ = [
    "ADD",
    "FUN",
    "MAT",
    "Additive",
    "Category",
    "Functions",
    "Matrices",
    "DFun",
    "Deriv",
    "eval_d",
    "Begin",
    "Cont",
    "Dual",
    "as_dual",
    "gradient",
    "jacobian",
    "to_dense",
    "lm_to_dense",
    "chain_order",
    "Program",
    "compile_source",
    "show_cat",
    "R",
    "UNIT",
    "PairS",
    "ScalarS",
    "UnitS",
    "VecS",
    "Shape",
    "ShapeError",
    "parse_shape",
]
