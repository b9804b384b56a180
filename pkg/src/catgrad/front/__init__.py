"""Surface language front end: parsing, shape checking and translation to categorical terms."""

from dataclasses import dataclass

from ..shape import Shape
from .check import ShapeCheckError, evaluate, infer_shape
from .syntax import (
    DuplicateNameError,
    ParseError,
    SourceError,
    UnboundVariableError,
    parse,
    show_program,
)
from .translate import CatTerm, interpret, normalize, show_cat, to_cat


@dataclass(frozen=True)
class Program:
    pattern: object
    expr: object
    dom: Shape
    cod: Shape
    term: CatTerm

    def morphism(self, cat):
        return interpret(self.term, cat)

    def run(self, arg):
        return evaluate(self.pattern, self.expr, arg, self.dom)


def compile_source(text: str, arg_shape: Shape) -> Program:
    """Parse, shape-check and translate ``text`` at argument shape ``arg_shape``."""
    p, e = parse(text)
    cod = infer_shape(p, e, arg_shape)
    return Program(p, e, arg_shape, cod, to_cat(p, e, arg_shape))


__all__ = [
    "Program",
    "compile_source",
    "parse",
    "show_program",
    "infer_shape",
    "evaluate",
    "to_cat",
    "normalize",
    "show_cat",
    "interpret",
    "SourceError",
    "ParseError",
    "UnboundVariableError",
    "DuplicateNameError",
    "ShapeCheckError",
]
