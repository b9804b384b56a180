"""Port graphs of categorical terms and DOT output.

Graphs are produced by running the term on symbolic wires: a :class:`Sym`
stands in for a scalar, and arithmetic on it records a node instead of
computing a number.  Plain graphs interpret the term as a function;
derivative graphs interpret it in the differentiable-function category and
push symbolic tangents (forward) or cotangents (dual, cont) through the
derivative, whose nodes are drawn inside a box.

Fan-out is made explicit when emitting: a port read by k > 1 consumers
gets a chain of k - 1 binary ``dup`` nodes.  Multiplying by one, multiplying by zero and
adding zero are folded away, so structural zeros never appear.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from types import SimpleNamespace

from .category import ADD, Functions
from .gad import Deriv
from .rad import Cont, Dual, as_dual
from .shape import Shape, dim, flatten, unflatten

MODES = ("plain", "forward", "dual", "cont")


@dataclass
class Node:
    id: int
    op: str  # input, output, const, mul, add, neg, sin, cos, exp, dup
    label: str
    inputs: list = field(default_factory=list)  # producer node ids
    deriv: bool = False


@dataclass
class PortGraph:
    nodes: list = field(default_factory=list)
    edges: list = field(default_factory=list)  # (src id, dst id, shape label)
    inputs: list = field(default_factory=list)
    outputs: list = field(default_factory=list)

    def count(self, op: str, deriv: bool | None = None) -> int:
        return sum(1 for n in self.nodes if n.op == op and (deriv is None or n.deriv == deriv))

    def op_nodes(self, deriv: bool | None = None) -> list:
        return [
            n for n in self.nodes
            if n.op not in ("input", "output") and (deriv is None or n.deriv == deriv)
        ]


class _Builder:
    def __init__(self):
        self.nodes: list = []
        self.deriv = False

    def node(self, op, label, inputs=()):
        ids = [self.port(x) for x in inputs]
        n = Node(len(self.nodes), op, label, ids, self.deriv)
        self.nodes.append(n)
        return Sym(self, n.id)

    def port(self, x) -> int:
        if isinstance(x, Sym):
            return x.id
        return self.node("const", f"{float(x):.6g}").id


class Sym:
    """A symbolic scalar wire; arithmetic records graph nodes."""

    __slots__ = ("b", "id")

    def __init__(self, b: _Builder, id: int):
        self.b = b
        self.id = id

    def __add__(self, other):
        if not isinstance(other, Sym) and other == 0:
            return self
        return self.b.node("add", "add", (self, other))

    def __radd__(self, other):
        if other == 0:
            return self
        return self.b.node("add", "add", (other, self))

    def __mul__(self, other):
        if not isinstance(other, Sym):
            if other == 0:
                return 0.0
            if other == 1:
                return self
        return self.b.node("mul", "mul", (self, other))

    def __rmul__(self, other):
        if other == 0:
            return 0.0
        if other == 1:
            return self
        return self.b.node("mul", "mul", (other, self))

    def __neg__(self):
        return self.b.node("neg", "neg", (self,))

    def __repr__(self):
        return f"Sym({self.id})"

    def __str__(self):
        return f"n{self.id}"


def _sym_prims(b: _Builder):
    def unary(name, fn):
        def op(x):
            if isinstance(x, Sym):
                return b.node(name, name, (x,))
            return fn(x)

        return op

    return SimpleNamespace(sin=unary("sin", math.sin), cos=unary("cos", math.cos), exp=unary("exp", math.exp))


def _inputs(b: _Builder, s: Shape, prefix: str):
    return unflatten(s, [b.node("input", f"{prefix}{i}") for i in range(dim(s))])


def _outputs(b: _Builder, value, prefix: str) -> None:
    for i, x in enumerate(flatten(value)):
        b.node("output", f"{prefix}{i}", (Sym(b, b.port(x)),))


def _finish(b: _Builder) -> PortGraph:
    g = PortGraph(
        nodes=b.nodes,
        inputs=[n.id for n in b.nodes if n.op == "input"],
        outputs=[n.id for n in b.nodes if n.op == "output"],
    )
    return _with_dups(g)


def _with_dups(g: PortGraph) -> PortGraph:
    """Give every port read k > 1 times a chain of k - 1 binary dup nodes, then renumber."""
    reads: dict = {}
    for n in g.nodes:
        for slot, src in enumerate(n.inputs):
            reads.setdefault(src, []).append((n.id, slot))
    order: list = []
    feed: dict = {}  # (reader id, slot) -> node object supplying it
    by_old = {n.id: Node(-1, n.op, n.label, [], n.deriv) for n in g.nodes}
    for n in g.nodes:
        order.append(by_old[n.id])
        rs = reads.get(n.id, [])
        if len(rs) <= 1:
            for r in rs:
                feed[r] = by_old[n.id]
            continue
        prev = by_old[n.id]
        dups = []
        for _ in range(len(rs) - 1):
            d = Node(-1, "dup", "dup", [prev], n.deriv)
            dups.append(d)
            order.append(d)
            prev = d
        for j, r in enumerate(rs):
            feed[r] = dups[min(j, len(dups) - 1)]
    for i, n in enumerate(order):
        n.id = i
    for old in g.nodes:
        by_old[old.id].inputs = [feed[(old.id, slot)] for slot in range(len(old.inputs))]
    for n in order:
        n.inputs = [x.id for x in n.inputs]
    edges = [(src, n.id, "R") for n in order for src in n.inputs]
    return PortGraph(
        nodes=order,
        edges=edges,
        inputs=[by_old[i].id for i in g.inputs],
        outputs=[by_old[i].id for i in g.outputs],
    )


def to_graph(term) -> PortGraph:
    """Dataflow graph of ``term`` as a plain function."""
    from .front.translate import interpret

    b = _Builder()
    f = interpret(term, Functions(prims=_sym_prims(b)))
    x = _inputs(b, term.dom, "x")
    _outputs(b, f.fn(x), "y")
    return _finish(b)


def to_graph_d(term, mode: str = "forward") -> PortGraph:
    """Primal graph plus a boxed derivative subgraph.

    ``forward`` pushes tangents ``dx`` to ``dy``; ``dual`` and ``cont`` pull
    cotangents ``dy`` back to ``dx``.
    """
    from .front.translate import interpret

    if mode not in ("forward", "dual", "cont"):
        raise ValueError(f"unknown derivative graph mode {mode!r}; use forward, dual or cont")
    b = _Builder()
    k = {"forward": ADD, "dual": Dual(ADD), "cont": Cont(ADD)}[mode]
    f = interpret(term, Deriv(k, prims=_sym_prims(b)))
    y, d = f.run(_inputs(b, term.dom, "x"))
    _outputs(b, y, "y")
    b.deriv = True
    if mode == "forward":
        _outputs(b, d.fn(_inputs(b, term.dom, "dx")), "dy")
    else:
        rev = d.rev if mode == "dual" else as_dual(d).rev
        _outputs(b, rev.fn(_inputs(b, term.cod, "dy")), "dx")
    return _finish(b)


# --- DOT ------------------------------------------------------------------------

_SHAPES = {"input": "plaintext", "output": "plaintext", "const": "plaintext", "dup": "point"}


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def emit_dot(g: PortGraph, name: str = "G") -> str:
    lines = [f"digraph {name} {{", "  rankdir=LR;", '  node [shape=circle, fontname="Helvetica"];']

    def node_line(n: Node, indent: str) -> str:
        attrs = [f"label={_quote(n.label)}"]
        if n.op in _SHAPES:
            attrs.append(f"shape={_SHAPES[n.op]}")
        return f"{indent}n{n.id} [{', '.join(attrs)}];"

    primal = [n for n in g.nodes if not n.deriv]
    deriv = [n for n in g.nodes if n.deriv]
    lines += [node_line(n, "  ") for n in primal]
    if deriv:
        lines.append("  subgraph cluster_derivative {")
        lines.append('    label="derivative";')
        lines.append("    style=rounded;")
        lines += [node_line(n, "    ") for n in deriv]
        lines.append("  }")
    for src, dst, _ in g.edges:
        lines.append(f"  n{src} -> n{dst};")
    lines.append("}")
    return "\n".join(lines) + "\n"


__all__ = ["Sym", "Node", "PortGraph", "to_graph", "to_graph_d", "emit_dot", "MODES"]
