"""Algebraic circuits: DAGs of weighted additions and binary multiplications.

Gates are numbered topologically (children always precede parents). The size
of a circuit is the number of gates, inputs and constants included; edge
constants do not count.

Text format, one statement per line (``;`` also separates statements)::

    header nvars=3
    g1 = input x0
    g2 = const 3/1
    g3 = add (2/1)*g1 g2       # weight defaults to 1
    g4 = mul g1 g3             # n-ary mul is binarized on parse
    out g4
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import ArityError, CapExceeded, ParseError
from .field import as_fraction, format_rational, parse_rational
from .poly import SparsePoly, truncate_mod_ideal

INPUT, CONST, ADD, MUL = "input", "const", "add", "mul"
ONE = Fraction(1)


@dataclass(frozen=True)
class Gate:
    kind: str
    var: int = -1
    value: Fraction = Fraction(0)
    children: tuple = ()
    weights: tuple = ()


@dataclass(frozen=True)
class Circuit:
    nvars: int
    gates: tuple
    outputs: tuple

    def __post_init__(self):
        for gid, g in enumerate(self.gates):
            if g.kind == INPUT:
                if not 0 <= g.var < self.nvars:
                    raise ArityError(f"gate {gid} reads x{g.var} but nvars={self.nvars}")
            elif g.kind == MUL:
                if len(g.children) != 2:
                    raise ValueError(f"mul gate {gid} must have two children")
            elif g.kind == ADD:
                if not g.children:
                    raise ValueError(f"add gate {gid} has no children")
            elif g.kind != CONST:
                raise ValueError(f"unknown gate kind {g.kind!r}")
            if len(g.weights) != len(g.children):
                raise ValueError(f"gate {gid}: weights/children length mismatch")
            for c in g.children:
                if not 0 <= c < gid:
                    raise ValueError(f"gate {gid} references {c}: not topologically ordered")
        for o in self.outputs:
            if not 0 <= o < len(self.gates):
                raise ValueError(f"output {o} is not a gate")

    def size(self) -> int:
        return len(self.gates)

    def syntactic_degrees(self, input_degrees: Sequence[int] | None = None) -> list[int]:
        """Per-gate syntactic degree; zero constants get degree 0."""
        degs = []
        for g in self.gates:
            if g.kind == INPUT:
                degs.append(1 if input_degrees is None else input_degrees[g.var])
            elif g.kind == CONST:
                degs.append(0)
            elif g.kind == ADD:
                degs.append(max(degs[c] for c in g.children))
            else:
                degs.append(degs[g.children[0]] + degs[g.children[1]])
        return degs

    def syntactic_degree(self) -> int:
        degs = self.syntactic_degrees()
        return max((degs[o] for o in self.outputs), default=0)

    def reachable(self) -> list[bool]:
        live = [False] * len(self.gates)
        for o in self.outputs:
            live[o] = True
        for gid in range(len(self.gates) - 1, -1, -1):
            if live[gid]:
                for c in self.gates[gid].children:
                    live[c] = True
        return live

    def depends_on(self) -> list[frozenset]:
        """Input variables each gate reads (syntactically)."""
        deps = []
        for g in self.gates:
            if g.kind == INPUT:
                deps.append(frozenset((g.var,)))
            else:
                acc = frozenset()
                for c in g.children:
                    acc = acc | deps[c]
                deps.append(acc)
        return deps


class CircuitBuilder:
    """Append-only gate list; input gates are created once per variable."""

    def __init__(self, nvars: int):
        self.nvars = nvars
        self.gates: list[Gate] = []
        self._inputs: dict[int, int] = {}
        self._consts: dict[Fraction, int] = {}

    def _push(self, gate: Gate) -> int:
        self.gates.append(gate)
        return len(self.gates) - 1

    def input(self, var: int) -> int:
        gid = self._inputs.get(var)
        if gid is None:
            gid = self._inputs[var] = self._push(Gate(INPUT, var=var))
        return gid

    def const(self, value) -> int:
        value = as_fraction(value)
        gid = self._consts.get(value)
        if gid is None:
            gid = self._consts[value] = self._push(Gate(CONST, value=value))
        return gid

    def add(self, children: Sequence[int], weights: Sequence | None = None) -> int:
        if weights is None:
            weights = [ONE] * len(children)
        return self._push(Gate(ADD, children=tuple(children),
                               weights=tuple(as_fraction(w) for w in weights)))

    def mul(self, left: int, right: int, wl=ONE, wr=ONE) -> int:
        return self._push(Gate(MUL, children=(left, right),
                               weights=(as_fraction(wl), as_fraction(wr))))

    def mul_many(self, children: Sequence[int]) -> int:
        acc = children[0]
        for c in children[1:]:
            acc = self.mul(acc, c)
        return acc

    def build(self, outputs: Sequence[int]) -> Circuit:
        return Circuit(self.nvars, tuple(self.gates), tuple(outputs))


# ---------------------------------------------------------------------------
# text format

_GATE_REF = re.compile(r"g(\d+)\Z")
_TERM = re.compile(r"(?:\(([^)]*)\)\*)?g(\d+)\Z")


def _ref(token: str, ids: dict, lineno: int) -> int:
    m = _GATE_REF.match(token)
    if not m:
        raise ParseError(f"line {lineno}: bad gate reference {token!r}")
    gid = int(m.group(1))
    if gid not in ids:
        raise ParseError(f"line {lineno}: g{gid} used before definition")
    return ids[gid]


def _weighted(token: str, ids: dict, lineno: int):
    m = _TERM.match(token)
    if not m:
        raise ParseError(f"line {lineno}: bad operand {token!r}")
    w = parse_rational(m.group(1)) if m.group(1) is not None else ONE
    gid = int(m.group(2))
    if gid not in ids:
        raise ParseError(f"line {lineno}: g{gid} used before definition")
    return ids[gid], w


def parse_circuit(text: str) -> Circuit:
    statements = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0]
        for stmt in line.split(";"):
            stmt = stmt.strip()
            if stmt:
                statements.append((lineno, stmt))
    nvars = None
    gates: list[Gate] = []
    ids: dict[int, int] = {}
    outputs: list[int] = []
    max_var = -1
    for lineno, stmt in statements:
        tokens = stmt.replace("=", " = ").split()
        head = tokens[0]
        if head == "header":
            if len(tokens) != 4 or tokens[1:3] != ["nvars", "="]:
                raise ParseError(f"line {lineno}: bad header {stmt!r}")
            nvars = int(tokens[3])
            continue
        if head == "out":
            outputs.extend(_ref(t, ids, lineno) for t in tokens[1:])
            continue
        m = _GATE_REF.match(head)
        if not m or len(tokens) < 3 or tokens[1] != "=":
            raise ParseError(f"line {lineno}: cannot parse {stmt!r}")
        gid = int(m.group(1))
        if gid in ids:
            raise ParseError(f"line {lineno}: g{gid} defined twice")
        op, args = tokens[2], tokens[3:]
        if op == INPUT:
            if len(args) != 1 or not re.fullmatch(r"x\d+", args[0]):
                raise ParseError(f"line {lineno}: bad input {stmt!r}")
            var = int(args[0][1:])
            max_var = max(max_var, var)
            gates.append(Gate(INPUT, var=var))
        elif op == CONST:
            if len(args) != 1:
                raise ParseError(f"line {lineno}: bad const {stmt!r}")
            gates.append(Gate(CONST, value=parse_rational(args[0])))
        elif op == ADD:
            if not args:
                raise ParseError(f"line {lineno}: add without operands")
            pairs = [_weighted(a, ids, lineno) for a in args]
            gates.append(Gate(ADD, children=tuple(c for c, _ in pairs),
                              weights=tuple(w for _, w in pairs)))
        elif op == MUL:
            if len(args) < 2:
                raise ParseError(f"line {lineno}: mul needs at least two operands")
            pairs = [_weighted(a, ids, lineno) for a in args]
            (c0, w0), (c1, w1) = pairs[0], pairs[1]
            gates.append(Gate(MUL, children=(c0, c1), weights=(w0, w1)))
            for c, w in pairs[2:]:
                gates.append(Gate(MUL, children=(len(gates) - 1, c), weights=(ONE, w)))
        else:
            raise ParseError(f"line {lineno}: unknown operation {op!r}")
        ids[gid] = len(gates) - 1
    if nvars is None:
        nvars = max_var + 1
    elif max_var >= nvars:
        raise ParseError(f"input x{max_var} exceeds header nvars={nvars}")
    try:
        return Circuit(nvars, tuple(gates), tuple(outputs))
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def _operand(gid: int, w: Fraction) -> str:
    return f"g{gid + 1}" if w == 1 else f"({format_rational(w)})*g{gid + 1}"


def serialize_circuit(c: Circuit) -> str:
    lines = [f"header nvars={c.nvars}"]
    for gid, g in enumerate(c.gates):
        name = f"g{gid + 1}"
        if g.kind == INPUT:
            lines.append(f"{name} = input x{g.var}")
        elif g.kind == CONST:
            lines.append(f"{name} = const {format_rational(g.value)}")
        else:
            ops = " ".join(_operand(ch, w) for ch, w in zip(g.children, g.weights))
            lines.append(f"{name} = {g.kind} {ops}")
    lines.append("out " + " ".join(f"g{o + 1}" for o in c.outputs))
    return "\n".join(lines) + "\n"


def normalize(c: Circuit) -> Circuit:
    """Fold constant-only subtrees into const gates and drop dead gates."""
    live = c.reachable()
    consts: dict[int, Fraction] = {}
    for gid, g in enumerate(c.gates):
        if g.kind == CONST:
            consts[gid] = g.value
        elif g.kind == ADD and all(ch in consts for ch in g.children):
            consts[gid] = sum((consts[ch] * w for ch, w in zip(g.children, g.weights)), Fraction(0))
        elif g.kind == MUL and all(ch in consts for ch in g.children):
            (a, b), (wa, wb) = g.children, g.weights
            consts[gid] = consts[a] * wa * consts[b] * wb
    # a folded gate keeps only itself alive
    needed = [False] * len(c.gates)
    for o in c.outputs:
        needed[o] = True
    for gid in range(len(c.gates) - 1, -1, -1):
        if needed[gid] and gid not in consts:
            for ch in c.gates[gid].children:
                needed[ch] = True
    b = CircuitBuilder(c.nvars)
    remap: dict[int, int] = {}
    for gid, g in enumerate(c.gates):
        if not (needed[gid] and live[gid]):
            continue
        if gid in consts:
            remap[gid] = b.const(consts[gid])
        elif g.kind == INPUT:
            remap[gid] = b.input(g.var)
        elif g.kind == ADD:
            remap[gid] = b.add([remap[ch] for ch in g.children], g.weights)
        else:
            remap[gid] = b.mul(remap[g.children[0]], remap[g.children[1]], *g.weights)
    return b.build([remap[o] for o in c.outputs])


def pruned(c: Circuit) -> Circuit:
    """Drop gates that no output reaches (no folding)."""
    live = c.reachable()
    remap: dict[int, int] = {}
    gates = []
    for gid, g in enumerate(c.gates):
        if live[gid]:
            gates.append(Gate(g.kind, g.var, g.value, tuple(remap[ch] for ch in g.children), g.weights))
            remap[gid] = len(gates) - 1
    return Circuit(c.nvars, tuple(gates), tuple(remap[o] for o in c.outputs))


# ---------------------------------------------------------------------------
# evaluation


def _run(c: Circuit, leaf, zero, add, mul, scale, live=None):
    vals = [None] * len(c.gates)
    if live is None:
        live = c.reachable()
    for gid, g in enumerate(c.gates):
        if not live[gid]:
            continue
        if g.kind == INPUT or g.kind == CONST:
            vals[gid] = leaf(g)
        elif g.kind == ADD:
            acc = zero
            for ch, w in zip(g.children, g.weights):
                if w:
                    acc = add(acc, scale(vals[ch], w))
            vals[gid] = acc
        else:
            (a, b_), (wa, wb) = g.children, g.weights
            vals[gid] = scale(mul(vals[a], vals[b_]), wa * wb)
    return vals


def circuit_eval(c: Circuit, point: Sequence) -> list[Fraction]:
    """Exact values of all outputs at a rational point."""
    if len(point) != c.nvars:
        raise ArityError(f"point has {len(point)} coordinates, circuit has {c.nvars} inputs")
    point = [as_fraction(x) for x in point]
    vals = _run(c, lambda g: point[g.var] if g.kind == INPUT else g.value, Fraction(0),
                lambda x, y: x + y, lambda x, y: x * y, lambda x, w: x * w)
    return [vals[o] for o in c.outputs]


def circuit_eval_mod(c: Circuit, point: Sequence[int], modulus: int) -> list[int]:
    """Evaluation modulo a prime; edge constants must have invertible denominators."""

    def red(x: Fraction) -> int:
        return x.numerator * pow(x.denominator, -1, modulus) % modulus

    vals = _run(c, lambda g: point[g.var] % modulus if g.kind == INPUT else red(g.value), 0,
                lambda x, y: (x + y) % modulus, lambda x, y: x * y % modulus,
                lambda x, w: x * red(w) % modulus)
    return [vals[o] for o in c.outputs]


def _poly_run(c: Circuit, leaf_poly, nvars: int, degree_cap=None, term_cap=None,
              trunc=None, trunc_vars=None):
    zero = SparsePoly.zero(nvars)

    def check(p: SparsePoly) -> SparsePoly:
        if degree_cap is not None:
            d = p.degree()
            if d > degree_cap:
                raise CapExceeded("degree", degree_cap, d)
        if term_cap is not None and len(p) > term_cap:
            raise CapExceeded("terms", term_cap, len(p))
        return p

    def leaf(g):
        p = leaf_poly(g)
        if trunc is not None:
            p = truncate_mod_ideal(p, trunc, trunc_vars)
        return check(p)

    def mul(x, y):
        return check(x.mul(y, trunc, trunc_vars))

    def add(x, y):
        return check(x + y)

    return _run(c, leaf, zero, add, mul, lambda x, w: x.scale(w))


def expand_to_poly(c: Circuit, degree_cap: int | None = None,
                   term_cap: int | None = None) -> list[SparsePoly]:
    """Expand every output into a SparsePoly; raises CapExceeded on blow-up."""
    vals = _poly_run(c, lambda g: (SparsePoly.var(c.nvars, g.var) if g.kind == INPUT
                                   else SparsePoly.const(c.nvars, g.value)),
                     c.nvars, degree_cap, term_cap)
    return [vals[o] for o in c.outputs]


def gate_polys(c: Circuit) -> list[SparsePoly | None]:
    """Expansion of every reachable gate (None for dead gates)."""
    return _poly_run(c, lambda g: (SparsePoly.var(c.nvars, g.var) if g.kind == INPUT
                                   else SparsePoly.const(c.nvars, g.value)), c.nvars)


def compose_circuit_with_polys(c: Circuit, subs: Sequence[SparsePoly], degree_cap: int | None = None,
                               trunc: int | None = None, trunc_vars: Sequence[int] | None = None,
                               term_cap: int | None = None) -> list[SparsePoly]:
    """Evaluate the DAG over polynomials: ``c(subs[0], ..., subs[n-1])``.

    With ``trunc`` set, every gate is reduced modulo ``<trunc_vars>^trunc``
    (all variables when ``trunc_vars`` is None), which computes the
    truncation of the exact composition.
    """
    if len(subs) != c.nvars:
        raise ArityError(f"circuit has {c.nvars} inputs, got {len(subs)} substitutions")
    nv = {p.nvars for p in subs}
    if len(nv) > 1:
        raise ArityError("substituted polynomials disagree on nvars")
    nvars = nv.pop() if nv else 0
    vals = _poly_run(c, lambda g: subs[g.var] if g.kind == INPUT else SparsePoly.const(nvars, g.value),
                     nvars, degree_cap, term_cap, trunc, trunc_vars)
    return [vals[o] for o in c.outputs]


def substitute_input(c: Circuit, var: int, value) -> Circuit:
    """Replace input ``var`` by a constant; drops the variable when it is the last one."""
    value = as_fraction(value)
    b = CircuitBuilder(c.nvars - 1 if var == c.nvars - 1 else c.nvars)
    remap = {}
    cval = None
    for gid, g in enumerate(c.gates):
        if g.kind == INPUT:
            if g.var == var:
                if cval is None:
                    cval = b._push(Gate(CONST, value=value))
                remap[gid] = cval
            else:
                remap[gid] = b._push(Gate(INPUT, var=g.var))
        elif g.kind == CONST:
            remap[gid] = b._push(Gate(CONST, value=g.value))
        elif g.kind == ADD:
            remap[gid] = b.add([remap[ch] for ch in g.children], g.weights)
        else:
            remap[gid] = b.mul(remap[g.children[0]], remap[g.children[1]], *g.weights)
    return b.build([remap[o] for o in c.outputs])


def poly_to_circuit(p: SparsePoly) -> Circuit:
    """Depth-2 rendering: one product chain per monomial and a weighted sum."""
    b = CircuitBuilder(p.nvars)
    children, weights = [], []
    for e, coef in sorted(p.terms.items(), key=lambda kv: (sum(kv[0]), kv[0])):
        factors = [b.input(v) for v, x in enumerate(e) for _ in range(x)]
        children.append(b.const(1) if not factors else b.mul_many(factors))
        weights.append(coef)
    if not children:
        return b.build([b.const(0)])
    return b.build([b.add(children, weights)])
