"""Circuit-to-circuit passes with gate-count ledgers.

* :func:`coefficient_circuits` extracts the coefficients of one variable by
  evaluating copies of the circuit at ``0..D`` and inverting the Vandermonde
  system.
* :func:`derivative_circuit` recombines those coefficients into an
  iterated partial derivative.
* :func:`strassen_homogenize` and :func:`partial_homogenize` split every
  gate into its homogeneous slices ``0..d``.

Each pass returns ``(circuit, SizeLedger)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Sequence

from .circuit import ADD, CONST, INPUT, Circuit, CircuitBuilder, Gate, circuit_eval
from .errors import PreconditionError


@dataclass(frozen=True)
class SizeLedger:
    pass_name: str
    input_size: int
    output_size: int
    budget_formula: str
    budget_value: int

    @property
    def holds(self) -> bool:
        return self.output_size <= self.budget_value

    def to_json(self) -> dict:
        return {"pass": self.pass_name, "input_size": self.input_size,
                "output_size": self.output_size, "budget_value": self.budget_value,
                "budget_formula": self.budget_formula}


def vandermonde_inverse(nodes: Sequence[int]) -> list[list[Fraction]]:
    """Row ``m`` holds the weights taking values at ``nodes`` to the x^m coefficient.

    Built from the Lagrange basis: column ``j`` is the coefficient vector of
    ``prod_{i != j} (x - x_i) / (x_j - x_i)``.
    """
    n = len(nodes)
    inv = [[Fraction(0)] * n for _ in range(n)]
    for j, xj in enumerate(nodes):
        basis = [Fraction(1)]
        denom = Fraction(1)
        for i, xi in enumerate(nodes):
            if i == j:
                continue
            nxt = [Fraction(0)] * (len(basis) + 1)
            for t, c in enumerate(basis):
                nxt[t + 1] += c
                nxt[t] -= c * xi
            basis = nxt
            denom *= xj - xi
        for m in range(n):
            inv[m][j] = basis[m] / denom
    return inv


def _copy_with_const(b: CircuitBuilder, c: Circuit, var: int, value, shared: dict,
                     deps, live) -> int:
    """Append a copy of ``c`` with ``var := value``; var-free gates come from ``shared``."""
    local = {}
    for gid, g in enumerate(c.gates):
        if not live[gid]:
            continue
        if var not in deps[gid]:
            if gid not in shared:
                if g.kind == INPUT:
                    shared[gid] = b.input(g.var)
                elif g.kind == CONST:
                    shared[gid] = b._push(Gate(CONST, value=g.value))
                elif g.kind == ADD:
                    shared[gid] = b.add([shared[ch] for ch in g.children], g.weights)
                else:
                    shared[gid] = b.mul(shared[g.children[0]], shared[g.children[1]], *g.weights)
            local[gid] = shared[gid]
            continue

        def ref(ch):
            return local[ch]

        if g.kind == INPUT:
            local[gid] = b._push(Gate(CONST, value=Fraction(value)))
        elif g.kind == ADD:
            local[gid] = b.add([ref(ch) for ch in g.children], g.weights)
        else:
            local[gid] = b.mul(ref(g.children[0]), ref(g.children[1]), *g.weights)
    return local[c.outputs[0]]


def _coefficient_gates(b: CircuitBuilder, c: Circuit, var: int, D: int) -> list[int]:
    if len(c.outputs) != 1:
        raise PreconditionError("coefficient extraction needs a single-output circuit")
    if not 0 <= var < c.nvars:
        raise PreconditionError(f"variable x{var} out of range")
    deps = c.depends_on()
    live = c.reachable()
    out = c.outputs[0]
    if var not in deps[out]:
        shared: dict = {}
        root = _copy_with_const(b, c, var, 0, shared, deps, live)
        zero = b.const(0) if D > 0 else None
        return [root] + [zero] * D
    shared = {}
    copies = [_copy_with_const(b, c, var, j, shared, deps, live) for j in range(D + 1)]
    inv = vandermonde_inverse(list(range(D + 1)))
    outs = []
    for m in range(D + 1):
        kids = [(copies[j], w) for j, w in enumerate(inv[m]) if w]
        outs.append(b.add([k for k, _ in kids], [w for _, w in kids]))
    return outs


def coefficient_circuits(c: Circuit, var: int, D: int):
    """Circuit whose output ``j`` is the coefficient of ``x_var^j`` (``j = 0..D``)."""
    if D < 0:
        raise PreconditionError("degree bound must be non-negative")
    b = CircuitBuilder(c.nvars)
    outs = _coefficient_gates(b, c, var, D)
    res = b.build(outs)
    s = c.size()
    budget = (D + 1) * s + 3 * (D + 1) ** 2
    return res, SizeLedger("coefficient_circuits", s, res.size(), "(D+1)*s + 3*(D+1)^2", budget)


def derivative_circuit(c: Circuit, var: int, order: int, D: int):
    """``d^order c / d x_var^order`` given ``deg_var(c) <= D``."""
    s = c.size()
    budget = (D + 1) * s + 3 * (D + 1) ** 2
    b = CircuitBuilder(c.nvars)
    if order > D:
        res = b.build([b.const(0)])
        return res, SizeLedger("derivative_circuit", s, res.size(), "(D+1)*s + 3*(D+1)^2", budget)
    coefs = _coefficient_gates(b, c, var, D)
    x = b.input(var) if D > order else None
    powers = {}
    children, weights = [], []
    for j in range(order, D + 1):
        w = Fraction(factorial(j), factorial(j - order))
        p = j - order
        if p == 0:
            children.append(coefs[j])
        else:
            if p not in powers:
                powers[p] = x if p == 1 else b.mul(powers[p - 1], x)
            children.append(b.mul(coefs[j], powers[p]))
        weights.append(w)
    res = b.build([b.add(children, weights)])
    return res, SizeLedger("derivative_circuit", s, res.size(), "(D+1)*s + 3*(D+1)^2", budget)


class _Slicer:
    """Shared homogenization machinery; ``None`` marks an identically-zero slice."""

    def __init__(self, b: CircuitBuilder, d: int):
        self.b = b
        self.d = d

    def add(self, child_slices, weights):
        out = []
        for a in range(self.d + 1):
            kids = [(s[a], w) for s, w in zip(child_slices, weights) if s[a] is not None and w]
            if not kids:
                out.append(None)
            elif len(kids) == 1 and kids[0][1] == 1:
                out.append(kids[0][0])
            else:
                out.append(self.b.add([k for k, _ in kids], [w for _, w in kids]))
        return out

    def mul(self, left, right, wl, wr):
        w = wl * wr
        out = []
        for a in range(self.d + 1):
            if not w:
                out.append(None)
                continue
            pairs = [(left[t], right[a - t]) for t in range(a + 1)
                     if left[t] is not None and right[a - t] is not None]
            if not pairs:
                out.append(None)
            elif len(pairs) == 1:
                out.append(self.b.mul(pairs[0][0], pairs[0][1], w, 1))
            else:
                prods = [self.b.mul(x, y) for x, y in pairs]
                out.append(self.b.add(prods, [w] * len(prods)))
        return out

    def run(self, c: Circuit, leaf_slices) -> list[list]:
        slices: list = [None] * len(c.gates)
        live = c.reachable()
        for gid, g in enumerate(c.gates):
            if not live[gid]:
                continue
            if g.kind in (INPUT, CONST):
                slices[gid] = leaf_slices(g)
            elif g.kind == ADD:
                slices[gid] = self.add([slices[ch] for ch in g.children], g.weights)
            else:
                slices[gid] = self.mul(slices[g.children[0]], slices[g.children[1]], *g.weights)
        return slices

    def outputs(self, slices, outputs) -> list[int]:
        zero = None
        outs = []
        for o in outputs:
            for a in range(self.d + 1):
                gid = slices[o][a]
                if gid is None:
                    if zero is None:
                        zero = self.b.const(0)
                    gid = zero
                outs.append(gid)
        return outs


def strassen_homogenize(c: Circuit, d: int):
    """Homogeneous circuit with outputs ``[slice_0, ..., slice_d]`` per original output."""
    if d < 0:
        raise PreconditionError("degree must be non-negative")
    s = c.size()
    b = CircuitBuilder(c.nvars)
    if d == 0:
        values = circuit_eval(c, [0] * c.nvars)
        res = b.build([b.const(v) for v in values])
    else:
        sl = _Slicer(b, d)

        def leaf(g):
            out = [None] * (d + 1)
            if g.kind == INPUT:
                out[1] = b.input(g.var)
            elif g.value:
                out[0] = b.const(g.value)
            return out

        slices = sl.run(c, leaf)
        res = b.build(sl.outputs(slices, c.outputs))
    return res, SizeLedger("strassen_homogenize", s, res.size(), "s*(d+1)*(d+2)", s * (d + 1) * (d + 2))


def partial_homogenize(B: Circuit, Cp: Circuit, d: int, degrees: Sequence[int]):
    """Homogenize ``Cp`` on top of the homogeneous multi-output circuit ``B``.

    ``degrees[i]`` is the degree of B's output ``i``; input ``x_i`` of Cp is
    wired to that output at slice ``degrees[i]``. B's gates are kept as-is.
    Outputs are slices ``0..d`` of each Cp output.
    """
    if Cp.nvars != len(B.outputs):
        raise PreconditionError(f"Cp has {Cp.nvars} inputs but B has {len(B.outputs)} outputs")
    if len(degrees) != len(B.outputs):
        raise PreconditionError("need one degree per B output")
    b = CircuitBuilder(B.nvars)
    for g in B.gates:
        b._push(g)
        if g.kind == INPUT:
            b._inputs.setdefault(g.var, len(b.gates) - 1)
    sl = _Slicer(b, d)

    def leaf(g):
        out = [None] * (d + 1)
        if g.kind == INPUT:
            deg = degrees[g.var]
            if deg <= d:
                out[deg] = B.outputs[g.var]
        elif g.value:
            out[0] = b._push(Gate(CONST, value=g.value))
        return out

    slices = sl.run(Cp, leaf)
    res = b.build(sl.outputs(slices, Cp.outputs))
    sb, sc = B.size(), Cp.size()
    return res, SizeLedger("partial_homogenize", sb + sc, res.size(), "s_B + s_Cp*(d+1)*(d+2)",
                           sb + sc * (d + 1) * (d + 2))
