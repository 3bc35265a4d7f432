"""Small constructors shared by the tests."""

from fractions import Fraction

from algen.circuit import parse_circuit
from algen.poly import SparsePoly


def P(nvars, terms):
    """``P(1, {3: 1})`` or ``P(2, {(2, 1): 3})``; integer keys mean one variable."""
    return SparsePoly(nvars, {(e,) if isinstance(e, int) else tuple(e): Fraction(c)
                              for e, c in terms.items()})


def var(nvars, i):
    return SparsePoly.var(nvars, i)


ANN = parse_circuit("""
header nvars=3
g1 = input x0
g2 = input x1
g3 = input x2
g4 = mul g1 g3
g5 = mul g2 g2
g6 = add (3)*g4 (-1)*g5
out g6
""")

CUBE = P(1, {3: 1})
