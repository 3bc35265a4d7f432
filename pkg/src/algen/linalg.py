"""Exact rank, nullspace and inverse over the rationals.

Rational rows are scaled to integers (which changes neither rank nor kernel)
and reduced by the fraction-free Gauss-Jordan kernel.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Sequence

from . import kernels
from .field import common_denominator


def _integer_rows(rows: Sequence[Sequence]) -> list[list[int]]:
    out = []
    for row in rows:
        row = [Fraction(x) for x in row]
        den = common_denominator(row)
        out.append([x.numerator * (den // x.denominator) for x in row])
    return out


def reduce(rows: Sequence[Sequence], ncols: int):
    """Integer reduced echelon form: ``(int_rows, pivot_cols, pivot_value)``."""
    m = _integer_rows(rows)
    for row in m:
        if len(row) != ncols:
            raise ValueError(f"row has {len(row)} entries, expected {ncols}")
    pivots, p = kernels.echelon(m, ncols)
    return m, pivots, p


def rank(rows: Sequence[Sequence], ncols: int | None = None) -> int:
    if not rows:
        return 0
    ncols = len(rows[0]) if ncols is None else ncols
    return len(reduce(rows, ncols)[1])


def nullspace(rows: Sequence[Sequence], ncols: int) -> list[list[Fraction]]:
    """Kernel basis, one vector per free column in ascending column order.

    The vector for free column ``f`` has a 1 at ``f``, zeros at the other free
    columns, and is supported otherwise on pivot columns left of ``f``.
    """
    m, pivots, p = reduce(rows, ncols)
    pivot_set = set(pivots)
    basis = []
    for f in range(ncols):
        if f in pivot_set:
            continue
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for r, c in enumerate(pivots):
            if m[r][f]:
                v[c] = Fraction(-m[r][f], p)
        basis.append(v)
    return basis


def primitive_integer(v: Sequence[Fraction]) -> list[int]:
    """Scale a nonzero rational vector to coprime integers, last nonzero entry positive."""
    den = common_denominator(v)
    ints = [x.numerator * (den // x.denominator) for x in v]
    g = 0
    for x in ints:
        g = gcd(g, x)
    if g == 0:
        return ints
    ints = [x // g for x in ints]
    last = next(x for x in reversed(ints) if x)
    return [-x for x in ints] if last < 0 else ints


def inverse(matrix: Sequence[Sequence]) -> list[list[Fraction]]:
    n = len(matrix)
    aug = [list(row) + [int(i == j) for j in range(n)] for i, row in enumerate(matrix)]
    m, pivots, p = reduce(aug, 2 * n)
    if pivots[:n] != list(range(n)) or len(pivots) < n:
        raise ValueError("matrix is singular")
    return [[Fraction(x, p) for x in row[n:]] for row in m[:n]]


def solve_vectors(inv: Sequence[Sequence[Fraction]], values: Sequence, zero):
    """``inv @ values`` for any values supporting ``+`` and scalar ``*``."""
    out = []
    for row in inv:
        acc = zero
        for c, v in zip(row, values):
            if c:
                acc = acc + v * c
        out.append(acc)
    return out
