"""Seeded random instances for property checks and benchmarks."""

from __future__ import annotations

import random
from fractions import Fraction

from .circuit import Circuit, CircuitBuilder
from .generator import build_gen
from .pit import annihilator_polys
from .poly import SparsePoly, monomials_upto


def random_poly(rng: random.Random, nvars: int, max_deg: int, max_terms: int,
                coef: int = 9) -> SparsePoly:
    monos = monomials_upto(nvars, max_deg)
    terms = {}
    for _ in range(rng.randint(1, max_terms)):
        c = rng.randint(-coef, coef)
        if c:
            terms[rng.choice(monos)] = Fraction(c)
    return SparsePoly(nvars, terms)


def random_circuit(rng: random.Random, nvars: int, max_size: int = 40, max_deg: int = 8,
                   coef: int = 3) -> Circuit:
    """Random single-output circuit with syntactic degree ``<= max_deg``.

    Multiplications whose degree would exceed the bound fall back to
    additions, so the bound always holds.
    """
    b = CircuitBuilder(nvars)
    gates = [b.input(i) for i in range(nvars)]
    degs = [1] * nvars
    if rng.random() < 0.5:
        gates.append(b.const(rng.randint(1, coef)))
        degs.append(0)
    target = rng.randint(len(gates) + 1, max(len(gates) + 1, max_size))
    while len(b.gates) < target:
        i, j = rng.randrange(len(gates)), rng.randrange(len(gates))
        if rng.random() < 0.45 and degs[i] + degs[j] <= max_deg:
            g = b.mul(gates[i], gates[j])
            degs.append(degs[i] + degs[j])
        else:
            w = [Fraction(rng.choice([x for x in range(-coef, coef + 1) if x])) for _ in range(2)]
            g = b.add([gates[i], gates[j]], w)
            degs.append(max(degs[i], degs[j]))
        gates.append(g)
    return b.build([gates[-1]])


def linear_power(coefs, constant, d: int) -> SparsePoly:
    """``(c_1 z_1 + ... + c_k z_k + constant)^d``."""
    k = len(coefs)
    L = SparsePoly.const(k, constant)
    for i, c in enumerate(coefs):
        L = L + SparsePoly.var(k, i).scale(c)
    return L ** d


def min_annihilator_degree(P: SparsePoly, n: int, max_D: int = 4):
    G = build_gen(P, n)
    for D in range(1, max_D + 1):
        if annihilator_polys(G, D):
            return D
    return None


def reconstruction_corpus(seed: int = 0) -> list[tuple[SparsePoly, int]]:
    """``(P, n)`` pairs with ``k <= 2``, ``deg P <= 8`` and an annihilator of degree ``<= 4``.

    Mixes powers of linear forms (a quadratic relation exists for any n >= 2),
    univariate polynomials with the least workable n, and the same univariate
    polynomials embedded in two variables.
    """
    rng = random.Random(seed)
    out: list[tuple[SparsePoly, int]] = []
    out.append((SparsePoly(1, {(3,): 1}), 2))
    out.append((SparsePoly(1, {(4,): 1, (3,): 1}), 3))
    for d in range(3, 9):
        a = rng.choice([1, 2, -1, 3])
        c = rng.choice([1, -2, 3, 0])
        out.append((linear_power([a], c, d), 2))
    for d in range(3, 7):
        a, b = rng.choice([1, 2, -1]), rng.choice([1, -1, 3])
        out.append((linear_power([a, b], rng.choice([0, 1, -1]), d), 2))
    for d in range(4, 9):
        while True:
            P = SparsePoly(1, {(i,): Fraction(rng.randint(-9, 9)) for i in range(d + 1)})
            if P.degree() == d:
                break
        for n in range(2, d):
            if min_annihilator_degree(P, n) is not None:
                out.append((P, n))
                break
    count = len(out)
    for P, n in list(out[:count]):
        if P.nvars == 1 and len(out) < 30:
            out.append((P.embed(2, [rng.randrange(2)]), n))
    return out
