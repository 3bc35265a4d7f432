import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from algen.circuit import (
    CircuitBuilder,
    circuit_eval,
    compose_circuit_with_polys,
    expand_to_poly,
    normalize,
    parse_circuit,
    poly_to_circuit,
    serialize_circuit,
    substitute_input,
)
from algen.corpus import random_circuit
from algen.errors import ArityError, CapExceeded, ParseError
from algen.poly import truncate_mod_ideal
from util import ANN, P


def test_square():
    c = parse_circuit("g1=input x0; g2=mul g1 g1; out g2")
    assert circuit_eval(c, [3]) == [9]
    assert expand_to_poly(c) == [P(1, {2: 1})]


def test_nary_mul_is_binarized():
    c = parse_circuit("g1=input x0; g2=input x1; g3=input x2; g4=mul g1 g2 g3; out g4")
    assert sum(g.kind == "mul" for g in c.gates) == 2
    assert circuit_eval(c, [2, 3, 5]) == [30]


@pytest.mark.parametrize("text", [
    "g1=mul g2 g2; g2=input x0; out g1",
    "g1=input x0; g1=input x1; out g1",
    "g1=const 1/0; out g1",
    "g1=input x0; out g9",
    "g1=frob x0; out g1",
])
def test_parse_errors(text):
    with pytest.raises(ParseError):
        parse_circuit(text)


def test_weighted_add():
    c = parse_circuit("g1=input x0; g2=input x1; g3=add (2)*g1 (3)*g2; out g3")
    assert circuit_eval(c, [1, 1]) == [5]


def test_annihilator_example():
    assert circuit_eval(ANN, [1, 3, 3]) == [0]
    assert expand_to_poly(ANN) == [P(3, {(1, 0, 1): 3, (0, 2, 0): -1})]


def test_degree_cap():
    b = CircuitBuilder(1)
    g = b.input(0)
    for _ in range(10):
        g = b.mul(g, g)
    c = b.build([g])
    with pytest.raises(CapExceeded) as info:
        expand_to_poly(c, degree_cap=100)
    assert info.value.which == "degree"
    assert c.syntactic_degree() == 1024


def test_term_cap():
    c = parse_circuit("g1=input x0; g2=input x1; g3=add g1 g2; g4=mul g3 g3; g5=mul g4 g4; out g5")
    with pytest.raises(CapExceeded) as info:
        expand_to_poly(c, term_cap=3)
    assert info.value.which == "terms"


def test_arity():
    with pytest.raises(ArityError):
        circuit_eval(ANN, [1, 2])


def test_compose_examples():
    subs = [P(2, {(3, 0): 1}), P(2, {(2, 1): 3}), P(2, {(1, 2): 3})]
    assert compose_circuit_with_polys(ANN, subs)[0].is_zero()
    proj = parse_circuit("g1=input x0; out g1")
    p = P(2, {(1, 1): 5, (0, 0): 1})
    assert compose_circuit_with_polys(proj, [p]) == [p]


def test_truncated_compose_gamma_example():
    # Gamma for (z+1)^3 with a = 1
    gamma = [P(1, {0: 1, 1: 3, 2: 3}), P(1, {0: 3, 1: 6}), P(1, {0: 3})]
    assert compose_circuit_with_polys(ANN, gamma, trunc=2) == [P(1, {1: -9})]


def test_serialize_roundtrip():
    text = serialize_circuit(ANN)
    again = parse_circuit(text)
    assert serialize_circuit(again) == text
    assert expand_to_poly(again) == expand_to_poly(ANN)


def test_size_ignores_constants():
    a = parse_circuit("g1=input x0; g2=add (2)*g1; out g2")
    b = parse_circuit("g1=input x0; g2=add (-7/3)*g1; out g2")
    assert a.size() == b.size() == 2


def test_normalize_folds_constants():
    c = parse_circuit("g1=const 2; g2=const 3; g3=mul g1 g2; g4=input x0; g5=add g3 g4; out g5")
    n = normalize(c)
    assert n.size() < c.size()
    assert expand_to_poly(n) == expand_to_poly(c)


def test_substitute_input():
    c = substitute_input(ANN, 2, 1)
    assert c.nvars == 2
    assert expand_to_poly(c) == [P(2, {(1, 0): 3, (0, 2): -1})]


def test_poly_to_circuit():
    p = P(2, {(2, 1): 3, (0, 0): -1})
    assert expand_to_poly(poly_to_circuit(p)) == [p]
    assert expand_to_poly(poly_to_circuit(P(2, {}))) == [P(2, {})]


@settings(max_examples=40)
@given(st.integers(0, 10 ** 6))
def test_expansion_matches_evaluation(seed):
    rng = random.Random(seed)
    c = random_circuit(rng, rng.randint(1, 3), max_size=25, max_deg=6)
    p = expand_to_poly(c)[0]
    pt = [Fraction(rng.randint(-5, 5), rng.randint(1, 4)) for _ in range(c.nvars)]
    assert p.eval(pt) == circuit_eval(c, pt)[0]
    assert p.degree() <= c.syntactic_degree()


@settings(max_examples=30)
@given(st.integers(0, 10 ** 6), st.integers(0, 6))
def test_truncated_compose_is_ideal_homomorphism(seed, m):
    rng = random.Random(seed)
    c = random_circuit(rng, 2, max_size=15, max_deg=4)
    subs = [P(2, {(1, 0): rng.randint(-2, 2), (0, 0): rng.randint(-2, 2), (1, 1): 1}),
            P(2, {(0, 1): 1, (2, 0): rng.randint(-2, 2)})]
    full = compose_circuit_with_polys(c, subs)[0]
    trunc = compose_circuit_with_polys(c, subs, trunc=m)[0]
    assert trunc == truncate_mod_ideal(full, m)
