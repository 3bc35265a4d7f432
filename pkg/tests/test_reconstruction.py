from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from algen.circuit import parse_circuit
from algen.corpus import linear_power, reconstruction_corpus
from algen.errors import PreconditionError, ReconstructionError
from algen.generator import build_gen
from algen.pit import find_annihilator
from algen.reconstruction import (
    annihilates,
    base_case,
    find_shift,
    gamma,
    step_update,
    preprocess,
    run_reconstruction,
    shifted_advice,
    size_ledger_report,
)
from algen.transforms import derivative_circuit
from util import ANN, CUBE, P

G3 = build_gen(CUBE, 2)


def test_annihilates():
    assert annihilates(ANN, G3)
    assert not annihilates(parse_circuit("g1=input x0; g2=input x1; g3=input x2; g4=add g1 g2 g3; out g4"), G3)


def test_preprocess_order_zero():
    pre = preprocess(ANN, G3)
    assert pre.order == 0 and pre.n == 2 and pre.substitutions == ()


def test_preprocess_square_has_order_one():
    sq = parse_circuit("""g1=input x0; g2=input x1; g3=input x2; g4=mul g1 g3; g5=mul g2 g2
g6=add (3)*g4 (-1)*g5; g7=mul g6 g6; out g7""")
    pre = preprocess(sq, G3)
    assert pre.order == 1
    assert annihilates(pre.Cp, G3)


def test_preprocess_rejects_non_annihilator():
    C = parse_circuit("g1=input x0; g2=input x1; g3=input x2; g4=mul g1 g2; out g4")
    with pytest.raises(PreconditionError):
        preprocess(C, G3)


def test_preprocess_drops_unused_last_input():
    C = parse_circuit("""header nvars=4
g1=input x0; g2=input x1; g3=input x2; g4=mul g1 g3; g5=mul g2 g2
g6=add (3)*g4 (-1)*g5; out g6""")
    pre = preprocess(C, build_gen(CUBE, 3))
    assert pre.n == 2 and pre.substitutions == (Fraction(0),) and pre.order == 0


def test_find_shift():
    assert find_shift(ANN, G3) == (Fraction(1),)


def test_base_case():
    st_ = base_case(shifted_advice(CUBE, [1], 2), 2)
    assert st_.component(1) == P(1, {1: 3})
    assert st_.partials[((2,), 2)] == P(1, {0: 6})
    with pytest.raises(PreconditionError):
        base_case([P(1, {1: 1}), P(1, {1: 1}), P(1, {2: 1})], 2)


def test_hand_trace():
    res = run_reconstruction(ANN, G3)
    assert res.shift == (1,)
    assert res.state.good.points == ((0,), (1,), (2,))
    assert res.state.psi_values == (3, 3, 3)
    st0 = base_case(shifted_advice(CUBE, [1], 2), 2)
    st0.good, st0.psi_values = res.state.good, res.state.psi_values
    g = gamma(st0, [1])
    assert g[0] == P(1, {0: 1, 1: 3, 2: 3})
    dC, _ = derivative_circuit(ANN, 2, 1, 2)
    u, alpha = step_update(ANN, dC, st0, [Fraction(1)], Fraction(3))
    # Cp(Gamma) mod z^2 is -9z, so the update is 3z
    assert u == P(1, {1: 3}) and alpha == 3
    assert res.poly == CUBE and res.verified


def test_trace_records():
    tr = run_reconstruction(ANN, G3).trace()
    assert [r["stage"] for r in tr] == ["preprocess", "step", "done"]
    assert tr[1]["alpha_matches"] and tr[1]["a_squared_zero"] and tr[1]["residual_zero"]


def test_missing_variable():
    Q = P(2, {(3, 0): 1, (0, 0): 2})
    G = build_gen(Q, 2)
    C = find_annihilator(G, 2)
    assert run_reconstruction(C, G).poly == Q


def test_blind_with_advice():
    calls = []

    def adv(a, n):
        calls.append(a)
        return shifted_advice(CUBE, a, n)

    res = run_reconstruction(ANN, G3, advice=adv, blind=True)
    assert res.poly == CUBE and res.verified is None and calls == [(1,)]


def test_wrong_advice_is_caught():
    with pytest.raises(ReconstructionError):
        run_reconstruction(ANN, G3, advice=lambda a, n: shifted_advice(P(1, {3: 2}), a, n))


def test_corpus_prefix():
    for Pp, n in reconstruction_corpus()[:6]:
        G = build_gen(Pp, n)
        C = find_annihilator(G, 4)
        assert run_reconstruction(C, G).poly == Pp


@settings(max_examples=15)
@given(st.integers(-3, 3).filter(bool), st.integers(-2, 2), st.integers(3, 6))
def test_linear_powers(a, c, d):
    Q = linear_power([a], c, d)
    G = build_gen(Q, 2)
    C = find_annihilator(G, 2)
    assert run_reconstruction(C, G).poly == Q


def test_size_ledger():
    r = size_ledger_report(1, 2, 3, 5)
    assert r["N"] == 3 and r["base"] == 9
    assert r["increment"] == (3 ** 10 + 15) * 9
    assert r["sizes"] == [9, 9 + r["increment"]]
    assert r["pre_homogenization"] == [9 + 3 ** 10 + 15]
    assert r["closed_form_matches"]
    assert size_ledger_report(2, 3, 3, 1)["sizes"] == [100]
