"""Acceptance checks, one per criterion, all exact.

Run under pytest, or directly with ``python3 tests/test_acceptance.py`` to
print one PASS/FAIL line per criterion.
"""

import io
import itertools
import math
import random
import sys
import time
from fractions import Fraction
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from algen.circuit import Circuit, CircuitBuilder, circuit_eval, expand_to_poly, parse_circuit
from algen.corpus import random_circuit, random_poly, reconstruction_corpus
from algen.generator import build_gen, components_equal_shifted
from algen.pipelines import bootstrap_pipeline, tau_coefficient_bound, tau_pipeline, tau_poly
from algen.pit import (
    HittingSet,
    annihilator_exists_by_count,
    annihilator_polys,
    find_annihilator,
    hard_poly_from_hitting_set,
    pit_deterministic,
    pit_random,
    trivial_grid_hitting_set,
)
from algen.poly import SparsePoly, delta, homogeneous_part, partial_derivative, taylor_shift, truncate_mod_ideal
from algen.reconstruction import base_case, gamma, step_update, run_reconstruction, shifted_advice
from algen.transforms import coefficient_circuits, derivative_circuit, partial_homogenize, strassen_homogenize

RESULTS = {}


def record(num, fn):
    t0 = time.perf_counter()
    try:
        detail = fn()
    except AssertionError as exc:
        RESULTS[num] = f"criterion {num:2d}: FAIL  {exc}"
        raise
    RESULTS[num] = f"criterion {num:2d}: PASS  {detail} ({time.perf_counter() - t0:.2f}s)"
    return detail


def _zvars(k):
    return range(k)


# 1 -------------------------------------------------------------------------

def criterion_1():
    rng = random.Random(1)
    t0 = time.perf_counter()
    for _ in range(200):
        k = rng.randint(1, 3)
        P = random_poly(rng, k, 8, 12)
        d = max(P.degree(), 0)
        total = SparsePoly.zero(2 * k)
        for i in range(d + 1):
            total = total + delta(P, i).poly
        shifted = P.substitute([SparsePoly.var(2 * k, i) + SparsePoly.var(2 * k, k + i) for i in range(k)])
        assert total == shifted, f"Taylor sum mismatch for {P}"
    el = time.perf_counter() - t0
    assert el < 5, f"took {el:.2f}s"
    return "200 polynomials"


# 2 -------------------------------------------------------------------------

def criterion_2():
    rng = random.Random(2)
    for _ in range(100):
        k = rng.randint(1, 2)
        P = random_poly(rng, k, 6, 8)
        n = rng.randint(0, 4)
        a = [rng.randint(-3, 3) for _ in range(k)]
        assert components_equal_shifted(build_gen(P, n), build_gen(taylor_shift(P, a), n), a)
    for _ in range(100):
        k = rng.randint(1, 2)
        j = rng.randint(1, 6)
        P = random_poly(rng, k, 7, 8)
        R = random_poly(rng, k, 8, 6)
        R = R - truncate_mod_ideal(R, j)
        Q = P + R
        for i in range(j + 1):
            lhs = truncate_mod_ideal(delta(P, i).poly, j - i, _zvars(k))
            rhs = truncate_mod_ideal(delta(Q, i).poly, j - i, _zvars(k))
            assert lhs == rhs, f"mod-ideal covariance fails at i={i}, j={j}"
    return "100 shift + 100 mod-ideal instances"


# 3 -------------------------------------------------------------------------

def criterion_3():
    G = build_gen(SparsePoly(1, {(3,): 1}), 2)
    target = SparsePoly(3, {(1, 0, 1): 3, (0, 2, 0): -1})
    basis = annihilator_polys(G, 2)
    assert any(b.scale(target.coefficient((1, 0, 1)) / b.coefficient((1, 0, 1))) == target
               for b in basis if b.coefficient((1, 0, 1))), "3x0x2 - x1^2 not in kernel"
    rng = random.Random(3)
    done = checked = 0
    while done < 50:
        k = rng.randint(1, 2)
        d = rng.randint(1, 3 if k == 1 else 2)
        D = rng.randint(1, 3 if k == 1 else 2)
        n = next(m for m in itertools.count(1) if annihilator_exists_by_count(k, m, d, D))
        n += rng.randint(0, 1)
        while True:
            P = random_poly(rng, k, d, 6)
            if P.degree() == d:
                break
        G = build_gen(P, n)
        polys = annihilator_polys(G, D)
        assert polys, f"count guarantees an annihilator for k={k} n={n} d={d} D={D}"
        for p in polys:
            assert p.substitute(list(G.components)).is_zero()
            checked += 1
        C = find_annihilator(G, D)
        assert C is not None
        done += 1
    return f"50 instances, {checked} kernel vectors composed to zero"


# 4 -------------------------------------------------------------------------

def criterion_4():
    C = parse_circuit("g1=input x0; g2=input x1; g3=input x2; g4=mul g1 g3; g5=mul g2 g2;"
                      " g6=add (3)*g4 (-1)*g5; out g6")
    cube = SparsePoly(1, {(3,): 1})
    G = build_gen(cube, 2)
    res = run_reconstruction(C, G)
    assert res.shift == (1,)
    psi1 = res.state.psi_values[res.state.good.points.index((1,))]
    assert psi1 == 3, f"Psi(1) = {psi1}"
    st = base_case(shifted_advice(cube, [1], 2), 2)
    st.good, st.psi_values = res.state.good, res.state.psi_values
    dC, _ = derivative_circuit(C, 2, 1, 2)
    u, alpha = step_update(C, dC, st, [Fraction(1)], Fraction(3))
    raw = u.scale(-3)
    assert raw == SparsePoly(1, {(1,): -9}), f"Cp(Gamma) mod z^2 = {raw}"
    assert u == SparsePoly(1, {(1,): 3})
    target = delta(cube, 2).poly.eval_vars({1: Fraction(1)}).embed(1, [0, 0])
    assert truncate_mod_ideal(target, 2) == u
    assert gamma(st, [1])[2] == SparsePoly(1, {(0,): 3})
    return "Psi(1)=3, Cp(Gamma)=-9z, update=3z"


# 5 -------------------------------------------------------------------------

def criterion_5():
    t0 = time.perf_counter()
    corpus = reconstruction_corpus()
    ok = 0
    for P, n in corpus:
        assert P.nvars <= 2 and P.degree() <= 8
        G = build_gen(P, n)
        C = next(c for c in (find_annihilator(G, D) for D in range(1, 5)) if c is not None)
        res = run_reconstruction(C, G)
        assert res.poly == P, f"wrong reconstruction of {P}"
        assert all(s.residual_zero for s in res.steps), f"nonzero residual for {P}"
        ok += 1
    el = time.perf_counter() - t0
    assert ok >= 30, f"only {ok} instances"
    assert el < 60, f"took {el:.1f}s"
    return f"{ok} instances"


# 6 -------------------------------------------------------------------------

def _coeffs_in(p, var, D):
    out = []
    for j in range(D + 1):
        out.append(SparsePoly(p.nvars, {e[:var] + (0,) + e[var + 1:]: c
                                        for e, c in p.terms.items() if e[var] == j}))
    return out


def _homogeneous_inputs(rng, m):
    """Multi-output circuit in 2 variables whose outputs are homogeneous."""
    R = random_circuit(rng, 2, max_size=10, max_deg=3)
    dR = R.syntactic_degree()
    H, _ = strassen_homogenize(R, dR)
    degs = [rng.randint(1, max(dR, 1)) for _ in range(m)]
    degs = [min(x, dR) for x in degs]
    return Circuit(H.nvars, H.gates, tuple(H.outputs[x] for x in degs)), degs


def criterion_6():
    rng = random.Random(6)
    for _ in range(100):
        c = random_circuit(rng, rng.randint(1, 3), max_size=40, max_deg=8)
        assert c.size() <= 40 and c.syntactic_degree() <= 8
        p = expand_to_poly(c)[0]
        s, d = c.size(), c.syntactic_degree()
        res, led = strassen_homogenize(c, d)
        assert expand_to_poly(res) == [homogeneous_part(p, j) for j in range(d + 1)]
        assert led.holds and res.size() <= s * (d + 1) * (d + 2)
        var = rng.randrange(c.nvars)
        D = max(p.degree_in(var), 0)
        res, led = coefficient_circuits(c, var, D)
        assert expand_to_poly(res) == _coeffs_in(p, var, D)
        assert led.holds and res.size() <= (D + 1) * s + 3 * (D + 1) ** 2
        order = rng.randint(0, 2)
        res, led = derivative_circuit(c, var, order, D)
        e = [0] * c.nvars
        e[var] = order
        assert expand_to_poly(res) == [partial_derivative(p, e)]
        assert led.holds and res.size() <= (D + 1) * s + 3 * (D + 1) ** 2
        B, degs = _homogeneous_inputs(rng, c.nvars)
        hd = rng.randint(0, 6)
        res, led = partial_homogenize(B, c, hd, degs)
        comp = p.substitute(expand_to_poly(B))
        assert expand_to_poly(res) == [homogeneous_part(comp, j) for j in range(hd + 1)]
        assert led.holds and res.size() <= (B.size() + s) * (hd + 1) * (hd + 2)
    return "100 circuits, four passes"


# 7 -------------------------------------------------------------------------

def _small_circuits():
    """Every circuit over x0, x1 and the constant 1 made of three +/- or * gates."""
    def rec(nodes, depth):
        if depth == 0:
            yield list(nodes)
            return
        m = len(nodes)
        for i in range(m):
            for j in range(i, m):
                yield from rec(nodes + [("mul", i, j)], depth - 1)
                yield from rec(nodes + [("add", i, j, 1)], depth - 1)
                if i != j:
                    yield from rec(nodes + [("add", i, j, -1)], depth - 1)
                    yield from rec(nodes + [("add", j, i, -1)], depth - 1)
    for spec in rec([("x", 0), ("x", 1), ("c",)], 3):
        b = CircuitBuilder(2)
        ids = []
        for node in spec:
            if node[0] == "x":
                ids.append(b.input(node[1]))
            elif node[0] == "c":
                ids.append(b.const(1))
            elif node[0] == "mul":
                ids.append(b.mul(ids[node[1]], ids[node[2]]))
            else:
                ids.append(b.add([ids[node[1]], ids[node[2]]], [Fraction(1), Fraction(node[3])]))
        yield b.build([ids[-1]])


def _grid_agrees(c, grid):
    p = expand_to_poly(c)[0]
    if p.individual_degree() > 3:
        return None
    v = pit_deterministic(c, grid)
    return (v.verdict == "nonzero") == (not p.is_zero())


BINOMIAL_ZERO = parse_circuit(
    "g1=input x0; g2=input x1; g3=add g1 g2; g4=mul g3 g3; g5=mul g1 g1;"
    " g6=mul g1 g2; g7=mul g2 g2; g8=add g4 (-1)*g5 (-2)*g6 (-1)*g7; out g8")


def criterion_7():
    grids = {k: trivial_grid_hitting_set(k, 3) for k in (1, 2)}
    checked = zeros = 0
    for c in _small_circuits():
        ok = _grid_agrees(c, grids[2])
        if ok is None:
            continue
        assert ok, "grid disagrees with expansion"
        checked += 1
    rng = random.Random(7)
    for _ in range(1500):
        k = rng.randint(1, 2)
        c = random_circuit(rng, k, max_size=12, max_deg=6)
        ok = _grid_agrees(c, grids[k])
        if ok is None:
            continue
        assert ok, "grid disagrees with expansion"
        checked += 1
    # randomized test over 100 seeds
    nonzero, zero = [], []
    while len(nonzero) < 10 or len(zero) < 5:
        k = rng.randint(1, 2)
        c = random_circuit(rng, k, max_size=12, max_deg=4)
        if expand_to_poly(c)[0].is_zero():
            if len(zero) < 5:
                zero.append(c)
        elif len(nonzero) < 10:
            nonzero.append(c)
        if len(zero) < 5 and rng.random() < 0.05:
            zero.append(BINOMIAL_ZERO)
    for c in zero:
        for seed in range(100):
            v = pit_random(c, None, 20, seed)
            assert v.verdict == "zero", "false nonzero verdict"
            zeros += 1
    false_zero = runs = 0
    bound_sum = Fraction(0)
    trial_hits = trial_total = 0
    trial_bound = Fraction(0)
    for c in nonzero:
        D = c.syntactic_degree()
        for seed in range(100):
            v = pit_random(c, D, 20, seed)
            runs += 1
            false_zero += v.verdict == "zero"
            bound_sum += Fraction(D, 2 * D + 1) ** 20
            r = random.Random(seed)
            for _ in range(20):
                pt = [Fraction(r.randrange(2 * D + 1)) for _ in range(c.nvars)]
                trial_hits += not any(circuit_eval(c, pt))
                trial_total += 1
                trial_bound += Fraction(D, 2 * D + 1)
    # one-sided Hoeffding slack at confidence 1 - 1e-9
    slack = math.sqrt(math.log(1e9) / (2 * trial_total))
    assert trial_hits / trial_total <= float(trial_bound / trial_total) + slack
    assert false_zero / runs <= float(bound_sum / runs) + math.sqrt(math.log(1e9) / (2 * runs))
    return (f"{checked} grid checks, {zeros} zero runs, false-zero {false_zero}/{runs}, "
            f"per-point vanish {trial_hits}/{trial_total}")


# 8 -------------------------------------------------------------------------

def criterion_8():
    rng = random.Random(8)
    for _ in range(50):
        k = rng.randint(1, 3)
        dp = rng.randint(1, 3)
        size = rng.randrange((dp + 1) ** k)
        H = HittingSet.from_points([[rng.randint(-5, 5) for _ in range(k)] for _ in range(size)])
        p = hard_poly_from_hitting_set(H, k, dp)
        assert not p.is_zero()
        assert p.individual_degree() <= dp
        assert all(p.eval(x) == 0 for x in H)
    p = hard_poly_from_hitting_set(HittingSet.from_points([(1,), (2,), (3,)]), 1, 3)
    t = tau_poly(3)
    # divide by the monic cubic: quotient must be a nonzero constant
    assert p.degree() <= 3
    c = p.coefficient((3,))
    assert c != 0 and p == t.scale(c), f"{p} is not a multiple of (z-1)(z-2)(z-3)"
    return "50 random sets and the {1,2,3} division check"


# 9 -------------------------------------------------------------------------

def criterion_9():
    assert tau_poly(4) == SparsePoly(1, {(4,): 1, (3,): -10, (2,): 35, (1,): -50, (0,): 24})
    for d in range(1, 13):
        top = max(abs(c) for c in tau_poly(d).terms.values())
        assert top <= tau_coefficient_bound(d), f"bound fails at d={d}"
    configs = [(3, 1, 1), (4, 2, 1), (4, 2, 2), (5, 1, 2), (6, 1, 3)]
    for d, s, t in configs:
        res = tau_pipeline(d, s, t)
        dq = res.lifted.degree()
        n_pts = sum(1 for _ in res.hitting_set)
        assert n_pts == (s * dq + 1) ** (2 * t) == res.hitting_set.size, (d, s, t, n_pts)
    return f"P_4, bound for d<=12, cardinality for {len(configs)} configs"


# 10 ------------------------------------------------------------------------

def criterion_10():
    res = bootstrap_pipeline(HittingSet.from_points([(1,), (2,), (3,)]), 1, 3)
    pts = HittingSet.from_points(res.hitting_set.materialize())
    rng = random.Random(10)
    nvars = res.generator.n + 1
    hits = 0
    for _ in range(20):
        while True:
            C = random_circuit(rng, nvars, max_size=8, max_deg=3)
            if not expand_to_poly(C)[0].is_zero():
                break
        hits += pit_deterministic(C, pts).verdict == "nonzero"
    assert hits == 20, f"{hits}/20 hit"
    return f"20/20 hit on {res.hitting_set.size} points"


# 11 ------------------------------------------------------------------------

def criterion_11():
    import subprocess

    from algen.cli import main
    from test_cli import CASES, GOLDEN

    def run(argv):
        out, err = io.StringIO(), io.StringIO()
        assert main([str(a) for a in argv], out, err) == 0, err.getvalue()
        return out.getvalue()

    for name, argv in sorted(CASES.items()):
        gold = (GOLDEN / f"{name}.out").read_text()
        outs = {run(list(argv) + ["--jobs", j]) for j in (1, 4)}
        outs.add(run(argv))
        outs.add(subprocess.run([sys.executable, "-m", "algen.cli", *map(str, argv)],
                                capture_output=True, check=True).stdout.decode())
        assert outs == {gold}, f"{name} differs from its golden file"
    return f"{len(CASES)} golden files"


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6,
            criterion_7, criterion_8, criterion_9, criterion_10, criterion_11]


@pytest.mark.parametrize("num", range(1, 12))
def test_criterion(num):
    record(num, CRITERIA[num - 1])


if __name__ == "__main__":
    failed = 0
    for i, fn in enumerate(CRITERIA, 1):
        try:
            record(i, fn)
        except AssertionError:
            failed += 1
        print(RESULTS[i], flush=True)
    sys.exit(1 if failed else 0)
