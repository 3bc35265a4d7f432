"""Recover P from a nonzero circuit that annihilates its generator.

The induction runs on truncated polynomials rather than on literal circuits.
Step ``j`` turns the order-``<= n`` partials of ``P_0..P_{n+j-1}`` into
those of ``P_{n+j}``:

1. assemble ``Gamma_{j-1,a}`` for every good point ``a``;
2. ``u_a = (-1/Psi(a)) * Cp(Gamma_{j-1,a}) mod <z>^(j+1)``;
3. interpolate the ``u_a`` into the order-``n`` partials of ``P_{n+j}``;
4. descend to lower orders with Euler's formula.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Callable, Sequence

from .circuit import Circuit, circuit_eval, compose_circuit_with_polys, expand_to_poly, substitute_input
from .errors import PreconditionError, ReconstructionError
from .field import format_rational
from .generator import GeneratorMap, compose, gen_eval
from .parallel import pmap
from .pit import InterpolatingSet, grid_indices, interpolating_set_with_constraint
from .poly import (
    SparsePoly,
    exp_factorial,
    euler_descend,
    homogeneous_part,
    monomials_of_degree,
    monomials_upto,
    partial_derivative,
    taylor_shift,
    truncate_mod_ideal,
)
from .transforms import derivative_circuit


def _screen_nonzero(C: Circuit, G: GeneratorMap, rng: random.Random, tries: int = 3) -> bool:
    """True when ``C o G`` is nonzero at a random integer point (a certificate)."""
    for _ in range(tries):
        pt = [Fraction(rng.randrange(1, 1 << 20)) for _ in range(2 * G.k)]
        if any(circuit_eval(C, gen_eval(G, pt))):
            return True
    return False


def annihilates(C: Circuit, G: GeneratorMap, seed: int = 0) -> bool:
    """Exact test of ``C o G == 0``; random evaluation short-circuits the nonzero case."""
    if _screen_nonzero(C, G, random.Random(seed)):
        return False
    return compose(C, G).is_zero()


# ---------------------------------------------------------------------------
# preprocessing


@dataclass(frozen=True)
class Preprocessed:
    Cp: Circuit
    order: int
    n: int
    substitutions: tuple = ()

    def to_json(self) -> dict:
        return {"order": self.order, "n": self.n,
                "substitutions": [format_rational(v) for v in self.substitutions]}


def _hat_is_zero(C: Circuit, G: GeneratorMap) -> bool:
    """Whether ``C(g_0, ..., g_{n-1}, X)`` vanishes identically."""
    nz = 2 * G.k
    subs = [c.embed(nz + 1, list(range(nz))) for c in G.components[:G.n]]
    subs.append(SparsePoly.var(nz + 1, nz))
    rng = random.Random(1)
    for _ in range(3):
        pt = [Fraction(rng.randrange(1, 1 << 20)) for _ in range(nz + 1)]
        if any(circuit_eval(C, [s.eval(pt) for s in subs])):
            return False
    return compose_circuit_with_polys(C, subs)[0].is_zero()


def preprocess(C: Circuit, G: GeneratorMap, D: int | None = None) -> Preprocessed:
    """Find ``Cp = d^i C / d x_n^i`` with ``Cp o G = 0`` and ``(dCp/dx_n) o G != 0``.

    When ``C(g_0..g_{n-1}, x_n)`` is identically zero the last input is fixed
    to the first value in ``0..D`` keeping the circuit nonzero, and the search
    continues on the generator truncated to ``n - 1``.
    """
    if C.nvars != G.n + 1:
        raise PreconditionError(f"circuit has {C.nvars} inputs, generator has {G.n + 1} outputs")
    D = C.syntactic_degree() if D is None else D
    if not annihilates(C, G):
        raise PreconditionError("circuit does not annihilate the generator")
    subs: list[Fraction] = []
    while True:
        n = G.n
        if n > 0 and _hat_is_zero(C, G):
            for a in range(D + 1):
                Ca = substitute_input(C, n, a)
                if not _is_zero_circuit(Ca):
                    break
            else:
                raise PreconditionError("circuit is identically zero")
            C = Ca
            G = G.truncated(n - 1)
            subs.append(Fraction(a))
            continue
        if _is_zero_circuit(C):
            raise PreconditionError("circuit is identically zero")
        prev = C
        for i in range(D + 1):
            nxt, _ = derivative_circuit(C, n, i + 1, D)
            if not annihilates(nxt, G):
                return Preprocessed(prev, i, n, tuple(subs))
            prev = nxt
        raise ReconstructionError("no derivative order switches from zero to nonzero")


def _is_zero_circuit(C: Circuit) -> bool:
    rng = random.Random(2)
    for _ in range(3):
        if any(circuit_eval(C, [Fraction(rng.randrange(1, 1 << 20)) for _ in range(C.nvars)])):
            return False
    return all(p.is_zero() for p in expand_to_poly(C))


# ---------------------------------------------------------------------------
# shift search


def find_shift(Cp: Circuit, G: GeneratorMap, d: int | None = None, D: int | None = None):
    """Least ``a`` in ``{0..dD}^k`` (grlex) with ``Psi(y) != 0`` after shifting by ``a``."""
    d = G.d if d is None else d
    D = Cp.syntactic_degree() if D is None else D
    side = d * D + 1
    dC, _ = derivative_circuit(Cp, G.n, 1, D)
    for idx in grid_indices(G.k, side):
        a = tuple(Fraction(x) for x in idx)
        if not compose_circuit_with_polys(dC, G.at_z(a))[0].is_zero():
            return a
    raise ReconstructionError(f"no good shift in the grid of side {side}")


# ---------------------------------------------------------------------------
# state


@dataclass
class ReconstructionState:
    k: int
    n: int
    j: int
    partials: dict
    good: InterpolatingSet | None = None
    psi_values: tuple = ()
    Cp: Circuit | None = None

    def component(self, ell: int) -> SparsePoly:
        return self.partials[((0,) * self.k, ell)]

    def prefix_partial(self, e: tuple, top: int) -> SparsePoly:
        out = SparsePoly.zero(self.k)
        for ell in range(top + 1):
            out = out + self.partials[(e, ell)]
        return out


def base_case(advice: Sequence[SparsePoly], n: int) -> ReconstructionState:
    """All ``d^e P_l`` with ``|e| <= n`` and ``l <= n`` by direct differentiation."""
    if len(advice) != n + 1:
        raise PreconditionError(f"need {n + 1} advice components, got {len(advice)}")
    k = advice[0].nvars
    parts = {}
    for ell, p in enumerate(advice):
        if not p.is_homogeneous(ell):
            raise PreconditionError(f"advice component {ell} is not homogeneous of degree {ell}")
        for e in monomials_upto(k, n):
            parts[(e, ell)] = partial_derivative(p, e)
    return ReconstructionState(k, n, 0, parts)


def gamma(state: ReconstructionState, a: Sequence) -> list[SparsePoly]:
    """``(Delta_i(P_{<= n+j-1})(z, a))_{i=0..n}`` from stored partials (``j`` = next step)."""
    top = state.n + state.j
    out = []
    for i in range(state.n + 1):
        acc = SparsePoly.zero(state.k)
        for e in monomials_of_degree(state.k, i):
            w = Fraction(1, exp_factorial(e))
            for x, p in zip(a, e):
                if p:
                    w *= x ** p
            if w:
                acc = acc + state.prefix_partial(e, top).scale(w)
        out.append(acc)
    return out


@dataclass
class StepRecord:
    j: int
    psi_values: list
    alpha_matches: bool
    a_squared_zero: bool
    residual_zero: bool | None
    recovered_terms: int

    def to_json(self) -> dict:
        return {"j": self.j, "psi_values": [format_rational(v) for v in self.psi_values],
                "alpha_matches": self.alpha_matches, "a_squared_zero": self.a_squared_zero,
                "residual_zero": self.residual_zero, "recovered_terms": self.recovered_terms}


def step_update(Cp: Circuit, dC: Circuit, state: ReconstructionState, a, psi_a: Fraction):
    """``u = (-1/Psi(a)) * Cp(Gamma) mod <z>^(j+1)`` and the independently computed ``alpha``."""
    j = state.j + 1
    G = gamma(state, a)
    val = compose_circuit_with_polys(Cp, G, trunc=j + 1)[0]
    u = val.scale(Fraction(-1) / psi_a)
    origin = [g.constant_term() for g in G]
    alpha = circuit_eval(dC, origin)[0]
    return u, alpha


def inductive_step(state: ReconstructionState, Cp: Circuit, dC: Circuit,
                   truth: SparsePoly | None = None, jobs: int = 1):
    """Advance ``state`` from ``j-1`` to ``j``; returns ``(new_state, StepRecord)``.

    ``truth`` is the shifted ground-truth polynomial; when given, the update
    residual is checked against it.
    """
    k, n = state.k, state.n
    j = state.j + 1
    ell = n + j
    pts = state.good.points
    results = pmap(lambda t: step_update(Cp, dC, state, pts[t], state.psi_values[t]),
                   range(len(pts)), jobs)
    us = []
    alpha_ok = True
    a_sq = True
    for (u, alpha), psi_a in zip(results, state.psi_values):
        alpha_ok &= alpha == psi_a
        low = truncate_mod_ideal(u, j)
        if not low.is_zero():
            raise ReconstructionError(f"step {j}: update has terms below degree {j}")
        a_sq &= truncate_mod_ideal(u.mul(u, trunc=j + 1), j + 1).is_zero()
        us.append(u)
    if not alpha_ok:
        raise ReconstructionError(f"step {j}: alpha differs from Psi(a)")
    if not a_sq:
        raise ReconstructionError(f"step {j}: A^2 is not zero mod <z>^{j + 1}")
    residual = None
    if truth is not None:
        target = homogeneous_part(truth, ell)
        residual = True
        for a, u in zip(pts, us):
            A = _delta_at(target, n, a)
            if not truncate_mod_ideal(u - A, j + 1).is_zero():
                residual = False
        if not residual:
            raise ReconstructionError(f"step {j}: update residual is nonzero")
    # interpolation: u_t = sum_{|e|=n} a_t^e / e! * d^e P_ell
    inv = state.good.inverse
    monos = state.good.monomials
    top = {}
    for r, e in enumerate(monos):
        acc = SparsePoly.zero(k)
        for t, w in enumerate(inv[r]):
            if w:
                acc = acc + us[t].scale(w)
        if sum(e) < n:
            if not acc.is_zero():
                raise ReconstructionError(f"step {j}: interpolated low-order coefficient is nonzero")
            continue
        top[e] = homogeneous_part(acc, j).scale(exp_factorial(e))
    parts = euler_descend(top, ell, n)
    new = dict(state.partials)
    for e in monomials_upto(k, n):
        p = parts[e]
        if not p.is_homogeneous(ell - sum(e)):
            raise ReconstructionError(f"step {j}: recovered partial is not homogeneous")
        new[(e, ell)] = p
    nxt = ReconstructionState(k, n, j, new, state.good, state.psi_values, state.Cp)
    rec = StepRecord(j, list(state.psi_values), alpha_ok, a_sq, residual, len(parts[(0,) * k]))
    return nxt, rec


def _delta_at(p: SparsePoly, i: int, a) -> SparsePoly:
    out = SparsePoly.zero(p.nvars)
    for e in monomials_of_degree(p.nvars, i):
        w = Fraction(1, exp_factorial(e))
        for x, q in zip(a, e):
            if q:
                w *= x ** q
        if w:
            out = out + partial_derivative(p, e).scale(w)
    return out


# ---------------------------------------------------------------------------
# driver


@dataclass
class ReconstructionResult:
    poly: SparsePoly
    shift: tuple
    pre: Preprocessed
    steps: list = field(default_factory=list)
    state: ReconstructionState | None = None
    verified: bool | None = None
    d: int = 0

    def trace(self) -> list[dict]:
        head = {"stage": "preprocess", **self.pre.to_json(),
                "shift": [format_rational(x) for x in self.shift],
                "good_points": [[format_rational(x) for x in p] for p in self.state.good.points]}
        out = [head]
        for st in self.steps:
            out.append({"stage": "step", **st.to_json()})
        out.append({"stage": "done", "verified": self.verified, "terms": len(self.poly)})
        return out


def shifted_advice(P: SparsePoly, a: Sequence, n: int) -> list[SparsePoly]:
    """Homogeneous components ``0..n`` of ``P(z + a)``."""
    sh = taylor_shift(P, a)
    return [homogeneous_part(sh, ell) for ell in range(n + 1)]


def run_reconstruction(C: Circuit, G: GeneratorMap, D: int | None = None,
                       advice: Callable[[tuple, int], Sequence[SparsePoly]] | None = None,
                       blind: bool = False, jobs: int = 1) -> ReconstructionResult:
    """Full pipeline: preprocess, shift, base case, ``d - n`` steps, un-shift.

    ``advice(a, n)`` must return the low components of the shifted P. It
    defaults to computing them from ``G.source``. With ``blind`` the ground
    truth is used for nothing else: no per-step residual, no final check.
    """
    D = C.syntactic_degree() if D is None else D
    pre = preprocess(C, G, D)
    Gn = G if pre.n == G.n else G.truncated(pre.n)
    n, k, d = pre.n, G.k, G.d
    a = find_shift(pre.Cp, Gn, d, D)
    if advice is None:
        advice = lambda pt, m: shifted_advice(G.source, pt, m)
    state = base_case(list(advice(a, n)), n)
    dC, _ = derivative_circuit(pre.Cp, n, 1, D)
    Psi = compose_circuit_with_polys(dC, Gn.at_z(a))[0]
    good = interpolating_set_with_constraint(k, n, Psi)
    state.good = good
    state.psi_values = tuple(Psi.eval(p) for p in good.points)
    state.Cp = pre.Cp
    truth = None if blind else taylor_shift(G.source, a)
    steps = []
    for _ in range(max(d - n, 0)):
        state, rec = inductive_step(state, pre.Cp, dC, truth, jobs)
        steps.append(rec)
    top = max(d, n)
    shifted = SparsePoly.zero(k)
    for ell in range(top + 1):
        shifted = shifted + state.component(ell)
    P = taylor_shift(shifted, [-x for x in a])
    verified = None if blind else P == G.source
    if verified is False:
        raise ReconstructionError("recovered polynomial differs from the source")
    return ReconstructionResult(P, a, pre, steps, state, verified, d)


def reconstruct(C: Circuit, G: GeneratorMap, advice=None, D: int | None = None) -> SparsePoly:
    return run_reconstruction(C, G, D, advice).poly


# ---------------------------------------------------------------------------
# size accounting


def size_ledger_report(k: int, n: int, d: int, s_prime: int) -> dict:
    """Gate counts the circuit version of the induction would use.

    ``s_0 = N^2`` and ``s_j = s_{j-1} + (N^10 + s'N) d^2``, with
    ``N = binom(n+k, k)``. Informational only.
    """
    N = comb(n + k, k)
    inc = (N ** 10 + s_prime * N) * d * d
    sizes = [N * N]
    pre_hom = []
    for _ in range(max(d - n, 0)):
        pre_hom.append(sizes[-1] + N ** 10 + s_prime * N)
        sizes.append(sizes[-1] + inc)
    steps = max(d - n, 0)
    closed = N * N + steps * inc
    return {"N": N, "s_prime": s_prime, "base": N * N, "increment": inc,
            "pre_homogenization": pre_hom, "sizes": sizes, "total": sizes[-1],
            "closed_form": closed, "closed_form_matches": closed == sizes[-1]}
