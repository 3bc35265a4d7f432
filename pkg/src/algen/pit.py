"""Hitting sets, interpolating sets, annihilators and PIT deciders."""

from __future__ import annotations

import json
import os
import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Callable, Iterator, Sequence

from . import linalg
from .circuit import Circuit, circuit_eval, circuit_eval_mod, poly_to_circuit
from .errors import CapExceeded, PreconditionError
from .field import as_fraction, format_rational
from .generator import GeneratorMap, compose
from .parallel import chunked, pmap
from .poly import SparsePoly, bounded_compositions, monomials_upto

DEFAULT_ENUM_CAP = 10 ** 6


def enum_cap() -> int:
    raw = os.environ.get("ALGEN_ENUM_CAP")
    if raw:
        try:
            cap = int(raw)
        except ValueError:
            raise PreconditionError(f"ALGEN_ENUM_CAP={raw!r} is not an integer") from None
        if cap <= 0:
            raise PreconditionError("ALGEN_ENUM_CAP must be positive")
        return cap
    return DEFAULT_ENUM_CAP


def grid_indices(nvars: int, side: int) -> Iterator[tuple]:
    """All of ``{0..side-1}^nvars`` in ascending grlex order."""
    bound = (side - 1,) * nvars
    for total in range(nvars * (side - 1) + 1):
        yield from bounded_compositions(bound, total)


@dataclass
class HittingSet:
    """A lazily enumerated point set with its provenance.

    ``size`` counts enumerated points with multiplicity.
    """

    provenance: str
    params: dict
    size: int
    factory: Callable[[], Iterator[tuple]] = field(repr=False)

    @classmethod
    def from_points(cls, points, provenance="explicit", params=None) -> HittingSet:
        pts = [tuple(as_fraction(x) for x in p) for p in points]
        return cls(provenance, dict(params or {}), len(pts), lambda: iter(pts))

    def __iter__(self):
        return self.factory()

    def __len__(self):
        return self.size

    def materialize(self, cap: int | None = None) -> list[tuple]:
        cap = enum_cap() if cap is None else cap
        if self.size > cap:
            raise CapExceeded("enumeration", cap, self.size)
        return list(self)

    def to_jsonl(self, cap: int | None = None) -> str:
        return "".join(json.dumps([format_rational(x) for x in p]) + "\n"
                       for p in self.materialize(cap))


def load_points_jsonl(text: str) -> list[tuple]:
    pts = []
    for line in text.splitlines():
        line = line.strip()
        if line:
            pts.append(tuple(as_fraction(str(x)) for x in json.loads(line)))
    return pts


def trivial_grid_hitting_set(nvars: int, d: int, S: Sequence | None = None) -> HittingSet:
    """``S^nvars`` for polynomials of individual degree ``<= d`` (``S`` defaults to ``0..d``)."""
    S = list(range(d + 1)) if S is None else [as_fraction(x) for x in S]
    if len(S) <= d or len(set(S)) != len(S):
        raise PreconditionError(f"need at least {d + 1} distinct grid values, got {len(S)}")
    vals = [as_fraction(x) for x in S]

    def factory():
        for idx in grid_indices(nvars, len(vals)):
            yield tuple(vals[i] for i in idx)

    return HittingSet("trivial-grid", {"nvars": nvars, "individual_degree": d,
                                       "S": [format_rational(x) for x in vals]},
                      len(vals) ** nvars, factory)


# ---------------------------------------------------------------------------
# interpolating sets


@dataclass(frozen=True)
class InterpolatingSet:
    k: int
    n: int
    points: tuple
    monomials: tuple
    matrix: tuple
    inverse: tuple

    @property
    def M(self) -> int:
        return len(self.points)


def _eval_row(point, monomials):
    row = []
    for e in monomials:
        v = Fraction(1)
        for p, x in zip(e, point):
            if p:
                v *= x ** p
        row.append(v)
    return row


def interpolating_set_with_constraint(k: int, n: int, Q: SparsePoly,
                                      side: int | None = None) -> InterpolatingSet:
    """Greedy interpolating set for degree-``<= n`` polynomials avoiding ``Q = 0``.

    Scans ``{0..deg Q + n}^k`` in grlex order and keeps a point when Q does
    not vanish there and its monomial row raises the rank.
    """
    if Q.is_zero():
        raise PreconditionError("constraint polynomial must be nonzero")
    if Q.nvars != k:
        raise PreconditionError(f"constraint has {Q.nvars} variables, expected {k}")
    monos = monomials_upto(k, n)
    M = len(monos)
    side = Q.degree() + n + 1 if side is None else side
    basis: list[tuple[int, list[Fraction]]] = []
    points = []
    for pt in grid_indices(k, side):
        if not Q.eval(pt):
            continue
        row = _eval_row(pt, monos)
        for piv, brow in basis:
            f = row[piv]
            if f:
                row = [x - f * y for x, y in zip(row, brow)]
        piv = next((i for i, x in enumerate(row) if x), None)
        if piv is None:
            continue
        inv = 1 / row[piv]
        row = [x * inv for x in row]
        basis.append((piv, row))
        points.append(tuple(Fraction(x) for x in pt))
        if len(points) == M:
            break
    else:
        raise PreconditionError(
            f"grid of side {side} exhausted with {len(points)}/{M} points; "
            "the existence argument guarantees success, so this is a bug")
    matrix = [_eval_row(p, monos) for p in points]
    inverse = linalg.inverse(matrix)
    return InterpolatingSet(k, n, tuple(points), tuple(monos),
                            tuple(map(tuple, matrix)), tuple(map(tuple, inverse)))


# ---------------------------------------------------------------------------
# annihilators and hard polynomials


def annihilator_polys(G: GeneratorMap, D: int) -> list[SparsePoly]:
    """Kernel basis of ``C -> C o Gen`` on polynomials of degree ``<= D`` in n+1 variables.

    Columns are monomials in ascending grlex order. Because ``Delta_i`` is
    y-homogeneous of degree i, the map is block diagonal by the weight
    ``sum_i i*e_i`` and each block is solved separately.
    """
    if D < 1:
        raise PreconditionError("annihilator degree must be >= 1")
    nx = G.n + 1
    cols = monomials_upto(nx, D)
    nz = 2 * G.k
    images = {cols[0]: SparsePoly.const(nz, 1)}
    for e in cols[1:]:
        v = next(i for i, x in enumerate(e) if x)
        prev = list(e)
        prev[v] -= 1
        images[e] = images[tuple(prev)] * G.components[v]
    blocks: dict[int, list[int]] = {}
    for j, e in enumerate(cols):
        blocks.setdefault(sum(i * x for i, x in enumerate(e)), []).append(j)
    found = []
    for idxs in blocks.values():
        row_keys = sorted({m for j in idxs for m in images[cols[j]].terms})
        pos = {m: r for r, m in enumerate(row_keys)}
        rows = [[Fraction(0)] * len(idxs) for _ in row_keys]
        for c, j in enumerate(idxs):
            for m, v in images[cols[j]].terms.items():
                rows[pos[m]][c] = v
        for vec in linalg.nullspace(rows, len(idxs)):
            free = max(c for c, x in enumerate(vec) if x)
            found.append((idxs[free], {cols[idxs[c]]: x for c, x in enumerate(vec) if x}))
    found.sort(key=lambda t: t[0])
    out = []
    for _, terms in found:
        keys = sorted(terms, key=lambda e: (sum(e), e))
        ints = linalg.primitive_integer([terms[e] for e in keys])
        out.append(SparsePoly(nx, dict(zip(keys, ints))))
    return out


def find_annihilator(G: GeneratorMap, D: int) -> Circuit | None:
    """Lowest kernel vector as a depth-2 circuit, or None when the kernel is trivial.

    The result is re-checked by composing the circuit with the generator.
    """
    basis = annihilator_polys(G, D)
    if not basis:
        return None
    C = poly_to_circuit(basis[0])
    if not compose(C, G).is_zero():
        raise AssertionError("kernel vector does not annihilate the generator")
    return C


def hard_poly_from_hitting_set(H, k: int, d_prime: int) -> SparsePoly:
    """Nonzero k-variate polynomial of individual degree ``<= d'`` vanishing on ``H``.

    Only the first ``k`` coordinates of each point are used.
    """
    points = list(H)
    if (d_prime + 1) ** k <= len(points):
        raise PreconditionError(f"(d'+1)^k = {(d_prime + 1) ** k} must exceed |H| = {len(points)}")
    cols = sorted(bounded_grid_monomials(k, d_prime), key=lambda e: (sum(e), e))
    rows = [_eval_row([as_fraction(x) for x in p[:k]], cols) for p in points]
    vec = linalg.nullspace(rows, len(cols))[0]
    P = SparsePoly(k, {e: x for e, x in zip(cols, vec) if x})
    for p in points:
        if P.eval([as_fraction(x) for x in p[:k]]):
            raise AssertionError("extracted polynomial does not vanish on H")
    return P


def bounded_grid_monomials(k: int, d: int) -> list[tuple]:
    return list(grid_indices(k, d + 1))


# ---------------------------------------------------------------------------
# deciders


@dataclass(frozen=True)
class PitVerdict:
    verdict: str
    witness: tuple | None = None
    checked: int = 0
    trials: int | None = None
    error_bound: Fraction | None = None
    modulus: int | None = None

    def to_json(self) -> dict:
        out = {"verdict": self.verdict, "checked": self.checked}
        if self.witness is not None:
            out["witness"] = [format_rational(x) for x in self.witness]
        if self.trials is not None:
            out["trials"] = self.trials
        if self.error_bound is not None:
            out["error_bound"] = format_rational(self.error_bound)
        if self.modulus is not None:
            out["modulus"] = self.modulus
        return out


def pit_deterministic(C: Circuit, H, jobs: int = 1, chunk: int = 256) -> PitVerdict:
    """First point of ``H`` where some output is nonzero, else ``zero-on-H``."""
    checked = 0
    for block in chunked(H, chunk):
        values = pmap(lambda p: circuit_eval(C, p), block, jobs)
        for p, vals in zip(block, values):
            checked += 1
            if any(vals):
                return PitVerdict("nonzero", tuple(p), checked)
    return PitVerdict("zero-on-H", None, checked)


def pit_random(C: Circuit, D: int | None = None, trials: int = 20, seed: int = 0,
               modulus: int | None = None) -> PitVerdict:
    """Schwartz-Zippel test over ``{0..2D}^n``.

    A ``nonzero`` verdict is always correct. A ``zero`` verdict is wrong with
    probability at most ``(D/(2D+1))^trials``. With ``modulus`` set the
    circuit is evaluated modulo that prime; this is a speed mode outside the
    characteristic-zero setting, so its zero verdicts carry no guarantee over Q.
    """
    D = C.syntactic_degree() if D is None else D
    rng = random.Random(seed)
    side = 2 * D + 1
    for t in range(trials):
        if modulus is None:
            pt = tuple(Fraction(rng.randrange(side)) for _ in range(C.nvars))
            hit = any(circuit_eval(C, pt))
        else:
            ipt = [rng.randrange(modulus) for _ in range(C.nvars)]
            pt = tuple(Fraction(x) for x in ipt)
            hit = any(circuit_eval_mod(C, ipt, modulus))
        if hit:
            return PitVerdict("nonzero", pt, t + 1, trials, None, modulus)
    bound = Fraction(D, side) ** trials if modulus is None else Fraction(D, modulus) ** trials
    return PitVerdict("zero", None, trials, trials, bound, modulus)


def annihilator_exists_by_count(k: int, n: int, d: int, D: int) -> bool:
    """Dimension count: more monomials of degree <= D in n+1 vars than images can span."""
    return comb(n + 1 + D, D) > comb(2 * k + d * D, 2 * k)
