"""Parameter calculator and the three hitting-set pipelines.

Full-scale parameters are astronomically large, so :func:`derand_params`
only computes them as big integers. The pipelines run at desk scale with
explicit small inputs and enumerate lazily under the enumeration cap.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, factorial, isqrt
from typing import Callable, Union

from .errors import PreconditionError
from .field import as_fraction, bit_length, format_rational
from .generator import GeneratorMap, build_gen, gen_eval
from .pit import HittingSet, enum_cap, grid_indices, hard_poly_from_hitting_set
from .poly import SparsePoly, kronecker_lift

KSpec = Union[int, Callable[[int], int]]


def ceil_root(x: int, t: int) -> int:
    """Smallest integer r with r**t >= x (for x >= 0, t >= 1)."""
    if x <= 1:
        return max(x, 0)
    if t == 1:
        return x
    if t == 2:
        r = isqrt(x)
        return r if r * r == x else r + 1
    r = 1 << -(-x.bit_length() // t)
    # Newton descent from above
    while True:
        nr = ((t - 1) * r + x // r ** (t - 1)) // t
        if nr >= r:
            break
        r = nr
    while r ** t < x:
        r += 1
    while r > 1 and (r - 1) ** t >= x:
        r -= 1
    return r


def _k_of(k: KSpec) -> Callable[[int], int]:
    if callable(k):
        return k
    if k < 1:
        raise PreconditionError("k must be >= 1")
    return lambda _d: k


@dataclass(frozen=True)
class DerandParams:
    s: int
    delta: Fraction
    t: int
    k: int
    d: int
    d_prime: int
    size: int
    k_tilde: int | None
    iterations: int

    def to_json(self) -> dict:
        return {
            "s": self.s,
            "delta": format_rational(self.delta),
            "t": self.t,
            "k": self.k,
            "k_tilde": self.k_tilde,
            "d": str(self.d),
            "d_bits": self.d.bit_length(),
            "d_prime": str(self.d_prime),
            "hitting_set_size": str(self.size),
            "hitting_set_size_bits": self.size.bit_length(),
            "fixed_point_iterations": self.iterations,
        }


def derand_params(s: int, delta, k: KSpec, max_iter: int = 64) -> DerandParams:
    """``t = ceil(8/delta)``, the least ``d > s^((10 t k(d) + 2) t)``, ``d'`` and the set size.

    ``k`` may be an integer or a non-decreasing function of ``d``. For a
    function the least ``d`` is found by the monotone iteration
    ``d <- s^((10 t k(d) + 2) t) + 1`` started at ``d = 1``.
    """
    if s < 2:
        raise PreconditionError("s must be >= 2")
    delta = as_fraction(delta)
    if delta <= 0:
        raise PreconditionError("delta must be positive")
    t = max(1, ceil(Fraction(8) / delta))
    kf = _k_of(k)
    d, it = 1, 0
    while True:
        kd = kf(d)
        bound = s ** ((10 * t * kd + 2) * t)
        if d > bound:
            break
        d = bound + 1
        it += 1
        if it > max_iter:
            raise PreconditionError("k(d) grows too fast: fixed-point iteration did not settle")
    kd = kf(d)
    d_prime = kd * t * ceil_root(d, t)
    size = (s * d_prime + 1) ** (2 * t * kd)
    if callable(k):
        # k(d^log d) is only evaluated when the argument stays representable
        lg = max(1, (d - 1).bit_length())
        k_tilde = kf(d ** lg) if d.bit_length() * lg <= 1 << 16 else None
    else:
        k_tilde = k
    return DerandParams(s, delta, t, kd, d, d_prime, size, k_tilde, it)


def hardness_threshold(s: int, D: int, d: int, n: int, k: int) -> int:
    """``s * D * d^3 * n^(10k)``: the circuit size a hard P must exceed."""
    return s * D * d ** 3 * n ** (10 * k)


@dataclass
class PipelineResult:
    name: str
    source: SparsePoly
    lifted: SparsePoly
    generator: GeneratorMap
    hitting_set: HittingSet
    report: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return dict(self.report)


def _gen_grid_set(G: GeneratorMap, side: int, provenance: str, params: dict) -> HittingSet:
    nin = 2 * G.k

    def factory():
        for idx in grid_indices(nin, side):
            yield tuple(gen_eval(G, [Fraction(x) for x in idx]))

    return HittingSet(provenance, dict(params, grid_side=side, grid_dim=nin), side ** nin, factory)


def derand_pipeline(P: SparsePoly, s: int, t: int, n: int, b: int | None = None,
                    grid_side: int | None = None, name: str = "derand") -> PipelineResult:
    """Lift ``P`` to ``k*t`` variables, build its generator and evaluate it on a grid.

    The base ``b`` defaults to the least integer with ``b^t > ideg(P)``. The grid
    side defaults to ``s * deg(Q) + 1`` where ``Q`` is the lifted polynomial.
    """
    if t < 1 or n < 0 or s < 1:
        raise PreconditionError("need t >= 1, n >= 0 and s >= 1")
    ideg = max(P.individual_degree(), 0)
    if b is None:
        b = max(2, ceil_root(ideg + 1, t))
    Q = P if t == 1 else kronecker_lift(P, t, b)
    G = build_gen(Q, n)
    side = s * max(Q.degree(), 0) + 1 if grid_side is None else grid_side
    H = _gen_grid_set(G, side, name, {"s": s, "t": t, "n": n, "base": b})
    report = {
        "pipeline": name,
        "k": P.nvars,
        "lifted_nvars": Q.nvars,
        "t": t,
        "n": n,
        "base": b,
        "deg_P": P.degree(),
        "deg_Q": Q.degree(),
        "grid_side": side,
        "size": H.size,
    }
    return PipelineResult(name, P, Q, G, H, report)


def bootstrap_pipeline(H_small: HittingSet, k: int, s: int, t: int = 1, n: int | None = None,
                       grid_side: int | None = None) -> PipelineResult:
    """Hard polynomial from a too-small hitting set, then the derandomization pipeline."""
    bound = (s + 1) ** k
    if H_small.size >= bound:
        raise PreconditionError(f"|H| = {H_small.size} must be below (s+1)^k = {bound}")
    P = hard_poly_from_hitting_set(H_small, k, s)
    n = max(s - 1, 0) if n is None else n
    res = derand_pipeline(P, s, t, n, grid_side=grid_side, name="bootstrap")
    res.report["input_set_size"] = H_small.size
    res.report["hard_poly_terms"] = len(P)
    return res


def tau_poly(d: int) -> SparsePoly:
    """``(x-1)(x-2)...(x-d)``."""
    out = SparsePoly.const(1, 1)
    x = SparsePoly.var(1, 0)
    for i in range(1, d + 1):
        out = out * (x - i)
    return out


def tau_coefficient_bound(d: int) -> int:
    return d ** d * factorial(d)


def _log2_ceil(x: int) -> int:
    return max(1, (x - 1).bit_length())


def tau_pipeline(d: int, s: int, t: int, n: int | None = None,
                 measure_cap: int | None = None) -> PipelineResult:
    """Generator of the lifted ``P_d`` on the grid ``[s*deg(Q)+1]^(2t)``.

    When the set is small enough to enumerate, the report records the largest
    coordinate bit length and the ratio ``c`` of that length to
    ``d * ceil(log2 d) * ceil(log2(s d))``.
    """
    if d < 1:
        raise PreconditionError("d must be >= 1")
    P = tau_poly(d)
    top = max(abs(c) for c in P.terms.values())
    bound = tau_coefficient_bound(d)
    n = max(s - 1, 0) if n is None else n
    b = max(2, ceil_root(d + 1, t))
    res = derand_pipeline(P, s, t, n, b=b, name="tau")
    res.report.update({
        "d": d,
        "max_abs_coefficient": str(int(top)),
        "coefficient_bound": str(bound),
        "coefficient_bound_holds": top <= bound,
    })
    H = res.hitting_set
    cap = enum_cap() if measure_cap is None else measure_cap
    if H.size <= cap:
        bits = max((bit_length(x) for p in H for x in p), default=0)
        scale = d * _log2_ceil(d) * _log2_ceil(s * d)
        res.report["max_coordinate_bits"] = bits
        res.report["bit_scale"] = scale
        res.report["measured_c"] = format_rational(Fraction(bits, scale))
    else:
        res.report["max_coordinate_bits"] = None
    return res
