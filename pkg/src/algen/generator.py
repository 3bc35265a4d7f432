"""The Taylor-component generator ``Gen_P(z, y) = (Delta_0(P), ..., Delta_n(P))``.

Component polynomials live in ``2k`` variables ordered ``z_1..z_k, y_1..y_k``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .circuit import Circuit, compose_circuit_with_polys
from .errors import ArityError
from .field import as_fraction
from .poly import SparsePoly, delta, taylor_shift
from .transforms import derivative_circuit


@dataclass(frozen=True)
class GeneratorMap:
    k: int
    n: int
    d: int
    source: SparsePoly
    components: tuple

    @property
    def z_vars(self) -> range:
        return range(self.k)

    @property
    def y_vars(self) -> range:
        return range(self.k, 2 * self.k)

    def at_z(self, a: Sequence) -> list[SparsePoly]:
        """Components with ``z := a``, as polynomials in ``y`` (k variables)."""
        assign = {i: as_fraction(x) for i, x in enumerate(a)}
        return [c.eval_vars(assign) for c in self.components]

    def truncated(self, n: int) -> GeneratorMap:
        """The same generator with only ``Delta_0..Delta_n``."""
        return GeneratorMap(self.k, n, self.d, self.source, self.components[:n + 1])


def build_gen(P: SparsePoly, n: int) -> GeneratorMap:
    if n < 0:
        raise ValueError("n must be non-negative")
    comps = tuple(delta(P, i).poly for i in range(n + 1))
    return GeneratorMap(P.nvars, n, P.degree(), P, comps)


def gen_eval(G: GeneratorMap, point: Sequence) -> list:
    if len(point) != 2 * G.k:
        raise ArityError(f"generator takes {2 * G.k} inputs, got {len(point)}")
    return [c.eval(point) for c in G.components]


def shift_gen(G: GeneratorMap, a: Sequence) -> GeneratorMap:
    """Generator of ``P(z + a)``."""
    return build_gen(taylor_shift(G.source, a), G.n)


def compose(C: Circuit, G: GeneratorMap, trunc: int | None = None,
            degree_cap: int | None = None) -> SparsePoly:
    """``C(Delta_0, ..., Delta_n)``; with ``trunc`` reduced modulo ``<z>^trunc``."""
    if C.nvars != G.n + 1:
        raise ArityError(f"circuit has {C.nvars} inputs, generator has {G.n + 1} outputs")
    if len(C.outputs) != 1:
        raise ArityError("compose expects a single-output circuit")
    return compose_circuit_with_polys(C, list(G.components), degree_cap,
                                      trunc=trunc, trunc_vars=G.z_vars)[0]


def psi(Cp: Circuit, G: GeneratorMap, a: Sequence | None = None, D: int | None = None) -> SparsePoly:
    """``(d/dx_n Cp)(Gen_P(a, y))`` as a polynomial in ``y``; ``a`` defaults to 0.

    Substituting ``z := a`` before composing is equivalent to composing and
    then substituting, and keeps every intermediate polynomial k-variate.
    """
    if Cp.nvars != G.n + 1:
        raise ArityError(f"circuit has {Cp.nvars} inputs, generator has {G.n + 1} outputs")
    if a is None:
        a = [0] * G.k
    D = Cp.syntactic_degree() if D is None else D
    dC, _ = derivative_circuit(Cp, G.n, 1, D)
    return compose_circuit_with_polys(dC, G.at_z(a))[0]


def components_equal_shifted(G: GeneratorMap, H: GeneratorMap, a: Sequence) -> bool:
    """Whether ``H``'s components equal ``G``'s with ``z := z + a``."""
    k = G.k
    subs = [SparsePoly.var(2 * k, i) + as_fraction(a[i]) if i < k else SparsePoly.var(2 * k, i)
            for i in range(2 * k)]
    return all(g.substitute(subs) == h for g, h in zip(G.components, H.components))

