"""Exact sparse multivariate polynomials over the rationals.

A :class:`SparsePoly` maps exponent tuples to nonzero :class:`Fraction`
coefficients. Polynomials are immutable; every operation returns a new value.

The operators the generator and its analysis rely on live here as module
functions: partial derivatives, the Taylor components ``delta``, Taylor
shifts, homogeneous parts, truncation modulo powers of the variable ideal,
Euler descent, and Kronecker lifting/projection.

Canonical monomial order is graded lexicographic with ``x0 > x1 > ...``,
which is exactly the ordering of ``(sum(e), e)`` tuples.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product as cartesian
from math import comb, factorial
from typing import Dict, Iterable, Iterator, Mapping, Sequence, Tuple

from . import kernels
from .errors import ArityError, ParseError, PreconditionError
from .field import as_fraction, common_denominator, format_rational, parse_rational

ExpVec = Tuple[int, ...]


def grlex_key(e: ExpVec):
    return (sum(e), e)


def exp_factorial(e: ExpVec) -> int:
    out = 1
    for x in e:
        out *= factorial(x)
    return out


def monomials_of_degree(nvars: int, degree: int) -> list[ExpVec]:
    """All exponent vectors with ``|e| == degree``, ascending grlex."""
    if nvars == 0:
        return [()] if degree == 0 else []
    out = []

    def rec(prefix, left, slots):
        if slots == 1:
            out.append(prefix + (left,))
            return
        for x in range(left + 1):
            rec(prefix + (x,), left - x, slots - 1)

    rec((), degree, nvars)
    out.sort()
    return out


def monomials_upto(nvars: int, degree: int) -> list[ExpVec]:
    """All exponent vectors with ``|e| <= degree``, ascending grlex."""
    out = []
    for t in range(degree + 1):
        out.extend(monomials_of_degree(nvars, t))
    return out


def bounded_compositions(m: ExpVec, total: int) -> Iterator[ExpVec]:
    """Vectors e <= m componentwise with |e| == total."""
    k = len(m)
    if k == 0:
        if total == 0:
            yield ()
        return
    suffix = [0] * (k + 1)
    for idx in range(k - 1, -1, -1):
        suffix[idx] = suffix[idx + 1] + m[idx]
    if total > suffix[0]:
        return

    def rec(idx, left, prefix):
        if idx == k - 1:
            if left <= m[idx]:
                yield prefix + (left,)
            return
        lo = max(0, left - suffix[idx + 1])
        for x in range(lo, min(m[idx], left) + 1):
            yield from rec(idx + 1, left - x, prefix + (x,))

    yield from rec(0, total, ())


def _mul_terms(a: Mapping, b: Mapping, nvars: int, cap=None, mask=None) -> dict:
    """Product of two term maps through the packed integer kernel.

    ``cap`` drops every product whose degree (counted over the variables in
    ``mask``, or all variables) is ``>= cap``.
    """
    if not a or not b:
        return {}
    if mask is None:
        mask = range(nvars)
    if len(b) > len(a):
        a, b = b, a
    den_a = common_denominator(a.values())
    den_b = common_denominator(b.values())
    widths = []
    for v in range(nvars):
        top = max(e[v] for e in a) + max(e[v] for e in b)
        widths.append(max(top.bit_length(), 1))
    shifts = []
    acc = 0
    for w in widths:
        shifts.append(acc)
        acc += w

    def pack(e):
        key = 0
        for x, s in zip(e, shifts):
            key |= x << s
        return key

    def deg(e):
        return sum(e[v] for v in mask)

    a_items = list(a.items())
    b_items = sorted(b.items(), key=lambda kv: deg(kv[0]))
    a_keys = [pack(e) for e, _ in a_items]
    a_degs = [deg(e) for e, _ in a_items]
    a_coefs = [c.numerator * (den_a // c.denominator) for _, c in a_items]
    b_keys = [pack(e) for e, _ in b_items]
    b_degs = [deg(e) for e, _ in b_items]
    b_coefs = [c.numerator * (den_b // c.denominator) for _, c in b_items]
    raw = kernels.mul_packed(a_keys, a_degs, a_coefs, b_keys, b_degs, b_coefs,
                             -1 if cap is None else cap)
    den = den_a * den_b
    masks = [(1 << w) - 1 for w in widths]
    out = {}
    for key, c in raw.items():
        if c:
            e = tuple((key >> s) & m for s, m in zip(shifts, masks))
            out[e] = Fraction(c, den)
    return out


class SparsePoly:
    """Polynomial in ``nvars`` variables with exact rational coefficients."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: Mapping | None = None, *, _trusted=False):
        self.nvars = nvars
        if _trusted:
            self.terms = terms
            return
        clean: Dict[ExpVec, Fraction] = {}
        for e, c in (terms or {}).items():
            e = tuple(int(x) for x in e)
            if len(e) != nvars:
                raise ArityError(f"exponent {e} has length {len(e)}, expected {nvars}")
            if any(x < 0 for x in e):
                raise ValueError(f"negative exponent in {e}")
            c = as_fraction(c)
            if c:
                clean[e] = clean.get(e, 0) + c
        self.terms = {e: c for e, c in clean.items() if c}

    # construction

    @classmethod
    def zero(cls, nvars: int) -> SparsePoly:
        return cls(nvars, {}, _trusted=True)

    @classmethod
    def const(cls, nvars: int, value) -> SparsePoly:
        value = as_fraction(value)
        return cls(nvars, {(0,) * nvars: value} if value else {}, _trusted=True)

    @classmethod
    def var(cls, nvars: int, index: int) -> SparsePoly:
        if not 0 <= index < nvars:
            raise ArityError(f"variable index {index} out of range for nvars={nvars}")
        e = [0] * nvars
        e[index] = 1
        return cls(nvars, {tuple(e): Fraction(1)}, _trusted=True)

    @classmethod
    def monomial(cls, exps: Sequence[int], coeff=1) -> SparsePoly:
        return cls(len(exps), {tuple(exps): coeff})

    # inspection

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self.terms), default=-1)

    def degree_in(self, var: int) -> int:
        return max((e[var] for e in self.terms), default=-1)

    def degree_in_vars(self, variables: Iterable[int]) -> int:
        variables = tuple(variables)
        return max((sum(e[v] for v in variables) for e in self.terms), default=-1)

    def individual_degree(self) -> int:
        return max((max(e, default=0) for e in self.terms), default=-1)

    def coefficient(self, e: Sequence[int]) -> Fraction:
        return self.terms.get(tuple(e), Fraction(0))

    def constant_term(self) -> Fraction:
        return self.terms.get((0,) * self.nvars, Fraction(0))

    def is_homogeneous(self, degree: int | None = None) -> bool:
        degs = {sum(e) for e in self.terms}
        if not degs:
            return True
        if len(degs) > 1:
            return False
        return degree is None or degs == {degree}

    def sorted_terms(self) -> list[tuple[ExpVec, Fraction]]:
        """Terms in descending grlex order (leading term first)."""
        return sorted(self.terms.items(), key=lambda kv: grlex_key(kv[0]), reverse=True)

    # arithmetic

    def _check(self, other: SparsePoly):
        if other.nvars != self.nvars:
            raise ArityError(f"nvars mismatch: {self.nvars} vs {other.nvars}")

    def __add__(self, other):
        if not isinstance(other, SparsePoly):
            other = SparsePoly.const(self.nvars, other)
        self._check(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = out.get(e)
            if v is None:
                out[e] = c
            else:
                v += c
                if v:
                    out[e] = v
                else:
                    del out[e]
        return SparsePoly(self.nvars, out, _trusted=True)

    __radd__ = __add__

    def __neg__(self):
        return SparsePoly(self.nvars, {e: -c for e, c in self.terms.items()}, _trusted=True)

    def __sub__(self, other):
        if not isinstance(other, SparsePoly):
            other = SparsePoly.const(self.nvars, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> SparsePoly:
        c = as_fraction(c)
        if not c:
            return SparsePoly.zero(self.nvars)
        return SparsePoly(self.nvars, {e: v * c for e, v in self.terms.items()}, _trusted=True)

    def mul(self, other: SparsePoly, trunc: int | None = None,
            trunc_vars: Sequence[int] | None = None) -> SparsePoly:
        """Product, optionally reduced modulo the ideal ``<vars>^trunc``."""
        self._check(other)
        return SparsePoly(self.nvars,
                          _mul_terms(self.terms, other.terms, self.nvars, trunc, trunc_vars),
                          _trusted=True)

    def __mul__(self, other):
        if isinstance(other, SparsePoly):
            return self.mul(other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        result = SparsePoly.const(self.nvars, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, SparsePoly):
            return self.nvars == other.nvars and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self == SparsePoly.const(self.nvars, other)
        return NotImplemented

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    # evaluation and substitution

    def eval(self, point: Sequence) -> Fraction:
        if len(point) != self.nvars:
            raise ArityError(f"point has {len(point)} coordinates, expected {self.nvars}")
        point = [as_fraction(x) for x in point]
        powers = [{} for _ in point]
        total = Fraction(0)
        for e, c in self.terms.items():
            term = c
            for v, x in enumerate(e):
                if x:
                    cache = powers[v]
                    p = cache.get(x)
                    if p is None:
                        p = cache[x] = point[v] ** x
                    term *= p
            total += term
        return total

    def eval_vars(self, assignment: Mapping[int, object]) -> SparsePoly:
        """Substitute values for some variables; the rest keep their order."""
        assignment = {v: as_fraction(x) for v, x in assignment.items()}
        keep = [v for v in range(self.nvars) if v not in assignment]
        out: Dict[ExpVec, Fraction] = {}
        for e, c in self.terms.items():
            for v, x in assignment.items():
                if e[v]:
                    c = c * x ** e[v]
                    if not c:
                        break
            if not c:
                continue
            key = tuple(e[v] for v in keep)
            out[key] = out.get(key, 0) + c
        return SparsePoly(len(keep), {e: c for e, c in out.items() if c}, _trusted=True)

    def substitute(self, subs: Sequence[SparsePoly]) -> SparsePoly:
        """Compose: replace variable i by ``subs[i]`` (all sharing one nvars)."""
        if len(subs) != self.nvars:
            raise ArityError(f"need {self.nvars} substitutions, got {len(subs)}")
        target = subs[0].nvars if subs else 0
        result = SparsePoly.zero(target)
        cache: dict = {}
        for e, c in self.terms.items():
            term = SparsePoly.const(target, c)
            for v, x in enumerate(e):
                if x:
                    p = cache.get((v, x))
                    if p is None:
                        p = cache[(v, x)] = subs[v] ** x
                    term = term * p
            result = result + term
        return result

    def embed(self, nvars: int, index_map: Sequence[int]) -> SparsePoly:
        """Rename variable ``i`` to ``index_map[i]`` inside ``nvars`` variables."""
        out = {}
        for e, c in self.terms.items():
            new = [0] * nvars
            for v, x in enumerate(e):
                new[index_map[v]] += x
            out[tuple(new)] = c
        return SparsePoly(nvars, out, _trusted=True)

    # printing

    def __repr__(self):
        return f"SparsePoly({self.nvars}, {self})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            mono = "*".join(f"x{v}^{x}" if x > 1 else f"x{v}" for v, x in enumerate(e) if x)
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")


# ---------------------------------------------------------------------------
# operators


def partial_derivative(p: SparsePoly, e: Sequence[int]) -> SparsePoly:
    """Iterated derivative d^|e| p / dz^e."""
    e = tuple(e)
    if len(e) != p.nvars:
        raise ArityError(f"derivative order {e} does not match nvars={p.nvars}")
    out = {}
    for m, c in p.terms.items():
        if any(x < y for x, y in zip(m, e)):
            continue
        for x, y in zip(m, e):
            for t in range(y):
                c *= x - t
        out[tuple(x - y for x, y in zip(m, e))] = c
    return SparsePoly(p.nvars, out, _trusted=True)


class DeltaComponent:
    """Taylor component of ``P(z + y)`` of degree ``index`` in the y-block.

    ``poly`` has ``2k`` variables ordered ``z_1..z_k, y_1..y_k``.
    """

    __slots__ = ("index", "poly")

    def __init__(self, index: int, poly: SparsePoly):
        self.index = index
        self.poly = poly

    def __repr__(self):
        return f"DeltaComponent({self.index}, {self.poly})"


def delta(p: SparsePoly, i: int) -> DeltaComponent:
    """``sum_{|e| = i} y^e / e! * d_e p`` as a polynomial in (z, y)."""
    if i < 0:
        raise PreconditionError("delta index must be non-negative")
    k = p.nvars
    out: Dict[ExpVec, Fraction] = {}
    for m, c in p.terms.items():
        for e in bounded_compositions(m, i):
            w = 1
            for x, y in zip(m, e):
                w *= comb(x, y)
            key = tuple(x - y for x, y in zip(m, e)) + e
            out[key] = out.get(key, 0) + c * w
    return DeltaComponent(i, SparsePoly(2 * k, {e: c for e, c in out.items() if c}, _trusted=True))


def taylor_shift(p: SparsePoly, a: Sequence) -> SparsePoly:
    """``p(z + a)``."""
    if len(a) != p.nvars:
        raise ArityError(f"shift has {len(a)} coordinates, expected {p.nvars}")
    a = [as_fraction(x) for x in a]
    out: Dict[ExpVec, Fraction] = {}
    for m, c in p.terms.items():
        per_var = []
        for x, av in zip(m, a):
            if av:
                per_var.append([(t, comb(x, t) * av ** (x - t)) for t in range(x + 1)])
            else:
                per_var.append([(x, Fraction(1))])
        for choice in cartesian(*per_var):
            v = c
            for _, w in choice:
                v *= w
            key = tuple(t for t, _ in choice)
            out[key] = out.get(key, 0) + v
    return SparsePoly(p.nvars, {e: c for e, c in out.items() if c}, _trusted=True)


def homogeneous_part(p: SparsePoly, j: int, variables: Sequence[int] | None = None) -> SparsePoly:
    """Terms of degree exactly ``j`` (in ``variables``, default all)."""
    vs = range(p.nvars) if variables is None else variables
    return SparsePoly(p.nvars, {e: c for e, c in p.terms.items() if sum(e[v] for v in vs) == j},
                      _trusted=True)


def homogeneous_components(p: SparsePoly) -> list[SparsePoly]:
    """``[P_0, ..., P_deg]``; empty list for the zero polynomial."""
    return [homogeneous_part(p, j) for j in range(p.degree() + 1)]


def truncate_mod_ideal(p: SparsePoly, m: int, variables: Sequence[int] | None = None) -> SparsePoly:
    """Canonical representative of ``p`` modulo ``<vars>^m``."""
    vs = range(p.nvars) if variables is None else variables
    return SparsePoly(p.nvars, {e: c for e, c in p.terms.items() if sum(e[v] for v in vs) < m},
                      _trusted=True)


def euler_descend(partials: Mapping[ExpVec, SparsePoly], t: int, n: int) -> dict[ExpVec, SparsePoly]:
    """Recover all partials of order ``<= n`` from the order-``n`` ones.

    ``partials`` holds ``d_e P`` for every ``|e| == n`` of one homogeneous
    ``P`` of degree ``t``. Uses ``d_e P = (1/(t-|e|)) sum_i z_i d_{e+1_i} P``.
    """
    if t < n:
        raise PreconditionError(f"degree {t} below derivative order {n}: descent divides by zero")
    if not partials:
        raise PreconditionError("no partials supplied")
    k = len(next(iter(partials)))
    out = {}
    for e in monomials_of_degree(k, n):
        if e not in partials:
            raise PreconditionError(f"missing order-{n} partial {e}")
        out[e] = partials[e]
    zs = [SparsePoly.var(k, i) for i in range(k)]
    for order in range(n - 1, -1, -1):
        scale = Fraction(1, t - order)
        for e in monomials_of_degree(k, order):
            acc = SparsePoly.zero(k)
            for i in range(k):
                up = list(e)
                up[i] += 1
                acc = acc + zs[i] * out[tuple(up)]
            out[e] = acc.scale(scale)
    return out


def _digits(x: int, base: int, count: int) -> list[int]:
    out = []
    for _ in range(count):
        x, r = divmod(x, base)
        out.append(r)
    return out


def kronecker_lift(p: SparsePoly, t: int, b: int) -> SparsePoly:
    """Spread each exponent over ``t`` base-``b`` digits.

    Variable ``z_i`` becomes ``z_{i,1..t}`` (index ``i*t + j``) and ``z_i^e``
    maps to ``prod_j z_{i,j}^{digit_j(e)}``.
    """
    if t < 1 or b < 2:
        raise PreconditionError("need t >= 1 and base >= 2")
    limit = b ** t
    out = {}
    for e, c in p.terms.items():
        if any(x >= limit for x in e):
            raise PreconditionError(f"individual degree {max(e)} >= base^t = {limit}")
        key = []
        for x in e:
            key.extend(_digits(x, b, t))
        out[tuple(key)] = c
    return SparsePoly(p.nvars * t, out, _trusted=True)


def kronecker_project(q: SparsePoly, b: int, t: int) -> SparsePoly:
    """Substitute ``z_{i,j} := z_i^(b^(j-1))``; inverse of :func:`kronecker_lift`."""
    if q.nvars % t:
        raise ArityError(f"nvars={q.nvars} not divisible by t={t}")
    k = q.nvars // t
    out: Dict[ExpVec, Fraction] = {}
    for e, c in q.terms.items():
        key = tuple(sum(e[i * t + j] * b ** j for j in range(t)) for i in range(k))
        out[key] = out.get(key, 0) + c
    return SparsePoly(k, {e: c for e, c in out.items() if c}, _trusted=True)


# ---------------------------------------------------------------------------
# text format


def serialize_poly(p: SparsePoly) -> str:
    lines = [f"poly nvars={p.nvars}"]
    for e, c in p.sorted_terms():
        lines.append(" ".join([format_rational(c), *map(str, e)]))
    return "\n".join(lines) + "\n"


def parse_polys(text: str) -> list[SparsePoly]:
    """Parse one or more ``poly nvars=k`` blocks."""
    polys = []
    nvars = None
    terms: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("poly"):
            if nvars is not None:
                polys.append(SparsePoly(nvars, terms))
            fields = line.split()
            if len(fields) != 2 or not fields[1].startswith("nvars="):
                raise ParseError(f"line {lineno}: bad header {raw!r}")
            try:
                nvars = int(fields[1][len("nvars="):])
            except ValueError:
                raise ParseError(f"line {lineno}: bad nvars in {raw!r}") from None
            terms = {}
            continue
        if nvars is None:
            raise ParseError(f"line {lineno}: term before 'poly nvars=' header")
        fields = line.split()
        if len(fields) != nvars + 1:
            raise ParseError(f"line {lineno}: expected {nvars} exponents, got {len(fields) - 1}")
        c = parse_rational(fields[0])
        try:
            e = tuple(int(x) for x in fields[1:])
        except ValueError:
            raise ParseError(f"line {lineno}: non-integer exponent") from None
        if any(x < 0 for x in e):
            raise ParseError(f"line {lineno}: negative exponent")
        terms[e] = terms.get(e, 0) + c
    if nvars is not None:
        polys.append(SparsePoly(nvars, terms))
    return polys


def parse_poly(text: str) -> SparsePoly:
    polys = parse_polys(text)
    if len(polys) != 1:
        raise ParseError(f"expected exactly one polynomial, found {len(polys)}")
    return polys[0]
