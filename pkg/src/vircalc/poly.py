"""Exact sparse polynomial arithmetic over the rationals.

Two polynomial types are provided:

  UniPoly  --  polynomials in the single variable t, stored as a dict
               mapping exponent -> rational coefficient.
  BiPoly   --  polynomials in the two variables s and t, stored as a dict
               mapping (s-exponent, t-exponent) -> rational coefficient.

Coefficients are exact rationals (gmpy2.mpq when available, else
fractions.Fraction), so every identity test in the package is a
zero-tolerance equality.  Zero coefficients are never stored; the zero
polynomial is the empty dict.  Values are immutable after construction and
safe to share between threads.

The degree of the zero polynomial is reported as a marker that compares
greater than every integer, so minimal-degree searches skip zero without a
special case.
"""

from __future__ import annotations

import math
from typing import Iterable, Mapping, Union

try:
    from gmpy2 import mpq as Q
except ImportError:  # pragma: no cover - gmpy2 is a declared dependency
    from fractions import Fraction as Q

QLike = Union[int, str, "Q"]

#: Degree reported for the zero polynomial; larger than every integer.
ZERO_DEGREE = math.inf


def rat(x: QLike, y: int | None = None) -> Q:
    """Coerce x (int, 'p/q' string, or rational) to an exact rational."""
    if y is not None:
        return Q(x, y)
    return Q(x)


def rat_str(q) -> str:
    """Render a rational as 'p' or 'p/q' (lowest terms, q > 0)."""
    return str(Q(q))


def _clean(d: dict) -> dict:
    return {k: v for k, v in d.items() if v}


class UniPoly:
    """Sparse exact polynomial in t."""

    __slots__ = ("c",)

    def __init__(self, coeffs: Mapping[int, QLike] | Iterable[tuple[int, QLike]] = ()):
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        c: dict = {}
        for e, q in items:
            if e < 0:
                raise ValueError(f"negative exponent {e}")
            q = Q(q)
            if q:
                c[int(e)] = c.get(int(e), Q(0)) + q
        self.c = _clean(c)

    @staticmethod
    def zero() -> "UniPoly":
        return UniPoly()

    @staticmethod
    def const(q: QLike) -> "UniPoly":
        return UniPoly({0: q})

    @staticmethod
    def t(e: int = 1) -> "UniPoly":
        return UniPoly({e: 1})

    @staticmethod
    def from_coeffs(coeffs: Iterable[QLike]) -> "UniPoly":
        """Build from a dense ascending coefficient list [c0, c1, ...]."""
        return UniPoly({e: q for e, q in enumerate(coeffs)})

    def coeffs_list(self) -> list:
        """Dense ascending coefficient list; [] for the zero polynomial."""
        if not self.c:
            return []
        d = max(self.c)
        return [self.c.get(e, Q(0)) for e in range(d + 1)]

    def is_zero(self) -> bool:
        return not self.c

    def degree(self):
        """Degree; ZERO_DEGREE (compares above all ints) for the zero polynomial."""
        return max(self.c) if self.c else ZERO_DEGREE

    def lc(self) -> Q:
        if not self.c:
            raise ValueError("zero polynomial has no leading coefficient")
        return self.c[max(self.c)]

    def coeff(self, e: int) -> Q:
        return self.c.get(e, Q(0))

    def __bool__(self) -> bool:
        return bool(self.c)

    def __eq__(self, other) -> bool:
        return isinstance(other, UniPoly) and self.c == other.c

    def __hash__(self) -> int:
        return hash(frozenset(self.c.items()))

    def __add__(self, other: "UniPoly") -> "UniPoly":
        out = dict(self.c)
        for e, q in other.c.items():
            out[e] = out.get(e, Q(0)) + q
        return UniPoly._raw(_clean(out))

    def __sub__(self, other: "UniPoly") -> "UniPoly":
        out = dict(self.c)
        for e, q in other.c.items():
            out[e] = out.get(e, Q(0)) - q
        return UniPoly._raw(_clean(out))

    def __neg__(self) -> "UniPoly":
        return UniPoly._raw({e: -q for e, q in self.c.items()})

    def __mul__(self, other: "UniPoly") -> "UniPoly":
        out: dict = {}
        for e1, q1 in self.c.items():
            for e2, q2 in other.c.items():
                e = e1 + e2
                out[e] = out.get(e, Q(0)) + q1 * q2
        return UniPoly._raw(_clean(out))

    def scale(self, q: QLike) -> "UniPoly":
        q = Q(q)
        if not q:
            return UniPoly()
        return UniPoly._raw({e: v * q for e, v in self.c.items()})

    def mul_t(self, k: int = 1) -> "UniPoly":
        """Multiply by t^k."""
        return UniPoly._raw({e + k: v for e, v in self.c.items()})

    def derivative(self) -> "UniPoly":
        return UniPoly._raw(_clean({e - 1: v * e for e, v in self.c.items() if e}))

    def evaluate(self, x: QLike) -> Q:
        x = Q(x)
        acc = Q(0)
        for e, v in self.c.items():
            acc += v * x**e
        return acc

    def monic(self) -> "UniPoly":
        if not self.c:
            raise ValueError("cannot normalize the zero polynomial")
        inv = 1 / self.lc()
        return self.scale(inv)

    def __repr__(self) -> str:
        from .polytext import format_unipoly

        return f"UniPoly({format_unipoly(self)!r})"

    @staticmethod
    def _raw(c: dict) -> "UniPoly":
        p = UniPoly.__new__(UniPoly)
        p.c = c
        return p


class BiPoly:
    """Sparse exact polynomial in s and t."""

    __slots__ = ("c",)

    def __init__(
        self,
        coeffs: Mapping[tuple[int, int], QLike] | Iterable[tuple[tuple[int, int], QLike]] = (),
    ):
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        c: dict = {}
        for (a, e), q in items:
            if a < 0 or e < 0:
                raise ValueError(f"negative exponent in ({a}, {e})")
            q = Q(q)
            if q:
                k = (int(a), int(e))
                c[k] = c.get(k, Q(0)) + q
        self.c = _clean(c)

    @staticmethod
    def zero() -> "BiPoly":
        return BiPoly()

    @staticmethod
    def const(q: QLike) -> "BiPoly":
        return BiPoly({(0, 0): q})

    @staticmethod
    def s(a: int = 1) -> "BiPoly":
        return BiPoly({(a, 0): 1})

    @staticmethod
    def t(e: int = 1) -> "BiPoly":
        return BiPoly({(0, e): 1})

    @staticmethod
    def from_uni(u: UniPoly, s_power: int = 0) -> "BiPoly":
        return BiPoly._raw({(s_power, e): q for e, q in u.c.items()})

    def is_zero(self) -> bool:
        return not self.c

    def __bool__(self) -> bool:
        return bool(self.c)

    def __eq__(self, other) -> bool:
        return isinstance(other, BiPoly) and self.c == other.c

    def __hash__(self) -> int:
        return hash(frozenset(self.c.items()))

    def s_degree(self):
        """Max s-exponent; ZERO_DEGREE for the zero polynomial."""
        return max(a for a, _ in self.c) if self.c else ZERO_DEGREE

    def t_degree(self):
        return max(e for _, e in self.c) if self.c else ZERO_DEGREE

    def coeff_s(self, i: int) -> UniPoly:
        """The univariate coefficient f_i(t) of s^i."""
        return UniPoly._raw({e: q for (a, e), q in self.c.items() if a == i})

    def s_layers(self) -> dict[int, UniPoly]:
        """All nonzero s-layers as {i: f_i(t)}."""
        out: dict[int, dict] = {}
        for (a, e), q in self.c.items():
            out.setdefault(a, {})[e] = q
        return {a: UniPoly._raw(d) for a, d in sorted(out.items())}

    def __add__(self, other: "BiPoly") -> "BiPoly":
        out = dict(self.c)
        for k, q in other.c.items():
            out[k] = out.get(k, Q(0)) + q
        return BiPoly._raw(_clean(out))

    def __sub__(self, other: "BiPoly") -> "BiPoly":
        out = dict(self.c)
        for k, q in other.c.items():
            out[k] = out.get(k, Q(0)) - q
        return BiPoly._raw(_clean(out))

    def __neg__(self) -> "BiPoly":
        return BiPoly._raw({k: -q for k, q in self.c.items()})

    def __mul__(self, other: "BiPoly") -> "BiPoly":
        out: dict = {}
        for (a1, e1), q1 in self.c.items():
            for (a2, e2), q2 in other.c.items():
                k = (a1 + a2, e1 + e2)
                out[k] = out.get(k, Q(0)) + q1 * q2
        return BiPoly._raw(_clean(out))

    def scale(self, q: QLike) -> "BiPoly":
        q = Q(q)
        if not q:
            return BiPoly()
        return BiPoly._raw({k: v * q for k, v in self.c.items()})

    def mul_s(self, k: int = 1) -> "BiPoly":
        return BiPoly._raw({(a + k, e): v for (a, e), v in self.c.items()})

    def mul_uni(self, u: UniPoly) -> "BiPoly":
        """Multiply by a univariate polynomial in t."""
        out: dict = {}
        for (a, e), q in self.c.items():
            for e2, q2 in u.c.items():
                k = (a, e + e2)
                out[k] = out.get(k, Q(0)) + q * q2
        return BiPoly._raw(_clean(out))

    def dt(self) -> "BiPoly":
        return BiPoly._raw(_clean({(a, e - 1): v * e for (a, e), v in self.c.items() if e}))

    def ds(self) -> "BiPoly":
        return BiPoly._raw(_clean({(a - 1, e): v * a for (a, e), v in self.c.items() if a}))

    def __repr__(self) -> str:
        from .polytext import format_bipoly

        return f"BiPoly({format_bipoly(self)!r})"

    @staticmethod
    def _raw(c: dict) -> "BiPoly":
        p = BiPoly.__new__(BiPoly)
        p.c = c
        return p


# ---------------------------------------------------------------------------
# ring-level operations


def shift_s(f: BiPoly, m: int) -> BiPoly:
    """Return f(s - m, t), expanded exactly by the binomial theorem."""
    if m == 0 or not f.c:
        return f
    out: dict = {}
    pow_m = [Q(1)]
    max_a = max(a for a, _ in f.c)
    for _ in range(max_a):
        pow_m.append(pow_m[-1] * (-m))
    for (a, e), q in f.c.items():
        for i in range(a + 1):
            co = q * math.comb(a, i) * pow_m[a - i]
            k = (i, e)
            v = out.get(k)
            out[k] = co if v is None else v + co
    return BiPoly._raw(_clean(out))


def diff(f: BiPoly, var: str, order: int = 1) -> BiPoly:
    """Iterated exact partial derivative; var is 's' or 't'; order >= 0."""
    if order < 0:
        raise ValueError("derivative order must be nonnegative")
    if var not in ("s", "t"):
        raise ValueError(f"unknown variable {var!r}")
    g = f
    for _ in range(order):
        g = g.ds() if var == "s" else g.dt()
        if not g.c:
            break
    return g


def divrem_t(a: UniPoly, b: UniPoly) -> tuple[UniPoly, UniPoly]:
    """Exact division with remainder: a = q*b + r, deg r < deg b."""
    if not b.c:
        raise ZeroDivisionError("polynomial division by zero")
    db = b.degree()
    binv = 1 / b.lc()
    rem = dict(a.c)
    quo: dict = {}
    while rem:
        dr = max(rem)
        if dr < db:
            break
        co = rem[dr] * binv
        e0 = dr - db
        quo[e0] = co
        for e, q in b.c.items():
            k = e0 + e
            v = rem.get(k, Q(0)) - co * q
            if v:
                rem[k] = v
            else:
                rem.pop(k, None)
    return UniPoly._raw(quo), UniPoly._raw(rem)


def divides(b: UniPoly, a: UniPoly) -> bool:
    """True iff b | a (b nonzero; everything divides the zero polynomial)."""
    if not a.c:
        return True
    if not b.c:
        return False
    return not divrem_t(a, b)[1].c


def gcd_t(a: UniPoly, b: UniPoly) -> UniPoly:
    """Monic gcd over the rationals; rejects gcd(0, 0)."""
    if not a.c and not b.c:
        raise ValueError("gcd(0, 0) is undefined")
    while b.c:
        a, b = b, divrem_t(a, b)[1]
    return a.monic()


def gcd_many(polys: Iterable[UniPoly]) -> UniPoly:
    """Monic gcd of a family; ignores zeros; zero if all entries are zero."""
    acc = UniPoly.zero()
    for p in polys:
        if not p.c:
            continue
        acc = gcd_t(acc, p) if acc.c else p.monic()
        if acc.degree() == 0:
            break
    return acc


def quotient_by_linear(h: UniPoly, alpha: QLike) -> UniPoly:
    """The exact quotient g with h(t) - h(alpha) = (t - alpha) * g(t).

    Synthetic (Horner) division; always exact because the numerator
    vanishes at alpha.  g = 0 for constant h.
    """
    alpha = Q(alpha)
    if not h.c or h.degree() == 0:
        return UniPoly.zero()
    d = h.degree()
    out: dict = {}
    acc = Q(0)
    for e in range(d, 0, -1):
        acc = acc * alpha + h.coeff(e)
        if acc:
            out[e - 1] = acc
    return UniPoly._raw(out)


def valuation_t(u: UniPoly, root: QLike) -> int:
    """Largest n with (t - root)^n dividing u; u must be nonzero."""
    if not u.c:
        raise ValueError("valuation of the zero polynomial is undefined")
    root = Q(root)
    n = 0
    while True:
        if u.evaluate(root):
            return n
        u = quotient_by_linear(u, root)
        n += 1


def valuation(f: BiPoly, root: QLike) -> int:
    """Largest n with (t - root)^n dividing every s-coefficient of f."""
    if not f.c:
        raise ValueError("valuation of the zero polynomial is undefined")
    return min(valuation_t(u, root) for u in f.s_layers().values())
