"""Cyclic submodule calculus: canonical forms, membership, maximal chains.

Every submodule of the b = 0, b = 1 and theta-kind modules is an ideal-like
subspace determined by one or two univariate polynomials; the remaining
branches are valuation chains or the whole module.  `canonical_cyclic`
computes the classification representative of the submodule generated by a
polynomial, `member` decides membership in exact ideal-theoretic terms, and
`closure_truncated` is the independent brute-force oracle the test suites
compare against.

Branch map for the phi kind: b = 0 gives the two gcd forms; b = 1 gives
the (t - alpha)-adic valuation chain; b = -1 with alpha = 0, and every
b outside {0, 1, -1}, give the t-adic valuation chain; b = -1 with
alpha != 0 is irreducible.  The theta kind gives the (A, B) pair with
B | A and A | h*B.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence, Union

from .action import ModuleParams, op_S, op_T
from .poly import (
    BiPoly,
    Q,
    UniPoly,
    divides,
    gcd_many,
    gcd_t,
    valuation,
    valuation_t,
)
from .span import ClosureEngine, LinOp


# ---------------------------------------------------------------------------
# canonical forms


@dataclass(frozen=True)
class B0SsF:
    """The b = 0 submodule generated by s*F: C[s,t]sF + C[s,t]tF + C[s,t]hF."""

    F: UniPoly

    variant = "B0_SsF"


@dataclass(frozen=True)
class B0SF:
    """The b = 0 submodule C[s,t]F."""

    F: UniPoly

    variant = "B0_SF"


@dataclass(frozen=True)
class ThetaCanon:
    """The theta-kind submodule C[s,t]A + C[s,t]sB + C[s,t]hB (B | A, A | hB).

    A zero A or B denotes an empty part (can occur when h = 0).
    """

    A: UniPoly
    B: UniPoly

    variant = "Theta"


@dataclass(frozen=True)
class B1Phi:
    """The b = 1 submodule of all polynomials with (t - alpha)-valuation >= n."""

    n: int

    variant = "B1Phi"


@dataclass(frozen=True)
class B1PhiW:
    """The extra b = 1 submodule s(t-a)^n C[s,t] + (t-a)^(n+1) C[s,t].

    Exists exactly when G(alpha) = -n for a nonnegative integer n: the
    operator middle term then maps level n into level n+1, so this wedge
    between the two valuation ideals is stable.  The published
    classification of this branch misses it (its separation argument
    silently divides by the zero eigenvalue G(alpha) + n).
    """

    n: int

    variant = "B1PhiW"


@dataclass(frozen=True)
class TVal:
    """The submodule t^i C[s,t] (b = -1 with alpha = 0, or b outside 0, +-1)."""

    i: int

    variant = "TVal"


@dataclass(frozen=True)
class TValW:
    """The extra t-adic wedge s t^i C[s,t] + t^(i+1) C[s,t].

    Exists when the level eigenvalue vanishes: h(0) + b*i = 0 for generic
    b, resp. h(0) = i for b = -1 with alpha = 0.  Same phenomenon as
    B1PhiW on the other valuation branches.
    """

    i: int

    variant = "TValW"


@dataclass(frozen=True)
class Whole:
    """The whole module (b = -1, alpha != 0: irreducible)."""

    variant = "Whole"


CyclicCanon = Union[B0SsF, B0SF, ThetaCanon, B1Phi, B1PhiW, TVal, TValW, Whole]


def _poly_key(u: UniPoly) -> tuple:
    if u.is_zero():
        return (-1,)
    return (int(u.degree()), tuple(u.coeffs_list()))


def canon_sort_key(canon: CyclicCanon) -> tuple:
    """Deterministic total order: variant tag (alphabetical), then contents."""
    if isinstance(canon, (B0SsF, B0SF)):
        return (canon.variant, _poly_key(canon.F))
    if isinstance(canon, ThetaCanon):
        return (canon.variant, _poly_key(canon.A), _poly_key(canon.B))
    if isinstance(canon, (B1Phi, B1PhiW)):
        return (canon.variant, canon.n)
    if isinstance(canon, (TVal, TValW)):
        return (canon.variant, canon.i)
    return (canon.variant,)


def canon_to_json(canon: CyclicCanon) -> dict:
    from .polytext import format_unipoly

    if isinstance(canon, (B0SsF, B0SF)):
        return {"variant": canon.variant, "F": format_unipoly(canon.F)}
    if isinstance(canon, ThetaCanon):
        return {"variant": canon.variant, "A": format_unipoly(canon.A), "B": format_unipoly(canon.B)}
    if isinstance(canon, (B1Phi, B1PhiW)):
        return {"variant": canon.variant, "n": canon.n}
    if isinstance(canon, (TVal, TValW)):
        return {"variant": canon.variant, "i": canon.i}
    return {"variant": canon.variant}


def canon_from_json(data: dict) -> CyclicCanon:
    from .polytext import parse_unipoly

    v = data["variant"]
    if v == "B0_SsF":
        return B0SsF(parse_unipoly(data["F"]))
    if v == "B0_SF":
        return B0SF(parse_unipoly(data["F"]))
    if v == "Theta":
        return ThetaCanon(parse_unipoly(data["A"]), parse_unipoly(data["B"]))
    if v == "B1Phi":
        return B1Phi(int(data["n"]))
    if v == "B1PhiW":
        return B1PhiW(int(data["n"]))
    if v == "TVal":
        return TVal(int(data["i"]))
    if v == "TValW":
        return TValW(int(data["i"]))
    if v == "Whole":
        return Whole()
    raise ValueError(f"unknown canonical variant {v!r}")


def wedge_level(params: ModuleParams) -> int | None:
    """The single degenerate valuation level of the parameter pack, if any.

    b = 1: the level n with G(alpha) + n = 0.  Generic b: the level i with
    h(0) + b*i = 0.  b = -1, alpha = 0: the level i = h(0).  At that level
    (and only there) the wedge submodule exists.
    """
    if not params.is_phi or params.b == 0:
        return None
    if params.b == 1:
        v = -params.G.evaluate(params.alpha)
    elif params.b == -1 and params.alpha == 0:
        v = params.h0
    elif params.b == -1:
        return None
    else:
        v = -params.h0 / params.b
    if v >= 0 and Q(v).denominator == 1:
        return int(v)
    return None


# ---------------------------------------------------------------------------
# canonicalization


def canonical_cyclic(params: ModuleParams, f: BiPoly) -> CyclicCanon:
    """Canonical form of the cyclic submodule generated by f (f != 0).

    On the valuation branches a seed sitting in the wedge at the degenerate
    level (its s-free layer one step deeper than its overall valuation)
    generates the wedge, not the full valuation ideal.
    """
    if f.is_zero():
        raise ValueError("the zero polynomial generates the zero submodule")
    if not params.is_phi:
        return _canonical_theta(params, f)
    b = params.b
    if b == 0:
        return _canonical_b0(params, f)
    if b == -1 and params.alpha != 0:
        return Whole()
    root = params.alpha if b == 1 else Q(0)
    n = valuation(f, root)
    if wedge_level(params) == n:
        f0 = f.coeff_s(0)
        if f0.is_zero() or valuation_t(f0, root) > n:
            return B1PhiW(n) if b == 1 else TValW(n)
    return B1Phi(n) if b == 1 else TVal(n)


def _canonical_b0(params: ModuleParams, f: BiPoly) -> CyclicCanon:
    layers = f.s_layers()
    f0 = layers.get(0, UniPoly.zero())
    rest = [u for a, u in layers.items() if a >= 1]
    if params.h0:
        return B0SF(gcd_many(layers.values()))
    if not rest:
        return B0SF(f0.monic())
    Fp = gcd_many(rest)
    Gc = gcd_many([f0, Fp.mul_t(1)])
    Fc = gcd_t(Fp, Gc)
    if Gc == Fc:
        return B0SF(Fc)
    if Gc == Fc.mul_t(1):
        return B0SsF(Fc)
    raise AssertionError(
        "b = 0 canonicalization dichotomy violated; this would falsify the "
        f"classification of cyclic submodules (Gc={Gc!r}, Fc={Fc!r})"
    )


def _canonical_theta(params: ModuleParams, f: BiPoly) -> ThetaCanon:
    layers = f.s_layers()
    f0 = layers.get(0, UniPoly.zero())
    B = gcd_many(layers.values())
    hB = params.h * B
    one_h_f0 = (UniPoly.const(1) + params.h) * f0
    parts = [p for p in (hB, one_h_f0) if not p.is_zero()]
    A = gcd_many(parts) if parts else UniPoly.zero()
    canon = ThetaCanon(A, B)
    if not (divides(canon.B, canon.A) and divides(canon.A, params.h * canon.B)):
        raise AssertionError("theta canonical invariants B | A, A | hB violated")
    return canon


# ---------------------------------------------------------------------------
# membership / equality


def _layer_divisible(p: BiPoly, d: UniPoly, skip_zero_layer: bool = False) -> bool:
    for a, u in p.s_layers().items():
        if skip_zero_layer and a == 0:
            continue
        if not divides(d, u):
            return False
    return True


def member(params: ModuleParams, canon: CyclicCanon, p: BiPoly) -> bool:
    """Exact ideal-theoretic membership of p in the canonical submodule."""
    if p.is_zero():
        return True
    if isinstance(canon, Whole):
        return True
    if isinstance(canon, B0SF):
        return _layer_divisible(p, canon.F)
    if isinstance(canon, B0SsF):
        if not _layer_divisible(p, canon.F, skip_zero_layer=True):
            return False
        p0 = p.coeff_s(0)
        d0 = canon.F.mul_t(1) if params.h0 == 0 else canon.F
        return divides(d0, p0)
    if isinstance(canon, ThetaCanon):
        if not divides(canon.A, p.coeff_s(0)):
            return False
        return all(divides(canon.B, u) for a, u in p.s_layers().items() if a >= 1)
    if isinstance(canon, B1Phi):
        root = params.alpha
        return all(valuation_t(u, root) >= canon.n for u in p.s_layers().values())
    if isinstance(canon, TVal):
        return all(valuation_t(u, 0) >= canon.i for u in p.s_layers().values())
    if isinstance(canon, (B1PhiW, TValW)):
        root = params.alpha if isinstance(canon, B1PhiW) else Q(0)
        lvl = canon.n if isinstance(canon, B1PhiW) else canon.i
        for a, u in p.s_layers().items():
            if valuation_t(u, root) < (lvl + 1 if a == 0 else lvl):
                return False
        return True
    raise TypeError(f"unknown canonical form {canon!r}")


def canon_normalize(params: ModuleParams, canon: CyclicCanon) -> CyclicCanon:
    """Collapse the s-generated b = 0 form when h(0) != 0 (the two coincide)."""
    if isinstance(canon, B0SsF) and params.is_phi and params.b == 0 and params.h0 != 0:
        return B0SF(canon.F)
    return canon


def equal_submodules(params: ModuleParams, c1: CyclicCanon, c2: CyclicCanon) -> bool:
    """Equality of submodules via structural equality of canonical forms."""
    return canon_normalize(params, c1) == canon_normalize(params, c2)


# ---------------------------------------------------------------------------
# generator decompositions and the printed equality criteria


def decompose_cyclic(params: ModuleParams, f: BiPoly) -> list[BiPoly]:
    """Generators whose cyclic submodules sum to the one generated by f.

    b = 0: the list {s*f_i (i >= 1), f_0}.  Theta kind: the list
    {s(1+h)f_i - h f_{i-1} (1 <= i <= n+1, f_{n+1} = 0), (1+h)f_0}.
    """
    if f.is_zero():
        raise ValueError("cannot decompose the zero polynomial")
    layers = f.s_layers()
    if params.is_phi:
        if params.b != 0:
            raise ValueError("generator decomposition is defined for b = 0 and theta")
        out = [BiPoly.from_uni(u, 1) for a, u in layers.items() if a >= 1]
        f0 = layers.get(0)
        if f0:
            out.append(BiPoly.from_uni(f0))
        return out
    n = int(f.s_degree())
    one_h = UniPoly.const(1) + params.h
    out = []
    for i in range(1, n + 2):
        fi = layers.get(i, UniPoly.zero())
        fim1 = layers.get(i - 1, UniPoly.zero())
        gen = BiPoly.from_uni(one_h * fi, 1) - BiPoly.from_uni(params.h * fim1)
        if gen:
            out.append(gen)
    g0 = one_h * layers.get(0, UniPoly.zero())
    if g0:
        out.append(BiPoly.from_uni(g0))
    return out


def prop_eq_criteria(params: ModuleParams, f: BiPoly, g: UniPoly) -> tuple[bool, bool]:
    """The printed gcd/divisibility criteria for S_f = S_{sg} and S_f = S_g.

    g must be nonzero; it is normalized monic.  Requires the b = 0 branch.
    """
    if not (params.is_phi and params.b == 0):
        raise ValueError("the equality criteria apply to the b = 0 branch")
    if g.is_zero():
        raise ValueError("g must be nonzero")
    g = g.monic()
    layers = f.s_layers()
    f0 = layers.get(0, UniPoly.zero())
    allgcd = gcd_many(layers.values())
    if params.h0 != 0:
        eq = allgcd == g
        return eq, eq
    eq_ssg = divides(g.mul_t(1), f0) and allgcd == g
    mixed = [f0] + [u.mul_t(1) for a, u in layers.items() if a >= 1]
    eq_sg = gcd_many(mixed) == g and all(divides(g, u) for a, u in layers.items() if a >= 1)
    return eq_ssg, eq_sg


# ---------------------------------------------------------------------------
# maximal submodules and chains


def _int_divisors(n: int) -> list[int]:
    n = abs(n)
    out = [d for d in range(1, n + 1) if n % d == 0]
    return out


def detectably_reducible(p: UniPoly) -> bool:
    """True when p is certified reducible by a rational root or degree count.

    Degree 1 polynomials are irreducible; degrees 2 and 3 are irreducible
    iff they have no rational root; higher degrees are only screened by the
    rational-root test (a quartic splitting into two quadratics passes).
    """
    d = p.degree()
    if p.is_zero() or d == 0:
        return True
    if d == 1:
        return False
    import math as _math

    denoms = [int(Q(c).denominator) for c in p.c.values()]
    scale = _math.lcm(*denoms)
    ints = {e: int(Q(c).numerator) * (scale // int(Q(c).denominator)) for e, c in p.c.items()}
    a0 = ints.get(0, 0)
    an = ints[int(d)]
    if a0 == 0:
        return True  # t divides p
    for num in _int_divisors(a0):
        for den in _int_divisors(an):
            for sgn in (1, -1):
                if p.evaluate(Q(sgn * num, den)) == 0:
                    return True
    return False


_T_POLY = UniPoly.t()


def maximal_submodules(
    params: ModuleParams, canon: CyclicCanon, irreducibles: Sequence[UniPoly] = ()
) -> list[CyclicCanon]:
    """All maximal submodules of the given canonical submodule.

    The b = 0 lists need the caller-supplied irreducible factors p(t); a p
    that the rational-root / low-degree certificate shows reducible is
    rejected.  For b = 0 with h(0) = 0 the factor p = t is excluded from
    the gcd-form lists (those candidates sit strictly below the s-generated
    step 'S_sF' resp. 'S_tF' that the lists do contain), and 'S_sF' itself
    is maximal below 'S_F' for every F, not only F = 1.
    """
    if isinstance(canon, Whole):
        return []
    if isinstance(canon, B1Phi):
        if wedge_level(params) == canon.n:
            return [B1PhiW(canon.n)]
        return [B1Phi(canon.n + 1)]
    if isinstance(canon, B1PhiW):
        return [B1Phi(canon.n + 1)]
    if isinstance(canon, TVal):
        if wedge_level(params) == canon.i:
            return [TValW(canon.i)]
        return [TVal(canon.i + 1)]
    if isinstance(canon, TValW):
        return [TVal(canon.i + 1)]
    if isinstance(canon, ThetaCanon):
        raise ValueError("no closed-form maximal-submodule list for the theta kind")
    if not (params.is_phi and params.b == 0):
        raise ValueError("gcd-form maximal lists require the b = 0 branch")
    irr = []
    for p in irreducibles:
        if p.is_zero() or p.degree() == 0:
            raise ValueError("irreducible factors must be nonconstant")
        p = p.monic()
        if detectably_reducible(p):
            raise ValueError(f"supplied factor {p!r} is reducible")
        irr.append(p)
    canon = canon_normalize(params, canon)
    F = canon.F
    out: list[CyclicCanon] = []
    if params.h0 != 0:
        seen = set()
        for p in irr:
            cand = B0SF(p * F)
            if cand not in seen:
                seen.add(cand)
                out.append(cand)
        return out
    if isinstance(canon, B0SsF):
        out = [B0SsF(p * F) for p in irr if p != _T_POLY]
        out.append(B0SF(F.mul_t(1)))
        return out
    out = [B0SF(p * F) for p in irr if p != _T_POLY]
    out.append(B0SsF(F))
    return out


def maximal_chain(
    params: ModuleParams,
    canon: CyclicCanon,
    depth: int,
    irreducibles: Sequence[UniPoly] = (),
) -> list[CyclicCanon]:
    """A strictly descending chain of maximal submodules of length <= depth.

    At each step the lexicographically least canonical form (variant tag,
    then contents) is chosen, so the chain is deterministic.  The chain
    stops early only at an irreducible module.
    """
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    chain = [canon]
    cur = canon
    for _ in range(depth):
        options = maximal_submodules(params, cur, irreducibles)
        if not options:
            break
        cur = min(options, key=canon_sort_key)
        chain.append(cur)
    return chain


# ---------------------------------------------------------------------------
# the truncated-closure oracle


@dataclass(frozen=True)
class Bounds:
    """Inner box (s-degree <= sbound, t-degree <= tbound) plus working pad."""

    sbound: int = 8
    tbound: int = 8
    pad: int = 4

    @property
    def smax(self) -> int:
        return self.sbound + self.pad

    @property
    def tmax(self) -> int:
        return self.tbound + self.pad


def box_columns(bounds: Bounds) -> list[tuple[int, int]]:
    """Working-box monomials, pad block first, inner block by s then t descending.

    The ordering makes 'inner box' and 'inner box with s-exponent 0'
    trailing blocks, so echelon pivots identify those sections exactly.
    """
    cols = [(a, c) for a in range(bounds.smax + 1) for c in range(bounds.tmax + 1)]
    cols.sort(key=lambda k: (0 if (k[0] > bounds.sbound or k[1] > bounds.tbound) else 1, -k[0], -k[1]))
    return cols


def _op_list(params: ModuleParams, bounds: Bounds, which: frozenset[str]) -> list[LinOp]:
    smax = bounds.smax
    ops: list[LinOp] = []
    if "S" in which:
        for j in range(smax + 3):
            ops.append(LinOp(f"S^{j}", lambda d, j=j: op_S(params, j, BiPoly._raw(d)).c))
    if "T" in which:
        tmax_j = 1 if not params.is_phi else smax + 2
        for j in range(tmax_j):
            ops.append(LinOp(f"T^{j}", lambda d, j=j: op_T(params, j, BiPoly._raw(d)).c))
    return ops


@lru_cache(maxsize=128)
def _engine(params: ModuleParams, bounds: Bounds, which: frozenset[str]) -> ClosureEngine:
    return ClosureEngine(box_columns(bounds), _op_list(params, bounds, which))


class TruncatedSpan:
    """Result of a truncated-closure computation over a bounded monomial box."""

    def __init__(self, params: ModuleParams, bounds: Bounds, which: frozenset, result):
        self.params = params
        self.bounds = bounds
        self.which = which
        self.result = result

    @property
    def closed(self) -> bool:
        return self.result.closed

    def dim(self) -> int:
        return self.result.dim()

    def contains(self, p: BiPoly) -> bool:
        """Exact membership of p (within the working box) in the computed span."""
        return self.result.contains(p.c)

    def _inner(self, key: tuple[int, int]) -> bool:
        return key[0] <= self.bounds.sbound and key[1] <= self.bounds.tbound

    def inner_dim(self) -> int:
        return self.result.section_pivot_count(self._inner)

    def inner_basis(self) -> list[BiPoly]:
        """Echelon basis of the span's intersection with the inner box."""
        return [BiPoly(d) for d in self.result.section_rows(self._inner)]

    def fills_inner_box(self) -> bool:
        return self.inner_dim() == (self.bounds.sbound + 1) * (self.bounds.tbound + 1)

    def working_basis(self) -> list[BiPoly]:
        return [BiPoly(d) for d in self.result.rows_as_dicts()]

    def univariate_inner_basis(self) -> list[BiPoly]:
        return [
            BiPoly(d)
            for d in self.result.section_rows(lambda k: self._inner(k) and k[0] == 0)
        ]

    def exact_fixpoint_check(self) -> bool:
        """Fully exact stability verification (intended for small boxes)."""
        eng = _engine(self.params, self.bounds, self.which)
        return eng.exact_fixpoint_check(self.result)


def closure_truncated(
    params: ModuleParams,
    seeds: Sequence[BiPoly],
    which: Sequence[str] = ("S", "T"),
    bounds: Bounds = Bounds(),
    settle: bool = False,
) -> TruncatedSpan:
    """Least subspace of the working box containing seeds and stable under
    every S^j/T^j application whose result stays inside the working box;
    escaping applications are discarded whole.

    Stability is enforced on generated vectors; combinations near the pad
    boundary can trail behind, which is why every oracle claim is stated at
    the inner box.  `settle=True` additionally iterates the operators over
    the echelon basis itself until stable (exact; meant for small boxes).
    """
    wh = frozenset(which)
    if not wh or not wh.issubset({"S", "T"}):
        raise ValueError("operator set must be {'S'}, {'T'} or {'S', 'T'}")
    for f in seeds:
        if f and (f.s_degree() > bounds.smax or f.t_degree() > bounds.tmax):
            raise ValueError("seed exceeds the working box")
    eng = _engine(params, bounds, wh)
    result = eng.close([f.c for f in seeds if f])
    if settle:
        result = eng.settle(result)
    return TruncatedSpan(params, bounds, wh, result)


# ---------------------------------------------------------------------------
# member-space bases and stability certificates


def canon_generators(params: ModuleParams, canon: CyclicCanon) -> list[BiPoly]:
    """Small generating set: every member is a sum of in-box monomial
    multiples of these (multiplication operators are S^0 and T^0)."""
    if isinstance(canon, Whole):
        return [BiPoly.const(1)]
    if isinstance(canon, B0SF):
        return [BiPoly.from_uni(canon.F)]
    if isinstance(canon, B0SsF):
        if params.h0 != 0:
            return [BiPoly.from_uni(canon.F)]
        return [BiPoly.from_uni(canon.F, 1), BiPoly.from_uni(canon.F.mul_t(1))]
    if isinstance(canon, ThetaCanon):
        out = []
        if canon.A:
            out.append(BiPoly.from_uni(canon.A))
        if canon.B:
            out.append(BiPoly.from_uni(canon.B, 1))
        return out
    if isinstance(canon, B1Phi):
        return [BiPoly.from_uni(_root_power(params.alpha, canon.n))]
    if isinstance(canon, TVal):
        return [BiPoly.from_uni(_root_power(Q(0), canon.i))]
    if isinstance(canon, B1PhiW):
        g = _root_power(params.alpha, canon.n)
        return [BiPoly.from_uni(g, 1), BiPoly.from_uni(g * UniPoly({1: 1, 0: -params.alpha}))]
    if isinstance(canon, TValW):
        g = _root_power(Q(0), canon.i)
        return [BiPoly.from_uni(g, 1), BiPoly.from_uni(g.mul_t(1))]
    raise TypeError(f"unknown canonical form {canon!r}")


def _root_power(root: Q, n: int) -> UniPoly:
    lin = UniPoly({1: 1, 0: -root})
    out = UniPoly.const(1)
    for _ in range(n):
        out = out * lin
    return out


def member_space_basis(
    params: ModuleParams, canon: CyclicCanon, sbound: int, tbound: int
) -> list[BiPoly]:
    """A basis of {p in the box : member(canon, p)}."""
    out: list[BiPoly] = []
    if isinstance(canon, Whole):
        return [BiPoly({(a, c): 1}) for a in range(sbound + 1) for c in range(tbound + 1)]
    if isinstance(canon, (B0SF, B0SsF)) and (params.h0 != 0 or isinstance(canon, B0SF)):
        F = canon.F
        d = int(F.degree())
        return [
            BiPoly.from_uni(F.mul_t(e), a)
            for a in range(sbound + 1)
            for e in range(tbound - d + 1)
        ]
    if isinstance(canon, B0SsF):
        F, d = canon.F, int(canon.F.degree())
        for e in range(tbound - d):
            out.append(BiPoly.from_uni(F.mul_t(e + 1)))
        for a in range(1, sbound + 1):
            for e in range(tbound - d + 1):
                out.append(BiPoly.from_uni(F.mul_t(e), a))
        return out
    if isinstance(canon, ThetaCanon):
        if canon.A:
            dA = int(canon.A.degree())
            for e in range(tbound - dA + 1):
                out.append(BiPoly.from_uni(canon.A.mul_t(e)))
        if canon.B:
            dB = int(canon.B.degree())
            for a in range(1, sbound + 1):
                for e in range(tbound - dB + 1):
                    out.append(BiPoly.from_uni(canon.B.mul_t(e), a))
        return out
    if isinstance(canon, B1Phi):
        gen = _root_power(params.alpha, canon.n)
        return [
            BiPoly.from_uni(gen.mul_t(e), a)
            for a in range(sbound + 1)
            for e in range(tbound - canon.n + 1)
        ]
    if isinstance(canon, TVal):
        return [
            BiPoly({(a, c): 1})
            for a in range(sbound + 1)
            for c in range(canon.i, tbound + 1)
        ]
    if isinstance(canon, (B1PhiW, TValW)):
        root = params.alpha if isinstance(canon, B1PhiW) else Q(0)
        lvl = canon.n if isinstance(canon, B1PhiW) else canon.i
        gen = _root_power(root, lvl)
        deep = gen * UniPoly({1: 1, 0: -root})
        for e in range(tbound - lvl):
            out.append(BiPoly.from_uni(deep.mul_t(e)))
        for a in range(1, sbound + 1):
            for e in range(tbound - lvl + 1):
                out.append(BiPoly.from_uni(gen.mul_t(e), a))
        return out
    raise TypeError(f"unknown canonical form {canon!r}")


@lru_cache(maxsize=256)
def member_stability_certificate(
    params: ModuleParams, canon: CyclicCanon, bounds: Bounds, which: frozenset[str]
) -> bool:
    """Exactly verify the member predicate's stability under in-box operator
    applications.  Together with member(seed) this proves that the full
    truncated closure of the seed lies inside the member space.
    """
    basis = member_space_basis(params, canon, bounds.smax, bounds.tmax)
    ops = _op_list(params, bounds, which)
    for v in basis:
        for op in ops:
            img = BiPoly._raw(op.apply(v.c))
            if not img:
                continue
            if img.s_degree() > bounds.smax or img.t_degree() > bounds.tmax:
                continue
            if not member(params, canon, img):
                return False
    return True
