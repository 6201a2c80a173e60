"""Submodule calculus over the plain Virasoro generators (S-operators only).

The W-free theory differs sharply from the full-algebra one: cyclic
submodules are spanned by operator words in the first-order operators

    F = g(t) - d_t            (the b = -1 branch)
    H = multiplication/derivation combination of h    (every other branch)

applied to univariate seeds, tensored with plain powers of s.  For
b = -1, alpha != 0 and 2 <= deg h the span of a univariate seed has a
triangular basis indexed by minimal pairs; for deg h = 1 the span of any
nonzero seed is everything; for constant h the reachable t-degrees are
frozen, which is the mechanism behind the failure of finite generation.

A pair (n, i) with 0 <= i <= n is admissible of weight n(k-1) + i; the
minimal pair of a weight minimizes n.  Weights with no admissible pair
exist for k >= 3 (the weight filtration has gaps); minimal_pair returns
None for those.

The basis machinery accepts constant seeds only in maximal_psi_check: the
span of the basis-minus-seed family is *not* operator stable for constant
seeds (the documented anomaly: iterating F on a constant climbs back down
to every degree), and the checker exists to exhibit a concrete witness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .action import ModuleParams, op_S
from .poly import BiPoly, Q, UniPoly
from .span import ExactBasis, _vec_to_int_row
from .submod import Bounds, closure_truncated


@dataclass(frozen=True)
class MinimalPair:
    """The admissible pair of a weight with least operator count n."""

    n: int
    i: int
    k: int
    w: int


def minimal_pair(k: int, w: int) -> MinimalPair | None:
    """Minimal admissible (n, i) with n(k-1) + i = w, i <= n; None if the
    weight is not representable (possible for k >= 3)."""
    if k < 2:
        raise ValueError("minimal pairs are defined for deg h >= 2")
    if w < 0:
        raise ValueError("weights are nonnegative")
    n = -(-w // k)
    i = w - n * (k - 1)
    if i < 0:
        return None
    return MinimalPair(n, i, k, w)


def admissible_pairs(k: int, w: int) -> list[tuple[int, int]]:
    """All (m, j) with j <= m and m(k-1) + j = w, by increasing m."""
    if k < 2:
        raise ValueError("admissible pairs are defined for deg h >= 2")
    out = []
    m = -(-w // k)
    while m * (k - 1) <= w:
        j = w - m * (k - 1)
        if 0 <= j <= m:
            out.append((m, j))
        m += 1
    return out


def apply_F(params: ModuleParams, u: UniPoly) -> UniPoly:
    """The b = -1 ladder operator: F u = g(t) u - u'."""
    return params.g * u - u.derivative()


def apply_H(params: ModuleParams, u: UniPoly) -> UniPoly:
    """The b != -1 ladder operator.

    Theta kind: multiplication by h.  Phi kind: (h - [b=1] alpha g) u +
    (b t - [b=1] alpha) u'.  Raises t-degree by exactly deg h when
    deg h >= 1; preserves each monomial's degree when h is constant.
    """
    if not params.is_phi:
        return params.h * u
    if params.b == -1:
        raise ValueError("the b = -1 branch uses apply_F")
    if params.b == 1:
        return params.G * u + u.derivative() * UniPoly({1: 1, 0: -params.alpha})
    return params.h * u + u.derivative() * UniPoly({1: params.b})


def _tF_halpha(params: ModuleParams, u: UniPoly) -> UniPoly:
    # (t(g - d_t) + h(alpha)) u
    return apply_F(params, u).mul_t(1) + u.scale(params.h_alpha)


# ---------------------------------------------------------------------------
# generator decompositions (cyclic Vir-submodules)


@dataclass(frozen=True)
class PsiDecomposition:
    """Flattened spanning data for a cyclic Vir-submodule.

    cxs entries span C[s]*v for a fixed polynomial v; seed entries stand
    for the full univariate family (F-words for b = -1, H-powers
    otherwise) tensored with C[s].
    """

    params: ModuleParams
    cxs: tuple[BiPoly, ...]
    seeds: tuple[UniPoly, ...]

    def family(self, sbound: int, tbound: int) -> list[BiPoly]:
        """Spanning elements restricted to the (sbound, tbound) box."""
        out: list[BiPoly] = []
        for v in self.cxs:
            td = int(v.t_degree()) if v else 0
            sd = int(v.s_degree()) if v else 0
            if td > tbound:
                continue
            for l in range(sbound - sd + 1):
                out.append(v.mul_s(l))
        for u in self.seeds:
            for w in _univariate_family(self.params, u, tbound):
                for l in range(sbound + 1):
                    out.append(BiPoly.from_uni(w, l))
        return out


def _univariate_family(params: ModuleParams, u: UniPoly, tbound: int) -> list[UniPoly]:
    """The t-part family spanning the cyclic Vir-submodule of univariate u."""
    if u.is_zero():
        return []
    out: list[UniPoly] = []
    if params.is_phi and params.b == -1:
        d = int(u.degree())
        k = params.k
        if k == 0:
            # F = -d_t: the family t^i F^m u, i <= m, is finite
            fm = u
            pows = [u]
            for _ in range(d):
                fm = apply_F(params, fm)
                pows.append(fm)
            for m, fmu in enumerate(pows):
                if fmu.is_zero():
                    continue
                for i in range(m + 1):
                    w = fmu.mul_t(i)
                    if w.degree() <= tbound:
                        out.append(w)
            return out
        wmax = tbound - d
        if k == 1:
            # F preserves degree; i raises it.  The span saturates fast.
            fpow = [u]
            for _ in range(tbound + 2):
                fpow.append(apply_F(params, fpow[-1]))
            return [
                fpow[m].mul_t(i)
                for m in range(len(fpow))
                for i in range(min(m, max(0, wmax)) + 1)
            ]
        fpow = [u]
        for _ in range(max(0, wmax)):
            fpow.append(apply_F(params, fpow[-1]))
        for w in range(wmax + 1):
            for (m, i) in admissible_pairs(k, w):
                if m < len(fpow):
                    out.append(fpow[m].mul_t(i))
        return out
    # b != -1 (or theta): H-powers
    k = params.k
    cur = u
    out.append(cur)
    if k >= 1:
        while True:
            cur = apply_H(params, cur)
            if cur.is_zero() or cur.degree() > tbound:
                break
            out.append(cur)
    else:
        for _ in range(int(u.degree()) + 2 if u.degree() >= 0 else 2):
            cur = apply_H(params, cur)
            if cur.is_zero():
                break
            out.append(cur)
    return out


def psi_gens(params: ModuleParams, f: BiPoly) -> PsiDecomposition:
    """Decompose the cyclic Vir-submodule of f into C[s]-parts and
    univariate seed families.

    b = -1 (alpha != 0): univariate seeds and single s-power shapes only
    (no printed decomposition exists for general f on that branch).
    Other branches: full recursion through the two-layer reduction.
    """
    if f.is_zero():
        raise ValueError("cannot decompose the zero polynomial")
    layers = f.s_layers()
    if params.is_phi and params.b == -1:
        if params.alpha == 0:
            raise ValueError("no decomposition is available for b = -1 with alpha = 0")
        if len(layers) == 1:
            [(n, u)] = layers.items()
            if n == 0:
                return PsiDecomposition(params, (), (u,))
            return PsiDecomposition(
                params,
                (BiPoly.from_uni(u, 1),),
                (apply_F(params, u), _tF_halpha(params, u)),
            )
        raise ValueError(
            "general s-mixed seeds are not supported on the b = -1 branch; "
            "decompose s-monomial shapes or univariate seeds"
        )
    if len(layers) == 1:
        [(n, u)] = layers.items()
        if n == 0:
            return PsiDecomposition(params, (), (u,))
        return PsiDecomposition(params, (BiPoly.from_uni(u, 1),), (apply_H(params, u),))
    n = int(f.s_degree())
    cxs: list[BiPoly] = []
    seeds: list[UniPoly] = []
    one_plus_H = lambda u: u + apply_H(params, u)
    for i in range(1, n + 2):
        fi = layers.get(i, UniPoly.zero())
        fim1 = layers.get(i - 1, UniPoly.zero())
        a = one_plus_H(fi) if fi else UniPoly.zero()
        b = -apply_H(params, fim1) if fim1 else UniPoly.zero()
        if a.is_zero():
            if b:
                seeds.append(b)
            continue
        v = BiPoly.from_uni(a, 1) + BiPoly.from_uni(b)
        cxs.append(v)
        seeds.append(apply_H(params, a))
        if b:
            seeds.append(one_plus_H(b))
    f0 = layers.get(0, UniPoly.zero())
    if f0:
        seeds.append(one_plus_H(f0))
    return PsiDecomposition(params, tuple(cxs), tuple(s for s in seeds if s))


# ---------------------------------------------------------------------------
# membership, bases, maximality


class _UniSpan:
    """Exact echelon span of univariate polynomials up to a degree bound."""

    def __init__(self, deg_max: int):
        self.deg_max = deg_max
        self.basis = ExactBasis(deg_max + 1)
        self.colindex = {e: deg_max - e for e in range(deg_max + 1)}

    def _row(self, u: UniPoly):
        vec = {self.colindex[e]: q for e, q in u.c.items()}
        return _vec_to_int_row(vec, {i: i for i in range(self.deg_max + 1)}, self.deg_max + 1)

    def insert(self, u: UniPoly) -> bool:
        if u.is_zero() or u.degree() > self.deg_max:
            return False
        return self.basis.insert(self._row(u))

    def contains(self, u: UniPoly) -> bool:
        if u.is_zero():
            return True
        if u.degree() > self.deg_max:
            return False
        return self.basis.contains_int_row(self._row(u))

    def dim(self) -> int:
        return self.basis.dim()


def _psi_t_span(params: ModuleParams, f: UniPoly, deg_max: int) -> _UniSpan:
    """Span of the full admissible t-part family of the cyclic
    Vir-submodule of univariate f (b = -1), up to degree deg_max."""
    span = _UniSpan(deg_max)
    if params.k < 2:
        for w in _univariate_family(params, f, deg_max):
            span.insert(w)
        return span
    d = int(f.degree())
    k = params.k
    wmax = deg_max - d
    fpow = [f]
    for _ in range(max(0, wmax // (k - 1))):
        fpow.append(apply_F(params, fpow[-1]))
    for w in range(wmax + 1):
        for (m, i) in admissible_pairs(k, w):
            if m < len(fpow):
                span.insert(fpow[m].mul_t(i))
    return span


def psi_member(params: ModuleParams, f: UniPoly, p: BiPoly, bound: int) -> bool:
    """Exact membership of p in the cyclic Vir-submodule generated by the
    univariate polynomial f, decided inside t-degree <= bound.

    For b = -1, alpha != 0: deg h = 1 makes the submodule everything (any
    p is a member); deg h >= 2 uses the weight-filtered ladder family;
    constant h uses the finite derivative family.  Other branches use the
    H-power family.
    """
    if f.is_zero():
        raise ValueError("the zero polynomial generates nothing")
    if p.is_zero():
        return True
    if p.t_degree() > bound:
        raise ValueError("membership bound is smaller than the t-degree of p")
    if params.is_phi and params.b == -1:
        if params.alpha == 0:
            raise ValueError("b = -1 membership requires alpha != 0")
        if params.k == 1:
            return True
        span = _psi_t_span(params, f, bound)
        return all(span.contains(u) for u in p.s_layers().values())
    span = _UniSpan(bound)
    for w in _univariate_family(params, f, bound):
        span.insert(w)
    return all(span.contains(u) for u in p.s_layers().values())


@dataclass(frozen=True)
class PsiBasis:
    """Triangular minimal-pair family of a cyclic Vir-submodule (b = -1,
    alpha != 0, 2 <= deg h, deg f >= 1).

    Elements are (l, pair, t-part) with the t-part of exact degree
    pair.w + deg f; distinct elements have distinct t-degrees within each
    s-power, so the family is triangular and independent.  Whether it
    spans the full cyclic submodule is a property the test suites check
    against psi_member rather than assume; maximal_psi_check produces the
    concrete witnesses where it fails.
    """

    f: UniPoly
    k: int
    bound: int
    elements: tuple[tuple[int, MinimalPair, UniPoly], ...]

    def t_parts(self) -> list[UniPoly]:
        seen = {}
        for _, mp, u in self.elements:
            seen.setdefault((mp.n, mp.i), u)
        return [u for _, u in sorted(seen.items(), key=lambda kv: kv[1].degree())]

    def to_json(self) -> list[dict]:
        from .polytext import format_unipoly

        return [
            {"l": l, "n": mp.n, "i": mp.i, "poly": format_unipoly(u)}
            for (l, mp, u) in self.elements
        ]


def psi_basis(params: ModuleParams, f: UniPoly, bound: int) -> PsiBasis:
    """The minimal-pair basis of the cyclic Vir-submodule of f, listing all
    elements s^l * t-part with l + t-degree <= bound."""
    if not (params.is_phi and params.b == -1 and params.alpha != 0):
        raise ValueError("the minimal-pair basis lives on the b = -1, alpha != 0 branch")
    if params.k < 2:
        raise ValueError("the minimal-pair basis requires 2 <= deg h")
    if f.is_zero() or f.degree() < 1:
        raise ValueError(
            "deg f >= 1 required: for constant seeds the ladder climbs back to "
            "every degree and the basis-minus-seed span is not a submodule "
            "(see maximal_psi_check for the witness)"
        )
    d = int(f.degree())
    k = params.k
    elements = []
    fpow = [f]
    for w in range(0, bound - d + 1):
        mp = minimal_pair(k, w)
        if mp is None:
            continue
        while len(fpow) <= mp.n:
            fpow.append(apply_F(params, fpow[-1]))
        tpart = fpow[mp.n].mul_t(mp.i)
        for l in range(bound - (w + d) + 1):
            elements.append((l, mp, tpart))
    return PsiBasis(f, k, bound, tuple(elements))


@dataclass(frozen=True)
class PsiCheckResult:
    """Outcome of the maximality stability check; the witness names the
    operator index, the basis element (l, n, i), and the escaping image."""

    stable: bool
    witness: tuple[int, tuple[int, int, int], BiPoly] | None

    def __bool__(self) -> bool:
        return self.stable


def _minimal_t_parts(
    params: ModuleParams, f: UniPoly, deg_max: int
) -> list[tuple[MinimalPair, UniPoly]]:
    d = int(f.degree())
    out = []
    fpow = [f]
    for w in range(0, deg_max - d + 1):
        mp = minimal_pair(params.k, w)
        if mp is None:
            continue
        while len(fpow) <= mp.n:
            fpow.append(apply_F(params, fpow[-1]))
        out.append((mp, fpow[mp.n].mul_t(mp.i)))
    return out


def maximal_psi_check(params: ModuleParams, f: UniPoly, bound: int) -> PsiCheckResult:
    """Check that the span of the minimal-pair family minus the seed itself
    is stable under every S-operator application staying inside the box.

    Constant seeds are accepted deliberately: they violate stability and
    this check returns the concrete witness.  The check can also fail for
    deg f >= 1 (and does, e.g. for every degree-2 h): the minimal-pair
    family then underspans the cyclic submodule, which this witness
    machinery makes reproducible.
    """
    if not (params.is_phi and params.b == -1 and params.alpha != 0):
        raise ValueError("the stability check lives on the b = -1, alpha != 0 branch")
    if params.k < 2:
        raise ValueError("the stability check requires 2 <= deg h")
    if f.is_zero():
        raise ValueError("the seed must be nonzero")
    d = int(f.degree())
    deg_room = bound + params.k
    parts = _minimal_t_parts(params, f, deg_room)
    full = _UniSpan(deg_room)
    rest = _UniSpan(deg_room)
    for mp, tpart in parts:
        full.insert(tpart)
        if mp.w >= 1:
            rest.insert(tpart)
    elements = [
        (l, mp, tpart)
        for mp, tpart in parts
        if mp.w + d <= bound
        for l in range(bound - (mp.w + d) + 1)
        if not (l == 0 and mp.w == 0)
    ]
    for l, mp, tpart in elements:
        v = BiPoly.from_uni(tpart, l)
        for j in range(l + 3):
            img = op_S(params, j, v)
            if img.is_zero() or img.t_degree() > deg_room:
                continue
            for a, u in img.s_layers().items():
                ok = (rest if a == 0 else full).contains(u)
                if not ok:
                    return PsiCheckResult(False, (j, (l, mp.n, mp.i), img))
    return PsiCheckResult(True, None)


def vir_irreducible(params: ModuleParams) -> bool:
    """Irreducibility over the plain Virasoro generators: b = -1,
    alpha != 0, deg h = 1."""
    if not params.is_phi:
        raise ValueError("irreducibility predicate applies to the phi kind")
    return params.b == -1 and params.alpha != 0 and params.k == 1 and not params.h.is_zero()


def reach_one_probe(params: ModuleParams, seed: BiPoly, bounds: Bounds = Bounds(12, 12, 4)) -> bool:
    """One-sided evidence that the constant 1 lies in the truncated
    S-closure of the seed.  False means only: not reached in this box.

    On the irreducible branch a deterministic degree-stripping reduction
    (top-layer extraction, then ladder-differentiation combinations) gives
    an exact derivation without running the box oracle.
    """
    if seed.is_zero():
        raise ValueError("the probe seed must be nonzero")
    if seed.s_degree() > bounds.smax or seed.t_degree() > bounds.tmax:
        raise ValueError("seed exceeds the working box")
    if params.is_phi and vir_irreducible(params):
        u = seed
        eta = params.g.evaluate(0)  # deg h = 1: g is the nonzero constant slope
        steps = int(seed.s_degree()) + int(seed.t_degree()) + 4
        for _ in range(steps):
            sd = int(u.s_degree())
            td = int(u.t_degree())
            if sd == 0 and td == 0:
                return True
            if sd > 0:
                u = op_S(params, sd + 2, u)
            else:
                v1 = op_S(params, 2, u)  # -alpha F u
                v2 = op_S(params, 2, v1)  # alpha^2 F^2 u
                fu = v1.scale(-1 / params.alpha)
                f2u = v2.scale(1 / params.alpha**2)
                u = fu.scale(eta) - f2u  # F(d_t u): drops t-degree by one
            if u.is_zero():
                break
        if not u.is_zero() and u.s_degree() == 0 and u.t_degree() == 0:
            return True
    span = closure_truncated(params, [seed], ("S",), bounds)
    return span.contains(BiPoly.const(1))


def finite_degree_profile(
    params: ModuleParams, seed: BiPoly, bounds: Bounds = Bounds(8, 8, 4)
) -> frozenset[int]:
    """t-degrees occurring among univariate members of the truncated
    S-closure (inner box).  For constant h the ladder preserves each
    monomial's t-degree, so no degree outside the seed's coefficient
    support can ever appear."""
    if params.is_phi and params.b == -1:
        raise ValueError("the degree profile is defined for the b != -1 branches")
    if params.k != 0:
        raise ValueError("the degree profile is about constant h")
    span = closure_truncated(params, [seed], ("S",), bounds)
    degs: set[int] = set()
    for row in span.univariate_inner_basis():
        degs.update(e for (_, e) in row.c)
    return frozenset(degs)
