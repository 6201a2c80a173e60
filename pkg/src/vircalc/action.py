"""Module actions on C[s,t] and the associated operator families.

A parameter pack (kind, b, lambda, alpha, h) fixes one module: the 'phi'
kind carries an action of the two-generator extended algebra for every b,
the 'theta' kind the b = 1 action.  This module implements the generator
actions L_m and W_m, the degree-lowering operator families S^j and T^j that
expand them, and executable checkers for the defining bracket relations and
the expansion identity.  All central elements act as zero on these modules.

The operator families satisfy, for every polynomial f,

    L_m f = lambda^m * sum_j (-m)^j S^j f
    W_m f = lambda^m * sum_j (-m)^j T^j f   (+ boundary constant, b = 1, m = 0)

with finitely many nonzero terms (S^j f = 0 once j exceeds the s-degree of
f plus 2).  The conventions "negative-order s-derivatives are the zero map"
and "k! = 1 for k < 0" are applied here, never inside poly.diff.

One printed form of T^j places the b = 1 correction in an exponent; that
reading is inconsistent with both the b = 1 specialization and the W_m
expansion, so T^j is implemented with the correction subtracted:
(t - [b=1]*alpha)/j! * d_s^j + [b=-1]*alpha/(j-1)! * d_s^(j-1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

from .poly import BiPoly, Q, QLike, UniPoly, quotient_by_linear, shift_s

Kind = Literal["phi", "theta"]


@dataclass(frozen=True)
class ModuleParams:
    """Exact parameters of one module, plus the derived data every operator needs.

    Derived fields: g with h(t) - h(alpha) = (t - alpha) g(t); k = deg h
    (0 for constant or zero h); G = h - alpha*g (the b = 1 combination);
    h_alpha = h(alpha); h0 = h(0).
    """

    kind: Kind
    b: Q
    lam: Q
    alpha: Q
    h: UniPoly
    g: UniPoly = field(init=False)
    k: int = field(init=False)
    G: UniPoly = field(init=False)
    h_alpha: Q = field(init=False)
    h0: Q = field(init=False)

    def __post_init__(self):
        if not self.lam:
            raise ValueError("lambda must be nonzero")
        if self.kind not in ("phi", "theta"):
            raise ValueError(f"unknown module kind {self.kind!r}")
        if self.kind == "theta" and self.b != 1:
            raise ValueError("theta modules live over the b = 1 algebra")
        g = quotient_by_linear(self.h, self.alpha)
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "k", 0 if self.h.is_zero() else int(self.h.degree()))
        object.__setattr__(self, "G", self.h - g.scale(self.alpha))
        object.__setattr__(self, "h_alpha", self.h.evaluate(self.alpha))
        object.__setattr__(self, "h0", self.h.evaluate(0))

    @property
    def is_phi(self) -> bool:
        return self.kind == "phi"


def phi_params(b: QLike, lam: QLike, alpha: QLike, h: UniPoly) -> ModuleParams:
    return ModuleParams("phi", Q(b), Q(lam), Q(alpha), h)


def theta_params(lam: QLike, h: UniPoly) -> ModuleParams:
    return ModuleParams("theta", Q(1), Q(lam), Q(0), h)


@dataclass(frozen=True)
class OperatorId:
    """Name of one operator: family L/W with integer index m, or S/T/STheta with j >= 0."""

    family: Literal["L", "W", "S", "T", "STheta"]
    index: int

    def __post_init__(self):
        if self.family in ("S", "T", "STheta") and self.index < 0:
            raise ValueError("S/T family indices must be nonnegative")


def h_m(params: ModuleParams, m: int) -> UniPoly:
    """The degree-k polynomial in the L_m action: m*h - m*alpha*([b=-1](m-1) + [b=1])*g."""
    if not params.is_phi:
        raise ValueError("h_m is defined for the phi kind only")
    out = params.h.scale(m)
    if params.b == -1:
        corr = Q(m) * params.alpha * (m - 1)
    elif params.b == 1:
        corr = Q(m) * params.alpha
    else:
        corr = Q(0)
    if corr:
        out = out - params.g.scale(corr)
    return out


def act_L(params: ModuleParams, m: int, f: BiPoly) -> BiPoly:
    """Apply L_m."""
    lam_m = params.lam**m
    fs = shift_s(f, m)
    if params.is_phi:
        out = fs.mul_s(1) + fs.mul_uni(h_m(params, m))
        if params.b and m:
            c = Q(0)
            if params.b == -1:
                c = Q(m) * params.alpha
            elif params.b == 1:
                c = params.alpha
            mult = UniPoly({1: 1, 0: -c})
            out = out + fs.dt().mul_uni(mult).scale(params.b * m)
        return out.scale(lam_m)
    # theta: L_m f = lambda^m (s + m h(t)) f(s - m, t)
    return (fs.mul_s(1) + fs.mul_uni(params.h.scale(m))).scale(lam_m)


def act_W(params: ModuleParams, m: int, f: BiPoly) -> BiPoly:
    """Apply W_m."""
    if params.is_phi:
        c = Q(0)
        if params.b == -1:
            c = Q(m) * params.alpha
        elif params.b == 1 and m != 0:
            c = params.alpha
        mult = UniPoly({1: 1, 0: -c})
        return shift_s(f, m).mul_uni(mult).scale(params.lam**m)
    return f.mul_uni(UniPoly.t()) if m == 0 else BiPoly.zero()


def _ds(f: BiPoly, order: int) -> BiPoly:
    for _ in range(order):
        f = f.ds()
        if not f:
            break
    return f


def op_S(params: ModuleParams, j: int, f: BiPoly) -> BiPoly:
    """Apply S^j (or the theta-kind variant); j >= 0.

    Terms whose s-derivative order would be negative are dropped (the
    zero-map convention), so S^0 f = s*f.
    """
    if j < 0:
        raise ValueError("operator index must be nonnegative")
    out = _ds(f, j).mul_s(1).scale(Q(1, math.factorial(j)))
    if j >= 1:
        d1 = _ds(f, j - 1)
        if d1:
            if params.is_phi:
                mid = d1.mul_uni(_s_mid_poly(params))
                dt_mult = UniPoly({1: params.b, 0: -(params.alpha if params.b == 1 else Q(0))})
                mid = mid + d1.dt().mul_uni(dt_mult)
            else:
                mid = d1.mul_uni(params.h)
            out = out - mid.scale(Q(1, math.factorial(j - 1)))
    if j >= 2 and params.is_phi and params.b == -1:
        d2 = _ds(f, j - 2)
        if d2:
            tail = (d2.mul_uni(params.g) - d2.dt()).scale(params.alpha)
            out = out - tail.scale(Q(1, math.factorial(j - 2)))
    return out


def _s_mid_poly(params: ModuleParams) -> UniPoly:
    # h + [b=-1] alpha g - [b=1] alpha g  (the multiplication part of the middle term)
    if params.b == -1:
        return params.h + params.g.scale(params.alpha)
    if params.b == 1:
        return params.h - params.g.scale(params.alpha)
    return params.h


def op_T(params: ModuleParams, j: int, f: BiPoly) -> BiPoly:
    """Apply T^j; for the theta kind this is multiplication by t at j = 0 and zero above."""
    if j < 0:
        raise ValueError("operator index must be nonnegative")
    if not params.is_phi:
        return f.mul_uni(UniPoly.t()) if j == 0 else BiPoly.zero()
    alpha1 = params.alpha if params.b == 1 else Q(0)
    mult = UniPoly({1: 1, 0: -alpha1})
    out = _ds(f, j).mul_uni(mult).scale(Q(1, math.factorial(j)))
    if j >= 1 and params.b == -1:
        out = out + _ds(f, j - 1).scale(params.alpha * Q(1, math.factorial(j - 1)))
    return out


def op_STheta(params: ModuleParams, j: int, f: BiPoly) -> BiPoly:
    """Apply the theta-kind S family: (s/j!) d_s^j - (1/(j-1)!) d_s^(j-1) h(t)."""
    if params.is_phi:
        raise ValueError("op_STheta requires the theta kind")
    return op_S(params, j, f)


def apply_operator(params: ModuleParams, op: OperatorId, f: BiPoly) -> BiPoly:
    if op.family == "L":
        return act_L(params, op.index, f)
    if op.family == "W":
        return act_W(params, op.index, f)
    if op.family == "S":
        return op_S(params, op.index, f)
    if op.family == "T":
        return op_T(params, op.index, f)
    return op_STheta(params, op.index, f)


# ---------------------------------------------------------------------------
# Specialized per-branch displays.  These are written straight from the
# simplified forms each parameter branch takes, independently of the master
# formula above, so the two can be tested against each other.


def specialized_op_S(params: ModuleParams, j: int, f: BiPoly) -> BiPoly:
    """The branch-simplified form of S^j (independent of op_S internals)."""
    if j < 0:
        raise ValueError("operator index must be nonnegative")
    lead = _ds(f, j).mul_s(1).scale(Q(1, math.factorial(j)))
    if j == 0:
        return lead
    d1 = _ds(f, j - 1)
    c1 = Q(1, math.factorial(j - 1))
    if not params.is_phi:
        return lead - d1.mul_uni(params.h).scale(c1)
    b, alpha, g, h = params.b, params.alpha, params.g, params.h
    if b == 0:
        return lead - d1.mul_uni(h).scale(c1)
    if b == 1:
        # G(t) + (t - alpha) d_t
        mid = d1.mul_uni(params.G) + d1.dt().mul_uni(UniPoly({1: 1, 0: -alpha}))
        return lead - mid.scale(c1)
    if b == -1 and alpha == 0:
        # t g(t) + h(0) - t d_t
        mid = d1.mul_uni(g.mul_t() + UniPoly.const(params.h0)) - d1.dt().mul_uni(UniPoly.t())
        return lead - mid.scale(c1)
    if b == -1:
        # t(g - d_t) + h(alpha), with the alpha(g - d_t) tail at order j - 2
        mid = (d1.mul_uni(g) - d1.dt()).mul_uni(UniPoly.t()) + d1.scale(params.h_alpha)
        out = lead - mid.scale(c1)
        if j >= 2:
            d2 = _ds(f, j - 2)
            tail = (d2.mul_uni(g) - d2.dt()).scale(alpha)
            out = out - tail.scale(Q(1, math.factorial(j - 2)))
        return out
    # b outside {0, 1, -1}: h(t) + b t d_t
    mid = d1.mul_uni(h) + d1.dt().mul_uni(UniPoly({1: b}))
    return lead - mid.scale(c1)


def specialized_op_T(params: ModuleParams, j: int, f: BiPoly) -> BiPoly:
    """The branch-simplified form of T^j."""
    if j < 0:
        raise ValueError("operator index must be nonnegative")
    if not params.is_phi:
        return f.mul_uni(UniPoly.t()) if j == 0 else BiPoly.zero()
    b, alpha = params.b, params.alpha
    cj = Q(1, math.factorial(j))
    if b == 1:
        return _ds(f, j).mul_uni(UniPoly({1: 1, 0: -alpha})).scale(cj)
    out = _ds(f, j).mul_uni(UniPoly.t()).scale(cj)
    if b == -1 and j >= 1:
        out = out + _ds(f, j - 1).scale(alpha * Q(1, math.factorial(j - 1)))
    return out


# ---------------------------------------------------------------------------
# Executable identity checkers.


@dataclass(frozen=True)
class CheckResult:
    """Outcome of an exact identity check; witnesses are difference polynomials."""

    ok: bool
    witnesses: dict[str, BiPoly]

    def __bool__(self) -> bool:
        return self.ok


def sdeg_bound(f: BiPoly) -> int:
    return int(f.s_degree()) if f else 0


def expand_check(params: ModuleParams, m: int, f: BiPoly) -> CheckResult:
    """Verify L_m f and W_m f against their operator-series expansions.

    The series terminate: S^j f = 0 for j > s-deg f + 2 and T^j f = 0 for
    j > s-deg f + 1.  For the theta kind the W side has no series (only
    W_0 acts, as multiplication by t) and is compared to that form directly.
    """
    lam_m = params.lam**m
    witnesses: dict[str, BiPoly] = {}

    lhs_l = act_L(params, m, f)
    rhs_l = BiPoly.zero()
    for j in range(sdeg_bound(f) + 3):
        coef = Q(1) if j == 0 else Q(-m) ** j
        if coef:
            rhs_l = rhs_l + op_S(params, j, f).scale(coef)
    rhs_l = rhs_l.scale(lam_m)
    diff_l = lhs_l - rhs_l
    if diff_l:
        witnesses["L"] = diff_l

    lhs_w = act_W(params, m, f)
    if params.is_phi:
        rhs_w = BiPoly.zero()
        for j in range(sdeg_bound(f) + 2):
            coef = Q(1) if j == 0 else Q(-m) ** j
            if coef:
                rhs_w = rhs_w + op_T(params, j, f).scale(coef)
        if params.b == 1 and m == 0:
            rhs_w = rhs_w + f.scale(params.alpha)
        rhs_w = rhs_w.scale(lam_m)
    else:
        rhs_w = f.mul_uni(UniPoly.t()) if m == 0 else BiPoly.zero()
    diff_w = lhs_w - rhs_w
    if diff_w:
        witnesses["W"] = diff_w

    return CheckResult(not witnesses, witnesses)


def bracket_check(params: ModuleParams, n: int, m: int, f: BiPoly) -> CheckResult:
    """Verify the three defining bracket relations on f, exactly.

    [L_n, L_m] f = (m - n) L_{n+m} f
    [L_n, W_m] f = (m + b n) W_{n+m} f
    [W_n, W_m] f = 0

    All central elements act as zero here, so no central correction terms
    appear on the right-hand sides.
    """
    witnesses: dict[str, BiPoly] = {}

    lhs = act_L(params, n, act_L(params, m, f)) - act_L(params, m, act_L(params, n, f))
    rhs = act_L(params, n + m, f).scale(m - n)
    d = lhs - rhs
    if d:
        witnesses["LL"] = d

    bval = params.b if params.is_phi else Q(1)
    lhs = act_L(params, n, act_W(params, m, f)) - act_W(params, m, act_L(params, n, f))
    rhs = act_W(params, n + m, f).scale(Q(m) + bval * n)
    d = lhs - rhs
    if d:
        witnesses["LW"] = d

    d = act_W(params, n, act_W(params, m, f)) - act_W(params, m, act_W(params, n, f))
    if d:
        witnesses["WW"] = d

    return CheckResult(not witnesses, witnesses)
