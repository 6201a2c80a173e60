"""Tensor products of irreducible slots and their component calculus.

Slots are parameter packs on the irreducible branch (b = -1, alpha != 0,
deg h = 1) with pairwise distinct lambdas; the tensor factor coming from a
trivial module contributes nothing and is omitted.  An element of the
n-fold product is a polynomial in 2n variables s_1, t_1, ..., s_n, t_n,
stored sparsely by exponent tuple.

The generator action is the Leibniz sum of the slot actions.  Because the
slot expansions terminate, sampling L_m u at enough consecutive integers m
determines every component u_{k,j} (slot k acted on by the j-th ladder
operator): the coefficient matrix lambda_k^m (-m)^j is a confluent
Vandermonde with distinct nonzero nodes, hence invertible, and the solve
is exact.  The reach-one probe implements the degree-stripping reduction
(top slot layer extraction, then ladder-differentiation combinations) that
drives every nonzero element down to a multiple of 1 x ... x 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Literal, Mapping, Sequence

from .action import ModuleParams, act_L, op_S
from .poly import BiPoly, Q, QLike
from .virsub import vir_irreducible


@dataclass(frozen=True)
class TensorParams:
    """Slot parameters; every slot irreducible, lambdas pairwise distinct."""

    slots: tuple[ModuleParams, ...]

    def __post_init__(self):
        if not self.slots:
            raise ValueError("at least one slot is required")
        for p in self.slots:
            if not (p.is_phi and vir_irreducible(p)):
                raise ValueError(
                    "every slot must satisfy b = -1, alpha != 0, deg h = 1"
                )
        lams = [p.lam for p in self.slots]
        if len({Q(x) for x in lams}) != len(lams):
            raise ValueError("slot lambdas must be pairwise distinct")

    @property
    def n(self) -> int:
        return len(self.slots)

    def eta(self, k: int) -> Q:
        """The constant slope g of slot k (nonzero since deg h = 1)."""
        return self.slots[k].g.evaluate(0)


class TensorElem:
    """Sparse exact polynomial in the 2n slot variables."""

    __slots__ = ("n", "c")

    def __init__(self, n: int, terms: Mapping[tuple, QLike] | Iterable[tuple] = ()):
        self.n = n
        items = terms.items() if isinstance(terms, Mapping) else terms
        c: dict = {}
        for e, q in items:
            e = tuple(int(x) for x in e)
            if len(e) != 2 * n or any(x < 0 for x in e):
                raise ValueError(f"bad exponent tuple {e!r} for {n} slots")
            q = Q(q)
            if q:
                c[e] = c.get(e, Q(0)) + q
        self.c = {e: q for e, q in c.items() if q}

    @staticmethod
    def one(n: int) -> "TensorElem":
        return TensorElem(n, {(0,) * (2 * n): 1})

    @staticmethod
    def _raw(n: int, c: dict) -> "TensorElem":
        u = TensorElem.__new__(TensorElem)
        u.n = n
        u.c = c
        return u

    def is_zero(self) -> bool:
        return not self.c

    def __bool__(self) -> bool:
        return bool(self.c)

    def __eq__(self, other) -> bool:
        return isinstance(other, TensorElem) and self.n == other.n and self.c == other.c

    def __hash__(self) -> int:
        return hash((self.n, frozenset(self.c.items())))

    def __add__(self, other: "TensorElem") -> "TensorElem":
        out = dict(self.c)
        for e, q in other.c.items():
            out[e] = out.get(e, Q(0)) + q
        return TensorElem._raw(self.n, {e: q for e, q in out.items() if q})

    def __sub__(self, other: "TensorElem") -> "TensorElem":
        out = dict(self.c)
        for e, q in other.c.items():
            out[e] = out.get(e, Q(0)) - q
        return TensorElem._raw(self.n, {e: q for e, q in out.items() if q})

    def __neg__(self) -> "TensorElem":
        return TensorElem._raw(self.n, {e: -q for e, q in self.c.items()})

    def scale(self, q: QLike) -> "TensorElem":
        q = Q(q)
        if not q:
            return TensorElem(self.n)
        return TensorElem._raw(self.n, {e: v * q for e, v in self.c.items()})

    def slot_s_degree(self, k: int) -> int:
        return max((e[2 * k] for e in self.c), default=0)

    def slot_t_degree(self, k: int) -> int:
        return max((e[2 * k + 1] for e in self.c), default=0)

    def scalar_of_one(self) -> Q | None:
        """The coefficient c when the element equals c * (1 x ... x 1), else None."""
        if len(self.c) != 1:
            return None
        (e, q), = self.c.items()
        return q if not any(e) else None

    def to_json(self) -> list[dict]:
        from .poly import rat_str

        return [
            {"exponents": list(e), "coeff": rat_str(q)}
            for e, q in sorted(self.c.items())
        ]

    @staticmethod
    def from_json(n: int, data: Sequence[Mapping]) -> "TensorElem":
        return TensorElem(n, {tuple(d["exponents"]): Q(d["coeff"]) for d in data})

    def __repr__(self) -> str:
        return f"TensorElem(n={self.n}, {len(self.c)} terms)"


def from_slots(factors: Sequence[BiPoly]) -> TensorElem:
    """Build the product element f_1 x f_2 x ... x f_n from slot polynomials."""
    n = len(factors)
    out = {(): Q(1)}
    for f in factors:
        nxt: dict = {}
        for e, q in out.items():
            for (a, c), q2 in f.c.items():
                nxt[e + (a, c)] = q * q2
        out = nxt
        if not out:
            break
    return TensorElem(n, out)


def _apply_in_slot(u: TensorElem, k: int, op) -> TensorElem:
    """Apply a BiPoly -> BiPoly linear map in slot k, identity elsewhere."""
    groups: dict[tuple, dict] = {}
    for e, q in u.c.items():
        rest = e[: 2 * k] + e[2 * k + 2 :]
        groups.setdefault(rest, {})[(e[2 * k], e[2 * k + 1])] = q
    out: dict = {}
    for rest, terms in groups.items():
        img = op(BiPoly._raw(terms))
        for (a, c), q in img.c.items():
            key = rest[: 2 * k] + (a, c) + rest[2 * k :]
            v = out.get(key)
            out[key] = q if v is None else v + q
    return TensorElem._raw(u.n, {e: q for e, q in out.items() if q})


def tensor_act_L(tp: TensorParams, m: int, u: TensorElem) -> TensorElem:
    """The Leibniz action: sum over slots of the slot L_m, identity elsewhere."""
    if u.n != tp.n:
        raise ValueError("element and parameters disagree on the slot count")
    out = TensorElem(tp.n)
    for k, params in enumerate(tp.slots):
        out = out + _apply_in_slot(u, k, lambda f, P=params: act_L(P, m, f))
    return out


def slot_apply(tp: TensorParams, k: int, j: int, u: TensorElem) -> TensorElem:
    """Apply the ladder operator S^j of slot k in the k-th coordinate pair."""
    if not 0 <= k < tp.n:
        raise ValueError(f"slot index {k} out of range")
    return _apply_in_slot(u, k, lambda f, P=tp.slots[k]: op_S(P, j, f))


def vandermonde_extract(
    tp: TensorParams,
    samples: Sequence[tuple[int, TensorElem]],
    jmax: int,
) -> dict[tuple[int, int], TensorElem]:
    """Solve L_m u = sum_{k,j} lambda_k^m (-m)^j u_{k,j} for the components.

    Needs at least n*(jmax+1) samples (m, L_m u), and jmax must be at
    least the largest slot s-degree of u plus two, so that the sampled
    expansion actually terminates at jmax.  With distinct nonzero slot
    lambdas and consecutive sample points the confluent Vandermonde
    coefficient matrix is invertible and the exact solve is unique.
    """
    lams = [Q(p.lam) for p in tp.slots]
    if len(set(lams)) != len(lams) or any(not x for x in lams):
        raise ValueError("repeated or zero lambda node: extraction is ill-posed")
    unknowns = [(k, j) for k in range(tp.n) for j in range(jmax + 1)]
    N = len(unknowns)
    if len(samples) < N:
        raise ValueError(f"need at least {N} samples, got {len(samples)}")
    ms = [m for m, _ in samples[:N]]
    if len(set(ms)) != N:
        raise ValueError("sample points must be distinct")
    rows = [[lams[k] ** m * Q(-m) ** j for (k, j) in unknowns] for m in ms]
    rhs = [v for _, v in samples[:N]]
    # exact Gaussian elimination with TensorElem right-hand sides
    for col in range(N):
        piv = next((r for r in range(col, N) if rows[r][col]), None)
        if piv is None:
            raise ValueError("singular extraction system")
        rows[col], rows[piv] = rows[piv], rows[col]
        rhs[col], rhs[piv] = rhs[piv], rhs[col]
        inv = 1 / rows[col][col]
        rows[col] = [x * inv for x in rows[col]]
        rhs[col] = rhs[col].scale(inv)
        for r in range(N):
            if r != col and rows[r][col]:
                c = rows[r][col]
                rows[r] = [x - c * y for x, y in zip(rows[r], rows[col])]
                rhs[r] = rhs[r] - rhs[col].scale(c)
    return {unknowns[i]: rhs[i] for i in range(N)}


def default_samples(
    tp: TensorParams, u: TensorElem, jmax: int, start: int = 1
) -> list[tuple[int, TensorElem]]:
    """(m, L_m u) at the consecutive window m = start, ..., start + n(jmax+1) - 1."""
    N = tp.n * (jmax + 1)
    return [(m, tensor_act_L(tp, m, u)) for m in range(start, start + N)]


@dataclass(frozen=True)
class TensorProbeResult:
    """Reach-one outcome; cap exhaustion is reported distinctly from failure."""

    status: Literal["reached", "stalled", "cap-exhausted"]
    scalar: Q | None = None

    def __bool__(self) -> bool:
        return self.status == "reached"


def reach_one_tensor(
    tp: TensorParams,
    seed: TensorElem,
    sbound: int = 10,
    tbound: int = 10,
    cap: int = 10,
    blind: bool = False,
) -> TensorProbeResult:
    """Drive a nonzero element down to a scalar multiple of 1 x ... x 1.

    Deterministic reduction, slot by slot from the highest index: while a
    slot carries positive s-degree, the top layer is extracted with the
    vanishing-threshold ladder operator (S at the layer's degree plus two);
    then t-degree is stripped one step at a time by the combination
    eta * F - F^2 = F d_t realized through two S^2 applications.  Every
    intermediate stays within the seed's own degree box.  `cap` bounds the
    reduction steps per slot; exceeding it is reported as cap-exhausted.

    With blind=True a truncated operator closure over the product box is
    computed instead and membership of 1 x ... x 1 is decided exactly
    (meant for small bounds; cross-checks the reduction).
    """
    if seed.is_zero():
        raise ValueError("the probe seed must be nonzero")
    for k in range(tp.n):
        if seed.slot_s_degree(k) > sbound or seed.slot_t_degree(k) > tbound:
            raise ValueError("seed exceeds the probe box")
    if blind:
        return _reach_one_blind(tp, seed, sbound, tbound)
    u = seed
    for k in range(tp.n - 1, -1, -1):
        steps = 0
        while True:
            if u.is_zero():
                return TensorProbeResult("stalled")
            sd = u.slot_s_degree(k)
            td = u.slot_t_degree(k)
            if sd == 0 and td == 0:
                break
            if steps >= cap:
                return TensorProbeResult("cap-exhausted")
            if sd > 0:
                u = slot_apply(tp, k, sd + 2, u)
            else:
                alpha = tp.slots[k].alpha
                v1 = slot_apply(tp, k, 2, u)  # -alpha F u
                v2 = slot_apply(tp, k, 2, v1)  # alpha^2 F^2 u
                fu = v1.scale(-1 / alpha)
                f2u = v2.scale(1 / alpha**2)
                u = fu.scale(tp.eta(k)) - f2u  # F(d_t u): strips one t-degree
            steps += 1
    c = u.scalar_of_one()
    if c:
        return TensorProbeResult("reached", c)
    return TensorProbeResult("stalled")


def _reach_one_blind(
    tp: TensorParams, seed: TensorElem, sbound: int, tbound: int
) -> TensorProbeResult:
    from .span import ClosureEngine, LinOp

    ranges = []
    for _ in range(tp.n):
        ranges.append((sbound, tbound))
    columns: list[tuple] = [()]
    for sb, tb in ranges:
        columns = [e + (a, c) for e in columns for a in range(sb + 1) for c in range(tb + 1)]
    ops = []
    for k in range(tp.n):
        for j in range(sbound + 3):
            ops.append(
                LinOp(
                    f"slot{k}:S^{j}",
                    lambda d, k=k, j=j: slot_apply(tp, k, j, TensorElem._raw(tp.n, dict(d))).c,
                )
            )
    eng = ClosureEngine(columns, ops)
    result = eng.close([seed.c])
    if result.contains(TensorElem.one(tp.n).c):
        return TensorProbeResult("reached", Q(1))
    return TensorProbeResult("stalled")


def extract_invariants(
    params: ModuleParams, pairs: tuple[tuple[int, int], tuple[int, int]] = ((1, 2), (1, 3))
) -> tuple[Q, Q, Q]:
    """Recover (eta, alpha*eta, h(alpha)) of one slot from its action alone.

    The combination lambda^-m L_m 1 - lambda^-m' L_m' 1 is affine in
    (m + m') with slope -alpha*eta, constant h(alpha), and t-coefficient
    eta; two sample pairs with distinct sums separate the three exactly.
    """
    if not (params.is_phi and vir_irreducible(params)):
        raise ValueError("invariant extraction requires b = -1, alpha != 0, deg h = 1")
    (m1, m1p), (m2, m2p) = pairs
    if m1 == m1p or m2 == m2p:
        raise ValueError("sample pairs must have distinct members")
    s1, s2 = m1 + m1p, m2 + m2p
    if s1 == s2:
        raise ValueError("sample pairs must have distinct sums")

    def affine(m: int, mp: int) -> BiPoly:
        one = BiPoly.const(1)
        v = act_L(params, m, one).scale(params.lam ** (-m)) - act_L(
            params, mp, one
        ).scale(params.lam ** (-mp))
        w = v.scale(Q(1, m - mp))
        if any(key not in ((0, 0), (0, 1)) for key in w.c):
            raise AssertionError("unexpected shape in the invariant display")
        return w

    w1, w2 = affine(m1, m1p), affine(m2, m2p)
    eta = w1.c.get((0, 1), Q(0))
    if w2.c.get((0, 1), Q(0)) != eta:
        raise AssertionError("inconsistent slope between sample pairs")
    c1 = w1.c.get((0, 0), Q(0))
    c2 = w2.c.get((0, 0), Q(0))
    alpha_eta = (c1 - c2) / Q(s2 - s1)
    h_alpha = c1 + Q(s1) * alpha_eta
    return eta, alpha_eta, h_alpha
