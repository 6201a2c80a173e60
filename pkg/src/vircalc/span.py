"""Truncated-closure engine: exact spans of operator orbits in a monomial box.

This is the package's brute-force oracle.  Given a finite list of monomial
coordinates (the working box), a family of linear operators, and seed
vectors, it computes the least subspace that contains the seeds and is
stable under every operator application whose result stays inside the box
(applications that leave the box are discarded whole, not truncated).

The computation is two-tier:

  1. Discovery runs the fixpoint iteration over a prime field with numpy
     matrix arithmetic and records, for every new basis vector, which
     (operator, parent row) produced it.
  2. Replay re-executes exactly that certificate list over the rationals.
     Each replayed row is an exact operator image of exact predecessors,
     so the returned span is a genuine subset of the true closure no
     matter what the modular pass did.  A replayed image whose exact
     support leaves the box (a modular false zero) is dropped together
     with its descendants.

Positive facts reported from the result (membership of a vector, row
contents, dimensions of coordinate sections) are therefore exact.  The
`closed` flag means the modular pass reached a fixpoint; callers needing a
fully exact stability proof use `exact_fixpoint_check` (affordable on small
boxes) or a structural argument of their own.
"""

from __future__ import annotations

import math
from typing import Callable, Hashable, Sequence

import numpy as np

from .poly import Q

# Primes small enough that ncols * (p-1)^2 stays below 2^63 for ncols <= 2048.
_PRIMES = (67108859, 66600049)

_INT64_GUARD = 1 << 62
_STRIP_THRESHOLD = 1 << 41


class ModularFailure(Exception):
    """A denominator collided with the discovery prime; retry with the next."""


class LinOp:
    """A linear operator given by its exact action on sparse vectors."""

    __slots__ = ("name", "apply")

    def __init__(self, name: str, apply: Callable[[dict], dict]):
        self.name = name
        self.apply = apply

    def __repr__(self) -> str:
        return f"LinOp({self.name})"


def _vec_to_int_row(vec: dict, colindex: dict, ncols: int) -> np.ndarray | None:
    """Clear denominators: sparse rational dict -> integer numpy row.

    Returns None if the vector has support outside the column set.
    """
    if any(k not in colindex for k in vec):
        return None
    denoms = [int(Q(v).denominator) for v in vec.values()]
    lcm = math.lcm(*denoms) if denoms else 1
    row = np.zeros(ncols, dtype=object)
    big = False
    for k, v in vec.items():
        q = Q(v)
        n = int(q.numerator) * (lcm // int(q.denominator))
        row[colindex[k]] = n
        big = big or abs(n) >= _INT64_GUARD
    if not big:
        row = row.astype(np.int64)
    return row


def _strip_content(row: np.ndarray) -> np.ndarray:
    if row.dtype == np.int64:
        g = int(np.gcd.reduce(np.abs(row)))
        if g > 1:
            row = row // g
        return row
    g = 0
    for x in row:
        if x:
            g = math.gcd(g, abs(int(x)))
            if g == 1:
                break
    if g > 1:
        row = np.array([int(x) // g for x in row], dtype=object)
    if max((abs(int(x)) for x in row if x), default=0) < _INT64_GUARD:
        row = row.astype(np.int64)
    return row


def _row_max(row: np.ndarray) -> int:
    if row.dtype == np.int64:
        return int(np.abs(row).max()) if row.size else 0
    return max((abs(int(x)) for x in row), default=0)


class ExactBasis:
    """Row-echelon basis over the integers (exact, arbitrary precision)."""

    def __init__(self, ncols: int):
        self.ncols = ncols
        self.pivots: list[int] = []
        self.rows: list[np.ndarray] = []

    def dim(self) -> int:
        return len(self.rows)

    def reduce(self, row: np.ndarray) -> np.ndarray:
        """Eliminate row against the basis; returns the (content-stripped) residual."""
        for i, piv in enumerate(self.pivots):
            b = int(row[piv])
            if not b:
                continue
            base = self.rows[i]
            a = int(base[piv])
            g = math.gcd(a, b)
            ca, cb = a // g, b // g
            if (
                row.dtype == np.int64
                and base.dtype == np.int64
                and abs(ca) * _row_max(row) + abs(cb) * _row_max(base) < _INT64_GUARD
            ):
                row = ca * row - cb * base
            else:
                row = ca * row.astype(object) - cb * base.astype(object)
            if _row_max(row) > _STRIP_THRESHOLD:
                row = _strip_content(row)
        nz = np.nonzero(row)[0]
        if nz.size:
            row = _strip_content(row)
        return row

    def insert(self, row: np.ndarray) -> bool:
        """Reduce and insert; True if the row was independent."""
        row = self.reduce(row)
        nz = np.nonzero(row)[0]
        if not nz.size:
            return False
        piv = int(nz[0])
        lo, hi = 0, len(self.pivots)
        while lo < hi:
            mid = (lo + hi) // 2
            if self.pivots[mid] < piv:
                lo = mid + 1
            else:
                hi = mid
        self.pivots.insert(lo, piv)
        self.rows.insert(lo, row)
        return True

    def contains_int_row(self, row: np.ndarray) -> bool:
        return not np.nonzero(self.reduce(row))[0].size


class ClosureResult:
    """Exact span produced by ClosureEngine.close()."""

    def __init__(
        self,
        columns: Sequence[Hashable],
        colindex: dict,
        basis: ExactBasis,
        raw_exact: list[dict | None],
        closed: bool,
        dropped: int,
    ):
        self.columns = list(columns)
        self.colindex = colindex
        self.basis = basis
        self.raw_exact = raw_exact
        self.closed = closed
        self.dropped = dropped

    def dim(self) -> int:
        return self.basis.dim()

    def contains(self, vec: dict) -> bool:
        """Exact membership of a sparse rational vector in the span."""
        if not vec:
            return True
        row = _vec_to_int_row(vec, self.colindex, len(self.columns))
        if row is None:
            return False
        return self.basis.contains_int_row(row)

    def rows_as_dicts(self) -> list[dict]:
        """Basis rows as sparse rational dicts (integer entries)."""
        out = []
        for row in self.basis.rows:
            out.append({self.columns[i]: Q(int(row[i])) for i in np.nonzero(row)[0]})
        return out

    def section_pivot_count(self, keep: Callable[[Hashable], bool]) -> int:
        """Dimension of the span's intersection with a trailing coordinate block.

        Valid when the columns satisfying `keep` form a suffix of the column
        order: echelon rows pivoting there are supported there, and span
        exactly the intersection.
        """
        return sum(1 for p in self.basis.pivots if keep(self.columns[p]))

    def section_rows(self, keep: Callable[[Hashable], bool]) -> list[dict]:
        """Basis rows pivoting in (hence supported in) a trailing block."""
        out = []
        for piv, row in zip(self.basis.pivots, self.basis.rows):
            if keep(self.columns[piv]):
                out.append({self.columns[i]: Q(int(row[i])) for i in np.nonzero(row)[0]})
        return out


class ClosureEngine:
    """Reusable closure computer for a fixed (columns, operators) pair."""

    def __init__(self, columns: Sequence[Hashable], ops: Sequence[LinOp]):
        self.columns = list(columns)
        self.ncols = len(self.columns)
        self.colindex = {k: i for i, k in enumerate(self.columns)}
        self.ops = list(ops)
        if self.ncols > 2048:
            raise ValueError("working box too large for the modular engine")
        self._matrices: dict[int, tuple] = {}

    # -- modular helpers ----------------------------------------------------

    def _q_mod(self, q, p: int) -> int:
        q = Q(q)
        den = int(q.denominator) % p
        if den == 0:
            raise ModularFailure
        return int(q.numerator) % p * pow(den, -1, p) % p

    def _op_matrices(self, p: int):
        """(M, E) per op: in-box matrix and escape matrix mod p."""
        if p in self._matrices:
            return self._matrices[p]
        mats = []
        for op in self.ops:
            m = np.zeros((self.ncols, self.ncols), dtype=np.int64)
            esc_index: dict = {}
            esc_rows: list[tuple[int, int, int]] = []
            for j, key in enumerate(self.columns):
                img = op.apply({key: Q(1)})
                for k, v in img.items():
                    r = self._q_mod(v, p)
                    if not r:
                        continue
                    i = self.colindex.get(k)
                    if i is not None:
                        m[i, j] = r
                    else:
                        ei = esc_index.setdefault(k, len(esc_index))
                        esc_rows.append((ei, j, r))
            e = np.zeros((len(esc_index), self.ncols), dtype=np.int64)
            for ei, j, r in esc_rows:
                e[ei, j] = r
            mats.append((m.T.copy(), e.T.copy() if len(esc_index) else None))
        self._matrices[p] = mats
        return mats

    # -- main entry ----------------------------------------------------------

    def close(self, seeds: Sequence[dict]) -> ClosureResult:
        """Truncated closure of the seed vectors (seeds must lie in the box)."""
        for s in seeds:
            for k in s:
                if k not in self.colindex:
                    raise ValueError(f"seed exceeds the working box at {k!r}")
        last_exc: Exception | None = None
        for p in _PRIMES:
            try:
                certs, closed = self._discover(seeds, p)
            except ModularFailure as exc:  # pragma: no cover - tiny denominators only
                last_exc = exc
                continue
            return self._replay(seeds, certs, closed)
        raise RuntimeError("all discovery primes failed") from last_exc

    # -- discovery (mod p) ----------------------------------------------------

    def _discover(self, seeds: Sequence[dict], p: int):
        mats = self._op_matrices(p)
        ncols = self.ncols
        R = np.zeros((ncols, ncols), dtype=np.int64)
        pivots: list[int] = []

        def reduce_block(V: np.ndarray) -> np.ndarray:
            if pivots and V.size:
                V = (V - V[:, pivots] @ R[: len(pivots)] % p) % p
            return V % p

        def add_rows(V: np.ndarray) -> list[int]:
            """Echelonize rows of V into R; returns indices (into V) that were new."""
            nonlocal R
            new_local: list[tuple[int, np.ndarray]] = []
            added: list[int] = []
            for idx in range(V.shape[0]):
                v = V[idx]
                for piv, rw in new_local:
                    c = int(v[piv])
                    if c:
                        v = (v - c * rw) % p
                nz = np.nonzero(v)[0]
                if not nz.size:
                    continue
                piv = int(nz[0])
                v = v * pow(int(v[piv]), -1, p) % p
                new_local.append((piv, v))
                added.append(idx)
            if new_local:
                npos = len(pivots)
                for piv, v in new_local:
                    R[len(pivots)] = v
                    pivots.append(piv)
                newpivs = [piv for piv, _ in new_local]
                # make the new block internally reduced before touching old rows
                for i in range(len(new_local) - 1, -1, -1):
                    row = R[npos + i]
                    for jj in range(i + 1, len(new_local)):
                        c = int(row[newpivs[jj]])
                        if c:
                            row[:] = (row - c * R[npos + jj]) % p
                block = R[npos : len(pivots)]
                if npos:
                    R[:npos] = (R[:npos] - R[:npos][:, newpivs] @ block % p) % p
            return added

        seed_rows = np.zeros((len(seeds), ncols), dtype=np.int64)
        for i, s in enumerate(seeds):
            for k, v in s.items():
                seed_rows[i, self.colindex[k]] = self._q_mod(v, p)
        raw = [seed_rows[i] for i in range(len(seeds))]
        add_rows(reduce_block(seed_rows.copy()))

        certs: list[tuple[int, int]] = []
        frontier = list(range(len(seeds)))
        while frontier:
            parents = np.stack([raw[i] for i in frontier])
            next_frontier: list[int] = []
            for oi, (mT, eT) in enumerate(mats):
                images = parents @ mT % p
                if eT is not None:
                    escaped = (parents @ eT % p).any(axis=1)
                else:
                    escaped = np.zeros(len(frontier), dtype=bool)
                keep = ~escaped
                if not keep.any():
                    continue
                kept_idx = np.nonzero(keep)[0]
                reduced = reduce_block(images[kept_idx].copy())
                added = add_rows(reduced)
                for a in added:
                    parent_global = frontier[kept_idx[a]]
                    raw.append(images[kept_idx[a]])
                    certs.append((oi, parent_global))
                    next_frontier.append(len(raw) - 1)
            frontier = next_frontier
        return certs, True

    # -- exact replay ----------------------------------------------------------

    def _replay(self, seeds: Sequence[dict], certs, closed: bool) -> ClosureResult:
        basis = ExactBasis(self.ncols)
        raw_exact: list[dict | None] = []
        dropped = 0
        for s in seeds:
            vec = {k: Q(v) for k, v in s.items() if Q(v)}
            raw_exact.append(vec)
            row = _vec_to_int_row(vec, self.colindex, self.ncols)
            if row is not None:
                basis.insert(row)
        for oi, parent in certs:
            pv = raw_exact[parent]
            if pv is None:
                raw_exact.append(None)
                dropped += 1
                continue
            img = self.ops[oi].apply(pv)
            img = {k: Q(v) for k, v in img.items() if Q(v)}
            row = _vec_to_int_row(img, self.colindex, self.ncols)
            if row is None:
                # exact support escaped the box although the modular image did not
                raw_exact.append(None)
                dropped += 1
                continue
            raw_exact.append(img)
            basis.insert(row)
        return ClosureResult(
            self.columns, self.colindex, basis, raw_exact, closed and not dropped, dropped
        )

    # -- exact settling (for small boxes) ----------------------------------------

    def settle(self, result: ClosureResult, max_passes: int = 16) -> ClosureResult:
        """Re-apply every operator to the exact echelon rows until stable.

        The raw worklist only applies operators to generated rows; a linear
        combination near the box boundary can have an in-box image none of
        its constituents had.  Each settled row is an exact operator image
        of an exact span element, so soundness is preserved; on return the
        span is stable under operator application to its own basis rows.
        """
        basis = result.basis
        for _ in range(max_passes):
            added = False
            for row in list(basis.rows):
                nz = np.nonzero(row)[0]
                vec = {self.columns[i]: Q(int(row[i])) for i in nz}
                for op in self.ops:
                    img = {k: v for k, v in op.apply(vec).items() if Q(v)}
                    if not img or any(k not in self.colindex for k in img):
                        continue
                    irow = _vec_to_int_row(img, self.colindex, self.ncols)
                    if basis.insert(irow):
                        added = True
            if not added:
                return result
        raise RuntimeError("settling did not stabilize")  # pragma: no cover

    # -- exact verification (for small boxes) -----------------------------------

    def exact_fixpoint_check(self, result: ClosureResult) -> bool:
        """Exactly verify stability of the span (cost grows with box size)."""
        for vec in result.rows_as_dicts():
            for op in self.ops:
                img = op.apply(vec)
                img = {k: v for k, v in img.items() if v}
                if any(k not in self.colindex for k in img):
                    continue
                if not result.contains(img):
                    return False
        return True
