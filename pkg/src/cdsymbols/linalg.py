"""Canonical exact linear algebra over finite chain rings.

Row modules over Z/p^k or GR(p^k, m) are kept in Howell normal form: an
echelon basis with monic pivots p^v, saturated so that every element of the
span reduces to zero by greedy elimination.  Unlike Hermite form, the
saturation rows make span membership decidable over these non-domains, and
the fully reduced form is a canonical invariant of the span.

Rows are numpy int64 arrays of shape (ncols, m); all arithmetic goes through
the CoeffRing vector helpers.
"""

from __future__ import annotations

import numpy as np

from .rings import CoeffRing

__all__ = [
    "HowellAccumulator",
    "Submodule",
    "QuotientModule",
    "howell_form",
    "membership",
    "quotient",
    "elementary_divisors",
    "format_divisors",
]


def _as_rows(rows, ring: CoeffRing, ncols):
    """Normalize input rows to a list of (ncols, m) int64 arrays."""
    out = []
    for r in rows:
        a = np.asarray(r, dtype=np.int64)
        if a.ndim == 1:
            if ring.m == 1:
                a = a.reshape(-1, 1)
            else:
                raise ValueError("rows over an extension ring need explicit coefficient axes")
        if a.shape[1] != ring.m:
            raise ValueError(f"row has {a.shape[1]} coefficient slots, expected {ring.m}")
        if ncols is not None and a.shape[0] != ncols:
            raise ValueError("rows of differing ambient dimension")
        ncols = a.shape[0]
        out.append(a % ring.pk)
    return out, ncols


class HowellAccumulator:
    """Growing Howell basis; add rows one at a time, query span properties.

    The basis is a map pivot-column -> normalized row (pivot entry equal to
    p^v exactly).  `length` is the module length of the span, the sum of
    k - v over pivots, so two nested spans are equal iff lengths agree.
    """

    def __init__(self, ring: CoeffRing, ncols: int, rows=None):
        self.ring = ring
        self.ncols = ncols
        self.pivots: dict[int, np.ndarray] = {}
        self.vals: dict[int, int] = {}
        self.length = 0
        self._sorted: list[int] | None = []
        if rows is not None:
            for r in rows:
                self.add(r)

    def copy(self) -> "HowellAccumulator":
        other = HowellAccumulator(self.ring, self.ncols)
        other.pivots = {j: r.copy() for j, r in self.pivots.items()}
        other.vals = dict(self.vals)
        other.length = self.length
        other._sorted = None
        return other

    def _pivot_cols(self) -> list[int]:
        if self._sorted is None:
            self._sorted = sorted(self.pivots)
        return self._sorted

    def reduce(self, vec: np.ndarray, witness: dict | None = None) -> np.ndarray:
        """Greedy leading-term reduction; the result is zero iff vec is in
        the span.  Records witness coefficients per pivot column if asked."""
        ring = self.ring
        vec = vec % ring.pk
        start = 0
        while True:
            j = ring.vlead(vec, start)
            if j is None:
                return vec
            row = self.pivots.get(j)
            if row is None:
                return vec
            pv = self.vals[j]
            v = ring.vval_entry(vec[j])
            if v < pv:
                return vec
            q = vec[j] // ring.p**pv
            vec = (vec - ring.vscale(row, q)) % ring.pk
            if witness is not None:
                witness[j] = q
            start = j + 1

    def reduce_full(self, vec: np.ndarray, witness: dict | None = None) -> np.ndarray:
        """Canonical coset representative: entry at each pivot column is
        brought into the residues [0, p^v)^m.  Two vectors reduce to the
        same representative iff they differ by an element of the span."""
        ring = self.ring
        vec = vec % ring.pk
        for j in self._pivot_cols():
            e = vec[j]
            if not e.any():
                continue
            q = e // ring.p ** self.vals[j]
            if q.any():
                vec = (vec - ring.vscale(self.pivots[j], q)) % ring.pk
                if witness is not None:
                    witness[j] = q
        return vec

    def contains(self, vec: np.ndarray) -> bool:
        return not self.reduce(vec).any()

    def add(self, vec: np.ndarray) -> bool:
        """Insert a row; returns True if the span grew."""
        ring = self.ring
        before = self.length
        stack = [np.asarray(vec, dtype=np.int64) % ring.pk]
        while stack:
            r = self.reduce(stack.pop())
            j = ring.vlead(r)
            if j is None:
                continue
            v = ring.vval_entry(r[j])
            u = r[j] // ring.p**v
            if ring.m == 1:
                inv = pow(int(u[0]), -1, ring.pk)
                r = (r * inv) % ring.pk
            else:
                r = ring.vscale(r, ring._inv(tuple(int(c) for c in u)))
            old = self.pivots.get(j)
            self.pivots[j] = r
            if old is not None:
                self.length += self.vals[j] - v
                stack.append(old)
            else:
                self.length += ring.k - v
                self._sorted = None
            self.vals[j] = v
            if v > 0:
                stack.append((r * ring.p ** (ring.k - v)) % ring.pk)
        return self.length > before

    def finalize(self) -> "Submodule":
        """Back-substituted canonical form as an immutable Submodule."""
        ring = self.ring
        cols = self._pivot_cols()
        rows = [self.pivots[j].copy() for j in cols]
        for a in range(len(cols)):
            for b in range(a + 1, len(cols)):
                jb = cols[b]
                q = rows[a][jb] // ring.p ** self.vals[jb]
                if q.any():
                    rows[a] = (rows[a] - ring.vscale(rows[b], q)) % ring.pk
        mat = np.stack(rows) if rows else np.zeros((0, self.ncols, ring.m), dtype=np.int64)
        return Submodule(ring, self.ncols, mat, tuple(cols), tuple(self.vals[j] for j in cols))


class Submodule:
    """Canonical Howell-form generating set of a row module.

    Two Submodules over the same ring span the same set iff their rows are
    identical arrays.
    """

    def __init__(self, ring, ncols, rows, pivot_cols, pivot_vals):
        self.ring = ring
        self.ncols = ncols
        self.rows = rows  # (r, ncols, m)
        self.pivot_cols = pivot_cols
        self.pivot_vals = pivot_vals

    @property
    def length(self) -> int:
        return sum(self.ring.k - v for v in self.pivot_vals)

    def nrows(self) -> int:
        return self.rows.shape[0]

    def accumulator(self) -> HowellAccumulator:
        acc = HowellAccumulator(self.ring, self.ncols)
        acc.pivots = {j: self.rows[i] for i, j in enumerate(self.pivot_cols)}
        acc.vals = dict(zip(self.pivot_cols, self.pivot_vals))
        acc.length = self.length
        acc._sorted = sorted(acc.pivots)
        return acc

    def reduce(self, vec, witness=None):
        return self.accumulator().reduce_full(np.asarray(vec, dtype=np.int64), witness)

    def contains(self, vec) -> bool:
        return not self.reduce(vec).any()

    def __eq__(self, other):
        return (
            isinstance(other, Submodule)
            and self.ring == other.ring
            and self.ncols == other.ncols
            and self.pivot_cols == other.pivot_cols
            and self.pivot_vals == other.pivot_vals
            and np.array_equal(self.rows, other.rows)
        )

    def __hash__(self):
        return hash((self.ring, self.ncols, self.pivot_cols, self.pivot_vals, self.rows.tobytes()))

    def __repr__(self):
        return f"Submodule({self.ring}, ambient {self.ncols}, {self.nrows()} rows, length {self.length})"


def howell_form(rows, ring: CoeffRing, ncols: int | None = None) -> Submodule:
    """Howell normal form of the span of the given rows."""
    rows, ncols = _as_rows(rows, ring, ncols)
    if ncols is None:
        ncols = 0
    return HowellAccumulator(ring, ncols, rows).finalize()


def membership(vec, sub: Submodule):
    """Decide vec in span(sub); on success return (True, witness) where
    witness maps pivot columns to coefficients recombining exactly to vec."""
    v = np.asarray(vec, dtype=np.int64)
    if v.ndim == 1 and sub.ring.m == 1:
        v = v.reshape(-1, 1)
    if v.shape[0] != sub.ncols:
        raise ValueError(f"vector has dimension {v.shape[0]}, ambient is {sub.ncols}")
    witness: dict[int, np.ndarray] = {}
    rem = sub.reduce(v, witness)
    if rem.any():
        return False, None
    return True, witness


class QuotientModule:
    """Ambient free module modulo a relation Submodule, with canonical
    coset coordinates given by full Howell reduction."""

    def __init__(self, ncols: int, relations: Submodule):
        if relations.ncols != ncols:
            raise ValueError("relation rows do not match the ambient dimension")
        self.ncols = ncols
        self.ring = relations.ring
        self.relations = relations
        self._acc = relations.accumulator()

    @property
    def length(self) -> int:
        return self.ncols * self.ring.k - self.relations.length

    def reduce(self, vec) -> np.ndarray:
        v = np.asarray(vec, dtype=np.int64)
        if v.ndim == 1 and self.ring.m == 1:
            v = v.reshape(-1, 1)
        return self._acc.reduce_full(v)

    def is_zero(self, vec) -> bool:
        return not self.reduce(vec).any()


def quotient(ncols: int, relations: Submodule) -> QuotientModule:
    return QuotientModule(ncols, relations)


def elementary_divisors(A: Submodule, B: Submodule) -> list[int]:
    """Exponents (e_1 <= e_2 <= ...) of the p-power invariants of B/A.

    Requires A a submodule of B over the same chain ring.  An exponent equal
    to the ring precision k means the invariant is only known to be at least
    p^k at this precision.
    """
    if A.ring != B.ring or A.ncols != B.ncols:
        raise ValueError("modules live in different ambients")
    ring = A.ring
    bacc = B.accumulator()
    for row in A.rows:
        if bacc.reduce(row).any():
            raise ValueError("A is not contained in B")
    lengths = []
    for j in range(ring.k + 1):
        acc = HowellAccumulator(ring, A.ncols, list(A.rows))
        scale = ring.p**j
        if j < ring.k:
            for row in B.rows:
                acc.add((row * scale) % ring.pk)
        lengths.append(acc.length)
    out: list[int] = []
    for t in range(1, ring.k + 1):
        ell_prev = lengths[t - 1] - lengths[t]
        ell_t = lengths[t] - lengths[t + 1] if t < ring.k else 0
        out.extend([t] * (ell_prev - ell_t))
    return sorted(out)


def format_divisors(exponents, ring: CoeffRing) -> list[str]:
    """Human-readable p-power divisors; exponent k renders as a lower bound."""
    out = []
    for e in exponents:
        if e >= ring.k:
            out.append(f">={ring.p ** ring.k}")
        else:
            out.append(str(ring.p**e))
    return out
