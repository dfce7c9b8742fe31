"""Dense matrices over a finite field, plus permutation and monomial actions.

Column-action convention, used everywhere and pinned by tests:

    (A * P)[i] = A[sigma(i)]

i.e. column i of the permuted matrix is column sigma(i) of the original.
A monomial matrix factors as M = D * P with D = diag(d_1..d_n), so

    (A * M)[i] = d[sigma(i)] * A[sigma(i)]

with the diagonal indexed by *source* column. Degenerate shapes (zero
rows or zero columns) are legal in every operation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .errors import DimMismatch, FieldMismatch, NotFullRank, NotSquare, Singular
from .field import Field


class Mat:
    """Immutable k x n matrix; entries are canonical field ints."""

    __slots__ = ("field", "k", "n", "rows", "_rref", "_rref_t")

    def __init__(self, fld: Field, rows, n: Optional[int] = None):
        rows = tuple(tuple(int(x) for x in r) for r in rows)
        k = len(rows)
        if k:
            width = len(rows[0])
            if any(len(r) != width for r in rows):
                raise DimMismatch("ragged rows")
            if n is not None and n != width:
                raise DimMismatch(f"declared width {n} but rows have {width}")
            n = width
        elif n is None:
            n = 0
        q = fld.q
        for r in rows:
            for x in r:
                if not (0 <= x < q):
                    raise ValueError(f"entry {x} not in {fld!r}")
        self.field = fld
        self.k = k
        self.n = n
        self.rows = rows
        self._rref = None
        self._rref_t = None

    # -- constructors --------------------------------------------------------

    @classmethod
    def zeros(cls, fld: Field, k: int, n: int) -> "Mat":
        return cls(fld, tuple((0,) * n for _ in range(k)), n)

    @classmethod
    def identity(cls, fld: Field, k: int) -> "Mat":
        return cls(fld, tuple(tuple(1 if i == j else 0 for j in range(k)) for i in range(k)), k)

    # -- plumbing --------------------------------------------------------------

    def __eq__(self, other):
        return (
            isinstance(other, Mat)
            and self.field == other.field
            and self.n == other.n
            and self.rows == other.rows
        )

    def __hash__(self):
        return hash((self.field, self.n, self.rows))

    def __repr__(self):
        return f"Mat({self.field!r}, {self.k}x{self.n})"

    def __getstate__(self):
        return (self.field, self.rows, self.n)

    def __setstate__(self, state):
        fld, rows, n = state
        self.__init__(fld, rows, n)

    def __reduce__(self):
        return (Mat, (self.field, self.rows, self.n))

    def col(self, j: int) -> tuple:
        return tuple(r[j] for r in self.rows)

    def cols(self) -> list[tuple]:
        return [self.col(j) for j in range(self.n)]

    # -- arithmetic --------------------------------------------------------------

    def _same_field(self, other: "Mat"):
        if self.field != other.field:
            raise FieldMismatch(f"{self.field!r} vs {other.field!r}")

    def mul(self, other: "Mat") -> "Mat":
        self._same_field(other)
        if self.n != other.k:
            raise DimMismatch(f"{self.k}x{self.n} times {other.k}x{other.n}")
        fld = self.field
        flat = fld.flat_ops()
        bt = other.rows
        m = other.n
        out = []
        if flat:
            add_t, _, mul_t, _, _ = flat
            q = fld.q
            for arow in self.rows:
                acc = [0] * m
                for t, a in enumerate(arow):
                    if a:
                        brow = bt[t]
                        base = a * q
                        for j in range(m):
                            b = brow[j]
                            if b:
                                acc[j] = add_t[acc[j] * q + mul_t[base + b]]
                out.append(acc)
        else:
            add, mul = fld.add, fld.mul
            for arow in self.rows:
                acc = [0] * m
                for t, a in enumerate(arow):
                    if a:
                        brow = bt[t]
                        for j in range(m):
                            b = brow[j]
                            if b:
                                acc[j] = add(acc[j], mul(a, b))
                out.append(acc)
        return Mat(self.field, out, m)

    def scale(self, a: int) -> "Mat":
        mul = self.field.mul
        return Mat(self.field, [[mul(a, x) for x in r] for r in self.rows], self.n)

    def apply_mono(self, m: "Mono") -> "Mat":
        """A * M by column relocation and scaling; no dense n x n product."""
        if m.field != self.field:
            raise FieldMismatch(f"{self.field!r} vs {m.field!r}")
        if m.n != self.n:
            raise DimMismatch(f"matrix has {self.n} columns, action has {m.n}")
        sigma = m.perm.sigma
        diag = m.diag
        mul = self.field.mul
        out = [
            [mul(diag[s], row[s]) for s in sigma]
            for row in self.rows
        ]
        return Mat(self.field, out, self.n)

    # -- elimination -----------------------------------------------------------

    def rref(self):
        """(R, rank, pivots): the unique reduced row echelon form."""
        if self._rref is None:
            rows, rank, piv = _eliminate(self.field, [list(r) for r in self.rows], self.n)
            self._rref = (Mat(self.field, rows, self.n), rank, tuple(piv))
        return self._rref

    def rref_with_transform(self):
        """(R, rank, pivots, U) with U invertible and U * self = R."""
        if self._rref_t is None:
            k, n = self.k, self.n
            aug = [list(r) + [1 if i == j else 0 for j in range(k)] for i, r in enumerate(self.rows)]
            rows, rank, piv = _eliminate(self.field, aug, n)
            r_mat = Mat(self.field, [row[:n] for row in rows], n)
            u_mat = Mat(self.field, [row[n:] for row in rows], k)
            self._rref_t = (r_mat, rank, tuple(piv), u_mat)
        return self._rref_t

    def rank(self) -> int:
        return self.rref()[1]

    def is_invertible(self) -> bool:
        return self.k == self.n and self.rank() == self.n

    def inv(self) -> "Mat":
        if self.k != self.n:
            raise NotSquare(f"{self.k}x{self.n}")
        _, rank, _, u = self.rref_with_transform()
        if rank != self.n:
            raise Singular(f"rank {rank} < {self.n}")
        return u


def _eliminate(fld: Field, rows: list[list[int]], n: int):
    """Gauss-Jordan on the first n columns; pivots scan columns left to
    right, first non-zero entry top to bottom. Extra columns ride along."""
    k = len(rows)
    inv, mul, sub = fld.inv, fld.mul, fld.sub
    width = len(rows[0]) if rows else n
    piv_cols = []
    r = 0
    for c in range(n):
        pr = None
        for i in range(r, k):
            if rows[i][c]:
                pr = i
                break
        if pr is None:
            continue
        if pr != r:
            rows[r], rows[pr] = rows[pr], rows[r]
        head = rows[r][c]
        if head != 1:
            f = inv(head)
            row = rows[r]
            for j in range(c, width):
                if row[j]:
                    row[j] = mul(f, row[j])
        prow = rows[r]
        for i in range(k):
            if i != r and rows[i][c]:
                f = rows[i][c]
                row = rows[i]
                for j in range(c, width):
                    if prow[j]:
                        row[j] = sub(row[j], mul(f, prow[j]))
        piv_cols.append(c)
        r += 1
        if r == k:
            break
    return rows, r, piv_cols


# ---------------------------------------------------------------------------
# row-space relations


def rowspace_equal(a: Mat, b: Mat) -> bool:
    """Whether the row spans coincide (RREF equality minus zero rows)."""
    a._same_field(b)
    if a.n != b.n:
        raise DimMismatch(f"{a.n} vs {b.n} columns")
    ra, rank_a, _ = a.rref()
    rb, rank_b, _ = b.rref()
    if rank_a != rank_b:
        return False
    return ra.rows[:rank_a] == rb.rows[:rank_b]


def solve_change_of_basis(a: Mat, b: Mat) -> Optional[Mat]:
    """S with S * a = b for full-row-rank a, b; None when row spans differ.

    Inverts the pivot-column block of a and checks the product in full.
    """
    a._same_field(b)
    if a.k != b.k or a.n != b.n:
        raise DimMismatch(f"{a.k}x{a.n} vs {b.k}x{b.n}")
    k = a.k
    if a.rank() != k or b.rank() != k:
        raise NotFullRank("both matrices must have full row rank")
    piv = a.rref()[2]
    a_blk = Mat(a.field, [[row[c] for c in piv] for row in a.rows], k)
    b_blk = Mat(a.field, [[row[c] for c in piv] for row in b.rows], k)
    s = b_blk.mul(a_blk.inv())
    if s.mul(a) == b:
        return s
    return None


def row_basis_transform(a: Mat, b: Mat) -> Optional[Mat]:
    """Invertible S with S * a = b for any equal-shape pair with equal row
    span (works at any rank); None when the spans differ."""
    a._same_field(b)
    if a.k != b.k or a.n != b.n:
        raise DimMismatch(f"{a.k}x{a.n} vs {b.k}x{b.n}")
    ra, rank_a, _, ua = a.rref_with_transform()
    rb, rank_b, _, ub = b.rref_with_transform()
    if rank_a != rank_b or ra != rb:
        return None
    return ub.inv().mul(ua)


# ---------------------------------------------------------------------------
# column statistics


def column_multiplicity_profile(a: Mat) -> tuple[int, ...]:
    """Sorted multiset of occurrence counts of the distinct column values."""
    counts: dict[tuple, int] = {}
    for col in a.cols():
        counts[col] = counts.get(col, 0) + 1
    return tuple(sorted(counts.values()))


def max_column_multiplicity(a: Mat) -> int:
    prof = column_multiplicity_profile(a)
    return prof[-1] if prof else 0


def strip_zero_columns(a: Mat) -> tuple[Mat, tuple[int, ...]]:
    """Drop every all-zero column, preserving order; report dropped indices."""
    removed = []
    kept = []
    for j in range(a.n):
        if any(r[j] for r in a.rows):
            kept.append(j)
        else:
            removed.append(j)
    rows = [[r[j] for j in kept] for r in a.rows]
    return Mat(a.field, rows, len(kept)), tuple(removed)


# ---------------------------------------------------------------------------
# permutation and monomial actions


@dataclass(frozen=True)
class Perm:
    """Column permutation in the (A*P)[i] = A[sigma(i)] convention."""

    sigma: tuple[int, ...]

    def __post_init__(self):
        n = len(self.sigma)
        if sorted(self.sigma) != list(range(n)):
            raise DimMismatch(f"not a bijection on [0,{n})")

    @property
    def n(self) -> int:
        return len(self.sigma)

    @classmethod
    def identity(cls, n: int) -> "Perm":
        return cls(tuple(range(n)))

    def is_identity(self) -> bool:
        return all(s == i for i, s in enumerate(self.sigma))

    def inverse(self) -> "Perm":
        inv = [0] * self.n
        for i, s in enumerate(self.sigma):
            inv[s] = i
        return Perm(tuple(inv))

    def to_mat(self, fld: Field) -> Mat:
        n = self.n
        rows = [[0] * n for _ in range(n)]
        for c, s in enumerate(self.sigma):
            rows[s][c] = 1
        return Mat(fld, rows, n)


@dataclass(frozen=True)
class Mono:
    """Monomial action M = D * P; diag holds D's diagonal (source-indexed)."""

    field: Field
    perm: Perm
    diag: tuple[int, ...]

    def __post_init__(self):
        if len(self.diag) != self.perm.n:
            raise DimMismatch("diagonal length differs from permutation size")
        q = self.field.q
        for d in self.diag:
            if not (1 <= d < q):
                raise ValueError(f"diagonal entry {d} must be a non-zero element")

    @property
    def n(self) -> int:
        return self.perm.n

    @classmethod
    def identity(cls, fld: Field, n: int) -> "Mono":
        return cls(fld, Perm.identity(n), (1,) * n)

    @classmethod
    def from_perm(cls, fld: Field, perm: Perm) -> "Mono":
        return cls(fld, perm, (1,) * perm.n)

    def is_permutation(self) -> bool:
        return all(d == 1 for d in self.diag)

    def is_signed(self) -> bool:
        return all(self.field.is_sign(d) for d in self.diag)

    def to_mat(self) -> Mat:
        n = self.n
        rows = [[0] * n for _ in range(n)]
        for c, s in enumerate(self.perm.sigma):
            rows[s][c] = self.diag[s]
        return Mat(self.field, rows, n)
