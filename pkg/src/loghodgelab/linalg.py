"""Exact rational and integer linear algebra.

Everything downstream (cohomology, spectral sequences, weight filtrations)
reduces to ranks, kernels, linear solves and Smith normal forms of small
matrices over Q and Z.  All arithmetic is exact: `fractions.Fraction` for
rationals, arbitrary-precision `int` for integers.  Elimination is
fraction-free (Bareiss) so intermediate entries grow polynomially, and the
pivot order is deterministic (lowest row, then column index) so every
downstream report is reproducible bit for bit.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Optional, Sequence

Rational = Fraction


def _as_rational(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"expected int or Fraction, got {type(x).__name__}")


class MatrixError(ValueError):
    pass


class RationalMatrix:
    """Sparse matrix over Q.  Stored entries are nonzero; immutable by convention."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries: dict[tuple[int, int], Fraction]):
        if rows < 0 or cols < 0:
            raise MatrixError("negative matrix dimensions")
        clean: dict[tuple[int, int], Fraction] = {}
        for (i, j), v in entries.items():
            if not (0 <= i < rows and 0 <= j < cols):
                raise MatrixError(f"entry index ({i}, {j}) out of bounds for {rows}x{cols}")
            v = _as_rational(v)
            if v != 0:
                clean[(i, j)] = v
        self.rows = rows
        self.cols = cols
        self.entries = clean

    @classmethod
    def from_rows(cls, data: Sequence[Sequence]) -> "RationalMatrix":
        rows = len(data)
        cols = len(data[0]) if rows else 0
        entries = {}
        for i, row in enumerate(data):
            if len(row) != cols:
                raise MatrixError("ragged rows")
            for j, v in enumerate(row):
                entries[(i, j)] = _as_rational(v)
        return cls(rows, cols, entries)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], rows: int) -> "RationalMatrix":
        entries = {}
        for j, col in enumerate(columns):
            if len(col) != rows:
                raise MatrixError("column length mismatch")
            for i, v in enumerate(col):
                entries[(i, j)] = _as_rational(v)
        return cls(rows, len(columns), entries)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "RationalMatrix":
        return cls(rows, cols, {})

    @classmethod
    def identity(cls, n: int) -> "RationalMatrix":
        return cls(n, n, {(i, i): Fraction(1) for i in range(n)})

    def at(self, i: int, j: int) -> Fraction:
        return self.entries.get((i, j), Fraction(0))

    def to_dense(self) -> list[list[Fraction]]:
        dense = [[Fraction(0)] * self.cols for _ in range(self.rows)]
        for (i, j), v in self.entries.items():
            dense[i][j] = v
        return dense

    def row(self, i: int) -> tuple[Fraction, ...]:
        return tuple(self.at(i, j) for j in range(self.cols))

    def column(self, j: int) -> tuple[Fraction, ...]:
        return tuple(self.at(i, j) for i in range(self.rows))

    def columns(self) -> list[tuple[Fraction, ...]]:
        return [self.column(j) for j in range(self.cols)]

    def transpose(self) -> "RationalMatrix":
        return RationalMatrix(self.cols, self.rows,
                              {(j, i): v for (i, j), v in self.entries.items()})

    def is_zero(self) -> bool:
        return not self.entries

    def __eq__(self, other) -> bool:
        return (isinstance(other, RationalMatrix) and self.rows == other.rows
                and self.cols == other.cols and self.entries == other.entries)

    def __hash__(self):
        return hash((self.rows, self.cols, frozenset(self.entries.items())))

    def __repr__(self) -> str:
        return f"RationalMatrix({self.rows}x{self.cols}, {len(self.entries)} nonzero)"

    def __add__(self, other: "RationalMatrix") -> "RationalMatrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise MatrixError("shape mismatch in addition")
        entries = dict(self.entries)
        for key, v in other.entries.items():
            entries[key] = entries.get(key, Fraction(0)) + v
        return RationalMatrix(self.rows, self.cols, entries)

    def __neg__(self) -> "RationalMatrix":
        return RationalMatrix(self.rows, self.cols,
                              {key: -v for key, v in self.entries.items()})

    def __sub__(self, other: "RationalMatrix") -> "RationalMatrix":
        return self + (-other)

    def scale(self, c) -> "RationalMatrix":
        c = _as_rational(c)
        if c == 0:
            return RationalMatrix.zeros(self.rows, self.cols)
        return RationalMatrix(self.rows, self.cols,
                              {key: c * v for key, v in self.entries.items()})

    def __mul__(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.cols != other.rows:
            raise MatrixError("shape mismatch in multiplication")
        # sparse row x sparse column accumulation
        by_row: dict[int, list[tuple[int, Fraction]]] = {}
        for (i, k), v in self.entries.items():
            by_row.setdefault(i, []).append((k, v))
        by_col: dict[int, dict[int, Fraction]] = {}
        for (k, j), v in other.entries.items():
            by_col.setdefault(k, {})[j] = v
        entries: dict[tuple[int, int], Fraction] = {}
        for i, terms in by_row.items():
            acc: dict[int, Fraction] = {}
            for k, v in terms:
                row_k = by_col.get(k)
                if not row_k:
                    continue
                for j, w in row_k.items():
                    acc[j] = acc.get(j, Fraction(0)) + v * w
            for j, total in acc.items():
                if total != 0:
                    entries[(i, j)] = total
        return RationalMatrix(self.rows, other.cols, entries)

    def apply(self, vector: Sequence) -> tuple[Fraction, ...]:
        if len(vector) != self.cols:
            raise MatrixError("vector length mismatch")
        vec = [_as_rational(v) for v in vector]
        out = [Fraction(0)] * self.rows
        for (i, j), v in self.entries.items():
            if vec[j] != 0:
                out[i] += v * vec[j]
        return tuple(out)

    def hstack(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.rows != other.rows:
            raise MatrixError("row count mismatch in hstack")
        entries = dict(self.entries)
        for (i, j), v in other.entries.items():
            entries[(i, j + self.cols)] = v
        return RationalMatrix(self.rows, self.cols + other.cols, entries)

    def submatrix_columns(self, col_indices: Sequence[int]) -> "RationalMatrix":
        pos = {j: p for p, j in enumerate(col_indices)}
        entries = {}
        for (i, j), v in self.entries.items():
            if j in pos:
                entries[(i, pos[j])] = v
        return RationalMatrix(self.rows, len(col_indices), entries)


class IntegerMatrix:
    """Sparse matrix over Z with arbitrary-precision entries."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries: dict[tuple[int, int], int]):
        if rows < 0 or cols < 0:
            raise MatrixError("negative matrix dimensions")
        clean: dict[tuple[int, int], int] = {}
        for (i, j), v in entries.items():
            if not (0 <= i < rows and 0 <= j < cols):
                raise MatrixError(f"entry index ({i}, {j}) out of bounds for {rows}x{cols}")
            if not isinstance(v, int):
                raise TypeError("IntegerMatrix entries must be int")
            if v != 0:
                clean[(i, j)] = v
        self.rows = rows
        self.cols = cols
        self.entries = clean

    @classmethod
    def from_rows(cls, data: Sequence[Sequence[int]]) -> "IntegerMatrix":
        rows = len(data)
        cols = len(data[0]) if rows else 0
        entries = {}
        for i, row in enumerate(data):
            if len(row) != cols:
                raise MatrixError("ragged rows")
            for j, v in enumerate(row):
                entries[(i, j)] = int(v)
        return cls(rows, cols, entries)

    @classmethod
    def identity(cls, n: int) -> "IntegerMatrix":
        return cls(n, n, {(i, i): 1 for i in range(n)})

    def at(self, i: int, j: int) -> int:
        return self.entries.get((i, j), 0)

    def to_dense(self) -> list[list[int]]:
        dense = [[0] * self.cols for _ in range(self.rows)]
        for (i, j), v in self.entries.items():
            dense[i][j] = v
        return dense

    def to_rational(self) -> RationalMatrix:
        return RationalMatrix(self.rows, self.cols,
                              {key: Fraction(v) for key, v in self.entries.items()})

    def transpose(self) -> "IntegerMatrix":
        return IntegerMatrix(self.cols, self.rows,
                             {(j, i): v for (i, j), v in self.entries.items()})

    def __mul__(self, other: "IntegerMatrix") -> "IntegerMatrix":
        if self.cols != other.rows:
            raise MatrixError("shape mismatch in multiplication")
        a, b = self.to_dense(), other.to_dense()
        entries = {}
        for i in range(self.rows):
            for j in range(other.cols):
                s = sum(a[i][k] * b[k][j] for k in range(self.cols))
                if s:
                    entries[(i, j)] = s
        return IntegerMatrix(self.rows, other.cols, entries)

    def __eq__(self, other) -> bool:
        return (isinstance(other, IntegerMatrix) and self.rows == other.rows
                and self.cols == other.cols and self.entries == other.entries)

    def __hash__(self):
        return hash((self.rows, self.cols, frozenset(self.entries.items())))

    def __repr__(self) -> str:
        return f"IntegerMatrix({self.rows}x{self.cols}, {len(self.entries)} nonzero)"

    def diagonal(self) -> list[int]:
        return [self.at(i, i) for i in range(min(self.rows, self.cols))]


# ---------------------------------------------------------------------------
# fraction-free elimination
# ---------------------------------------------------------------------------


def _integer_rows(m: RationalMatrix) -> list[list[int]]:
    # Row scaling by the lcm of denominators preserves rank, kernel, and the
    # column independence pattern.
    dense = m.to_dense()
    out = []
    for row in dense:
        lcm = 1
        for v in row:
            d = v.denominator
            lcm = lcm // gcd(lcm, d) * d
        out.append([int(v * lcm) for v in row])
    return out


def _bareiss_echelon(rows: list[list[int]]) -> tuple[list[list[int]], list[int]]:
    """Fraction-free row echelon form.  Returns (matrix, pivot column list).

    Pivot choice is deterministic: columns scanned left to right, the first
    not-yet-used row with a nonzero entry is the pivot (lowest row, then
    column index).
    """
    m = [row[:] for row in rows]
    nr = len(m)
    nc = len(m[0]) if nr else 0
    pivots: list[int] = []
    done = 0
    prev = 1
    for col in range(nc):
        pivot_row = None
        for i in range(done, nr):
            if m[i][col] != 0:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        m[done], m[pivot_row] = m[pivot_row], m[done]
        p = m[done][col]
        for i in range(done + 1, nr):
            t = m[i][col]
            mi, mp = m[i], m[done]
            for j in range(col, nc):
                mi[j] = (p * mi[j] - t * mp[j]) // prev  # exact by Bareiss
        prev = p
        pivots.append(col)
        done += 1
        if done == nr:
            break
    return m[:done], pivots


def rank(m: RationalMatrix) -> int:
    """Dimension of the row space of ``m`` over Q."""
    _, pivots = _bareiss_echelon(_integer_rows(m))
    return len(pivots)


def kernel_basis(m: RationalMatrix) -> list[tuple[Fraction, ...]]:
    """Deterministic basis of ker(m); one vector per free column, ascending."""
    ech, pivots = _bareiss_echelon(_integer_rows(m))
    nc = m.cols
    pivot_set = set(pivots)
    free_cols = [j for j in range(nc) if j not in pivot_set]
    basis = []
    for f in free_cols:
        v = [Fraction(0)] * nc
        v[f] = Fraction(1)
        # back-substitute pivot variables, bottom row first
        for k in range(len(pivots) - 1, -1, -1):
            pc = pivots[k]
            row = ech[k]
            s = Fraction(0)
            for j in range(pc + 1, nc):
                if row[j] != 0 and v[j] != 0:
                    s += Fraction(row[j]) * v[j]
            v[pc] = -s / row[pc]
        basis.append(tuple(v))
    return basis


def solve_rational(m: RationalMatrix, b: Sequence) -> Optional[tuple[Fraction, ...]]:
    """A solution x of m x = b, or None if inconsistent.

    Free variables are set to zero, so the support of the returned solution
    is contained in the deterministic pivot columns (minimal-support choice).
    """
    if len(b) != m.rows:
        raise MatrixError("right-hand side length mismatch")
    b = [_as_rational(v) for v in b]
    aug = RationalMatrix(m.rows, m.cols + 1,
                         {**m.entries, **{(i, m.cols): v for i, v in enumerate(b) if v != 0}})
    ech, pivots = _bareiss_echelon(_integer_rows(aug))
    if pivots and pivots[-1] == m.cols:
        return None  # a pivot in the augmented column: inconsistent
    nc = m.cols
    x = [Fraction(0)] * nc
    for k in range(len(pivots) - 1, -1, -1):
        pc = pivots[k]
        row = ech[k]
        s = Fraction(row[nc])
        for j in range(pc + 1, nc):
            if row[j] != 0 and x[j] != 0:
                s -= Fraction(row[j]) * x[j]
        x[pc] = s / row[pc]
    return tuple(x)


# ---------------------------------------------------------------------------
# Smith normal form
# ---------------------------------------------------------------------------


def smith_normal_form(m: IntegerMatrix) -> tuple[IntegerMatrix, IntegerMatrix, IntegerMatrix]:
    """Return (U, D, V) with U*m*V = D, D diagonal with d1 | d2 | ...

    U and V are products of row/column swaps, transvections and sign flips,
    so det(U), det(V) are +-1.  Pivoting is on the minimal absolute value
    (ties broken by lowest row, then column) which keeps entries small.

    >>> u, d, v = smith_normal_form(IntegerMatrix.from_rows([[2, 4], [6, 8]]))
    >>> d.diagonal()
    [2, 4]
    >>> u * IntegerMatrix.from_rows([[2, 4], [6, 8]]) * v == d
    True
    """
    nr, nc = m.rows, m.cols
    d = m.to_dense()
    u = IntegerMatrix.identity(nr).to_dense()
    v = IntegerMatrix.identity(nc).to_dense()

    def row_op(i, k, q):  # row_i -= q * row_k
        d[i] = [a - q * b for a, b in zip(d[i], d[k])]
        u[i] = [a - q * b for a, b in zip(u[i], u[k])]

    def col_op(j, k, q):  # col_j -= q * col_k
        for row in d:
            row[j] -= q * row[k]
        for row in v:
            row[j] -= q * row[k]

    def swap_rows(i, k):
        d[i], d[k] = d[k], d[i]
        u[i], u[k] = u[k], u[i]

    def swap_cols(j, k):
        for row in d:
            row[j], row[k] = row[k], row[j]
        for row in v:
            row[j], row[k] = row[k], row[j]

    t = 0
    while t < min(nr, nc):
        # minimal nonzero absolute value in the trailing block
        best = None
        for i in range(t, nr):
            for j in range(t, nc):
                val = d[i][j]
                if val != 0 and (best is None or abs(val) < abs(d[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        while True:
            # clear column t
            restart = False
            for i in range(t + 1, nr):
                if d[i][t] != 0:
                    q = d[i][t] // d[t][t]
                    row_op(i, t, q)
                    if d[i][t] != 0:  # smaller remainder becomes the pivot
                        swap_rows(t, i)
                        restart = True
                        break
            if restart:
                continue
            for j in range(t + 1, nc):
                if d[t][j] != 0:
                    q = d[t][j] // d[t][t]
                    col_op(j, t, q)
                    if d[t][j] != 0:
                        swap_cols(t, j)
                        restart = True
                        break
            if restart:
                continue
            # divisibility chain: fold a non-multiple into the pivot row
            offender = None
            for i in range(t + 1, nr):
                for j in range(t + 1, nc):
                    if d[i][j] % d[t][t] != 0:
                        offender = i
                        break
                if offender is not None:
                    break
            if offender is None:
                break
            row_op(t, offender, -1)  # row_t += row_offender
        if d[t][t] < 0:
            d[t] = [-a for a in d[t]]
            u[t] = [-a for a in u[t]]
        t += 1

    return (IntegerMatrix.from_rows(u), IntegerMatrix.from_rows(d), IntegerMatrix.from_rows(v))


# ---------------------------------------------------------------------------
# column-space utilities (subspaces of Q^n given by basis matrices)
# ---------------------------------------------------------------------------


def pivot_columns(m: RationalMatrix) -> list[int]:
    """Column indices whose original columns form a basis of the column space."""
    _, pivots = _bareiss_echelon(_integer_rows(m))
    return pivots


def column_space_basis(m: RationalMatrix) -> RationalMatrix:
    """Deterministic basis of col(m): the pivot columns of ``m`` itself."""
    return m.submatrix_columns(pivot_columns(m))


def sum_spaces(a: RationalMatrix, b: RationalMatrix) -> RationalMatrix:
    if a.rows != b.rows:
        raise MatrixError("ambient dimension mismatch")
    return column_space_basis(a.hstack(b))


def intersect_spaces(a: RationalMatrix, b: RationalMatrix) -> RationalMatrix:
    """Basis of col(a) ∩ col(b)."""
    if a.rows != b.rows:
        raise MatrixError("ambient dimension mismatch")
    if a.cols == 0 or b.cols == 0:
        return RationalMatrix.zeros(a.rows, 0)
    combined = a.hstack(-b)
    vectors = []
    for ker in kernel_basis(combined):
        x = ker[:a.cols]
        vectors.append(a.apply(x))
    return column_space_basis(RationalMatrix.from_columns(vectors, a.rows))


def preimage_space(f: RationalMatrix, w: RationalMatrix) -> RationalMatrix:
    """Basis of {x : f x in col(w)} inside the domain of f."""
    if f.rows != w.rows:
        raise MatrixError("ambient dimension mismatch")
    combined = f.hstack(-w)
    vectors = [ker[:f.cols] for ker in kernel_basis(combined)]
    return column_space_basis(RationalMatrix.from_columns(vectors, f.cols))


def contains_space(a: RationalMatrix, b: RationalMatrix) -> bool:
    """True iff col(b) ⊆ col(a)."""
    if b.cols == 0:
        return True
    return rank(a.hstack(b)) == rank(a)

def spaces_equal(a: RationalMatrix, b: RationalMatrix) -> bool:
    ra, rb = rank(a), rank(b)
    return ra == rb and rank(a.hstack(b)) == ra


def extend_basis(sub: RationalMatrix, ambient: RationalMatrix) -> list[int]:
    """Greedy column indices of ``ambient`` extending col(sub) to col(sub)+col(ambient).

    The scan order over ambient columns is ascending, so the choice is
    deterministic.
    """
    current = sub
    current_rank = rank(sub)
    chosen = []
    for j in range(ambient.cols):
        candidate = current.hstack(ambient.submatrix_columns([j]))
        r = rank(candidate)
        if r > current_rank:
            chosen.append(j)
            current = candidate
            current_rank = r
    return chosen
