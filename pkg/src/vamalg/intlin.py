"""Exact integer linear algebra.

Everything here works on Python ints, so entries never overflow.  Matrices
are immutable :class:`IntMatrix` values; vectors are plain tuples of ints.

Conventions:

* :func:`hnf` is the canonical *row* Hermite normal form: positive pivots,
  entries above each pivot reduced into ``[0, pivot)``, zero rows last.
* :func:`snf` returns ``A = U @ D @ V`` together with ``S = U^-1`` and
  ``T = V^-1`` so that ``D = S @ A @ T``.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd

from .errors import ZeroVector


@dataclass(frozen=True)
class IntMatrix:
    rows: int
    cols: int
    entries: tuple

    def __post_init__(self):
        if len(self.entries) != self.rows * self.cols:
            raise ValueError(f"{self.rows}x{self.cols} matrix needs {self.rows * self.cols} entries")

    @classmethod
    def from_rows(cls, rows, cols=None):
        rows = [tuple(int(x) for x in r) for r in rows]
        if cols is None:
            if not rows:
                raise ValueError("cols must be given for a matrix with no rows")
            cols = len(rows[0])
        for r in rows:
            if len(r) != cols:
                raise ValueError("ragged rows")
        return cls(len(rows), cols, tuple(x for r in rows for x in r))

    @classmethod
    def from_columns(cls, columns, rows):
        columns = [tuple(c) for c in columns]
        return cls.from_rows([[c[i] for c in columns] for i in range(rows)], len(columns))

    @classmethod
    def identity(cls, n):
        return cls(n, n, tuple(int(i == j) for i in range(n) for j in range(n)))

    @classmethod
    def zeros(cls, rows, cols):
        return cls(rows, cols, (0,) * (rows * cols))

    @classmethod
    def scalar(cls, n, s):
        return cls(n, n, tuple(s * int(i == j) for i in range(n) for j in range(n)))

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i):
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def col(self, j):
        return self.entries[j::self.cols] if self.cols else ()

    def tolist(self):
        return [list(self.row(i)) for i in range(self.rows)]

    @property
    def T(self):
        return IntMatrix.from_rows([self.col(j) for j in range(self.cols)], self.rows)

    def __matmul__(self, other):
        if isinstance(other, IntMatrix):
            if self.cols != other.rows:
                raise ValueError(f"shape mismatch {self.rows}x{self.cols} @ {other.rows}x{other.cols}")
            ocols = [other.col(j) for j in range(other.cols)]
            return IntMatrix.from_rows(
                [[_dot(self.row(i), c) for c in ocols] for i in range(self.rows)], other.cols)
        v = tuple(other)
        if len(v) != self.cols:
            raise ValueError(f"cannot apply {self.rows}x{self.cols} matrix to vector of length {len(v)}")
        return tuple(_dot(self.row(i), v) for i in range(self.rows))

    def __add__(self, other):
        self._same_shape(other)
        return IntMatrix(self.rows, self.cols, tuple(a + b for a, b in zip(self.entries, other.entries)))

    def __sub__(self, other):
        self._same_shape(other)
        return IntMatrix(self.rows, self.cols, tuple(a - b for a, b in zip(self.entries, other.entries)))

    def __neg__(self):
        return IntMatrix(self.rows, self.cols, tuple(-a for a in self.entries))

    def scale(self, s):
        return IntMatrix(self.rows, self.cols, tuple(s * a for a in self.entries))

    def _same_shape(self, other):
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch")

    def is_zero(self):
        return not any(self.entries)

    def det(self):
        if self.rows != self.cols:
            raise ValueError("determinant of a non-square matrix")
        return bareiss_det(self.tolist())

    def is_unimodular(self):
        return self.rows == self.cols and self.det() in (1, -1)

    def __repr__(self):
        return f"IntMatrix({self.tolist()})"


def _dot(a, b):
    return sum(x * y for x, y in zip(a, b))


def vadd(a, b):
    return tuple(x + y for x, y in zip(a, b))


def vsub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def vneg(a):
    return tuple(-x for x in a)


def vscale(s, a):
    return tuple(s * x for x in a)


def bareiss_det(m):
    """Fraction-free determinant of a square list-of-lists matrix."""
    n = len(m)
    if n == 0:
        return 1
    a = [list(r) for r in m]
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def _as_matrix(m):
    return m if isinstance(m, IntMatrix) else IntMatrix.from_rows(m)


def hnf(m):
    """Row Hermite normal form: returns ``(h, u)`` with ``h == u @ m``, ``u`` unimodular."""
    m = _as_matrix(m)
    r, c = m.rows, m.cols
    a = m.tolist()
    u = IntMatrix.identity(r).tolist()

    def addrow(i, j, k):
        # row_i += k * row_j
        a[i] = [x + k * y for x, y in zip(a[i], a[j])]
        u[i] = [x + k * y for x, y in zip(u[i], u[j])]

    def swap(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    p = 0
    for col in range(c):
        if p == r:
            break
        while True:
            nz = [i for i in range(p, r) if a[i][col] != 0]
            if not nz:
                break
            best = min(nz, key=lambda i: (abs(a[i][col]), i))
            if best != p:
                swap(p, best)
            clean = True
            for i in range(p + 1, r):
                if a[i][col]:
                    addrow(i, p, -(a[i][col] // a[p][col]))
                    if a[i][col]:
                        clean = False
            if clean:
                break
        if a[p][col] == 0:
            continue
        if a[p][col] < 0:
            a[p] = [-x for x in a[p]]
            u[p] = [-x for x in u[p]]
        for i in range(p):
            q = a[i][col] // a[p][col]
            if q:
                addrow(i, p, -q)
        p += 1
    return IntMatrix.from_rows(a, c), IntMatrix.from_rows(u, r)


def rank(m):
    """Rank over the rationals."""
    h, _ = hnf(m)
    return sum(1 for i in range(h.rows) if any(h.row(i)))


@dataclass(frozen=True)
class SnfDecomposition:
    U: IntMatrix
    D: IntMatrix
    V: IntMatrix
    S: IntMatrix  # U^-1
    T: IntMatrix  # V^-1

    @property
    def diagonal(self):
        return tuple(self.D[i, i] for i in range(min(self.D.rows, self.D.cols)))

    @property
    def rank(self):
        return sum(1 for d in self.diagonal if d)


def snf(m):
    """Smith normal form by elementary operations with minimal-pivot selection."""
    m = _as_matrix(m)
    r, c = m.rows, m.cols
    a = m.tolist()
    S = IntMatrix.identity(r).tolist()
    U = IntMatrix.identity(r).tolist()
    T = IntMatrix.identity(c).tolist()
    V = IntMatrix.identity(c).tolist()

    def row_add(i, j, k):
        # row_i += k row_j ; U <- U E^-1 : col_j -= k col_i
        a[i] = [x + k * y for x, y in zip(a[i], a[j])]
        S[i] = [x + k * y for x, y in zip(S[i], S[j])]
        for row in U:
            row[j] -= k * row[i]

    def row_swap(i, j):
        a[i], a[j] = a[j], a[i]
        S[i], S[j] = S[j], S[i]
        for row in U:
            row[i], row[j] = row[j], row[i]

    def row_neg(i):
        a[i] = [-x for x in a[i]]
        S[i] = [-x for x in S[i]]
        for row in U:
            row[i] = -row[i]

    def col_add(i, j, k):
        # col_i += k col_j ; V <- F^-1 V : row_j -= k row_i
        for row in a:
            row[i] += k * row[j]
        for row in T:
            row[i] += k * row[j]
        V[j] = [x - k * y for x, y in zip(V[j], V[i])]

    def col_swap(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in T:
            row[i], row[j] = row[j], row[i]
        V[i], V[j] = V[j], V[i]

    for t in range(min(r, c)):
        entries = [(abs(a[i][j]), i, j) for i in range(t, r) for j in range(t, c) if a[i][j]]
        if not entries:
            break
        _, i0, j0 = min(entries)
        if i0 != t:
            row_swap(t, i0)
        if j0 != t:
            col_swap(t, j0)
        while True:
            moved = False
            for i in range(t + 1, r):
                if a[i][t]:
                    row_add(i, t, -(a[i][t] // a[t][t]))
            for j in range(t + 1, c):
                if a[t][j]:
                    col_add(j, t, -(a[t][j] // a[t][t]))
            rest = [(abs(a[i][t]), i, t) for i in range(t + 1, r) if a[i][t]]
            rest += [(abs(a[t][j]), t, j) for j in range(t + 1, c) if a[t][j]]
            if rest:
                _, i1, j1 = min(rest)
                if j1 == t:
                    row_swap(t, i1)
                else:
                    col_swap(t, j1)
                continue
            p = a[t][t]
            bad = next(((i, j) for i in range(t + 1, r) for j in range(t + 1, c) if a[i][j] % p), None)
            if bad is not None:
                row_add(t, bad[0], 1)
                moved = True
            if not moved:
                break
        if a[t][t] < 0:
            row_neg(t)
    return SnfDecomposition(
        U=IntMatrix.from_rows(U, r), D=IntMatrix.from_rows(a, c), V=IntMatrix.from_rows(V, c),
        S=IntMatrix.from_rows(S, r), T=IntMatrix.from_rows(T, c))


def solve_integer(a, b):
    """Some integer ``x`` with ``a @ x == b``, or ``None`` if there is none."""
    a = _as_matrix(a)
    b = tuple(b)
    if len(b) != a.rows:
        raise ValueError(f"right-hand side has length {len(b)}, expected {a.rows}")
    dec = snf(a)
    rhs = dec.S @ b
    y = [0] * a.cols
    diag = dec.diagonal
    for i, bi in enumerate(rhs):
        d = diag[i] if i < len(diag) else 0
        if d == 0:
            if bi != 0:
                return None
        else:
            if bi % d:
                return None
            y[i] = bi // d
    x = dec.T @ y
    assert a @ x == b
    return x


def left_kernel(m):
    """Basis (rows) of ``{z : z @ m == 0}`` as an IntMatrix."""
    m = _as_matrix(m)
    h, u = hnf(m)
    rows = [u.row(i) for i in range(h.rows) if not any(h.row(i))]
    return IntMatrix.from_rows(rows, m.rows)


def right_kernel(m):
    """Basis (rows) of ``{x : m @ x == 0}``."""
    return left_kernel(_as_matrix(m).T)


def content_and_primitive(v):
    v = tuple(v)
    g = reduce(gcd, v, 0)
    if g == 0:
        raise ZeroVector("content of the zero vector")
    return g, tuple(x // g for x in v)


@dataclass(frozen=True)
class Lattice:
    """A sublattice of ``Z^ambient_rank``; ``basis`` rows are in canonical HNF."""

    ambient_rank: int
    basis: IntMatrix

    @classmethod
    def span(cls, vectors, ambient_rank):
        vectors = [tuple(v) for v in vectors]
        if not vectors:
            return cls(ambient_rank, IntMatrix.zeros(0, ambient_rank))
        h, _ = hnf(IntMatrix.from_rows(vectors, ambient_rank))
        rows = [h.row(i) for i in range(h.rows) if any(h.row(i))]
        return cls(ambient_rank, IntMatrix.from_rows(rows, ambient_rank))

    @classmethod
    def full(cls, n):
        return cls(n, IntMatrix.identity(n))

    @property
    def rank(self):
        return self.basis.rows

    def vectors(self):
        return [self.basis.row(i) for i in range(self.basis.rows)]

    def __contains__(self, v):
        return lattice_membership(self, v) is not None


def lattice_membership(lat, v):
    """Coefficients ``c`` with ``c @ basis == v``, or ``None``."""
    v = tuple(v)
    if len(v) != lat.ambient_rank:
        raise ValueError("dimension mismatch")
    if lat.rank == 0:
        return () if not any(v) else None
    return solve_integer(lat.basis.T, v)


def lattice_intersection(l1, l2):
    if l1.ambient_rank != l2.ambient_rank:
        raise ValueError("ambient ranks differ")
    n = l1.ambient_rank
    if l1.rank == 0 or l2.rank == 0:
        return Lattice(n, IntMatrix.zeros(0, n))
    stacked = IntMatrix.from_rows(l1.vectors() + l2.vectors(), n)
    kern = left_kernel(stacked)
    b1 = l1.basis
    vecs = [b1.T @ kern.row(i)[:l1.rank] for i in range(kern.rows)]
    return Lattice.span(vecs, n)


@dataclass(frozen=True)
class AbelianQuotient:
    """``Z^ngens / <relations>`` in Smith coordinates.

    ``class_of(x)`` maps a generator-exponent vector to its class, split into
    a free part and a torsion part (residues modulo ``torsion``).
    """

    ngens: int
    moduli: tuple
    transform: IntMatrix

    @property
    def free_rank(self):
        return sum(1 for d in self.moduli if d == 0)

    @property
    def torsion(self):
        return tuple(d for d in self.moduli if d > 1)

    def class_of(self, x):
        y = self.transform.T @ tuple(x)
        free = tuple(yi for yi, d in zip(y, self.moduli) if d == 0)
        tors = tuple(yi % d for yi, d in zip(y, self.moduli) if d > 1)
        return free, tors

    def is_infinite_order(self, x):
        return any(self.class_of(x)[0])


def abelian_quotient(relations, ngens):
    rel = IntMatrix.from_rows(relations, ngens) if not isinstance(relations, IntMatrix) else relations
    dec = snf(rel)
    diag = dec.diagonal
    moduli = tuple(abs(diag[i]) if i < len(diag) else 0 for i in range(ngens))
    return AbelianQuotient(ngens, moduli, dec.T)


def rational_solve(a, b):
    """Some rational solution of ``a @ x == b`` (Fractions), or ``None``."""
    a = _as_matrix(a)
    rows = [[Fraction(x) for x in a.row(i)] + [Fraction(bi)] for i, bi in enumerate(b)]
    n = a.cols
    piv = []
    r = 0
    for col in range(n):
        p = next((i for i in range(r, len(rows)) if rows[i][col] != 0), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        pv = rows[r][col]
        rows[r] = [x / pv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][col] != 0:
                f = rows[i][col]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        piv.append(col)
        r += 1
    if any(row[-1] != 0 for row in rows[r:]):
        return None
    x = [Fraction(0)] * n
    for i, col in enumerate(piv):
        x[col] = rows[i][-1]
    return tuple(x)
