"""Permutations of ``{0, ..., m-1}`` and finite groups given by full tables.

Points are 0-based throughout; :meth:`Permutation.from_cycles` and ``str``
use the usual 1-based cycle notation so that ``(1 2)`` swaps points 0 and 1.

The product ``a * b`` is composition ``a ∘ b``, i.e. ``(a * b)(x) == a(b(x))``.
"""

from dataclasses import dataclass, field

from .errors import CapExceeded, DegreeMismatch

DEFAULT_CAP = 20000


@dataclass(frozen=True)
class Permutation:
    images: tuple

    def __post_init__(self):
        if sorted(self.images) != list(range(len(self.images))):
            raise ValueError(f"not a permutation: {self.images}")

    @classmethod
    def identity(cls, m):
        return cls(tuple(range(m)))

    @classmethod
    def from_cycles(cls, m, cycles):
        """Build from 1-based cycles, e.g. ``from_cycles(4, [(1, 2), (3, 4)])``."""
        img = list(range(m))
        for cyc in cycles:
            for a, b in zip(cyc, cyc[1:] + cyc[:1]):
                img[a - 1] = b - 1
        return cls(tuple(img))

    @property
    def degree(self):
        return len(self.images)

    def __call__(self, x):
        return self.images[x]

    def __mul__(self, other):
        return compose(self, other)

    def inverse(self):
        inv = [0] * len(self.images)
        for x, y in enumerate(self.images):
            inv[y] = x
        return Permutation(tuple(inv))

    def is_identity(self):
        return all(x == y for x, y in enumerate(self.images))

    def fixed_points(self):
        return [x for x, y in enumerate(self.images) if x == y]

    def cycles(self):
        seen, out = set(), []
        for x in range(self.degree):
            if x in seen or self.images[x] == x:
                continue
            cyc, y = [], x
            while y not in seen:
                seen.add(y)
                cyc.append(y)
                y = self.images[y]
            out.append(tuple(cyc))
        return out

    def act(self, f):
        """Permute a function on points: ``(σ·f)(x) = f(σ^-1(x))``."""
        f = tuple(f)
        out = [0] * len(f)
        for x, y in enumerate(self.images):
            out[y] = f[x]
        return tuple(out)

    def __str__(self):
        cyc = self.cycles()
        if not cyc:
            return "()"
        return "".join("(" + " ".join(str(x + 1) for x in c) + ")" for c in cyc)


def compose(a, b):
    if a.degree != b.degree:
        raise DegreeMismatch(f"degrees {a.degree} and {b.degree}")
    return Permutation(tuple(a.images[y] for y in b.images))


@dataclass(frozen=True)
class FiniteGroupTable:
    """A finite group on indices ``0..order-1`` given by its multiplication table."""

    order: int
    table: tuple
    identity: int
    inverse: tuple
    generators: tuple = ()
    labels: tuple = field(default=None, compare=False)

    def mul(self, a, b):
        return self.table[a][b]

    def inv(self, a):
        return self.inverse[a]

    def power(self, a, k):
        if k < 0:
            a, k = self.inverse[a], -k
        r = self.identity
        for _ in range(k):
            r = self.table[r][a]
        return r

    def element_order(self, a):
        k, x = 1, a
        while x != self.identity:
            x = self.table[x][a]
            k += 1
        return k

    def elements(self):
        return range(self.order)

    @classmethod
    def from_table(cls, table, identity=None, generators=None, labels=None):
        table = tuple(tuple(int(x) for x in row) for row in table)
        n = len(table)
        if identity is None:
            identity = next(e for e in range(n) if all(table[e][x] == x for x in range(n)))
        inverse = []
        for a in range(n):
            inv = [b for b in range(n) if table[a][b] == identity]
            inverse.append(inv[0] if inv else -1)
        gens = tuple(range(n)) if generators is None else tuple(generators)
        return cls(n, table, identity, tuple(inverse), gens, None if labels is None else tuple(labels))

    @classmethod
    def from_elements(cls, elements, mul, generators=None, cap=DEFAULT_CAP):
        """Tabulate a finite set of hashable elements closed under ``mul``.

        ``elements[0]`` need not be the identity; it is located by search.
        """
        elements = list(elements)
        if len(elements) > cap:
            raise CapExceeded(f"{len(elements)} elements exceed cap {cap}")
        index = {e: i for i, e in enumerate(elements)}
        table = []
        for a in elements:
            row = []
            for b in elements:
                p = mul(a, b)
                if p not in index:
                    raise ValueError(f"set not closed: {a!r} * {b!r} = {p!r}")
                row.append(index[p])
            table.append(row)
        gens = None if generators is None else [index[g] for g in generators]
        return cls.from_table(table, generators=gens, labels=elements)

    def check(self):
        """List of problems; empty iff the table defines a group."""
        n, t, e = self.order, self.table, self.identity
        problems = []
        if len(t) != n or any(len(r) != n for r in t):
            return ["table is not order x order"]
        if any(not 0 <= x < n for r in t for x in r):
            return ["table entry out of range"]
        for a in range(n):
            if t[e][a] != a or t[a][e] != a:
                problems.append(f"identity fails at {a}")
                break
        for a in range(n):
            ia = self.inverse[a]
            if not 0 <= ia < n or t[a][ia] != e or t[ia][a] != e:
                problems.append(f"inverse fails at {a}")
                break
        for a in range(n):
            for b in range(n):
                ab = t[a][b]
                for c in range(n):
                    if t[ab][c] != t[a][t[b][c]]:
                        problems.append(f"associativity fails at {(a, b, c)}")
                        return problems
        return problems


def enumerate_group(gens, cap=DEFAULT_CAP, degree=None):
    """Close a list of permutations under composition and tabulate the result."""
    gens = list(gens)
    if degree is None:
        degree = gens[0].degree if gens else 0
    for g in gens:
        if g.degree != degree:
            raise DegreeMismatch("generators of different degree")
    ident = Permutation.identity(degree)
    elements = [ident]
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for a in frontier:
            for g in gens:
                b = g * a
                if b not in seen:
                    seen.add(b)
                    elements.append(b)
                    nxt.append(b)
                    if len(elements) > cap:
                        raise CapExceeded(f"group exceeds cap {cap}")
        frontier = nxt
    return FiniteGroupTable.from_elements(elements, compose, generators=gens, cap=cap)


def acts_freely(elements, m=None):
    """True iff no non-identity permutation in ``elements`` fixes a point."""
    return all(p.is_identity() or not p.fixed_points() for p in elements)


def orbits(elements, m):
    """Orbit partition of ``{0..m-1}``, each orbit sorted, orbits ordered by least point."""
    elements = list(elements)
    seen = [False] * m
    out = []
    for x in range(m):
        if seen[x]:
            continue
        orb, stack = {x}, [x]
        while stack:
            y = stack.pop()
            for p in elements:
                z = p(y)
                if z not in orb:
                    orb.add(z)
                    stack.append(z)
        for y in orb:
            seen[y] = True
        out.append(sorted(orb))
    return out


def cell(i, j, l):
    """Flat index of cell ``(i, j)`` in a ``k x l`` grid (row-major)."""
    return i * l + j


def row_permutation(sigma, l):
    """Permute the rows of a ``k x l`` grid: ``(i, j) -> (σ(i), j)``."""
    k = sigma.degree
    return Permutation(tuple(cell(sigma(x // l), x % l, l) for x in range(k * l)))


def column_permutation(tau, k):
    """Permute the columns of a ``k x l`` grid: ``(i, j) -> (i, τ(j))``."""
    l = tau.degree
    return Permutation(tuple(cell(x // l, tau(x % l), l) for x in range(k * l)))


def regular_representation(group):
    """Left-regular permutation representation of a :class:`FiniteGroupTable`."""
    return [Permutation(tuple(group.mul(g, x) for x in range(group.order))) for g in range(group.order)]
