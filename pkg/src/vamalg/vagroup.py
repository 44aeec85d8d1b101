"""Virtually abelian groups presented as extensions of a finite group by a lattice.

A :class:`CocycleExtension` with rank ``j``, finite quotient ``Q``, action
``rho`` and normalized 2-cocycle ``f`` has elements ``(v, q)`` with ``v`` in
``Z^j`` and product

    (v, q)(w, r) = (v + rho(q) w + f(q, r), qr).

The coordinate lattice ``Z^j`` (elements ``(v, 1)``) is always the
distinguished free abelian normal subgroup.
"""

import math
from dataclasses import dataclass
from itertools import product

from .errors import CapExceeded, ParentMismatch
from .intlin import (
    IntMatrix, abelian_quotient, content_and_primitive, rank, solve_integer, vadd, vneg, vscale,
)
from .perm import DEFAULT_CAP, FiniteGroupTable
from .report import Report

INFINITE = math.inf


@dataclass(frozen=True)
class ExtElement:
    v: tuple
    q: int

    def __post_init__(self):
        object.__setattr__(self, "v", tuple(int(x) for x in self.v))

    def to_json(self):
        return {"v": [str(x) for x in self.v], "q": str(self.q)}


class CocycleExtension:
    """Extension ``Z^j -> G -> Q`` given by action matrices and a cocycle table.

    ``action[q]`` is a j x j IntMatrix; ``cocycle[q][r]`` is a length-j tuple.
    Construction does no validation beyond shapes; see :func:`validate_extension`.
    """

    def __init__(self, rank, group, action, cocycle, name=""):
        self.rank = int(rank)
        self.group = group
        self.action = tuple(a if isinstance(a, IntMatrix) else IntMatrix.from_rows(a, rank) for a in action)
        self.cocycle = tuple(tuple(tuple(int(x) for x in f_qr) for f_qr in row) for row in cocycle)
        self.name = name
        n = group.order
        if len(self.action) != n or len(self.cocycle) != n or any(len(r) != n for r in self.cocycle):
            raise ParentMismatch("action/cocycle tables do not match the order of Q")

    @classmethod
    def build(cls, rank, group, action, cocycle=None, name=""):
        """Convenience constructor; ``cocycle`` may be a sparse dict ``{(q, r): v}``."""
        n = group.order
        zero = (0,) * rank
        if cocycle is None or isinstance(cocycle, dict):
            sparse = cocycle or {}
            cocycle = [[tuple(sparse.get((q, r), zero)) for r in range(n)] for q in range(n)]
        return cls(rank, group, action, cocycle, name)

    @classmethod
    def free_abelian(cls, rank, name=""):
        trivial = FiniteGroupTable.from_table([[0]])
        return cls.build(rank, trivial, [IntMatrix.identity(rank)], name=name)

    def __eq__(self, other):
        return (isinstance(other, CocycleExtension) and self.rank == other.rank
                and self.group.table == other.group.table and self.group.identity == other.group.identity
                and self.action == other.action and self.cocycle == other.cocycle)

    def __hash__(self):
        return hash((self.rank, self.group.table, self.action, self.cocycle))

    def __repr__(self):
        label = f" {self.name}" if self.name else ""
        return f"<CocycleExtension{label} rank={self.rank} |Q|={self.group.order}>"

    # element arithmetic

    def identity(self):
        return ExtElement((0,) * self.rank, self.group.identity)

    def element(self, v, q=None):
        return self.check(ExtElement(tuple(v), self.group.identity if q is None else q))

    def lattice(self, v):
        return self.element(v)

    def check(self, a):
        if len(a.v) != self.rank or not 0 <= a.q < self.group.order:
            raise ParentMismatch(f"{a} is not an element of {self!r}")
        return a

    def rho(self, q):
        return self.action[q]

    def f(self, q, r):
        return self.cocycle[q][r]

    def mul(self, a, b):
        self.check(a)
        self.check(b)
        v = vadd(vadd(a.v, self.action[a.q] @ b.v), self.cocycle[a.q][b.q])
        return ExtElement(v, self.group.mul(a.q, b.q))

    def inv(self, a):
        self.check(a)
        qi = self.group.inv(a.q)
        w = vadd(a.v, self.cocycle[a.q][qi])
        return ExtElement(vneg(self.action[qi] @ w), qi)

    def power(self, a, k):
        if k < 0:
            a, k = self.inv(a), -k
        result, base = self.identity(), a
        while k:
            if k & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            k >>= 1
        return result

    def conj(self, g, x):
        """``g x g^-1``."""
        return self.mul(self.mul(g, x), self.inv(g))

    def element_order(self, a):
        d = self.group.element_order(self.check(a).q)
        w = self.power(a, d)
        return d if not any(w.v) else INFINITE

    def elements_in_box(self, radius):
        """All elements whose lattice part lies in ``[-radius, radius]^j``."""
        rng = range(-radius, radius + 1)
        for v in product(rng, repeat=self.rank):
            for q in range(self.group.order):
                yield ExtElement(v, q)


def ext_mul(a, b, g):
    return g.mul(a, b)


def ext_inv(a, g):
    return g.inv(a)


def element_order(a, g):
    return g.element_order(a)


def validate_extension(g):
    rep = Report(f"extension {g.name or ''}".strip())
    problems = g.group.check()
    rep.add("group table", not problems, "; ".join(problems))
    if problems:
        return rep
    j, Q = g.rank, g.group
    n, e = Q.order, Q.identity
    shapes = all(m.rows == j and m.cols == j for m in g.action) and all(
        len(x) == j for row in g.cocycle for x in row)
    rep.add("shapes", shapes, "" if shapes else f"expected {j}x{j} action matrices and length-{j} cocycle values")
    if not shapes:
        return rep
    bad = next((q for q in range(n) if not g.action[q].is_unimodular()), None)
    rep.add("action unimodular", bad is None, "" if bad is None else f"det rho({bad}) = {g.action[bad].det()}",
            None if bad is None else {"q": bad})
    bad = None
    for q in range(n):
        for r in range(n):
            if g.action[q] @ g.action[r] != g.action[Q.mul(q, r)]:
                bad = (q, r)
                break
        if bad:
            break
    rep.add("action is a homomorphism", bad is None, "" if bad is None else "rho(q) rho(r) != rho(qr)",
            None if bad is None else {"q": bad[0], "r": bad[1]})
    zero = (0,) * j
    bad = next((q for q in range(n) if g.cocycle[e][q] != zero or g.cocycle[q][e] != zero), None)
    rep.add("cocycle normalized", bad is None, "" if bad is None else "f(1,q) or f(q,1) nonzero",
            None if bad is None else {"q": bad})
    bad = _cocycle_violation(g)
    rep.add("cocycle identity", bad is None, "" if bad is None else "rho(q) f(r,s) + f(q,rs) != f(q,r) + f(qr,s)",
            None if bad is None else dict(zip("qrs", bad)))
    return rep


def _cocycle_violation(g):
    Q, f = g.group, g.cocycle
    n = Q.order
    for q in range(n):
        rq = g.action[q]
        for r in range(n):
            qr = Q.mul(q, r)
            fqr = f[q][r]
            for s in range(n):
                lhs = vadd(rq @ f[r][s], f[q][Q.mul(r, s)])
                if lhs != vadd(fqr, f[qr][s]):
                    return (q, r, s)
    return None


@dataclass(frozen=True)
class ExtHom:
    """``(v, q) -> (lam v + tau(q), pi(q))``."""

    source: CocycleExtension
    target: CocycleExtension
    lam: IntMatrix
    pi: tuple
    tau: tuple

    def __post_init__(self):
        object.__setattr__(self, "pi", tuple(int(x) for x in self.pi))
        object.__setattr__(self, "tau", tuple(tuple(int(x) for x in t) for t in self.tau))

    def __call__(self, a):
        return hom_apply(self, a)

    @classmethod
    def identity(cls, g):
        n = g.group.order
        return cls(g, g, IntMatrix.identity(g.rank), tuple(range(n)), ((0,) * g.rank,) * n)


def hom_apply(h, a):
    h.source.check(a)
    return ExtElement(vadd(h.lam @ a.v, h.tau[a.q]), h.pi[a.q])


def compose_homs(h2, h1):
    """``h2 ∘ h1``; requires ``h1.target == h2.source``."""
    if h1.target != h2.source:
        raise ParentMismatch("homomorphisms are not composable")
    lam = h2.lam @ h1.lam
    pi = tuple(h2.pi[p] for p in h1.pi)
    tau = tuple(vadd(h2.lam @ h1.tau[q], h2.tau[h1.pi[q]]) for q in range(h1.source.group.order))
    return ExtHom(h1.source, h2.target, lam, pi, tau)


def validate_hom(h):
    rep = Report("homomorphism")
    S, T = h.source, h.target
    n1 = S.group.order
    shapes = (h.lam.rows == T.rank and h.lam.cols == S.rank and len(h.pi) == n1 and len(h.tau) == n1
              and all(0 <= p < T.group.order for p in h.pi) and all(len(t) == T.rank for t in h.tau))
    rep.add("shapes", shapes)
    if not shapes:
        return rep
    bad = next(((q, r) for q in range(n1) for r in range(n1)
                if h.pi[S.group.mul(q, r)] != T.group.mul(h.pi[q], h.pi[r])), None)
    rep.add("pi is a homomorphism", bad is None, witness=None if bad is None else {"q": bad[0], "r": bad[1]})
    if bad is not None:
        return rep
    bad = next((q for q in range(n1) if h.lam @ S.action[q] != T.action[h.pi[q]] @ h.lam), None)
    rep.add("equivariance", bad is None, "" if bad is None else "lam rho1(q) != rho2(pi q) lam",
            None if bad is None else {"q": bad})
    rep.add("tau(1) = 0", not any(h.tau[S.group.identity]))
    bad = None
    for q in range(n1):
        for r in range(n1):
            pq, pr = h.pi[q], h.pi[r]
            lhs = vadd(h.lam @ S.cocycle[q][r], h.tau[S.group.mul(q, r)])
            rhs = vadd(vadd(h.tau[q], T.action[pq] @ h.tau[r]), T.cocycle[pq][pr])
            if lhs != rhs:
                bad = (q, r)
                break
        if bad:
            break
    rep.add("cocycle compatibility", bad is None, witness=None if bad is None else {"q": bad[0], "r": bad[1]})
    return rep


def is_injective(h):
    S = h.source
    if rank(h.lam) < S.rank:
        return False
    e2 = h.target.group.identity
    for q in range(S.group.order):
        if q != S.group.identity and h.pi[q] == e2:
            if S.rank == 0:
                if not any(h.tau[q]):
                    return False
            elif solve_integer(h.lam, vneg(h.tau[q])) is not None:
                return False
    return True


def is_preimage_exact(h):
    """True iff the source lattice is the full preimage of the target lattice.

    An element ``(v, q)`` maps into the target lattice iff ``pi(q) = 1``, so
    this is exactly injectivity of ``pi``.
    """
    return len(set(h.pi)) == len(h.pi)


@dataclass(frozen=True)
class Abelianization:
    """``G^ab`` on generators ``e_1..e_j`` (lattice) followed by ``g_q`` for each ``q``."""

    extension: CocycleExtension
    quotient: object

    @property
    def free_rank(self):
        return self.quotient.free_rank

    @property
    def torsion(self):
        return self.quotient.torsion

    def vector(self, a):
        g = self.extension
        g.check(a)
        unit = [0] * g.group.order
        unit[a.q] = 1
        return tuple(a.v) + tuple(unit)

    def class_of(self, a):
        return self.quotient.class_of(self.vector(a))

    def is_infinite_order(self, a):
        return any(self.class_of(a)[0])


def abelianization_relations(g):
    j, Q = g.rank, g.group
    n = Q.order
    rels = []
    for q in range(n):
        m = g.action[q]
        for i in range(j):
            col = m.col(i)
            rels.append(tuple(col[k] - (1 if k == i else 0) for k in range(j)) + (0,) * n)
    for q in range(n):
        for r in range(n):
            row = [0] * (j + n)
            for k, x in enumerate(g.cocycle[q][r]):
                row[k] -= x
            row[j + q] += 1
            row[j + r] += 1
            row[j + Q.mul(q, r)] -= 1
            rels.append(tuple(row))
    return rels


def abelianization(g):
    return Abelianization(g, abelian_quotient(abelianization_relations(g), g.rank + g.group.order))


@dataclass(frozen=True)
class LatticeRescaling:
    """Re-presentation of ``old`` over the sublattice ``d Z^j``.

    ``forward`` maps elements of ``old`` to ``new``; ``backward`` inverts it.
    Q-element ``q'`` of ``new`` is the coset of ``(u, q)`` with ``u`` in
    ``[0, d)^j``, indexed by ``q * d^j + index(u)``.
    """

    old: CocycleExtension
    new: CocycleExtension
    d: int

    def _u_index(self, u):
        idx = 0
        for x in u:
            idx = idx * self.d + x
        return idx

    def representative(self, qp):
        """Coset representative ``(u, q)`` in ``old`` for a Q-element of ``new``."""
        j, d = self.old.rank, self.d
        block = d ** j
        q, idx = divmod(qp, block)
        u = [0] * j
        for i in reversed(range(j)):
            idx, u[i] = divmod(idx, d)
        return ExtElement(tuple(u), q)

    def forward(self, a):
        self.old.check(a)
        vp, u = zip(*(divmod(x, self.d) for x in a.v)) if a.v else ((), ())
        return ExtElement(vp, a.q * self.d ** self.old.rank + self._u_index(u))

    def backward(self, b):
        self.new.check(b)
        r = self.representative(b.q)
        return ExtElement(vadd(vscale(self.d, b.v), r.v), r.q)

    def forward_hom(self):
        """The isomorphism ``old -> new`` when ``d == 1``; otherwise not an ExtHom."""
        if self.d != 1:
            raise ValueError("rescaling with d > 1 does not map lattice onto lattice")
        return ExtHom.identity(self.old)


def rescale_lattice(g, d, cap=DEFAULT_CAP):
    d = int(d)
    if d < 1:
        raise ValueError("rescaling factor must be positive")
    if d == 1:
        return g, LatticeRescaling(g, g, 1)
    j, Q = g.rank, g.group
    block = d ** j
    order = block * Q.order
    if order > cap:
        raise CapExceeded(f"rescaled quotient has order {order} > cap {cap}")
    boxes = list(product(range(d), repeat=j))
    reps = [ExtElement(u, q) for q in range(Q.order) for u in boxes]
    index = {r: i for i, r in enumerate(reps)}
    table, cocycle = [], []
    for a in reps:
        trow, frow = [], []
        for b in reps:
            p = g.mul(a, b)
            w, u = zip(*(divmod(x, d) for x in p.v)) if j else ((), ())
            trow.append(index[ExtElement(u, p.q)])
            frow.append(w)
        table.append(trow)
        cocycle.append(frow)
    qnew = FiniteGroupTable.from_table(table, identity=index[g.identity()],
                                       labels=[(r.v, r.q) for r in reps])
    action = [g.action[r.q] for r in reps]
    new = CocycleExtension(j, qnew, action, cocycle, name=f"{g.name}/{d}" if g.name else "")
    return new, LatticeRescaling(g, new, d)


@dataclass(frozen=True)
class EdgeDatum:
    """A virtually cyclic subgroup ``M ⋊ <c>`` of ``ambient`` with ``M`` finite."""

    ambient: CocycleExtension
    m_elements: tuple
    c: ExtElement

    def __post_init__(self):
        object.__setattr__(self, "m_elements", tuple(self.m_elements))


def validate_edge(e):
    g = e.ambient
    rep = Report("edge subgroup")
    try:
        for x in e.m_elements + (e.c,):
            g.check(x)
    except ParentMismatch as exc:
        rep.add("elements belong to ambient", False, str(exc))
        return rep
    M = set(e.m_elements)
    rep.add("M contains identity", g.identity() in M)
    bad = next(((a, b) for a in e.m_elements for b in e.m_elements if g.mul(a, b) not in M), None)
    rep.add("M closed under product", bad is None, witness=bad)
    bad = next((a for a in e.m_elements if g.inv(a) not in M), None)
    rep.add("M closed under inverse", bad is None, witness=bad)
    bad = next((a for a in e.m_elements if g.element_order(a) == INFINITE), None)
    rep.add("M finite order", bad is None, witness=bad)
    inf = g.element_order(e.c) == INFINITE
    rep.add("c infinite order", inf, witness=None if inf else e.c)
    bad = next((a for a in e.m_elements if g.conj(e.c, a) not in M), None)
    rep.add("c normalizes M", bad is None, witness=bad)
    if inf and bad is None:
        # c^k in M for k > 0 would make c finite-order, so only k up to |M| matters
        hit = next((k for k in range(1, len(M) + 1) if g.power(e.c, k) in M), None)
        rep.add("<c> meets M trivially", hit is None, witness=None if hit is None else {"k": hit})
    return rep


def edge_intersection_data(e):
    """``(d, w, content(w))`` where ``d`` is the order of c's Q-part and ``c^d = (w, 1)``."""
    g = e.ambient
    d = g.group.element_order(e.c.q)
    w = g.power(e.c, d).v
    return d, w, content_and_primitive(w)[0]


@dataclass(frozen=True)
class EdgeLatticeGenerator:
    """Generator ``z = m0 c^a0`` of (lattice ∩ M<c>), with ``d = p * a0``."""

    d: int
    a0: int
    m0: ExtElement
    z: ExtElement
    content: int

    @property
    def p(self):
        return self.d // self.a0


def edge_lattice_generator(e):
    """Find the generator of the infinite cyclic group ``Z^j ∩ M<c>``.

    The exponent of ``c`` along that group is minimal at a unique ``a0``
    dividing the order ``d`` of c's Q-part; the M-factor there is unique too.
    """
    g = e.ambient
    d = g.group.element_order(e.c.q)
    ident = g.group.identity
    for a0 in range(1, d + 1):
        if d % a0:
            continue
        ca = g.power(e.c, a0)
        for m in e.m_elements:
            z = g.mul(m, ca)
            if z.q == ident:
                return EdgeLatticeGenerator(d, a0, m, z, content_and_primitive(z.v)[0])
    raise AssertionError("c^d lies in the lattice, so a0 <= d must exist")


def lattice_part(g, a):
    """Lattice vector of ``a`` if it lies in the lattice, else ``None``."""
    return a.v if a.q == g.group.identity else None


def scalar_hom(g, target, n):
    """``(n Id, id, 0)`` from ``g`` into ``target`` (which must share Q)."""
    return ExtHom(g, target, IntMatrix.scalar(g.rank, n), tuple(range(g.group.order)),
                  ((0,) * g.rank,) * g.group.order)

