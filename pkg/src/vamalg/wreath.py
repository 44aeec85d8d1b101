"""Monomial groups ``Z wr S_m``, the Krasner-Kaloujnine embedding, and conjugators.

An element ``(u, s)`` has base ``u`` in ``Z^m`` (a function on points
``0..m-1``) and top ``s`` in ``S_m``.  Points are permuted by
``(s.u)(x) = u(s^-1 x)`` and the product is

    (u, s)(v, t) = (u + s.v, s t).
"""

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import DegreeMismatch, IncompatibleInputs, NoIntegralSolution, ZeroVector
from .intlin import IntMatrix, rank, solve_integer, vadd, vneg
from .perm import Permutation, acts_freely, cell, column_permutation, orbits, row_permutation
from .report import Report


@dataclass(frozen=True)
class MonomialElement:
    base: tuple
    top: Permutation

    def __post_init__(self):
        object.__setattr__(self, "base", tuple(int(x) for x in self.base))
        if len(self.base) != self.top.degree:
            raise DegreeMismatch(f"base length {len(self.base)} != top degree {self.top.degree}")

    @property
    def degree(self):
        return self.top.degree

    @classmethod
    def identity(cls, m):
        return cls((0,) * m, Permutation.identity(m))

    @classmethod
    def of_base(cls, u):
        return cls(tuple(u), Permutation.identity(len(u)))

    @classmethod
    def of_top(cls, s):
        return cls((0,) * s.degree, s)

    def is_identity(self):
        return not any(self.base) and self.top.is_identity()

    def __mul__(self, other):
        return wreath_mul(self, other)

    def to_json(self):
        return {"base": [str(x) for x in self.base], "top": [str(x) for x in self.top.images]}


def wreath_mul(a, b):
    if a.degree != b.degree:
        raise DegreeMismatch(f"degrees {a.degree} and {b.degree}")
    return MonomialElement(vadd(a.base, a.top.act(b.base)), a.top * b.top)


def wreath_inv(a):
    si = a.top.inverse()
    return MonomialElement(vneg(si.act(a.base)), si)


def wreath_power(a, k):
    if k < 0:
        a, k = wreath_inv(a), -k
    result, b = MonomialElement.identity(a.degree), a
    while k:
        if k & 1:
            result = wreath_mul(result, b)
        b = wreath_mul(b, b)
        k >>= 1
    return result


def wreath_conj(g, x):
    """``g x g^-1``."""
    return wreath_mul(wreath_mul(g, x), wreath_inv(g))


@dataclass(frozen=True)
class WreathHom:
    """Homomorphism from a cocycle extension into ``Z wr S_degree``.

    Given by the images of the lattice basis and of the coset
    representatives ``(0, q)``.
    """

    source: object
    degree: int
    basis_images: tuple
    q_images: tuple

    def __post_init__(self):
        object.__setattr__(self, "basis_images", tuple(self.basis_images))
        object.__setattr__(self, "q_images", tuple(self.q_images))

    def __call__(self, a):
        return wreath_hom_apply(self, a)

    def lattice_image(self, v):
        out = MonomialElement.identity(self.degree)
        for b, k in zip(self.basis_images, v):
            if k:
                out = wreath_mul(out, wreath_power(b, k))
        return out

    def base_matrix(self):
        """``m x j`` matrix whose columns are the basis-image base vectors."""
        return IntMatrix.from_columns([b.base for b in self.basis_images], self.degree)

    def conjugated(self, g):
        """Post-compose with ``x -> g x g^-1``."""
        return WreathHom(self.source, self.degree,
                         tuple(wreath_conj(g, b) for b in self.basis_images),
                         tuple(wreath_conj(g, b) for b in self.q_images))

    def mapped(self, beta):
        """Post-compose with a wreath-to-wreath embedding ``beta``."""
        return WreathHom(self.source, beta.target_degree,
                         tuple(beta(b) for b in self.basis_images),
                         tuple(beta(b) for b in self.q_images))


def wreath_hom_apply(h, a):
    h.source.check(a)
    return wreath_mul(h.lattice_image(a.v), h.q_images[a.q])


def validate_wreath_hom(h):
    g = h.source
    Q = g.group
    rep = Report("wreath homomorphism")
    ok = (len(h.basis_images) == g.rank and len(h.q_images) == Q.order
          and all(x.degree == h.degree for x in h.basis_images + h.q_images))
    rep.add("shapes", ok)
    if not ok:
        return rep
    bad = next(((i, k) for i in range(g.rank) for k in range(i + 1, g.rank)
                if wreath_mul(h.basis_images[i], h.basis_images[k])
                != wreath_mul(h.basis_images[k], h.basis_images[i])), None)
    rep.add("basis images commute", bad is None, witness=bad)
    bad = None
    for q in range(Q.order):
        for i in range(g.rank):
            lhs = wreath_conj(h.q_images[q], h.basis_images[i])
            if lhs != h.lattice_image(g.action[q].col(i)):
                bad = {"q": q, "i": i}
                break
        if bad:
            break
    rep.add("conjugation relations", bad is None, witness=bad)
    bad = None
    for q in range(Q.order):
        for r in range(Q.order):
            lhs = wreath_mul(h.q_images[q], h.q_images[r])
            rhs = wreath_mul(h.lattice_image(g.cocycle[q][r]), h.q_images[Q.mul(q, r)])
            if lhs != rhs:
                bad = {"q": q, "r": r}
                break
        if bad:
            break
    rep.add("cocycle relations", bad is None, witness=bad)
    rep.add("identity maps to identity", h.q_images[Q.identity].is_identity())
    return rep


def wreath_hom_is_injective(h):
    """Kernel test: ``(v, q)`` maps to ``(Lv + b_q, top_q)``.

    Requires the basis images to be pure base elements.
    """
    g = h.source
    if any(not b.top.is_identity() for b in h.basis_images):
        raise ValueError("basis images must have identity top")
    lam = h.base_matrix()
    if g.rank and rank(lam) < g.rank:
        return False
    for q in range(g.group.order):
        if q == g.group.identity or not h.q_images[q].top.is_identity():
            continue
        b = h.q_images[q].base
        if g.rank == 0:
            if not any(b):
                return False
        elif solve_integer(lam, vneg(b)) is not None:
            return False
    return True


def q_tops_act_freely(h):
    return acts_freely([x.top for x in h.q_images])


def kk_point(t, i, j):
    """Point of ``Omega`` for Q-element ``t`` and basis index ``i`` (rank ``j``)."""
    return t * j + i


def kk_embed(g):
    """Krasner-Kaloujnine embedding of ``g`` into ``Z wr S_{j|Q|}``.

    Uses the section ``q -> (0, q)``.  The lattice vector ``v`` goes to the
    base function ``(t, i) -> (rho(t)^-1 v)_i``; ``(0, q)`` goes to
    ``(b_q, L_q)`` with ``L_q`` left multiplication on the Q-coordinate and
    ``b_q(t, i) = (rho(t)^-1 f(q, q^-1 t))_i``.
    """
    j, Q = g.rank, g.group
    if j == 0:
        raise ValueError("rank-0 extensions have no faithful embedding of this kind")
    n = Q.order
    k = j * n
    rinv = [g.action[Q.inv(t)] for t in range(n)]

    def lattice_base(v):
        out = [0] * k
        for t in range(n):
            w = rinv[t] @ v
            for i in range(j):
                out[kk_point(t, i, j)] = w[i]
        return tuple(out)

    basis = tuple(MonomialElement.of_base(lattice_base(tuple(1 if x == i else 0 for x in range(j))))
                  for i in range(j))
    qimgs = []
    for q in range(n):
        qinv = Q.inv(q)
        top = Permutation(tuple(kk_point(Q.mul(q, t), i, j) for t in range(n) for i in range(j)))
        base = [0] * k
        for t in range(n):
            w = rinv[t] @ g.cocycle[q][Q.mul(qinv, t)]
            for i in range(j):
                base[kk_point(t, i, j)] = w[i]
        qimgs.append(MonomialElement(tuple(base), top))
    return WreathHom(g, k, basis, tuple(qimgs))


def _check_finite_subgroup(elements):
    elements = list(elements)
    if not elements:
        raise IncompatibleInputs("empty element list")
    m = elements[0].degree
    s = set(elements)
    if MonomialElement.identity(m) not in s:
        raise IncompatibleInputs("identity missing")
    for a in elements:
        for b in elements:
            if wreath_mul(a, b) not in s:
                raise IncompatibleInputs(f"not closed under product: {a} * {b}")
    tops = [a.top for a in elements]
    if len(set(tops)) != len(tops):
        raise IncompatibleInputs("top parts are not distinct")


def conjugate_finite_into_top(elements):
    """Base vector ``h`` with ``h - s.h = d`` for every ``(d, s)`` in the subgroup.

    Then ``(h, id)^-1 (d, s) (h, id) = (0, s)``.
    """
    elements = list(elements)
    _check_finite_subgroup(elements)
    m = elements[0].degree
    n = len(elements)
    total = [Fraction(0)] * m
    for a in elements:
        total = [x + y for x, y in zip(total, a.base)]
    avg = [x / n for x in total]
    for a in elements:
        moved = a.top.act(avg)
        assert all(x - y == d for x, y, d in zip(avg, moved, a.base)), "averaging check failed"
    rows, rhs = [], []
    for a in elements:
        inv = a.top.inverse()
        for x in range(m):
            row = [0] * m
            row[x] += 1
            row[inv(x)] -= 1
            rows.append(row)
        rhs.extend(a.base)
    h = solve_integer(IntMatrix.from_rows(rows, m), rhs)
    if h is None:
        raise NoIntegralSolution("no integral conjugator into the top group")
    return h


@dataclass(frozen=True)
class WreathEmbedding:
    """Embedding ``Z wr S_k -> Z wr S_{k*l}`` from the amalgamation construction.

    Side 1 sends base ``u`` to the flattened outer product ``u c^T`` and
    permutes rows; side 2 sends ``v`` to ``c v^T`` and permutes columns.
    An optional ``conjugator`` (a top permutation) is applied afterwards.
    """

    side: int
    k: int
    l: int
    vector: tuple
    conjugator: Permutation = field(default=None)

    @property
    def source_degree(self):
        return self.k if self.side == 1 else self.l

    @property
    def target_degree(self):
        return self.k * self.l

    def base_image(self, u):
        k, l, c = self.k, self.l, self.vector
        out = [0] * (k * l)
        for i in range(k):
            for j in range(l):
                out[cell(i, j, l)] = u[i] * c[j] if self.side == 1 else c[i] * u[j]
        return tuple(out)

    def top_image(self, s):
        return row_permutation(s, self.l) if self.side == 1 else column_permutation(s, self.k)

    def __call__(self, a):
        if a.degree != self.source_degree:
            raise DegreeMismatch(f"expected degree {self.source_degree}, got {a.degree}")
        out = MonomialElement(self.base_image(a.base), self.top_image(a.top))
        if self.conjugator is not None:
            out = wreath_conj(MonomialElement.of_top(self.conjugator), out)
        return out

    def with_conjugator(self, sigma):
        return WreathEmbedding(self.side, self.k, self.l, self.vector, sigma)


def amalgamating_embeddings(k, l, c1, c2):
    """Embeddings of ``Z wr S_k`` and ``Z wr S_l`` into ``Z wr S_{kl}`` agreeing on ``c1``/``c2``."""
    c1, c2 = tuple(c1), tuple(c2)
    if len(c1) != k or len(c2) != l:
        raise DegreeMismatch("vector lengths do not match degrees")
    if not any(c1) or not any(c2):
        raise ZeroVector("amalgamated vectors must be nonzero")
    return WreathEmbedding(1, k, l, c2), WreathEmbedding(2, k, l, c1)


def outer_flat(c1, c2):
    return tuple(a * b for a in c1 for b in c2)


def sign_character(f, images):
    """``eps(q)`` with ``images[q] . f == eps(q) f``, or ``None`` if some image is neither."""
    f = tuple(f)
    neg = vneg(f)
    eps = []
    for s in images:
        moved = s.act(f)
        if moved == f:
            eps.append(1)
        elif moved == neg:
            eps.append(-1)
        else:
            return None
    return tuple(eps)


def matching_conjugator(f, q_images_1, q_images_2, group=None):
    """Permutation ``s`` fixing ``f`` with ``s g1(q) s^-1 = g2(q)`` for all ``q``.

    Points are grouped into blocks by the value of ``f`` (values ``a`` and
    ``-a`` share a block when some ``q`` negates ``f``).  Within a block the
    free orbits of both actions are listed by least point in the ``a >= 0``
    part, matched in that order, and ``g1(t) p1 -> g2(t) p2``.
    """
    f = tuple(f)
    g1, g2 = list(q_images_1), list(q_images_2)
    m = len(f)
    if len(g1) != len(g2):
        raise IncompatibleInputs("image lists have different lengths")
    if any(s.degree != m for s in g1 + g2):
        raise DegreeMismatch("permutation degree differs from length of f")
    if group is not None:
        for gi in (g1, g2):
            for q in range(group.order):
                for r in range(group.order):
                    if gi[q] * gi[r] != gi[group.mul(q, r)]:
                        raise IncompatibleInputs(f"images are not a homomorphism at {(q, r)}")
    e1, e2 = sign_character(f, g1), sign_character(f, g2)
    if e1 is None or e2 is None or (e1 != e2 and any(f)):
        raise IncompatibleInputs("actions do not move f by a common sign character")
    if group is not None:
        free = all(not gi[q].fixed_points() for gi in (g1, g2) for q in range(group.order) if q != group.identity)
    else:
        free = acts_freely(g1) and acts_freely(g2)
    if not free:
        raise IncompatibleInputs("actions are not free")
    flips = any(x == -1 for x in e1) and any(f)

    blocks = {}
    for x, a in enumerate(f):
        key = abs(a) if flips else a
        blocks.setdefault(key, []).append(x)

    sigma = [None] * m
    for key in sorted(blocks):
        pts = set(blocks[key])
        matched = []
        for gi in (g1, g2):
            orbs = [o for o in orbits(gi, m) if o[0] in pts]
            reps = []
            for o in orbs:
                cands = [x for x in o if f[x] == key] if flips else o
                reps.append(min(cands))
            reps.sort()
            matched.append(reps)
        if len(matched[0]) != len(matched[1]):
            raise IncompatibleInputs(f"orbit counts differ on the level set {key}")
        for p1, p2 in zip(*matched):
            for s1, s2 in zip(g1, g2):
                x, y = s1(p1), s2(p2)
                if sigma[x] is not None and sigma[x] != y:
                    raise IncompatibleInputs("orbit matching is inconsistent")
                sigma[x] = y
    if None in sigma:
        raise IncompatibleInputs("matching did not cover every point")
    try:
        s = Permutation(tuple(sigma))
    except ValueError as exc:
        raise IncompatibleInputs(str(exc)) from None
    if s.act(f) != f:
        raise IncompatibleInputs("conjugator does not fix f")
    si = s.inverse()
    for s1, s2 in zip(g1, g2):
        if s * s1 * si != s2:
            raise IncompatibleInputs("conjugator fails to intertwine the actions")
    return s
