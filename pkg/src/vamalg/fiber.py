"""Fibering and free-by-cyclic decisions for amalgams over infinite cyclic edges.

Words in a free group of rank ``r`` are tuples of nonzero integers: ``i``
is the ``i``-th generator (1-based) and ``-i`` its inverse.  In a
free-by-cyclic group the stable letter ``t`` is generator ``r + 1``, with
``t x t^-1 = phi(x)``.

A factor fibers compatibly with the edge iff the edge survives with
infinite order in the factor's abelianization; the glued character is then
built from one character per side.  Only the abelianization condition is
computed: the finiteness properties of character kernels are a property of
the supported factor kinds, not something this module checks.
"""

from dataclasses import dataclass, field

from .errors import DisconnectedGraph, TrivialEdgeWord, ZeroOnEdge
from .intlin import IntMatrix, abelian_quotient, right_kernel
from .report import Report
from .vagroup import CocycleExtension, abelianization, abelianization_relations


def free_reduce(word):
    out = []
    for x in word:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def invert_word(word):
    return tuple(-x for x in reversed(word))


def substitute(images, word):
    """Apply the endomorphism ``x_i -> images[i-1]`` to ``word``."""
    out = []
    for x in word:
        img = images[abs(x) - 1]
        out.extend(img if x > 0 else invert_word(img))
    return free_reduce(out)


def exponent_vector(word, r):
    v = [0] * r
    for x in word:
        v[abs(x) - 1] += 1 if x > 0 else -1
    return tuple(v)


def commutator(a, b):
    """``a b a^-1 b^-1`` as a word."""
    return free_reduce(tuple(a) + tuple(b) + invert_word(a) + invert_word(b))


@dataclass(frozen=True)
class FreeByCyclic:
    rank: int
    phi: tuple
    phi_inv: tuple

    def __post_init__(self):
        object.__setattr__(self, "phi", tuple(free_reduce(w) for w in self.phi))
        object.__setattr__(self, "phi_inv", tuple(free_reduce(w) for w in self.phi_inv))

    @property
    def t(self):
        return self.rank + 1

    def phi_power(self, k, word):
        images = self.phi if k > 0 else self.phi_inv
        for _ in range(abs(k)):
            word = substitute(images, word)
        return free_reduce(word)


def validate_fbc(g):
    rep = Report("free-by-cyclic")
    r = g.rank
    ok = len(g.phi) == r and len(g.phi_inv) == r and all(
        0 < abs(x) <= r for w in g.phi + g.phi_inv for x in w)
    rep.add("shapes", ok)
    if not ok:
        return rep
    bad = next((i for i in range(1, r + 1) if substitute(g.phi, g.phi_inv[i - 1]) != (i,)), None)
    rep.add("phi after phi_inv is identity", bad is None, witness=bad)
    bad = next((i for i in range(1, r + 1) if substitute(g.phi_inv, g.phi[i - 1]) != (i,)), None)
    rep.add("phi_inv after phi is identity", bad is None, witness=bad)
    return rep


@dataclass(frozen=True)
class FbcElement:
    """``u t^k`` with ``u`` a reduced word in the fiber."""

    u: tuple
    k: int

    def is_identity(self):
        return not self.u and self.k == 0


def fbc_mul(g, a, b):
    return FbcElement(free_reduce(a.u + g.phi_power(a.k, b.u)), a.k + b.k)


def fbc_normal_form(g, word):
    u, k = [], 0
    for x in word:
        if abs(x) == g.t:
            k += 1 if x > 0 else -1
        elif 0 < abs(x) <= g.rank:
            u.extend(g.phi_power(k, (x,)))
            u = list(free_reduce(u))
        else:
            raise ValueError(f"letter {x} out of range for rank {g.rank}")
    return FbcElement(tuple(u), k)


def fbc_relations(g):
    """Exponent vectors on ``x_1..x_r, t`` of the relators ``t x_i t^-1 phi(x_i)^-1``."""
    r = g.rank
    rels = []
    for i in range(r):
        e = [0] * (r + 1)
        e[i] = 1
        img = exponent_vector(g.phi[i], r)
        rels.append(tuple(a - b for a, b in zip(e, img + (0,))))
    return rels


@dataclass(frozen=True)
class FbcAbelianization:
    group: FreeByCyclic
    quotient: object

    @property
    def free_rank(self):
        return self.quotient.free_rank

    @property
    def torsion(self):
        return self.quotient.torsion

    def vector(self, a):
        return exponent_vector(a.u, self.group.rank) + (a.k,)

    def class_of(self, a):
        return self.quotient.class_of(self.vector(a))


def fbc_abelianization(g):
    return FbcAbelianization(g, abelian_quotient(fbc_relations(g), g.rank + 1))


# factors of either kind


def _as_fbc_element(g, edge):
    if isinstance(edge, FbcElement):
        return edge
    return fbc_normal_form(g, edge)


def _factor_data(factor, edge):
    """``(abelianization, generator vector of edge, relation vectors, generator labels)``."""
    if isinstance(factor, FreeByCyclic):
        ab = fbc_abelianization(factor)
        e = _as_fbc_element(factor, edge)
        labels = [f"x{i}" for i in range(1, factor.rank + 1)] + ["t"]
        return ab, ab.vector(e), fbc_relations(factor), labels
    if isinstance(factor, CocycleExtension):
        ab = abelianization(factor)
        labels = [f"e{i}" for i in range(1, factor.rank + 1)] + [f"q{q}" for q in range(factor.group.order)]
        return ab, ab.vector(edge), abelianization_relations(factor), labels
    raise TypeError(f"unsupported factor type {type(factor).__name__}")


def infinite_image_in_ab(factor, edge):
    ab, vec, _, _ = _factor_data(factor, edge)
    return any(ab.quotient.class_of(vec)[0])


def hom_to_z_basis(relations, ngens):
    """Basis of ``Hom(G, Z)`` as generator-value vectors (right kernel of the relations)."""
    if not relations:
        return [tuple(1 if i == k else 0 for i in range(ngens)) for k in range(ngens)]
    kern = right_kernel(IntMatrix.from_rows(relations, ngens))
    return [kern.row(i) for i in range(kern.rows)]


def edge_character(factor, edge):
    """Generator values of a character nonzero on ``edge``, or ``None`` if none exists.

    Prefers the projection to ``t`` on a free-by-cyclic factor; otherwise
    pairs the free part of the edge's class with itself.
    """
    ab, vec, _, _ = _factor_data(factor, edge)
    if isinstance(factor, FreeByCyclic) and vec[-1]:
        return (0,) * factor.rank + (1,)
    q = ab.quotient
    free_idx = [i for i, d in enumerate(q.moduli) if d == 0]
    y = q.class_of(vec)[0]
    if not any(y):
        return None
    T = q.transform
    return tuple(sum(T[g, i] * yi for i, yi in zip(free_idx, y)) for g in range(q.ngens))


def _dot(a, b):
    return sum(x * y for x, y in zip(a, b))


@dataclass
class GluedCharacter:
    factor1: tuple
    factor2: tuple
    edge_value: int
    transcript: Report = field(default=None)


def glue_characters(chi1, n1, chi2, n2, relations1=(), relations2=(), edge1=None, edge2=None):
    """Scale ``chi1`` by ``n2`` and ``chi2`` by ``n1`` so both take ``n1 n2`` on the edge.

    Signs are normalized first so that both edge values are positive.
    ``relations*`` and ``edge*`` (generator exponent vectors) feed the
    check transcript.
    """
    if n1 == 0 or n2 == 0:
        raise ZeroOnEdge("a character vanishes on the edge")
    chi1, chi2 = tuple(chi1), tuple(chi2)
    if n1 < 0:
        chi1, n1 = tuple(-x for x in chi1), -n1
    if n2 < 0:
        chi2, n2 = tuple(-x for x in chi2), -n2
    out1 = tuple(n2 * x for x in chi1)
    out2 = tuple(n1 * x for x in chi2)
    rep = Report("glued character")
    for i, (chi, rels) in enumerate(((out1, relations1), (out2, relations2)), 1):
        bad = next((r for r in rels if _dot(chi, r)), None)
        rep.add(f"factor{i}: vanishes on relations", bad is None, witness=bad)
    if edge1 is not None:
        rep.add("factor1: edge value", _dot(out1, edge1) == n1 * n2, f"{_dot(out1, edge1)}")
    if edge2 is not None:
        rep.add("factor2: edge value", _dot(out2, edge2) == n1 * n2, f"{_dot(out2, edge2)}")
    return GluedCharacter(out1, out2, n1 * n2, rep)


@dataclass(frozen=True)
class FiberAmalgam:
    factor1: object
    factor2: object
    edge1: object
    edge2: object


@dataclass
class FiberDecision:
    fibered: bool
    failing_side: int = None
    character: GluedCharacter = None
    notes: list = field(default_factory=list)


def _edge_is_infinite(factor, edge):
    if isinstance(factor, FreeByCyclic):
        return not _as_fbc_element(factor, edge).is_identity()
    return factor.element_order(edge) == float("inf")


def decide_fibering(am):
    """Decide whether the amalgam maps onto Z with finitely generated kernel."""
    sides = ((am.factor1, am.edge1), (am.factor2, am.edge2))
    for i, (f, e) in enumerate(sides, 1):
        if not _edge_is_infinite(f, e):
            raise TrivialEdgeWord(f"edge element of factor {i} has finite order")
    chis = []
    for i, (f, e) in enumerate(sides, 1):
        chi = edge_character(f, e)
        if chi is None:
            return FiberDecision(False, i, None, [
                f"the edge has finite image in the abelianization of factor {i}, so every character "
                "of that factor vanishes on it and the amalgam is not F_m-fibered for any m"])
        chis.append(chi)
    data = [_factor_data(f, e) for f, e in sides]
    n = [_dot(c, d[1]) for c, d in zip(chis, data)]
    glued = glue_characters(chis[0], n[0], chis[1], n[1], data[0][2], data[1][2], data[0][1], data[1][1])
    notes = ["both edge images are infinite in the abelianizations; the glued character has "
             "kernel of type F_m for every m for these factor kinds"]
    return FiberDecision(glued.transcript.ok, None, glued, notes)


@dataclass
class FbcDecision:
    free_by_cyclic: bool
    reason: str


def decide_free_by_cyclic(f1, f2, w1, w2):
    """Is ``F1 *_{<w1> = <w2>} F2`` free-by-cyclic?"""
    elems = []
    for i, (f, w) in enumerate(((f1, w1), (f2, w2)), 1):
        e = _as_fbc_element(f, w)
        if e.is_identity():
            raise TrivialEdgeWord(f"edge word of factor {i} is trivial")
        elems.append(e)
    for i, (f, e) in enumerate(((f1, elems[0]), (f2, elems[1])), 1):
        if not infinite_image_in_ab(f, e):
            return FbcDecision(False, f"edge in commutator subgroup of side {i} "
                                      f"(finite image in its abelianization)")
    return FbcDecision(True, "edge is infinite cyclic and meets both commutator subgroups trivially")


# graphs


@dataclass(frozen=True)
class UndirectedMultigraph:
    vertex_count: int
    edges: tuple

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple((int(a), int(b)) for a, b in self.edges))
        for a, b in self.edges:
            if not (0 <= a < self.vertex_count and 0 <= b < self.vertex_count):
                raise ValueError(f"edge {(a, b)} has an endpoint out of range")

    def is_connected(self):
        n = self.vertex_count
        if n == 0:
            return False
        adj = [[] for _ in range(n)]
        for a, b in self.edges:
            adj[a].append(b)
            adj[b].append(a)
        seen, stack = {0}, [0]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return len(seen) == n


def biconnected_blocks(g):
    """Blocks as lists of edge ids; each loop is its own block."""
    n = g.vertex_count
    adj = [[] for _ in range(n)]
    blocks = []
    for eid, (a, b) in enumerate(g.edges):
        if a == b:
            blocks.append([eid])
        else:
            adj[a].append((b, eid))
            adj[b].append((a, eid))
    disc = [-1] * n
    low = [0] * n
    timer = 0
    edge_stack = []
    for root in range(n):
        if disc[root] != -1:
            continue
        disc[root] = low[root] = timer
        timer += 1
        stack = [(root, -1, iter(adj[root]))]
        while stack:
            v, parent_edge, it = stack[-1]
            advanced = False
            for w, eid in it:
                if eid == parent_edge:
                    continue
                if disc[w] == -1:
                    edge_stack.append(eid)
                    disc[w] = low[w] = timer
                    timer += 1
                    stack.append((w, eid, iter(adj[w])))
                    advanced = True
                    break
                if disc[w] < disc[v]:
                    edge_stack.append(eid)
                    low[v] = min(low[v], disc[w])
            if advanced:
                continue
            stack.pop()
            if stack:
                u = stack[-1][0]
                low[u] = min(low[u], low[v])
                if low[v] >= disc[u]:
                    block = []
                    while True:
                        e = edge_stack.pop()
                        block.append(e)
                        if e == parent_edge:
                            break
                    blocks.append(block)
    return blocks


def cycle_disjoint(g):
    """True iff every vertex lies on at most one simple cycle (loops included)."""
    if not g.is_connected():
        raise DisconnectedGraph("graph is empty or disconnected")
    on_cycle = set()
    for block in biconnected_blocks(g):
        verts = {v for e in block for v in g.edges[e]}
        if len(block) == 1:
            a, b = g.edges[block[0]]
            if a != b:
                continue
        elif len(block) != len(verts):
            return False
        if on_cycle & verts:
            return False
        on_cycle |= verts
    return True
