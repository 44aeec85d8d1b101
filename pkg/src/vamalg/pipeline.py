"""Embedding an amalgam ``G1 *_{G0} G2`` of virtually abelian groups into ``Z wr S_m``.

The edge group ``G0 = M ⋊ <c>`` is virtually infinite cyclic.  The builder
produces a homomorphism ``nu`` on each factor that agrees on ``G0`` and is
injective on each factor:

1. rescale both lattices so that each meets ``G0`` in exactly ``<c^K>``;
2. form the finite edge quotient ``Q0 = G0 / <c^K>`` (order ``n``);
3. adjoin ``n``-th roots of the lattices, which splits the edge extension;
4. embed both root groups into monomial groups (Krasner-Kaloujnine);
5. conjugate the lifted copies of ``Q0`` into the top symmetric groups;
6. amalgamate the two monomial groups along the images of ``c^K``;
7. conjugate one side so that the two copies of ``Q0`` coincide.

:func:`verify_certificate` re-checks the result from the generator images
alone.
"""

from dataclasses import dataclass, field
from math import lcm

from .errors import (
    IncompatibleInputs, NotDivisible, StageError, UnsupportedFiniteEdge, ValidationError, VamalgError,
)
from .intlin import IntMatrix, rank, solve_integer, vneg, vscale
from .perm import DEFAULT_CAP, FiniteGroupTable
from .report import Report
from .vagroup import (
    INFINITE, CocycleExtension, EdgeDatum, ExtElement, ExtHom, edge_lattice_generator, rescale_lattice,
    validate_edge, validate_extension, validate_hom, is_injective,
)
from .wreath import (
    MonomialElement, WreathHom, conjugate_finite_into_top, kk_embed, amalgamating_embeddings, matching_conjugator,
    outer_flat, q_tops_act_freely, validate_wreath_hom, wreath_conj, wreath_hom_apply,
)


@dataclass(frozen=True)
class AmalgamSpec:
    g1: CocycleExtension
    g2: CocycleExtension
    edge1: EdgeDatum
    edge2: EdgeDatum
    m_pairing: tuple  # (i1, i2) index pairs into edge1.m_elements / edge2.m_elements

    def __post_init__(self):
        object.__setattr__(self, "m_pairing", tuple((int(a), int(b)) for a, b in self.m_pairing))

    def pair_map(self):
        return {self.edge1.m_elements[a]: self.edge2.m_elements[b] for a, b in self.m_pairing}


def make_amalgam(g1, g2, c1, c2, m1=None, m2=None, pairing=None):
    """Spec with edge ``M ⋊ <c>``; trivial ``M`` by default."""
    m1 = [g1.identity()] if m1 is None else list(m1)
    m2 = [g2.identity()] if m2 is None else list(m2)
    pairing = [(i, i) for i in range(len(m1))] if pairing is None else pairing
    return AmalgamSpec(g1, g2, EdgeDatum(g1, m1, c1), EdgeDatum(g2, m2, c2), pairing)


def check_edge_is_infinite(spec):
    for i, e in ((1, spec.edge1), (2, spec.edge2)):
        e.ambient.check(e.c)
        if e.ambient.element_order(e.c) != INFINITE:
            raise UnsupportedFiniteEdge(f"edge generator c{i} has finite order; finite edges are not handled")


def validate_spec(spec):
    rep = Report("amalgam")
    rep.extend(validate_extension(spec.g1), "factor1: ")
    rep.extend(validate_extension(spec.g2), "factor2: ")
    if not rep.ok:
        return rep
    rep.add("edge ambients match factors", spec.edge1.ambient == spec.g1 and spec.edge2.ambient == spec.g2)
    rep.extend(validate_edge(spec.edge1), "edge1: ")
    rep.extend(validate_edge(spec.edge2), "edge2: ")
    if not rep.ok:
        return rep
    n1, n2 = len(spec.edge1.m_elements), len(spec.edge2.m_elements)
    firsts = sorted(a for a, _ in spec.m_pairing)
    seconds = sorted(b for _, b in spec.m_pairing)
    bij = n1 == n2 and firsts == list(range(n1)) and seconds == list(range(n2))
    rep.add("pairing is a bijection", bij)
    if not bij:
        return rep
    g1, g2 = spec.g1, spec.g2
    pm = spec.pair_map()
    bad = next(((a, b) for a in pm for b in pm if pm[g1.mul(a, b)] != g2.mul(pm[a], pm[b])), None)
    rep.add("pairing is multiplicative", bad is None, witness=bad)
    c1, c2 = spec.edge1.c, spec.edge2.c
    bad = next((a for a in pm if pm[g1.conj(c1, a)] != g2.conj(c2, pm[a])), None)
    rep.add("pairing intertwines conjugation by c", bad is None, witness=bad)
    return rep


# stage 1: common lattice


@dataclass(frozen=True)
class RefinedSide:
    original: CocycleExtension
    refined: CocycleExtension
    rescaling: object
    scale: int
    m_elements: tuple
    c: ExtElement


def refinement_scalars(spec):
    """``(K, d1', d2')`` so that both rescaled lattices meet ``G0`` in ``<c^K>``.

    With ``z = m0 c^a0`` generating (lattice ∩ G0), ``d = p a0`` the order of
    c's Q-part and ``g`` the content of ``z``, the rescaled lattice ``d' Z^j``
    meets ``<z>`` in ``<z^(d'/g)>`` when ``g | d'``; choosing
    ``d' = p (K/d) g`` gives ``z^(K/a0) = c^K``.
    """
    gens = [edge_lattice_generator(spec.edge1), edge_lattice_generator(spec.edge2)]
    K = lcm(gens[0].d, gens[1].d)
    return K, tuple(z.p * (K // z.d) * z.content for z in gens)


def refine_to_common_lattice(spec, cap=DEFAULT_CAP):
    K, scales = refinement_scalars(spec)
    sides = []
    for g, e, d in ((spec.g1, spec.edge1, scales[0]), (spec.g2, spec.edge2, scales[1])):
        new, iso = rescale_lattice(g, d, cap=cap)
        ms = tuple(iso.forward(m) for m in e.m_elements)
        c = iso.forward(e.c)
        z = edge_lattice_generator(EdgeDatum(new, ms, c))
        if z.a0 != K or z.m0 != new.identity():
            raise IncompatibleInputs(f"refined lattice meets the edge in <c^{z.a0}>, expected <c^{K}>")
        sides.append(RefinedSide(g, new, iso, d, ms, c))
    return sides[0], sides[1], K


# stage 2: finite edge quotient and edge extension


@dataclass(frozen=True)
class EdgeQuotient:
    """``Q0 = G0 / <c^K>`` with representatives ``m c^a`` indexed ``m_idx * K + a``."""

    group: FiniteGroupTable
    K: int
    edge_ext: CocycleExtension
    inclusions: tuple  # ExtHom edge_ext -> refined factor, per side


def _reps(g, ms, c, K):
    powers = [g.power(c, a) for a in range(K)]
    return [g.mul(m, p) for m in ms for p in powers]


def build_edge_quotient(side1, side2, K, pairing):
    g1, g2 = side1.refined, side2.refined
    reps1 = _reps(g1, side1.m_elements, side1.c, K)
    m2 = [side2.m_elements[b] for _, b in sorted(pairing)]
    reps2 = _reps(g2, m2, side2.c, K)
    n = len(reps1)
    qidx = {}
    for x, r in enumerate(reps1):
        if r.q in qidx:
            raise IncompatibleInputs("edge representatives are not distinct modulo the lattice")
        qidx[r.q] = x
    table = []
    for r in reps1:
        row = []
        for s in reps1:
            p = g1.group.mul(r.q, s.q)
            if p not in qidx:
                raise IncompatibleInputs("edge representatives are not closed modulo the lattice")
            row.append(qidx[p])
        table.append(row)
    q0 = FiniteGroupTable.from_table(table, identity=qidx[g1.group.identity])
    problems = q0.check()
    if problems:
        raise IncompatibleInputs("; ".join(problems))
    pi1 = tuple(r.q for r in reps1)
    pi2 = tuple(r.q for r in reps2)
    if len(set(pi2)) != n:
        raise IncompatibleInputs("edge quotient does not embed into the second factor")

    # the lattice of G0 is generated by c^K; read off its action and cocycle from side 1
    ident = g1.group.identity
    w1 = g1.power(side1.c, K).v
    w2 = g2.power(side2.c, K).v

    def coeff(v, w):
        k = next(i for i, x in enumerate(w) if x)
        t = v[k] // w[k]
        if vscale(t, w) != tuple(v):
            raise IncompatibleInputs("edge relation leaves <c^K>")
        return t

    cK = g1.power(side1.c, K)
    action = []
    for r in reps1:
        y = g1.conj(r, cK)
        if y.q != ident:
            raise IncompatibleInputs("c^K is not normal in G0")
        action.append(IntMatrix.from_rows([[coeff(y.v, w1)]], 1))
    cocycle = []
    for x, r in enumerate(reps1):
        row = []
        for y, s in enumerate(reps1):
            u = g1.mul(g1.mul(r, s), g1.inv(reps1[table[x][y]]))
            if u.q != ident:
                raise IncompatibleInputs("edge cocycle leaves the lattice")
            row.append((coeff(u.v, w1),))
        cocycle.append(row)
    g0 = CocycleExtension(1, q0, action, cocycle, name="edge")
    phi1 = ExtHom(g0, g1, IntMatrix.from_columns([w1], g1.rank), pi1, tuple(r.v for r in reps1))
    phi2 = ExtHom(g0, g2, IntMatrix.from_columns([w2], g2.rank), pi2, tuple(r.v for r in reps2))
    return EdgeQuotient(q0, K, g0, (phi1, phi2))


# stage 3: roots


def adjoin_roots(g, n):
    """``(P_n, xi_n)``: same Q and action, cocycle ``n f``; ``xi = (n Id, id, 0)``."""
    if n < 1:
        raise ValueError("root index must be positive")
    if n == 1:
        return g, ExtHom.identity(g)
    cocycle = [[vscale(n, x) for x in row] for row in g.cocycle]
    p = CocycleExtension(g.rank, g.group, g.action, cocycle, name=f"{g.name}^(1/{n})" if g.name else "")
    xi = ExtHom(g, p, IntMatrix.scalar(g.rank, n), tuple(range(g.group.order)), ((0,) * g.rank,) * g.group.order)
    return p, xi


def split_root_group(p, n):
    """Section ``q -> (-c(q), q)`` of ``P_n -> Q`` that is a homomorphism.

    ``c(q) = (1/|Q|) sum_r f_P(q, r)``; the division is exact when ``|Q|`` divides ``n``.
    """
    order = p.group.order
    if n % order:
        raise NotDivisible(f"|Q| = {order} does not divide n = {n}")
    section = []
    for q in range(order):
        total = [0] * p.rank
        for r in range(order):
            total = [a + b for a, b in zip(total, p.cocycle[q][r])]
        if any(x % order for x in total):
            raise NotDivisible("cocycle sums are not divisible by |Q'|")
        section.append(ExtElement(vneg(tuple(x // order for x in total)), q))
    return tuple(section)


def extend_hom_to_roots(h, n, source_roots=None, target_roots=None):
    src = source_roots if source_roots is not None else adjoin_roots(h.source, n)[0]
    tgt = target_roots if target_roots is not None else adjoin_roots(h.target, n)[0]
    return ExtHom(src, tgt, h.lam, h.pi, tuple(vscale(n, t) for t in h.tau))


# certificate


@dataclass
class EmbeddingCertificate:
    degree: int
    images_g1: WreathHom
    images_g2: WreathHom
    provenance: dict
    verification: Report = field(default=None)


def _stage(name, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except StageError:
        raise
    except ValidationError as exc:
        raise StageError(name, str(exc)) from exc
    except VamalgError as exc:
        raise StageError(name, f"{type(exc).__name__}: {exc}") from exc


def _require(name, report):
    if not report.ok:
        first = report.failures[0]
        raise StageError(name, f"{report.title}: {first.name} failed {first.detail}".rstrip())


def _compose_on_original(side, xi, eta, beta, sigma):
    """Generator images of ``nu`` on the original presentation of one factor."""
    g = side.original

    def nu(a):
        b = side.rescaling.forward(a)
        b = ExtElement(xi.lam @ b.v, b.q)  # xi has zero translation part
        x = beta(wreath_hom_apply(eta, b))
        if sigma is not None:
            x = wreath_conj(MonomialElement.of_top(sigma), x)
        return x

    basis = tuple(nu(g.element(tuple(1 if i == k else 0 for i in range(g.rank)))) for k in range(g.rank))
    qimgs = tuple(nu(ExtElement((0,) * g.rank, q)) for q in range(g.group.order))
    return WreathHom(g, beta.target_degree, basis, qimgs)


def build_embedding_certificate(spec, cap=DEFAULT_CAP):
    """Run the whole construction and return a verified :class:`EmbeddingCertificate`."""
    check_edge_is_infinite(spec)
    validate_spec(spec).require()

    side1, side2, K = _stage("refine", refine_to_common_lattice, spec, cap=cap)
    for s in (side1, side2):
        _require("refine", validate_extension(s.refined))

    eq = _stage("edge-quotient", build_edge_quotient, side1, side2, K, spec.m_pairing)
    _require("edge-quotient", validate_extension(eq.edge_ext))
    for phi in eq.inclusions:
        _require("edge-quotient", validate_hom(phi))
        if not is_injective(phi):
            raise StageError("edge-quotient", "edge inclusion is not injective")
    n = eq.group.order

    roots = []
    for s, phi in zip((side1, side2), eq.inclusions):
        p, xi = adjoin_roots(s.refined, n)
        _require("roots", validate_hom(xi))
        roots.append((p, xi))
    p0, _ = adjoin_roots(eq.edge_ext, n)
    ext_phis = []
    for (p, _), phi in zip(roots, eq.inclusions):
        h = extend_hom_to_roots(phi, n, p0, p)
        _require("roots", validate_hom(h))
        ext_phis.append(h)
    section = _stage("split", split_root_group, p0, n)
    Q0 = eq.group
    for q in range(n):
        for r in range(n):
            if p0.mul(section[q], section[r]) != section[Q0.mul(q, r)]:
                raise StageError("split", f"section is not multiplicative at {(q, r)}")

    etas, hvecs, tops, cvecs = [], [], [], []
    for (p, _), h in zip(roots, ext_phis):
        eta = _stage("kk-embed", kk_embed, p)
        _require("kk-embed", validate_wreath_hom(eta))
        lifted = [wreath_hom_apply(eta, h(section[q])) for q in range(n)]
        hv = _stage("conjugate", conjugate_finite_into_top, lifted)
        conj = MonomialElement.of_base(vneg(hv))
        eta = eta.conjugated(conj)
        gam = [wreath_hom_apply(eta, h(section[q])) for q in range(n)]
        if any(any(x.base) for x in gam):
            raise StageError("conjugate", "lifted edge quotient is not in the top group")
        if not q_tops_act_freely(WreathHom(p0, eta.degree, (), gam)):
            raise StageError("conjugate", "lifted edge quotient does not act freely")
        cimg = wreath_hom_apply(eta, h(ExtElement((1,), Q0.identity)))
        if not cimg.top.is_identity() or not any(cimg.base):
            raise StageError("conjugate", "edge lattice generator does not map to a nonzero base element")
        etas.append(eta)
        hvecs.append(hv)
        tops.append([x.top for x in gam])
        cvecs.append(cimg.base)

    k, l = etas[0].degree, etas[1].degree
    beta1, beta2 = _stage("amalgamate", amalgamating_embeddings, k, l, cvecs[0], cvecs[1])
    f = outer_flat(cvecs[0], cvecs[1])
    if beta1(MonomialElement.of_base(cvecs[0])).base != f or beta2(MonomialElement.of_base(cvecs[1])).base != f:
        raise StageError("amalgamate", "edge generator images disagree")
    gam1 = [beta1(MonomialElement.of_top(s)).top for s in tops[0]]
    gam2 = [beta2(MonomialElement.of_top(s)).top for s in tops[1]]
    sigma = _stage("conjugator", matching_conjugator, f, gam1, gam2, Q0)

    nu1 = _compose_on_original(side1, roots[0][1], etas[0], beta1, sigma)
    nu2 = _compose_on_original(side2, roots[1][1], etas[1], beta2, None)
    provenance = {
        "refinement_scalars": [side1.scale, side2.scale],
        "common_power": K,
        "root_index": n,
        "intermediate_degrees": [k, l],
        "refined_quotient_orders": [side1.refined.group.order, side2.refined.group.order],
        "conjugators": [list(hvecs[0]), list(hvecs[1])],
        "sigma": list(sigma.images),
    }
    if k * l != nu1.degree:
        raise StageError("assemble", "degree bookkeeping mismatch")
    cert = EmbeddingCertificate(k * l, nu1, nu2, provenance)
    cert.verification = verify_certificate(spec, cert)
    if not cert.verification.ok:
        raise StageError("verify", str(cert.verification))
    return cert


# independent verification


def refined_images(images, scale, cap=DEFAULT_CAP):
    """Generator images of the same map on the presentation over ``scale * Z^j``."""
    g = images.source
    new, iso = rescale_lattice(g, scale, cap=cap)
    basis = tuple(wreath_hom_apply(images, iso.backward(new.element(tuple(1 if i == k else 0 for i in range(g.rank)))))
                  for k in range(g.rank))
    qimgs = tuple(wreath_hom_apply(images, iso.backward(ExtElement((0,) * g.rank, q))) for q in range(new.group.order))
    return WreathHom(new, images.degree, basis, qimgs)


def _injectivity_witness(h):
    """``None`` if injective, else a short description of the failure."""
    if any(not b.top.is_identity() for b in h.basis_images):
        return "lattice basis images are not pure base elements"
    lam = h.base_matrix()
    r = rank(lam)
    if r < h.source.rank:
        return f"base matrix has rank {r} < {h.source.rank}"
    g = h.source
    for q in range(g.group.order):
        x = h.q_images[q]
        if q != g.group.identity and x.top.is_identity():
            v = solve_integer(lam, vneg(x.base))
            if v is not None:
                return f"kernel element (v={list(v)}, q={q})"
    return None


def verify_certificate(spec, cert, cap=DEFAULT_CAP):
    rep = Report("embedding certificate")
    m = cert.degree
    scales = cert.provenance.get("refinement_scalars", [1, 1])
    ok_deg = all(x.degree == m for h in (cert.images_g1, cert.images_g2) for x in h.basis_images + h.q_images)
    rep.add("degrees", ok_deg, "" if ok_deg else "image degrees differ from the certificate degree")
    if not ok_deg:
        return rep
    for i, (g, h, d) in enumerate(((spec.g1, cert.images_g1, scales[0]), (spec.g2, cert.images_g2, scales[1])), 1):
        shape_ok = len(h.basis_images) == g.rank and len(h.q_images) == g.group.order
        rep.add(f"factor{i}: shapes", shape_ok)
        if not shape_ok:
            continue
        h = WreathHom(g, m, h.basis_images, h.q_images)
        rep.extend(validate_wreath_hom(h), f"factor{i}: relations: ")
        try:
            hr = refined_images(h, int(d), cap=cap)
        except VamalgError as exc:
            rep.add(f"factor{i}: refined presentation", False, str(exc))
            continue
        rep.extend(validate_wreath_hom(hr), f"factor{i}: refined relations: ")
        why = _injectivity_witness(hr)
        rep.add(f"factor{i}: injective", why is None, why or "")
    if rep.failed("factor1: shapes") or rep.failed("factor2: shapes"):
        return rep
    h1 = WreathHom(spec.g1, m, cert.images_g1.basis_images, cert.images_g1.q_images)
    h2 = WreathHom(spec.g2, m, cert.images_g2.basis_images, cert.images_g2.q_images)
    same = wreath_hom_apply(h1, spec.edge1.c) == wreath_hom_apply(h2, spec.edge2.c)
    rep.add("edge: c1 and c2 have equal images", same)
    bad = next(((a, b) for a, b in spec.m_pairing
                if wreath_hom_apply(h1, spec.edge1.m_elements[a]) != wreath_hom_apply(h2, spec.edge2.m_elements[b])),
               None)
    rep.add("edge: paired M elements have equal images", bad is None, witness=bad)
    return rep
