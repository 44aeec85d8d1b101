"""Acceptance criteria, one test each; the summary prints a PASS/FAIL line per criterion."""

import ast
import itertools
import json
import os
import random
import subprocess
import sys
import time

import pytest
from sympy import Matrix
from sympy.matrices.normalforms import invariant_factors

from conftest import brute_cycle_disjoint, brute_force_conjugators, connected_multigraphs, random_free_pair
from vamalg import fixtures as fx
from vamalg.fiber import (
    FbcElement, UndirectedMultigraph, _factor_data, decide_free_by_cyclic, cycle_disjoint, edge_character, fbc_abelianization,
    fbc_relations, glue_characters, decide_fibering,
)
from vamalg.intlin import IntMatrix, solve_integer
from vamalg.perm import FiniteGroupTable, Permutation, acts_freely
from vamalg.pipeline import adjoin_roots, build_embedding_certificate, split_root_group, verify_certificate
from vamalg.vagroup import CocycleExtension, ExtElement, is_injective, rescale_lattice, validate_extension, validate_hom
from vamalg.wreath import (
    MonomialElement, kk_embed, amalgamating_embeddings, matching_conjugator, outer_flat, q_tops_act_freely,
    validate_wreath_hom, wreath_hom_is_injective,
)

FIXTURES = os.path.join(os.path.dirname(__file__), "..", "fixtures")
E = ExtElement


def base_extensions():
    return [fx.klein_bottle(), fx.infinite_dihedral(), fx.free_abelian(2)]


def rescaled_extensions():
    return [rescale_lattice(fx.klein_bottle(), 2)[0], rescale_lattice(fx.infinite_dihedral(), 3)[0],
            rescale_lattice(fx.free_abelian(2), 2)[0]]


def _ext(g, table=None, action=None, cocycle=None):
    group = g.group if table is None else FiniteGroupTable.from_table(table)
    return CocycleExtension(g.rank, group, action or g.action, cocycle or g.cocycle)


@pytest.mark.criterion(1, "cocycle validation accepts fixtures and rejects 5 corrupted inputs with witnesses (< 1 s)")
def test_criterion_1_cocycle_validation():
    t0 = time.perf_counter()
    for g in base_extensions() + rescaled_extensions():
        assert validate_extension(g).ok, g

    klein = fx.klein_bottle()

    # (a) non-associative quotient table: the smallest non-associative loop, order 5
    loop = [[0, 1, 2, 3, 4], [1, 0, 3, 4, 2], [2, 4, 0, 1, 3], [3, 2, 4, 0, 1], [4, 3, 1, 2, 0]]
    bad = CocycleExtension.build(1, FiniteGroupTable.from_table(loop), [IntMatrix.identity(1)] * 5)
    rep = validate_extension(bad)
    assert rep.failed("group table")
    a, b, c = ast.literal_eval(rep.failures[0].detail.split(" at ", 1)[1])
    assert loop[loop[a][b]][c] != loop[a][loop[b][c]]

    # (b) cocycle identity broken: the extension product itself is non-associative at the witness
    f = [list(r) for r in klein.cocycle]
    f[1][1] = (1, 1)
    bad = _ext(klein, cocycle=f)
    rep = validate_extension(bad)
    assert rep.failed("cocycle identity")
    w = next(ch.witness for ch in rep.failures if ch.name == "cocycle identity")
    x, y, s = (E((0, 0), w[k]) for k in "qrs")
    assert bad.mul(bad.mul(x, y), s) != bad.mul(x, bad.mul(y, s))

    # (c) non-unimodular action
    bad = _ext(klein, action=[IntMatrix.identity(2), IntMatrix.from_rows([[-1, 0], [0, 2]])])
    rep = validate_extension(bad)
    assert rep.failed("action unimodular")
    q = next(ch.witness for ch in rep.failures if ch.name == "action unimodular")["q"]
    assert abs(bad.action[q].det()) != 1

    # (d) action not a homomorphism (rho(s)^2 != 1), though each matrix is unimodular
    bad = _ext(klein, action=[IntMatrix.identity(2), IntMatrix.from_rows([[1, 1], [0, 1]])])
    rep = validate_extension(bad)
    assert rep.failed("action is a homomorphism") and not rep.failed("action unimodular")
    w = next(ch.witness for ch in rep.failures if ch.name == "action is a homomorphism")
    assert bad.action[w["q"]] @ bad.action[w["r"]] != bad.action[bad.group.mul(w["q"], w["r"])]

    # (e) unnormalized cocycle
    f = [list(r) for r in klein.cocycle]
    f[0][1] = (0, 3)
    bad = _ext(klein, cocycle=f)
    rep = validate_extension(bad)
    assert rep.failed("cocycle normalized")
    q = next(ch.witness for ch in rep.failures if ch.name == "cocycle normalized")["q"]
    assert any(bad.cocycle[0][q]) or any(bad.cocycle[q][0])

    assert time.perf_counter() - t0 < 1.0


def _coset_index(lam, n, j):
    """Index of ``lam Z^j`` in ``Z^j``, counted by coset enumeration over ``[0, n)^j``.

    Checks that the box representatives are pairwise inequivalent and that
    every vector of the doubled box is equivalent to one of them.
    """
    reps = list(itertools.product(range(n), repeat=j))

    def same(u, v):
        return solve_integer(lam, tuple(a - b for a, b in zip(u, v))) is not None

    for u, v in itertools.combinations(reps, 2):
        assert not same(u, v)
    for w in itertools.product(range(-n, 2 * n), repeat=j):
        assert any(same(w, r) for r in reps)
    return len(reps)


@pytest.mark.criterion(2, "root adjunction: section multiplicative over QxQ, xi_n injective of index n^j")
def test_criterion_2_roots_and_splitting():
    groups = [fx.klein_bottle(), fx.infinite_dihedral(), fx.z_times_c2(2), fx.dinf_times_c2(),
              rescale_lattice(fx.klein_bottle(), 2)[0]]
    for g in groups:
        n, j = g.group.order, g.rank
        assert n > 1
        p, xi = adjoin_roots(g, n)
        assert validate_extension(p).ok
        s = split_root_group(p, n)
        assert s[g.group.identity] == p.identity()
        for q, r in itertools.product(range(n), repeat=2):
            assert p.mul(s[q], s[r]) == s[g.group.mul(q, r)]
        assert validate_hom(xi).ok and is_injective(xi)
        assert _coset_index(xi.lam, n, j) == n ** j


@pytest.mark.criterion(3, "KK embedding: D_inf frozen images; invariants, injectivity and free Q-image on all fixtures")
def test_criterion_3_kk_embedding():
    h = kk_embed(fx.infinite_dihedral())
    assert h.basis_images == (MonomialElement((1, -1), Permutation.identity(2)),)
    assert h.q_images[1] == MonomialElement((0, 0), Permutation.from_cycles(2, [(1, 2)]))
    for g in base_extensions() + rescaled_extensions() + [fx.z_times_c2(1), fx.dinf_times_c2()]:
        t0 = time.perf_counter()
        h = kk_embed(g)
        assert validate_wreath_hom(h).ok
        assert wreath_hom_is_injective(h)
        assert q_tops_act_freely(h) and acts_freely([x.top for x in h.q_images])
        assert time.perf_counter() - t0 < 1.0


def _random_monomial(rng, m, bound=5):
    top = list(range(m))
    rng.shuffle(top)
    return MonomialElement(tuple(rng.randint(-bound, bound) for _ in range(m)), Permutation(tuple(top)))


def _random_nonzero(rng, k):
    while True:
        v = tuple(rng.randint(-5, 5) for _ in range(k))
        if any(v):
            return v


@pytest.mark.criterion(4, "amalgamating embeddings: 100 random pairs agree on the outer product and are homomorphisms")
def test_criterion_4_amalgamating_embeddings():
    rng = random.Random(4)
    for _ in range(100):
        k, l = rng.randint(1, 4), rng.randint(1, 4)
        c1, c2 = _random_nonzero(rng, k), _random_nonzero(rng, l)
        b1, b2 = amalgamating_embeddings(k, l, c1, c2)
        flat = tuple(x * y for x in c1 for y in c2)
        assert b1(MonomialElement.of_base(c1)).base == flat == b2(MonomialElement.of_base(c2)).base
        assert outer_flat(c1, c2) == flat
        for beta, n in ((b1, k), (b2, l)):
            for _ in range(20):
                x, y = _random_monomial(rng, n), _random_monomial(rng, n)
                assert beta(x * y) == beta(x) * beta(y)


@pytest.mark.criterion(5, "matching conjugator: 50 random free-action instances pass postconditions, brute force agrees")
def test_criterion_5_matching_conjugator():
    rng = random.Random(5)
    groups = [fx.C2, fx.cyclic_group(3), fx.cyclic_group(4), fx.V4]
    brute_checked = 0
    for _ in range(50):
        group = rng.choice(groups)
        m = group.order * rng.randint(1, 12 // group.order)
        f, g1, g2 = random_free_pair(rng, group, m)
        s = matching_conjugator(f, g1, g2, group)
        assert s.act(f) == f
        si = s.inverse()
        assert all(s * a * si == b for a, b in zip(g1, g2))
        if m <= 7:
            sols = brute_force_conjugators(f, g1, g2)
            assert sols and s in sols
            brute_checked += 1
    assert brute_checked >= 10


@pytest.mark.criterion(6, "end-to-end: certificates on the shipped amalgams verify independently (< 30 s total)")
def test_criterion_6_end_to_end():
    t0 = time.perf_counter()
    specs = fx.amalgam_fixtures()
    for name in ("klein_z2_lattice_edge", "klein_z2_b_edge", "dinf_dinf_translations", "zc2_z2c2_finite_part"):
        spec = specs[name]
        cert = build_embedding_certificate(spec)
        rep = verify_certificate(spec, cert)
        assert rep.ok, str(rep)
        for side in ("factor1", "factor2"):
            assert not rep.failed(f"{side}: relations") and not rep.failed(f"{side}: refined relations")
            assert any(c.name == f"{side}: injective" and c.passed for c in rep.checks)
        assert any(c.name == "edge: c1 and c2 have equal images" and c.passed for c in rep.checks)
    cert = build_embedding_certificate(specs["klein_z2_b_edge"])
    assert cert.provenance["common_power"] == 2 and cert.provenance["root_index"] == 2
    assert time.perf_counter() - t0 < 30.0


def _cli(*args):
    return subprocess.run([sys.executable, "-m", "vamalg", *args], capture_output=True, text=True)


@pytest.mark.criterion(7, "negative gating: rank-2 edge exits 3, finite edge exits 4, no certificate emitted")
def test_criterion_7_negative_gating(tmp_path):
    for name, code in (("embed_negative_rank_two_edge.json", 3), ("embed_negative_finite_edge.json", 4)):
        out = tmp_path / f"{name}.out"
        r = _cli("embed", os.path.join(FIXTURES, name), "-o", str(out))
        assert r.returncode == code
        doc = json.loads(out.read_text())
        assert doc["kind"] == "error" and "images_g1" not in doc["payload"]


@pytest.mark.criterion(8, "fibering: Gersten abelianization, decisions on fixtures, glued witness with value n1*n2 = 6")
def test_criterion_8_fibering():
    t0 = time.perf_counter()
    g = fx.gersten()
    ab = fbc_abelianization(g)
    assert ab.free_rank == 3 and ab.torsion == ()
    rels = Matrix(fbc_relations(g))
    factors = [int(x) for x in invariant_factors(rels) if x]
    assert all(x == 1 for x in factors) and 4 - len(factors) == 3  # SNF oracle: Z^3
    assert not any(ab.class_of(FbcElement((1,), 0))[0])

    assert decide_free_by_cyclic(*fx.fbc_fixtures()["gersten_gersten_b"]).free_by_cyclic
    assert not decide_free_by_cyclic(*fx.fbc_fixtures()["gersten_f2xz_commutator"]).free_by_cyclic
    assert decide_fibering(fx.fiber_fixtures()["gersten_f2xz_center"]).fibered
    assert not decide_fibering(fx.fiber_fixtures()["gersten_f2xz_commutator"]).fibered

    # scaled test: edge b^2 in Gersten (value 2) glued to z^3 in F2 x Z (value 3)
    f2z = fx.f2_times_z()
    _, e1, rels1, _ = _factor_data(g, (2, 2))
    _, e2, rels2, _ = _factor_data(f2z, (3, 3, 3))
    chi1 = edge_character(g, (2,))
    assert sum(x * y for x, y in zip(chi1, _factor_data(g, (2,))[1])) == 1
    chi2 = edge_character(f2z, (3, 3, 3))
    n1 = sum(x * y for x, y in zip(chi1, e1))
    n2 = sum(x * y for x, y in zip(chi2, e2))
    assert (n1, n2) == (2, 3)
    glued = glue_characters(chi1, n1, chi2, n2, rels1, rels2, e1, e2)
    assert glued.edge_value == 6 and glued.transcript.ok
    for chi, rels, e in ((glued.factor1, rels1, e1), (glued.factor2, rels2, e2)):
        assert all(sum(x * y for x, y in zip(chi, r)) == 0 for r in rels)
        assert sum(x * y for x, y in zip(chi, e)) == n1 * n2
    assert time.perf_counter() - t0 < 1.0


@pytest.mark.criterion(9, "cycle_disjoint agrees with simple-cycle enumeration on all connected multigraphs with <= 6 edges")
def test_criterion_9_cycle_disjoint():
    graphs = connected_multigraphs(6)
    assert (1, ((0, 0), (0, 0))) in graphs
    for n, edges in graphs:
        assert cycle_disjoint(UndirectedMultigraph(n, edges)) == brute_cycle_disjoint(n, edges), (n, edges)
    assert not cycle_disjoint(UndirectedMultigraph(1, ((0, 0), (0, 0))))


@pytest.mark.criterion(10, "determinism: two embed runs produce byte-identical certificates")
def test_criterion_10_determinism():
    for name in sorted(os.listdir(FIXTURES)):
        if not name.startswith("embed_") or "negative" in name:
            continue
        path = os.path.join(FIXTURES, name)
        a, b = _cli("embed", path), _cli("embed", path)
        assert a.returncode == b.returncode == 0
        assert a.stdout == b.stdout and json.loads(a.stdout)["kind"] == "certificate"
