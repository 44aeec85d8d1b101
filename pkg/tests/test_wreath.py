import random

import pytest
from hypothesis import given, settings, strategies as st

from conftest import all_fixture_extensions, brute_force_conjugators, random_element, random_free_pair
from vamalg import fixtures as fx
from vamalg.errors import IncompatibleInputs, ZeroVector
from vamalg.perm import Permutation, acts_freely, row_permutation
from vamalg.wreath import (
    MonomialElement, conjugate_finite_into_top, kk_embed, amalgamating_embeddings, matching_conjugator, outer_flat,
    q_tops_act_freely, validate_wreath_hom, wreath_conj, wreath_hom_is_injective, wreath_inv, wreath_mul,
    wreath_power,
)

P = Permutation.from_cycles
M = MonomialElement


def monomials(m, bound=5):
    return st.tuples(st.lists(st.integers(-bound, bound), min_size=m, max_size=m),
                     st.permutations(list(range(m)))).map(lambda t: M(tuple(t[0]), Permutation(tuple(t[1]))))


@given(monomials(5), monomials(5), monomials(5))
def test_wreath_group_laws(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert (a * wreath_inv(a)).is_identity()
    assert wreath_power(a, 3) == a * a * a
    assert wreath_power(a, -2) == wreath_inv(a * a)


def test_product_convention():
    a = M((1, 0), P(2, [(1, 2)]))
    b = M((5, 7), Permutation.identity(2))
    # (s.v)(x) = v(s^-1 x)
    assert (a * b).base == (8, 5)


def test_kk_dinf_frozen():
    h = kk_embed(fx.infinite_dihedral())
    assert h.degree == 2
    assert h.basis_images[0] == M((1, -1), Permutation.identity(2))
    assert h.q_images[1] == M((0, 0), P(2, [(1, 2)]))


@pytest.mark.parametrize("g", all_fixture_extensions(), ids=lambda g: g.name or repr(g))
def test_kk_invariants(g, rng):
    h = kk_embed(g)
    assert h.degree == g.rank * g.group.order
    assert validate_wreath_hom(h).ok
    assert wreath_hom_is_injective(h)
    assert q_tops_act_freely(h)
    for _ in range(40):
        a, b = random_element(g, rng, 3), random_element(g, rng, 3)
        assert h(g.mul(a, b)) == h(a) * h(b)


def test_kk_injective_by_search():
    g = fx.klein_bottle()
    h = kk_embed(g)
    seen = {}
    for a in g.elements_in_box(2):
        img = h(a)
        assert img not in seen
        seen[img] = a


def test_corrupted_wreath_hom_fails():
    h = kk_embed(fx.klein_bottle())
    bad = type(h)(h.source, h.degree, h.basis_images, (h.q_images[0], M((0,) * 4, h.q_images[1].top)))
    assert validate_wreath_hom(bad).failed("cocycle relations")


def test_conjugate_finite_into_top_example():
    x = M((1, -1), P(2, [(1, 2)]))
    h = conjugate_finite_into_top([M.identity(2), x])
    assert tuple(h) == (1, 0)
    assert wreath_conj(M.of_base(tuple(-v for v in h)), x) == M.of_top(x.top)


def test_conjugate_rejects_non_subgroup():
    with pytest.raises(IncompatibleInputs):
        conjugate_finite_into_top([M.identity(2), M((1, 0), P(2, [(1, 2)]))])


@pytest.mark.parametrize("g", [fx.infinite_dihedral(), fx.dinf_times_c2(), fx.z_times_c2(2)], ids=str)
def test_conjugate_split_images(g):
    # the finite subgroup {(0,q)} of a split extension conjugates into the top group
    h = kk_embed(g)
    sub = [x for x in h.q_images]
    c = conjugate_finite_into_top(sub)
    conj = M.of_base(tuple(-v for v in c))
    for x in sub:
        assert not any(wreath_conj(conj, x).base)


def test_amalgamating_example():
    b1, b2 = amalgamating_embeddings(2, 2, (1, 2), (3, 1))
    assert b1(M.of_base((1, 2))).base == outer_flat((1, 2), (3, 1)) == (3, 1, 6, 2)
    assert b2(M.of_base((3, 1))).base == (3, 1, 6, 2)
    assert b1(M.of_top(P(2, [(1, 2)]))).top == P(4, [(1, 3), (2, 4)])
    assert b2(M.of_top(P(2, [(1, 2)]))).top == P(4, [(1, 2), (3, 4)])


def test_amalgamating_rejects_zero():
    with pytest.raises(ZeroVector):
        amalgamating_embeddings(2, 1, (0, 0), (1,))


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_amalgamating_hom_law(data):
    k, l = data.draw(st.integers(1, 4)), data.draw(st.integers(1, 4))
    vec = lambda n: st.lists(st.integers(-5, 5), min_size=n, max_size=n).filter(any)
    c1, c2 = data.draw(vec(k)), data.draw(vec(l))
    b1, b2 = amalgamating_embeddings(k, l, c1, c2)
    assert b1(M.of_base(c1)) == b2(M.of_base(c2)) == M.of_base(outer_flat(c1, c2))
    for beta, n in ((b1, k), (b2, l)):
        x, y = data.draw(monomials(n)), data.draw(monomials(n))
        assert beta(x * y) == beta(x) * beta(y)
    # the images of the two top groups commute
    s = data.draw(st.permutations(list(range(k))))
    t = data.draw(st.permutations(list(range(l))))
    u = b1(M.of_top(Permutation(tuple(s)))).top
    w = b2(M.of_top(Permutation(tuple(t)))).top
    assert u * w == w * u


def test_matching_worked_examples():
    c2 = fx.C2
    # f constant, two different free C2 actions on 4 points
    f = (1, 1, 1, 1)
    g1 = [Permutation.identity(4), P(4, [(1, 2), (3, 4)])]
    g2 = [Permutation.identity(4), P(4, [(1, 3), (2, 4)])]
    s = matching_conjugator(f, g1, g2, c2)
    assert s * g1[1] * s.inverse() == g2[1]
    # sign-flipping action: f = (1, -1) with s swapping the two points
    f = (1, -1)
    g = [Permutation.identity(2), P(2, [(1, 2)])]
    s = matching_conjugator(f, g, g, c2)
    assert s.act(f) == f and s * g[1] * s.inverse() == g[1]


def test_matching_rejects_mismatched_levels():
    f = (1, 1, 2, 2)
    g1 = [Permutation.identity(4), P(4, [(1, 2), (3, 4)])]
    g2 = [Permutation.identity(4), P(4, [(1, 3), (2, 4)])]
    with pytest.raises(IncompatibleInputs):
        matching_conjugator(f, g1, g2, fx.C2)


def test_matching_rejects_non_free():
    f = (0, 0, 0)
    g = [Permutation.identity(3), P(3, [(1, 2)])]
    with pytest.raises(IncompatibleInputs):
        matching_conjugator(f, g, g, fx.C2)


GROUPS = [fx.C2, fx.cyclic_group(3), fx.cyclic_group(4), fx.V4]


@pytest.mark.parametrize("seed", range(25))
def test_matching_random_against_brute_force(seed):
    rng = random.Random(seed)
    group = rng.choice(GROUPS)
    m = group.order * rng.randint(1, 7 // group.order)
    f, g1, g2 = random_free_pair(rng, group, m)
    assert acts_freely(g1) and acts_freely(g2)
    s = matching_conjugator(f, g1, g2, group)
    assert s.act(f) == f
    assert all(s * a * s.inverse() == b for a, b in zip(g1, g2))
    assert s in brute_force_conjugators(f, g1, g2)


@pytest.mark.parametrize("seed", range(10))
def test_matching_negative_against_brute_force(seed):
    rng = random.Random(1000 + seed)
    group = rng.choice(GROUPS[:2])
    m = group.order * rng.randint(1, 7 // group.order)
    f, g1, g2 = random_free_pair(rng, group, m, matching=False)
    assert brute_force_conjugators(f, g1, g2) == []
    with pytest.raises(IncompatibleInputs):
        matching_conjugator(f, g1, g2, group)


def test_row_permutation_is_beta_top():
    b1, _ = amalgamating_embeddings(3, 2, (1, 1, 1), (1, 2))
    s = P(3, [(1, 2, 3)])
    assert b1(M.of_top(s)).top == row_permutation(s, 2)
