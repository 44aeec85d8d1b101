import itertools

import pytest
from hypothesis import given, settings, strategies as st
from sympy import Matrix
from sympy.matrices.normalforms import invariant_factors

from vamalg.errors import ZeroVector
from vamalg.intlin import (
    IntMatrix, Lattice, abelian_quotient, content_and_primitive, hnf, lattice_intersection, lattice_membership,
    left_kernel, rank, rational_solve, right_kernel, snf, solve_integer,
)


def matrices(max_rows=4, max_cols=4, bound=6):
    return st.integers(1, max_rows).flatmap(lambda r: st.integers(1, max_cols).flatmap(
        lambda c: st.lists(st.lists(st.integers(-bound, bound), min_size=c, max_size=c),
                           min_size=r, max_size=r).map(lambda rows: IntMatrix.from_rows(rows, c))))


def test_hnf_example():
    h, u = hnf(IntMatrix.from_rows([[2, 0], [0, 1], [1, 0]]))
    assert h.tolist() == [[1, 0], [0, 1], [0, 0]]
    assert u @ IntMatrix.from_rows([[2, 0], [0, 1], [1, 0]]) == h
    assert u.is_unimodular()


def test_snf_examples():
    assert snf(IntMatrix.from_rows([[6, 0], [0, 4]])).diagonal == (2, 12)
    assert snf(IntMatrix.from_rows([[0, 1, 2], [0, 0, 0], [0, 0, 0]])).diagonal[:3] == (1, 0, 0)


def test_solve_examples():
    assert solve_integer(IntMatrix.from_rows([[2]]), (3,)) is None
    x = solve_integer(IntMatrix.from_rows([[2, 1]]), (5,))
    assert 2 * x[0] + x[1] == 5


def test_lattice_examples():
    l1 = Lattice.span([(2, 0), (0, 3)], 2)
    l2 = Lattice.span([(1, 0), (0, 2)], 2)
    inter = lattice_intersection(Lattice.span([(1, 1)], 2), Lattice.span([(2, 0), (0, 2)], 2))
    assert inter.vectors() == [(2, 2)]
    assert lattice_intersection(l1, Lattice.span([(1, 0)], 2)).vectors() == [(2, 0)]
    assert lattice_membership(l2, (4, 2)) is not None
    assert (3, 0) not in l1


def test_content():
    assert content_and_primitive((-6, 9)) == (3, (-2, 3))
    with pytest.raises(ZeroVector):
        content_and_primitive((0, 0))


def test_rank():
    assert rank(IntMatrix.from_rows([[1, 2], [2, 4]])) == 1


@settings(max_examples=300, deadline=None)
@given(matrices())
def test_snf_decomposition(m):
    dec = snf(m)
    assert dec.U @ dec.D @ dec.V == m
    assert dec.S @ dec.U == IntMatrix.identity(m.rows)
    assert dec.T @ dec.V == IntMatrix.identity(m.cols)
    d = dec.diagonal
    for a, b in zip(d, d[1:]):
        assert (b == 0) or (a != 0 and b % a == 0)


@settings(max_examples=200, deadline=None)
@given(matrices())
def test_snf_matches_sympy(m):
    ours = [abs(x) for x in snf(m).diagonal if x]
    theirs = [abs(int(x)) for x in invariant_factors(Matrix(m.tolist())) if x]
    assert ours == theirs


@settings(max_examples=200, deadline=None)
@given(matrices())
def test_hnf_properties(m):
    h, u = hnf(m)
    assert u @ m == h
    assert u.is_unimodular()
    assert hnf(h)[0] == h
    assert rank(m) == Matrix(m.tolist()).rank()


@settings(max_examples=150, deadline=None)
@given(matrices(3, 3, 4), st.lists(st.integers(-6, 6), min_size=3, max_size=3))
def test_solve_against_brute_force(m, b):
    b = tuple(b[:m.rows])
    x = solve_integer(m, b)
    found = any(m @ y == b for y in itertools.product(range(-6, 7), repeat=m.cols))
    if found:
        assert x is not None
    if x is not None:
        assert m @ x == b


@settings(max_examples=100, deadline=None)
@given(matrices())
def test_kernels(m):
    for z in (left_kernel(m).row(i) for i in range(left_kernel(m).rows)):
        assert m.T @ z == (0,) * m.cols
    k = right_kernel(m)
    assert k.rows == m.cols - rank(m)
    for i in range(k.rows):
        assert m @ k.row(i) == (0,) * m.rows


def test_abelian_quotient_klein_presentation():
    # <a, b | b a b^-1 a> abelianizes to Z + Z/2
    q = abelian_quotient([(2, 0)], 2)
    assert q.free_rank == 1 and q.torsion == (2,)
    assert q.class_of((1, 0))[0] == (0,)
    assert q.is_infinite_order((0, 1))


def test_rational_solve():
    x = rational_solve(IntMatrix.from_rows([[2]]), (3,))
    assert x[0] * 2 == 3
    assert rational_solve(IntMatrix.from_rows([[1], [1]]), (1, 2)) is None
