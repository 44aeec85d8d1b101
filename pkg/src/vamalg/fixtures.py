"""Named groups and the shipped corpus of job documents."""

import os

from .fiber import FiberAmalgam, FreeByCyclic, UndirectedMultigraph, commutator
from .intlin import IntMatrix
from .perm import FiniteGroupTable
from .pipeline import make_amalgam
from .serialize import (
    amalgam_to_json, dumps, extension_to_json, fbc_amalgam_to_json, fbc_to_json, fiber_amalgam_to_json,
    graph_to_json, make_document,
)
from .vagroup import CocycleExtension, ExtElement

C2 = FiniteGroupTable.from_table([[0, 1], [1, 0]])
V4 = FiniteGroupTable.from_table([[0, 1, 2, 3], [1, 0, 3, 2], [2, 3, 0, 1], [3, 2, 1, 0]])


def cyclic_group(n):
    return FiniteGroupTable.from_table([[(a + b) % n for b in range(n)] for a in range(n)])


def klein_bottle():
    """``<a, b | b a b^-1 = a^-1>`` over the lattice ``<a, b^2>``; ``b = ((0, 0), s)``."""
    return CocycleExtension.build(2, C2, [IntMatrix.identity(2), IntMatrix.from_rows([[-1, 0], [0, 1]])],
                                  {(1, 1): (0, 1)}, name="klein")


def infinite_dihedral():
    return CocycleExtension.build(1, C2, [IntMatrix.identity(1), IntMatrix.from_rows([[-1]])], name="dinf")


def free_abelian(j):
    return CocycleExtension.free_abelian(j, name=f"z{j}")


def z_times_c2(j=1):
    return CocycleExtension.build(j, C2, [IntMatrix.identity(j)] * 2, name=f"z{j}xc2")


def dinf_times_c2():
    """``D_inf x C2`` with ``Q = {1, s, t, st}``; ``s`` reflects."""
    neg = IntMatrix.from_rows([[-1]])
    return CocycleExtension.build(1, V4, [IntMatrix.identity(1), neg, IntMatrix.identity(1), neg], name="dinfxc2")


def lattice_with_finite_action(matrix, order, name=""):
    """``Z^2 ⋊ <x>`` for a finite-order matrix ``x`` of the given order."""
    Q = cyclic_group(order)
    acts, m = [], IntMatrix.identity(2)
    for _ in range(order):
        acts.append(m)
        m = m @ matrix
    return CocycleExtension.build(2, Q, acts, name=name)


def gersten():
    """``F(a, b, c) ⋊ Z`` with ``a -> a, b -> b a, c -> c a^2``."""
    return FreeByCyclic(3, ((1,), (2, 1), (3, 1, 1)), ((1,), (2, -1), (3, -1, -1)))


def f2_times_z():
    return FreeByCyclic(2, ((1,), (2,)), ((1,), (2,)))


E = ExtElement


def amalgam_fixtures():
    K, D, Z2 = klein_bottle(), infinite_dihedral(), free_abelian(2)
    zc2, z2c2 = z_times_c2(1), z_times_c2(2)
    return {
        "klein_z2_lattice_edge": make_amalgam(K, Z2, E((1, 0), 0), E((1, 0), 0)),
        "klein_z2_b_edge": make_amalgam(K, Z2, E((0, 0), 1), E((1, 0), 0)),
        "dinf_dinf_translations": make_amalgam(D, D, E((1,), 0), E((1,), 0)),
        "zc2_z2c2_finite_part": make_amalgam(zc2, z2c2, E((1,), 1), E((1, 0), 0),
                                             [E((0,), 0), E((0,), 1)], [E((0, 0), 0), E((0, 0), 1)]),
    }


def rank_two_edge():
    """Two extensions of ``Z^2`` glued along all of ``Z^2`` (edge not virtually cyclic)."""
    x = IntMatrix.from_rows([[1, 1], [0, -1]])
    y = IntMatrix.from_rows([[-1, 0], [0, 1]])
    g1 = lattice_with_finite_action(x, 2, "z2_x")
    g2 = lattice_with_finite_action(y, 2, "z2_y")
    m = [E((0, 0), 0), E((0, 1), 0)]
    return make_amalgam(g1, g2, E((1, 0), 0), E((1, 0), 0), m, list(m))


def finite_edge():
    D = infinite_dihedral()
    return make_amalgam(D, D, E((0,), 1), E((0,), 1))


def fiber_fixtures():
    G, F = gersten(), f2_times_z()
    Z2 = free_abelian(2)
    return {
        "gersten_f2xz_center": FiberAmalgam(G, F, (2,), (3,)),
        "gersten_f2xz_commutator": FiberAmalgam(G, F, (2,), commutator((1,), (2,))),
        "z2_z2": FiberAmalgam(Z2, Z2, E((1, 0), 0), E((1, 0), 0)),
    }


def fbc_fixtures():
    G, F = gersten(), f2_times_z()
    return {
        "gersten_gersten_b": (G, G, (2,), (2,)),
        "gersten_f2xz_commutator": (G, F, (2,), commutator((1,), (2,))),
        "trivial_edge_word": (G, F, (2,), (1, -1)),
    }


def graph_fixtures():
    return {
        "tree": UndirectedMultigraph(4, ((0, 1), (1, 2), (1, 3))),
        "two_loops": UndirectedMultigraph(1, ((0, 0), (0, 0))),
        "bridged_triangles": UndirectedMultigraph(6, ((0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 5), (5, 3))),
    }


def corpus():
    """``{filename: document}`` for every shipped fixture."""
    docs = {}
    for name, g in (("klein", klein_bottle()), ("dinf", infinite_dihedral()), ("z2", free_abelian(2))):
        docs[f"extension_{name}.json"] = make_document("extension", extension_to_json(g), name)
    for name, g in (("gersten", gersten()), ("f2xz", f2_times_z())):
        docs[f"fbc_{name}.json"] = make_document("free_by_cyclic", fbc_to_json(g), name)
    for name, spec in amalgam_fixtures().items():
        docs[f"embed_{name}.json"] = make_document("amalgam_embed", amalgam_to_json(spec), name)
    docs["embed_negative_rank_two_edge.json"] = make_document(
        "amalgam_embed", amalgam_to_json(rank_two_edge()), "negative_rank_two_edge")
    docs["embed_negative_finite_edge.json"] = make_document(
        "amalgam_embed", amalgam_to_json(finite_edge()), "negative_finite_edge")
    for name, am in fiber_fixtures().items():
        docs[f"fiber_{name}.json"] = make_document("fiber_amalgam", fiber_amalgam_to_json(am), name)
    for name, args in fbc_fixtures().items():
        docs[f"fbc_amalgam_{name}.json"] = make_document("fbc_amalgam", fbc_amalgam_to_json(*args), name)
    for name, g in graph_fixtures().items():
        docs[f"tubular_{name}.json"] = make_document("tubular_graph", graph_to_json(g), name)
    return docs


def write_corpus(directory):
    os.makedirs(directory, exist_ok=True)
    written = []
    for name, doc in sorted(corpus().items()):
        path = os.path.join(directory, name)
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(dumps(doc))
        written.append(path)
    return written
