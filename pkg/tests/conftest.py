import random

import pytest

from vamalg import fixtures as fx
from vamalg.vagroup import ExtElement


@pytest.fixture
def klein():
    return fx.klein_bottle()


@pytest.fixture
def dinf():
    return fx.infinite_dihedral()


@pytest.fixture
def z2():
    return fx.free_abelian(2)


def all_fixture_extensions():
    from vamalg.vagroup import rescale_lattice

    base = [fx.klein_bottle(), fx.infinite_dihedral(), fx.free_abelian(2), fx.z_times_c2(1), fx.dinf_times_c2()]
    return base + [rescale_lattice(fx.klein_bottle(), 2)[0], rescale_lattice(fx.free_abelian(1), 3)[0],
                   rescale_lattice(fx.infinite_dihedral(), 2)[0]]


def random_element(g, rng, bound=4):
    return ExtElement(tuple(rng.randint(-bound, bound) for _ in range(g.rank)), rng.randrange(g.group.order))


@pytest.fixture
def rng():
    return random.Random(20261015)


def free_action_on_blocks(group, blocks, m):
    """Permutation images of ``group`` acting regularly on each block (block[t] is the point for t)."""
    from vamalg.perm import Permutation

    imgs = []
    for q in range(group.order):
        p = list(range(m))
        for b in blocks:
            for t in range(group.order):
                p[b[t]] = b[group.mul(q, t)]
        imgs.append(Permutation(tuple(p)))
    return imgs


def random_free_pair(rng, group, m, values=(-2, -1, 0, 1, 2, 3), matching=True):
    """``(f, images1, images2)`` with both actions preserving ``f``.

    The level sets of ``f`` are cut into blocks independently for each
    action.  With ``matching`` false the second action fixes one block
    pointwise, so it is not free and no conjugator exists.
    """
    n = group.order
    r = m // n
    levels = [rng.choice(values) for _ in range(r)]
    pts = list(range(m))
    rng.shuffle(pts)
    f = [0] * m
    blocks1 = [pts[i * n:(i + 1) * n] for i in range(r)]
    for b, a in zip(blocks1, levels):
        for x in b:
            f[x] = a
    blocks2 = []
    for a in sorted(set(levels)):
        level = [x for x in range(m) if f[x] == a]
        rng.shuffle(level)
        blocks2 += [level[i * n:(i + 1) * n] for i in range(len(level) // n)]
    g2 = free_action_on_blocks(group, blocks2[1:] if not matching else blocks2, m)
    return tuple(f), free_action_on_blocks(group, blocks1, m), g2


def brute_force_conjugators(f, g1, g2):
    import itertools

    from vamalg.perm import Permutation

    m = len(f)
    out = []
    for images in itertools.permutations(range(m)):
        s = Permutation(images)
        if s.act(f) != tuple(f):
            continue
        si = s.inverse()
        if all(s * a * si == b for a, b in zip(g1, g2)):
            out.append(s)
    return out


def _canonical(n, edges):
    import itertools

    deg = [0] * n
    for a, b in edges:
        deg[a] += 1
        deg[b] += 1
    # only relabel within classes of equal degree, classes ordered by degree
    classes = {}
    for v in range(n):
        classes.setdefault(deg[v], []).append(v)
    keys = sorted(classes)
    best = None
    for combo in itertools.product(*(itertools.permutations(classes[k]) for k in keys)):
        order = [v for part in combo for v in part]
        label = {v: i for i, v in enumerate(order)}
        form = tuple(sorted(tuple(sorted((label[a], label[b]))) for a, b in edges))
        if best is None or form < best:
            best = form
    return (n, best)


def connected_multigraphs(max_edges):
    """Every connected multigraph (loops and parallel edges allowed) with 1..max_edges edges, up to isomorphism.

    Each connected graph arises from a smaller one by adding an edge
    between old vertices or a pendant edge to a new vertex, so growing level
    by level reaches all of them.
    """
    level = {(1, ())}
    out = []
    for _ in range(max_edges):
        nxt = set()
        for n, edges in level:
            for a in range(n):
                for b in range(a, n + 1):
                    m = n + (b == n)
                    nxt.add(_canonical(m, edges + ((a, b),)))
        level = nxt
        out.extend(sorted(level))
    return out


def simple_cycles(n, edges):
    """Edge subsets forming a connected 2-regular subgraph (a loop adds 2 to the degree)."""
    import itertools

    cycles = []
    for k in range(1, len(edges) + 1):
        for sub in itertools.combinations(range(len(edges)), k):
            deg = {}
            for e in sub:
                a, b = edges[e]
                deg[a] = deg.get(a, 0) + 1
                deg[b] = deg.get(b, 0) + 1
            if any(d != 2 for d in deg.values()):
                continue
            verts = set(deg)
            seen, stack = {min(verts)}, [min(verts)]
            while stack:
                v = stack.pop()
                for e in sub:
                    a, b = edges[e]
                    for x, y in ((a, b), (b, a)):
                        if x == v and y not in seen:
                            seen.add(y)
                            stack.append(y)
            if seen == verts:
                cycles.append(verts)
    return cycles


def brute_cycle_disjoint(n, edges):
    count = [0] * n
    for c in simple_cycles(n, edges):
        for v in c:
            count[v] += 1
    return all(x <= 1 for x in count)


# acceptance reporting: one PASS/FAIL line per criterion at the end of the run

_CRITERIA = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    n, text = mark.args
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        _CRITERIA[n] = (text, rep.passed)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        text, ok = _CRITERIA[n]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {n}: {text}")
