"""Shared builders for the test suite."""

from fractions import Fraction

import pytest

from treeaug import Instance, Link, Tree
from treeaug.generate import GenParams, XorShift64Star, generate_instance


def path_tree(n, root=None):
    return Tree(range(1, n + 1), [(i, i + 1) for i in range(1, n)], root=root)


def star_tree(n_leaves, center=0, root=None):
    nodes = [center] + list(range(1, n_leaves + 1))
    return Tree(nodes, [(center, i) for i in range(1, n_leaves + 1)], root=root)


def inst(tree, link_specs, complete=False):
    """Instance from (u, v, cost) triples."""
    links = [Link(u, v, Fraction(c)) for u, v, c in link_specs]
    return Instance(tree, links, shadow_complete=complete)


def star_triangle():
    """Star with 3 leaves and the three leaf-pair links at unit cost."""
    return inst(star_tree(3), [(1, 2, 1), (2, 3, 1), (3, 1, 1)])


def random_instance(seed, n=9, topology="random_tree", density=1.6, cost_max=2,
                    mode="wtap"):
    params = GenParams(n=n, topology=topology, density=density,
                       cost_max=cost_max, mode=mode)
    return generate_instance(params, seed)


def subset_opt(instance):
    """Literal exhaustive subset minimum (independent of the solvers)."""
    ids = instance.link_ids()
    edges = set(instance.tree.edges)
    best = None
    for mask in range(1 << len(ids)):
        chosen = [ids[i] for i in range(len(ids)) if (mask >> i) & 1]
        covered = set()
        for lid in chosen:
            covered |= instance.link_path(lid)
        if covered >= edges:
            cost = instance.cost_of(chosen)
            if best is None or cost < best:
                best = cost
    return best


@pytest.fixture
def rng():
    return XorShift64Star(12345)
