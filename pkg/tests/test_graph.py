from fractions import Fraction

import pytest

from treeaug import (
    InputError,
    Instance,
    Link,
    StateError,
    Tree,
    contract,
    cov,
    is_feasible,
    is_feasible_bridges,
    shadow_complete,
    tree_path,
)
from treeaug.graph import CompoundInfo, edge_key

from conftest import inst, path_tree, random_instance, star_tree


def test_tree_validation():
    with pytest.raises(InputError):
        Tree([1, 2], [(1, 1)])
    with pytest.raises(InputError):
        Tree([1, 2, 3], [(1, 2)])  # not connected / wrong edge count
    with pytest.raises(InputError):
        Tree([1, 2, 3], [(1, 2), (2, 3), (3, 1)])
    with pytest.raises(InputError):
        Tree([1, 2], [(1, 2)], root=9)


def test_tree_path_on_path_graph():
    t = path_tree(4)
    assert tree_path(t, 1, 4) == [(1, 2), (2, 3), (3, 4)]
    assert tree_path(t, 4, 1) == [(3, 4), (2, 3), (1, 2)]
    assert tree_path(t, 2, 2) == []


def test_tree_path_on_star():
    t = star_tree(3)
    assert tree_path(t, 1, 2) == [(0, 1), (0, 2)]
    with pytest.raises(InputError):
        tree_path(t, 1, 99)


def test_nca():
    t = path_tree(4, root=1)
    assert t.nca(3, 4) == 3
    assert t.nca(2, 2) == 2
    b = Tree([0, 1, 2, 3, 4], [(0, 1), (0, 2), (1, 3), (2, 4)], root=0)
    assert b.nca(3, 4) == 0
    assert b.nca(3, 1) == 1
    with pytest.raises(StateError):
        path_tree(3).nca(1, 2)


def test_cov():
    i = inst(path_tree(4), [(1, 4, 1), (1, 2, 1)])
    assert cov(i, {(2, 3)}) == {0}
    assert cov(i, set()) == set()
    assert cov(i, i.tree.edges) == {0, 1}
    with pytest.raises(InputError):
        cov(i, {(1, 3)})


def test_cov_distributes_over_union():
    i = random_instance(7, n=10)
    edges = i.tree.sorted_edges()
    a, b = set(edges[:3]), set(edges[2:6])
    assert cov(i, a | b) == cov(i, a) | cov(i, b)


def test_shadow_complete_single_link():
    i = inst(path_tree(3), [(1, 3, 5)])
    c = shadow_complete(i)
    assert c.shadow_complete
    pairs = {(l.u, l.v): l.cost for l in c.links.values()}
    assert pairs == {(1, 3): 5, (1, 2): 5, (2, 3): 5}
    for lid, link in c.links.items():
        if (link.u, link.v) != (1, 3):
            assert link.origin == 0


def test_shadow_complete_min_rule():
    # (1,4) cost 3 and (2,3) cost 1: the (2,3) pair keeps cost 1 as its
    # cheapest copy, the (1,3) pair appears at cost 3
    i = inst(path_tree(4), [(1, 4, 3), (2, 3, 1)])
    c = shadow_complete(i)
    def cheapest(u, v):
        return min(l.cost for l in c.links.values() if (l.u, l.v) == (u, v))
    assert cheapest(2, 3) == 1
    assert cheapest(1, 3) == 3
    assert cheapest(1, 2) == 3


def test_shadow_complete_idempotent():
    for seed in range(3):
        i = random_instance(seed, n=8)
        c1 = shadow_complete(i)
        c2 = shadow_complete(c1)
        k1 = {(l.u, l.v, l.cost) for l in c1.links.values()}
        k2 = {(l.u, l.v, l.cost) for l in c2.links.values()}
        assert k1 == k2


def test_contract_empty_is_identity():
    i = inst(path_tree(3), [(1, 3, 2)])
    c, info = contract(i, set())
    assert c.tree.edges == i.tree.edges
    assert all(info.node_origin[u] == frozenset([u]) for u in c.tree.nodes)


def test_contract_merges_and_drops_self_loops():
    i = inst(path_tree(3), [(1, 3, 2), (1, 2, 1)])
    c, info = contract(i, {(1, 2)})
    assert len(c.tree.nodes) == 2
    (w,) = [u for u in c.tree.nodes if u not in (1, 2, 3)]
    assert info.node_origin[w] == frozenset([1, 2])
    assert 1 not in c.links  # (1,2) became a self-loop
    assert c.links[0].pair == tuple(sorted((w, 3)))


def test_contract_origin_partition_and_order_independence():
    i = random_instance(11, n=9)
    edges = i.tree.sorted_edges()
    chosen = set(edges[::2])
    c1, info1 = contract(i, chosen)
    union = frozenset().union(*info1.node_origin.values())
    assert union == i.tree.nodes
    # contracting in two steps through prior composition gives same origins
    first, inter = contract(i, set(list(chosen)[:2]))
    remaining = {e for e in chosen if e[0] in first.tree.nodes or True}
    # map remaining edges into the contracted tree's names
    node_of = {}
    for w, orig in inter.node_origin.items():
        for u in orig:
            node_of[u] = w
    rem = {edge_key(node_of[a], node_of[b]) for a, b in chosen
           if node_of[a] != node_of[b]}
    c2, info2 = contract(first, rem, prior=inter)
    assert {frozenset(v) for v in info1.node_origin.values()} == {
        frozenset(v) for v in info2.node_origin.values()
    }


def test_is_feasible_examples():
    i = inst(path_tree(4), [(1, 4, 1), (1, 2, 1)])
    ok, w = is_feasible(i, {0})
    assert ok and w is None
    ok, w = is_feasible(i, {1})
    assert not ok and w == (2, 3)
    j = inst(path_tree(2), [(1, 2, 1)])
    ok, w = is_feasible(j, set())
    assert not ok and w == (1, 2)


def test_feasibility_checks_agree():
    for seed in range(25):
        i = random_instance(seed, n=9, density=1.2)
        ids = i.link_ids()
        rngmask = (seed * 2654435761) & ((1 << len(ids)) - 1)
        chosen = {ids[k] for k in range(len(ids)) if (rngmask >> k) & 1}
        ok, _ = is_feasible(i, chosen)
        assert ok == is_feasible_bridges(i, chosen)


def test_duplicate_links_rejected_but_multi_cost_allowed():
    t = path_tree(3)
    Instance(t, [Link(1, 3, 2), Link(1, 3, 3)])  # same pair, distinct costs: fine
    with pytest.raises(InputError):
        Instance(t, [Link(1, 3, 2), Link(3, 1, 2)])


def test_compound_info_identity():
    info = CompoundInfo.identity({1, 2, 3})
    assert info.total_s() == 0
    assert not info.is_early_compound(1)
