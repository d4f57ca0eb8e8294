from fractions import Fraction

import pytest

from treeaug import (
    Pair,
    contract_heavy,
    cov,
    decompose,
    find_beta_center,
    find_thin_edge,
    is_feasible,
    shadow_complete,
    solve_lp,
    split_solution,
)
from treeaug.decompose import crossing_cost, edge_coverage, split_cost_surplus
from treeaug.graph import remap_solution
from treeaug.lp import build_cut_lp

from conftest import inst, path_tree, random_instance, star_tree


def lp_pair(raw, root=None):
    i = shadow_complete(raw)
    sol = solve_lp(build_cut_lp(i))
    return Pair(i, sol.support()), sol.objective_value


def test_contract_heavy_noop_below_threshold():
    raw = inst(path_tree(4), [(1, 4, 1)])
    i = shadow_complete(raw)
    lid = i.find_link(1, 4, Fraction(1))
    gbar, l0, info = contract_heavy(i, {lid: Fraction(1)}, Fraction(1))
    assert gbar is i and l0 == set()
    assert info.total_s() == 0 and not info.early


def test_contract_heavy_everything():
    raw = inst(path_tree(3), [(1, 3, 1), (1, 2, 1), (2, 3, 1)])
    i = shadow_complete(raw)
    x = {lid: Fraction(1) for lid, l in i.links.items() if l.origin is None}
    # every edge carries mass 2 = 2/eps for eps = 1
    gbar, l0, info = contract_heavy(i, x, Fraction(1))
    assert len(gbar.tree.nodes) == 1
    ok, _ = is_feasible(i, l0)
    assert ok
    assert info.total_s() == i.cost_of(l0)
    assert all(info.is_early_compound(w) for w in gbar.tree.nodes)


def test_contract_heavy_middle_edges():
    raw = inst(
        path_tree(5),
        [(1, 2, 1), (2, 4, 1), (2, 3, 1), (3, 4, 2), (4, 5, 1), (1, 5, 2)],
    )
    i = shadow_complete(raw)
    x = {}
    for u, v, val in ((1, 2, 1), (2, 4, 1), (2, 3, 1), (4, 5, 1), (1, 5, 1)):
        lid = min(
            l for l, link in i.links.items() if (link.u, link.v) == (u, v)
        )
        x[lid] = Fraction(val)
    eps = Fraction(2, 3)  # threshold 3
    mass = edge_coverage(i, x)
    heavy = {e for e, v in mass.items() if v >= 3}
    gbar, l0, info = contract_heavy(i, x, eps)
    assert set(gbar.tree.edges) & set(i.tree.edges) == set(i.tree.edges) - heavy
    assert i.cost_of(l0) <= eps * i.solution_cost(x)
    assert info.total_s() == i.cost_of(l0)


def test_split_solution_displayed_example():
    raw = inst(path_tree(4), [(1, 4, 1), (1, 2, 1), (3, 4, 1)])
    i = shadow_complete(raw)
    z = {
        i.find_link(1, 4, Fraction(1)): Fraction(1, 2),
        i.find_link(1, 2, Fraction(1)): Fraction(1, 2),
        i.find_link(3, 4, Fraction(1)): Fraction(1, 2),
    }
    pa, pb = split_solution(Pair(i, z), (2, 3))
    za = {(pa.instance.links[lid].u, pa.instance.links[lid].v): v
          for lid, v in pa.z.items() if v}
    zb = {(pb.instance.links[lid].u, pb.instance.links[lid].v): v
          for lid, v in pb.z.items() if v}
    assert za == {(1, 2): Fraction(1)}
    assert zb == {(3, 4): Fraction(1)}


def test_split_no_crossing_preserves_cost():
    raw = inst(path_tree(4), [(1, 2, 2), (2, 3, 3), (3, 4, 1)])
    i = shadow_complete(raw)
    z = {lid: Fraction(1) for lid, l in i.links.items() if l.origin is None}
    pair = Pair(i, z)
    pa, pb = split_solution(pair, (2, 3))
    # the (2,3) link is the split edge's own link: it vanishes entirely
    assert pa.cost() + pb.cost() == pair.cost() + split_cost_surplus(pair, (2, 3))
    assert split_cost_surplus(pair, (2, 3)) == -3


def test_split_cost_identity_randomized():
    checked = 0
    for seed in range(30):
        raw = random_instance(seed, n=9, density=1.8, cost_max=3)
        pair, _ = lp_pair(raw)
        for e in pair.tree.sorted_edges()[:4]:
            before = pair.cost()
            surplus = split_cost_surplus(pair, e)
            bound = crossing_cost(pair, e)
            pa, pb = split_solution(pair, e)
            after = pa.cost() + pb.cost()
            assert after == before + surplus  # exact conservation law
            assert after <= before + bound  # paper-style upper bound
            checked += 1
    assert checked >= 100


def test_split_never_increases_coverage():
    for seed in range(6):
        raw = random_instance(seed, n=8, density=1.8, cost_max=2)
        pair, _ = lp_pair(raw)
        base = edge_coverage(pair.instance, pair.z)
        for e in pair.tree.sorted_edges()[:3]:
            pa, pb = split_solution(pair, e)
            for p in (pa, pb):
                side = edge_coverage(p.instance, p.z)
                for edge, m in side.items():
                    assert m == base[edge]  # splitting preserves coverage


def test_find_thin_edge_mass_bound():
    raw = inst(path_tree(4), [(1, 4, 1)])
    i = shadow_complete(raw)
    pair = Pair(i, {i.find_link(1, 4, Fraction(1)): Fraction(1)})
    # total inside cost < 2 * alpha: no edge can be thin
    assert find_thin_edge(pair, Fraction(10)) is None


def test_find_thin_edge_symmetric_path():
    raw = inst(path_tree(6), [(1, 3, 1), (4, 6, 1), (1, 6, 1), (3, 4, 1)])
    i = shadow_complete(raw)
    z = {
        i.find_link(1, 3, Fraction(1)): Fraction(1),
        i.find_link(4, 6, Fraction(1)): Fraction(1),
        i.find_link(1, 6, Fraction(1)): Fraction(1),
    }
    pair = Pair(i, z)
    e = find_thin_edge(pair, Fraction(1, 2))
    assert e == (3, 4)  # first edge with >= 1/2 inside cost both sides
    side_a, side_b = pair.tree.split_at_edge(e)
    for side in (side_a, side_b):
        total = sum(
            pair.instance.links[lid].cost * v
            for lid, v in z.items()
            if pair.instance.links[lid].u in side and pair.instance.links[lid].v in side
        )
        assert total >= Fraction(1, 2)


def test_find_thin_edge_alpha_zero_boundary():
    raw = inst(star_tree(3), [(1, 2, 1), (2, 3, 1), (3, 1, 1)])
    i = shadow_complete(raw)
    z = {lid: Fraction(1, 2) for lid, l in i.links.items() if l.origin is None}
    # no side of any star edge has positive fully-inside mass on both sides
    assert find_thin_edge(Pair(i, z), Fraction(0)) is None


def test_decompose_no_thin_edge_single_pair():
    raw = inst(path_tree(3), [(1, 3, 1)])
    i = shadow_complete(raw)
    res = decompose(i, {i.find_link(1, 3, Fraction(1)): Fraction(1)},
                    Fraction(1), Fraction(1))
    assert len(res.pairs) == 1 and res.l1 == []


def test_decompose_l1_count_and_certification():
    split_seen = False
    for seed in range(12):
        raw = random_instance(seed, n=11, topology="caterpillar", density=2.0,
                              cost_max=2)
        i = shadow_complete(raw)
        sol = solve_lp(build_cut_lp(i))
        res = decompose(i, sol.support(), Fraction(1), Fraction(2),
                        alpha=Fraction(1, 2), beta=Fraction(10))
        assert len(res.l1) == len(res.pairs) - 1
        assert len(res.centers) == len(res.pairs)
        if len(res.pairs) > 1:
            split_seen = True
            for pair in res.pairs:
                assert pair.cost() >= Fraction(1, 2)
    assert split_seen


def test_decompose_trace():
    raw = random_instance(3, n=11, topology="caterpillar", density=2.0, cost_max=2)
    i = shadow_complete(raw)
    sol = solve_lp(build_cut_lp(i))
    res = decompose(i, sol.support(), Fraction(1), Fraction(2),
                    alpha=Fraction(1, 2), beta=Fraction(10), collect_trace=True)
    assert len(res.trace) == len(res.l1)
    assert all(line.startswith("split edge=") for line in res.trace)


def test_find_beta_center_single_node():
    raw = inst(path_tree(2), [(1, 2, 1)])
    i = shadow_complete(raw)
    sub = i.restrict({1})
    node, comps = find_beta_center(Pair(sub, {}), Fraction(1))
    assert node == 1 and comps == []


def test_find_beta_center_star():
    raw = inst(star_tree(4), [(1, 2, 1), (3, 4, 1), (1, 3, 1), (2, 4, 1)])
    i = shadow_complete(raw)
    z = {lid: Fraction(1, 2) for lid, l in i.links.items() if l.origin is None}
    node, comps = find_beta_center(Pair(i, z), Fraction(1))
    assert node == 0  # isolated-leaf components carry no inside mass
    assert all(len(c) == 1 for c in comps)


def test_find_beta_center_validates_exhaustively():
    for seed in range(8):
        raw = random_instance(seed, n=10, density=1.8, cost_max=2)
        pair, _ = lp_pair(raw)
        beta = Fraction(50)
        node, comps = find_beta_center(pair, beta)
        for comp in comps:
            sub = pair.tree.induced_subtree(comp)
            assert len(sub.leaves()) <= beta
            inside = sum(
                pair.instance.links[lid].cost * v
                for lid, v in pair.z.items()
                if pair.instance.links[lid].u in comp
                and pair.instance.links[lid].v in comp
            )
            assert inside <= beta
