"""Fractional-to-integral rounding building blocks.

Three primitives: integral rounding of up-link solutions (the covering
matrix restricted to up-links is an interval matrix, hence totally
unimodular, so a basic LP optimum is integral), the factor-2 rounding that
first shifts every link onto its two up-link shadows, and the edge-cover
reduction for star-shaped instances with its 4/3 guarantee.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    InfeasibleInstanceError,
    InputError,
    InternalInvariantError,
    StateError,
)
from .graph import Instance, cov, edge_key, is_feasible
from .lp import build_cut_lp, solve_lp


def classify_uplinks(instance):
    """Partition link ids into up-links (one endpoint ancestral to the
    other) and the rest; requires a rooted tree."""
    tree = instance.tree
    if tree.root is None:
        raise StateError("classify_uplinks needs a rooted instance")
    up, rest = set(), set()
    for lid, link in instance.links.items():
        if tree.nca(link.u, link.v) in (link.u, link.v):
            up.add(lid)
        else:
            rest.add(lid)
    return up, rest


def _validate_cut_feasible(instance, x):
    idx = instance._cov_index()
    for e in instance.tree.sorted_edges():
        total = sum((x.get(lid, Fraction(0)) for lid in idx[e]), Fraction(0))
        if total < 1:
            raise InputError(f"solution does not cover edge {e} (mass {total})")


def optimal_uplink_cover(instance):
    """Cheapest feasible up-link set, via a basic optimum of the cut LP
    restricted to up-link columns.  The restricted constraint matrix is
    totally unimodular, so the vertex must be integral; a fractional vertex
    would mean a solver bug and is fatal."""
    up, _rest = classify_uplinks(instance)
    lp = build_cut_lp(instance, restrict_to=up)
    sol = solve_lp(lp)
    if sol.status != "optimal":
        raise InternalInvariantError(f"up-link covering LP came back {sol.status}")
    chosen = set()
    for lid, val in sol.values.items():
        if val.denominator != 1:
            raise InternalInvariantError(
                f"basic optimum not integral on up-links: x[{lid}] = {val}"
            )
        if val >= 1:
            chosen.add(lid)
    ok, witness = is_feasible(instance, chosen)
    if not ok:
        raise InternalInvariantError(f"rounded up-link set misses edge {witness}")
    return chosen, sol.objective_value


def round_uplinks(instance, x):
    """Round a feasible cut-LP solution supported on up-links to an integral
    feasible set of cost at most c^T x (exactly)."""
    up, _rest = classify_uplinks(instance)
    for lid, val in x.items():
        if val != 0 and lid not in up:
            raise InputError(f"support contains non-up-link {lid}")
        if val < 0:
            raise InputError(f"negative value on link {lid}")
    _validate_cut_feasible(instance, x)
    chosen, lp_value = optimal_uplink_cover(instance)
    cost = instance.cost_of(chosen)
    bound = instance.solution_cost(x)
    if cost > bound:
        raise InternalInvariantError(f"up-link rounding cost {cost} exceeds {bound}")
    return chosen


def two_approx_round(instance, x, root):
    """Round any feasible cut-LP solution to a feasible set of cost at most
    2 c^T x, by moving each non-up-link's mass onto its two shadows through
    the nearest common ancestor and rounding the up-link solution."""
    if not instance.shadow_complete:
        raise InputError("two_approx_round needs a shadow-complete instance")
    inst = instance.with_root(root)
    tree = inst.tree
    shifted = {}
    for lid, val in x.items():
        if val == 0:
            continue
        if val < 0:
            raise InputError(f"negative value on link {lid}")
        link = inst.links[lid]
        w = tree.nca(link.u, link.v)
        if w in (link.u, link.v):
            shifted[lid] = shifted.get(lid, Fraction(0)) + val
            continue
        for t in (link.u, link.v):
            sid = inst.cheapest_link(t, w)
            if sid is None:
                raise InputError(f"missing shadow ({t},{w}) for link {lid}")
            shifted[sid] = shifted.get(sid, Fraction(0)) + val
    chosen = round_uplinks(inst, shifted)
    cost = inst.cost_of(chosen)
    bound = 2 * inst.solution_cost(x)
    if cost > bound:
        raise InternalInvariantError(f"two-approx cost {cost} exceeds bound {bound}")
    return chosen


# ---------------------------------------------------------------------------
# star-shaped instances and edge covers
# ---------------------------------------------------------------------------


@dataclass
class EdgeCoverGraph(object):
    """Multigraph whose edge covers correspond to feasible star solutions.

    ``edges`` entries are (a, b, cost, link_id); the hub carries a zero-cost
    self-loop (link_id None) so covering it is free.
    """

    nodes: list
    edges: list
    hub: int


def _path_nodes(instance, lid):
    link = instance.links[lid]
    nodes = {link.u, link.v}
    for a, b in instance.link_path(lid):
        nodes.add(a)
        nodes.add(b)
    return nodes


def star_hubs(instance):
    """Nodes lying on every link's path."""
    candidates = set(instance.tree.nodes)
    for lid in instance.links:
        candidates &= _path_nodes(instance, lid)
        if not candidates:
            break
    return candidates


def star_to_edge_cover(instance, hub):
    """Build the edge-cover multigraph of a star-shaped instance.

    Leaf-leaf links become leaf-leaf edges, leaf-internal links become
    leaf-hub edges; links touching no leaf are redundant in any feasible
    solution and are dropped here.
    """
    tree = instance.tree
    if hub not in tree.nodes:
        raise InputError(f"hub {hub} is not a node")
    leaves = set(tree.leaves())
    edges = []
    for lid in sorted(instance.links):
        link = instance.links[lid]
        if hub not in _path_nodes(instance, lid):
            raise InputError(f"link {lid} misses the hub; instance is not star-shaped")
        u_leaf = link.u in leaves
        v_leaf = link.v in leaves
        if not (u_leaf or v_leaf):
            continue
        if u_leaf and v_leaf:
            edges.append((link.u, link.v, link.cost, lid))
        else:
            leaf = link.u if u_leaf else link.v
            a, b = (edge_key(leaf, hub)) if leaf != hub else (hub, hub)
            edges.append((a, b, link.cost, lid))
    edges.append((hub, hub, Fraction(0), None))
    nodes = sorted(leaves | {hub})
    return EdgeCoverGraph(nodes, edges, hub)


def min_cost_edge_cover(graph):
    """Exact minimum-cost edge cover via the matching reduction: pay each
    node its cheapest incident edge, then recover the gain of merged pairs
    with a maximum-weight matching on positive-gain edges."""
    incident = {u: [] for u in graph.nodes}
    for idx, (a, b, cost, _lid) in enumerate(graph.edges):
        incident[a].append(idx)
        if b != a:
            incident[b].append(idx)
    for u in graph.nodes:
        if not incident[u]:
            raise InfeasibleInstanceError(f"node {u} has no incident edge")
    cheap = {}
    for u in graph.nodes:
        best = min((graph.edges[i][2], i) for i in incident[u])
        cheap[u] = best
    # positive-gain candidate per node pair (multi-edges collapse to the best)
    gain_edges = {}
    for idx, (a, b, cost, _lid) in enumerate(graph.edges):
        if a == b:
            continue
        g = cheap[a][0] + cheap[b][0] - cost
        if g <= 0:
            continue
        key = edge_key(a, b)
        if key not in gain_edges or (-g, idx) < (-gain_edges[key][0], gain_edges[key][1]):
            gain_edges[key] = (g, idx)
    order = {u: i for i, u in enumerate(graph.nodes)}
    adj = {i: [] for i in range(len(graph.nodes))}
    for (a, b), (g, idx) in sorted(gain_edges.items()):
        i, j = sorted((order[a], order[b]))
        adj[i].append((j, g, idx))
    memo = {}

    def match(mask):
        if mask == (1 << len(graph.nodes)) - 1:
            return Fraction(0), ()
        i = 0
        while (mask >> i) & 1:
            i += 1
        key = mask
        if key in memo:
            return memo[key]
        best = match(mask | (1 << i))
        for j, g, idx in adj[i]:
            if (mask >> j) & 1:
                continue
            sub_gain, sub_edges = match(mask | (1 << i) | (1 << j))
            if g + sub_gain > best[0]:
                best = (g + sub_gain, (idx,) + sub_edges)
        memo[key] = best
        return best

    _gain, matched = match(0)
    chosen = set(matched)
    covered = set()
    for idx in matched:
        a, b, _c, _l = graph.edges[idx]
        covered.add(a)
        covered.add(b)
    for u in graph.nodes:
        if u not in covered:
            chosen.add(cheap[u][1])
    return sorted(chosen)


def star_cover(instance, hub=None):
    """Exact cheapest feasible link set of a star-shaped instance."""
    if not instance.tree.edges:
        return set()
    if not instance.links:
        e = instance.tree.sorted_edges()[0]
        raise InfeasibleInstanceError(f"edge {e} cannot be covered", edge=e)
    if hub is None:
        hubs = star_hubs(instance)
        if not hubs:
            raise InputError("instance is not star-shaped: no common hub")
        hub = min(hubs)
    graph = star_to_edge_cover(instance, hub)
    idxs = min_cost_edge_cover(graph)
    chosen = {graph.edges[i][3] for i in idxs if graph.edges[i][3] is not None}
    ok, witness = is_feasible(instance, chosen)
    if not ok:
        raise InternalInvariantError(f"edge cover misses tree edge {witness}")
    return chosen


def round_star_shaped(instance, x):
    """Round a feasible cut-LP solution of a star-shaped instance at a cost
    of at most 4/3 c^T x, through the exact minimum edge cover."""
    _validate_cut_feasible(instance, x)
    chosen = star_cover(instance)
    cost = instance.cost_of(chosen)
    bound = Fraction(4, 3) * instance.solution_cost(x)
    if cost > bound:
        raise InternalInvariantError(f"star rounding cost {cost} exceeds {bound}")
    return chosen
