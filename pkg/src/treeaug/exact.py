"""Exact optimization of tree cover instances.

Three solvers with one contract (minimum-cost link set covering every tree
edge): a pruned subset search used as the reference oracle, an interval
covering DP for path instances, and the few-leaf solver that guesses the
cross-chain links of an optimal solution and finishes each chain with the
DP.  All values are exact rationals; ties are broken deterministically.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import InfeasibleInstanceError, InternalInvariantError, SizeLimitError
from .graph import Instance, contract, edge_key


@dataclass
class ExactSolution(object):
    links: frozenset
    cost: Fraction
    method: str


def _edge_masks(instance):
    edges = instance.tree.sorted_edges()
    eidx = {e: i for i, e in enumerate(edges)}
    masks = {}
    for lid in instance.links:
        m = 0
        for e in instance.link_path(lid):
            m |= 1 << eidx[e]
        masks[lid] = m
    return edges, masks


def _check_coverable(edges, masks):
    full = (1 << len(edges)) - 1
    have = 0
    for m in masks.values():
        have |= m
    if have != full:
        for i, e in enumerate(edges):
            if not (have >> i) & 1:
                raise InfeasibleInstanceError(f"edge {e} cannot be covered", edge=e)
    return full


def brute_force_opt(instance, limit=22):
    """Minimum-cost cover by pruned subset search (the reference oracle).

    Branches on the first uncovered edge; a branch that picks the i-th
    covering link forbids the earlier ones, so every inclusion-minimal cover
    is enumerated exactly once.  Equal-cost optima are resolved toward the
    lexicographically smallest identifier set.
    """
    ids = instance.link_ids()
    if len(ids) > limit:
        raise SizeLimitError(f"{len(ids)} links exceeds brute-force limit {limit}")
    edges, masks = _edge_masks(instance)
    if not edges:
        return ExactSolution(frozenset(), Fraction(0), "brute_force")
    full = _check_coverable(edges, masks)
    cover_of = [[] for _ in edges]
    for lid in ids:
        m = masks[lid]
        for i in range(len(edges)):
            if (m >> i) & 1:
                cover_of[i].append(lid)
    best = [None, None]  # cost, sorted id tuple

    def dfs(covered, chosen, cost, forbidden):
        if best[0] is not None and cost > best[0]:
            return
        if covered == full:
            cand = (cost, tuple(sorted(chosen)))
            if best[0] is None or cand < tuple(best):
                best[0], best[1] = cand
            return
        e = 0
        while (covered >> e) & 1:
            e += 1
        banned = set()
        for lid in cover_of[e]:
            if lid not in forbidden:
                dfs(covered | masks[lid], chosen + [lid],
                    cost + instance.links[lid].cost, forbidden | banned)
                banned.add(lid)

    dfs(0, [], Fraction(0), frozenset())
    if best[0] is None:
        raise InternalInvariantError("coverable instance produced no cover")
    return ExactSolution(frozenset(best[1]), best[0], "brute_force")


# ---------------------------------------------------------------------------
# interval covering on a path
# ---------------------------------------------------------------------------


def _path_edge_order(tree):
    """Edges of a path tree ordered end to end (from the smaller-id leaf)."""
    if len(tree.nodes) == 1:
        return []
    leaves = tree.leaves()
    if len(leaves) != 2 or any(tree.degree(u) > 2 for u in tree.nodes):
        raise InfeasibleInstanceError("tree is not a path")
    start = leaves[0]
    order = []
    prev, cur = None, start
    while len(order) < len(tree.edges):
        nxt = [w for w in tree.adj[cur] if w != prev][0]
        order.append(edge_key(cur, nxt))
        prev, cur = cur, nxt
    return order


def _interval_cover(intervals, costs, required, cache=None):
    """Minimum-cost set of intervals covering every required position.

    ``intervals`` maps an id to an inclusive (lo, hi) position range.  DP on
    the leftmost uncovered required position.  Returns (cost, id tuple);
    raises when some required position has no interval over it.
    """
    required = tuple(sorted(required))
    if not required:
        return Fraction(0), ()
    if cache is not None and required in cache:
        return cache[required]
    by_pos = {}
    for lid, (lo, hi) in intervals.items():
        for p in required:
            if lo <= p <= hi:
                by_pos.setdefault(p, []).append(lid)
    # dp over suffixes of the required list
    dp = {len(required): (Fraction(0), ())}
    for k in range(len(required) - 1, -1, -1):
        p = required[k]
        best = None
        for lid in sorted(by_pos.get(p, ())):
            hi = intervals[lid][1]
            nxt = k
            while nxt < len(required) and required[nxt] <= hi:
                nxt += 1
            if dp.get(nxt) is None:
                continue
            sub_cost, sub_ids = dp[nxt]
            cand = (costs[lid] + sub_cost, tuple(sorted((lid,) + sub_ids)))
            if best is None or cand < best:
                best = cand
        dp[k] = best
    if dp[0] is None:
        raise InfeasibleInstanceError(f"required position {required[0]} uncoverable")
    if cache is not None:
        cache[required] = dp[0]
    return dp[0]


def interval_cover_dp(instance):
    """Exact optimum for a path instance via left-to-right interval DP."""
    order = _path_edge_order(instance.tree)
    if not order:
        return ExactSolution(frozenset(), Fraction(0), "interval_dp")
    pos = {e: i for i, e in enumerate(order)}
    intervals = {}
    costs = {}
    for lid in instance.links:
        ps = [pos[e] for e in instance.link_path(lid)]
        intervals[lid] = (min(ps), max(ps))
        costs[lid] = instance.links[lid].cost
    cost, ids = _interval_cover(intervals, costs, range(len(order)))
    return ExactSolution(frozenset(ids), cost, "interval_dp")


# ---------------------------------------------------------------------------
# few-leaf solver
# ---------------------------------------------------------------------------


def _chains(tree):
    """Maximal paths between leaves/branch nodes; every edge in exactly one.

    Returns a list of node sequences.  Interior nodes of a chain have degree
    two; endpoints are terminals (degree != 2).
    """
    if len(tree.edges) == 0:
        return []
    terminals = sorted(u for u in tree.nodes if tree.degree(u) != 2)
    chains = []
    seen = set()
    for t in terminals:
        for nb in tree.adj[t]:
            e = edge_key(t, nb)
            if e in seen:
                continue
            nodes = [t, nb]
            seen.add(e)
            while tree.degree(nodes[-1]) == 2:
                nxt = [w for w in tree.adj[nodes[-1]] if w != nodes[-2]][0]
                seen.add(edge_key(nodes[-1], nxt))
                nodes.append(nxt)
            chains.append(nodes)
    return chains


def _greedy_cover(full, masks, costs):
    """Any feasible cover, used as the initial incumbent."""
    covered = 0
    chosen = []
    ids = sorted(masks)
    while covered != full:
        best = None
        for lid in ids:
            gain = bin(masks[lid] & ~covered).count("1")
            if gain == 0:
                continue
            score = (costs[lid] / gain, costs[lid], lid)
            if best is None or score < best[0]:
                best = (score, lid)
        lid = best[1]
        covered |= masks[lid]
        chosen.append(lid)
    return sum((costs[i] for i in chosen), Fraction(0)), chosen


def few_leaf_opt(instance, k_limit=16):
    """Exact optimum for instances whose tree has few leaves.

    Zero-cost links are contracted up front.  The tree splits at branch
    nodes into chains; an optimal solution uses at most two links between
    any two chains, so the cross-chain part is found by a pruned search over
    link subsets obeying that budget, and each chain's remainder is finished
    by the interval DP.
    """
    original = instance
    zero_ids = sorted(lid for lid in instance.links if instance.links[lid].cost == 0)
    prefix = []
    if zero_ids:
        covered = set()
        for lid in zero_ids:
            covered |= instance.link_path(lid)
        prefix = zero_ids
        if covered:
            instance, _ = contract(instance, covered)
    if len(instance.tree.edges) == 0:
        return ExactSolution(
            frozenset(_minimality_sweep(original, set(prefix))), Fraction(0), "few_leaf"
        )
    n_leaves = len(instance.tree.leaves())
    if n_leaves > k_limit:
        raise SizeLimitError(f"{n_leaves} leaves exceeds limit {k_limit}")

    edges, masks = _edge_masks(instance)
    full = _check_coverable(edges, masks)
    costs = {lid: instance.links[lid].cost for lid in instance.links}

    chains = _chains(instance.tree)
    chain_nodes = [frozenset(c) for c in chains]
    node_chains = {}
    for ci, nodes in enumerate(chain_nodes):
        for u in nodes:
            node_chains.setdefault(u, set()).add(ci)
    eidx = {e: i for i, e in enumerate(edges)}
    chain_pos = []  # per chain: global edge index -> position
    for nodes in chains:
        chain_pos.append(
            {eidx[edge_key(a, b)]: k for k, (a, b) in enumerate(zip(nodes, nodes[1:]))}
        )

    intra = [{} for _ in chains]  # per chain: lid -> (lo, hi)
    cross = []
    for lid, link in sorted(instance.links.items()):
        common = node_chains[link.u] & node_chains[link.v]
        if common:
            ci = min(common)
            ps = [chain_pos[ci][eidx[e]] for e in instance.link_path(lid)]
            intra[ci][lid] = (min(ps), max(ps))
        else:
            pair_keys = frozenset(
                frozenset((a, b))
                for a in node_chains[link.u]
                for b in node_chains[link.v]
                if a != b
            )
            cross.append((lid, masks[lid], costs[lid], pair_keys))

    # identical-coverage and superset dominance pruning on cross links: a
    # link covered at least as much for at most the same cost makes the
    # other unnecessary in some optimal solution
    by_mask = {}
    for lid, m, c, pk in cross:
        cur = by_mask.get(m)
        if cur is None or (c, lid) < (cur[2], cur[0]):
            by_mask[m] = (lid, m, c, pk)
    kept = sorted(by_mask.values())
    cross = []
    for cand in kept:
        lid, m, c, _pk = cand
        dominated = any(
            (m2 & m) == m and c2 <= c and m2 != m for _l2, m2, c2, _p2 in kept
        )
        if not dominated:
            cross.append(cand)

    dp_caches = [dict() for _ in chains]
    inc_cost, inc_ids = _greedy_cover(full, masks, costs)
    best = [inc_cost, tuple(sorted(inc_ids))]

    def complete(chosen, covered, cost):
        total = cost
        ids = list(chosen)
        for ci in range(len(chains)):
            req = [p for gi, p in chain_pos[ci].items() if not (covered >> gi) & 1]
            if not req:
                continue
            try:
                sub_cost, sub_ids = _interval_cover(
                    intra[ci], costs, req, cache=dp_caches[ci]
                )
            except InfeasibleInstanceError:
                return
            total += sub_cost
            ids.extend(sub_ids)
            if total > best[0]:
                return
        cand = (total, tuple(sorted(ids)))
        if cand < tuple(best):
            best[0], best[1] = cand

    def dfs(k, covered, cost, counts, chosen):
        if cost > best[0]:
            return
        if k == len(cross):
            complete(chosen, covered, cost)
            return
        lid, m, c, pair_keys = cross[k]
        if (m & ~covered) and cost + c <= best[0] and all(
            counts.get(p, 0) < 2 for p in pair_keys
        ):
            bumped = {p: counts.get(p, 0) + 1 for p in pair_keys}
            dfs(k + 1, covered | m, cost + c, {**counts, **bumped}, chosen + [lid])
        dfs(k + 1, covered, cost, counts, chosen)

    dfs(0, 0, Fraction(0), {}, [])

    solution = _minimality_sweep(original, set(best[1]) | set(prefix))
    return ExactSolution(frozenset(solution), best[0], "few_leaf")


def _minimality_sweep(instance, solution):
    """Drop links whose path lies in the union of the others' paths.

    Positive-cost links are never redundant in an optimum, so this only ever
    removes superfluous zero-cost links; paths are taken in the given
    (uncontracted) instance."""
    changed = True
    while changed:
        changed = False
        for lid in sorted(solution):
            rest = set()
            for other in solution:
                if other != lid:
                    rest |= instance.link_path(other)
            if instance.link_path(lid) <= rest:
                solution.discard(lid)
                changed = True
                break
    return solution


def bundle_opt(instance, bundle, k_limit=32):
    """Exact optimum of covering just the bundle's edges: contract everything
    else and solve the few-leaf residual."""
    if not bundle.edge_set:
        return Fraction(0)
    rest = set(instance.tree.edges) - set(bundle.edge_set)
    sub, _info = contract(instance, rest)
    return few_leaf_opt(sub, k_limit=k_limit).cost


def make_bundle_oracle(instance, k_limit=32):
    """Memoized bundle optimum oracle keyed on the bundle's edge set."""
    cache = {}

    def oracle(bundle):
        key = bundle.edge_set
        if key not in cache:
            cache[key] = bundle_opt(instance, bundle, k_limit=k_limit)
        return cache[key]

    return oracle
