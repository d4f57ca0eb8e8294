"""Phase one of the pipeline: turn (tree, fractional solution) into a list
of subtree/solution pairs that are each certifiably simple.

Heavily covered edges are contracted first (paying an eps fraction of the
fractional cost for a set covering them), which leaves every surviving edge
with bounded covering mass.  The tree is then split greedily at thin edges;
each split shifts crossing mass onto same-cost shadows, so side costs add up
exactly and coverage levels never increase.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import InputError, InternalInvariantError
from .graph import (
    CompoundInfo,
    contract,
    edge_key,
    remap_solution,
)
from .rounding import two_approx_round


@dataclass
class Pair(object):
    """A subtree together with a cut-LP-feasible solution supported inside it."""

    instance: object
    z: dict

    @property
    def tree(self):
        return self.instance.tree

    def cost(self):
        return self.instance.solution_cost(self.z)


@dataclass
class DecompositionResult(object):
    l0: set
    l1: list  # one entry per split, repeats allowed
    pairs: list
    centers: list  # (node, components) per pair
    compound: CompoundInfo
    cost_ledger: dict
    trace: list = field(default_factory=list)


def edge_coverage(instance, x):
    """Per-edge covering mass of a fractional solution."""
    mass = {e: Fraction(0) for e in instance.tree.edges}
    for lid, val in x.items():
        if val == 0:
            continue
        for e in instance.link_path(lid):
            mass[e] += val
    return mass


def contract_heavy(instance, x, eps):
    """Contract every edge covered by mass >= 2/eps after buying a cheap
    link set for those edges.

    Returns the contracted instance, the bought links, and compound
    bookkeeping with per-compound absorbed cost.  Every surviving edge keeps
    covering mass < 2/eps (the thin coverage property).
    """
    eps = Fraction(eps)
    if eps <= 0:
        raise InputError("eps must be positive")
    threshold = Fraction(2) / eps
    tree = instance.tree
    mass = edge_coverage(instance, x)
    heavy = {e for e, v in mass.items() if v >= threshold}
    if not heavy:
        return instance, set(), CompoundInfo.identity(tree.nodes)

    light = set(tree.edges) - heavy
    heavy_inst, _ = contract(instance, light)
    y = {lid: val * eps / 2 for lid, val in remap_solution(x, heavy_inst).items()}
    l0 = two_approx_round(heavy_inst, y, root=min(heavy_inst.tree.nodes))
    l0_cost = instance.cost_of(l0)
    budget = eps * instance.solution_cost(x)
    if l0_cost > budget:
        raise InternalInvariantError(f"heavy cover cost {l0_cost} exceeds {budget}")

    gbar, info = contract(instance, heavy)
    node_of = {}
    for w, origin in info.node_origin.items():
        for u in origin:
            node_of[u] = w
    s = {w: Fraction(0) for w in info.node_origin}
    for lid in sorted(l0):
        covered_heavy = sorted(instance.link_path(lid) & heavy)
        # a cover link may touch several contracted components; its cost is
        # charged to the component of its first heavy edge so the absorbed
        # costs sum to exactly c(l0)
        first = covered_heavy[0]
        s[node_of[first[0]]] += instance.links[lid].cost
    early = frozenset(w for w, origin in info.node_origin.items() if len(origin) > 1)
    info = CompoundInfo(info.node_origin, s, early)
    for e in set(tree.edges) - heavy:  # survives into the contraction
        if mass[e] >= threshold:
            raise InternalInvariantError(f"surviving edge {e} still heavy")
    return gbar, l0, info


def split_solution(pair, e):
    """Split a pair at a tree edge into its two sides.

    Mass of links crossing the edge is moved onto the same-cost shadow
    between the near split endpoint and the link's endpoint on that side, so
    each side is feasible for its own cut LP and the side costs satisfy
    c(z_a) + c(z_b) = c(z) + (cost carried by links crossing e), exactly.
    """
    inst = pair.instance
    if not inst.shadow_complete:
        raise InputError("splitting needs a shadow-complete instance")
    e = edge_key(*e)
    if e not in inst.tree.edges:
        raise InputError(f"{e} is not an edge of the pair's tree")
    side_a, side_b = inst.tree.split_at_edge(e)  # side_a contains e[0]

    def one_side(side, near):
        z_side = {}
        for lid, val in pair.z.items():
            if val == 0:
                continue
            link = inst.links[lid]
            in_u = link.u in side
            in_v = link.v in side
            if in_u and in_v:
                z_side[lid] = z_side.get(lid, Fraction(0)) + val
            elif in_u or in_v:
                t = link.u if in_u else link.v
                if t == near:
                    continue  # nothing of its path survives on this side
                sid = inst.find_link(near, t, link.cost)
                if sid is None:
                    raise InternalInvariantError(
                        f"no cost-{link.cost} shadow ({near},{t}) for crossing link {lid}"
                    )
                z_side[sid] = z_side.get(sid, Fraction(0)) + val
        return z_side

    pair_a = Pair(inst.restrict(side_a), one_side(side_a, e[0]))
    pair_b = Pair(inst.restrict(side_b), one_side(side_b, e[1]))
    for p in (pair_a, pair_b):
        cov_mass = edge_coverage(p.instance, p.z)
        for edge, m in cov_mass.items():
            if m < 1:
                raise InternalInvariantError(f"split side under-covers {edge}")
    return pair_a, pair_b


def crossing_cost(pair, e):
    """Total cost-weighted mass of links whose path contains the edge."""
    inst = pair.instance
    e = edge_key(*e)
    total = Fraction(0)
    for lid, val in pair.z.items():
        if val != 0 and e in inst.link_path(lid):
            total += inst.links[lid].cost * val
    return total


def split_cost_surplus(pair, e):
    """Exact growth of total cost under splitting at e.

    A crossing link is re-carried on both sides (+1 times its cost-mass)
    unless an endpoint coincides with a split endpoint, in which case its
    path on that side is empty and nothing is carried there (0), and the
    split edge's own link disappears entirely (-1).  The paper-style sum
    over all links crossing e is an upper bound on this."""
    inst = pair.instance
    e = edge_key(*e)
    ends = set(e)
    total = Fraction(0)
    for lid, val in pair.z.items():
        if val == 0 or e not in inst.link_path(lid):
            continue
        link = inst.links[lid]
        touching = len(ends & {link.u, link.v})
        total += inst.links[lid].cost * val * (1 - touching)
    return total


def _side_inside_cost(pair, side):
    total = Fraction(0)
    for lid, val in pair.z.items():
        if val == 0:
            continue
        link = pair.instance.links[lid]
        if link.u in side and link.v in side:
            total += link.cost * val
    return total


def find_thin_edge(pair, alpha):
    """First edge (ascending) with at least alpha of fully-inside link cost
    on both sides.  At alpha = 0 this asks for positive inside mass on both
    sides, so the scan stays meaningful at the boundary."""
    alpha = Fraction(alpha)
    for e in pair.tree.sorted_edges():
        side_a, side_b = pair.tree.split_at_edge(e)
        cost_a = _side_inside_cost(pair, side_a)
        if cost_a < alpha or (alpha == 0 and cost_a == 0):
            continue
        cost_b = _side_inside_cost(pair, side_b)
        if cost_b < alpha or (alpha == 0 and cost_b == 0):
            continue
        return e
    return None


def find_beta_center(pair, beta):
    """A node whose removal leaves components with at most beta inside-link
    cost and at most beta leaves each, plus those components.

    Candidates from orienting each edge toward its heavier side are tried
    first; an exhaustive scan backs them up.  Certification failure is fatal
    because the decomposition guarantees a center exists.
    """
    beta = Fraction(beta)
    tree = pair.tree
    if len(tree.nodes) == 1:
        return min(tree.nodes), []

    def check(u):
        comps = tree.components_without(u)
        for comp in comps:
            if _side_inside_cost(pair, comp) > beta:
                return None
            if len(tree.induced_subtree(comp).leaves()) > beta:
                return None
        return comps

    out_degree = {u: 0 for u in tree.nodes}
    for e in tree.sorted_edges():
        side_a, side_b = tree.split_at_edge(e)
        a, b = (e[0], e[1]) if e[0] in side_a else (e[1], e[0])
        small_a = _side_inside_cost(pair, side_a) < beta
        small_b = _side_inside_cost(pair, side_b) < beta
        if small_a and not small_b:
            out_degree[a] += 1
        elif small_b and not small_a:
            out_degree[b] += 1
    candidates = sorted(u for u, d in out_degree.items() if d == 0)
    for u in candidates + sorted(tree.nodes):
        comps = check(u)
        if comps is not None:
            return u, comps
    raise InternalInvariantError(f"no {beta}-center exists in pair")


def decompose(
    gbar,
    x,
    eps,
    m_cap,
    alpha=None,
    beta=None,
    l0=None,
    compound=None,
    collect_trace=False,
):
    """Greedy worklist decomposition: split any pair at a thin edge until
    none remains; every split edge gets its cheapest covering link recorded.

    Defaults derive the thresholds from eps and the cost ceiling
    (alpha = 4M/eps^2, beta = 48M/eps^2); overrides let small instances
    exercise the splitting machinery.  Every final pair is certified
    beta-simple by exhibiting a center.
    """
    eps = Fraction(eps)
    m_cap = Fraction(m_cap)
    alpha = Fraction(alpha) if alpha is not None else 4 * m_cap / eps**2
    beta = Fraction(beta) if beta is not None else 48 * m_cap / eps**2
    l0 = set(l0) if l0 else set()
    if compound is None:
        compound = CompoundInfo.identity(gbar.tree.nodes)
    base_cost = gbar.solution_cost(x)
    trace = []

    pairs_out = []
    l1 = []
    if len(gbar.tree.nodes) == 1:
        stack = []
    else:
        stack = [Pair(gbar, dict(x))]
    while stack:
        pair = stack.pop()
        e = find_thin_edge(pair, alpha)
        if e is None:
            pairs_out.append(pair)
            continue
        before = pair.cost()
        surplus = split_cost_surplus(pair, e)
        pair_a, pair_b = split_solution(pair, e)
        after = pair_a.cost() + pair_b.cost()
        if after != before + surplus:
            raise InternalInvariantError(
                f"split cost identity broke at {e}: {after} != {before} + {surplus}"
            )
        if after > before + crossing_cost(pair, e):
            raise InternalInvariantError(f"split exceeded its crossing-cost bound at {e}")
        covering = sorted(
            cov_ids_for_edge(pair.instance, e),
            key=lambda lid: (pair.instance.links[lid].cost, lid),
        )
        l1.append(covering[0])
        if collect_trace:
            trace.append(
                f"split edge={e} left={pair_a.cost()} right={pair_b.cost()} "
                f"l1={covering[0]}"
            )
        stack.append(pair_b)
        stack.append(pair_a)

    centers = [find_beta_center(p, beta) for p in pairs_out]
    sum_z = sum((p.cost() for p in pairs_out), Fraction(0))
    l1_cost = sum((gbar.links[lid].cost for lid in l1), Fraction(0))
    l0_cost = compound.total_s()
    ledger = {
        "c_l0": l0_cost,
        "c_l1": l1_cost,
        "sum_pair_cost": sum_z,
        "base_cost": base_cost,
        "within_eps": sum_z <= (1 + eps) * base_cost,
        "l1_within_eps": l1_cost <= eps * sum_z,
        "alpha": alpha,
        "beta": beta,
    }
    return DecompositionResult(l0, l1, pairs_out, centers, compound, ledger, trace)


def cov_ids_for_edge(instance, e):
    idx = instance._cov_index()
    return idx[edge_key(*e)]
