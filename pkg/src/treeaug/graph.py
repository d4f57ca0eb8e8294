"""Trees, links, instances, contraction and feasibility checking.

Everything here is a pure function of immutable values: trees and instances
are never mutated after construction, so they are safe to share across
concurrent tasks.  Costs are exact rationals throughout; there is no
floating point anywhere in the solving path.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import InputError, StateError


def edge_key(u, v):
    """Canonical (sorted) representation of an undirected tree edge."""
    return (u, v) if u <= v else (v, u)


class Tree(object):
    """An undirected tree over integer node identifiers, optionally rooted."""

    def __init__(self, nodes, edges, root=None):
        nodes = frozenset(nodes)
        norm_edges = set()
        adj = {u: [] for u in nodes}
        for u, v in edges:
            if u == v:
                raise InputError(f"self-loop edge at node {u}")
            if u not in nodes or v not in nodes:
                raise InputError(f"edge ({u},{v}) uses unknown node")
            e = edge_key(u, v)
            if e in norm_edges:
                raise InputError(f"duplicate edge {e}")
            norm_edges.add(e)
            adj[u].append(v)
            adj[v].append(u)
        if len(nodes) == 0:
            raise InputError("tree needs at least one node")
        if len(norm_edges) != len(nodes) - 1:
            raise InputError(
                f"{len(norm_edges)} edges on {len(nodes)} nodes is not a tree"
            )
        if root is not None and root not in nodes:
            raise InputError(f"root {root} is not a node")
        self.nodes = nodes
        self.edges = frozenset(norm_edges)
        self.adj = {u: tuple(sorted(vs)) for u, vs in adj.items()}
        self.root = root
        self._check_connected()
        self._parent = None
        self._depth = None
        self._paths = {}

    def _check_connected(self):
        start = next(iter(self.nodes))
        seen = {start}
        stack = [start]
        while stack:
            u = stack.pop()
            for v in self.adj[u]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        if len(seen) != len(self.nodes):
            raise InputError("edge set is not connected")

    # -- basic queries ------------------------------------------------------

    def sorted_edges(self):
        return sorted(self.edges)

    def degree(self, u):
        return len(self.adj[u])

    def leaves(self):
        return sorted(u for u in self.nodes if len(self.adj[u]) == 1)

    def with_root(self, root):
        return Tree(self.nodes, self.edges, root=root)

    # -- rooted structure ---------------------------------------------------

    def _ensure_rooted(self):
        if self.root is None:
            raise StateError("operation requires a rooted tree")
        if self._parent is None:
            parent = {self.root: None}
            depth = {self.root: 0}
            stack = [self.root]
            while stack:
                u = stack.pop()
                for v in self.adj[u]:
                    if v not in parent:
                        parent[v] = u
                        depth[v] = depth[u] + 1
                        stack.append(v)
            self._parent = parent
            self._depth = depth

    def parent(self, u):
        self._ensure_rooted()
        return self._parent[u]

    def depth(self, u):
        self._ensure_rooted()
        return self._depth[u]

    def nca(self, u, v):
        """Nearest common ancestor of u and v in the rooted tree."""
        self._ensure_rooted()
        if u not in self.nodes or v not in self.nodes:
            raise InputError("unknown node in nca query")
        du, dv = self._depth[u], self._depth[v]
        while du > dv:
            u = self._parent[u]
            du -= 1
        while dv > du:
            v = self._parent[v]
            dv -= 1
        while u != v:
            u = self._parent[u]
            v = self._parent[v]
        return u

    def is_ancestor(self, anc, node):
        self._ensure_rooted()
        return self.nca(anc, node) == anc

    # -- paths and cuts -------------------------------------------------------

    def path(self, u, v):
        """Edges of the unique u-v path, ordered from u to v."""
        if u not in self.nodes or v not in self.nodes:
            raise InputError(f"unknown node in path query ({u},{v})")
        if u == v:
            return []
        key = (u, v) if u <= v else (v, u)
        cached = self._paths.get(key)
        if cached is None:
            prev = {u: None}
            stack = [u]
            while stack and v not in prev:
                w = stack.pop()
                for x in self.adj[w]:
                    if x not in prev:
                        prev[x] = w
                        stack.append(x)
            nodes = [v]
            while prev[nodes[-1]] is not None:
                nodes.append(prev[nodes[-1]])
            nodes.reverse()  # now u .. v
            cached = tuple(edge_key(a, b) for a, b in zip(nodes, nodes[1:]))
            self._paths[key] = cached
        if key == (u, v):
            return list(cached)
        return list(reversed(cached))

    def split_at_edge(self, e):
        """Node sets of the two components of the tree minus edge e."""
        u, v = e
        if edge_key(u, v) not in self.edges:
            raise InputError(f"{e} is not a tree edge")
        side_u = {u}
        stack = [u]
        while stack:
            w = stack.pop()
            for x in self.adj[w]:
                if x not in side_u and edge_key(w, x) != edge_key(u, v):
                    side_u.add(x)
                    stack.append(x)
        return frozenset(side_u), frozenset(self.nodes - side_u)

    def components_without(self, u):
        """Node sets of the components of the tree minus node u, sorted by
        smallest member."""
        comps = []
        seen = {u}
        for v in self.adj[u]:
            if v in seen:
                continue
            comp = {v}
            stack = [v]
            while stack:
                w = stack.pop()
                for x in self.adj[w]:
                    if x not in seen and x not in comp:
                        comp.add(x)
                        stack.append(x)
            seen |= comp
            comps.append(frozenset(comp))
        return sorted(comps, key=min)

    def induced_subtree(self, nodes, root=None):
        nodes = frozenset(nodes)
        edges = [e for e in self.edges if e[0] in nodes and e[1] in nodes]
        return Tree(nodes, edges, root=root)

    def __repr__(self):
        return f"Tree(n={len(self.nodes)}, root={self.root})"


@dataclass(frozen=True)
class Link(object):
    """A candidate augmentation edge; covers the tree path between its ends.

    ``origin`` points at the link a shadow was derived from; reporting maps
    every shadow back to that original link.
    """

    u: int
    v: int
    cost: Fraction
    origin: int | None = None

    def __post_init__(self):
        if self.u == self.v:
            raise InputError(f"link with equal endpoints {self.u}")
        if self.u > self.v:
            u, v = self.v, self.u
            object.__setattr__(self, "u", u)
            object.__setattr__(self, "v", v)
        object.__setattr__(self, "cost", Fraction(self.cost))
        if self.cost < 0:
            raise InputError(f"negative link cost {self.cost}")

    @property
    def pair(self):
        return (self.u, self.v)


class Instance(object):
    """A tree plus an indexed link collection.

    Link identifiers are stable across shadow completion, contraction and
    restriction, which is what lets rounded solutions be traced back to
    original links.  Several links may share endpoints as long as their
    costs differ (shadows of differently-priced links stay distinct so that
    redistributed fractional mass keeps its original cost).
    """

    def __init__(self, tree, links, shadow_complete=False):
        self.tree = tree
        if isinstance(links, dict):
            items = sorted(links.items())
        else:
            items = list(enumerate(links))
        seen = {}
        self.links = {}
        for lid, link in items:
            if link.u not in tree.nodes or link.v not in tree.nodes:
                raise InputError(f"link {lid} endpoints ({link.u},{link.v}) not in tree")
            key = (link.u, link.v, link.cost)
            if key in seen:
                raise InputError(f"duplicate link {key} (ids {seen[key]} and {lid})")
            seen[key] = lid
            self.links[lid] = link
        self.shadow_complete = shadow_complete
        self.link_alias = {}  # dropped id -> surviving id, set by contract()
        self._path_cache = {}
        self._edge_cov = None
        self._by_pair_cost = seen
        self._pair_index = None

    def link_ids(self):
        return sorted(self.links)

    def link_path(self, lid):
        """Edge set of the link's tree path (frozenset)."""
        p = self._path_cache.get(lid)
        if p is None:
            link = self.links[lid]
            p = frozenset(self.tree.path(link.u, link.v))
            self._path_cache[lid] = p
        return p

    def find_link(self, u, v, cost):
        """Identifier of the link with these endpoints and exactly this cost."""
        return self._by_pair_cost.get((*edge_key(u, v), Fraction(cost)))

    def cheapest_link(self, u, v):
        """Identifier of the cheapest link with these endpoints, or None."""
        if self._pair_index is None:
            idx = {}
            for (a, b, cost), lid in self._by_pair_cost.items():
                key = (a, b)
                if key not in idx or (cost, lid) < idx[key]:
                    idx[key] = (cost, lid)
            self._pair_index = idx
        hit = self._pair_index.get(edge_key(u, v))
        return hit[1] if hit else None

    def _cov_index(self):
        if self._edge_cov is None:
            idx = {e: set() for e in self.tree.edges}
            for lid in self.links:
                for e in self.link_path(lid):
                    idx[e].add(lid)
            self._edge_cov = {e: frozenset(s) for e, s in idx.items()}
        return self._edge_cov

    def cost_of(self, link_ids):
        return sum((self.links[i].cost for i in link_ids), Fraction(0))

    def solution_cost(self, x):
        """c^T x for a fractional solution given as {link id: value}."""
        return sum((self.links[i].cost * v for i, v in x.items()), Fraction(0))

    def restrict(self, nodes, root=None):
        """Instance induced by a connected node subset; keeps link ids."""
        sub = self.tree.induced_subtree(nodes, root=root)
        kept = {
            lid: link
            for lid, link in self.links.items()
            if link.u in sub.nodes and link.v in sub.nodes
        }
        return Instance(sub, kept, shadow_complete=self.shadow_complete)

    def with_root(self, root):
        inst = Instance(self.tree.with_root(root), self.links, self.shadow_complete)
        inst._path_cache = self._path_cache
        return inst

    def __repr__(self):
        return (
            f"Instance(n={len(self.tree.nodes)}, m={len(self.tree.edges)}, "
            f"links={len(self.links)}, complete={self.shadow_complete})"
        )


@dataclass
class CompoundInfo(object):
    """Bookkeeping for contractions: which original nodes a node stands for,
    and the cost of cover links absorbed into early compound nodes."""

    node_origin: dict
    s: dict
    early: frozenset = frozenset()

    @classmethod
    def identity(cls, nodes):
        return cls({u: frozenset([u]) for u in nodes}, {u: Fraction(0) for u in nodes})

    def is_early_compound(self, u):
        return u in self.early

    def total_s(self):
        return sum(self.s.values(), Fraction(0))

    def s_of(self, nodes):
        return sum((self.s[u] for u in nodes), Fraction(0))


# ---------------------------------------------------------------------------
# module operations
# ---------------------------------------------------------------------------


def tree_path(tree, u, v):
    """Ordered edge list of the unique u-v path (empty when u == v)."""
    return tree.path(u, v)


def nca(tree, u, v):
    """Nearest common ancestor in a rooted tree."""
    return tree.nca(u, v)


def cov(instance, edge_set):
    """Identifiers of all links whose path meets the given tree edges."""
    idx = instance._cov_index()
    out = set()
    for e in edge_set:
        e = edge_key(*e)
        if e not in idx:
            raise InputError(f"{e} is not a tree edge")
        out |= idx[e]
    return out


def shadow_complete(instance):
    """Close the link set under shadows.

    For every link and every node pair (p, q) on its path, a link (p, q)
    carrying that link's own cost is ensured (deduplicated on identical
    (endpoints, cost)).  Keeping one copy per distinct originating cost --
    rather than only the cheapest -- lets fractional mass be shifted onto a
    shadow of equal cost, which keeps cost accounting exact under the
    splitting operation.  The cheapest copy per endpoint pair is exactly the
    classical min-rule shadow.  The optimal value is unchanged.
    """
    tree = instance.tree
    links = dict(instance.links)
    by_key = dict(instance._by_pair_cost)
    next_id = max(links, default=-1) + 1
    for lid in sorted(instance.links):
        link = instance.links[lid]
        path = tree.path(link.u, link.v)
        if not path:
            continue
        # node sequence along the path
        seq = [link.u]
        for a, b in path:
            seq.append(b if seq[-1] == a else a)
        for i in range(len(seq)):
            for j in range(i + 1, len(seq)):
                p, q = edge_key(seq[i], seq[j])
                key = (p, q, link.cost)
                if key in by_key:
                    continue
                origin = lid if link.origin is None else link.origin
                by_key[key] = next_id
                links[next_id] = Link(p, q, link.cost, origin=origin)
                next_id += 1
    return Instance(tree, links, shadow_complete=True)


def _components(nodes, edges):
    par = {u: u for u in nodes}

    def find(u):
        while par[u] != u:
            par[u] = par[par[u]]
            u = par[u]
        return u

    for a, b in edges:
        ra, rb = find(a), find(b)
        if ra != rb:
            par[ra] = rb
    comps = {}
    for u in nodes:
        comps.setdefault(find(u), set()).add(u)
    return sorted((frozenset(c) for c in comps.values()), key=min)


def contract(instance, edge_set, prior=None):
    """Contract a set of tree edges; links are re-targeted and self-loops
    dropped.  Returns the contracted instance and a CompoundInfo whose
    node_origin always refers to original nodes (composed with ``prior``).
    The result does not depend on the order edges are contracted in."""
    tree = instance.tree
    edge_set = {edge_key(*e) for e in edge_set}
    for e in edge_set:
        if e not in tree.edges:
            raise InputError(f"{e} is not a tree edge")
    if prior is None:
        prior = CompoundInfo.identity(tree.nodes)
    comps = _components(tree.nodes, edge_set)
    next_id = max(tree.nodes) + 1
    node_map = {}
    new_origin = {}
    new_s = {}
    new_early = set()
    for comp in comps:
        if len(comp) == 1:
            (w,) = comp
            new = w
        else:
            new = next_id
            next_id += 1
        origin = frozenset().union(*(prior.node_origin[u] for u in comp))
        s_val = sum((prior.s[u] for u in comp), Fraction(0))
        if any(u in prior.early for u in comp):
            new_early.add(new)
        for u in comp:
            node_map[u] = new
        new_origin[new] = origin
        new_s[new] = s_val
    new_nodes = set(new_origin)
    new_edges = set()
    for a, b in tree.edges:
        if edge_key(a, b) in edge_set:
            continue
        new_edges.add(edge_key(node_map[a], node_map[b]))
    new_root = node_map[tree.root] if tree.root is not None else None
    new_tree = Tree(new_nodes, new_edges, root=new_root)
    new_links = {}
    for lid, link in instance.links.items():
        a, b = node_map[link.u], node_map[link.v]
        if a == b:
            continue  # became a self-loop
        new_links[lid] = Link(a, b, link.cost, origin=link.origin)
    # identical (endpoints, cost) links can collide after contraction;
    # keep the smallest id per key and record aliases so fractional mass
    # carried on a dropped id can be re-pointed at the survivor
    dedup = {}
    alias = {}
    for lid in sorted(new_links):
        link = new_links[lid]
        key = (link.u, link.v, link.cost)
        if key not in dedup:
            dedup[key] = (lid, link)
        else:
            alias[lid] = dedup[key][0]
    info = CompoundInfo(new_origin, new_s, frozenset(new_early))
    result = Instance(
        new_tree,
        {lid: link for lid, link in dedup.values()},
        shadow_complete=instance.shadow_complete,
    )
    result.link_alias = alias
    return result, info


def remap_solution(x, instance):
    """Carry a fractional solution into a transformed instance: merge mass
    over link aliases and drop mass on links that no longer exist (became
    self-loops)."""
    alias = instance.link_alias
    out = {}
    for lid, val in x.items():
        if val == 0:
            continue
        tid = alias.get(lid, lid)
        if tid in instance.links:
            out[tid] = out.get(tid, Fraction(0)) + val
    return out


def is_feasible(instance, link_ids):
    """(True, None) iff the union of the links' paths covers every tree edge;
    otherwise (False, first uncovered edge in canonical order)."""
    covered = set()
    for lid in link_ids:
        if lid not in instance.links:
            raise InputError(f"unknown link id {lid}")
        covered |= instance.link_path(lid)
    for e in instance.tree.sorted_edges():
        if e not in covered:
            return False, e
    return True, None


def is_feasible_bridges(instance, link_ids):
    """Independent feasibility check: the tree plus the chosen links is
    2-edge-connected iff the multigraph has no bridge."""
    tree = instance.tree
    edges = [(u, v) for u, v in tree.edges]
    for lid in link_ids:
        link = instance.links[lid]
        edges.append((link.u, link.v))
    adj = {u: [] for u in tree.nodes}
    for eid, (u, v) in enumerate(edges):
        adj[u].append((v, eid))
        adj[v].append((u, eid))
    disc = {}
    low = {}
    counter = [0]
    start = next(iter(tree.nodes))
    # iterative DFS; tracks the edge id used to enter so parallel edges count
    stack = [(start, -1, iter(adj[start]))]
    disc[start] = low[start] = counter[0]
    counter[0] += 1
    has_bridge = False
    while stack:
        u, in_eid, it = stack[-1]
        advanced = False
        for v, eid in it:
            if eid == in_eid:
                continue
            if v not in disc:
                disc[v] = low[v] = counter[0]
                counter[0] += 1
                stack.append((v, eid, iter(adj[v])))
                advanced = True
                break
            low[u] = min(low[u], disc[v])
        if not advanced:
            stack.pop()
            if stack:
                p = stack[-1][0]
                low[p] = min(low[p], low[u])
                if low[u] > disc[p]:
                    has_bridge = True
    if len(disc) != len(tree.nodes):
        return False
    return not has_bridge
