"""Seeded random instance generation.

The PRNG is xorshift64* with the standard constants (shifts 12/25/27,
multiplier 0x2545F4914F6CDD1D), so seeded runs are reproducible across
machines and languages.  Integers are drawn by rejection sampling, which
keeps them exactly uniform.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import InputError
from .graph import Instance, Link, Tree

_MASK = (1 << 64) - 1
_MULT = 0x2545F4914F6CDD1D
_SEED_FALLBACK = 0x9E3779B97F4A7C15  # state must never be zero


class XorShift64Star(object):
    def __init__(self, seed):
        self.state = (int(seed) & _MASK) or _SEED_FALLBACK

    def next_u64(self):
        x = self.state
        x ^= x >> 12
        x = (x ^ (x << 25)) & _MASK
        x ^= x >> 27
        self.state = x
        return (x * _MULT) & _MASK

    def randrange(self, n):
        if n <= 0:
            raise InputError("randrange needs a positive bound")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            r = self.next_u64()
            if r < limit:
                return r % n

    def randint(self, lo, hi):
        return lo + self.randrange(hi - lo + 1)

    def choice(self, seq):
        return seq[self.randrange(len(seq))]


TOPOLOGIES = ("random_tree", "path", "star", "caterpillar", "leaf_links_only")


@dataclass
class GenParams(object):
    n: int
    topology: str = "random_tree"
    density: float = 1.5  # target link count ~ density * n
    cost_max: int = 1  # costs drawn uniformly from 1..cost_max
    mode: str = "wtap"

    def __post_init__(self):
        if self.n < 1:
            raise InputError("n must be at least 1")
        if self.topology not in TOPOLOGIES:
            raise InputError(f"unknown topology {self.topology!r}")
        if self.cost_max < 1:
            raise InputError("cost_max must be at least 1")
        if self.mode == "tap" and self.cost_max != 1:
            raise InputError("tap generation requires cost_max = 1")


def _prufer_tree(n, rng):
    import heapq

    if n == 1:
        return Tree([1], [])
    if n == 2:
        return Tree([1, 2], [(1, 2)])
    seq = [rng.randint(1, n) for _ in range(n - 2)]
    degree = {v: 1 for v in range(1, n + 1)}
    for v in seq:
        degree[v] += 1
    edges = []
    leaves = [v for v in range(1, n + 1) if degree[v] == 1]
    heapq.heapify(leaves)
    for v in seq:
        leaf = heapq.heappop(leaves)
        edges.append((leaf, v))
        degree[leaf] -= 1
        degree[v] -= 1
        if degree[v] == 1:
            heapq.heappush(leaves, v)
    u, v = heapq.heappop(leaves), heapq.heappop(leaves)
    edges.append((u, v))
    return Tree(range(1, n + 1), edges)


def _topology_tree(params, rng):
    n = params.n
    if params.topology == "path":
        return Tree(range(1, n + 1), [(i, i + 1) for i in range(1, n)])
    if params.topology == "star":
        return Tree(range(1, n + 1), [(1, i) for i in range(2, n + 1)])
    if params.topology == "caterpillar":
        spine = max(2, n // 2) if n >= 2 else 1
        edges = [(i, i + 1) for i in range(1, spine)]
        for leg, node in enumerate(range(spine + 1, n + 1)):
            edges.append((1 + leg % spine, node))
        return Tree(range(1, n + 1), edges)
    return _prufer_tree(n, rng)


def _draw_cost(params, rng):
    return Fraction(rng.randint(1, params.cost_max))


def generate_instance(params, seed):
    """Deterministic random instance; feasibility is forced by adding cover
    links for any edge the sample left uncoverable (a leaf cycle for the
    leaf-links-only topology, per-edge links otherwise)."""
    rng = XorShift64Star(seed)
    tree = _topology_tree(params, rng)
    n = params.n
    best = {}

    def add(u, v, cost):
        if u == v:
            return
        key = (min(u, v), max(u, v))
        if key not in best or cost < best[key]:
            best[key] = cost

    nodes = sorted(tree.nodes)
    leaves = tree.leaves()
    target = max(1, round(params.density * n)) if n > 1 else 0
    for _ in range(target):
        if params.topology == "leaf_links_only":
            if len(leaves) < 2:
                break
            u = rng.choice(leaves)
            v = rng.choice(leaves)
        else:
            u = rng.choice(nodes)
            v = rng.choice(nodes)
        add(u, v, _draw_cost(params, rng))

    def covered_edges():
        out = set()
        for (u, v) in best:
            out |= set(tree.path(u, v))
        return out

    if n > 1:
        missing = set(tree.edges) - covered_edges()
        if missing:
            if params.topology == "leaf_links_only":
                ring = leaves
                for a, b in zip(ring, ring[1:] + ring[:1]):
                    add(a, b, _draw_cost(params, rng))
            else:
                for u, v in sorted(missing):
                    add(u, v, _draw_cost(params, rng))
        missing = set(tree.edges) - covered_edges()
        if missing:
            raise InputError(f"generator could not make edge {min(missing)} coverable")

    links = [Link(u, v, cost) for (u, v), cost in sorted(best.items())]
    inst = Instance(tree, links)
    inst.kind = "tap" if params.mode == "tap" else "wtap"
    return inst
