"""Text instance format and solution files.

Format (1-based node ids, '#' starts a comment):

    wtap <n> <num_edges> <num_links>
    edge <u> <v>
    ...
    link <u> <v> <cost>
    ...

Costs are exact rationals ("3" or "7/2").  ``tap`` as the kind requires unit
costs.  Writing is canonical (sorted records), so write -> parse -> write is
byte-identical.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import InputError, ParseError
from .graph import Instance, Link, Tree


def _content_lines(text):
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield no, line


def parse_instance(text):
    """Parse instance text; duplicate-endpoint links keep the minimum cost."""
    lines = list(_content_lines(text))
    if not lines:
        raise ParseError("empty instance")
    no, header = lines[0]
    parts = header.split()
    if len(parts) != 4 or parts[0] not in ("wtap", "tap"):
        raise ParseError("header must be '<wtap|tap> <n> <edges> <links>'", no)
    kind = parts[0]
    try:
        n, n_edges, n_links = (int(p) for p in parts[1:])
    except ValueError:
        raise ParseError("header counts must be integers", no)
    if len(lines) != 1 + n_edges + n_links:
        raise ParseError(
            f"expected {n_edges} edge and {n_links} link lines, got {len(lines) - 1}"
        )

    def node(tok, no):
        try:
            v = int(tok)
        except ValueError:
            raise ParseError(f"bad node id {tok!r}", no)
        if not 1 <= v <= n:
            raise ParseError(f"node id {v} out of range 1..{n}", no)
        return v

    edges = []
    for no, line in lines[1 : 1 + n_edges]:
        parts = line.split()
        if len(parts) != 3 or parts[0] != "edge":
            raise ParseError("expected 'edge <u> <v>'", no)
        edges.append((node(parts[1], no), node(parts[2], no)))
    best = {}
    for no, line in lines[1 + n_edges :]:
        parts = line.split()
        if len(parts) != 4 or parts[0] != "link":
            raise ParseError("expected 'link <u> <v> <cost>'", no)
        u, v = node(parts[1], no), node(parts[2], no)
        if u == v:
            raise ParseError("link endpoints must differ", no)
        try:
            cost = Fraction(parts[3])
        except (ValueError, ZeroDivisionError):
            raise ParseError(f"bad cost {parts[3]!r}", no)
        if cost < 0:
            raise ParseError(f"negative cost {cost}", no)
        if kind == "tap" and cost != 1:
            raise ParseError(f"unit costs required in tap instances, got {cost}", no)
        key = (min(u, v), max(u, v))
        if key not in best or cost < best[key]:
            best[key] = cost
    tree = Tree(range(1, n + 1), edges)
    links = [Link(u, v, cost) for (u, v), cost in sorted(best.items())]
    inst = Instance(tree, links)
    inst.kind = kind
    return inst


def write_instance(instance, kind=None):
    kind = kind or getattr(instance, "kind", "wtap")
    if kind not in ("wtap", "tap"):
        raise InputError(f"unknown instance kind {kind!r}")
    tree = instance.tree
    out = [f"{kind} {len(tree.nodes)} {len(tree.edges)} {len(instance.links)}"]
    for u, v in tree.sorted_edges():
        out.append(f"edge {u} {v}")
    records = sorted(
        (link.u, link.v, link.cost) for link in instance.links.values()
    )
    for u, v, cost in records:
        out.append(f"link {u} {v} {cost}")
    return "\n".join(out) + "\n"


def parse_solution(text, instance):
    """Parse a solution file: one 'link <u> <v> [<cost>]' or '<u> <v>' per
    line; each line must name a link of the instance (cheapest match when
    the cost is omitted)."""
    chosen = set()
    for no, line in _content_lines(text):
        parts = line.split()
        if parts and parts[0] == "link":
            parts = parts[1:]
        if len(parts) not in (2, 3):
            raise ParseError("expected '<u> <v> [cost]'", no)
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError("bad node id", no)
        if u not in instance.tree.nodes or v not in instance.tree.nodes:
            raise ParseError(f"unknown node in link ({u},{v})", no)
        if len(parts) == 3:
            try:
                cost = Fraction(parts[2])
            except (ValueError, ZeroDivisionError):
                raise ParseError(f"bad cost {parts[2]!r}", no)
            lid = instance.find_link(u, v, cost)
        else:
            lid = instance.cheapest_link(u, v)
        if lid is None:
            raise ParseError(f"no such link ({u},{v})", no)
        chosen.add(lid)
    return chosen


def write_solution(instance, link_ids):
    records = sorted(
        (instance.links[lid].u, instance.links[lid].v, instance.links[lid].cost)
        for lid in link_ids
    )
    return "".join(f"link {u} {v} {cost}\n" for u, v, cost in records)
