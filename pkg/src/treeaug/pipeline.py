"""End-to-end rounding pipeline for weighted and unit-cost tree augmentation.

The flow: shadow-complete, solve the bundle LP, contract heavily covered
edges, decompose into simple pairs, then round each pair with whichever of
the two procedures its cross-link mass fraction favors.  The per-pair cost
guarantee is certified at runtime in exact Q(sqrt5) arithmetic.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, replace
from fractions import Fraction

from .decompose import contract_heavy, decompose, edge_coverage
from .errors import InputError, InternalInvariantError, SizeLimitError
from .exact import brute_force_opt, few_leaf_opt, make_bundle_oracle
from .graph import Instance, contract, is_feasible, remap_solution
from .lp import build_bundle_lp, build_cut_lp, solve_lp
from .quadratic import (
    CROSS_RATIO_CUTOFF,
    GUARANTEE_FACTOR,
    STAR_SCALE,
    Sqrt5,
    star_branch_factor,
)
from .rounding import optimal_uplink_cover, star_cover, two_approx_round


@dataclass
class Config(object):
    """Pipeline parameters.

    ``gamma``, ``alpha`` and ``beta`` default to the values derived from eps
    and the cost ceiling (200M/eps^2, 4M/eps^2, 48M/eps^2); explicit
    overrides exercise individual phases at desk scale and are reported as
    the override regime.
    """

    eps: Fraction = Fraction(1)
    m: Fraction = Fraction(1)
    mode: str = "wtap"
    gamma: int | None = None
    alpha: Fraction | None = None
    beta: Fraction | None = None
    bundle_cap: int | None = None
    few_leaf_limit: int = 16
    brute_force_limit: int = 22
    collect_trace: bool = False

    def __post_init__(self):
        self.eps = Fraction(self.eps)
        self.m = Fraction(self.m)
        if self.eps <= 0:
            raise InputError("eps must be positive")
        if self.m < 1:
            raise InputError("cost ceiling must be at least 1")
        if self.mode not in ("wtap", "tap"):
            raise InputError(f"unknown mode {self.mode!r}")
        if self.alpha is not None:
            self.alpha = Fraction(self.alpha)
        if self.beta is not None:
            self.beta = Fraction(self.beta)

    @property
    def gamma_value(self):
        if self.gamma is not None:
            return self.gamma
        g = 200 * self.m / self.eps**2
        return int(math.ceil(g))

    @property
    def alpha_value(self):
        return self.alpha if self.alpha is not None else 4 * self.m / self.eps**2

    @property
    def beta_value(self):
        return self.beta if self.beta is not None else 48 * self.m / self.eps**2

    @property
    def overridden(self):
        return self.gamma is not None or self.alpha is not None or self.beta is not None

    def numeric_constants(self):
        return {
            "lambda": float(STAR_SCALE),
            "alpha_star": float(CROSS_RATIO_CUTOFF),
            "delta": float(GUARANTEE_FACTOR),
        }

    def to_dict(self):
        return {
            "eps": str(self.eps),
            "m": str(self.m),
            "mode": self.mode,
            "gamma": self.gamma_value,
            "alpha": str(self.alpha_value),
            "beta": str(self.beta_value),
            "bundle_cap": self.bundle_cap,
            "overridden": self.overridden,
            **self.numeric_constants(),
        }


@dataclass
class Solution(object):
    links: frozenset  # original link identifiers
    cost: Fraction
    provenance: dict  # link id -> {L0, L1, phase2_star, phase2_exact, tap_round}


@dataclass
class RunReport(object):
    instance_id: str
    n: int
    m: int
    mode: str
    config: dict
    lp_cut: Fraction
    lp_bundle: Fraction
    cost: Fraction
    regime: str
    per_pair: list
    lemma_ledger: list
    timings_ms: dict
    opt: Fraction | None = None
    ratio_vs_lp: float | None = None
    ratio_vs_opt: float | None = None

    def to_dict(self):
        def q(v):
            return None if v is None else str(v)

        return {
            "instance_id": self.instance_id,
            "n": self.n,
            "m": self.m,
            "mode": self.mode,
            "config": self.config,
            "lp_cut": q(self.lp_cut),
            "lp_bundle": q(self.lp_bundle),
            "opt": q(self.opt),
            "cost": q(self.cost),
            "ratio_vs_lp": self.ratio_vs_lp,
            "ratio_vs_opt": self.ratio_vs_opt,
            "regime": self.regime,
            "per_pair": self.per_pair,
            "lemma_ledger": self.lemma_ledger,
            "timings_ms": self.timings_ms,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)


def classify_links(pair, center):
    """Split a pair's solution into in-link and cross-link parts relative to
    the components left by removing the center.  Links touching the center
    are in-links; cross-links join two different components."""
    comp_of = {}
    for idx, comp in enumerate(pair.tree.components_without(center)):
        for u in comp:
            comp_of[u] = idx
    z_in, z_cr = {}, {}
    for lid, val in pair.z.items():
        if val == 0:
            continue
        link = pair.instance.links[lid]
        if center in (link.u, link.v) or comp_of[link.u] == comp_of[link.v]:
            z_in[lid] = val
        else:
            z_cr[lid] = val
    return z_in, z_cr


def round_nearly_star(pair, center):
    """Rounding branch for pairs whose cost is dominated by cross-links.

    Edges mostly covered by in-link mass (at least 1/(3+sqrt5)) are handled
    by the factor-2 up-link rounding on their contraction; the remaining
    tree, restricted to supported cross-links, is star-shaped around the
    center and is finished by the exact edge-cover rounding.  Both stage
    bounds are asserted exactly in Q(sqrt5).
    """
    inst = pair.instance
    z_in, z_cr = classify_links(pair, center)
    cost_in = inst.solution_cost(z_in)
    cost_cr = inst.solution_cost(z_cr)
    in_mass = edge_coverage(inst, z_in)
    inv_scale = STAR_SCALE.inverse()  # (3 - sqrt5)/4
    heavy = {e for e in inst.tree.edges if Sqrt5(in_mass[e]) >= inv_scale}

    s1 = set()
    if heavy:
        light = set(inst.tree.edges) - heavy
        heavy_inst, _ = contract(inst, light)
        rooted = heavy_inst.with_root(min(heavy_inst.tree.nodes))
        s1, _lp_val = optimal_uplink_cover(rooted)
        bound1 = Sqrt5(2) * STAR_SCALE * Sqrt5(cost_in)
        if Sqrt5(inst.cost_of(s1)) > bound1:
            raise InternalInvariantError("in-link stage exceeded its bound")

    s2 = set()
    if len(heavy) < len(inst.tree.edges):
        rest_inst, info = contract(inst, heavy)
        hub = next(w for w, orig in info.node_origin.items() if center in orig)
        z_cr_rest = remap_solution(z_cr, rest_inst)
        cross_inst = Instance(
            rest_inst.tree,
            {lid: rest_inst.links[lid] for lid in z_cr_rest},
            shadow_complete=False,
        )
        s2 = star_cover(cross_inst, hub=hub)
        bound2 = (
            Sqrt5(4)
            * STAR_SCALE
            / (Sqrt5(3) * (STAR_SCALE - Sqrt5(1)))
            * Sqrt5(cost_cr)
        )
        if Sqrt5(inst.cost_of(s2)) > bound2:
            raise InternalInvariantError("cross-link stage exceeded its bound")

    chosen = s1 | s2
    ok, witness = is_feasible(inst, chosen)
    if not ok:
        raise InternalInvariantError(f"near-star rounding misses edge {witness}")
    return chosen


def round_nearly_decomposable(pair, center, compound, exact, ledger_sink=None):
    """Rounding branch for pairs dominated by in-link cost.

    Cross-link mass is re-routed through the center via shadows, which makes
    the solution split over the center's subtrees; each subtree is then
    solved exactly.  When the driving solution came from the bundle LP at
    the derived gamma, each subtree optimum is certified against its
    fractional cost plus the absorbed compound cost.
    """
    inst = pair.instance
    z_in, z_cr = classify_links(pair, center)
    y = dict(z_in)
    for lid, val in z_cr.items():
        link = inst.links[lid]
        for t in (link.u, link.v):
            sid = inst.cheapest_link(t, center)
            if sid is None:
                raise InternalInvariantError(
                    f"missing shadow ({t},{center}) for cross-link {lid}"
                )
            y[sid] = y.get(sid, Fraction(0)) + val
    cost_in = inst.solution_cost(z_in)
    cost_cr = inst.solution_cost(z_cr)
    if inst.solution_cost(y) > cost_in + 2 * cost_cr:
        raise InternalInvariantError("shadow replacement exceeded its budget")

    chosen = set()
    for comp in pair.tree.components_without(center):
        nodes = set(comp) | {center}
        sub = inst.restrict(nodes)
        ybar = {lid: v for lid, v in y.items() if lid in sub.links and v > 0}
        try:
            sol = exact(sub)
        except SizeLimitError as exc:
            exc.detail = sorted(nodes)
            raise
        if ledger_sink is not None:
            ledger_sink.append(
                {
                    "opt": sol.cost,
                    "ybar_cost": sub.solution_cost(ybar),
                    "s_sum": compound.s_of(nodes & set(compound.s)),
                }
            )
        chosen |= sol.links
    ok, witness = is_feasible(inst, chosen)
    if not ok:
        raise InternalInvariantError(f"subtree union misses edge {witness}")
    return chosen


def round_tap_pair(pair, center):
    """Unit-cost rounding branch: after shifting in-links onto up-link
    shadows, repeatedly contract forced up-links and leaf-to-leaf support
    links; once neither applies, one cross-link per leaf finishes the tree.
    The link count is at most 2 z_in(L) + 3/2 z_cr(L), asserted exactly.
    """
    inst = pair.instance
    for lid, link in inst.links.items():
        if link.cost != 1:
            raise InputError(f"unit costs required, link {lid} costs {link.cost}")
    rooted = inst.with_root(center)
    z_in, z_cr = classify_links(pair, center)
    mass_in = sum(z_in.values(), Fraction(0))
    mass_cr = sum(z_cr.values(), Fraction(0))

    y = {}
    for lid, val in z_in.items():
        link = inst.links[lid]
        w = rooted.tree.nca(link.u, link.v)
        if w in (link.u, link.v):
            y[lid] = y.get(lid, Fraction(0)) + val
        else:
            for t in (link.u, link.v):
                sid = inst.cheapest_link(t, w)
                if sid is None:
                    raise InternalInvariantError(f"missing up shadow ({t},{w})")
                y[sid] = y.get(sid, Fraction(0)) + val
    for lid, val in z_cr.items():
        y[lid] = y.get(lid, Fraction(0)) + val
    if sum(y.values(), Fraction(0)) > 2 * mass_in + mass_cr:
        raise InternalInvariantError("up-shadow replacement exceeded its budget")

    chosen = set()
    cur = rooted
    support = {lid: val for lid, val in y.items() if val > 0}
    while cur.tree.edges:
        tree = cur.tree
        up = set()
        for lid in support:
            link = cur.links[lid]
            if tree.nca(link.u, link.v) in (link.u, link.v):
                up.add(lid)
        idx = cur._cov_index()
        leaves = tree.leaves()
        picked = None
        for leaf in leaves:
            leaf_edge = tuple(sorted((leaf, tree.adj[leaf][0])))
            covering = sorted(lid for lid in idx[leaf_edge] if lid in support)
            if not covering:
                raise InternalInvariantError(f"support misses leaf edge {leaf_edge}")
            if all(lid in up for lid in covering):
                picked = max(covering, key=lambda lid: (len(cur.link_path(lid)), -lid))
                break
        if picked is None:
            leafset = set(leaves)
            joining = [
                lid
                for lid in sorted(support)
                if cur.links[lid].u in leafset and cur.links[lid].v in leafset
            ]
            if joining:
                picked = joining[0]
        if picked is not None:
            chosen.add(picked)
            cur, _ = contract(cur, cur.link_path(picked))
            support = remap_solution(support, cur)
            continue
        for leaf in leaves:
            leaf_edge = tuple(sorted((leaf, tree.adj[leaf][0])))
            covering = [
                lid for lid in sorted(idx[leaf_edge]) if lid in support and lid not in up
            ]
            if not covering:
                raise InternalInvariantError(
                    f"no support cross-link at leaf {leaf} in the final step"
                )
            chosen.add(covering[0])
        break

    bound = 2 * mass_in + Fraction(3, 2) * mass_cr
    if Fraction(len(chosen)) > bound:
        raise InternalInvariantError(f"{len(chosen)} links exceed bound {bound}")
    ok, witness = is_feasible(inst, chosen)
    if not ok:
        raise InternalInvariantError(f"unit-cost rounding misses edge {witness}")
    return chosen


def _default_exact(config):
    def solver(sub):
        if len(sub.tree.leaves()) <= config.few_leaf_limit:
            return few_leaf_opt(sub, k_limit=config.few_leaf_limit)
        if len(sub.links) <= config.brute_force_limit:
            return brute_force_opt(sub, limit=config.brute_force_limit)
        raise SizeLimitError(
            f"subtree has {len(sub.tree.leaves())} leaves and {len(sub.links)} links"
        )

    return solver


def _certify_pair(cross_fraction, pair_cost, s_sum):
    """Exact check that the better of the two branch bounds stays within the
    guaranteed factor of the pair cost plus absorbed compound cost."""
    t = Sqrt5(cross_fraction)
    star_bound = star_branch_factor(t) * Sqrt5(pair_cost)
    exact_bound = (Sqrt5(1) + t) * Sqrt5(pair_cost) + Sqrt5(s_sum)
    lhs = star_bound if star_bound <= exact_bound else exact_bound
    rhs = GUARANTEE_FACTOR * Sqrt5(pair_cost) + Sqrt5(s_sum)
    if lhs > rhs:
        raise InternalInvariantError("per-pair guarantee certification failed")
    return float(lhs), float(rhs)


def _run_pipeline(instance, config, instance_id="instance"):
    timings = {}
    t_start = time.perf_counter()

    for lid, link in instance.links.items():
        if config.mode == "tap":
            if link.cost != 1:
                raise InputError(f"unit costs required, link {lid} costs {link.cost}")
        elif not 1 <= link.cost <= config.m:
            raise InputError(
                f"link {lid} cost {link.cost} outside [1, {config.m}]"
            )

    completed = instance if instance.shadow_complete else _complete(instance)
    cut_lp = build_cut_lp(completed)  # raises on uncoverable edges
    cut_sol = solve_lp(cut_lp)
    if cut_sol.status != "optimal":
        raise InternalInvariantError(f"cut LP came back {cut_sol.status}")
    oracle = make_bundle_oracle(completed, k_limit=max(32, config.few_leaf_limit))
    bundle_lp = build_bundle_lp(
        completed, config.gamma_value, oracle, cap=config.bundle_cap
    )
    bundle_sol = solve_lp(bundle_lp)
    if bundle_sol.status != "optimal":
        raise InternalInvariantError(f"bundle LP came back {bundle_sol.status}")
    x = bundle_sol.support()
    timings["lp_ms"] = round(1000 * (time.perf_counter() - t_start), 3)

    t1 = time.perf_counter()
    gbar, l0, info = contract_heavy(completed, x, config.eps)
    xbar = remap_solution(x, gbar)
    dres = decompose(
        gbar,
        xbar,
        config.eps,
        config.m,
        alpha=config.alpha_value,
        beta=config.beta_value,
        l0=l0,
        compound=info,
        collect_trace=config.collect_trace,
    )
    timings["phase1_ms"] = round(1000 * (time.perf_counter() - t1), 3)

    t2 = time.perf_counter()
    certified_gamma = (
        config.gamma is None and config.bundle_cap is None and not bundle_lp.truncated
    )
    exact_solver = _default_exact(config)
    provenance = {}
    chosen = set()
    for lid in sorted(l0):
        provenance.setdefault(lid, "L0")
        chosen.add(lid)
    for lid in dres.l1:
        provenance.setdefault(lid, "L1")
        chosen.add(lid)
    per_pair = []
    lemma_ledger = []
    for pair, (center, _comps) in zip(dres.pairs, dres.centers):
        pair_cost = pair.cost()
        if pair_cost == 0:
            if pair.tree.edges:
                raise InternalInvariantError("zero-cost pair with uncovered edges")
            continue
        z_in, z_cr = classify_links(pair, center)
        record = {"n": len(pair.tree.nodes)}
        forfeited = False
        if config.mode == "tap":
            mass = sum(pair.z.values(), Fraction(0))
            mass_cr = sum(z_cr.values(), Fraction(0))
            rho = mass_cr / mass
            record["alpha_j"] = float(rho)
            tap_bound = 2 * (mass - mass_cr) + Fraction(3, 2) * mass_cr
            s_sum = info.s_of(set(pair.tree.nodes) & set(info.s))
            exact_bound = (mass - mass_cr) + 2 * mass_cr + s_sum
            lhs = min(tap_bound, exact_bound)
            rhs = Fraction(5, 3) * mass + s_sum
            if lhs > rhs:
                raise InternalInvariantError("unit-cost per-pair certification failed")
            record["bound_lhs"] = float(lhs)
            record["bound_rhs"] = float(rhs)
            if 3 * mass_cr >= 2 * mass:
                record["branch"] = "tap_round"
                links = round_tap_pair(pair, center)
                tag = "tap_round"
            else:
                record["branch"] = "phase2_exact"
                tag = "phase2_exact"
                try:
                    links = round_nearly_decomposable(
                        pair, center, info, exact_solver,
                        ledger_sink=lemma_ledger if certified_gamma else None,
                    )
                except SizeLimitError:
                    links = two_approx_round(pair.instance, pair.z, root=center)
                    tag = "phase2_star"
                    forfeited = True
        else:
            cost_cr = pair.instance.solution_cost(z_cr)
            alpha_j = cost_cr / pair_cost
            s_sum = info.s_of(set(pair.tree.nodes) & set(info.s))
            lhs, rhs = _certify_pair(alpha_j, pair_cost, s_sum)
            record["alpha_j"] = float(alpha_j)
            record["bound_lhs"] = lhs
            record["bound_rhs"] = rhs
            if Sqrt5(alpha_j) >= CROSS_RATIO_CUTOFF:
                record["branch"] = "phase2_star"
                links = round_nearly_star(pair, center)
                tag = "phase2_star"
            else:
                record["branch"] = "phase2_exact"
                tag = "phase2_exact"
                try:
                    links = round_nearly_decomposable(
                        pair, center, info, exact_solver,
                        ledger_sink=lemma_ledger if certified_gamma else None,
                    )
                except SizeLimitError:
                    links = two_approx_round(pair.instance, pair.z, root=center)
                    tag = "phase2_star"
                    forfeited = True
        record["forfeited"] = forfeited
        per_pair.append(record)
        for lid in links:
            provenance.setdefault(lid, tag)
        chosen |= links
    timings["phase2_ms"] = round(1000 * (time.perf_counter() - t2), 3)

    original = set()
    prov_orig = {}
    for lid in chosen:
        link = completed.links[lid]
        oid = link.origin if link.origin is not None else lid
        original.add(oid)
        prov_orig.setdefault(oid, provenance[lid])
    ok, witness = is_feasible(instance, original)
    if not ok:
        raise InternalInvariantError(f"assembled solution misses edge {witness}")
    cost = instance.cost_of(original)
    timings["total_ms"] = round(1000 * (time.perf_counter() - t_start), 3)

    regime = "paper" if not config.overridden and not bundle_lp.truncated else "override"
    if bundle_lp.has_full_bundle:
        regime += "-collapsed"
    solution = Solution(frozenset(original), cost, prov_orig)
    lemma_rows = [
        {
            "opt": str(row["opt"]),
            "ybar_cost": str(row["ybar_cost"]),
            "s_sum": str(row["s_sum"]),
            "holds": row["opt"] <= row["ybar_cost"] + row["s_sum"],
        }
        for row in lemma_ledger
    ]
    if certified_gamma:
        for row in lemma_ledger:
            if row["opt"] > row["ybar_cost"] + row["s_sum"]:
                raise InternalInvariantError("subtree optimum exceeded certified budget")
    report = RunReport(
        instance_id=instance_id,
        n=len(instance.tree.nodes),
        m=len(instance.links),
        mode=config.mode,
        config=config.to_dict(),
        lp_cut=cut_sol.objective_value,
        lp_bundle=bundle_sol.objective_value,
        cost=cost,
        regime=regime,
        per_pair=per_pair,
        lemma_ledger=lemma_rows,
        timings_ms=timings,
    )
    if report.lp_bundle > 0:
        report.ratio_vs_lp = float(Fraction(cost) / report.lp_bundle)
    return solution, report


def _complete(instance):
    from .graph import shadow_complete

    return shadow_complete(instance)


def solve_wtap(instance, config=None, instance_id="instance"):
    """Solve a bounded-cost instance; returns the solution (in original link
    identifiers) and the run report with the certified per-pair bounds."""
    config = config or Config()
    if config.mode != "wtap":
        config = replace(config, mode="wtap")
    return _run_pipeline(instance, config, instance_id)


def solve_tap(instance, config=None, instance_id="instance"):
    """Unit-cost variant: same pipeline with cost ceiling 1 and the
    mass-ratio branch rule."""
    config = config or Config(mode="tap")
    if config.mode != "tap" or config.m != 1:
        config = replace(config, mode="tap", m=Fraction(1))
    return _run_pipeline(instance, config, instance_id)
