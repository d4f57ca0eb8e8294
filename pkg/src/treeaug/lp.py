"""Exact rational linear programming over covering constraints.

The solver is a dense two-phase simplex with Bland's anti-cycling rule,
carried out entirely over rationals, so optimal values and slacks are exact
and vertex (basic) solutions are certified.  Constraint rows can be
activated lazily: a solution optimal for an active subset and feasible for
all rows is an optimal vertex of the full program, which keeps tableaux
small when most rows (e.g. bundle rows) are slack at the optimum.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from . import kernel
from .errors import InfeasibleInstanceError, InputError, InternalInvariantError
from .graph import cov, edge_key

#: activate at most this many violated rows per lazy round
_ACTIVATE_BATCH = 24
#: below this row count there is no point being lazy
_LAZY_THRESHOLD = 48


@dataclass
class Constraint(object):
    """A sparse >= row: sum(coeffs[j] * x_j) >= rhs."""

    coeffs: dict
    rhs: Fraction
    name: str = ""


@dataclass
class LinearProgram(object):
    variables: list  # column order; entries are link identifiers
    objective: list  # Fraction per column
    constraints: list  # Constraint rows, all with relation >=
    truncated: bool = False  # bundle enumeration hit its cap
    bundle_count: int = 0
    has_full_bundle: bool = False  # some bundle is the whole edge set

    def n_vars(self):
        return len(self.variables)

    def validate(self):
        n = self.n_vars()
        if len(self.objective) != n:
            raise InputError("objective length does not match variable count")
        for con in self.constraints:
            for j in con.coeffs:
                if not 0 <= j < n:
                    raise InputError(f"constraint {con.name} uses column {j} out of range")


@dataclass
class LpSolution(object):
    values: dict  # link identifier -> Fraction
    objective_value: Fraction
    status: str  # optimal | infeasible | unbounded
    basic: bool = True

    def support(self):
        return {k: v for k, v in self.values.items() if v != 0}


@dataclass(frozen=True)
class Bundle(object):
    """An edge set expressible as a union of at most gamma tree paths."""

    edge_set: frozenset
    witness_paths: tuple


# ---------------------------------------------------------------------------
# simplex core
# ---------------------------------------------------------------------------


class _Tableau(object):
    """Dense exact tableau for a row subset of a >= program.

    Column layout: structural | surplus (one per row) | artificial | rhs.
    The last two rows are the phase-2 and (if needed) phase-1 objective rows,
    updated by the same pivots as the constraint rows.
    """

    def __init__(self, objective, rows):
        self.m = m = len(rows)
        self.n = n = len(objective)
        art_rows = [i for i, (_c, rhs) in enumerate(rows) if rhs > 0]
        self.n_art = len(art_rows)
        self.total = n + m + self.n_art
        rhs_col = self.total
        nums = []
        dens = []
        art_of_row = {}
        for k, i in enumerate(art_rows):
            art_of_row[i] = n + m + k
        self.basis = []
        for i, (coeffs, rhs) in enumerate(rows):
            rn = [0] * (self.total + 1)
            rd = [1] * (self.total + 1)
            flip = rhs <= 0  # row is feasible at x = 0 with surplus basic
            for j, c in coeffs.items():
                c = -c if flip else c
                rn[j] = c.numerator
                rd[j] = c.denominator
            rn[n + i] = 1 if flip else -1
            b = -rhs if flip else rhs
            rn[rhs_col] = b.numerator
            rd[rhs_col] = b.denominator
            if flip:
                self.basis.append(n + i)
            else:
                a = art_of_row[i]
                rn[a] = 1
                self.basis.append(a)
            nums.append(rn)
            dens.append(rd)
        # phase-2 objective row: reduced costs start as the raw costs
        obj2_n = [0] * (self.total + 1)
        obj2_d = [1] * (self.total + 1)
        for j, c in enumerate(objective):
            obj2_n[j] = c.numerator
            obj2_d[j] = c.denominator
        nums.append(obj2_n)
        dens.append(obj2_d)
        self.obj2 = m
        self.obj1 = None
        if self.n_art:
            # phase-1 objective min(sum of artificials), reduced against the
            # artificial basis: row = -(sum of artificial rows) off the
            # artificial columns, 0 on them
            o1n = [0] * (self.total + 1)
            o1d = [1] * (self.total + 1)
            nums.append(o1n)
            dens.append(o1d)
            self.obj1 = m + 1
            for i in art_rows:
                self._row_sub(self.obj1, i, nums, dens)
            for k in range(self.n_art):
                o1n[n + m + k] = 0
                o1d[n + m + k] = 1
        self.nums = nums
        self.dens = dens
        self.dead = [False] * m

    @staticmethod
    def _row_sub(dst, src, nums, dens):
        from math import gcd

        dn, dd = nums[dst], dens[dst]
        sn, sd = nums[src], dens[src]
        for j in range(len(dn)):
            if sn[j] == 0:
                continue
            num = dn[j] * sd[j] - sn[j] * dd[j]
            den = dd[j] * sd[j]
            g = gcd(num, den)
            if g:
                num //= g
                den //= g
            if den < 0:
                num, den = -num, -den
            dn[j] = num
            dd[j] = den

    def value(self, row, col):
        return Fraction(self.nums[row][col], self.dens[row][col])

    def _entering(self, obj_row, allowed):
        rn = self.nums[obj_row]
        for j in range(self.total):
            if rn[j] < 0 and allowed[j]:
                return j  # Bland: smallest eligible index
        return None

    def _leaving(self, col):
        best = None  # (ratio_num, ratio_den, basis_var, row)
        rhs = self.total
        for i in range(self.m):
            if self.dead[i]:
                continue
            an = self.nums[i][col]
            if an <= 0:
                continue
            ad = self.dens[i][col]
            bn = self.nums[i][rhs]
            bd = self.dens[i][rhs]
            # ratio = (bn/bd) / (an/ad); compare a/b vs c/d as a*d vs c*b
            rn_, rd_ = bn * ad, bd * an
            if best is None:
                best = (rn_, rd_, self.basis[i], i)
                continue
            cmp = rn_ * best[1] - best[0] * rd_
            if cmp < 0 or (cmp == 0 and self.basis[i] < best[2]):
                best = (rn_, rd_, self.basis[i], i)
        return None if best is None else best[3]

    def _pivot(self, row, col):
        kernel.pivot(self.nums, self.dens, row, col)
        self.basis[row] = col

    def _run(self, obj_row, allowed):
        while True:
            col = self._entering(obj_row, allowed)
            if col is None:
                return "optimal"
            row = self._leaving(col)
            if row is None:
                return "unbounded"
            self._pivot(row, col)

    def solve(self):
        allowed = [True] * self.total
        if self.n_art:
            status = self._run(self.obj1, allowed)
            if status != "optimal":
                raise InternalInvariantError("phase-1 simplex cannot be unbounded")
            if self.nums[self.obj1][self.total] != 0:  # objective = -rhs entry
                return "infeasible"
            # drive leftover artificial basics out or mark their rows dead
            for i in range(self.m):
                if self.basis[i] >= self.n + self.m:
                    rn = self.nums[i]
                    piv = None
                    for j in range(self.n + self.m):
                        if rn[j] != 0:
                            piv = j
                            break
                    if piv is None:
                        self.dead[i] = True
                    else:
                        self._pivot(i, piv)
        for k in range(self.n_art):
            allowed[self.n + self.m + k] = False
        return self._run(self.obj2, allowed)

    def extract(self):
        values = [Fraction(0)] * self.n
        rhs = self.total
        for i in range(self.m):
            if self.dead[i]:
                continue
            b = self.basis[i]
            if b < self.n:
                values[b] = self.value(i, rhs)
        objective = -self.value(self.obj2, rhs)
        return values, objective


def _solve_rows(lp, row_indices):
    rows = [(lp.constraints[i].coeffs, lp.constraints[i].rhs) for i in row_indices]
    tab = _Tableau(lp.objective, rows)
    status = tab.solve()
    if status != "optimal":
        return status, None, None
    values, objective = tab.extract()
    return status, values, objective


def solve_lp(lp, lazy=True):
    """Solve to an exact optimal basic solution (or infeasible/unbounded).

    A vertex of a row-subset relaxation that satisfies every row is a vertex
    of the full program, so lazily activated solves return certified basic
    optima of the full LP.
    """
    lp.validate()
    m = len(lp.constraints)
    n = lp.n_vars()

    if not lazy or m <= _LAZY_THRESHOLD:
        active = list(range(m))
    else:
        active = [i for i, c in enumerate(lp.constraints) if c.name.startswith("e")]
        if not active:
            active = list(range(min(m, _LAZY_THRESHOLD)))
    active_set = set(active)

    while True:
        status, values, objective = _solve_rows(lp, active)
        if status == "infeasible":
            return LpSolution({}, Fraction(0), "infeasible", basic=False)
        if status == "unbounded":
            if len(active) < m:
                active = list(range(m))
                active_set = set(active)
                continue
            return LpSolution({}, Fraction(0), "unbounded", basic=False)
        violated = []
        for i, con in enumerate(lp.constraints):
            if i in active_set:
                continue
            lhs = sum((c * values[j] for j, c in con.coeffs.items()), Fraction(0))
            if lhs < con.rhs:
                violated.append((con.rhs - lhs, i))
        if not violated:
            break
        violated.sort(key=lambda t: (-t[0], t[1]))
        for _gap, i in violated[:_ACTIVATE_BATCH]:
            active.append(i)
            active_set.add(i)

    for j, v in enumerate(values):
        if v < 0:
            raise InternalInvariantError(f"negative value on column {j}")
    for con in lp.constraints:
        lhs = sum((c * values[j] for j, c in con.coeffs.items()), Fraction(0))
        if lhs < con.rhs:
            raise InternalInvariantError(f"constraint {con.name} violated at optimum")
    return LpSolution(
        {lp.variables[j]: values[j] for j in range(n)}, objective, "optimal", basic=True
    )


# ---------------------------------------------------------------------------
# LP construction
# ---------------------------------------------------------------------------


def build_cut_lp(instance, restrict_to=None):
    """One covering constraint per tree edge over the given link columns.

    ``restrict_to`` limits the variable set (used for the up-link LP); an
    edge no column can cover makes the instance infeasible and is reported
    before any solving happens.
    """
    if restrict_to is None:
        ids = instance.link_ids()
    else:
        ids = sorted(restrict_to)
    col = {lid: j for j, lid in enumerate(ids)}
    objective = [instance.links[lid].cost for lid in ids]
    constraints = []
    idx = instance._cov_index()
    for k, e in enumerate(instance.tree.sorted_edges()):
        covering = [lid for lid in idx[e] if lid in col]
        if not covering:
            raise InfeasibleInstanceError(f"edge {e} cannot be covered", edge=e)
        coeffs = {col[lid]: Fraction(1) for lid in covering}
        constraints.append(Constraint(coeffs, Fraction(1), name=f"e{k}"))
    return LinearProgram(ids, objective, constraints)


def enumerate_bundles(tree, gamma, cap=None):
    """All distinct edge sets that are unions of at most gamma tree paths.

    Emission order is lexicographic in (witness length, endpoint-pair
    tuple); a hit cap returns that deterministic prefix and a truncation
    flag.  States are pruned on (edge set, last path index), which generates
    exactly the first-occurrence sequence of the naive ordered-tuple sweep
    without re-walking duplicate unions, so arbitrarily large gamma stays
    enumerable whenever the number of distinct bundles is.
    """
    if gamma < 1:
        raise InputError("gamma must be >= 1")
    edges = tree.sorted_edges()
    eidx = {e: i for i, e in enumerate(edges)}
    nodes = sorted(tree.nodes)
    pairs = []
    masks = []
    for i, u in enumerate(nodes):
        for v in nodes[i + 1 :]:
            mask = 0
            for e in tree.path(u, v):
                mask |= 1 << eidx[e]
            pairs.append((u, v))
            masks.append(mask)
    emitted = {}
    order = []
    truncated = False

    def emit(mask, witness):
        nonlocal truncated
        if mask in emitted:
            return True
        if cap is not None and len(order) >= cap:
            truncated = True
            return False
        bundle = Bundle(
            frozenset(e for e in edges if (mask >> eidx[e]) & 1),
            tuple(pairs[i] for i in witness),
        )
        emitted[mask] = bundle
        order.append(bundle)
        return True

    frontier = []
    seen_states = set()
    for i, mask in enumerate(masks):
        if not emit(mask, (i,)):
            return order, True
        if (mask, i) not in seen_states:
            seen_states.add((mask, i))
            frontier.append(((i,), mask))
    level = 1
    while frontier and level < gamma:
        level += 1
        new_frontier = []
        for witness, mask in frontier:
            for i in range(witness[-1], len(masks)):
                m2 = mask | masks[i]
                state = (m2, i)
                if state in seen_states:
                    continue
                seen_states.add(state)
                if not emit(m2, witness + (i,)):
                    return order, True
                new_frontier.append((witness + (i,), m2))
        frontier = new_frontier
    return order, truncated


def build_bundle_lp(instance, gamma, bundle_opt_oracle, cap=None):
    """Cut LP plus, per enumerated bundle B, the constraint that the
    fractional cost carried by links meeting B is at least the exact optimum
    of covering B."""
    lp = build_cut_lp(instance)
    col = {lid: j for j, lid in enumerate(lp.variables)}
    bundles, truncated = enumerate_bundles(instance.tree, gamma, cap=cap)
    full = frozenset(instance.tree.edges)
    for k, bundle in enumerate(bundles):
        rhs = Fraction(bundle_opt_oracle(bundle))
        covering = cov(instance, bundle.edge_set)
        coeffs = {col[lid]: instance.links[lid].cost for lid in sorted(covering)}
        lp.constraints.append(Constraint(coeffs, rhs, name=f"b{k}"))
        if bundle.edge_set == full:
            lp.has_full_bundle = True
    lp.truncated = truncated
    lp.bundle_count = len(bundles)
    return lp


def dump_lp(lp, stream):
    """Write the program in LP interchange text, one row per constraint.

    Rows and the objective are scaled to integer coefficients so the dump is
    exact; the objective scale factor is recorded in a leading comment.
    """

    def lcm_den(values):
        from math import lcm

        out = 1
        for v in values:
            out = lcm(out, v.denominator)
        return out

    names = {j: f"l{j}" for j in range(lp.n_vars())}

    def terms(coeffs, scale):
        parts = []
        for j in sorted(coeffs):
            c = coeffs[j] * scale
            assert c.denominator == 1
            c = c.numerator
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            parts.append(f"{sign} {abs(c)} {names[j]}")
        text = " ".join(parts)
        return text[2:] if text.startswith("+ ") else text

    obj_scale = lcm_den(lp.objective)
    stream.write(f"\\ exact covering LP, objective scaled by {obj_scale}\n")
    stream.write("Minimize\n")
    obj = {j: c for j, c in enumerate(lp.objective)}
    stream.write(f" obj: {terms(obj, obj_scale)}\n")
    stream.write("Subject To\n")
    for con in lp.constraints:
        scale = lcm_den(list(con.coeffs.values()) + [con.rhs])
        rhs = con.rhs * scale
        stream.write(f" {con.name}: {terms(con.coeffs, scale)} >= {rhs.numerator}\n")
    stream.write("End\n")
