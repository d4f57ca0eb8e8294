import io
import itertools
from fractions import Fraction

import pytest

from treeaug import (
    InfeasibleInstanceError,
    build_bundle_lp,
    build_cut_lp,
    dump_lp,
    enumerate_bundles,
    make_bundle_oracle,
    shadow_complete,
    solve_lp,
)
from treeaug.lp import Constraint, LinearProgram

from conftest import inst, path_tree, random_instance, star_tree, star_triangle, subset_opt


def vertex_enum_min(lp):
    """Independent oracle: minimum objective over all vertices, by solving
    every n-subset of tight constraints (rows and nonnegativity) exactly."""
    n = lp.n_vars()
    rows = [(c.coeffs, c.rhs) for c in lp.constraints]
    for j in range(n):
        rows.append(({j: Fraction(1)}, Fraction(0)))  # x_j >= 0 as tight option
    best = None
    for subset in itertools.combinations(range(len(rows)), n):
        mat = [[rows[i][0].get(j, Fraction(0)) for j in range(n)] for i in subset]
        rhs = [rows[i][1] for i in subset]
        x = gauss_solve(mat, rhs)
        if x is None:
            continue
        if any(v < 0 for v in x):
            continue
        ok = True
        for coeffs, b in rows[: len(lp.constraints)]:
            if sum(coeffs.get(j, Fraction(0)) * x[j] for j in range(n)) < b:
                ok = False
                break
        if ok:
            val = sum(lp.objective[j] * x[j] for j in range(n))
            if best is None or val < best:
                best = val
    return best


def gauss_solve(mat, rhs):
    n = len(mat)
    a = [row[:] + [rhs[i]] for i, row in enumerate(mat)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            return None  # singular
        a[col], a[piv] = a[piv], a[col]
        inv = Fraction(1) / a[col][col]
        a[col] = [v * inv for v in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [v - f * w for v, w in zip(a[r], a[col])]
    return [a[i][n] for i in range(n)]


def test_solve_lp_trivial():
    lp = LinearProgram([0], [Fraction(1)], [Constraint({0: Fraction(1)}, Fraction(1))])
    sol = solve_lp(lp)
    assert sol.status == "optimal" and sol.objective_value == 1
    assert sol.values[0] == 1 and sol.basic


def test_solve_lp_two_vars_vertex():
    lp = LinearProgram(
        [0, 1],
        [Fraction(1), Fraction(1)],
        [Constraint({0: Fraction(1), 1: Fraction(1)}, Fraction(1))],
    )
    sol = solve_lp(lp)
    assert sol.objective_value == 1
    assert sorted(sol.values.values()) == [0, 1]  # a vertex, not the midpoint


def test_solve_lp_infeasible_and_unbounded():
    lp = LinearProgram(
        [0],
        [Fraction(1)],
        [Constraint({0: Fraction(1)}, Fraction(1)),
         Constraint({0: Fraction(-1)}, Fraction(0))],  # x <= 0 conflicts x >= 1
    )
    assert solve_lp(lp).status == "infeasible"
    lp2 = LinearProgram([0], [Fraction(-1)], [Constraint({0: Fraction(1)}, Fraction(1))])
    assert solve_lp(lp2).status == "unbounded"


def test_cut_lp_examples():
    i1 = inst(path_tree(2), [(1, 2, 1)])
    assert solve_lp(build_cut_lp(i1)).objective_value == 1

    i2 = inst(path_tree(3), [(1, 3, 2), (1, 2, 1), (2, 3, 1)])
    lp2 = build_cut_lp(i2)
    sol2 = solve_lp(lp2)
    assert sol2.objective_value == 2
    assert sol2.objective_value == vertex_enum_min(lp2)

    lp3 = build_cut_lp(star_triangle())
    sol3 = solve_lp(lp3)
    assert sol3.objective_value == Fraction(3, 2)
    assert sol3.objective_value == vertex_enum_min(lp3)


def test_cut_lp_uncoverable_edge():
    i = inst(path_tree(3), [(1, 2, 1)])
    with pytest.raises(InfeasibleInstanceError) as err:
        build_cut_lp(i)
    assert err.value.edge == (2, 3)


def test_solve_matches_vertex_oracle_randomized():
    for seed in range(8):
        i = random_instance(seed, n=6, density=1.4, cost_max=3)
        lp = build_cut_lp(i)
        sol = solve_lp(lp)
        assert sol.status == "optimal"
        assert sol.objective_value == vertex_enum_min(lp)


def test_enumerate_bundles_path_gamma1():
    bundles, truncated = enumerate_bundles(path_tree(4), 1)
    assert not truncated
    assert len(bundles) == 6
    assert all(len(b.witness_paths) == 1 for b in bundles)


def test_enumerate_bundles_star_gamma1():
    bundles, truncated = enumerate_bundles(star_tree(3), 1)
    assert len(bundles) == 6  # 3 single edges + 3 two-edge paths
    sizes = sorted(len(b.edge_set) for b in bundles)
    assert sizes == [1, 1, 1, 2, 2, 2]


def test_enumerate_bundles_full_edge_set_appears():
    t = star_tree(4)
    bundles, truncated = enumerate_bundles(t, 4)
    assert not truncated
    assert frozenset(t.edges) in {b.edge_set for b in bundles}


def test_enumerate_bundles_large_gamma_saturates():
    t = path_tree(5)
    b1, _ = enumerate_bundles(t, 10)
    b2, _ = enumerate_bundles(t, 100)
    assert {b.edge_set for b in b1} == {b.edge_set for b in b2}
    # on a path, bundles = unions of subpaths = all nonempty edge subsets
    assert len(b1) == 2 ** len(t.edges) - 1


def test_enumerate_bundles_cap_prefix():
    t = path_tree(5)
    full, _ = enumerate_bundles(t, 2)
    capped, truncated = enumerate_bundles(t, 2, cap=5)
    assert truncated and len(capped) == 5
    assert [b.edge_set for b in capped] == [b.edge_set for b in full[:5]]


def test_bundle_lp_single_edge():
    i = shadow_complete(inst(path_tree(2), [(1, 2, 5)]))
    lp = build_bundle_lp(i, 1, make_bundle_oracle(i))
    sol = solve_lp(lp)
    assert sol.objective_value == 5


def test_bundle_lp_sandwich_and_full_bundle_equality():
    for seed in range(4):
        raw = random_instance(seed, n=7, density=1.5, cost_max=2)
        i = shadow_complete(raw)
        opt = subset_opt(raw)
        cut_val = solve_lp(build_cut_lp(i)).objective_value
        oracle = make_bundle_oracle(i)
        v_prev = cut_val
        for gamma in (1, 2):
            lp = build_bundle_lp(i, gamma, oracle)
            val = solve_lp(lp).objective_value
            assert v_prev <= val <= opt
            v_prev = val
        # gamma large enough that the whole edge set is one bundle
        lp_full = build_bundle_lp(i, 2 * len(i.tree.edges), oracle)
        assert lp_full.has_full_bundle
        assert solve_lp(lp_full).objective_value == opt


def test_bundle_solution_feasible_for_cut_lp():
    raw = random_instance(3, n=7, density=1.5, cost_max=2)
    i = shadow_complete(raw)
    lp = build_bundle_lp(i, 2, make_bundle_oracle(i))
    sol = solve_lp(lp)
    cut = build_cut_lp(i)
    col = {lid: j for j, lid in enumerate(cut.variables)}
    for con in cut.constraints:
        lhs = sum(c * sol.values[cut.variables[j]] for j, c in con.coeffs.items())
        assert lhs >= con.rhs


def test_exact_slacks():
    i = shadow_complete(random_instance(5, n=6, cost_max=3))
    lp = build_cut_lp(i)
    sol = solve_lp(lp)
    for con in lp.constraints:
        lhs = sum(c * sol.values[lp.variables[j]] for j, c in con.coeffs.items())
        assert lhs - con.rhs >= 0  # exact rational comparison


def test_dump_lp_format():
    i = inst(path_tree(3), [(1, 3, Fraction(3, 2)), (1, 2, 1)])
    lp = build_cut_lp(i)
    buf = io.StringIO()
    dump_lp(lp, buf)
    text = buf.getvalue()
    assert text.startswith("\\ exact covering LP, objective scaled by 2")
    assert "Minimize" in text and "Subject To" in text and text.endswith("End\n")
    assert " e0: " in text and ">=" in text
