import itertools

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from hrmodels.config import get_tol, make_rng
from hrmodels.eci import (PENTAD_TERMS, CIStatement, atom_count, det_expansion_check,
                          evaluate_atoms, generator_atoms, pentad_residual, saturated_pair_test,
                          separation_statements, test_eci as eci_rank_test)
from hrmodels.errors import InvalidStatement, NotStrictlyCND, SizeCap
from hrmodels.graphs import (complete_graph, cycle_graph, fish_graph, path_graph, pentad_graph,
                             random_connected_graph)
from hrmodels.varalg import (covariance_mapping, is_strictly_cnd, model_point,
                             random_configuration_variogram, theta_of_gamma)

seeds = st.integers(0, 2**32 - 1)


def S(a, b, c=()):
    return CIStatement(frozenset(a), frozenset(b), frozenset(c))


def test_statement_validation():
    with pytest.raises(InvalidStatement):
        S([], [1])
    with pytest.raises(InvalidStatement):
        S([1], [1])
    with pytest.raises(InvalidStatement):
        S([1], [2], [2])
    with pytest.raises(InvalidStatement):
        eci_rank_test(np.zeros((2, 2)) + [[0, 1], [1, 0]], S([1], [3]))
    st_ = S([1, 2], [3], [4])
    assert CIStatement.from_json(st_.to_json()) == st_
    assert str(st_) == "{1,2} _|_ {3} | {4}"


def test_path_statement(triangle, rng):
    assert eci_rank_test(triangle, S([1], [3], [2]))
    assert not eci_rank_test(triangle, S([1], [2], [3]))
    for _ in range(20):
        g = random_configuration_variogram(3, rng)
        assert not eci_rank_test(g, S([1], [3], [2]))
    g, _ = model_point(complete_graph(5), rng)
    for a, b in itertools.combinations(range(1, 6), 2):
        rest = [v for v in range(1, 6) if v not in (a, b)]
        assert not eci_rank_test(g, S([a], [b], rest))


def test_rank_test_needs_strict_cnd():
    x = np.array([0.0, 1.0, 3.0])
    with pytest.raises(NotStrictlyCND):
        eci_rank_test((x[:, None] - x[None, :]) ** 2, S([1], [3], [2]))


def test_saturated_pairs(triangle, rng):
    assert saturated_pair_test(triangle, 1, 3)
    assert not saturated_pair_test(triangle, 1, 2)
    g, _ = model_point(complete_graph(5), rng)
    assert not any(saturated_pair_test(g, i, j) for i, j in itertools.combinations(range(1, 6), 2))


@given(seeds, st.integers(3, 7))
def test_saturated_pair_agrees_with_rank_test(seed, d):
    rng = make_rng(seed)
    g, _ = model_point(random_connected_graph(d, 0.4, rng), rng)
    for i, j in itertools.combinations(range(1, d + 1), 2):
        rest = [v for v in range(1, d + 1) if v not in (i, j)]
        assert saturated_pair_test(g, i, j) == bool(eci_rank_test(g, S([i], [j], rest)))


def test_separation_statements():
    assert separation_statements(path_graph(3)) == [S([1], [3], [2])]
    c4 = separation_statements(cycle_graph(4))
    assert S([1], [3], [2, 4]) in c4 and S([2], [4], [1, 3]) in c4
    fish = separation_statements(fish_graph())
    assert S([2], [3], [1, 4]) in fish and S([5], [6], [4]) in fish
    with pytest.raises(SizeCap):
        separation_statements(path_graph(11))


def test_separation_statements_brute_force():
    g = fish_graph()
    found = set(separation_statements(g))
    for c in itertools.chain.from_iterable(itertools.combinations(g.vertices, k) for k in range(5)):
        comps = g.components(c)
        for a, b in itertools.combinations(comps, 2):
            assert S(a, b, c) in found
    for s in found:
        assert not any(g.has_edge(i, j) for i in s.A for j in s.B)


def test_generator_atoms(triangle):
    atoms = generator_atoms(S([1], [3], [2]))
    assert [(a.Aprime, a.Bprime) for a in atoms] == [((1, 2), (2, 3))]
    rng = make_rng(5)
    for _ in range(10):
        g = random_configuration_variogram(3, rng)
        assert atoms[0].value(g) == pytest.approx(0.5 * (g[0, 1] + g[1, 2] - g[0, 2]), rel=1e-12)
    assert abs(atoms[0].value(triangle)) < 1e-12
    empty = generator_atoms(S([1, 2], [3, 4]))
    assert len(empty) == 4
    # [[-g/2, 1], [1, 0]] has determinant -1 whatever g is
    g4 = random_configuration_variogram(4, rng)
    assert all(a.value(g4) == pytest.approx(-1.0) for a in empty)
    big = S([1, 2], [3, 4], [5, 6])
    assert len(generator_atoms(big)) == atom_count(big) == 4 * 4
    assert all(a.matrix(np.zeros((6, 6))).shape == (4, 4) for a in generator_atoms(big))


def test_atom_homogeneity(rng):
    stmt = S([1, 2], [4], [3, 5])
    g = random_configuration_variogram(5, rng)
    c = 2.7
    for a in generator_atoms(stmt):
        assert a.value(c * g) == pytest.approx(c ** len(stmt.C) * a.value(g), rel=1e-9)


def test_evaluate_atoms(triangle, rng):
    rep = evaluate_atoms(triangle, generator_atoms(S([1], [3], [2])))
    assert rep.vanishes and rep.max_normalized < 1e-12
    g = random_configuration_variogram(3, rng)
    assert not evaluate_atoms(g, generator_atoms(S([1], [3], [2]))).vanishes
    assert rep.to_json()[0]["Aprime"] == [1, 2]


@given(seeds, st.integers(3, 7))
def test_atoms_agree_with_rank(seed, d):
    rng = make_rng(seed)
    g = random_connected_graph(d, 0.4, rng)
    gamma, _ = model_point(g, rng)
    for stmt in separation_statements(g):
        assert eci_rank_test(gamma, stmt)
        assert evaluate_atoms(gamma, generator_atoms(stmt)).vanishes
    generic = random_configuration_variogram(d, rng)
    assume(is_strictly_cnd(generic))
    for stmt in separation_statements(g):
        assert not eci_rank_test(generic, stmt)
        assert not evaluate_atoms(generic, generator_atoms(stmt)).vanishes


@given(seeds, st.integers(4, 7))
def test_conditional_covariance_block_matches_rank(seed, d):
    """A _|_ B | C iff the A,B block of the conditional covariance given C vanishes."""
    from hrmodels.pareto import conditional_params
    rng = make_rng(seed)
    g = random_connected_graph(d, 0.35, rng)
    gamma, _ = model_point(g, rng)
    perm = [int(v) + 1 for v in rng.permutation(d)]
    na = int(rng.integers(1, d - 1))
    nb = int(rng.integers(1, d - na))
    a, b, c = perm[:na], perm[na:na + nb], perm[na + nb:]
    if not c:
        return
    stmt = S(a, b, c)
    cg = conditional_params(gamma, a + b, c, np.zeros(len(c)))
    ia = [cg.A.index(v) for v in a]
    ib = [cg.A.index(v) for v in b]
    block = cg.cov[np.ix_(ia, ib)]
    vanishes = np.max(np.abs(block)) <= get_tol() * np.max(np.abs(cg.cov)) * 10
    assert vanishes == bool(eci_rank_test(gamma, stmt))


def test_det_expansions(rng):
    for n in range(3, 7):
        for _ in range(10):
            m = rng.standard_normal((n, n)) * 3
            assert det_expansion_check(m).passes(1e-9)
    ident = det_expansion_check(np.eye(4))
    assert ident.passes()
    m = rng.standard_normal((4, 4))
    m[1] = m[0]
    res = det_expansion_check(m)
    assert res.row_expansion < 1e-12 and res.passes()
    with pytest.raises(ValueError):
        det_expansion_check(np.zeros((9, 9)))


def test_pentad_terms_are_degree_five_products():
    assert len(PENTAD_TERMS) == 12
    for sign, factors in PENTAD_TERMS:
        assert sign in (1, -1) and len(factors) == 5
        assert all(1 <= i < j <= 5 for i, j in factors)
    # the polynomial is alternating in sign: signs sum to zero
    assert sum(s for s, _ in PENTAD_TERMS) == 0


def test_pentad_vanishes_on_model(rng):
    g = pentad_graph()
    for _ in range(20):
        gamma, _ = model_point(g, rng)
        assert pentad_residual(gamma).normalized < 1e-8
    assert pentad_residual(np.zeros((8, 8))).value == 0.0


def test_pentad_is_not_in_the_saturated_model(rng):
    gamma, _ = model_point(complete_graph(8), rng)
    assert pentad_residual(gamma).normalized > 1e-6


def test_pentad_uses_covariance_coordinates(rng):
    gamma = random_configuration_variogram(8, rng)
    s8 = covariance_mapping(gamma, 8)
    direct = 0.0
    for sign, factors in PENTAD_TERMS:
        direct += sign * np.prod([2 * s8[i - 1, j - 1] for i, j in factors])
    assert pentad_residual(gamma).value == pytest.approx(direct, rel=1e-9)


def test_pentad_generic_spread():
    """Generic points sit far above the model level in the bulk of the distribution."""
    vals = np.array([pentad_residual(random_configuration_variogram(8, make_rng(7, i))).normalized
                     for i in range(400)])
    assert np.median(vals) > 1e-2
    assert vals.min() > 1e-7
    assert np.quantile(vals, 0.25) > 1e-3


def test_theta_zero_pattern_of_pentad_model(rng):
    gamma, _ = model_point(pentad_graph(), rng)
    t = theta_of_gamma(gamma)
    assert abs(t[0, 1]) < 1e-10 * np.max(np.abs(t))
