import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate, stats

from hrmodels.config import make_rng
from hrmodels.errors import EmptyExceedanceSet, InsufficientHalfspaceData, NotStrictlyCND
from hrmodels.graphs import cycle_graph
from hrmodels.pareto import (ParetoSample, conditional_params, empirical_variogram,
                             log_exponent_density, rank_transform, sample_halfspace,
                             sample_pareto, threshold_exceedances)
from hrmodels.varalg import cm, covariance_mapping, model_point, random_configuration_variogram

seeds = st.integers(0, 2**32 - 1)


def pair(g):
    return np.array([[0.0, g], [g, 0.0]])


def density2(g, y1, y2):
    return ((2 * np.pi * g) ** -0.5
            * np.exp(-(y1 - y2) ** 2 / (2 * g) - (y1 + y2) / 2 - g / 8))


def exponent2(g, y1, y2):
    """Exponent function V(y) = Lambda({x : x not <= y}) for d = 2."""
    s = np.sqrt(g)
    return (np.exp(-y1) * stats.norm.cdf(s / 2 + (y2 - y1) / s)
            + np.exp(-y2) * stats.norm.cdf(s / 2 + (y1 - y2) / s))


@pytest.mark.parametrize("g", [0.3, 1.0, 4.0])
def test_bivariate_density(g):
    rng = make_rng(1)
    y = rng.normal(size=(20, 2))
    got = log_exponent_density(pair(g), y)
    assert np.allclose(got, np.log(density2(g, y[:, 0], y[:, 1])), rtol=1e-12, atol=1e-12)
    assert log_exponent_density(pair(g), y[0]) == pytest.approx(got[0])


@pytest.mark.parametrize("g", [0.5, 2.0])
def test_halfspace_mass_is_one(g):
    mass, _ = integrate.dblquad(lambda y2, y1: density2(g, y1, y2), 0, 40, -40, 40)
    assert mass == pytest.approx(1.0, abs=1e-7)


def test_density_translation(triangle, rng):
    y = rng.normal(size=3)
    for t in (-1.3, 0.0, 2.5):
        diff = log_exponent_density(triangle, y + t) - log_exponent_density(triangle, y)
        assert diff == pytest.approx(-t, abs=1e-10)


def test_normalizing_constant(rng):
    for d in (2, 3, 5):
        g = random_configuration_variogram(d, rng)
        log_c1 = log_exponent_density(g, np.zeros(d)) + 0.5 * np.linalg.inv(cm(g))[-1, -1]
        dense = -np.linalg.det(cm(2 * np.pi * g))
        assert log_c1 == pytest.approx(-0.5 * np.log(dense), rel=1e-10)


def test_density_rejects_non_cnd():
    with pytest.raises(NotStrictlyCND):
        log_exponent_density(np.zeros((3, 3)), np.zeros(3))


def test_singleton_conditioning(triangle):
    for k in (1, 2, 3):
        rest = [v for v in (1, 2, 3) if v != k]
        cg = conditional_params(triangle, rest, [k], [0.7])
        assert np.allclose(cg.cov, covariance_mapping(triangle, k), atol=1e-12)
        assert np.allclose(cg.mean, 0.7 - 0.5 * triangle[np.ix_([v - 1 for v in rest], [k - 1])].ravel())
        assert cg.A == tuple(rest) and cg.C == (k,)


def test_conditional_matches_density(rng):
    """The conditional law is the density as a function of y_A, up to a constant."""
    d = 5
    g = random_configuration_variogram(d, rng)
    a, c = [1, 4], [2, 3, 5]
    yc = rng.normal(size=3)
    cg = conditional_params(g, a, c, yc)
    gap = []
    for _ in range(5):
        ya = rng.normal(size=2)
        y = np.zeros(d)
        y[[0, 3]] = ya
        y[[1, 2, 4]] = yc
        gap.append(log_exponent_density(g, y)
                   - stats.multivariate_normal(cg.mean, cg.cov).logpdf(ya))
    assert np.ptp(gap) < 1e-9


def test_conditioning_errors(triangle):
    with pytest.raises(ValueError):
        conditional_params(triangle, [1], [1], [0.0])
    with pytest.raises(ValueError):
        conditional_params(triangle, [], [1], [0.0])
    with pytest.raises(ValueError):
        conditional_params(triangle, [4], [1], [0.0])


def test_halfspace_law(triangle):
    n = 50000
    s = sample_halfspace(triangle, 2, n, seed=3)
    assert np.all(s.data[:, 1] >= 0)
    assert stats.kstest(s.data[:, 1], "expon").pvalue > 1e-3
    for i in range(3):
        for j in range(i + 1, 3):
            est = np.var(s.data[:, i] - s.data[:, j], ddof=1)
            se = triangle[i, j] * np.sqrt(2.0 / n)
            assert abs(est - triangle[i, j]) < 3 * se
    assert np.array_equal(sample_halfspace(triangle, 2, 100, 3).data,
                          sample_halfspace(triangle, 2, 100, 3).data)


def test_bivariate_cdf():
    g = 1.5
    s = sample_pareto(pair(g), 50000, seed=8)
    v0 = exponent2(g, 0.0, 0.0)
    for y in [(0.2, 0.5), (1.0, 1.0), (2.0, 0.3)]:
        p = (v0 - exponent2(g, *y)) / v0
        emp = np.mean(np.all(s.data <= y, axis=1))
        assert abs(emp - p) < 4 * np.sqrt(p * (1 - p) / s.n)
    # acceptance rate Lambda(L) / d
    assert s.acceptance == pytest.approx(v0 / 2, abs=0.01)


def test_pareto_sample_support_and_acceptance(triangle):
    s = sample_pareto(triangle, 20000, seed=0)
    assert s.n == 20000 and s.d == 3
    assert np.all(np.max(s.data, axis=1) >= 0)
    assert 1 / 3 < s.acceptance <= 1
    for k in range(3):
        pos = s.data[s.data[:, k] >= 0, k]
        assert stats.kstest(pos, "expon").pvalue > 1e-3


def test_marginalization(rng):
    """Y_I on {max Y_I >= 0} is again Huesler-Reiss Pareto with parameter G_II."""
    gamma, _ = model_point(cycle_graph(4), rng)
    gamma = 4 * gamma / np.max(gamma)
    s = sample_pareto(gamma, 40000, seed=4)
    idx = [0, 2]
    sub = s.data[:, idx]
    sub = sub[np.max(sub, axis=1) >= 0]
    ref = sample_pareto(gamma[np.ix_(idx, idx)], sub.shape[0], seed=5).data
    assert stats.ks_2samp(sub[:, 0] - sub[:, 1], ref[:, 0] - ref[:, 1]).pvalue > 1e-3


def test_jobs_do_not_change_output(triangle):
    a = sample_pareto(triangle, 10000, seed=6, jobs=1)
    b = sample_pareto(triangle, 10000, seed=6, jobs=4)
    assert np.array_equal(a.data, b.data)
    assert not np.array_equal(a.data, sample_pareto(triangle, 10000, seed=7).data)


def test_empirical_variogram_recovers_gamma(triangle):
    s = sample_pareto(triangle, 100000, seed=2)
    est = empirical_variogram(s)
    assert np.max(np.abs(est - triangle)) < 0.05 * np.max(triangle)
    w = empirical_variogram(s, weighted=True)
    assert np.max(np.abs(w - triangle)) < 0.05 * np.max(triangle)
    assert not np.array_equal(w, est)


def test_empirical_variogram_of_constant_differences():
    t = np.linspace(0.1, 3.0, 50)
    data = t[:, None] + np.array([0.0, -1.0, 2.0])[None, :]
    assert np.allclose(empirical_variogram(ParetoSample(data)), 0.0, atol=1e-12)


@given(seeds)
def test_empirical_variogram_permutations(seed):
    rng = make_rng(seed)
    data = rng.exponential(size=(40, 4)) - 0.3
    data = data[np.max(data, axis=1) >= 0]
    base = empirical_variogram(ParetoSample(data))
    rows = rng.permutation(data.shape[0])
    assert np.allclose(empirical_variogram(ParetoSample(data[rows])), base, atol=1e-12)
    cols = rng.permutation(4)
    assert np.allclose(empirical_variogram(ParetoSample(data[:, cols])),
                       base[np.ix_(cols, cols)], atol=1e-12)


def test_empirical_variogram_needs_two_rows_per_halfspace():
    data = np.array([[1.0, -1.0], [2.0, -0.5], [0.5, -2.0]])
    with pytest.raises(InsufficientHalfspaceData) as err:
        empirical_variogram(ParetoSample(data))
    assert "2" in str(err.value)


def test_ddof():
    rng = make_rng(2)
    data = rng.exponential(size=(30, 3))
    a = empirical_variogram(ParetoSample(data), ddof=0)
    b = empirical_variogram(ParetoSample(data), ddof=1)
    assert np.allclose(a * 30 / 29, b)


def test_sample_validation():
    with pytest.raises(ValueError):
        ParetoSample(np.array([[-1.0, -2.0]]))


def test_threshold_exceedances():
    raw = make_rng(9).exponential(size=(20000, 2))
    s = threshold_exceedances(raw, 0.0)
    assert s.n == 20000
    q = 0.9
    u = -np.log1p(-q)
    s = threshold_exceedances(raw, q)
    p = 1 - q ** 2  # independent margins
    assert abs(s.n / 20000 - p) < 4 * np.sqrt(p * (1 - p) / 20000)
    assert np.all(np.max(s.data, axis=1) > 0)
    assert np.allclose(s.data + u, raw[np.max(raw, axis=1) > u])
    with pytest.raises(EmptyExceedanceSet):
        threshold_exceedances(np.zeros((5, 2)), 0.5)
    with pytest.raises(ValueError):
        threshold_exceedances(raw, 1.0)


def test_rank_transform():
    raw = make_rng(1).normal(size=(99, 3))
    x = rank_transform(raw)
    expected = -np.log1p(-np.arange(1, 100) / 100)
    for j in range(3):
        assert np.allclose(np.sort(x[:, j]), expected)
        assert np.array_equal(np.argsort(x[:, j]), np.argsort(raw[:, j]))
