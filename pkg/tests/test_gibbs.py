import numpy as np
import pytest

from ccmnet.errors import ConfigError
from ccmnet.gibbs import (
    GibbsConfig, gibbs_run, log_dirichlet, read_chain_csv, summarize, update_theta_degree,
    update_theta_mixing,
)
from ccmnet.graph import NodeClassification, ObservationMask, sample_induced_observation
from ccmnet.harness import build_nb_theta
from ccmnet.model import CcmSpec, CongruenceMapping, MultinomialDegree, PoissonMultinomialMixing, PriorSpec
from ccmnet.sampler import draw_network


def degree_spec(n, alpha0=1e-4):
    return CcmSpec(CongruenceMapping.degree(), MultinomialDegree(np.full(n, 1.0 / n)), PriorSpec(alpha0))


def test_log_dirichlet_tiny_concentration_stays_finite():
    rng = np.random.default_rng(0)
    a = np.array([1e-4, 1e-4, 5.0, 0.0])
    lp = log_dirichlet(a, rng)
    assert np.isfinite(lp[:3]).all() and lp[3] == -np.inf
    assert np.exp(lp).sum() == pytest.approx(1.0)


def test_dirichlet_update_mean():
    rng = np.random.default_rng(1)
    counts = np.array([3, 0, 5, 2])
    prior = PriorSpec(0.5)
    draws = np.array([update_theta_degree(counts, prior, rng).theta for _ in range(20000)])
    a = counts + 0.5
    want = a / a.sum()
    se = draws.std(axis=0) / np.sqrt(len(draws))
    assert np.all(np.abs(draws.mean(axis=0) - want) < 4 * se)


def test_gamma_update_mean():
    rng = np.random.default_rng(2)
    mm = np.array([[4, 2], [2, 1]])
    prior = PriorSpec(1.0, gamma_shape=2.0, gamma_rate=0.5)
    lam = np.array([update_theta_mixing(mm, prior, rng).lam for _ in range(20000)])
    want = (2.0 + 7) / 1.5
    assert abs(lam.mean() - want) < 4 * lam.std() / np.sqrt(len(lam))


def _observed(n=30, s=0.5, seed=0):
    spec = CcmSpec(CongruenceMapping.degree(), MultinomialDegree(build_nb_theta(5.0, 3.0, n)))
    g = draw_network(spec, n, 5.0, seed=seed)
    mask, g_o = sample_induced_observation(g, s, seed + 1)
    return g, mask, g_o


def test_gibbs_respects_known_dyads_and_shapes():
    g, mask, g_o = _observed()
    cfg = GibbsConfig(40, 10, seed=3)
    res = gibbs_run(g_o, mask, degree_spec(30), cfg)
    assert res.theta.shape == (40, 30) and res.stats.shape == (40, 30)
    assert np.allclose(res.theta.sum(axis=1), 1.0)
    assert np.all(res.stats.sum(axis=1) == 30)
    known = mask.known_matrix()
    final = res.final_state.network()
    assert np.array_equal(final.adj[known], g.adj[known])


def test_gibbs_is_reproducible():
    _, mask, g_o = _observed()
    cfg = GibbsConfig(20, 5, seed=9)
    a = gibbs_run(g_o, mask, degree_spec(30), cfg)
    b = gibbs_run(g_o, mask, degree_spec(30), cfg)
    assert np.array_equal(a.theta, b.theta) and np.array_equal(a.stats, b.stats)


def test_resume_continues_the_same_chain(tmp_path):
    _, mask, g_o = _observed()
    spec = degree_spec(30)
    full = gibbs_run(g_o, mask, spec, GibbsConfig(30, 5, seed=4))
    ck = tmp_path / "ck.json"
    gibbs_run(g_o, mask, spec, GibbsConfig(12, 5, seed=4), checkpoint=str(ck))
    rest = gibbs_run(g_o, mask, spec, GibbsConfig(30, 5, seed=4), resume=str(ck))
    assert rest.iterations[0] == 13
    assert np.array_equal(rest.theta, full.theta[12:])
    assert np.array_equal(rest.stats, full.stats[12:])


def test_fully_observed_network_pins_the_statistic():
    g, _, _ = _observed()
    mask = ObservationMask.from_known_matrix(np.ones((30, 30), dtype=bool))
    res = gibbs_run(g, mask, degree_spec(30), GibbsConfig(30, 5, seed=1))
    assert (res.stats == np.bincount(g.degrees, minlength=30)).all()
    sm = summarize(res, 5)
    d = res.stats[0] + 1e-4
    assert np.allclose(sm.param_mean, d / d.sum(), atol=0.05)


def test_log_w_correction_accepts_or_keeps():
    _, mask, g_o = _observed()
    spec = degree_spec(30)
    cfg = GibbsConfig(15, 5, seed=6)
    # constant W: every conjugate draw is accepted
    a = gibbs_run(g_o, mask, spec, cfg, log_w=lambda law: 0.0)
    assert np.all(np.any(a.theta[1:] != a.theta[:-1], axis=1))
    # W growing without bound in theta_0: moves that raise theta_0 a lot are rejected
    b = gibbs_run(g_o, mask, spec, cfg, log_w=lambda law: 1e6 * law.theta[0])
    assert np.all(np.diff(b.theta[:, 0]) <= 1e-5)


def test_mixing_gibbs_columns_and_lambda():
    c = NodeClassification.from_sizes([15, 15])
    spec = CcmSpec(CongruenceMapping.mixing(c), PoissonMultinomialMixing(20.0, np.array([0.4, 0.2, 0.4])))
    g = draw_network(spec, 30, 5.0, seed=2)
    mask, g_o = sample_induced_observation(g, 0.6, 3)
    res = gibbs_run(g_o, mask, spec, GibbsConfig(30, 5, seed=1))
    assert res.theta_columns == ["lambda", "alpha_0_0", "alpha_0_1", "alpha_1_1"]
    assert np.allclose(res.theta[:, 1:].sum(axis=1), 1.0)
    assert (res.theta[:, 0] > 0).all()


def test_csv_roundtrip(tmp_path):
    _, mask, g_o = _observed()
    res = gibbs_run(g_o, mask, degree_spec(30), GibbsConfig(12, 2, seed=0))
    p = tmp_path / "chain.csv"
    res.to_csv(p)
    header, data = read_chain_csv(p)
    assert header[0] == "iteration" and header[1] == "theta_0"
    assert np.array_equal(data[:, 1:31], res.theta)


def test_summarize():
    theta = np.arange(20, dtype=float).reshape(10, 2)
    stats = np.ones((10, 3))
    sm = summarize((theta, stats), 4)
    assert sm.n_retained == 6
    assert sm.param_mean.tolist() == [13.0, 14.0]
    with pytest.raises(ValueError):
        summarize((theta, stats), 10)


def test_config_validation():
    with pytest.raises(ConfigError):
        GibbsConfig(10, 10)
    with pytest.raises(ConfigError):
        GibbsConfig(10, 2, inner_sweep_factor=0)
