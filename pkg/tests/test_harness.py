import numpy as np
import pytest
from scipy.stats import nbinom

from ccmnet.errors import ConfigError
from ccmnet.gibbs import GibbsConfig
from ccmnet.harness import (
    ILLUSTRATION, MIXING_RECOVERY, build_nb_theta, plan_from_profile, reduction, replication_seeds,
    run_degree_recovery, run_illustration, run_mixing_recovery, write_degree_outputs,
    write_illustration_outputs, write_mixing_outputs,
)


def test_nb_theta_is_truncated_renormalized_pmf():
    size, mu, n = 1.02, 6.19, 100
    p = size / (size + mu)
    raw = nbinom.pmf(np.arange(n), size, p)
    th = build_nb_theta(size, mu, n)
    assert th.sum() == pytest.approx(1.0)
    assert np.allclose(th, raw / raw.sum())
    assert th[0] == pytest.approx(0.136, abs=0.001)


def test_seeds_are_stable_and_distinct():
    a = replication_seeds(7, 0, 0)
    assert a == replication_seeds(7, 0, 0)
    seen = {tuple(replication_seeds(7, c, r)) for c in range(3) for r in range(5)}
    assert len(seen) == 15


def test_reduction():
    assert reduction(0.2, 0.4) == pytest.approx(0.5)
    assert np.isnan(reduction(0.1, 0.0))


def test_profiles():
    assert plan_from_profile("desk").n == 200
    p = plan_from_profile("paper")
    assert p.n == 1000 and len(p.fractions) == 9 and p.replications == 100
    with pytest.raises(ConfigError):
        plan_from_profile("nope")
    with pytest.raises(ConfigError):
        plan_from_profile("desk", fractions=(0.0,))


def small_plan(**kw):
    base = dict(n=30, fractions=(0.4, 0.7), replications=2, gibbs=GibbsConfig(20, 5), truth_sweeps=3.0, seed=5)
    base.update(kw)
    return plan_from_profile("desk", **base)


def test_degree_recovery_independent_of_workers(tmp_path):
    plan = small_plan()
    a = run_degree_recovery(plan, 1)
    b = run_degree_recovery(plan, 2)
    assert [(r.fraction, r.replication) for r in a] == [(0.4, 0), (0.4, 1), (0.7, 0), (0.7, 1)]
    for x, y in zip(a, b):
        assert x.hellinger_estimate == y.hellinger_estimate
        assert np.array_equal(x.trace, y.trace)
    write_degree_outputs(a, tmp_path / "o1", plot=False)
    write_degree_outputs(b, tmp_path / "o2", plot=False)
    for name in ("results.csv", "summary.csv", "diagnostics.csv", "estimates.csv"):
        assert (tmp_path / "o1" / name).read_bytes() == (tmp_path / "o2" / name).read_bytes()
    head = (tmp_path / "o1" / "summary.csv").read_text().splitlines()[0]
    assert head == "fraction,hellinger_estimate,hellinger_complete_case,reduction"


def test_degree_recovery_observation_is_induced():
    r = run_degree_recovery(small_plan(replications=1, fractions=(0.5,)))[0]
    # nodes outside the sample are isolated in the observed network
    assert r.observed[0] >= 15
    assert r.truth.sum() == r.estimate.round().sum() == 30


def test_mixing_recovery(tmp_path):
    plan = small_plan(kind=MIXING_RECOVERY, n=30, class_sizes=(15, 15), lam=40.0, fractions=(0.5,))
    res = run_mixing_recovery(plan)
    assert len(res) == 2
    r = res[0]
    assert r.truth_cells.sum() > 0 and np.allclose(r.posterior_alpha.sum(), 1.0)
    write_mixing_outputs(res, plan, tmp_path)
    assert (tmp_path / "mixing.csv").read_text().startswith("fraction,replication,cell")


def test_mixing_recovery_class_fractions():
    plan = small_plan(kind=MIXING_RECOVERY, class_sizes=(15, 15), lam=40.0, fractions=(0.5,),
                      class_fractions=(1.0, 0.2), infer=False, replications=1)
    r = run_mixing_recovery(plan)[0]
    assert np.isnan(r.posterior_cells).all()
    with pytest.raises(ConfigError):
        run_mixing_recovery(small_plan(kind=MIXING_RECOVERY, class_sizes=(15, 15), class_fractions=(1.0,)))


def test_illustration_small(tmp_path):
    plan = small_plan(kind=ILLUSTRATION, n=30, n_samples=200)
    ccm, mult, rows = run_illustration(plan, max_degree=10)
    assert ccm.shape == mult.shape == (200, 30)
    assert len(rows) == 11
    write_illustration_outputs(ccm, mult, rows, tmp_path, max_degree=10, plot=True)
    assert (tmp_path / "illustration.svg").exists()
