"""Simulation harness: illustration, degree recovery and mixing recovery.

Every replication derives its own seed from the master seed by counter-mode
splitting (``SeedSequence(master, spawn_key=(cell, rep))``), so results do
not depend on execution order or on how many worker processes run them.
Tables are merged by replication index before writing.
"""
from __future__ import annotations

import csv
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.stats import mannwhitneyu, nbinom

from . import diagnostics as dg
from .errors import ConfigError
from .gibbs import GibbsConfig, gibbs_run, summarize
from .graph import (
    Network,
    NodeClassification,
    ObservationMask,
    degree_distribution,
    mixing_matrix,
    n_dyads,
    observed_network,
    sample_induced_observation,
    upper_cells,
)
from .model import CcmSpec, CongruenceMapping, MultinomialDegree, PoissonMultinomialMixing, PriorSpec
from .sampler import SamplerConfig, draw_network, mh_run

DEGREE_RECOVERY = "degree_recovery"
MIXING_RECOVERY = "mixing_recovery"
ILLUSTRATION = "illustration"

RESULT_COLUMNS = ["fraction", "hellinger_estimate", "hellinger_complete_case", "reduction"]


def build_nb_theta(size, mu, n):
    """Negative binomial pmf (``size``, mean ``mu``) on ``0..n-1``, renormalized."""
    if not (size > 0 and mu > 0):
        raise ConfigError("size and mu must be positive")
    p = size / (size + mu)
    theta = nbinom.pmf(np.arange(n), size, p)
    return theta / theta.sum()


@dataclass
class ExperimentPlan:
    kind: str = DEGREE_RECOVERY
    n: int = 200
    fractions: tuple = (0.3, 0.5, 0.7)
    replications: int = 10
    gibbs: GibbsConfig = field(default_factory=GibbsConfig)
    seed: int = 0
    truth_sweeps: float = 20.0
    count_method: str = "bc"
    prior: PriorSpec = field(default_factory=PriorSpec)
    nb_size: float = 1.02
    nb_mu: float = 6.19
    # mixing scenario
    class_sizes: tuple = (100, 100)
    lam: float = 300.0
    alpha: tuple = (0.4, 0.2, 0.4)
    class_fractions: tuple = ()
    infer: bool = True
    # illustration
    n_samples: int = 5000
    thin_sweeps: float = 2.0

    def __post_init__(self):
        if self.kind not in (DEGREE_RECOVERY, MIXING_RECOVERY, ILLUSTRATION):
            raise ConfigError(f"unknown scenario {self.kind!r}")
        if self.replications < 1:
            raise ConfigError("replications must be >= 1")
        if not self.fractions or any(not 0 < f <= 1 for f in self.fractions):
            raise ConfigError("sampling fractions must lie in (0, 1]")
        if self.n < 2:
            raise ConfigError("n must be at least 2")


PROFILES = {
    "desk": dict(n=200, fractions=(0.3, 0.5, 0.7), replications=10),
    "paper": dict(n=1000, fractions=tuple(round(0.1 * k, 1) for k in range(1, 10)), replications=100),
}


def plan_from_profile(profile, **overrides):
    if profile not in PROFILES:
        raise ConfigError(f"unknown profile {profile!r} (choose from {sorted(PROFILES)})")
    kw = dict(PROFILES[profile])
    kw.update(overrides)
    return ExperimentPlan(**kw)


def replication_seeds(master, cell, rep, k=3):
    """``k`` independent integer seeds for one (cell, replication)."""
    ss = np.random.SeedSequence(master, spawn_key=(int(cell), int(rep)))
    return [int(s) for s in ss.generate_state(k, dtype=np.uint64)]


def _map(fn, tasks, workers):
    if workers is None or workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, tasks))


# -- degree recovery ----------------------------------------------------------

@dataclass
class ReplicationResult:
    fraction: float
    replication: int
    hellinger_estimate: float
    hellinger_complete_case: float
    diagnostics: list
    trace: np.ndarray
    truth: np.ndarray
    estimate: np.ndarray
    observed: np.ndarray

    @property
    def reduction(self):
        return reduction(self.hellinger_estimate, self.hellinger_complete_case)


def reduction(h_est, h_cc):
    return 1.0 - h_est / h_cc if h_cc > 0 else float("nan")


def degree_replication(task):
    """Truth -> induced observation -> Gibbs -> both Hellinger distances."""
    plan, fi, rep = task
    s = plan.fractions[fi]
    seed_truth, seed_obs, seed_gibbs = replication_seeds(plan.seed, fi, rep)
    n = plan.n
    theta = build_nb_theta(plan.nb_size, plan.nb_mu, n)
    spec = CcmSpec(CongruenceMapping.degree(plan.count_method), MultinomialDegree(theta), plan.prior)
    g = draw_network(spec, n, plan.truth_sweeps, seed_truth)
    truth = degree_distribution(g)
    mask, g_o = sample_induced_observation(g, s, seed_obs)
    observed = degree_distribution(g_o)
    cfg = replace(plan.gibbs, seed=seed_gibbs)
    res = gibbs_run(g_o, mask, spec, cfg)
    burn = cfg.outer_burn_in
    est = summarize(res, burn).stat_mean
    diag = []
    for k, name in enumerate(res.theta_columns):
        ok, z, e = dg.chain_diagnostics(res.theta[burn:, k])
        diag.append((f"s{s:g}_r{rep}_{name}", len(res.theta) - burn, ok, z, e))
    trace_col = min(2, res.theta.shape[1] - 1)
    return ReplicationResult(s, rep, dg.hellinger(est, truth), dg.hellinger(observed, truth),
                             diag, res.theta[:, trace_col].copy(), truth, est, observed)


def run_degree_recovery(plan, workers=1):
    """All (fraction, replication) cells, ordered by fraction then replication."""
    tasks = [(plan, fi, r) for fi in range(len(plan.fractions)) for r in range(plan.replications)]
    out = _map(degree_replication, tasks, workers)
    return sorted(out, key=lambda r: (plan.fractions.index(r.fraction), r.replication))


def results_table(results):
    return [[r.fraction, r.hellinger_estimate, r.hellinger_complete_case, r.reduction] for r in results]


def summary_table(results):
    """Mean distances per fraction; reduction from the two means."""
    rows = []
    for f in sorted({r.fraction for r in results}):
        sel = [r for r in results if r.fraction == f]
        he = float(np.mean([r.hellinger_estimate for r in sel]))
        hc = float(np.mean([r.hellinger_complete_case for r in sel]))
        rows.append([f, he, hc, reduction(he, hc)])
    return rows


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".10g")
    return v


def write_rows(path, columns, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([_fmt(v) for v in r])


def write_degree_outputs(results, out_dir, plot=True):
    """results.csv, summary.csv, diagnostics.csv and SVG figures."""
    os.makedirs(out_dir, exist_ok=True)
    write_rows(os.path.join(out_dir, "results.csv"), RESULT_COLUMNS, results_table(results))
    write_rows(os.path.join(out_dir, "summary.csv"), RESULT_COLUMNS, summary_table(results))
    dg.write_diagnostics_csv([d for r in results for d in r.diagnostics],
                             os.path.join(out_dir, "diagnostics.csv"))
    est_rows = [[r.fraction, r.replication] + [float(v) for v in r.estimate] for r in results]
    n = len(results[0].truth) if results else 0
    write_rows(os.path.join(out_dir, "estimates.csv"),
               ["fraction", "replication"] + [f"d{k}" for k in range(n)], est_rows)
    if plot and results:
        fr = sorted({r.fraction for r in results})
        est = [[r.hellinger_estimate for r in results if r.fraction == f] for f in fr]
        cc = [[r.hellinger_complete_case for r in results if r.fraction == f] for f in fr]
        dg.boxplot_svg(est, fr, os.path.join(out_dir, "hellinger.svg"),
                       title="Hellinger distance to truth (blue: estimate, orange: complete case)",
                       ylabel="Hellinger distance", overlay=(cc, "complete case"))
        for f in fr:
            r = next(x for x in results if x.fraction == f)
            truth = r.truth[2] / r.truth.sum() if len(r.truth) > 2 else None
            dg.trace_svg(r.trace, os.path.join(out_dir, f"trace_theta_2_s{f:g}.svg"),
                         title=f"theta_2, s={f:g}", truth=truth)


# -- mixing recovery ------------------------------------------------------------

def sample_by_class(c, fractions, rng):
    """Sample ``round(f_k * n_k)`` nodes from each class ``k``."""
    rng = np.random.default_rng(rng)
    picked = []
    for k, f in enumerate(fractions):
        members = np.flatnonzero(c.labels == k)
        m = int(np.floor(f * len(members) + 0.5))
        picked.append(rng.choice(members, size=m, replace=False))
    return ObservationMask.from_sampled_nodes(c.n, np.concatenate(picked) if picked else [])


@dataclass
class MixingReplication:
    fraction: float
    replication: int
    truth_cells: np.ndarray
    observed_cells: np.ndarray
    posterior_cells: np.ndarray
    posterior_alpha: np.ndarray
    observed_edge_fraction: float


def mixing_replication(task):
    plan, fi, rep = task
    s = plan.fractions[fi]
    seed_truth, seed_obs, seed_gibbs = replication_seeds(plan.seed, fi, rep)
    c = NodeClassification.from_sizes(plan.class_sizes)
    spec = CcmSpec(CongruenceMapping.mixing(c), PoissonMultinomialMixing(plan.lam, plan.alpha), plan.prior)
    g = draw_network(spec, c.n, plan.truth_sweeps, seed_truth)
    fr = plan.class_fractions or tuple([s] * c.q)
    if len(fr) != c.q:
        raise ConfigError("class_fractions needs one entry per class")
    mask = sample_by_class(c, fr, seed_obs)
    g_o = observed_network(g, mask)
    truth = upper_cells(mixing_matrix(g, c)).astype(float)
    obs = upper_cells(mixing_matrix(g_o, c)).astype(float)
    frac = g_o.n_edges / g.n_edges if g.n_edges else float("nan")
    if plan.infer:
        cfg = replace(plan.gibbs, seed=seed_gibbs)
        res = gibbs_run(g_o, mask, spec, cfg)
        sm = summarize(res, cfg.outer_burn_in)
        post_cells = sm.stat_mean
        post_alpha = sm.param_mean[1:]
    else:
        post_cells = np.full(len(truth), np.nan)
        post_alpha = np.full(len(truth), np.nan)
    return MixingReplication(s, rep, truth, obs, post_cells, post_alpha, frac)


def run_mixing_recovery(plan, workers=1):
    tasks = [(plan, fi, r) for fi in range(len(plan.fractions)) for r in range(plan.replications)]
    out = _map(mixing_replication, tasks, workers)
    return sorted(out, key=lambda r: (plan.fractions.index(r.fraction), r.replication))


MIXING_COLUMNS = ["fraction", "replication", "cell", "truth_prop", "complete_case_prop",
                  "posterior_prop", "posterior_alpha", "observed_edge_fraction"]


def _props(x):
    t = np.sum(x)
    return x / t if t > 0 else np.full(len(x), np.nan)


def mixing_rows(results, q):
    names = [f"mm_{a}_{b}" for a in range(q) for b in range(a, q)]
    rows = []
    for r in results:
        tp, cp, pp = _props(r.truth_cells), _props(r.observed_cells), _props(r.posterior_cells)
        for k, name in enumerate(names):
            rows.append([r.fraction, r.replication, name, tp[k], cp[k], pp[k], r.posterior_alpha[k],
                         r.observed_edge_fraction])
    return rows


def write_mixing_outputs(results, plan, out_dir):
    os.makedirs(out_dir, exist_ok=True)
    write_rows(os.path.join(out_dir, "mixing.csv"), MIXING_COLUMNS, mixing_rows(results, len(plan.class_sizes)))


# -- illustration -----------------------------------------------------------------

ILLUSTRATION_COLUMNS = ["degree", "ccm_mean", "ccm_median", "ccm_var", "multinomial_mean",
                        "multinomial_median", "multinomial_var", "u_statistic", "p_value", "reject"]


def run_illustration(plan, max_degree=20, alpha=0.01, theta=None):
    """CCM degree distributions vs direct multinomial draws.

    Returns ``(ccm_counts, multinomial_counts, rows)`` where rows are per
    degree bin ``0..max_degree`` with a Mann-Whitney two-sample test at a
    Bonferroni-corrected level.
    """
    n = plan.n
    if theta is None:
        theta = build_nb_theta(plan.nb_size, plan.nb_mu, n)
    seed_chain, seed_mult, _ = replication_seeds(plan.seed, 0, 0)
    spec = CcmSpec(CongruenceMapping.degree(plan.count_method), MultinomialDegree(theta))
    thin = max(1, int(round(plan.thin_sweeps * n_dyads(n))))
    burn = int(round(plan.truth_sweeps * n_dyads(n)))
    cfg = SamplerConfig(burn + plan.n_samples * thin, burn, thin, seed=seed_chain)
    ccm = mh_run(spec, Network(n), cfg).stats
    mult = np.random.default_rng(seed_mult).multinomial(n, theta, size=plan.n_samples)
    rows = illustration_rows(ccm, mult, max_degree, alpha)
    return ccm, mult, rows


def illustration_rows(ccm, mult, max_degree=20, alpha=0.01):
    bins = min(max_degree + 1, ccm.shape[1])
    level = alpha / bins
    rows = []
    for k in range(bins):
        a, b = ccm[:, k], mult[:, k]
        if np.all(a == a[0]) and np.all(b == a[0]):
            u, p = float("nan"), 1.0
        else:
            u, p = mannwhitneyu(a, b, alternative="two-sided")
        rows.append([k, a.mean(), float(np.median(a)), a.var(ddof=1), b.mean(), float(np.median(b)),
                     b.var(ddof=1), float(u), float(p), int(p < level)])
    return rows


def write_illustration_outputs(ccm, mult, rows, out_dir, max_degree=20, plot=True):
    os.makedirs(out_dir, exist_ok=True)
    write_rows(os.path.join(out_dir, "illustration_tests.csv"), ILLUSTRATION_COLUMNS, rows)
    k = min(max_degree + 1, ccm.shape[1])
    cols = ["source"] + [f"d{j}" for j in range(k)]
    dump = [["ccm"] + [int(v) for v in row[:k]] for row in ccm]
    dump += [["multinomial"] + [int(v) for v in row[:k]] for row in mult]
    write_rows(os.path.join(out_dir, "illustration_samples.csv"), cols, dump)
    if plot:
        dg.boxplot_svg([ccm[:, j] for j in range(k)], list(range(k)),
                       os.path.join(out_dir, "illustration.svg"),
                       title="Nodes per degree (blue: CCM, orange: multinomial)", ylabel="count",
                       overlay=([mult[:, j] for j in range(k)], "multinomial"))
