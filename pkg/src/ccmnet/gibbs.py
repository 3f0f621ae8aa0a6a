"""Gibbs sampler over (unobserved network part, CCM parameters).

Each outer iteration runs a masked MH sweep over the unknown dyads with the
parameters held fixed, then draws the parameters from their conjugate full
conditional given the completed network's statistic.  The normalizing mass
``W(theta)`` is treated as constant unless a ``log_w`` hook is supplied.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .errors import ConfigError
from .graph import Network, as_generator, upper_cells
from .model import DEGREE, CcmSpec, MultinomialDegree, PoissonMultinomialMixing, Uniform
from .sampler import ChainState, stat_columns

CHECKPOINT_FORMAT = "ccmnet-gibbs-checkpoint"
CHECKPOINT_VERSION = 1


@dataclass
class GibbsConfig:
    outer_iterations: int = 1000
    outer_burn_in: int = 100
    inner_sweep_factor: float = 1.0
    seed: int | None = None
    tnt_edge_prob: float = 0.5
    paper_faithful_acceptance: bool = False

    def __post_init__(self):
        if self.outer_iterations < 1:
            raise ConfigError("outer_iterations must be positive")
        if not 0 <= self.outer_burn_in < self.outer_iterations:
            raise ConfigError("outer_burn_in must satisfy 0 <= burn_in < outer_iterations")
        if not self.inner_sweep_factor > 0:
            raise ConfigError("inner_sweep_factor must be positive")

    def inner_steps(self, n_unknown):
        return int(math.ceil(self.inner_sweep_factor * n_unknown))


@dataclass
class PosteriorSample:
    iteration: int
    theta: np.ndarray
    statistic: np.ndarray


@dataclass
class PosteriorSummary:
    param_mean: np.ndarray
    param_quantiles: np.ndarray
    stat_mean: np.ndarray
    stat_quantiles: np.ndarray
    probs: tuple
    n_retained: int


class GibbsResult:
    """Chain of parameter and statistic snapshots, one row per outer iteration."""

    def __init__(self, theta, stats, theta_columns, stat_columns, kind, start=1):
        self.theta = theta
        self.stats = stats
        self.theta_columns = theta_columns
        self.stat_columns = stat_columns
        self.kind = kind
        self.iterations = np.arange(start, start + len(theta), dtype=np.int64)
        self.final_state = None
        self.accepted = 0
        self.proposed = 0

    def __len__(self):
        return len(self.theta)

    def __iter__(self):
        for it, th, st in zip(self.iterations, self.theta, self.stats):
            yield PosteriorSample(int(it), th, st)

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["iteration"] + self.theta_columns + self.stat_columns)
            for it, th, st in zip(self.iterations, self.theta, self.stats):
                w.writerow([int(it)] + [format(float(v), ".17g") for v in th] + [int(v) for v in st])


def read_chain_csv(path):
    """Load a posterior chain CSV into ``(columns, array)``."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValueError(f"{path}: empty file")
    header, body = rows[0], rows[1:]
    return header, np.array([[float(v) for v in r] for r in body], dtype=float).reshape(len(body), len(header))


def log_dirichlet(alpha, rng):
    """Log of a Dirichlet draw, accurate for tiny concentration parameters.

    Shapes below one use ``Gamma(a) = Gamma(a + 1) * U**(1/a)`` in log space
    so that components far below float range stay finite instead of 0.
    """
    alpha = np.asarray(alpha, dtype=float)
    if (alpha < 0).any():
        raise ValueError("Dirichlet parameters must be non-negative")
    out = np.full(len(alpha), -np.inf)
    pos = alpha > 0
    a = alpha[pos]
    small = a < 1
    lg = np.log(rng.standard_gamma(a + small))
    if small.any():
        lg[small] += np.log(rng.random(int(small.sum()))) / a[small]
    out[pos] = lg
    if not pos.any():
        raise ValueError("all Dirichlet parameters are zero")
    return out - logsumexp(lg)


def update_theta_degree(counts, prior, rng):
    """Conjugate draw ``theta ~ Dirichlet(alpha0 + D)``."""
    counts = np.asarray(counts, dtype=float)
    a = prior.alpha0(len(counts)) + counts
    return MultinomialDegree(log_theta=log_dirichlet(a, rng))


def update_theta_mixing(mm, prior, rng):
    """Conjugate draws ``lam ~ Gamma(shape + M, rate + 1)`` and
    ``alpha ~ Dirichlet(alpha0 + cells)``."""
    cells = upper_cells(mm).astype(float)
    total = cells.sum()
    lam = rng.gamma(prior.gamma_shape + total, 1.0 / (prior.gamma_rate + 1.0))
    log_alpha = log_dirichlet(prior.alpha0(len(cells)) + cells, rng)
    return PoissonMultinomialMixing(max(lam, np.finfo(float).tiny), log_alpha=log_alpha)


def initial_law(stat, spec):
    """Posterior-mean parameters given the complete-case statistic."""
    prior = spec.prior
    if spec.mapping.kind == DEGREE:
        counts = np.asarray(stat, dtype=float)
        a = prior.alpha0(len(counts)) + counts
        return MultinomialDegree(log_theta=np.log(a) - np.log(a.sum()))
    cells = upper_cells(stat).astype(float)
    a = prior.alpha0(len(cells)) + cells
    lam = (prior.gamma_shape + cells.sum()) / (prior.gamma_rate + 1.0)
    return PoissonMultinomialMixing(lam, log_alpha=np.log(a) - np.log(a.sum()))


def law_vector(law):
    if isinstance(law, MultinomialDegree):
        return law.theta
    return np.concatenate(([law.lam], law.alpha))


def theta_columns(spec, n):
    if spec.mapping.kind == DEGREE:
        return [f"theta_{k}" for k in range(n)]
    q = spec.mapping.q
    return ["lambda"] + [f"alpha_{a}_{b}" for a in range(q) for b in range(a, q)]


def update_gu(state, cfg, rng):
    """One masked MH sweep over the unknown dyads at the current parameters."""
    steps = cfg.inner_steps(state.n_toggleable)
    return state.advance(steps, rng, cfg.tnt_edge_prob, not cfg.paper_faithful_acceptance)


def update_theta(stat, spec, rng):
    if spec.mapping.kind == DEGREE:
        return update_theta_degree(stat, spec.prior, rng)
    return update_theta_mixing(stat, spec.prior, rng)


def save_checkpoint(path, state, law, rng, iteration):
    doc = {
        "format": CHECKPOINT_FORMAT,
        "version": CHECKPOINT_VERSION,
        "iteration": int(iteration),
        "n": int(state.n),
        "edges": state.network().edges().tolist(),
        "law": _law_to_dict(law),
        "rng_state": rng.bit_generator.state,
    }
    with open(path, "w") as fh:
        json.dump(doc, fh)


def load_checkpoint(path):
    with open(path) as fh:
        doc = json.load(fh)
    if doc.get("format") != CHECKPOINT_FORMAT or doc.get("version") != CHECKPOINT_VERSION:
        raise ValueError(f"{path}: not a version-{CHECKPOINT_VERSION} checkpoint")
    return doc


def _law_to_dict(law):
    if isinstance(law, MultinomialDegree):
        return {"kind": "multinomial_degree", "log_theta": law.log_theta.tolist()}
    return {"kind": "poisson_multinomial_mixing", "lambda": law.lam, "log_alpha": law.log_alpha.tolist()}


def _law_from_dict(d):
    if d["kind"] == "multinomial_degree":
        return MultinomialDegree(log_theta=np.array(d["log_theta"]))
    return PoissonMultinomialMixing(d["lambda"], log_alpha=np.array(d["log_alpha"]))


def gibbs_run(g_o, mask, spec, cfg, log_w=None, checkpoint=None, resume=None):
    """Sample the augmented posterior of (g_u, theta) given ``g_o`` and ``mask``.

    Parameters
    ----------
    g_o : Network
        Observed network; only its known dyads are used as data.
    mask : ObservationMask
    spec : CcmSpec
        Mapping, a parametric class law (its values are ignored, only its
        type matters) and priors.
    cfg : GibbsConfig
    log_w : callable, optional
        ``log_w(law) -> float`` estimate of ``log W(theta)``.  When given,
        each conjugate draw is used as an independence proposal accepted
        with probability ``min(1, W(current) / W(proposed))``.
    checkpoint : str, optional
        Path rewritten after every outer iteration.
    resume : str, optional
        Checkpoint to continue from; the result then holds only the
        iterations run after it.

    Returns
    -------
    GibbsResult
    """
    if isinstance(spec.law, Uniform):
        raise ConfigError("Gibbs inference needs a parametric class law")
    n = g_o.n
    if mask.n != n:
        raise ConfigError("mask size differs from network size")
    rng = as_generator(cfg.seed)
    start = 1
    if resume is not None:
        doc = load_checkpoint(resume)
        if doc["n"] != n:
            raise ConfigError("checkpoint is for a different network size")
        g_start = Network(n, doc["edges"])
        known = mask.known_matrix()
        if not np.array_equal(g_start.adj[known], g_o.adj[known]):
            raise ConfigError("checkpoint network disagrees with the observed dyads")
        law = _law_from_dict(doc["law"])
        rng.bit_generator.state = doc["rng_state"]
        start = doc["iteration"] + 1
        state = ChainState(g_start, CcmSpec(spec.mapping, law, spec.prior), mask)
    else:
        state = ChainState(g_o, CcmSpec(spec.mapping, spec.law, spec.prior), mask)
        law = initial_law(state.statistic(), spec)
        state.set_law(law)
    n_iter = cfg.outer_iterations - start + 1
    if n_iter < 1:
        raise ConfigError("checkpoint is already past outer_iterations")
    t_cols = theta_columns(spec, n)
    s_cols = stat_columns(spec.mapping, n)
    theta = np.zeros((n_iter, len(t_cols)))
    stats = np.zeros((n_iter, len(s_cols)), dtype=np.int64)
    acc = 0
    proposed = 0
    for r in range(n_iter):
        acc += update_gu(state, cfg, rng)
        proposed += cfg.inner_steps(state.n_toggleable)
        stat = state.statistic()
        new = update_theta(stat, spec, rng)
        if log_w is not None:
            if math.log(rng.random()) < log_w(law) - log_w(new):
                law = new
        else:
            law = new
        state.set_law(law)
        theta[r] = law_vector(law)
        stats[r] = stat if spec.mapping.kind == DEGREE else upper_cells(stat)
        if checkpoint is not None:
            save_checkpoint(checkpoint, state, law, rng, start + r)
    res = GibbsResult(theta, stats, t_cols, s_cols, spec.mapping.kind, start)
    res.final_state = state
    res.accepted = acc
    res.proposed = proposed
    return res


def summarize(result, burn_in, probs=(0.025, 0.5, 0.975)):
    """Posterior means and quantiles over iterations after ``burn_in``."""
    if isinstance(result, GibbsResult):
        theta, stats = result.theta, result.stats
    else:
        theta, stats = result
    theta = np.asarray(theta, dtype=float)
    stats = np.asarray(stats, dtype=float)
    if burn_in >= len(theta):
        raise ValueError("no samples left after burn-in")
    th, st = theta[burn_in:], stats[burn_in:]
    return PosteriorSummary(
        th.mean(axis=0), np.quantile(th, probs, axis=0),
        st.mean(axis=0), np.quantile(st, probs, axis=0),
        tuple(probs), len(th),
    )
