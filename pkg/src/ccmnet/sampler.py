"""Metropolis-Hastings sampling of networks from a CCM.

Proposals use tie/no-tie (TnT): with probability ``tnt_edge_prob`` an
existing toggleable edge is picked, otherwise a uniform toggleable dyad.
When an observation mask is present only unknown dyads are toggleable, so
the chain targets the CCM restricted to completions of the observed part.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from . import kernels as K
from .counting import METHODS
from .errors import ConfigError
from .graph import Network, as_generator, class_capacities, from_upper_cells, n_dyads, upper_cells
from .model import DEGREE, MultinomialDegree, PoissonMultinomialMixing, Uniform

CHUNK = 1 << 18


@dataclass
class SamplerConfig:
    iterations: int
    burn_in: int = 0
    thin: int = 1
    tnt_edge_prob: float = 0.5
    seed: int | None = None
    paper_faithful_acceptance: bool = False

    def __post_init__(self):
        if self.iterations < 1:
            raise ConfigError("iterations must be positive")
        if not 0 <= self.burn_in < self.iterations:
            raise ConfigError("burn_in must satisfy 0 <= burn_in < iterations")
        if self.thin < 1:
            raise ConfigError("thin must be >= 1")
        if not 0.0 <= self.tnt_edge_prob <= 1.0:
            raise ConfigError("tnt_edge_prob must lie in [0, 1]")

    @property
    def n_retained(self):
        return (self.iterations - self.burn_in) // self.thin


@dataclass
class SampleStream:
    """Retained statistics from one chain, in chain order."""

    iterations: np.ndarray
    stats: np.ndarray
    columns: list = field(default_factory=list)
    accepted: int = 0
    proposed: int = 0

    def __len__(self):
        return len(self.iterations)

    @property
    def acceptance_rate(self):
        return self.accepted / self.proposed if self.proposed else float("nan")

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["iteration"] + list(self.columns))
            for it, row in zip(self.iterations, self.stats):
                w.writerow([int(it)] + [int(v) for v in row])


def stat_columns(mapping, n):
    if mapping.kind == DEGREE:
        return [f"d{k}" for k in range(n)]
    q = mapping.q
    return [f"mm_{a}_{b}" for a in range(q) for b in range(a, q)]


class ChainState:
    """Array-backed chain state handed to the compiled kernel."""

    def __init__(self, g, spec, mask=None):
        spec.check(g.n)
        n = g.n
        self.n = n
        self.spec = spec
        self.mask = mask
        self.adj = g.adj.copy()
        self.deg = g.degrees.copy()
        self.dcount = np.bincount(self.deg, minlength=n).astype(np.int64)
        if mask is None:
            iu, ju = np.triu_indices(n, 1)
            td = np.column_stack((iu, ju))
        else:
            if mask.n != n:
                raise ConfigError("mask size differs from network size")
            td = mask.unknown_dyads()
        self.td = np.ascontiguousarray(td, dtype=np.int64)
        self.fpos = np.full((n, n), -1, dtype=np.int64)
        self.fe = np.zeros((max(len(self.td), 1), 2), dtype=np.int64)
        fm = 0
        for i, j in self.td[self.adj[self.td[:, 0], self.td[:, 1]] == 1]:
            self.fe[fm] = (i, j)
            self.fpos[i, j] = self.fpos[j, i] = fm
            fm += 1
        self.cnt = np.array([fm, g.n_edges], dtype=np.int64)
        mapping = spec.mapping
        if mapping.kind == DEGREE:
            self.kind = K.KIND_DEGREE
            self.labels = np.zeros(n, dtype=np.int64)
            self.cap = np.array([[n_dyads(n)]], dtype=np.int64)
        else:
            self.kind = K.KIND_MIXING
            c = mapping.classification
            self.labels = c.labels.astype(np.int64)
            self.cap = class_capacities(c.class_sizes)
        q = self.cap.shape[0]
        self.mm = np.zeros((q, q), dtype=np.int64)
        e = g.edges()
        if len(e):
            a, b = self.labels[e[:, 0]], self.labels[e[:, 1]]
            np.add.at(self.mm, (a, b), 1)
            off = a != b
            np.add.at(self.mm, (b[off], a[off]), 1)
        self.method = METHODS[mapping.count_method]
        self.set_law(spec.law)

    @property
    def n_toggleable(self):
        return len(self.td)

    def set_law(self, law):
        self.uniform = isinstance(law, Uniform)
        self.log_theta = np.zeros(1)
        self.log_lam = 0.0
        self.log_alpha = np.zeros((1, 1))
        if isinstance(law, MultinomialDegree):
            self.log_theta = np.ascontiguousarray(law.log_theta, dtype=float)
        elif isinstance(law, PoissonMultinomialMixing):
            self.log_lam = float(np.log(law.lam))
            self.log_alpha = from_upper_cells(law.log_alpha, self.cap.shape[0]).astype(float)
        self.law = law

    def run(self, u, p_edge=0.5, hastings=True, thin=1, rec_kind=K.REC_NONE, out=None):
        if out is None:
            out = np.zeros((0, 1), dtype=np.int64)
        return K.mh_chain(self.adj, self.fpos, self.fe, self.cnt, self.td, self.deg, self.dcount,
                          self.labels, self.mm, self.cap, self.kind, self.uniform,
                          self.log_theta, self.log_lam, self.log_alpha, self.method,
                          float(p_edge), bool(hastings), u, int(thin), out, int(rec_kind))

    def advance(self, steps, rng, p_edge=0.5, hastings=True):
        """Run ``steps`` proposals without recording; return accepted count."""
        acc = 0
        left = int(steps)
        if self.n_toggleable == 0:
            return 0
        while left > 0:
            k = min(left, CHUNK)
            acc += self.run(rng.random((k, 3)), p_edge, hastings)
            left -= k
        return acc

    def statistic(self):
        if self.kind == K.KIND_DEGREE:
            return self.dcount.copy()
        return self.mm.copy()

    def network(self):
        return Network.from_adjacency(self.adj)

    @property
    def n_edges(self):
        return int(self.cnt[1])

    def check_invariants(self):
        """Recompute every maintained quantity from ``adj``; raise on mismatch."""
        g = self.network()
        assert np.array_equal(self.deg, g.degrees)
        assert np.array_equal(self.dcount, np.bincount(g.degrees, minlength=self.n))
        assert self.cnt[1] == g.n_edges
        free = self.adj[self.td[:, 0], self.td[:, 1]] == 1
        assert self.cnt[0] == free.sum()
        fe = self.fe[: self.cnt[0]]
        assert np.all(self.fpos[fe[:, 0], fe[:, 1]] == np.arange(len(fe)))
        assert np.all(self.adj[fe[:, 0], fe[:, 1]] == 1)


def propose_tnt(g, mask, rng, tnt_edge_prob=0.5):
    """Draw one TnT proposal.

    Returns ``((i, j), log_correction)`` where ``log_correction`` is
    ``log q(g | g') - log q(g' | g)``.
    """
    rng = as_generator(rng)
    if mask is None:
        iu, ju = np.triu_indices(g.n, 1)
        td = np.column_stack((iu, ju))
    else:
        td = mask.unknown_dyads()
    n_td = len(td)
    if n_td == 0:
        raise ValueError("no toggleable dyads")
    free = td[g.adj[td[:, 0], td[:, 1]] == 1]
    fm = len(free)
    p = tnt_edge_prob
    if fm > 0 and rng.random() < p:
        i, j = free[rng.integers(fm)]
    else:
        i, j = td[rng.integers(n_td)]
    if g.has_edge(i, j):
        fwd = p / fm + (1 - p) / n_td
        rev = 1.0 / n_td if fm == 1 else (1 - p) / n_td
    else:
        fwd = (1 - p) / n_td if fm > 0 else 1.0 / n_td
        rev = p / (fm + 1) + (1 - p) / n_td
    return (int(i), int(j)), float(np.log(rev) - np.log(fwd))


def tnt_proposal_pmf(g, mask=None, tnt_edge_prob=0.5):
    """Exact probability of proposing each toggleable dyad (rows of the
    returned dyad array)."""
    if mask is None:
        iu, ju = np.triu_indices(g.n, 1)
        td = np.column_stack((iu, ju))
    else:
        td = mask.unknown_dyads()
    is_edge = g.adj[td[:, 0], td[:, 1]] == 1
    fm = int(is_edge.sum())
    n_td = len(td)
    if fm == 0:
        return td, np.full(n_td, 1.0 / n_td)
    p = tnt_edge_prob
    return td, (1 - p) / n_td + np.where(is_edge, p / fm, 0.0)


def _record_kind(record, mapping):
    if record == "statistic":
        return K.REC_DEGREE if mapping.kind == DEGREE else K.REC_MIXING
    if record == "code":
        return K.REC_CODE
    raise ConfigError(f"unknown record mode {record!r}")


def mh_run(spec, init, cfg, mask=None, record="statistic"):
    """Run one chain from ``init`` and return the retained samples.

    ``record="code"`` stores each retained network as an integer bit code
    over the lexicographic dyad order (``n <= 11`` only).
    """
    state = ChainState(init, spec, mask)
    if state.n_toggleable == 0:
        raise ValueError("no toggleable dyads")
    rng = as_generator(cfg.seed)
    hastings = not cfg.paper_faithful_acceptance
    p = cfg.tnt_edge_prob
    acc = state.advance(cfg.burn_in, rng, p, hastings)
    rec = _record_kind(record, spec.mapping)
    if rec == K.REC_CODE:
        if n_dyads(init.n) > 62:
            raise ConfigError("code recording needs n <= 11")
        width, cols = 1, ["code"]
    else:
        cols = stat_columns(spec.mapping, init.n)
        width = len(cols)
    n_keep = cfg.n_retained
    out = np.zeros((n_keep, width), dtype=np.int64)
    per_chunk = max(1, CHUNK // cfg.thin)
    row = 0
    while row < n_keep:
        k = min(per_chunk, n_keep - row)
        u = rng.random((k * cfg.thin, 3))
        acc += state.run(u, p, hastings, cfg.thin, rec, out[row: row + k])
        row += k
    # proposals after the last retained sample are still part of the run
    tail = cfg.iterations - cfg.burn_in - n_keep * cfg.thin
    acc += state.advance(tail, rng, p, hastings)
    iters = cfg.burn_in + cfg.thin * np.arange(1, n_keep + 1, dtype=np.int64)
    stream = SampleStream(iters, out, cols, acc, cfg.iterations)
    stream.final_state = state
    return stream


def generate_networks(spec, n_networks, cfg, n=None, init=None, mask=None):
    """Retained statistics of ``n_networks`` thinned draws (one chain).

    ``cfg.iterations`` is overridden so exactly ``n_networks`` are kept.
    The chain starts from ``init`` or the empty network on ``n`` nodes.
    """
    if init is None:
        if n is None:
            if spec.mapping.kind != DEGREE:
                n = spec.mapping.classification.n
            elif len(spec.law):
                n = len(spec.law)
            else:
                raise ConfigError("node count needed for a uniform degree law")
        init = Network(n)
    run_cfg = SamplerConfig(cfg.burn_in + n_networks * cfg.thin, cfg.burn_in, cfg.thin,
                            cfg.tnt_edge_prob, cfg.seed, cfg.paper_faithful_acceptance)
    return mh_run(spec, init, run_cfg, mask).stats


def draw_network(spec, n, sweeps=20.0, seed=None, tnt_edge_prob=0.5):
    """One network from a chain started empty and run ``sweeps * n(n-1)/2``
    proposals."""
    state = ChainState(Network(n), spec)
    rng = as_generator(seed)
    state.advance(int(round(sweeps * n_dyads(n))), rng, tnt_edge_prob, True)
    return state.network()


def decode_network(code, n):
    """Inverse of the ``record="code"`` encoding."""
    g = Network(n)
    bit = 0
    for i in range(n):
        for j in range(i + 1, n):
            if (int(code) >> bit) & 1:
                g.toggle(i, j)
            bit += 1
    return g


def encode_network(g):
    code = 0
    bit = 0
    for i in range(g.n):
        for j in range(i + 1, g.n):
            if g.adj[i, j]:
                code |= 1 << bit
            bit += 1
    return code


__all__ = [
    "SamplerConfig", "SampleStream", "ChainState", "propose_tnt", "tnt_proposal_pmf",
    "mh_run", "generate_networks", "draw_network", "encode_network", "decode_network", "upper_cells",
]
