"""Congruence class models.

A CCM puts a distribution on the values of a network statistic (the
congruence classes) and spreads each class's mass evenly over the networks
in it::

    log P(g) = log Q(phi(g) | theta) - log W(theta) - log |c(phi(g))|

Only differences of ``log Q - log |c|`` are ever needed by the samplers, so
``W`` never has to be computed here.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np
from scipy.special import gammaln

from .counting import METHODS, log_graph_count
from .errors import ConfigError
from .graph import (
    NodeClassification,
    class_capacities,
    degree_distribution,
    mixing_matrix,
    upper_cells,
)

DEGREE = "degree"
MIXING = "mixing"


@dataclass(frozen=True)
class CongruenceMapping:
    """Which statistic defines the congruence classes."""

    kind: str
    classification: Optional[NodeClassification] = None
    count_method: str = "bc"

    def __post_init__(self):
        if self.kind not in (DEGREE, MIXING):
            raise ConfigError(f"unknown mapping kind {self.kind!r}")
        if self.kind == MIXING and self.classification is None:
            raise ConfigError("mixing mapping needs a node classification")
        if self.count_method not in METHODS:
            raise ConfigError(f"unknown count method {self.count_method!r}")

    @classmethod
    def degree(cls, count_method="bc"):
        return cls(DEGREE, None, count_method)

    @classmethod
    def mixing(cls, classification):
        return cls(MIXING, classification)

    @property
    def q(self):
        return self.classification.q if self.classification is not None else 0

    def n_cells(self, n=None):
        if self.kind == DEGREE:
            return n
        q = self.q
        return q * (q + 1) // 2


def _log_probs(p, what):
    p = np.asarray(p, dtype=float)
    if p.ndim != 1 or (p < 0).any():
        raise ConfigError(f"{what} must be a non-negative vector")
    if abs(p.sum() - 1.0) > 1e-12:
        raise ConfigError(f"{what} must sum to 1 (got {p.sum()!r})")
    with np.errstate(divide="ignore"):
        return np.log(p)


def _normalize_log(logp):
    logp = np.asarray(logp, dtype=float)
    top = logp.max()
    return logp - (top + np.log(np.exp(logp - top).sum()))


class MultinomialDegree:
    """Degrees of the ``n`` nodes are multinomial with cell probabilities
    ``theta`` over degrees ``0..n-1``."""

    def __init__(self, theta=None, log_theta=None):
        if log_theta is None:
            log_theta = _log_probs(theta, "theta")
        self.log_theta = np.asarray(log_theta, dtype=float)

    @classmethod
    def from_log(cls, log_theta):
        return cls(log_theta=_normalize_log(log_theta))

    @property
    def theta(self):
        return np.exp(self.log_theta)

    def __len__(self):
        return len(self.log_theta)


class PoissonMultinomialMixing:
    """Total edge count ~ Poisson(lam); cells of the mixing matrix given the
    total ~ Multinomial(alpha) over the ``q(q+1)/2`` unordered class pairs."""

    def __init__(self, lam, alpha=None, log_alpha=None):
        if not lam > 0:
            raise ConfigError("lambda must be positive")
        self.lam = float(lam)
        if log_alpha is None:
            log_alpha = _log_probs(alpha, "alpha")
        self.log_alpha = np.asarray(log_alpha, dtype=float)

    @property
    def alpha(self):
        return np.exp(self.log_alpha)

    def __len__(self):
        return len(self.log_alpha)


class Uniform:
    """Every achievable class gets the same unnormalized mass."""

    def __len__(self):
        return 0


ClassLaw = Union[MultinomialDegree, PoissonMultinomialMixing, Uniform]


@dataclass
class PriorSpec:
    dirichlet_alpha0: Union[float, np.ndarray] = 1e-4
    gamma_shape: float = 1e-3
    gamma_rate: float = 1e-3

    def __post_init__(self):
        a0 = np.asarray(self.dirichlet_alpha0, dtype=float)
        if (a0 < 0).any():
            raise ConfigError("dirichlet_alpha0 must be non-negative")
        if not (self.gamma_shape > 0 and self.gamma_rate > 0):
            raise ConfigError("gamma prior parameters must be positive")

    def alpha0(self, k):
        a0 = np.asarray(self.dirichlet_alpha0, dtype=float)
        if a0.ndim == 0:
            return np.full(k, float(a0))
        if len(a0) != k:
            raise ConfigError(f"dirichlet_alpha0 has length {len(a0)}, need {k}")
        return a0


@dataclass
class CcmSpec:
    mapping: CongruenceMapping
    law: ClassLaw
    prior: PriorSpec = field(default_factory=PriorSpec)

    def check(self, n):
        if isinstance(self.law, MultinomialDegree):
            if self.mapping.kind != DEGREE:
                raise ConfigError("multinomial degree law needs the degree mapping")
            if len(self.law) != n:
                raise ConfigError(f"theta has length {len(self.law)}, need n={n}")
        elif isinstance(self.law, PoissonMultinomialMixing):
            if self.mapping.kind != MIXING:
                raise ConfigError("Poisson-multinomial law needs the mixing mapping")
            if len(self.law) != self.mapping.n_cells():
                raise ConfigError(f"alpha has length {len(self.law)}, need {self.mapping.n_cells()}")
        if self.mapping.kind == MIXING and self.mapping.classification.n != n:
            raise ConfigError("classification size differs from network size")
        return self


def phi(g, mapping):
    if mapping.kind == DEGREE:
        return degree_distribution(g)
    return mixing_matrix(g, mapping.classification)


def _xlogy(x, logp):
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    pos = x > 0
    out[pos] = x[pos] * logp[pos]
    return out.sum()


def log_q_class(x, law):
    """Log unnormalized class mass ``log Q(x | theta)``.

    Returns ``-inf`` when ``x`` puts a count on a zero-probability cell.
    """
    if isinstance(law, Uniform):
        return 0.0
    if isinstance(law, MultinomialDegree):
        x = np.asarray(x, dtype=np.int64)
        if len(x) != len(law):
            raise ConfigError("degree distribution length differs from theta")
        total = x.sum()
        return float(gammaln(total + 1) - gammaln(x + 1).sum() + _xlogy(x, law.log_theta))
    if isinstance(law, PoissonMultinomialMixing):
        cells = upper_cells(x)
        if len(cells) != len(law):
            raise ConfigError("mixing matrix size differs from alpha")
        total = cells.sum()
        log_pois = -law.lam + total * np.log(law.lam) - gammaln(total + 1)
        log_mult = gammaln(total + 1) - gammaln(cells + 1).sum() + _xlogy(cells, law.log_alpha)
        return float(log_pois + log_mult)
    raise TypeError(f"unknown class law {law!r}")


def degree_sequence_from_distribution(counts):
    """A representative degree sequence (sorted ascending) for ``counts``."""
    counts = np.asarray(counts, dtype=np.int64)
    return np.repeat(np.arange(len(counts)), counts)


def log_class_size(x, mapping, n=None):
    """Log number of networks in the congruence class of ``x``.

    Exact for mixing matrices (product of binomials); for degree
    distributions the graph count of the sequence is the asymptotic
    estimate from :mod:`ccmnet.counting`.
    """
    if mapping.kind == MIXING:
        cap = upper_cells(class_capacities(mapping.classification.class_sizes))
        cells = upper_cells(x)
        if (cells > cap).any() or (cells < 0).any():
            return -np.inf
        return float((gammaln(cap + 1) - gammaln(cells + 1) - gammaln(cap - cells + 1)).sum())
    x = np.asarray(x, dtype=np.int64)
    n = int(x.sum())
    perms = gammaln(n + 1) - gammaln(x + 1).sum()
    return float(perms + log_graph_count(degree_sequence_from_distribution(x), mapping.count_method))


def _toggled_degrees(g, i, j):
    d = g.degrees.copy()
    step = -1 if g.has_edge(i, j) else 1
    d[i] += step
    d[j] += step
    return d


def log_class_size_ratio(g, toggle, mapping):
    """``log(|c(phi(g'))| / |c(phi(g))|)`` for ``g'`` = ``g`` with ``toggle`` flipped."""
    i, j = toggle
    if i == j:
        raise ValueError("self-loops are not allowed")
    if mapping.kind == MIXING:
        labels = mapping.classification.labels
        a, b = labels[i], labels[j]
        cap = class_capacities(mapping.classification.class_sizes)[a, b]
        cur = mixing_matrix(g, mapping.classification)[a, b]
        if g.has_edge(i, j):
            return float(np.log(cur) - np.log(cap - cur + 1))
        return float(np.log(cap - cur) - np.log(cur + 1))
    d0 = g.degrees
    d1 = _toggled_degrees(g, i, j)
    x0 = np.bincount(d0, minlength=g.n)
    x1 = np.bincount(d1, minlength=g.n)
    perm = -(gammaln(x1 + 1).sum() - gammaln(x0 + 1).sum())
    return float(perm + log_graph_count(d1, mapping.count_method) - log_graph_count(d0, mapping.count_method))


def log_network_weight(g, spec):
    """Unnormalized ``log P(g) = log Q(phi(g)) - log |c(phi(g))|``."""
    x = phi(g, spec.mapping)
    return log_q_class(x, spec.law) - log_class_size(x, spec.mapping)


def log_network_prob_ratio(g, toggle, spec):
    """``log P(g') - log P(g)`` for a single dyad toggle; ``W`` cancels."""
    i, j = toggle
    x0 = phi(g, spec.mapping)
    g1 = g.copy()
    g1.toggle(i, j)
    x1 = phi(g1, spec.mapping)
    dq = log_q_class(x1, spec.law) - log_q_class(x0, spec.law)
    if np.isnan(dq):
        dq = -np.inf
    return float(dq - log_class_size_ratio(g, toggle, spec.mapping))
