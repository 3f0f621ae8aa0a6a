"""Normalizing mass ``W(theta) = sum_{x in U} Q(x | theta)`` and its stability.

``U`` is the set of achievable statistics.  Two ways to get at it:

* sample-based: harvest unique classes from a chain whose class law is
  uniform, then sum ``Q`` over the harvested set.  Ratios
  ``W(theta1) / W(theta2)`` are taken over the same set, so the unknown
  ``|U|`` factor cancels.
* exact, mixing mapping only: every matrix inside the per-cell capacity box
  is graphical, so ``U`` is the box itself and the Poisson x multinomial
  law sums in closed form to ``prod_c P(Poisson(lam * alpha_c) <= N_c)``.
"""
from __future__ import annotations

import csv
import itertools
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln, logsumexp
from scipy.stats import poisson

from .errors import ConfigError
from .graph import Network, class_capacities, upper_cells
from .model import DEGREE, MIXING, CcmSpec, MultinomialDegree, PoissonMultinomialMixing, Uniform
from .sampler import mh_run


@dataclass
class ClassSample:
    """Unique statistics, one per row, in lexicographic order."""

    kind: str
    n: int
    classes: np.ndarray
    n_draws: int = 0

    def __len__(self):
        return len(self.classes)

    @classmethod
    def from_stats(cls, kind, n, stats, n_draws=None):
        stats = np.asarray(stats, dtype=np.int64)
        if stats.ndim != 2:
            raise ValueError("stats must be a 2-d array, one class per row")
        uniq = np.unique(stats, axis=0)
        return cls(kind, n, uniq, len(stats) if n_draws is None else n_draws)

    def merge(self, other):
        if (self.kind, self.n) != (other.kind, other.n):
            raise ConfigError("cannot merge samples of different mappings")
        both = np.concatenate((self.classes, other.classes))
        return ClassSample.from_stats(self.kind, self.n, both, self.n_draws + other.n_draws)


@dataclass
class StudyReport:
    """A small table with a fixed column order, emitted as CSV."""

    columns: list
    rows: list = field(default_factory=list)

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(self.columns)
            for r in self.rows:
                w.writerow([_cell(v) for v in r])

    def column(self, name):
        k = self.columns.index(name)
        return [r[k] for r in self.rows]


def _cell(v):
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".10g")
    return v


def harvest_unique_classes(mapping, n, cfg, init=None):
    """Run a uniform-class-law chain and keep the distinct statistics.

    Parameters
    ----------
    mapping : CongruenceMapping
    n : int
    cfg : SamplerConfig
        Burn-in and thinning of the harvesting chain.
    init : Network, optional
        Starting network (default empty).
    """
    spec = CcmSpec(mapping, Uniform())
    g0 = Network(n) if init is None else init
    stream = mh_run(spec, g0, cfg)
    return ClassSample.from_stats(mapping.kind, n, stream.stats, len(stream))


def class_log_q(sample, law):
    """``log Q(x | law)`` for every class in the sample (vectorized)."""
    x = sample.classes.astype(float)
    if isinstance(law, Uniform):
        return np.zeros(len(x))
    if isinstance(law, MultinomialDegree):
        if x.shape[1] != len(law):
            raise ConfigError("theta length differs from the degree-distribution width")
        total = x.sum(axis=1)
        lt = np.where(x > 0, law.log_theta[None, :], 0.0)
        return gammaln(total + 1) - gammaln(x + 1).sum(axis=1) + (x * lt).sum(axis=1)
    if isinstance(law, PoissonMultinomialMixing):
        if x.shape[1] != len(law):
            raise ConfigError("alpha length differs from the number of mixing cells")
        total = x.sum(axis=1)
        la = np.where(x > 0, law.log_alpha[None, :], 0.0)
        return -law.lam + total * np.log(law.lam) - gammaln(x + 1).sum(axis=1) + (x * la).sum(axis=1)
    raise TypeError(f"unknown class law {law!r}")


def log_w_sum(sample, law):
    """``log sum_{x in sample} Q(x | law)``."""
    if not len(sample):
        raise ValueError("empty class sample")
    lq = class_log_q(sample, law)
    if not np.isfinite(lq).any():
        raise ValueError("every sampled class has zero mass under this law")
    return float(logsumexp(lq))


def log_w_ratio(sample, law1, law2):
    return log_w_sum(sample, law1) - log_w_sum(sample, law2)


def w_ratio(sample, law1, law2):
    """``W(law1) / W(law2)`` over the same class sample."""
    return float(np.exp(log_w_ratio(sample, law1, law2)))


def exact_log_w_mixing(law, class_sizes):
    """Exact ``log W`` for the Poisson x multinomial law over the capacity box."""
    cap = upper_cells(class_capacities(class_sizes))
    if len(cap) != len(law):
        raise ConfigError("alpha length differs from the number of mixing cells")
    return float(poisson.logcdf(cap, law.lam * law.alpha).sum())


def box_classes(class_sizes):
    """All achievable mixing matrices (as upper cells) for small populations."""
    cap = upper_cells(class_capacities(class_sizes))
    grid = itertools.product(*[range(int(c) + 1) for c in cap])
    return ClassSample(MIXING, int(np.sum(class_sizes)),
                       np.array(list(grid), dtype=np.int64))


def enumerate_degree_classes(n):
    """All achievable degree distributions on ``n`` nodes by brute force."""
    if n > 7:
        raise ValueError("brute-force enumeration is limited to n <= 7")
    iu, ju = np.triu_indices(n, 1)
    m = len(iu)
    seen = set()
    for code in range(1 << m):
        deg = np.zeros(n, dtype=np.int64)
        bits = (code >> np.arange(m)) & 1
        np.add.at(deg, iu, bits)
        np.add.at(deg, ju, bits)
        seen.add(tuple(np.bincount(deg, minlength=n)))
    return ClassSample(DEGREE, n, np.array(sorted(seen), dtype=np.int64), 1 << m)


def nb_degree_law(mu, n, size=1000.0):
    from .harness import build_nb_theta

    return MultinomialDegree(build_nb_theta(size, mu, n))


def mixing_law(lam, alpha=None, q=2):
    k = q * (q + 1) // 2
    alpha = np.full(k, 1.0 / k) if alpha is None else np.asarray(alpha, dtype=float)
    return PoissonMultinomialMixing(lam, alpha)


DEFAULT_DELTAS = (0.1, -0.1, 0.2, -0.2)
REPORT_COLUMNS = ["change", "w_theta1", "w_theta2", "ratio", "deviation", "method"]


def perturbation_table(kind, base, deltas=DEFAULT_DELTAS, sample=None, n=None, class_sizes=None,
                       alpha=None, size=1000.0):
    """Deviation ``|W(theta2) - W(theta1)| / W(theta1)`` under scaled means.

    Parameters
    ----------
    kind : {"degree", "mixing"}
        ``degree``: theta is NB(size, mu) over degrees ``0..n-1``, ``base``
        is ``mu``.  ``mixing``: Poisson(lam) x multinomial(alpha), ``base``
        is ``lam``.
    base : float
        Mean of theta1; theta2 uses ``base * (1 + delta)``.
    sample : ClassSample, optional
        Harvested classes.  Without it the mixing study uses the exact box
        sum (``method`` column ``exact``).
    n, class_sizes : int, sequence
        Network size (degree) or class sizes (mixing).

    Returns
    -------
    StudyReport
        ``W`` columns hold the sums over the class set (not scaled by
        ``|U|``); only their ratios are meaningful for sample-based rows.
    """
    rep = StudyReport(list(REPORT_COLUMNS))
    if kind == "degree":
        if sample is None:
            raise ConfigError("the degree study needs a harvested class sample")
        n = sample.n if n is None else n

        def make(mu):
            return nb_degree_law(mu, n, size)
    elif kind == "mixing":
        q = len(class_sizes) if class_sizes is not None else 2

        def make(lam):
            return mixing_law(lam, alpha, q)
    else:
        raise ConfigError(f"unknown study kind {kind!r}")
    law1 = make(base)
    for d in deltas:
        law2 = make(base * (1.0 + d))
        if sample is not None:
            l1, l2 = log_w_sum(sample, law1), log_w_sum(sample, law2)
            method = "sample"
        else:
            if class_sizes is None:
                raise ConfigError("the exact mixing study needs class sizes")
            l1, l2 = exact_log_w_mixing(law1, class_sizes), exact_log_w_mixing(law2, class_sizes)
            method = "exact"
        ratio = float(np.exp(l2 - l1))
        rep.rows.append([d, float(np.exp(l1)), float(np.exp(l2)), ratio, abs(ratio - 1.0), method])
    return rep
