"""Convergence and accuracy metrics for posterior chains.

Geweke z-scores use a Bartlett-window spectral estimate of the variance of
each window mean; ESS uses Geyer's initial positive sequence.  Chains whose
variance falls below ``min_variance`` get :data:`NOT_COMPUTABLE` instead of
a z-score, which is how parameters stuck at (numerically) one value are
counted separately from converged ones.
"""
from __future__ import annotations

import csv
import os

import numpy as np

MIN_VARIANCE = 1e-12
MIN_LENGTH = 20


class _NotComputable:
    """Marker returned when a diagnostic is undefined for a chain."""

    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "NOT_COMPUTABLE"

    def __bool__(self):
        return False


NOT_COMPUTABLE = _NotComputable()


def _as_chain(c):
    c = np.asarray(c, dtype=float).ravel()
    if len(c) < MIN_LENGTH:
        raise ValueError(f"chain has {len(c)} values, need at least {MIN_LENGTH}")
    if not np.isfinite(c).all():
        raise ValueError("chain contains non-finite values")
    return c


def _autocov(x, max_lag):
    x = x - x.mean()
    n = len(x)
    return np.array([x[: n - k] @ x[k:] / n for k in range(max_lag + 1)])


def spectral_variance(x):
    """Bartlett-window estimate of the spectral density at frequency zero,
    bandwidth ``floor(sqrt(len(x)))``."""
    x = np.asarray(x, dtype=float)
    bw = int(np.sqrt(len(x)))
    g = _autocov(x, min(bw, len(x) - 1))
    w = 1.0 - np.arange(1, len(g)) / (bw + 1.0)
    return g[0] + 2.0 * (w * g[1:]).sum()


def geweke_z(chain, first_frac=0.1, last_frac=0.5, min_variance=MIN_VARIANCE):
    """Geweke z-score comparing the means of the first and last windows.

    Returns :data:`NOT_COMPUTABLE` when either window has sample variance
    below ``min_variance``.
    """
    c = _as_chain(chain)
    if not (0 < first_frac < 1 and 0 < last_frac < 1 and first_frac + last_frac <= 1):
        raise ValueError("window fractions must be in (0, 1) and sum to at most 1")
    n = len(c)
    a = c[: max(int(first_frac * n), 2)]
    b = c[n - max(int(last_frac * n), 2):]
    if a.var() < min_variance or b.var() < min_variance:
        return NOT_COMPUTABLE
    sa = max(spectral_variance(a), 0.0)
    sb = max(spectral_variance(b), 0.0)
    se = np.sqrt(sa / len(a) + sb / len(b))
    if not se > 0:
        return NOT_COMPUTABLE
    return float((a.mean() - b.mean()) / se)


def autocorrelation(x):
    """Sample autocorrelation at all lags (FFT, biased normalization)."""
    x = np.asarray(x, dtype=float)
    n = len(x)
    x = x - x.mean()
    size = 1 << (2 * n - 1).bit_length()
    f = np.fft.rfft(x, size)
    acov = np.fft.irfft(f * np.conjugate(f), size)[:n] / n
    return acov / acov[0]


def ess(chain):
    """Effective sample size with Geyer's initial positive sequence.

    ``tau = -1 + 2 * sum(Gamma_m)`` with ``Gamma_m = rho_2m + rho_2m+1``,
    summed while the pair sums stay positive (``Gamma_0`` always counts).
    Negative autocorrelation gives ESS above ``n``; ``tau`` is floored at
    ``1 / log10(n)`` so a perfectly alternating chain stays finite.
    """
    c = _as_chain(chain)
    if c.var() < MIN_VARIANCE:
        raise ValueError("ESS is undefined for a constant chain")
    n = len(c)
    rho = autocorrelation(c)
    m_max = (n - 1) // 2
    pairs = rho[0: 2 * m_max: 2] + rho[1: 2 * m_max + 1: 2]
    total = pairs[0]
    for g in pairs[1:]:
        if g <= 0:
            break
        total += g
    tau = max(-1.0 + 2.0 * total, 1.0 / np.log10(n))
    return float(n / tau)


def hellinger(p, q):
    """Hellinger distance between two count or probability vectors.

    Inputs are normalized to sum to one.  H = sqrt(sum (sqrt p - sqrt q)^2 / 2).
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape or p.ndim != 1:
        raise ValueError("hellinger needs two vectors of the same length")
    if (p < 0).any() or (q < 0).any():
        raise ValueError("hellinger inputs must be non-negative")
    sp, sq = p.sum(), q.sum()
    if sp <= 0 or sq <= 0:
        raise ValueError("hellinger inputs must have positive total")
    d = np.sqrt(p / sp) - np.sqrt(q / sq)
    return float(min(1.0, np.sqrt(0.5 * (d @ d))))


def chain_diagnostics(chain, first_frac=0.1, last_frac=0.5, min_variance=MIN_VARIANCE):
    """``(computable, z, ess)`` for one chain; z and ess are NaN when not computable.

    Chains shorter than ``MIN_LENGTH`` count as not computable here rather
    than raising, so short pilot runs still produce a report.
    """
    if len(np.ravel(chain)) < MIN_LENGTH:
        return False, float("nan"), float("nan")
    z = geweke_z(chain, first_frac, last_frac, min_variance)
    if z is NOT_COMPUTABLE:
        return False, float("nan"), float("nan")
    return True, z, ess(chain)


def variability_share(chains, min_variance=MIN_VARIANCE):
    """Fraction of chains whose variance is below ``min_variance``."""
    flags = [np.var(np.asarray(c, dtype=float)) < min_variance for c in chains]
    return float(np.mean(flags)) if flags else float("nan")


DIAG_COLUMNS = ["param_id", "n_iter", "computable", "geweke_z", "ess"]


def write_diagnostics_csv(rows, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(DIAG_COLUMNS)
        for r in rows:
            w.writerow([r[0], int(r[1]), int(bool(r[2])), _fmt(r[3]), _fmt(r[4])])


def _fmt(v):
    return "" if v is None or np.isnan(v) else format(float(v), ".10g")


# -- plots --------------------------------------------------------------------

def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams["svg.hashsalt"] = "ccmnet"
    plt.rcParams["svg.fonttype"] = "none"
    return plt


def _save_svg(fig, path):
    fig.savefig(path, format="svg", metadata={"Date": None, "Creator": None})


def smooth(y, window=None):
    """Centered moving average, edges averaged over the available points."""
    y = np.asarray(y, dtype=float)
    if window is None:
        window = max(3, len(y) // 20)
    k = np.ones(window)
    num = np.convolve(y, k, mode="same")
    den = np.convolve(np.ones_like(y), k, mode="same")
    return num / den


def trace_svg(chain, path, title="", truth=None, start=1):
    plt = _pyplot()
    y = np.asarray(chain, dtype=float)
    x = np.arange(start, start + len(y))
    fig, ax = plt.subplots(figsize=(6, 3.5))
    ax.plot(x, y, ".", ms=2, color="0.35")
    ax.plot(x, smooth(y), color="tab:blue", lw=1.5)
    if truth is not None:
        ax.axhline(truth, color="tab:red", lw=1.2)
    ax.set_xlabel("iteration")
    ax.set_title(title)
    fig.tight_layout()
    _save_svg(fig, path)
    plt.close(fig)


def boxplot_svg(groups, labels, path, title="", ylabel="", overlay=None):
    """Side-by-side boxplots; ``overlay`` is an optional list of
    ``(values, label)`` series drawn as a second box per position."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(max(5, 0.45 * len(labels) + 2), 3.8))
    pos = np.arange(len(labels), dtype=float)
    if overlay is None:
        ax.boxplot([np.asarray(g, dtype=float) for g in groups], positions=pos, widths=0.6)
    else:
        ax.boxplot([np.asarray(g, dtype=float) for g in groups], positions=pos - 0.2, widths=0.35,
                   patch_artist=True, boxprops={"facecolor": "tab:blue", "alpha": 0.5})
        vals, _ = overlay
        ax.boxplot([np.asarray(g, dtype=float) for g in vals], positions=pos + 0.2, widths=0.35,
                   patch_artist=True, boxprops={"facecolor": "tab:orange", "alpha": 0.5})
    ax.set_xticks(pos)
    ax.set_xticklabels([str(v) for v in labels])
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    fig.tight_layout()
    _save_svg(fig, path)
    plt.close(fig)


def trace_report(chains, out_dir, params=None, truth=None, plot=True,
                 first_frac=0.1, last_frac=0.5, min_variance=MIN_VARIANCE):
    """Write ``diagnostics.csv`` and one trace SVG per selected parameter.

    Parameters
    ----------
    chains : dict
        ``param_id -> sequence`` (post burn-in draws).
    out_dir : str
    params : list of str, optional
        Parameters to include (default: all, in insertion order).
    truth : dict, optional
        ``param_id -> value`` drawn as a horizontal line.

    Returns
    -------
    list of tuple
        The CSV rows ``(param_id, n_iter, computable, z, ess)``.
    """
    os.makedirs(out_dir, exist_ok=True)
    keys = list(chains) if params is None else list(params)
    rows = []
    for k in keys:
        c = np.asarray(chains[k], dtype=float)
        ok, z, e = chain_diagnostics(c, first_frac, last_frac, min_variance)
        rows.append((k, len(c), ok, z, e))
        if plot:
            t = None if truth is None else truth.get(k)
            trace_svg(c, os.path.join(out_dir, f"trace_{k}.svg"), title=str(k), truth=t)
    write_diagnostics_csv(rows, os.path.join(out_dir, "diagnostics.csv"))
    return rows
