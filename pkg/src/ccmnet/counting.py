"""Asymptotic counts of labeled simple graphs with a given degree sequence.

Both estimators take the degree sequence through a few power sums so the
MH kernel can update them in O(1) per toggle:

* ``m``   number of edges,
* ``s2``  sum of d(d-1),
* ``s3``  sum of d(d-1)(d-2),
* ``slg`` sum of log(d!).

``METHOD_BC`` is the configuration-model count with the exp(-lam - lam^2)
correction, lam = s2 / (4 m).  ``METHOD_MW`` adds the higher-order sparse
terms of McKay and Wormald (1991).  Both are applied to the complementary
degree sequence when the graph is more than half full, since a sequence and
its complement are realized by the same number of graphs.
"""
import math

import numpy as np

from ._jit import njit

METHOD_BC = 0
METHOD_MW = 1
METHODS = {"bc": METHOD_BC, "mw": METHOD_MW}

LOG2 = math.log(2.0)


@njit
def log_count_sparse(m, s2, s3, slg, method):
    if m <= 0:
        return 0.0
    big_m = 2.0 * m
    base = math.lgamma(big_m + 1.0) - math.lgamma(m + 1.0) - m * LOG2 - slg
    m2 = float(s2)
    if method == METHOD_MW:
        m3 = float(s3)
        corr = (-m2 / (2.0 * big_m) - m2 * m2 / (4.0 * big_m * big_m)
                - m2 * m2 * m3 / (2.0 * big_m ** 4) + m2 ** 4 / (4.0 * big_m ** 5)
                + m3 * m3 / (6.0 * big_m ** 3))
    else:
        lam = m2 / (2.0 * big_m)
        corr = -lam - lam * lam
    return base + corr


@njit
def log_count(m, s2, s3, slg, cs2, cs3, cslg, n_dyads, method):
    """Log estimated number of graphs; the ``c*`` sums belong to the
    complementary sequence ``n-1-d``."""
    if 2 * m < n_dyads:
        return log_count_sparse(m, s2, s3, slg, method)
    if 2 * m > n_dyads:
        return log_count_sparse(n_dyads - m, cs2, cs3, cslg, method)
    # exactly half full: average so the estimate stays complement-symmetric
    return 0.5 * (log_count_sparse(m, s2, s3, slg, method)
                  + log_count_sparse(m, cs2, cs3, cslg, method))


def degree_sums(degrees, n):
    """Return ``(m, s2, s3, slg, cs2, cs3, cslg)`` for a degree sequence."""
    d = np.asarray(degrees, dtype=np.int64)
    c = (n - 1) - d
    from scipy.special import gammaln

    total = int(d.sum())
    if total % 2:
        raise ValueError("degree sum must be even")
    return (
        total // 2,
        int((d * (d - 1)).sum()),
        int((d * (d - 1) * (d - 2)).sum()),
        float(gammaln(d + 1).sum()),
        int((c * (c - 1)).sum()),
        int((c * (c - 1) * (c - 2)).sum()),
        float(gammaln(c + 1).sum()),
    )


def log_graph_count(degrees, method="bc"):
    """Estimated log number of labeled simple graphs with this degree sequence."""
    d = np.asarray(degrees, dtype=np.int64)
    n = len(d)
    m, s2, s3, slg, cs2, cs3, cslg = degree_sums(d, n)
    return log_count(m, s2, s3, slg, cs2, cs3, cslg, n * (n - 1) // 2, METHODS[method])
