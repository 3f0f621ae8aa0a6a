"""Metropolis-Hastings toggle kernels.

Written in the numba-compatible subset of Python so the same source runs
compiled or interpreted (see :mod:`ccmnet._jit`).  Randomness comes in as a
pre-drawn ``(steps, 3)`` array of uniforms, which keeps the two paths
bit-identical and the chains reproducible from a numpy ``Generator``.

State layout shared by all kernels:

``adj``      uint8[n, n] adjacency
``fpos``     int64[n, n] slot of a free edge in ``fe`` or -1
``fe``       int64[D, 2] free edges (edges on toggleable dyads), first ``cnt[0]`` used
``cnt``      int64[2] = (free edge count, total edge count)
``td``       int64[D, 2] toggleable dyads
``deg``      int64[n] degrees
``dcount``   int64[n] degree distribution
``labels``   int64[n] node categories, ``mm`` int64[q, q] mixing matrix,
``cap``      int64[q, q] dyads per mixing cell
"""
import math

import numpy as np

from ._jit import njit
from .counting import log_count

KIND_DEGREE = 0
KIND_MIXING = 1

REC_NONE = 0
REC_DEGREE = 1
REC_MIXING = 2
REC_CODE = 3

NEG_INF = -np.inf


@njit
def _f2(d):
    return d * (d - 1)


@njit
def _f3(d):
    return d * (d - 1) * (d - 2)


@njit
def _shift(dcount, d_from, d_to):
    """Move one node between degree bins; return the change in sum log(D_k!)."""
    before = math.lgamma(dcount[d_from] + 1.0) + math.lgamma(dcount[d_to] + 1.0)
    dcount[d_from] -= 1
    dcount[d_to] += 1
    return math.lgamma(dcount[d_from] + 1.0) + math.lgamma(dcount[d_to] + 1.0) - before


@njit
def degree_power_sums(deg, n):
    s2 = 0
    s3 = 0
    cs2 = 0
    cs3 = 0
    slg = 0.0
    cslg = 0.0
    for v in range(deg.shape[0]):
        d = deg[v]
        c = n - 1 - d
        s2 += _f2(d)
        s3 += _f3(d)
        cs2 += _f2(c)
        cs3 += _f3(c)
        slg += math.lgamma(d + 1.0)
        cslg += math.lgamma(c + 1.0)
    return s2, s3, cs2, cs3, slg, cslg


@njit
def _record(kind, out, row, adj, dcount, mm):
    n = adj.shape[0]
    if kind == REC_DEGREE:
        for k in range(n):
            out[row, k] = dcount[k]
    elif kind == REC_MIXING:
        q = mm.shape[0]
        c = 0
        for a in range(q):
            for b in range(a, q):
                out[row, c] = mm[a, b]
                c += 1
    elif kind == REC_CODE:
        code = 0
        bit = 0
        for i in range(n):
            for j in range(i + 1, n):
                if adj[i, j]:
                    code |= 1 << bit
                bit += 1
        out[row, 0] = code


@njit
def mh_chain(adj, fpos, fe, cnt, td, deg, dcount, labels, mm, cap,
             kind, uniform, log_theta, log_lam, log_alpha, method,
             p_edge, hastings, u, thin, out, rec_kind):
    """Run ``u.shape[0]`` toggle proposals in place; return accepted count.

    Every ``thin`` proposals the current statistic is written to the next
    row of ``out`` (when ``rec_kind`` is not ``REC_NONE``).
    """
    n = adj.shape[0]
    n_dy = n * (n - 1) // 2
    n_td = td.shape[0]
    steps = u.shape[0]
    s2, s3, cs2, cs3, slg, cslg = degree_power_sums(deg, n)
    m = cnt[1]
    lg_cur = 0.0
    if kind == KIND_DEGREE:
        lg_cur = log_count(m, s2, s3, slg, cs2, cs3, cslg, n_dy, method)
    accepted = 0
    row = 0
    for t in range(steps):
        fm = cnt[0]
        if fm > 0 and u[t, 0] < p_edge:
            k = int(u[t, 1] * fm)
            i = fe[k, 0]
            j = fe[k, 1]
        else:
            k = int(u[t, 1] * n_td)
            i = td[k, 0]
            j = td[k, 1]
        add = adj[i, j] == 0
        st = 1 if add else -1

        # target log-ratio
        logr = 0.0
        lg_new = 0.0
        ns2 = s2
        ns3 = s3
        ncs2 = cs2
        ncs3 = cs3
        nslg = slg
        ncslg = cslg
        a = labels[i]
        b = labels[j]
        if kind == KIND_DEGREE:
            di = deg[i]
            dj = deg[j]
            ni = di + st
            nj = dj + st
            ci = n - 1 - di
            cj = n - 1 - dj
            nci = ci - st
            ncj = cj - st
            ns2 = s2 + _f2(ni) - _f2(di) + _f2(nj) - _f2(dj)
            ns3 = s3 + _f3(ni) - _f3(di) + _f3(nj) - _f3(dj)
            ncs2 = cs2 + _f2(nci) - _f2(ci) + _f2(ncj) - _f2(cj)
            ncs3 = cs3 + _f3(nci) - _f3(ci) + _f3(ncj) - _f3(cj)
            nslg = slg + (math.lgamma(ni + 1.0) - math.lgamma(di + 1.0)
                          + math.lgamma(nj + 1.0) - math.lgamma(dj + 1.0))
            ncslg = cslg + (math.lgamma(nci + 1.0) - math.lgamma(ci + 1.0)
                            + math.lgamma(ncj + 1.0) - math.lgamma(cj + 1.0))
            lg_new = log_count(m + st, ns2, ns3, nslg, ncs2, ncs3, ncslg, n_dy, method)
            if uniform:
                # -log|c| = -log n! + sum log D_k! - log G; log n! cancels
                dl = _shift(dcount, di, ni) + _shift(dcount, dj, nj)
                _shift(dcount, nj, dj)
                _shift(dcount, ni, di)
                logr = dl - (lg_new - lg_cur)
            else:
                # multinomial coefficient cancels against the permutation
                # factor of |c|, leaving sum_i log theta[d_i] - log G
                logr = (log_theta[ni] - log_theta[di] + log_theta[nj] - log_theta[dj]
                        - (lg_new - lg_cur))
        else:
            cur = mm[a, b]
            full = cap[a, b]
            if add:
                if uniform:
                    logr = math.log(cur + 1.0) - math.log(full - cur)
                else:
                    logr = log_lam + log_alpha[a, b] - math.log(full - cur)
            else:
                if uniform:
                    logr = math.log(full - cur + 1.0) - math.log(cur)
                else:
                    logr = math.log(full - cur + 1.0) - log_lam - log_alpha[a, b]

        if hastings:
            if add:
                fwd = (1.0 - p_edge) / n_td if fm > 0 else 1.0 / n_td
                rev = p_edge / (fm + 1) + (1.0 - p_edge) / n_td
            else:
                fwd = p_edge / fm + (1.0 - p_edge) / n_td
                rev = 1.0 / n_td if fm == 1 else (1.0 - p_edge) / n_td
            logr += math.log(rev) - math.log(fwd)

        if logr >= 0.0 or math.log(u[t, 2]) < logr:
            accepted += 1
            if add:
                adj[i, j] = 1
                adj[j, i] = 1
                fe[fm, 0] = i
                fe[fm, 1] = j
                fpos[i, j] = fm
                fpos[j, i] = fm
                cnt[0] = fm + 1
            else:
                adj[i, j] = 0
                adj[j, i] = 0
                slot = fpos[i, j]
                li = fe[fm - 1, 0]
                lj = fe[fm - 1, 1]
                fe[slot, 0] = li
                fe[slot, 1] = lj
                fpos[li, lj] = slot
                fpos[lj, li] = slot
                fpos[i, j] = -1
                fpos[j, i] = -1
                cnt[0] = fm - 1
            m += st
            cnt[1] = m
            _shift(dcount, deg[i], deg[i] + st)
            _shift(dcount, deg[j], deg[j] + st)
            deg[i] += st
            deg[j] += st
            mm[a, b] += st
            if a != b:
                mm[b, a] += st
            s2 = ns2
            s3 = ns3
            cs2 = ncs2
            cs3 = ncs3
            slg = nslg
            cslg = ncslg
            lg_cur = lg_new

        if rec_kind != REC_NONE and (t + 1) % thin == 0:
            _record(rec_kind, out, row, adj, dcount, mm)
            row += 1
    return accepted
