"""Viral genetic linkage networks from aligned sequences.

Pairs of individuals are linked when their TN93 distance is at or below a
threshold (0.015 by default).  Individuals listed in the attribute file
without a sequence become isolated nodes whose dyads are all unknown, which
is exactly the observation mask the Gibbs sampler consumes.
"""
from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass

import numpy as np

from .errors import DataError
from .graph import Network, NodeClassification, ObservationMask

log = logging.getLogger(__name__)

BASES = "ACGT"
A, C, G, T = range(4)

# IUPAC codes resolved to the bases they stand for; used by the
# "resolve" ambiguity policy.  Gaps and anything unknown carry no weight.
IUPAC = {
    "A": "A", "C": "C", "G": "G", "T": "T", "U": "T",
    "R": "AG", "Y": "CT", "S": "CG", "W": "AT", "K": "GT", "M": "AC",
    "B": "CGT", "D": "AGT", "H": "ACT", "V": "ACG", "N": "ACGT",
}
POLICIES = ("skip", "resolve")


def read_fasta(path):
    """Ordered list of ``(id, sequence)``; sequence lines are concatenated."""
    records = []
    name, chunks = None, []
    with open(path) as fh:
        for raw in fh:
            line = raw.strip()
            if not line:
                continue
            if line.startswith(">"):
                if name is not None:
                    records.append((name, "".join(chunks)))
                head = line[1:].split()
                if not head:
                    raise DataError(f"{path}: empty record id")
                name, chunks = head[0], []
            else:
                if name is None:
                    raise DataError(f"{path}: sequence data before the first '>' line")
                chunks.append(line)
    if name is not None:
        records.append((name, "".join(chunks)))
    return records


def check_alignment(records):
    ids = [r[0] for r in records]
    dup = sorted({i for i in ids if ids.count(i) > 1})
    if dup:
        raise DataError(f"duplicate sequence ids: {', '.join(dup[:5])}")
    lengths = {len(s) for _, s in records}
    if len(lengths) > 1:
        raise DataError(f"sequences are not aligned (lengths {sorted(lengths)})")


def encode(seq, policy="skip"):
    """Per-site base weights, shape ``(L, 4)``.

    ``skip`` keeps only unambiguous A/C/G/T sites (others are all zero so
    they drop out of every pair).  ``resolve`` spreads an ambiguity code
    evenly over the bases it stands for.
    """
    if policy not in POLICIES:
        raise ValueError(f"unknown ambiguity policy {policy!r}")
    s = seq.upper()
    w = np.zeros((len(s), 4))
    for k, ch in enumerate(s):
        opts = IUPAC.get(ch)
        if opts is None:
            continue
        if len(opts) == 1:
            w[k, BASES.index(opts)] = 1.0
        elif policy == "resolve":
            for b in opts:
                w[k, BASES.index(b)] = 1.0 / len(opts)
    return w


def tn93_from_counts(counts):
    """TN93 distance from a 4x4 matrix of paired-site counts (A, C, G, T).

    Returns NaN when a logarithm argument is not positive.
    """
    cm = np.asarray(counts, dtype=float)
    total = cm.sum()
    if total <= 0:
        raise DataError("no comparable sites")
    f = (cm.sum(axis=0) + cm.sum(axis=1)) / (2.0 * total)
    pa, pc, pg, pt = f
    pr, py = pa + pg, pc + pt
    p1 = (cm[A, G] + cm[G, A]) / total
    p2 = (cm[C, T] + cm[T, C]) / total
    q = (cm[A, C] + cm[C, A] + cm[A, T] + cm[T, A] + cm[G, C] + cm[C, G] + cm[G, T] + cm[T, G]) / total
    if p1 == 0 and p2 == 0 and q == 0:
        return 0.0

    def term(weight, arg):
        if weight == 0:
            return 0.0
        if arg <= 0:
            return math.nan
        return -weight * math.log(arg)

    ag, ct = pa * pg, pc * pt
    d = 0.0
    if ag > 0:
        d += term(2 * ag / pr, 1 - pr * p1 / (2 * ag) - q / (2 * pr))
    elif p1 > 0:
        return math.nan
    if ct > 0:
        d += term(2 * ct / py, 1 - py * p2 / (2 * ct) - q / (2 * py))
    elif p2 > 0:
        return math.nan
    if pr > 0 and py > 0:
        w3 = 2 * (pr * py - ag * py / pr - ct * pr / py)
        d += term(w3, 1 - q / (2 * pr * py))
    elif q > 0:
        return math.nan
    return d


def tn93_distance(a, b, policy="skip"):
    """TN93 distance between two aligned sequences."""
    if len(a) != len(b):
        raise DataError(f"sequence lengths differ ({len(a)} vs {len(b)})")
    wa, wb = encode(a, policy), encode(b, policy)
    return tn93_from_counts(wa.T @ wb)


def pairwise_tn93(seqs, policy="skip"):
    """Symmetric distance matrix; NaN marks inestimable pairs."""
    w = np.stack([encode(s, policy) for s in seqs]) if seqs else np.zeros((0, 0, 4))
    k = len(seqs)
    d = np.zeros((k, k))
    for i in range(k):
        cnt = np.einsum("la,jlb->jab", w[i], w[i + 1:])
        for off, cm in enumerate(cnt):
            j = i + 1 + off
            if cm.sum() <= 0:
                d[i, j] = d[j, i] = math.nan
            else:
                d[i, j] = d[j, i] = tn93_from_counts(cm)
    return d


def read_attributes(path):
    """Rows of the ``id,label,sequenced`` attribute file as a dict by id."""
    out = {}
    with open(path, newline="") as fh:
        rd = csv.DictReader(fh)
        need = {"id", "label", "sequenced"}
        if rd.fieldnames is None or not need.issubset(rd.fieldnames):
            raise DataError(f"{path}: header must contain id,label,sequenced")
        for row in rd:
            i = row["id"].strip()
            if i in out:
                raise DataError(f"{path}: duplicate id {i!r}")
            flag = row["sequenced"].strip().lower()
            if flag not in ("0", "1", "true", "false", "yes", "no"):
                raise DataError(f"{path}: bad sequenced flag {row['sequenced']!r} for {i!r}")
            out[i] = (row["label"].strip(), flag in ("1", "true", "yes"))
    return out


@dataclass
class VglNetwork:
    network: Network
    classification: NodeClassification
    names: list
    label_names: list
    mask: ObservationMask
    n_inestimable: int
    unmatched: list
    distances: np.ndarray


def build_vgl_network(records, threshold=0.015, attrs=None, policy="skip", unknown_label="NA"):
    """Link sequence pairs with TN93 distance <= ``threshold``.

    Parameters
    ----------
    records : list of (id, sequence)
    threshold : float
    attrs : dict, optional
        ``id -> (label, sequenced)``.  Individuals here without a sequence
        are appended as isolated, unsampled nodes.
    policy : {"skip", "resolve"}

    Returns
    -------
    VglNetwork
        Nodes are the sequences in input order followed by unsequenced
        individuals in sorted id order.
    """
    if not threshold >= 0:
        raise DataError("threshold must be non-negative")
    check_alignment(records)
    ids = [r[0] for r in records]
    seqs = [r[1] for r in records]
    attrs = attrs or {}
    unmatched = [i for i in ids if i not in attrs]
    declared = [i for i, (_, sq) in attrs.items() if sq and i not in set(ids)]
    if unmatched:
        log.warning("%d sequence ids have no attribute row", len(unmatched))
    if declared:
        log.warning("%d individuals are marked sequenced but have no sequence", len(declared))
    extra = sorted(i for i in attrs if i not in set(ids))
    names = ids + extra
    d = pairwise_tn93(seqs, policy)
    bad = np.isnan(d[np.triu_indices(len(ids), 1)])
    n_bad = int(bad.sum())
    if n_bad:
        log.warning("%d pairs have an inestimable TN93 distance; treated as unlinked", n_bad)
    with np.errstate(invalid="ignore"):
        link = np.triu(d <= threshold, 1)
    edges = np.argwhere(link)
    g = Network(len(names), edges)
    labels = [attrs[i][0] if i in attrs else unknown_label for i in names]
    label_names = sorted(set(labels))
    c = NodeClassification(np.array([label_names.index(x) for x in labels], dtype=np.int64),
                           max(len(label_names), 1))
    mask = ObservationMask.from_sampled_nodes(len(names), range(len(ids)))
    return VglNetwork(g, c, names, label_names, mask, n_bad, unmatched + declared, d)
