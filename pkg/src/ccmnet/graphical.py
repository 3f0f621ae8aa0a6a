"""Graphicality of classification mixing matrices and explicit realizations.

A symmetric non-negative integer matrix ``MM`` over ``q`` categories of
sizes ``n_1..n_q`` is the mixing matrix of some simple graph exactly when
every cell fits in its dyad budget::

    MM_kl <= n_k * n_l          (k != l)
    MM_kk <= n_k (n_k - 1) / 2

Two constructions are provided.  ``method="removal"`` starts from the
complete graph and deletes edges from over-full cells one at a time, which
is the constructive argument for sufficiency.  ``method="direct"`` places
``MM_kl`` edges among the ``N_kl`` slots of each cell in one pass.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError
from .graph import Network, NodeClassification, as_generator, class_capacities


@dataclass(frozen=True)
class MmTarget:
    class_sizes: np.ndarray
    matrix: np.ndarray

    def __post_init__(self):
        sizes = np.asarray(self.class_sizes, dtype=np.int64)
        mat = np.asarray(self.matrix)
        if sizes.ndim != 1 or (sizes < 0).any():
            raise DataError("class sizes must be a non-negative vector")
        if mat.shape != (len(sizes), len(sizes)):
            raise DataError(f"matrix shape {mat.shape} does not match {len(sizes)} classes")
        if not np.all(np.equal(np.mod(mat, 1), 0)):
            raise DataError("mixing matrix entries must be integers")
        mat = mat.astype(np.int64)
        if not np.array_equal(mat, mat.T):
            raise DataError("mixing matrix must be symmetric")
        if (mat < 0).any():
            raise DataError("mixing matrix entries must be non-negative")
        object.__setattr__(self, "class_sizes", sizes)
        object.__setattr__(self, "matrix", mat)

    @property
    def q(self):
        return len(self.class_sizes)

    @property
    def n(self):
        return int(self.class_sizes.sum())

    def capacities(self):
        return class_capacities(self.class_sizes)


def is_graphical(t):
    """True iff every cell of the target is within its dyad budget."""
    return bool((t.matrix <= t.capacities()).all())


def _cell_slots(labels, a, b):
    """Dyads ``(i, j)``, ``i < j``, whose endpoint categories are ``{a, b}``,
    in lexicographic order."""
    n = len(labels)
    iu, ju = np.triu_indices(n, 1)
    la, lb = labels[iu], labels[ju]
    hit = ((la == a) & (lb == b)) | ((la == b) & (lb == a))
    return np.column_stack((iu[hit], ju[hit]))


def _check(t):
    if not is_graphical(t):
        over = np.argwhere(t.matrix > t.capacities())
        k, l = over[0]
        raise DataError(f"target is not graphical: cell ({k}, {l}) exceeds its capacity")


def realize(t, method="direct", seed=None):
    """Build a network whose mixing matrix equals ``t.matrix``.

    Parameters
    ----------
    t : MmTarget
    method : {"direct", "removal", "random"}
        ``direct`` takes the lexicographically first slots of each cell,
        ``removal`` runs the complete-graph deletion procedure (removing the
        lexicographically smallest edge of the first over-full cell each
        step), ``random`` picks slots uniformly using ``seed``.

    Returns
    -------
    (Network, NodeClassification)
        Nodes are labelled contiguously by class.
    """
    _check(t)
    c = NodeClassification.from_sizes(t.class_sizes)
    if method == "removal":
        g, _ = _realize_by_removal(t, c)
        return g, c
    if method not in ("direct", "random"):
        raise ValueError(f"unknown method {method!r}")
    rng = as_generator(seed) if method == "random" else None
    edges = []
    for a in range(t.q):
        for b in range(a, t.q):
            k = int(t.matrix[a, b])
            if k == 0:
                continue
            slots = _cell_slots(c.labels, a, b)
            if rng is None:
                chosen = slots[:k]
            else:
                chosen = slots[np.sort(rng.choice(len(slots), size=k, replace=False))]
            edges.append(chosen)
    e = np.concatenate(edges) if edges else np.zeros((0, 2), dtype=np.int64)
    return Network(t.n, e), c


def _realize_by_removal(t, c):
    g = Network(t.n, np.column_stack(np.triu_indices(t.n, 1)))
    cap = t.capacities()
    excess = cap - t.matrix
    slots = {}
    cursor = {}
    removed = 0
    while True:
        over = np.argwhere(np.triu(excess) > 0)
        if not len(over):
            break
        a, b = (int(v) for v in over[0])
        if (a, b) not in slots:
            slots[a, b] = _cell_slots(c.labels, a, b)
            cursor[a, b] = 0
        i, j = slots[a, b][cursor[a, b]]
        cursor[a, b] += 1
        g.toggle(int(i), int(j))
        excess[a, b] -= 1
        if a != b:
            excess[b, a] -= 1
        removed += 1
    return g, removed


def removal_count(t):
    """Number of deletions the removal procedure performs on ``t``."""
    _check(t)
    return int((np.triu(t.capacities()) - np.triu(t.matrix)).sum())


def random_target(class_sizes, rng, graphical=True):
    """Random target for property tests; ``graphical=False`` pushes one cell
    one or more above its capacity."""
    rng = as_generator(rng)
    sizes = np.asarray(class_sizes, dtype=np.int64)
    cap = class_capacities(sizes)
    q = len(sizes)
    mat = np.zeros((q, q), dtype=np.int64)
    for a in range(q):
        for b in range(a, q):
            mat[a, b] = mat[b, a] = rng.integers(0, cap[a, b] + 1)
    if not graphical:
        a = int(rng.integers(q))
        b = int(rng.integers(q))
        mat[a, b] = cap[a, b] + 1 + int(rng.integers(3))
        mat[b, a] = mat[a, b]
    return MmTarget(sizes, mat)
