"""Labeled undirected simple networks, observation masks and the summary
statistics (degree distribution, classification mixing matrix) that the
congruence class models are defined on.

Nodes are dense integers ``0..n-1``.  Adjacency is held in a dense ``uint8``
matrix next to an edge list with a position index, so both "uniform existing
edge" and "uniform dyad" draws are O(1).
"""
from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .errors import DataError


def n_dyads(n):
    return n * (n - 1) // 2


def as_generator(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


class Network:
    """Undirected simple graph on ``n`` nodes with incrementally kept degrees.

    Registered statistic views (see :meth:`track_degree_distribution` and
    :meth:`track_mixing_matrix`) are updated in O(1) on every toggle.
    """

    def __init__(self, n, edges=()):
        n = int(n)
        if n < 0:
            raise ValueError("node count must be non-negative")
        self.n = n
        self.adj = np.zeros((n, n), dtype=np.uint8)
        self._pos = np.full((n, n), -1, dtype=np.int64)
        self._edges = np.zeros((max(n_dyads(n), 1), 2), dtype=np.int64)
        self._m = 0
        self.degrees = np.zeros(n, dtype=np.int64)
        self._dd_views = []
        self._mm_views = []
        for i, j in edges:
            if not self.has_edge(i, j):
                self.toggle(i, j)

    # -- construction -----------------------------------------------------
    @classmethod
    def from_adjacency(cls, adj):
        adj = np.asarray(adj)
        if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
            raise DataError("adjacency must be square")
        if np.any(np.diag(adj)):
            raise DataError("self-loops are not allowed")
        if not np.array_equal(adj, adj.T):
            raise DataError("adjacency must be symmetric")
        iu, ju = np.nonzero(np.triu(adj, 1))
        return cls(adj.shape[0], zip(iu.tolist(), ju.tolist()))

    def copy(self):
        g = Network(self.n)
        g.adj[:] = self.adj
        g._pos[:] = self._pos
        g._edges[:] = self._edges
        g._m = self._m
        g.degrees[:] = self.degrees
        return g

    # -- queries ----------------------------------------------------------
    @property
    def n_edges(self):
        return self._m

    def has_edge(self, i, j):
        return bool(self.adj[i, j])

    def edges(self):
        """Edge array of shape ``(m, 2)`` with ``i < j``, sorted lexicographically."""
        e = self._edges[: self._m]
        if len(e) == 0:
            return np.zeros((0, 2), dtype=np.int64)
        return e[np.lexsort((e[:, 1], e[:, 0]))].copy()

    def neighbors(self, i):
        return np.flatnonzero(self.adj[i])

    def random_edge(self, rng):
        if self._m == 0:
            raise ValueError("network has no edges")
        i, j = self._edges[rng.integers(self._m)]
        return int(i), int(j)

    def random_dyad(self, rng):
        if self.n < 2:
            raise ValueError("need at least two nodes")
        i, j = rng.choice(self.n, size=2, replace=False)
        return (int(i), int(j)) if i < j else (int(j), int(i))

    def __eq__(self, other):
        return isinstance(other, Network) and self.n == other.n and np.array_equal(self.adj, other.adj)

    def __repr__(self):
        return f"Network(n={self.n}, m={self._m})"

    # -- mutation ---------------------------------------------------------
    def toggle(self, i, j):
        """Flip dyad ``(i, j)``; return True if an edge was added."""
        i, j = int(i), int(j)
        if i == j:
            raise ValueError("self-loops are not allowed")
        if not (0 <= i < self.n and 0 <= j < self.n):
            raise IndexError("node out of range")
        if i > j:
            i, j = j, i
        added = not self.adj[i, j]
        di, dj = self.degrees[i], self.degrees[j]
        if added:
            self.adj[i, j] = self.adj[j, i] = 1
            self._edges[self._m] = (i, j)
            self._pos[i, j] = self._m
            self._m += 1
            self.degrees[i] += 1
            self.degrees[j] += 1
        else:
            self.adj[i, j] = self.adj[j, i] = 0
            k = self._pos[i, j]
            last = self._edges[self._m - 1]
            self._edges[k] = last
            self._pos[last[0], last[1]] = k
            self._pos[i, j] = -1
            self._m -= 1
            self.degrees[i] -= 1
            self.degrees[j] -= 1
        step = 1 if added else -1
        for view in self._dd_views:
            view[di] -= 1
            view[di + step] += 1
            view[dj] -= 1
            view[dj + step] += 1
        for labels, view in self._mm_views:
            a, b = labels[i], labels[j]
            view[a, b] += step
            if a != b:
                view[b, a] += step
        return added

    def track_degree_distribution(self):
        """Return a live degree-distribution array kept current under toggles."""
        view = degree_distribution(self)
        self._dd_views.append(view)
        return view

    def track_mixing_matrix(self, classification):
        view = mixing_matrix(self, classification)
        self._mm_views.append((np.asarray(classification.labels), view))
        return view


def toggle_edge(g, i, j):
    return g.toggle(i, j)


@dataclass(frozen=True)
class NodeClassification:
    """Category label per node, coded ``0..q-1``."""

    labels: np.ndarray
    q: int

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=np.int64)
        object.__setattr__(self, "labels", labels)
        if labels.ndim != 1:
            raise DataError("labels must be one-dimensional")
        if self.q < 1:
            raise DataError("need at least one category")
        if labels.size and (labels.min() < 0 or labels.max() >= self.q):
            raise DataError("label out of range")

    @classmethod
    def from_sizes(cls, sizes):
        sizes = [int(s) for s in sizes]
        return cls(np.repeat(np.arange(len(sizes)), sizes), len(sizes))

    @property
    def n(self):
        return len(self.labels)

    @property
    def class_sizes(self):
        return np.bincount(self.labels, minlength=self.q)


class ObservationMask:
    """Dyad-level known/unknown indicator.

    The default (induced-subgraph) design stores only the sampled node set:
    a dyad is known iff both of its endpoints were sampled.  Arbitrary
    dyad-level designs can be built with :meth:`from_known_matrix`.
    """

    def __init__(self, sampled, known=None):
        self.sampled = np.asarray(sampled, dtype=bool)
        self.n = len(self.sampled)
        self._known = None
        if known is not None:
            known = np.asarray(known, dtype=bool)
            if known.shape != (self.n, self.n) or not np.array_equal(known, known.T):
                raise DataError("known matrix must be square and symmetric")
            self._known = known

    @classmethod
    def from_sampled_nodes(cls, n, nodes):
        sampled = np.zeros(n, dtype=bool)
        nodes = np.asarray(list(nodes), dtype=np.int64)
        if nodes.size and (nodes.min() < 0 or nodes.max() >= n):
            raise DataError("sampled node id out of range")
        sampled[nodes] = True
        return cls(sampled)

    @classmethod
    def from_known_matrix(cls, known):
        known = np.asarray(known, dtype=bool)
        sampled = np.zeros(known.shape[0], dtype=bool)
        return cls(sampled, known)

    @classmethod
    def all_known(cls, n):
        return cls(np.ones(n, dtype=bool))

    @classmethod
    def all_unknown(cls, n):
        return cls(np.zeros(n, dtype=bool))

    def known(self, i, j):
        if self._known is not None:
            return bool(self._known[i, j])
        return bool(self.sampled[i] and self.sampled[j])

    def known_matrix(self):
        if self._known is not None:
            k = self._known.copy()
        else:
            k = np.outer(self.sampled, self.sampled)
        np.fill_diagonal(k, False)
        return k

    def unknown_dyads(self):
        """All unknown dyads ``(i, j)``, ``i < j``, in lexicographic order."""
        iu, ju = np.triu_indices(self.n, 1)
        unk = ~self.known_matrix()[iu, ju]
        return np.column_stack((iu[unk], ju[unk])).astype(np.int64)

    def n_unknown(self):
        if self._known is None:
            k = int(self.sampled.sum())
            return n_dyads(self.n) - n_dyads(k)
        return len(self.unknown_dyads())

    def sampled_nodes(self):
        return np.flatnonzero(self.sampled)


def degree_distribution(g):
    """Counts of nodes by degree, indexed ``0..n-1``."""
    return np.bincount(g.degrees, minlength=max(g.n, 1)).astype(np.int64)


def mixing_matrix(g, c):
    """Symmetric ``q x q`` matrix of edge counts between node categories."""
    if c.n != g.n:
        raise DataError(f"classification has {c.n} nodes, network has {g.n}")
    e = g.edges()
    mm = np.zeros((c.q, c.q), dtype=np.int64)
    if len(e):
        a, b = c.labels[e[:, 0]], c.labels[e[:, 1]]
        np.add.at(mm, (a, b), 1)
        off = a != b
        np.add.at(mm, (b[off], a[off]), 1)
    return mm


def class_capacities(class_sizes):
    """Number of dyads available to each cell of the mixing matrix."""
    s = np.asarray(class_sizes, dtype=np.int64)
    cap = np.outer(s, s)
    np.fill_diagonal(cap, s * (s - 1) // 2)
    return cap


def upper_cells(mat):
    """Flatten the ``k <= l`` cells of a symmetric matrix (row-major order)."""
    mat = np.asarray(mat)
    iu = np.triu_indices(mat.shape[0])
    return mat[iu]


def from_upper_cells(cells, q):
    mat = np.zeros((q, q), dtype=np.asarray(cells).dtype)
    iu = np.triu_indices(q)
    mat[iu] = cells
    mat.T[iu] = cells
    return mat


def observed_network(g, mask):
    """Restrict ``g`` to the dyads that ``mask`` marks as known."""
    obs = Network(g.n)
    e = g.edges()
    if len(e):
        keep = mask.known_matrix()[e[:, 0], e[:, 1]]
        for i, j in e[keep]:
            obs.toggle(i, j)
    return obs


def sample_induced_observation(g, fraction, seed=None):
    """Sample ``round(fraction * n)`` nodes uniformly without replacement and
    return ``(mask, observed)`` where observed is the induced subnetwork."""
    if not 0.0 <= fraction <= 1.0:
        raise ValueError("fraction must lie in [0, 1]")
    rng = as_generator(seed)
    k = int(np.floor(fraction * g.n + 0.5))
    nodes = rng.choice(g.n, size=k, replace=False)
    mask = ObservationMask.from_sampled_nodes(g.n, nodes)
    return mask, observed_network(g, mask)


# -- files ------------------------------------------------------------------

def _read_lines(path):
    with open(path) as fh:
        for raw in fh:
            line = raw.strip()
            if line:
                yield line


def _header_n(path):
    for line in _read_lines(path):
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("n="):
                return int(body[2:])
        else:
            return None
    return None


def read_edge_list(path, n=None):
    """Read whitespace-separated ``i j`` pairs; ``#`` lines are comments.

    A ``# n=<count>`` header fixes the node count; otherwise it is ``n`` or
    one more than the largest id.
    """
    pairs = []
    for lineno, line in enumerate(_read_lines(path), 1):
        if line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise DataError(f"{path}:{lineno}: expected two node ids")
        try:
            i, j = int(parts[0]), int(parts[1])
        except ValueError:
            raise DataError(f"{path}:{lineno}: node ids must be integers") from None
        if i == j:
            raise DataError(f"{path}:{lineno}: self-loop {i}")
        if i < 0 or j < 0:
            raise DataError(f"{path}:{lineno}: negative node id")
        pairs.append((i, j))
    hdr = _header_n(path)
    if n is None:
        n = hdr
    elif hdr is not None and hdr != n:
        raise DataError(f"{path}: header says n={hdr}, expected {n}")
    top = max((max(p) for p in pairs), default=-1) + 1
    if n is None:
        n = top
    if top > n:
        raise DataError(f"{path}: node id {top - 1} out of range for n={n}")
    g = Network(n)
    for i, j in pairs:
        if not g.has_edge(i, j):
            g.toggle(i, j)
    return g


def write_edge_list(g, path):
    with open(path, "w") as fh:
        fh.write(f"# n={g.n}\n")
        for i, j in g.edges():
            fh.write(f"{i} {j}\n")


def read_mask(path, n):
    hdr = _header_n(path)
    if hdr is not None and hdr != n:
        raise DataError(f"{path}: mask is for n={hdr}, network has n={n}")
    nodes = []
    for lineno, line in enumerate(_read_lines(path), 1):
        if line.startswith("#"):
            continue
        try:
            nodes.append(int(line))
        except ValueError:
            raise DataError(f"{path}:{lineno}: bad node id {line!r}") from None
    return ObservationMask.from_sampled_nodes(n, nodes)


def write_mask(mask, path):
    with open(path, "w") as fh:
        fh.write(f"# n={mask.n}\n")
        for v in mask.sampled_nodes():
            fh.write(f"{v}\n")


def read_node_labels(path, n=None):
    """Read a ``node,label`` file; returns the classification and label names."""
    import csv

    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"node", "label"} <= set(reader.fieldnames):
            raise DataError(f"{path}: header must contain 'node,label'")
        rows = [(int(r["node"]), r["label"]) for r in reader]
    if n is None:
        n = max((r[0] for r in rows), default=-1) + 1
    names = sorted({lab for _, lab in rows})
    code = {lab: k for k, lab in enumerate(names)}
    labels = np.full(n, -1, dtype=np.int64)
    for node, lab in rows:
        if not 0 <= node < n:
            raise DataError(f"{path}: node {node} out of range for n={n}")
        labels[node] = code[lab]
    if (labels < 0).any():
        raise DataError(f"{path}: {int((labels < 0).sum())} nodes have no label")
    return NodeClassification(labels, len(names)), names


def write_node_labels(c, path, names=None):
    with open(path, "w") as fh:
        fh.write("node,label\n")
        for v, lab in enumerate(c.labels):
            fh.write(f"{v},{names[lab] if names else lab}\n")


def file_digest(path):
    import hashlib

    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def ensure_dir(path):
    os.makedirs(path, exist_ok=True)
    return path
