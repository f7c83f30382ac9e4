"""Agglomerative dendrograms over a 2D embedding and cut-set partition semantics.

The dendrogram is built with a stored-distance-matrix agglomeration under a
deterministic tie-break: among pairs at the minimal distance, the pair whose
(smaller id, larger id) tuple is lexicographically smallest merges first.
Leaves carry ids 0..n-1 (equal to point indices); internal nodes get ids
n..2n-2 in merge order, so the root is always id 2n-2.

A cut-set is a set of node ids containing the root. Each point belongs to
the cluster of its lowest selected ancestor (a selected leaf is its own
cluster), which makes splits and merges O(1) structural edits.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .model import Embedding, Linkage


@dataclass(frozen=True)
class DendrogramNode:
    """One merge-tree node; leaves have a point index, internal nodes a height."""

    id: int
    left: int | None
    right: int | None
    height: float
    point: int | None
    size: int


@dataclass(frozen=True)
class Dendrogram:
    """Binary merge tree with 2n-1 nodes over n embedding points."""

    nodes: tuple[DendrogramNode, ...]

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        total = len(self.nodes)
        if total < 3 or total % 2 == 0:
            raise ValueError("a dendrogram over n >= 2 points has 2n-1 nodes")
        n = (total + 1) // 2
        for i, node in enumerate(self.nodes):
            if node.id != i:
                raise ValueError("node ids must be dense and ordered")
            if i < n:
                if node.left is not None or node.right is not None or node.point != i:
                    raise ValueError(f"node {i} must be the leaf for point {i}")
                if node.size != 1:
                    raise ValueError("leaves have subtree size 1")
            else:
                if node.left is None or node.right is None:
                    raise ValueError(f"internal node {i} must have two children")
                if not (node.left < i and node.right < i):
                    raise ValueError("children must precede their parent")
                expected = self.nodes[node.left].size + self.nodes[node.right].size
                if node.size != expected:
                    raise ValueError(f"node {i} size {node.size} != children total {expected}")

    @property
    def n_points(self) -> int:
        return (len(self.nodes) + 1) // 2

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def root_id(self) -> int:
        return len(self.nodes) - 1

    @cached_property
    def parents(self) -> np.ndarray:
        """Parent id per node; -1 for the root."""
        out = np.full(self.n_nodes, -1, dtype=np.int64)
        for node in self.nodes:
            if node.left is not None:
                out[node.left] = node.id
                out[node.right] = node.id
        out.flags.writeable = False
        return out

    @cached_property
    def sizes(self) -> np.ndarray:
        out = np.array([node.size for node in self.nodes], dtype=np.int64)
        out.flags.writeable = False
        return out

    @cached_property
    def heights(self) -> np.ndarray:
        out = np.array([node.height for node in self.nodes], dtype=np.float64)
        out.flags.writeable = False
        return out

    @cached_property
    def _dfs_interval(self) -> tuple[np.ndarray, np.ndarray]:
        """Preorder enter/exit counters for O(1) ancestor tests."""
        enter = np.zeros(self.n_nodes, dtype=np.int64)
        exit_ = np.zeros(self.n_nodes, dtype=np.int64)
        clock = 0
        stack = [(self.root_id, False)]
        while stack:
            node_id, done = stack.pop()
            if done:
                exit_[node_id] = clock
                continue
            enter[node_id] = clock
            clock += 1
            stack.append((node_id, True))
            node = self.nodes[node_id]
            if node.left is not None:
                stack.append((node.right, False))
                stack.append((node.left, False))
        enter.flags.writeable = False
        exit_.flags.writeable = False
        return enter, exit_

    def is_ancestor(self, ancestor: int, descendant: int) -> bool:
        """Whether ``ancestor`` is an ancestor of (or equal to) ``descendant``."""
        enter, exit_ = self._dfs_interval
        return enter[ancestor] <= enter[descendant] and enter[descendant] < exit_[ancestor]


@dataclass(frozen=True)
class CutSet:
    """Selected node ids in insertion order; the root comes first."""

    selected: tuple[int, ...]

    def __post_init__(self):
        selected = tuple(int(v) for v in self.selected)
        if not selected:
            raise ValueError("a cut-set cannot be empty")
        if len(set(selected)) != len(selected):
            raise ValueError("cut-set contains duplicate nodes")
        object.__setattr__(self, "selected", selected)

    @classmethod
    def root_only(cls, dendrogram: Dendrogram) -> "CutSet":
        return cls((dendrogram.root_id,))

    @cached_property
    def _members(self) -> frozenset[int]:
        return frozenset(self.selected)

    def __contains__(self, node: int) -> bool:
        return node in self._members

    def __len__(self) -> int:
        return len(self.selected)

    def with_split(self, node: int) -> "CutSet":
        if node in self:
            raise ValueError(f"node {node} is already selected")
        return CutSet(self.selected + (int(node),))

    def without(self, node: int) -> "CutSet":
        if node == self.selected[0]:
            raise ValueError("cannot remove the root from a cut-set")
        if node not in self:
            raise ValueError(f"node {node} is not selected")
        return CutSet(tuple(v for v in self.selected if v != node))


@dataclass(frozen=True)
class ClusterSite:
    """A cluster of a cut-set: its node, the selected nodes shadowing it, its size."""

    node: int
    shadows: tuple[int, ...]
    size: int


def build_dendrogram(embedding: Embedding, linkage: Linkage = Linkage.SINGLE) -> Dendrogram:
    """Agglomerate the embedding points under Euclidean distance.

    Duplicate points are fine (zero-height merges). The result is fully
    deterministic: distance ties resolve to the lexicographically smallest
    (smaller id, larger id) pair, and the smaller child id goes left.
    """
    coords = embedding.coords
    n = coords.shape[0]
    if n < 2:
        raise ValueError("need at least 2 points to build a dendrogram")

    dist = _pairwise_distances(coords)
    np.fill_diagonal(dist, np.inf)

    total = 2 * n - 1
    left = np.full(total, -1, dtype=np.int64)
    right = np.full(total, -1, dtype=np.int64)
    height = np.zeros(total, dtype=np.float64)
    size = np.ones(total, dtype=np.int64)

    node_of = np.arange(n, dtype=np.int64)  # node id currently held by each slot
    slot_size = np.ones(n, dtype=np.int64)
    active = np.ones(n, dtype=bool)
    best_d = np.empty(n, dtype=np.float64)
    best_t = np.empty(n, dtype=np.int64)
    for s in range(n):
        best_d[s], best_t[s] = _row_best(dist[s], node_of)

    for step in range(n - 1):
        # global argmin by (distance, smaller node id, larger node id)
        masked = np.where(active, best_d, np.inf)
        dmin = masked.min()
        best_key = None
        keep = drop = -1
        for s in np.flatnonzero(masked == dmin):
            t = int(best_t[s])
            a, b = int(node_of[s]), int(node_of[t])
            key = (a, b) if a < b else (b, a)
            if best_key is None or key < best_key:
                best_key = key
                keep, drop = s, t

        new_id = n + step
        left[new_id], right[new_id] = best_key
        height[new_id] = dmin
        size[new_id] = slot_size[keep] + slot_size[drop]

        new_row = _combine_rows(
            linkage, dist[keep], dist[drop], slot_size[keep], slot_size[drop]
        )
        new_row[keep] = np.inf
        new_row[drop] = np.inf
        dist[keep, :] = new_row
        dist[:, keep] = new_row
        dist[drop, :] = np.inf
        dist[:, drop] = np.inf
        active[drop] = False
        best_d[drop] = np.inf
        node_of[keep] = new_id
        slot_size[keep] = size[new_id]

        if step == n - 2:
            break
        # refresh nearest-partner caches: rows whose partner died are rescanned,
        # everyone else only needs to consider the new cluster
        stale = active & ((best_t == keep) | (best_t == drop))
        stale[keep] = True
        closer = active & ~stale & (dist[keep] < best_d)
        best_d[closer] = dist[keep][closer]
        best_t[closer] = keep
        for s in np.flatnonzero(stale):
            best_d[s], best_t[s] = _row_best(dist[s], node_of)

    nodes = [
        DendrogramNode(i, None, None, 0.0, i, 1) for i in range(n)
    ] + [
        DendrogramNode(i, int(left[i]), int(right[i]), float(height[i]), None, int(size[i]))
        for i in range(n, total)
    ]
    return Dendrogram(tuple(nodes))


def _pairwise_distances(coords: np.ndarray, block: int = 512) -> np.ndarray:
    """Exact symmetric Euclidean distance matrix, computed in row blocks."""
    n = coords.shape[0]
    out = np.empty((n, n), dtype=np.float64)
    for start in range(0, n, block):
        stop = min(start + block, n)
        diff = coords[start:stop, None, :] - coords[None, :, :]
        np.sqrt(np.sum(diff * diff, axis=-1), out=out[start:stop])
    return out


def _row_best(row: np.ndarray, node_of: np.ndarray) -> tuple[float, int]:
    """Closest partner slot; ties go to the partner with the smallest node id."""
    m = row.min()
    candidates = np.flatnonzero(row == m)
    return float(m), int(candidates[np.argmin(node_of[candidates])])


def _combine_rows(linkage, row_a, row_b, size_a, size_b):
    if linkage is Linkage.SINGLE:
        return np.minimum(row_a, row_b)
    if linkage is Linkage.COMPLETE:
        return np.maximum(row_a, row_b)
    return (size_a * row_a + size_b * row_b) / (size_a + size_b)


def _cut_arrays(d: Dendrogram, selected: frozenset[int]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-node helper arrays for one cut-set.

    free[v]: points under v not captured by selected nodes strictly below v
    cluster_size[v]: induced cluster size for selected v (0 elsewhere)
    owner[v]: lowest selected ancestor-or-self of v
    """
    total = d.n_nodes
    root = d.root_id
    if root not in selected:
        raise ValueError("cut-set must contain the root")
    for v in selected:
        if not 0 <= v < total:
            raise ValueError(f"cut-set node {v} out of range")
    nodes = d.nodes
    n = d.n_points
    free = np.zeros(total, dtype=np.int64)
    cluster_size = np.zeros(total, dtype=np.int64)
    for v in range(total):
        f = 1 if v < n else free[nodes[v].left] + free[nodes[v].right]
        if v in selected:
            cluster_size[v] = f
            f = 0
        free[v] = f
    parents = d.parents
    owner = np.full(total, -1, dtype=np.int64)
    for v in range(total - 1, -1, -1):
        owner[v] = v if v in selected else owner[parents[v]]
    return free, cluster_size, owner


def validate_cutset(d: Dendrogram, c: CutSet) -> None:
    """Raise if the cut-set is invalid for this dendrogram."""
    _, cluster_size, _ = _cut_arrays(d, c._members)
    empty = [v for v in c.selected if cluster_size[v] == 0]
    if empty:
        raise ValueError(f"cut-set nodes with empty induced clusters: {empty}")


def clusters_from_cutset(d: Dendrogram, c: CutSet) -> list[np.ndarray]:
    """Partition of the points, one index array per selected node in insertion order."""
    _, cluster_size, owner = _cut_arrays(d, c._members)
    empty = [v for v in c.selected if cluster_size[v] == 0]
    if empty:
        raise ValueError(f"cut-set nodes with empty induced clusters: {empty}")
    index_of = {node: i for i, node in enumerate(c.selected)}
    labels = np.array([index_of[owner[p]] for p in range(d.n_points)], dtype=np.int64)
    return [np.flatnonzero(labels == i) for i in range(len(c.selected))]


def cutset_structure(d: Dendrogram, c: CutSet) -> list[ClusterSite]:
    """Clusters of a cut-set as (node, shadowing selected nodes, size) sites."""
    _, cluster_size, owner = _cut_arrays(d, c._members)
    empty = [v for v in c.selected if cluster_size[v] == 0]
    if empty:
        raise ValueError(f"cut-set nodes with empty induced clusters: {empty}")
    parents = d.parents
    shadows: dict[int, list[int]] = {v: [] for v in c.selected}
    for v in c.selected:
        if v != d.root_id:
            shadows[owner[parents[v]]].append(v)
    return [
        ClusterSite(v, tuple(sorted(shadows[v])), int(cluster_size[v]))
        for v in c.selected
    ]


def candidate_splits(d: Dendrogram, c: CutSet, min_cluster_size: int = 1) -> list[int]:
    """Nodes that can be split off so both resulting clusters keep the minimum size."""
    free, cluster_size, owner = _cut_arrays(d, c._members)
    parents = d.parents
    members = c._members
    out = []
    for v in range(d.n_nodes - 1):
        if v in members:
            continue
        gained = free[v]
        if gained < min_cluster_size:
            continue
        host = owner[parents[v]]
        if cluster_size[host] - gained < min_cluster_size:
            continue
        out.append(v)
    return out


def candidate_merges(d: Dendrogram, c: CutSet) -> list[int]:
    """Selected nodes whose removal folds their points back into an ancestor cluster."""
    root = d.root_id
    return [v for v in c.selected if v != root]
