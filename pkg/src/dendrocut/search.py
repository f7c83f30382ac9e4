"""Greedy search over dendrogram cuts: attribute selection, splitting, refinement.

The search never looks at embedding distances; merge heights only define
which partitions are reachable. Scoring is made cheap by memoizing per-node
(count, sum, sum-of-squares) accumulators over the dendrogram once, so any
cluster reachable by cutting is scored in O(m) by subtracting the selected
subtrees that shadow it.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .hierarchy import (
    ClusterSite,
    CutSet,
    Dendrogram,
    candidate_merges,
    clusters_from_cutset,
    cutset_structure,
)
from .infotheory import (
    attribute_divergence,
    complexity_from_count,
    kl_bernoulli_vector,
    kl_gaussian_vector,
)
from .model import (
    AttributeStatistics,
    BiclusterPattern,
    BooleanStat,
    ClusteringSolution,
    Dataset,
    Hyperparameters,
    PriorModel,
    RealStat,
    fit_cluster_statistics,
)


@dataclass(frozen=True)
class SearchBudget:
    """Wall-clock deadline and/or iteration cap, checked between evaluations.

    An evaluation already in flight is never aborted. Tests use the
    deterministic iteration cap; interactive callers use the deadline.
    """

    deadline: float | None
    iterations_max: int | None = None

    @classmethod
    def from_time_ms(cls, ms: float, iterations_max: int | None = None) -> "SearchBudget":
        return cls(time.monotonic() + ms / 1000.0, iterations_max)

    def expired(self) -> bool:
        return self.deadline is not None and time.monotonic() >= self.deadline

    def allows_iteration(self, completed: int) -> bool:
        return self.iterations_max is None or completed < self.iterations_max


@dataclass(frozen=True)
class IterationRecord:
    k: int
    si: float
    elapsed_s: float


@dataclass(frozen=True)
class SearchTrace:
    """Per-iteration progress records plus whether the budget ran out."""

    records: tuple[IterationRecord, ...]
    expired: bool

    @property
    def iterations(self) -> int:
        return len(self.records)


@dataclass(frozen=True)
class ClusterCell:
    """Fitted statistics and per-attribute information for one cluster."""

    count: int
    frequencies: np.ndarray
    means: np.ndarray
    stdevs: np.ndarray
    ic_row: np.ndarray


class NodeStatistics:
    """Memoized per-node accumulators for fast cluster scoring.

    Real columns are accumulated relative to their full-data mean (keeps the
    subtraction-based variance well conditioned); boolean columns stay raw so
    frequencies come from exact integer counts.
    """

    def __init__(self, dendrogram: Dendrogram, dataset: Dataset, prior: PriorModel):
        if dendrogram.n_points != dataset.n:
            raise ValueError("dendrogram and dataset disagree on the number of points")
        self.dendrogram = dendrogram
        self.dataset = dataset
        self.prior = prior

        bool_mask = dataset.boolean_mask
        self.bool_idx = np.flatnonzero(bool_mask)
        self.real_idx = np.flatnonzero(~bool_mask)
        self._pos = np.zeros(dataset.m, dtype=np.int64)
        self._pos[self.bool_idx] = np.arange(self.bool_idx.size)
        self._pos[self.real_idx] = np.arange(self.real_idx.size)

        center = np.zeros(dataset.m)
        for j in self.real_idx:
            center[j] = prior.stats[j].mean
        self._center_real = center[self.real_idx]

        total = dendrogram.n_nodes
        n = dataset.n
        shifted = dataset.values - center[None, :]
        s1 = np.zeros((total, dataset.m))
        s2 = np.zeros((total, dataset.m))
        s1[:n] = shifted
        s2[:n] = shifted * shifted
        nodes = dendrogram.nodes
        for v in range(n, total):
            left, right = nodes[v].left, nodes[v].right
            s1[v] = s1[left] + s1[right]
            s2[v] = s2[left] + s2[right]
        self._s1 = s1
        self._s2 = s2
        self._counts = dendrogram.sizes

        self._prior_freq = np.array(
            [prior.stats[j].frequency for j in self.bool_idx], dtype=np.float64
        )
        self._prior_mean = np.array(
            [prior.stats[j].mean for j in self.real_idx], dtype=np.float64
        )
        self._prior_std = np.array(
            [prior.stats[j].stdev for j in self.real_idx], dtype=np.float64
        )
        self._floor_real = np.asarray(prior.variance_floor)[self.real_idx]
        self.weights = np.where(bool_mask, 1, 2).astype(np.int64)
        self.cell = lru_cache(maxsize=4096)(self._cell)

    def _cell(self, node: int, shadows: tuple[int, ...]) -> ClusterCell:
        counts = self._counts
        count = int(counts[node]) - int(sum(counts[w] for w in shadows))
        if count <= 0:
            raise ValueError("cluster has no points")
        n = self.dataset.n
        if count == n:
            # the full data IS the prior, so its divergence is exactly zero
            m = self.dataset.m
            return ClusterCell(
                n,
                self._prior_freq.copy(),
                self._prior_mean.copy(),
                self._prior_std.copy(),
                np.zeros(m),
            )
        s1 = self._s1[node].copy()
        s2 = self._s2[node].copy()
        for w in shadows:
            s1 -= self._s1[w]
            s2 -= self._s2[w]

        clamp = 1.0 / (2.0 * count)
        freqs = np.clip(s1[self.bool_idx] / count, clamp, 1.0 - clamp)
        offset = s1[self.real_idx] / count
        var = np.maximum(s2[self.real_idx] / count - offset * offset, self._floor_real)
        stdevs = np.sqrt(var)
        means = self._center_real + offset

        ic_row = np.zeros(self.dataset.m)
        if self.bool_idx.size:
            ic_row[self.bool_idx] = count * kl_bernoulli_vector(freqs, self._prior_freq)
        if self.real_idx.size:
            ic_row[self.real_idx] = count * kl_gaussian_vector(
                means, stdevs, self._prior_mean, self._prior_std
            )
        return ClusterCell(count, freqs, means, stdevs, ic_row)

    def statistic(self, cell: ClusterCell, attribute: int) -> AttributeStatistics:
        pos = int(self._pos[attribute])
        if self.weights[attribute] == 1:
            return BooleanStat(float(cell.frequencies[pos]))
        return RealStat(float(cell.means[pos]), float(cell.stdevs[pos]))


@dataclass(frozen=True)
class _Selection:
    attributes: tuple[tuple[int, ...], ...]  # ordered by decreasing information
    per_cluster_information: tuple[float, ...]
    total_information: float
    total_statistics: int
    complexity: float
    si: float


def _greedy_selection(ic: np.ndarray, weights: np.ndarray, alpha: float, beta: float) -> _Selection:
    """Pick attributes per cluster: seed each with its top-information one,
    then repeatedly add the (cluster, attribute) pair with the best marginal
    interestingness while it strictly improves.

    Boolean and real candidates are kept in separate information-sorted
    queues; within a round only the head of each queue can win, because the
    added complexity depends solely on the attribute's statistic count.
    """
    k, m = ic.shape
    flat = ic.ravel()
    used = np.zeros(k * m, dtype=bool)
    info = 0.0
    total_stats = 0
    for c in range(k):
        j = int(np.argmax(ic[c]))
        used[c * m + j] = True
        info += float(ic[c, j])
        total_stats += int(weights[j])
    si = info / complexity_from_count(total_stats, alpha, beta)

    order = np.lexsort((np.arange(k * m), -flat))
    weights_flat = np.tile(weights, k)
    queues = [order[weights_flat[order] == w] for w in (1, 2)]
    pointers = [0, 0]
    while True:
        best = None  # (si, flat index, statistic weight)
        for qi, w in ((0, 1), (1, 2)):
            queue = queues[qi]
            p = pointers[qi]
            while p < queue.size and used[queue[p]]:
                p += 1
            pointers[qi] = p
            if p == queue.size:
                continue
            f = int(queue[p])
            cand_si = (info + float(flat[f])) / complexity_from_count(
                total_stats + w, alpha, beta
            )
            if best is None or cand_si > best[0] or (cand_si == best[0] and f < best[1]):
                best = (cand_si, f, w)
        if best is None or not best[0] > si:
            break
        si, f, w = best
        used[f] = True
        info += float(flat[f])
        total_stats += w

    chosen = used.reshape(k, m)
    attributes = []
    per_cluster = []
    for c in range(k):
        js = np.flatnonzero(chosen[c])
        ordered = tuple(sorted((int(j) for j in js), key=lambda j: (-ic[c, j], j)))
        attributes.append(ordered)
        per_cluster.append(float(np.sum(ic[c, list(ordered)])))
    total_information = sum(per_cluster)
    complexity = complexity_from_count(total_stats, alpha, beta)
    return _Selection(
        tuple(attributes),
        tuple(per_cluster),
        total_information,
        total_stats,
        complexity,
        total_information / complexity if complexity > 0.0 else 0.0,
    )


def select_attributes(
    partition: Sequence[Sequence[int]],
    dataset: Dataset,
    prior: PriorModel,
    hp: Hyperparameters,
) -> list[BiclusterPattern]:
    """Choose explaining attributes for each cluster of a partition."""
    if not partition:
        raise ValueError("partition must contain at least one cluster")
    all_attrs = list(range(dataset.m))
    stats = [fit_cluster_statistics(dataset, prior, pts, all_attrs) for pts in partition]
    ic = np.zeros((len(partition), dataset.m))
    for c, pts in enumerate(partition):
        size = len(list(pts)) if not hasattr(pts, "__len__") else len(pts)
        for j in all_attrs:
            ic[c, j] = size * attribute_divergence(stats[c][j], prior.stats[j])
    weights = np.where(dataset.boolean_mask, 1, 2).astype(np.int64)
    selection = _greedy_selection(ic, weights, hp.alpha, hp.beta)
    patterns = []
    for c, pts in enumerate(partition):
        attrs = selection.attributes[c]
        patterns.append(
            BiclusterPattern(
                frozenset(int(p) for p in pts),
                attrs,
                tuple(stats[c][j] for j in attrs),
            )
        )
    return patterns


def _score_sites(
    cells: list[ClusterCell], node_stats: NodeStatistics, hp: Hyperparameters
) -> _Selection:
    ic = np.vstack([cell.ic_row for cell in cells])
    return _greedy_selection(ic, node_stats.weights, hp.alpha, hp.beta)


def _solution_from_sites(
    cutset: CutSet,
    sites: list[ClusterSite],
    cells: list[ClusterCell],
    selection: _Selection,
    d: Dendrogram,
    node_stats: NodeStatistics,
) -> ClusteringSolution:
    clusters = clusters_from_cutset(d, cutset)
    patterns = []
    for site, cell, cluster, attrs in zip(sites, cells, clusters, selection.attributes):
        stats = tuple(node_stats.statistic(cell, j) for j in attrs)
        patterns.append(BiclusterPattern(frozenset(int(p) for p in cluster), attrs, stats))
    return ClusteringSolution(
        cutset.selected,
        tuple(patterns),
        selection.total_information,
        selection.complexity,
        selection.si,
    )


def evaluate_cutset(
    cutset: CutSet,
    d: Dendrogram,
    dataset: Dataset,
    prior: PriorModel,
    hp: Hyperparameters,
    node_stats: NodeStatistics | None = None,
) -> ClusteringSolution:
    """Fully score one cut-set: partition, attribute selection, interestingness."""
    if node_stats is None:
        node_stats = NodeStatistics(d, dataset, prior)
    sites = cutset_structure(d, cutset)
    cells = [node_stats.cell(site.node, site.shadows) for site in sites]
    selection = _score_sites(cells, node_stats, hp)
    return _solution_from_sites(cutset, sites, cells, selection, d, node_stats)


def _split_candidate_sites(
    sites: list[ClusterSite],
    host_index: dict[int, int],
    v: int,
    host: int,
    gained: int,
    d: Dendrogram,
) -> tuple[list[ClusterSite], int]:
    """Sites for the cut-set with ``v`` split off its host cluster."""
    i = host_index[host]
    host_site = sites[i]
    moved = tuple(w for w in host_site.shadows if d.is_ancestor(v, w))
    new_host = ClusterSite(
        host,
        tuple(sorted((set(host_site.shadows) - set(moved)) | {v})),
        host_site.size - gained,
    )
    new_sites = list(sites)
    new_sites[i] = new_host
    new_sites.append(ClusterSite(v, moved, gained))
    return new_sites, i


def _best_split(
    d: Dendrogram,
    cutset: CutSet,
    sites: list[ClusterSite],
    cells: list[ClusterCell],
    node_stats: NodeStatistics,
    hp: Hyperparameters,
    budget: SearchBudget,
) -> tuple[int, float] | None | str:
    """Best single split by (si desc, node id asc); "expired" if the budget ran out."""
    from .hierarchy import _cut_arrays  # shares the cut arrays with candidate enumeration

    free, cluster_size, owner = _cut_arrays(d, cutset._members)
    parents = d.parents
    members = cutset._members
    host_index = {site.node: i for i, site in enumerate(sites)}
    base_rows = [cell.ic_row for cell in cells]

    best_v = -1
    best_si = -np.inf
    found = False
    for v in range(d.n_nodes - 1):
        if v in members:
            continue
        gained = int(free[v])
        if gained < hp.min_cluster_size:
            continue
        host = int(owner[parents[v]])
        if int(cluster_size[host]) - gained < hp.min_cluster_size:
            continue
        if budget.expired():
            return "expired"
        new_sites, host_i = _split_candidate_sites(sites, host_index, v, host, gained, d)
        host_cell = node_stats.cell(new_sites[host_i].node, new_sites[host_i].shadows)
        v_cell = node_stats.cell(v, new_sites[-1].shadows)
        rows = list(base_rows)
        rows[host_i] = host_cell.ic_row
        rows.append(v_cell.ic_row)
        ic = np.vstack(rows)
        selection = _greedy_selection(ic, node_stats.weights, hp.alpha, hp.beta)
        if selection.si > best_si:
            best_si = selection.si
            best_v = v
            found = True
    if not found:
        return None
    return best_v, best_si


def greedy_search(
    d: Dendrogram,
    dataset: Dataset,
    prior: PriorModel,
    hp: Hyperparameters,
    budget: SearchBudget | None = None,
    node_stats: NodeStatistics | None = None,
    on_iteration: Callable[[IterationRecord], None] | None = None,
) -> tuple[ClusteringSolution, SearchTrace]:
    """Grow a clustering one split at a time, keeping the best iteration.

    Iteration k evaluates every candidate split of the best cut-set at k
    clusters and keeps the split with the highest interestingness (ties go
    to the smaller node id). Iteration 2 is therefore exactly optimal over
    all single-split cut-sets. The returned solution is the best across all
    completed iterations; a partially evaluated iteration is discarded.
    """
    if budget is None:
        budget = SearchBudget.from_time_ms(hp.time_budget_ms)
    if node_stats is None:
        node_stats = NodeStatistics(d, dataset, prior)
    start = time.monotonic()

    cutset = CutSet.root_only(d)
    current = evaluate_cutset(cutset, d, dataset, prior, hp, node_stats)
    records = [IterationRecord(1, current.si, time.monotonic() - start)]
    if on_iteration:
        on_iteration(records[-1])
    best = current
    expired = False

    while budget.allows_iteration(len(records)):
        if budget.expired():
            expired = True
            break
        sites = cutset_structure(d, cutset)
        cells = [node_stats.cell(site.node, site.shadows) for site in sites]
        outcome = _best_split(d, cutset, sites, cells, node_stats, hp, budget)
        if outcome == "expired":
            expired = True
            break
        if outcome is None:
            break
        best_v, _ = outcome
        cutset = cutset.with_split(best_v)
        current = evaluate_cutset(cutset, d, dataset, prior, hp, node_stats)
        records.append(IterationRecord(len(records) + 1, current.si, time.monotonic() - start))
        if on_iteration:
            on_iteration(records[-1])
        if current.si > best.si:
            best = current

    trace = SearchTrace(tuple(records), expired)
    return replace(best, iterations_completed=len(records)), trace


def refine(
    previous: ClusteringSolution,
    d: Dendrogram,
    dataset: Dataset,
    prior: PriorModel,
    hp_new: Hyperparameters,
    budget: SearchBudget | None = None,
    node_stats: NodeStatistics | None = None,
    on_step: Callable[[IterationRecord], None] | None = None,
) -> tuple[ClusteringSolution, SearchTrace]:
    """Hill-climb from an existing solution under new hyperparameters.

    Each step evaluates the best single split and the best single merge and
    applies whichever strictly improves interestingness the most (ties
    prefer the merge, then the smaller node id). Stops at a local optimum
    or when the budget runs out; never returns less than the re-scored
    starting point.
    """
    if budget is None:
        budget = SearchBudget.from_time_ms(hp_new.time_budget_ms)
    if node_stats is None:
        node_stats = NodeStatistics(d, dataset, prior)
    if any(not 0 <= v < d.n_nodes for v in previous.cutset):
        raise ValueError("solution cut-set does not fit this dendrogram")
    if sum(p.size for p in previous.patterns) != dataset.n:
        raise ValueError("solution covers a different number of points than the dataset")
    start = time.monotonic()

    cutset = CutSet(previous.cutset)
    current = evaluate_cutset(cutset, d, dataset, prior, hp_new, node_stats)
    records = [IterationRecord(current.k, current.si, time.monotonic() - start)]
    if on_step:
        on_step(records[-1])
    expired = False

    while budget.allows_iteration(len(records)):
        if budget.expired():
            expired = True
            break
        sites = cutset_structure(d, cutset)
        cells = [node_stats.cell(site.node, site.shadows) for site in sites]
        split = _best_split(d, cutset, sites, cells, node_stats, hp_new, budget)
        if split == "expired":
            expired = True
            break
        merge_v = -1
        merge_si = -np.inf
        merge_found = False
        for w in sorted(candidate_merges(d, cutset)):
            if budget.expired():
                expired = True
                break
            candidate = cutset.without(w)
            cand_sites = cutset_structure(d, candidate)
            cand_cells = [node_stats.cell(s.node, s.shadows) for s in cand_sites]
            selection = _score_sites(cand_cells, node_stats, hp_new)
            if selection.si > merge_si:
                merge_si = selection.si
                merge_v = w
                merge_found = True
        if expired:
            break

        split_si = split[1] if isinstance(split, tuple) else -np.inf
        best_improvement = max(split_si, merge_si if merge_found else -np.inf)
        if not best_improvement > current.si:
            break
        if merge_found and merge_si >= split_si:
            cutset = cutset.without(merge_v)
        else:
            cutset = cutset.with_split(split[0])
        current = evaluate_cutset(cutset, d, dataset, prior, hp_new, node_stats)
        records.append(IterationRecord(current.k, current.si, time.monotonic() - start))
        if on_step:
            on_step(records[-1])

    trace = SearchTrace(tuple(records), expired)
    return replace(current, iterations_completed=len(records)), trace
