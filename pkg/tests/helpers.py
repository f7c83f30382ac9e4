"""Shared fixtures and independent oracles used across the test suite.

The oracles here intentionally avoid the library's vectorized code paths:
divergences come from numerical integration/summation, cut-set scoring from
a straight-line reimplementation, and attribute selection from exhaustive
subset enumeration.
"""

import math
from itertools import product

import numpy as np

from dendrocut.model import AttributeType, Dataset, Embedding


def random_dataset(n, m, bool_fraction=0.4, seed=0):
    rng = np.random.default_rng(seed)
    kinds = [
        AttributeType.BOOLEAN if rng.random() < bool_fraction else AttributeType.REAL
        for _ in range(m)
    ]
    cols = []
    for kind in kinds:
        if kind is AttributeType.BOOLEAN:
            cols.append((rng.random(n) < rng.uniform(0.2, 0.8)).astype(float))
        else:
            cols.append(rng.normal(rng.uniform(-3, 3), rng.uniform(0.5, 3.0), n))
    values = np.column_stack(cols)
    schema = tuple((f"a{j}", kinds[j]) for j in range(m))
    return Dataset(values, schema)


def random_embedding(n, seed=0, scale=10.0):
    rng = np.random.default_rng(seed)
    return Embedding(rng.uniform(-scale, scale, (n, 2)))


def two_cluster_fixture(n=60, m=10, discriminating=3, seed=13):
    """Two blobs whose only informative attribute is ``discriminating``."""
    rng = np.random.default_rng(seed)
    labels = np.arange(n) % 2
    values = rng.standard_normal((n, m))
    values[:, discriminating] += 10.0 * labels
    coords = np.column_stack([30.0 * labels, np.zeros(n)]) + rng.standard_normal((n, 2))
    schema = tuple((f"a{j}", AttributeType.REAL) for j in range(m))
    return Dataset(values, schema), Embedding(coords), labels


# ---------------------------------------------------------------------------
# divergence oracles


def bernoulli_kl_by_summation(p, q):
    """KL in bits by explicit summation over the two outcomes."""
    total = 0.0
    for outcome_p, outcome_q in ((p, q), (1.0 - p, 1.0 - q)):
        total += outcome_p * math.log2(outcome_p / outcome_q)
    return total


def gaussian_kl_by_quadrature(mean1, stdev1, mean0, stdev0):
    """KL in bits by numerical integration of p(x) * log2(p(x) / q(x))."""
    from scipy.integrate import quad

    def log_pdf(x, mu, sigma):
        return -0.5 * ((x - mu) / sigma) ** 2 - math.log(sigma * math.sqrt(2 * math.pi))

    def integrand(x):
        lp = log_pdf(x, mean1, stdev1)
        lq = log_pdf(x, mean0, stdev0)
        return math.exp(lp) * (lp - lq) / math.log(2)

    lo = mean1 - 40 * stdev1
    hi = mean1 + 40 * stdev1
    value, _ = quad(integrand, lo, hi, epsabs=1e-10, epsrel=1e-10, limit=400)
    return value


# ---------------------------------------------------------------------------
# attribute-selection oracle: exhaustive search over per-cluster subsets


def exhaustive_attribute_optimum(ic, weights, alpha, beta):
    """Best achievable interestingness over all nonempty per-cluster subsets.

    Enumerates every subset per cluster, keeps the best information total
    per statistic budget, and combines budgets across clusters; the score
    depends on subsets only through (total information, total statistics),
    so this equals literal enumeration of all subset combinations.
    """
    k, m = ic.shape
    per_cluster = []
    for c in range(k):
        best = {}
        for mask in range(1, 1 << m):
            info = 0.0
            weight = 0
            for j in range(m):
                if mask >> j & 1:
                    info += ic[c, j]
                    weight += int(weights[j])
            if weight not in best or info > best[weight]:
                best[weight] = info
        per_cluster.append(sorted(best.items()))
    best_si = 0.0
    for combo in product(*per_cluster):
        total_weight = sum(w for w, _ in combo)
        total_info = sum(i for _, i in combo)
        si = total_info / (alpha + total_weight**beta)
        best_si = max(best_si, si)
    return best_si


def literal_attribute_optimum(ic, weights, alpha, beta):
    """Same optimum by brute force over subset tuples; only viable for tiny m."""
    k, m = ic.shape
    masks = range(1, 1 << m)
    best_si = 0.0
    for combo in product(masks, repeat=k):
        info = 0.0
        weight = 0
        for c, mask in enumerate(combo):
            for j in range(m):
                if mask >> j & 1:
                    info += ic[c, j]
                    weight += int(weights[j])
        si = info / (alpha + weight**beta)
        best_si = max(best_si, si)
    return best_si


# ---------------------------------------------------------------------------
# straight-line cut-set evaluator (duplicate implementation of the pipeline)


def straightline_evaluate(dendrogram, cutset_nodes, dataset, epsilon, alpha, beta):
    """Score a cut-set with plain loops and no caching.

    Returns (si, total information, attribute sets per cluster in cut-set
    order). Mirrors the specified pipeline: lowest-selected-ancestor
    assignment, maximum likelihood statistics with floor/clamp, seeded
    greedy attribute selection by marginal interestingness.
    """
    nodes = dendrogram.nodes
    n = dataset.n
    m = dataset.m
    selected = list(cutset_nodes)

    parent = {}
    for node in nodes:
        if node.left is not None:
            parent[node.left] = node.id
            parent[node.right] = node.id

    def lowest_selected_ancestor(leaf):
        v = leaf
        while v not in selected:
            v = parent[v]
        return v

    clusters = {v: [] for v in selected}
    for leaf in range(n):
        clusters[lowest_selected_ancestor(leaf)].append(leaf)
    assert all(clusters[v] for v in selected)

    values = dataset.values
    global_var = np.var(values, axis=0)
    floors = [max(epsilon * global_var[j], 1e-12) for j in range(m)]
    prior = []
    for j in range(m):
        if dataset.schema[j][1] is AttributeType.BOOLEAN:
            freq = float(np.count_nonzero(values[:, j])) / n
            prior.append(("b", min(max(freq, 1 / (2 * n)), 1 - 1 / (2 * n))))
        else:
            prior.append(("r", float(np.mean(values[:, j])), math.sqrt(max(global_var[j], floors[j]))))

    def kl_bits(j, pts):
        col = values[pts, j]
        c = len(pts)
        if prior[j][0] == "b":
            freq = float(np.count_nonzero(col)) / c
            freq = min(max(freq, 1 / (2 * c)), 1 - 1 / (2 * c))
            q = prior[j][1]
            return freq * math.log2(freq / q) + (1 - freq) * math.log2((1 - freq) / (1 - q))
        mean = float(np.mean(col))
        std = math.sqrt(max(float(np.var(col)), floors[j]))
        _, mu0, sd0 = prior[j]
        return (
            math.log(sd0 / std) + (std**2 + (mean - mu0) ** 2) / (2 * sd0**2) - 0.5
        ) / math.log(2)

    weights = [1 if dataset.schema[j][1] is AttributeType.BOOLEAN else 2 for j in range(m)]
    ic = {(v, j): len(clusters[v]) * kl_bits(j, clusters[v]) for v in selected for j in range(m)}

    chosen = {v: set() for v in selected}
    info = 0.0
    total_w = 0
    for v in selected:
        best_j = max(range(m), key=lambda j: (ic[(v, j)], -j))
        chosen[v].add(best_j)
        info += ic[(v, best_j)]
        total_w += weights[best_j]
    si = info / (alpha + total_w**beta)
    while True:
        best = None
        for ci, v in enumerate(selected):
            for j in range(m):
                if j in chosen[v]:
                    continue
                cand = (info + ic[(v, j)]) / (alpha + (total_w + weights[j]) ** beta)
                key = (cand, -ci, -j)
                if best is None or key > best[0]:
                    best = (key, v, j)
        if best is None or not best[0][0] > si:
            break
        _, v, j = best
        chosen[v].add(j)
        info += ic[(v, j)]
        total_w += weights[j]
        si = best[0][0]

    info = sum(ic[(v, j)] for v in selected for j in chosen[v])
    si = info / (alpha + total_w**beta)
    return si, info, [frozenset(chosen[v]) for v in selected]


def adjusted_rand_index(labels_a, labels_b):
    """Chance-corrected agreement between two labelings."""
    labels_a = np.asarray(labels_a)
    labels_b = np.asarray(labels_b)
    assert labels_a.shape == labels_b.shape
    n = labels_a.size
    pairs = {}
    counts_a = {}
    counts_b = {}
    for a, b in zip(labels_a.tolist(), labels_b.tolist()):
        pairs[(a, b)] = pairs.get((a, b), 0) + 1
        counts_a[a] = counts_a.get(a, 0) + 1
        counts_b[b] = counts_b.get(b, 0) + 1
    comb2 = lambda x: x * (x - 1) / 2
    sum_pairs = sum(comb2(c) for c in pairs.values())
    sum_a = sum(comb2(c) for c in counts_a.values())
    sum_b = sum(comb2(c) for c in counts_b.values())
    expected = sum_a * sum_b / comb2(n)
    max_index = (sum_a + sum_b) / 2
    if max_index == expected:
        return 1.0
    return (sum_pairs - expected) / (max_index - expected)
