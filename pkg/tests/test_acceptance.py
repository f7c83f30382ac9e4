"""Acceptance suite: one test per release criterion, one printed line each.

Run with ``pytest tests/test_acceptance.py -s`` to see the PASS/FAIL lines.
Tolerances are pinned here and nowhere else.
"""

import time

import numpy as np
import pytest

from dendrocut.fixtures import make_acceptance_blobs
from dendrocut.hierarchy import (
    CutSet,
    build_dendrogram,
    candidate_splits,
    clusters_from_cutset,
)
from dendrocut.infotheory import kl_bernoulli, kl_gaussian, subjective_interestingness
from dendrocut.model import Dataset, Embedding, Hyperparameters, fit_prior
from dendrocut.search import (
    NodeStatistics,
    SearchBudget,
    evaluate_cutset,
    greedy_search,
    refine,
    select_attributes,
)
from dendrocut.ingestion import build_session, load_solution, save_solution
from helpers import (
    adjusted_rand_index,
    bernoulli_kl_by_summation,
    exhaustive_attribute_optimum,
    gaussian_kl_by_quadrature,
    random_dataset,
    random_embedding,
    two_cluster_fixture,
)


def report(name, ok, detail=""):
    line = f"[{'PASS' if ok else 'FAIL'}] {name}"
    if detail:
        line += f"  ({detail})"
    print(line)
    assert ok, line


@pytest.fixture(scope="module")
def acceptance_fixture():
    planted = make_acceptance_blobs(seed=7)
    dendrogram = build_dendrogram(planted.embedding)
    prior = fit_prior(planted.dataset)
    stats = NodeStatistics(dendrogram, planted.dataset, prior)
    return planted, dendrogram, prior, stats


def test_kl_oracle_equivalence():
    start = time.monotonic()
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(1000):
        p, q = rng.uniform(0.01, 0.99, 2)
        worst = max(worst, abs(kl_bernoulli(p, q) - bernoulli_kl_by_summation(p, q)))
    for _ in range(1000):
        m1, m0 = rng.uniform(-10, 10, 2)
        s1, s0 = rng.uniform(0.1, 10, 2)
        worst = max(
            worst, abs(kl_gaussian(m1, s1, m0, s0) - gaussian_kl_by_quadrature(m1, s1, m0, s0))
        )
    elapsed = time.monotonic() - start
    report(
        "KL oracle equivalence",
        worst < 1e-6 and elapsed < 10.0,
        f"max deviation {worst:.2e}, {elapsed:.1f}s",
    )


def test_zero_information_identity(acceptance_fixture):
    planted, dendrogram, prior, stats = acceptance_fixture
    hp = Hyperparameters(alpha=250.0, beta=1.6)
    solution = evaluate_cutset(CutSet.root_only(dendrogram), dendrogram, planted.dataset, prior, hp, stats)
    patterns = select_attributes([list(range(planted.dataset.n))], planted.dataset, prior, hp)
    score = subjective_interestingness(patterns, prior, hp)
    exact = (
        solution.total_information == 0.0
        and solution.si == 0.0
        and score.information == 0.0
        and score.si == 0.0
    )
    report("Zero-information identity", exact, "information and SI exactly 0.0")


def test_k2_optimality():
    mismatches = 0
    for trial in range(20):
        rng = np.random.default_rng(500 + trial)
        n = int(rng.integers(12, 65))
        dataset = random_dataset(n, int(rng.integers(3, 9)), bool_fraction=0.4, seed=600 + trial)
        embedding = random_embedding(n, seed=600 + trial)
        hp = Hyperparameters(
            alpha=float(rng.uniform(0, 1000)), beta=float(rng.uniform(1, 2))
        )
        dendrogram = build_dendrogram(embedding, hp.linkage)
        prior = fit_prior(dataset, hp.epsilon)
        stats = NodeStatistics(dendrogram, dataset, prior)
        solution, _ = greedy_search(
            dendrogram, dataset, prior, hp, budget=SearchBudget(None, 2), node_stats=stats
        )
        root = CutSet.root_only(dendrogram)
        best = None
        for v in candidate_splits(dendrogram, root, hp.min_cluster_size):
            cand = evaluate_cutset(root.with_split(v), dendrogram, dataset, prior, hp, stats)
            if best is None or cand.si > best.si:
                best = cand
        if solution.cutset != best.cutset:
            mismatches += 1
    report("k=2 optimality", mismatches == 0, f"{mismatches} of 20 instances mismatched")


def test_attribute_selection_oracle():
    start = time.monotonic()
    worst_ratio = 1.0
    for trial in range(8):
        rng = np.random.default_rng(900 + trial)
        m = int(rng.integers(5, 11))
        k = int(rng.integers(2, 4))
        dataset = random_dataset(60, m, bool_fraction=0.5, seed=900 + trial)
        prior = fit_prior(dataset)
        labels = rng.integers(0, k, dataset.n)
        labels[:k] = np.arange(k)
        partition = [np.flatnonzero(labels == c) for c in range(k)]
        hp = Hyperparameters(alpha=float(rng.uniform(0, 500)), beta=float(rng.uniform(1, 2)))
        patterns = select_attributes(partition, dataset, prior, hp)
        achieved = subjective_interestingness(patterns, prior, hp).si
        from test_search import ic_matrix

        ic = ic_matrix(partition, dataset, prior)
        weights = np.where(dataset.boolean_mask, 1, 2)
        optimum = exhaustive_attribute_optimum(ic, weights, hp.alpha, hp.beta)
        if optimum > 0:
            worst_ratio = min(worst_ratio, achieved / optimum)

    dataset, _, labels = two_cluster_fixture()
    prior = fit_prior(dataset)
    partition = [np.flatnonzero(labels == 0), np.flatnonzero(labels == 1)]
    hp = Hyperparameters(alpha=250.0, beta=1.6)
    patterns = select_attributes(partition, dataset, prior, hp)
    achieved = subjective_interestingness(patterns, prior, hp).si
    from test_search import ic_matrix

    ic = ic_matrix(partition, dataset, prior)
    optimum = exhaustive_attribute_optimum(
        ic, np.where(dataset.boolean_mask, 1, 2), hp.alpha, hp.beta
    )
    planted_exact = achieved == pytest.approx(optimum, rel=1e-9)
    elapsed = time.monotonic() - start
    report(
        "Attribute-selection oracle",
        worst_ratio >= 0.95 and planted_exact and elapsed < 60.0,
        f"worst greedy/optimum {worst_ratio:.4f}, planted exact: {planted_exact}, {elapsed:.1f}s",
    )


def test_planted_cluster_recovery(acceptance_fixture):
    planted, dendrogram, prior, stats = acceptance_fixture
    start = time.monotonic()
    hp = Hyperparameters(alpha=250.0, beta=1.6, time_budget_ms=8000.0)
    solution, _ = greedy_search(
        dendrogram, planted.dataset, prior, hp,
        budget=SearchBudget.from_time_ms(8000.0, 10), node_stats=stats,
    )
    elapsed = time.monotonic() - start
    ari = adjusted_rand_index(solution.labels(), planted.labels)
    attrs_ok = all(
        set(p.attributes) <= set(planted.discriminating) for p in solution.patterns
    )
    report(
        "Planted-cluster recovery",
        ari >= 0.99 and attrs_ok and elapsed < 10.0,
        f"ARI {ari:.4f}, attributes within discriminating set: {attrs_ok}, {elapsed:.1f}s",
    )


def test_alpha_zero_collapse(acceptance_fixture):
    planted, dendrogram, prior, stats = acceptance_fixture
    ks = {}
    for beta in (1.0, 1.2, 1.6, 2.0):
        hp = Hyperparameters(alpha=1e-300, beta=beta)
        solution, _ = greedy_search(
            dendrogram, planted.dataset, prior, hp,
            budget=SearchBudget(None, 8), node_stats=stats,
        )
        ks[beta] = solution.k
    report(
        "alpha=0 collapse",
        all(k <= 2 for k in ks.values()),
        f"k by beta: {ks}",
    )


def test_sweep_shape(acceptance_fixture):
    planted, dendrogram, prior, stats = acceptance_fixture
    alphas = (1e-300, 125.0, 250.0, 500.0, 1000.0)
    betas = (1.2, 1.4, 1.6)
    violations = []
    ok_steps = 0
    total_steps = 0
    for beta in betas:
        ks = []
        for alpha in alphas:
            hp = Hyperparameters(alpha=alpha, beta=beta)
            solution, _ = greedy_search(
                dendrogram, planted.dataset, prior, hp,
                budget=SearchBudget(None, 16), node_stats=stats,
            )
            ks.append(solution.k)
        for i in range(len(alphas) - 1):
            total_steps += 1
            if ks[i + 1] >= ks[i]:
                ok_steps += 1
            else:
                violations.append((beta, alphas[i], ks[i], alphas[i + 1], ks[i + 1]))
    fraction = ok_steps / total_steps
    detail = f"{ok_steps}/{total_steps} non-decreasing steps"
    if violations:
        detail += f", violations: {violations}"
    report("Sweep shape", fraction >= 0.8, detail)


def test_refinement_contract(acceptance_fixture):
    planted, dendrogram, prior, stats = acceptance_fixture
    hp = Hyperparameters(alpha=250.0, beta=1.6)
    previous, _ = greedy_search(
        dendrogram, planted.dataset, prior, hp,
        budget=SearchBudget(None, 6), node_stats=stats,
    )
    rng = np.random.default_rng(77)
    regressions = 0
    for _ in range(100):
        hp_new = hp.with_updates(
            alpha=float(rng.uniform(0, 1000)), beta=float(rng.uniform(1, 2))
        )
        rescored = evaluate_cutset(
            CutSet(previous.cutset), dendrogram, planted.dataset, prior, hp_new, stats
        )
        refined, _ = refine(
            previous, dendrogram, planted.dataset, prior, hp_new,
            budget=SearchBudget(None, 8), node_stats=stats,
        )
        if refined.si < rescored.si - 1e-12:
            regressions += 1

    once, _ = refine(
        previous, dendrogram, planted.dataset, prior, hp,
        budget=SearchBudget(None, 50), node_stats=stats,
    )
    again, trace = refine(
        once, dendrogram, planted.dataset, prior, hp,
        budget=SearchBudget(None, 50), node_stats=stats,
    )
    noop = again.cutset == once.cutset and trace.iterations == 1
    report(
        "Refinement contract",
        regressions == 0 and noop,
        f"{regressions} regressions in 100 perturbations, local-optimum no-op: {noop}",
    )


def test_budget_scaling():
    big = make_acceptance_blobs(seed=19)
    base_values = np.asarray(big.dataset.values)
    rng = np.random.default_rng(19)
    full = make_acceptance_blobs(seed=19)
    # build one large fixture by resampling points with jitter
    reps = 14
    values = np.vstack([base_values + rng.normal(0, 0.05, base_values.shape) for _ in range(reps)])
    coords = np.vstack(
        [np.asarray(full.embedding.coords) + rng.normal(0, 0.05, (base_values.shape[0], 2)) for _ in range(reps)]
    )
    iterations = {}
    for n in (500, 1000, 2000, 4000):
        idx = rng.choice(values.shape[0], size=n, replace=False)
        dataset = Dataset(values[idx], big.dataset.schema)
        embedding = Embedding(coords[idx])
        hp = Hyperparameters(alpha=250.0, beta=1.6, time_budget_ms=2000.0)
        dendrogram = build_dendrogram(embedding, hp.linkage)
        prior = fit_prior(dataset, hp.epsilon)
        stats = NodeStatistics(dendrogram, dataset, prior)
        _, trace = greedy_search(
            dendrogram, dataset, prior, hp,
            budget=SearchBudget.from_time_ms(2000.0), node_stats=stats,
        )
        iterations[n] = trace.iterations
    sizes = sorted(iterations)
    inversions = sum(
        1 for a, b in zip(sizes, sizes[1:]) if iterations[b] > iterations[a]
    )
    report(
        "Budget scaling",
        inversions <= 1,
        f"iterations by n: {iterations}, inversions: {inversions}",
    )


def test_partition_property():
    rng = np.random.default_rng(31337)
    checked = 0
    while checked < 1000:
        n = int(rng.integers(5, 201))
        embedding = random_embedding(n, seed=int(rng.integers(0, 2**31)))
        dendrogram = build_dendrogram(embedding)
        for _ in range(10):
            cut = CutSet.root_only(dendrogram)
            for _ in range(int(rng.integers(0, 10))):
                options = candidate_splits(dendrogram, cut, 1)
                if not options:
                    break
                cut = cut.with_split(int(rng.choice(options)))
            clusters = clusters_from_cutset(dendrogram, cut)
            combined = np.sort(np.concatenate(clusters))
            assert np.array_equal(combined, np.arange(n)), "not an exact partition"
            options = candidate_splits(dendrogram, cut, 1)
            if options:
                node = int(rng.choice(options))
                before = [tuple(c) for c in clusters]
                restored = clusters_from_cutset(dendrogram, cut.with_split(node).without(node))
                assert before == [tuple(c) for c in restored], "split+merge changed the partition"
            checked += 1
    report("Partition property", True, f"{checked} random cut-sets partitioned exactly")


def test_serialization(acceptance_fixture):
    planted, dendrogram, prior, stats = acceptance_fixture
    session = build_session(planted.dataset, planted.embedding, Hyperparameters(alpha=250.0, beta=1.6))
    solution, trace = greedy_search(
        session.dendrogram, session.dataset, session.prior, session.hyperparameters,
        budget=SearchBudget(None, 5), node_stats=session.node_stats,
    )
    session.solution = solution
    session.trace = trace
    text = save_solution(session)
    load_solution(session, text)
    identical = save_solution(session) == text
    rescored = evaluate_cutset(
        CutSet(session.solution.cutset), session.dendrogram, session.dataset,
        session.prior, session.hyperparameters, session.node_stats,
    )
    rel = abs(rescored.si - session.solution.si) / max(abs(session.solution.si), 1e-300)
    report(
        "Serialization",
        identical and rel < 1e-9,
        f"byte-identical: {identical}, re-score relative error {rel:.2e}",
    )
