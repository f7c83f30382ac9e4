"""Command line front-end: single runs, hyperparameter sweeps, benchmarks, serving."""

from __future__ import annotations

import csv
from pathlib import Path

import click

from .ingestion import (
    IngestionError,
    build_session,
    load_dataset,
    load_embedding,
    pca_embedding,
    save_solution,
)
from .model import BooleanStat, Hyperparameters, Linkage
from .search import SearchBudget, greedy_search


def _nonnegative(ctx, param, value):
    if value is not None and value < 0:
        raise click.BadParameter("must be >= 0")
    return value


def _at_least_one(ctx, param, value):
    if value is not None and value < 1:
        raise click.BadParameter("must be >= 1")
    return value


def _positive(ctx, param, value):
    if value is not None and value <= 0:
        raise click.BadParameter("must be > 0")
    return value


def _float_list(ctx, param, value):
    try:
        items = [float(v) for v in str(value).split(",") if v.strip() != ""]
    except ValueError:
        raise click.BadParameter("expected a comma-separated list of numbers")
    if not items:
        raise click.BadParameter("list cannot be empty")
    return items


def _load_inputs(data_path, embedding_path, use_pca, linkage, epsilon):
    try:
        dataset = load_dataset(Path(data_path))
        if use_pca:
            embedding = pca_embedding(dataset)
        elif embedding_path:
            embedding = load_embedding(Path(embedding_path), dataset.n)
        else:
            raise click.UsageError("provide --embedding FILE or --pca")
        hp = Hyperparameters(linkage=Linkage(linkage), epsilon=epsilon)
        return build_session(dataset, embedding, hp)
    except IngestionError as exc:
        raise click.ClickException(str(exc))


def _search(session, alpha, beta, time_limit_ms, iteration_cap):
    hp = session.hyperparameters.with_updates(
        alpha=alpha, beta=beta, time_budget_ms=time_limit_ms
    )
    session.hyperparameters = hp
    budget = SearchBudget.from_time_ms(time_limit_ms, iteration_cap)
    solution, trace = greedy_search(
        session.dendrogram,
        session.dataset,
        session.prior,
        hp,
        budget=budget,
        node_stats=session.node_stats,
    )
    session.solution = solution
    session.trace = trace
    return solution, trace


def _format_report(session) -> str:
    solution = session.solution
    dataset = session.dataset
    prior = session.prior
    lines = [
        f"clusters: {solution.k}   attributes: {solution.n_attributes}   "
        f"information: {solution.total_information:.3f} bits·points",
        f"interestingness: {solution.si:.6f}   iterations: {solution.iterations_completed}",
        "",
    ]
    for idx, (node, pattern) in enumerate(zip(solution.cutset, solution.patterns)):
        share = 100.0 * pattern.size / dataset.n
        lines.append(f"cluster {idx} (node {node}): {pattern.size} points ({share:.1f}%)")
        for j, stat in zip(pattern.attributes, pattern.statistics):
            name = dataset.attribute_names[j]
            prior_stat = prior.stats[j]
            if isinstance(stat, BooleanStat):
                lines.append(
                    f"  {name}: frequency {stat.frequency:.4f} vs {prior_stat.frequency:.4f} overall"
                )
            else:
                lines.append(
                    f"  {name}: mean {stat.mean:.4f} (sd {stat.stdev:.4f})"
                    f" vs {prior_stat.mean:.4f} (sd {prior_stat.stdev:.4f}) overall"
                )
        lines.append("")
    return "\n".join(lines)


@click.group()
def main():
    """Interpretable clustering of 2D-embedded data."""


@main.command()
@click.option("--data", "data_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--embedding", "embedding_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--pca", "use_pca", is_flag=True, help="Derive the embedding with PCA.")
@click.option("--alpha", type=float, required=True, callback=_nonnegative)
@click.option("--beta", type=float, required=True, callback=_at_least_one)
@click.option("--time-limit", "time_limit_ms", type=float, required=True, callback=_positive)
@click.option("--linkage", type=click.Choice(["single", "complete", "average"]), default="single")
@click.option("--iteration-cap", type=int, default=None, callback=_at_least_one)
@click.option("--epsilon", type=float, default=1e-4, callback=_positive)
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
def run(data_path, embedding_path, use_pca, alpha, beta, time_limit_ms, linkage,
        iteration_cap, epsilon, out_path):
    """Run one search and write the solution document plus a readable report."""
    session = _load_inputs(data_path, embedding_path, use_pca, linkage, epsilon)
    solution, trace = _search(session, alpha, beta, time_limit_ms, iteration_cap)
    out = Path(out_path)
    out.write_text(save_solution(session), encoding="utf-8")
    report = _format_report(session)
    Path(str(out) + ".report.txt").write_text(report, encoding="utf-8")
    click.echo(report)
    if trace.expired:
        click.echo("note: time budget expired before the search exhausted its candidates")
    click.echo(f"solution document written to {out}")


@main.command()
@click.option("--data", "data_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--embedding", "embedding_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--pca", "use_pca", is_flag=True)
@click.option("--alpha-grid", required=True, callback=_float_list)
@click.option("--beta-grid", required=True, callback=_float_list)
@click.option("--time-limit", "time_limit_ms", type=float, required=True, callback=_positive)
@click.option("--linkage", type=click.Choice(["single", "complete", "average"]), default="single")
@click.option("--iteration-cap", type=int, default=None, callback=_at_least_one)
@click.option("--epsilon", type=float, default=1e-4, callback=_positive)
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
def sweep(data_path, embedding_path, use_pca, alpha_grid, beta_grid, time_limit_ms,
          linkage, iteration_cap, epsilon, out_path):
    """Search every (alpha, beta) grid cell, reusing one dendrogram throughout."""
    for a in alpha_grid:
        if a < 0:
            raise click.BadParameter("alpha values must be >= 0", param_hint="--alpha-grid")
    for b in beta_grid:
        if b < 1:
            raise click.BadParameter("beta values must be >= 1", param_hint="--beta-grid")
    session = _load_inputs(data_path, embedding_path, use_pca, linkage, epsilon)
    rows = []
    for a in alpha_grid:
        for b in beta_grid:
            solution, _ = _search(session, a, b, time_limit_ms, iteration_cap)
            rows.append(
                {
                    "alpha": a,
                    "beta": b,
                    "k": solution.k,
                    "n_attributes": solution.n_attributes,
                    "information": solution.total_information,
                }
            )
            click.echo(
                f"alpha={a:g} beta={b:g}: k={solution.k}"
                f" attributes={solution.n_attributes}"
                f" information={solution.total_information:.3f}"
            )
    _write_csv(out_path, ["alpha", "beta", "k", "n_attributes", "information"], rows)
    click.echo(f"sweep table written to {out_path}")


@main.command()
@click.option("--data", "data_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--embedding", "embedding_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--pca", "use_pca", is_flag=True)
@click.option("--time-limits", required=True, callback=_float_list)
@click.option("--alpha", type=float, default=250.0, callback=_nonnegative)
@click.option("--beta", type=float, default=1.6, callback=_at_least_one)
@click.option("--linkage", type=click.Choice(["single", "complete", "average"]), default="single")
@click.option("--epsilon", type=float, default=1e-4, callback=_positive)
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
def bench(data_path, embedding_path, use_pca, time_limits, alpha, beta, linkage,
          epsilon, out_path):
    """Measure how many search iterations fit into each time limit."""
    for limit in time_limits:
        if limit <= 0:
            raise click.BadParameter("time limits must be > 0", param_hint="--time-limits")
    session = _load_inputs(data_path, embedding_path, use_pca, linkage, epsilon)
    rows = []
    for limit in time_limits:
        _, trace = _search(session, alpha, beta, limit, None)
        rows.append(
            {
                "n": session.dataset.n,
                "m": session.dataset.m,
                "time_limit_ms": limit,
                "iterations": trace.iterations,
                "expired": int(trace.expired),
            }
        )
        click.echo(
            f"limit={limit:g}ms: iterations={trace.iterations} expired={trace.expired}"
        )
    _write_csv(out_path, ["n", "m", "time_limit_ms", "iterations", "expired"], rows)
    click.echo(f"benchmark table written to {out_path}")


@main.command()
@click.option("--host", default="127.0.0.1", envvar="DENDROCUT_HOST", show_default=True)
@click.option("--port", type=int, default=8000, envvar="DENDROCUT_PORT", show_default=True)
@click.option("--session-dir", type=click.Path(file_okay=False), default=None,
              envvar="DENDROCUT_SESSION_DIR",
              help="Persist solution documents for each session here.")
@click.option("--linkage", type=click.Choice(["single", "complete", "average"]),
              default="single", envvar="DENDROCUT_LINKAGE",
              help="Default linkage for new sessions.")
@click.option("--frontend", "frontend_dir", type=click.Path(file_okay=False), default=None,
              envvar="DENDROCUT_FRONTEND",
              help="Serve this directory as the browser UI under /app.")
@click.option("--demo", is_flag=True, help="Create a planted-blob demo session at startup.")
def serve(host, port, session_dir, linkage, frontend_dir, demo):
    """Start the HTTP API (and optionally the browser UI)."""
    import uvicorn

    from .service import SessionStore, create_app

    store = SessionStore(session_dir)
    app = create_app(store, default_linkage=Linkage(linkage), frontend_dir=frontend_dir)
    if demo:
        from .fixtures import make_planted_blobs

        planted = make_planted_blobs()
        session = build_session(planted.dataset, planted.embedding, session_id="demo")
        store.add(session)
        click.echo("demo session ready: id 'demo'")
        if frontend_dir:
            click.echo(f"open http://{host}:{port}/app/?session=demo")
    uvicorn.run(app, host=host, port=port)


def _write_csv(path, fieldnames, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=fieldnames)
        writer.writeheader()
        writer.writerows(rows)


if __name__ == "__main__":
    main()
