"""HTTP API: sessions, search runs, and explanation views for interactive clients.

Searches with budgets above a threshold run on a background thread and the
endpoint answers 202; clients poll the status endpoint and refetch. Solution
publication is atomic: readers see the old or the new solution, never a mix.
"""

from __future__ import annotations

import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal

from fastapi import FastAPI, HTTPException, Response
from pydantic import BaseModel, ConfigDict, Field

from .infotheory import attribute_divergence
from .ingestion import (
    IngestionError,
    Session,
    build_session,
    load_dataset,
    load_embedding,
    pca_embedding,
    save_solution,
)
from .model import BooleanStat, Hyperparameters, Linkage
from .search import SearchBudget, greedy_search, refine

#: Budgets at or below this run inline; longer ones answer 202 and poll.
BLOCKING_BUDGET_MS = 2000.0


class SessionRequest(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    dataset: str
    embedding: str = "pca"  # raw delimited text, or the literal "pca"
    schema_: dict[str, str] | None = Field(default=None, alias="schema")
    linkage: Literal["single", "complete", "average"] | None = None
    epsilon: float = Field(default=1e-4, gt=0)


class SearchRequest(BaseModel):
    alpha: float = Field(ge=0, le=1000)
    beta: float = Field(ge=1, le=2)
    time_budget_ms: float = Field(gt=0, le=600_000)
    iteration_cap: int | None = Field(default=None, ge=1)
    min_cluster_size: int = Field(default=1, ge=1)


@dataclass
class SessionState:
    session: Session
    lock: threading.Lock = field(default_factory=threading.Lock)
    running: bool = False
    progress_iterations: int = 0
    started_at: float = 0.0


class SessionStore:
    """In-memory sessions with optional directory-backed solution documents."""

    def __init__(self, persist_dir: str | Path | None = None):
        self._states: dict[str, SessionState] = {}
        self._lock = threading.Lock()
        self.persist_dir = Path(persist_dir) if persist_dir else None
        if self.persist_dir:
            self.persist_dir.mkdir(parents=True, exist_ok=True)

    def add(self, session: Session) -> SessionState:
        state = SessionState(session)
        with self._lock:
            self._states[session.id] = state
        return state

    def get(self, session_id: str) -> SessionState:
        with self._lock:
            state = self._states.get(session_id)
        if state is None:
            raise HTTPException(status_code=404, detail=f"unknown session {session_id!r}")
        return state

    def persist(self, session: Session) -> None:
        if self.persist_dir:
            path = self.persist_dir / f"{session.id}.json"
            path.write_text(save_solution(session), encoding="utf-8")


def _solution_summary(session: Session) -> dict:
    solution = session.solution
    assert solution is not None
    return {
        "k": solution.k,
        "n_attributes": solution.n_attributes,
        "information": solution.total_information,
        "cluster_sizes": [p.size for p in solution.patterns],
        "cluster_nodes": list(solution.cutset),
        "labels": solution.labels().tolist(),
        "iterations": solution.iterations_completed,
    }


def _explanation_view(session: Session, index: int) -> dict:
    solution = session.solution
    assert solution is not None
    pattern = solution.patterns[index]
    prior = session.prior
    attributes = []
    for j, stat in zip(pattern.attributes, pattern.statistics):
        prior_stat = prior.stats[j]
        if isinstance(stat, BooleanStat):
            cluster_doc = {"frequency": stat.frequency}
            prior_doc = {"frequency": prior_stat.frequency}
            kind = "boolean"
        else:
            cluster_doc = {"mean": stat.mean, "stdev": stat.stdev}
            prior_doc = {"mean": prior_stat.mean, "stdev": prior_stat.stdev}
            kind = "real"
        attributes.append(
            {
                "index": j,
                "name": session.dataset.attribute_names[j],
                "type": kind,
                "information": pattern.size * attribute_divergence(stat, prior_stat),
                "cluster": cluster_doc,
                "prior": prior_doc,
            }
        )
    return {
        "cluster": index,
        "node": solution.cutset[index],
        "size": pattern.size,
        "relative_size": pattern.size / session.dataset.n,
        "attributes": attributes,
    }


def create_app(
    store: SessionStore | None = None,
    default_linkage: Linkage = Linkage.SINGLE,
    frontend_dir: str | Path | None = None,
) -> FastAPI:
    store = store if store is not None else SessionStore()
    app = FastAPI(title="dendrocut", version="0.1.0")
    app.state.store = store

    @app.post("/sessions", status_code=201)
    def create_session(body: SessionRequest):
        try:
            dataset = load_dataset(body.dataset, body.schema_ or "infer")
            if body.embedding.strip().lower() == "pca":
                embedding = pca_embedding(dataset)
            else:
                embedding = load_embedding(body.embedding, dataset.n)
            linkage = Linkage(body.linkage) if body.linkage else default_linkage
            hp = Hyperparameters(linkage=linkage, epsilon=body.epsilon)
            session = build_session(dataset, embedding, hp)
        except IngestionError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        store.add(session)
        return {
            "id": session.id,
            "n": dataset.n,
            "m": dataset.m,
            "linkage": session.hyperparameters.linkage.value,
        }

    def _run_search(state: SessionState, body: SearchRequest, kind: str, response: Response):
        session = state.session
        with state.lock:
            if state.running:
                raise HTTPException(status_code=409, detail="a search is already running")
            if kind == "refine" and session.solution is None:
                raise HTTPException(status_code=409, detail="no current solution to refine")
            hp = session.hyperparameters.with_updates(
                alpha=body.alpha,
                beta=body.beta,
                time_budget_ms=body.time_budget_ms,
                min_cluster_size=body.min_cluster_size,
            )
            session.hyperparameters = hp
            state.running = True
            state.progress_iterations = 0
            state.started_at = time.monotonic()

        def work():
            budget = SearchBudget.from_time_ms(hp.time_budget_ms, body.iteration_cap)

            def on_progress(record):
                with state.lock:
                    state.progress_iterations = record.k

            try:
                if kind == "recalc":
                    solution, trace = greedy_search(
                        session.dendrogram,
                        session.dataset,
                        session.prior,
                        hp,
                        budget=budget,
                        node_stats=session.node_stats,
                        on_iteration=on_progress,
                    )
                else:
                    solution, trace = refine(
                        session.solution,
                        session.dendrogram,
                        session.dataset,
                        session.prior,
                        hp,
                        budget=budget,
                        node_stats=session.node_stats,
                        on_step=on_progress,
                    )
                with state.lock:
                    session.solution = solution
                    session.trace = trace
                store.persist(session)
            finally:
                with state.lock:
                    state.running = False

        if body.time_budget_ms > BLOCKING_BUDGET_MS:
            threading.Thread(target=work, daemon=True).start()
            response.status_code = 202
            return {"status": "running", "id": session.id}
        work()
        return _solution_summary(session)

    @app.post("/sessions/{session_id}/recalc")
    def recalc(session_id: str, body: SearchRequest, response: Response):
        return _run_search(store.get(session_id), body, "recalc", response)

    @app.post("/sessions/{session_id}/refine")
    def refine_endpoint(session_id: str, body: SearchRequest, response: Response):
        return _run_search(store.get(session_id), body, "refine", response)

    @app.get("/sessions/{session_id}/status")
    def status(session_id: str):
        state = store.get(session_id)
        with state.lock:
            elapsed = time.monotonic() - state.started_at if state.running else 0.0
            return {
                "running": state.running,
                "iterations": state.progress_iterations,
                "elapsed_ms": elapsed * 1000.0,
            }

    @app.get("/sessions/{session_id}/embedding")
    def embedding_view(session_id: str):
        state = store.get(session_id)
        session = state.session
        with state.lock:
            solution = session.solution
            labels = solution.labels().tolist() if solution is not None else None
            nodes = list(solution.cutset) if solution is not None else None
        return {
            "points": session.embedding.coords.tolist(),
            "labels": labels,
            "cluster_nodes": nodes,
        }

    @app.get("/sessions/{session_id}/explanations")
    def explanations(session_id: str):
        state = store.get(session_id)
        session = state.session
        with state.lock:
            if session.solution is None:
                raise HTTPException(status_code=409, detail="no solution yet; run recalc first")
            return {
                "summary": _solution_summary(session),
                "clusters": [
                    _explanation_view(session, i) for i in range(session.solution.k)
                ],
            }

    @app.get("/sessions/{session_id}/explanations/{cluster}")
    def explanation(session_id: str, cluster: int):
        state = store.get(session_id)
        session = state.session
        with state.lock:
            if session.solution is None:
                raise HTTPException(status_code=409, detail="no solution yet; run recalc first")
            if not 0 <= cluster < session.solution.k:
                raise HTTPException(
                    status_code=404,
                    detail=f"cluster {cluster} out of range for k={session.solution.k}",
                )
            return _explanation_view(session, cluster)

    if frontend_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/app", StaticFiles(directory=str(frontend_dir), html=True), name="app")

    return app
