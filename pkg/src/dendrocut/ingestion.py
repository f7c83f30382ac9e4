"""Dataset and embedding loading, schema inference, PCA fallback, persistence.

Delimited text goes in (comma default, tab accepted, header row mandatory),
validated immutable model objects come out. Row order is point identity.
Solution documents are canonical JSON: sorted keys, floats at 17 significant
digits, so load-then-save is byte identical.
"""

from __future__ import annotations

import hashlib
import json
import secrets
import time
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Mapping

import numpy as np

from .hierarchy import Dendrogram, build_dendrogram
from .model import (
    AttributeType,
    BooleanStat,
    ClusteringSolution,
    Dataset,
    Embedding,
    BiclusterPattern,
    Hyperparameters,
    Linkage,
    PriorModel,
    RealStat,
    fit_prior,
)
from .search import IterationRecord, NodeStatistics, SearchTrace

DOCUMENT_VERSION = 1

#: Values treated as missing; any occurrence rejects the file.
MISSING_TOKENS = frozenset({"", "na", "n/a", "nan", "null", "none", "?"})
_TRUE_TOKENS = frozenset({"1", "true", "yes"})
_FALSE_TOKENS = frozenset({"0", "false", "no"})

#: Soft scale guidance; loading larger data only warns.
POINT_WARN_THRESHOLD = 100_000
ATTRIBUTE_WARN_THRESHOLD = 500

DECLARED_TYPES = ("boolean", "real", "categorical", "ignore")


class IngestionError(ValueError):
    """Malformed or inconsistent input data."""


@dataclass(frozen=True)
class SchemaSpec:
    """Declared column types; columns not listed fall back to inference."""

    columns: tuple[tuple[str, str], ...]

    def __post_init__(self):
        names = [name for name, _ in self.columns]
        if len(set(names)) != len(names):
            raise IngestionError("schema lists a column more than once")
        for name, declared in self.columns:
            if declared not in DECLARED_TYPES:
                raise IngestionError(
                    f"column {name!r}: unknown type {declared!r}, expected one of {DECLARED_TYPES}"
                )
        object.__setattr__(self, "columns", tuple((str(n), d) for n, d in self.columns))

    @classmethod
    def from_mapping(cls, mapping: Mapping[str, str]) -> "SchemaSpec":
        return cls(tuple(mapping.items()))

    def declared_for(self, name: str) -> str | None:
        for col, declared in self.columns:
            if col == name:
                return declared
        return None


def _read_text(source: str | Path | IO[str]) -> str:
    if isinstance(source, Path):
        return source.read_text(encoding="utf-8")
    if isinstance(source, str):
        if "\n" in source or "\r" in source:
            return source
        return Path(source).read_text(encoding="utf-8")
    return source.read()


def _split_rows(text: str) -> list[list[str]]:
    import csv

    lines = [line for line in text.splitlines() if line.strip() != ""]
    if not lines:
        raise IngestionError("input is empty")
    delimiter = "\t" if lines[0].count("\t") > lines[0].count(",") else ","
    return list(csv.reader(lines, delimiter=delimiter))


def _is_number(token: str) -> bool:
    try:
        float(token)
        return True
    except ValueError:
        return False


def load_dataset(
    source: str | Path | IO[str], schema: SchemaSpec | Mapping[str, str] | str = "infer"
) -> Dataset:
    """Load a delimited table with a header row into a typed Dataset.

    ``source`` may be a path, a file object, or the raw text itself.
    Column types come from ``schema`` where given and are inferred
    otherwise: numeric columns are real; non-numeric columns with at most
    two distinct values are boolean, with more they are categorical.
    Categorical columns expand one-hot into "col=value" boolean attributes;
    a two-valued column keeps a single indicator for its lexicographically
    second value (the first value encodes 0).
    """
    if isinstance(schema, Mapping):
        schema = SchemaSpec.from_mapping(schema)
    elif isinstance(schema, str):
        if schema != "infer":
            raise IngestionError(f"schema must be a SchemaSpec, a mapping, or 'infer', got {schema!r}")
        schema = None

    rows = _split_rows(_read_text(source))
    header = [h.strip() for h in rows[0]]
    if len(set(header)) != len(header):
        raise IngestionError("header contains duplicate column names")
    data_rows = rows[1:]
    if len(data_rows) < 2:
        raise IngestionError(f"need at least 2 data rows, got {len(data_rows)}")
    for r, row in enumerate(data_rows, start=2):
        if len(row) != len(header):
            raise IngestionError(f"row {r} has {len(row)} fields, header has {len(header)}")

    missing = [
        (r, header[c])
        for r, row in enumerate(data_rows, start=2)
        for c, value in enumerate(row)
        if value.strip().lower() in MISSING_TOKENS
    ]
    if missing:
        head = ", ".join(f"row {r} column {name!r}" for r, name in missing[:5])
        raise IngestionError(f"missing values at {head}" + (" ..." if len(missing) > 5 else ""))

    if schema is not None:
        unknown = [name for name, _ in schema.columns if name not in header]
        if unknown:
            raise IngestionError(f"schema names columns not in the header: {unknown}")

    columns: list[np.ndarray] = []
    out_schema: list[tuple[str, AttributeType]] = []
    for c, name in enumerate(header):
        raw = [row[c].strip() for row in data_rows]
        declared = schema.declared_for(name) if schema is not None else None
        if declared == "ignore":
            continue
        if declared is None:
            declared = _infer_column_type(raw)
        if declared == "real":
            columns.append(_parse_real(name, raw))
            out_schema.append((name, AttributeType.REAL))
        elif declared == "boolean":
            for col_name, values in _encode_boolean(name, raw):
                columns.append(values)
                out_schema.append((col_name, AttributeType.BOOLEAN))
        else:
            for col_name, values in _encode_categorical(name, raw):
                columns.append(values)
                out_schema.append((col_name, AttributeType.BOOLEAN))

    if not columns:
        raise IngestionError("no usable columns after applying the schema")
    values = np.column_stack(columns)
    if values.shape[0] > POINT_WARN_THRESHOLD:
        warnings.warn(f"dataset has {values.shape[0]} points; expect slow searches", stacklevel=2)
    if values.shape[1] > ATTRIBUTE_WARN_THRESHOLD:
        warnings.warn(f"dataset has {values.shape[1]} attributes; expect slow searches", stacklevel=2)
    return Dataset(values, tuple(out_schema))


def _infer_column_type(raw: list[str]) -> str:
    if all(_is_number(v) for v in raw):
        return "real"
    distinct = set(raw)
    return "boolean" if len(distinct) <= 2 else "categorical"


def _parse_real(name: str, raw: list[str]) -> np.ndarray:
    out = np.empty(len(raw))
    for i, v in enumerate(raw):
        if not _is_number(v):
            raise IngestionError(f"row {i + 2} column {name!r}: {v!r} is not numeric")
        out[i] = float(v)
    return out


def _encode_boolean(name: str, raw: list[str]) -> list[tuple[str, np.ndarray]]:
    lowered = [v.lower() for v in raw]
    if all(v in _TRUE_TOKENS or v in _FALSE_TOKENS for v in lowered):
        return [(name, np.array([1.0 if v in _TRUE_TOKENS else 0.0 for v in lowered]))]
    if all(_is_number(v) for v in raw):
        values = np.array([float(v) for v in raw])
        if np.all((values == 0.0) | (values == 1.0)):
            return [(name, values)]
        raise IngestionError(f"column {name!r}: numeric boolean values must be 0 or 1")
    distinct = sorted(set(raw))
    if len(distinct) == 2:
        return _encode_categorical(name, raw)
    raise IngestionError(
        f"column {name!r}: boolean columns accept 0/1/true/false/yes/no or exactly two values"
    )


def _encode_categorical(name: str, raw: list[str]) -> list[tuple[str, np.ndarray]]:
    distinct = sorted(set(raw))
    if len(distinct) < 2:
        raise IngestionError(f"column {name!r} is constant; drop it or declare it 'ignore'")
    if len(distinct) == 2:
        # one indicator suffices; charging two statistics for complementary
        # columns would double-count the same information
        positive = distinct[1]
        return [(f"{name}={positive}", np.array([1.0 if v == positive else 0.0 for v in raw]))]
    return [
        (f"{name}={value}", np.array([1.0 if v == value else 0.0 for v in raw]))
        for value in distinct
    ]


def load_embedding(source: str | Path | IO[str], n_expected: int) -> Embedding:
    """Load 2D coordinates, one row per dataset point, in dataset row order."""
    rows = _split_rows(_read_text(source))
    if rows and not all(_is_number(v) for v in rows[0]):
        rows = rows[1:]  # header row, e.g. "x,y"
    if not rows:
        raise IngestionError("embedding file has no data rows")
    width = len(rows[0])
    if width != 2:
        raise IngestionError(f"embedding must have exactly 2 columns, got {width}")
    coords = np.empty((len(rows), 2))
    for i, row in enumerate(rows):
        if len(row) != 2:
            raise IngestionError(f"embedding row {i + 1} has {len(row)} fields, expected 2")
        for c in range(2):
            if not _is_number(row[c]):
                raise IngestionError(f"embedding row {i + 1}: {row[c]!r} is not numeric")
            coords[i, c] = float(row[c])
    if len(rows) != n_expected:
        raise IngestionError(f"embedding has {len(rows)} rows, dataset has {n_expected} points")
    if not np.isfinite(coords).all():
        raise IngestionError("embedding contains non-finite coordinates")
    return Embedding(coords)


def pca_embedding(dataset: Dataset) -> Embedding:
    """First two principal components of the z-scored data, as a fallback embedding.

    Sign convention: each component's largest-magnitude loading is positive,
    so the result is deterministic.
    """
    if dataset.m < 2:
        raise IngestionError("PCA fallback needs at least 2 attributes")
    values = dataset.values
    mean = values.mean(axis=0)
    std = values.std(axis=0)
    std = np.where(std == 0.0, 1.0, std)
    z = (values - mean) / std
    u, s, vt = np.linalg.svd(z, full_matrices=False)
    for comp in range(2):
        lead = np.argmax(np.abs(vt[comp]))
        if vt[comp, lead] < 0:
            vt[comp] = -vt[comp]
            u[:, comp] = -u[:, comp]
    return Embedding(u[:, :2] * s[:2])


# ---------------------------------------------------------------------------
# Sessions and solution documents


@dataclass
class Session:
    """One analysis context: data, embedding, dendrogram, prior, current solution."""

    id: str
    dataset: Dataset
    embedding: Embedding
    dendrogram: Dendrogram
    prior: PriorModel
    node_stats: NodeStatistics
    hyperparameters: Hyperparameters
    solution: ClusteringSolution | None = None
    trace: SearchTrace | None = None
    created_at: float = field(default_factory=time.time)


def build_session(
    dataset: Dataset,
    embedding: Embedding,
    hp: Hyperparameters | None = None,
    session_id: str | None = None,
) -> Session:
    """Validate the pairing and precompute everything the searches reuse."""
    hp = hp or Hyperparameters()
    if embedding.n != dataset.n:
        raise IngestionError(
            f"embedding has {embedding.n} rows, dataset has {dataset.n} points"
        )
    dendrogram = build_dendrogram(embedding, hp.linkage)
    prior = fit_prior(dataset, hp.epsilon)
    node_stats = NodeStatistics(dendrogram, dataset, prior)
    return Session(
        id=session_id or secrets.token_hex(8),
        dataset=dataset,
        embedding=embedding,
        dendrogram=dendrogram,
        prior=prior,
        node_stats=node_stats,
        hyperparameters=hp,
    )


def dataset_hash(dataset: Dataset) -> str:
    """Digest of schema and values; detects loading a solution against other data."""
    h = hashlib.sha256()
    h.update(repr([(name, kind.value) for name, kind in dataset.schema]).encode())
    h.update(str(dataset.n).encode())
    h.update(dataset.values.tobytes())
    return h.hexdigest()


def _canonical(value, out: list[str]) -> None:
    if value is None:
        out.append("null")
    elif value is True or value is False:
        out.append("true" if value else "false")
    elif isinstance(value, int):
        out.append(repr(value))
    elif isinstance(value, float):
        if not np.isfinite(value):
            raise ValueError("documents cannot contain non-finite numbers")
        out.append("0" if value == 0.0 else format(value, ".17g"))
    elif isinstance(value, str):
        out.append(json.dumps(value, ensure_ascii=False))
    elif isinstance(value, (list, tuple)):
        out.append("[")
        for i, item in enumerate(value):
            if i:
                out.append(",")
            _canonical(item, out)
        out.append("]")
    elif isinstance(value, dict):
        out.append("{")
        for i, key in enumerate(sorted(value)):
            if i:
                out.append(",")
            out.append(json.dumps(str(key), ensure_ascii=False))
            out.append(":")
            _canonical(value[key], out)
        out.append("}")
    else:
        raise TypeError(f"cannot serialize {type(value).__name__}")


def canonical_json(document: dict) -> str:
    """Serialize with sorted keys and floats at 17 significant digits."""
    out: list[str] = []
    _canonical(document, out)
    return "".join(out) + "\n"


def _statistic_to_doc(stat) -> dict:
    if isinstance(stat, BooleanStat):
        return {"type": "boolean", "frequency": float(stat.frequency)}
    return {"type": "real", "mean": float(stat.mean), "stdev": float(stat.stdev)}


def _statistic_from_doc(doc: dict):
    if doc["type"] == "boolean":
        return BooleanStat(float(doc["frequency"]))
    if doc["type"] == "real":
        return RealStat(float(doc["mean"]), float(doc["stdev"]))
    raise IngestionError(f"unknown statistic type {doc.get('type')!r}")


def solution_document(session: Session) -> dict:
    """Self-describing snapshot of the session's current solution."""
    hp = session.hyperparameters
    doc: dict = {
        "version": DOCUMENT_VERSION,
        "schema_hash": dataset_hash(session.dataset),
        "hyperparameters": {
            "alpha": float(hp.alpha),
            "beta": float(hp.beta),
            "time_budget_ms": float(hp.time_budget_ms),
            "linkage": hp.linkage.value,
            "epsilon": float(hp.epsilon),
            "min_cluster_size": int(hp.min_cluster_size),
        },
    }
    solution = session.solution
    if solution is None:
        doc.update({"cutset": None, "labels": None, "patterns": None, "scores": None})
    else:
        labels = solution.labels()
        doc["cutset"] = [int(v) for v in solution.cutset]
        doc["labels"] = [int(v) for v in labels]
        doc["patterns"] = [
            {
                "node": int(node),
                "size": pattern.size,
                "attributes": [int(j) for j in pattern.attributes],
                "statistics": [_statistic_to_doc(s) for s in pattern.statistics],
            }
            for node, pattern in zip(solution.cutset, solution.patterns)
        ]
        doc["scores"] = {
            "information": float(solution.total_information),
            "complexity": float(solution.complexity),
            "si": float(solution.si),
            "iterations": int(solution.iterations_completed),
        }
    trace = session.trace
    if trace is None:
        doc["trace"] = None
    else:
        doc["trace"] = {
            "expired": bool(trace.expired),
            "records": [
                {"k": r.k, "si": float(r.si), "elapsed_ms": float(r.elapsed_s * 1000.0)}
                for r in trace.records
            ],
        }
    return doc


def save_solution(session: Session) -> str:
    return canonical_json(solution_document(session))


def load_solution(session: Session, text: str) -> ClusteringSolution | None:
    """Parse a solution document, validate it against the session, apply it."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise IngestionError(f"not a valid solution document: {exc}") from exc
    if doc.get("version") != DOCUMENT_VERSION:
        raise IngestionError(
            f"document version {doc.get('version')!r} does not match {DOCUMENT_VERSION}"
        )
    if doc.get("schema_hash") != dataset_hash(session.dataset):
        raise IngestionError("document was produced from a different dataset")

    hp_doc = doc["hyperparameters"]
    hp = Hyperparameters(
        alpha=float(hp_doc["alpha"]),
        beta=float(hp_doc["beta"]),
        time_budget_ms=float(hp_doc["time_budget_ms"]),
        linkage=Linkage(hp_doc["linkage"]),
        epsilon=float(hp_doc["epsilon"]),
        min_cluster_size=int(hp_doc["min_cluster_size"]),
    )
    session.hyperparameters = hp

    if doc.get("cutset") is None:
        session.solution = None
        session.trace = _trace_from_doc(doc.get("trace"))
        return None

    labels = doc["labels"]
    if len(labels) != session.dataset.n:
        raise IngestionError("document labels do not match the dataset size")
    patterns = []
    for idx, pattern_doc in enumerate(doc["patterns"]):
        points = frozenset(i for i, lab in enumerate(labels) if lab == idx)
        patterns.append(
            BiclusterPattern(
                points,
                tuple(int(j) for j in pattern_doc["attributes"]),
                tuple(_statistic_from_doc(s) for s in pattern_doc["statistics"]),
            )
        )
    scores = doc["scores"]
    solution = ClusteringSolution(
        tuple(int(v) for v in doc["cutset"]),
        tuple(patterns),
        float(scores["information"]),
        float(scores["complexity"]),
        float(scores["si"]),
        int(scores["iterations"]),
    )
    session.solution = solution
    session.trace = _trace_from_doc(doc.get("trace"))
    return solution


def _trace_from_doc(doc: dict | None) -> SearchTrace | None:
    if doc is None:
        return None
    records = tuple(
        IterationRecord(int(r["k"]), float(r["si"]), float(r["elapsed_ms"]) / 1000.0)
        for r in doc["records"]
    )
    return SearchTrace(records, bool(doc["expired"]))
