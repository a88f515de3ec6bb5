"""Loading and writing the three dataset files.

Companies file (CSV or JSON): columns ``id``, ``industry``, optional
``knowledge``, then one column per feature per timestamp named
``<feature>@<t>`` with t counting from 0. Extra static columns are
allowed and ignored. Edges file: rows (supplier_id, customer_id, t).
Knowledge file: plain text applied to every agent.
"""

from __future__ import annotations

import csv
import io
import json
import re
from pathlib import Path
from typing import Iterable, Mapping

from .errors import (
    DuplicateEdge,
    FeatureOutOfRange,
    MissingFile,
    ParseError,
    SelfEdge,
    TimestampOutOfRange,
    UnknownCompanyInEdge,
)
from .model import CompanyRecord, Dataset, Edge, TemporalNetwork

_FEATURE_COL = re.compile(r"^(?P<name>.+)@(?P<t>\d+)$")
_RESERVED = ("id", "industry", "knowledge")

FEATURE_MIN = 0.0
FEATURE_MAX = 100.0


def default_labels(n: int) -> tuple[str, ...]:
    return tuple(f"Q{i + 1}" for i in range(n))


def _read_text(path: str | Path) -> str:
    p = Path(path)
    if not p.is_file():
        raise MissingFile(str(p))
    return p.read_text(encoding="utf-8")


def _sniff_json(text: str) -> bool:
    head = text.lstrip()[:1]
    return head in ("[", "{")


def load_dataset(
    companies_file: str | Path,
    edges_file: str | Path,
    knowledge_file: str | Path | None = None,
) -> Dataset:
    return dataset_from_strings(
        _read_text(companies_file),
        _read_text(edges_file),
        _read_text(knowledge_file) if knowledge_file is not None else "",
    )


def dataset_from_strings(companies_text: str, edges_text: str, knowledge_text: str) -> Dataset:
    """Parse the three file bodies; format (CSV vs JSON) is sniffed."""
    if _sniff_json(companies_text):
        rows = _company_rows_from_json(companies_text)
    else:
        rows = _company_rows_from_csv(companies_text)
    companies, feature_names, n_timestamps = _build_companies(rows)

    if _sniff_json(edges_text):
        edge_rows = _edge_rows_from_json(edges_text)
    else:
        edge_rows = _edge_rows_from_csv(edges_text)
    network = _build_network(edge_rows, set(companies), n_timestamps)

    return Dataset(
        companies=companies,
        network=network,
        feature_names=feature_names,
        labels=default_labels(n_timestamps),
        global_knowledge=knowledge_text.strip(),
    )


# --- companies --------------------------------------------------------------

def _company_rows_from_csv(text: str) -> list[tuple[int, dict[str, str]]]:
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None:
        raise ParseError("companies file is empty")
    rows = []
    for i, row in enumerate(reader):
        line = i + 2  # 1-based, after the header
        if None in row or any(v is None for v in row.values()):
            raise ParseError("ragged row", line=line)
        rows.append((line, row))
    if not rows:
        raise ParseError("companies file has a header but no rows")
    return rows


def _company_rows_from_json(text: str) -> list[tuple[int, dict]]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"companies JSON: {e}") from e
    if not isinstance(doc, list) or not doc:
        raise ParseError("companies JSON must be a non-empty list of row objects")
    rows = []
    for i, row in enumerate(doc):
        if not isinstance(row, dict):
            raise ParseError("companies JSON entries must be objects", line=i + 1)
        rows.append((i + 1, row))
    return rows


def _build_companies(
    rows: list[tuple[int, dict]],
) -> tuple[dict[str, CompanyRecord], tuple[str, ...], int]:
    # Feature columns define the shared feature set; require every
    # (feature, t) cell for t contiguous from 0.
    first_keys = list(rows[0][1].keys())
    feature_cols: dict[str, dict[int, str]] = {}
    for key in first_keys:
        m = _FEATURE_COL.match(key)
        if m and key not in _RESERVED:
            feature_cols.setdefault(m.group("name"), {})[int(m.group("t"))] = key
    if not feature_cols:
        raise ParseError("no <feature>@<t> columns found")

    n_by_feature = {name: max(ts) + 1 for name, ts in feature_cols.items()}
    n_timestamps = next(iter(n_by_feature.values()))
    for name, n in n_by_feature.items():
        if n != n_timestamps or set(feature_cols[name]) != set(range(n)):
            raise ParseError(
                f"feature {name!r} columns must cover t=0..{n_timestamps - 1} contiguously"
            )
    feature_names = tuple(feature_cols)

    companies: dict[str, CompanyRecord] = {}
    for line, row in rows:
        cid = str(row.get("id", "") or "").strip()
        if not cid:
            raise ParseError("empty company id", line=line)
        if cid in companies:
            raise ParseError(f"duplicate company id {cid!r}", line=line)
        industry = str(row.get("industry", "") or "").strip()
        if not industry:
            raise ParseError(f"company {cid!r} has no industry", line=line)
        knowledge = str(row.get("knowledge", "") or "").strip()
        vectors = []
        for t in range(n_timestamps):
            vec = {}
            for name in feature_names:
                col = feature_cols[name][t]
                if col not in row:
                    raise ParseError(f"company {cid!r} missing column {col!r}", line=line)
                try:
                    value = float(row[col])
                except (TypeError, ValueError):
                    raise ParseError(
                        f"company {cid!r} column {col!r}: not a number ({row[col]!r})",
                        line=line,
                    ) from None
                if not FEATURE_MIN <= value <= FEATURE_MAX:
                    raise FeatureOutOfRange(
                        f"company {cid!r} {name}@{t} = {value} outside "
                        f"[{FEATURE_MIN:g}, {FEATURE_MAX:g}]"
                    )
                vec[name] = value
            vectors.append(vec)
        companies[cid] = CompanyRecord(
            id=cid, industry=industry, features=tuple(vectors), knowledge=knowledge
        )
    return {cid: companies[cid] for cid in sorted(companies)}, feature_names, n_timestamps


# --- edges ------------------------------------------------------------------

def _edge_rows_from_csv(text: str) -> list[tuple[int, str, str, str]]:
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError("edges file is empty") from None
    if [h.strip() for h in header] != ["supplier_id", "customer_id", "t"]:
        raise ParseError("edges header must be supplier_id,customer_id,t", line=1)
    rows = []
    for i, row in enumerate(reader):
        if not row:
            continue
        if len(row) != 3:
            raise ParseError("edge rows need exactly 3 fields", line=i + 2)
        rows.append((i + 2, row[0].strip(), row[1].strip(), row[2].strip()))
    return rows


def _edge_rows_from_json(text: str) -> list[tuple[int, str, str, str]]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"edges JSON: {e}") from e
    if not isinstance(doc, list):
        raise ParseError("edges JSON must be a list")
    rows = []
    for i, entry in enumerate(doc):
        if isinstance(entry, dict):
            try:
                rows.append((i + 1, str(entry["supplier_id"]), str(entry["customer_id"]), str(entry["t"])))
            except KeyError as e:
                raise ParseError(f"edge entry missing {e}", line=i + 1) from None
        elif isinstance(entry, (list, tuple)) and len(entry) == 3:
            rows.append((i + 1, str(entry[0]), str(entry[1]), str(entry[2])))
        else:
            raise ParseError("edge entries must be objects or 3-element lists", line=i + 1)
    return rows


def _build_network(
    rows: Iterable[tuple[int, str, str, str]],
    known_ids: set[str],
    n_timestamps: int,
) -> TemporalNetwork:
    per_t: list[set[Edge]] = [set() for _ in range(n_timestamps)]
    for line, supplier, customer, t_text in rows:
        try:
            t = int(t_text)
        except ValueError:
            raise ParseError(f"edge timestamp {t_text!r} is not an integer", line=line) from None
        if not 0 <= t < n_timestamps:
            raise TimestampOutOfRange(f"edge at line {line}: t={t} outside 0..{n_timestamps - 1}")
        for cid in (supplier, customer):
            if cid not in known_ids:
                raise UnknownCompanyInEdge(f"edge at line {line}: unknown company {cid!r}")
        if supplier == customer:
            raise SelfEdge(f"edge at line {line}: {supplier!r} supplies itself")
        edge = (supplier, customer)
        if edge in per_t[t]:
            raise DuplicateEdge(f"edge at line {line}: duplicate {edge} at t={t}")
        per_t[t].add(edge)
    return TemporalNetwork(edges_by_t=tuple(frozenset(s) for s in per_t))


# --- serialization ----------------------------------------------------------

def companies_to_csv(dataset: Dataset) -> str:
    cols = ["id", "industry", "knowledge"]
    for name in dataset.feature_names:
        cols.extend(f"{name}@{t}" for t in range(dataset.n_timestamps))
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(cols)
    for cid, rec in dataset.companies.items():
        row = [cid, rec.industry, rec.knowledge]
        for name in dataset.feature_names:
            row.extend(repr(rec.features[t][name]) for t in range(dataset.n_timestamps))
        writer.writerow(row)
    return out.getvalue()


def edges_to_csv(dataset: Dataset) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["supplier_id", "customer_id", "t"])
    for t, edges in enumerate(dataset.network.edges_by_t):
        for supplier, customer in sorted(edges):
            writer.writerow([supplier, customer, t])
    return out.getvalue()


def write_dataset(dataset: Dataset, directory: str | Path) -> dict[str, Path]:
    """Write companies.csv, edges.csv, knowledge.txt into ``directory``."""
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    paths = {
        "companies": d / "companies.csv",
        "edges": d / "edges.csv",
        "knowledge": d / "knowledge.txt",
    }
    paths["companies"].write_text(companies_to_csv(dataset), encoding="utf-8")
    paths["edges"].write_text(edges_to_csv(dataset), encoding="utf-8")
    paths["knowledge"].write_text(dataset.global_knowledge + "\n", encoding="utf-8")
    return paths


def dataset_to_doc(dataset: Dataset) -> dict:
    """JSON-safe document equivalent of the three files (used in exports)."""
    return {
        "companies": [
            {
                "id": cid,
                "industry": rec.industry,
                "knowledge": rec.knowledge,
                **{
                    f"{name}@{t}": rec.features[t][name]
                    for name in dataset.feature_names
                    for t in range(dataset.n_timestamps)
                },
            }
            for cid, rec in dataset.companies.items()
        ],
        "edges": [
            {"supplier_id": s, "customer_id": c, "t": t}
            for t, edges in enumerate(dataset.network.edges_by_t)
            for s, c in sorted(edges)
        ],
        "knowledge": dataset.global_knowledge,
        "feature_names": list(dataset.feature_names),
        "labels": list(dataset.labels),
    }


def dataset_from_doc(doc: Mapping) -> Dataset:
    ds = dataset_from_strings(
        json.dumps(doc["companies"]),
        json.dumps(doc["edges"]),
        doc.get("knowledge", ""),
    )
    # Restore the original feature/label ordering lost to JSON round-tripping.
    names = tuple(doc.get("feature_names", ds.feature_names))
    labels = tuple(doc.get("labels", ds.labels))
    if set(names) != set(ds.feature_names) or len(labels) != ds.n_timestamps:
        raise ParseError("dataset document metadata is inconsistent with its rows")
    return Dataset(
        companies=ds.companies,
        network=ds.network,
        feature_names=names,
        labels=labels,
        global_knowledge=ds.global_knowledge,
    )
