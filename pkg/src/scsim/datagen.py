"""Deterministic synthetic dataset for demos and desk-scale runs.

Not a statistical model of any real network: feature trajectories are
clamped random walks and the edge churn is a small seeded shuffle, which
is enough to exercise every pipeline stage end to end.
"""

from __future__ import annotations

import numpy as np

from .ingest import default_labels
from .model import CompanyRecord, Dataset, Edge, TemporalNetwork

INDUSTRIES = (
    "paper packaging",
    "raw materials",
    "printing equipment",
    "specialty food",
    "consumer electronics",
    "media products",
    "logistics",
)

FEATURES = ("operation", "technology", "reputation")

_KNOWLEDGE_SNIPPETS = (
    "Long-term contracts favored; slow to switch partners.",
    "Aggressively expanding into adjacent markets this year.",
    "Recent quality audit flagged delivery delays.",
    "Family-run firm, decisions concentrated in one office.",
)


def make_demo_dataset(
    n_firms: int = 35,
    n_timestamps: int = 8,
    seed: int = 7,
    global_knowledge: str = "Regional demand for packaged goods is seasonal and peaks in Q4.",
) -> Dataset:
    rng = np.random.default_rng(seed)

    codes = rng.choice(np.arange(1000, 10000), size=n_firms, replace=False)
    ids = sorted(f"C{code:04d}" for code in codes)
    industries = {cid: INDUSTRIES[int(rng.integers(len(INDUSTRIES)))] for cid in ids}

    companies = {}
    for i, cid in enumerate(ids):
        start = rng.uniform(30.0, 80.0, size=len(FEATURES))
        walk = np.cumsum(rng.normal(0.0, 4.0, size=(n_timestamps, len(FEATURES))), axis=0)
        values = np.clip(start + walk, 0.0, 100.0)
        vectors = tuple(
            {name: round(float(values[t, j]), 2) for j, name in enumerate(FEATURES)}
            for t in range(n_timestamps)
        )
        knowledge = _KNOWLEDGE_SNIPPETS[i] if i < len(_KNOWLEDGE_SNIPPETS) else ""
        companies[cid] = CompanyRecord(
            id=cid, industry=industries[cid], features=vectors, knowledge=knowledge
        )

    edges = set()
    for cid in ids:
        others = [o for o in ids if o != cid]
        n_sup = int(rng.integers(1, 4))
        for o in rng.choice(others, size=n_sup, replace=False):
            edges.add((str(o), cid))

    edges_by_t: list[frozenset[Edge]] = [frozenset(edges)]
    for _ in range(1, n_timestamps):
        current = set(edges_by_t[-1])
        # churn: drop a couple of edges, add a couple of new ones
        for edge in sorted(current):
            if rng.random() < 0.06:
                current.discard(edge)
        for _ in range(int(rng.integers(1, 4))):
            s, c = rng.choice(ids, size=2, replace=False)
            current.add((str(s), str(c)))
        edges_by_t.append(frozenset(current))

    return Dataset(
        companies=companies,
        network=TemporalNetwork(edges_by_t=tuple(edges_by_t)),
        feature_names=FEATURES,
        labels=default_labels(n_timestamps),
        global_knowledge=global_knowledge,
    )
