"""Domain types: companies, the temporal network, datasets, timelines.

Edges are directed supplier -> customer pairs. Feature values live on a
0-100 scale and are sampled once per timestamp; a dataset carries the
observed history, a timeline extends it with simulated steps.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from typing import AbstractSet, Iterable, Mapping, Sequence

from .errors import EdgeAbsent, TimestampOutOfRange, UnknownCompany, UnknownFeature

CompanyId = str
Edge = tuple[CompanyId, CompanyId]
FeatureVector = Mapping[str, float]


@dataclass(frozen=True)
class Timestamp:
    index: int
    label: str


class Lifecycle(str, Enum):
    INITIATE = "initiate"
    MAINTAIN = "maintain"
    TERMINATE = "terminate"


@dataclass(frozen=True)
class CompanyRecord:
    """One firm: identity, sector, optional free-text knowledge, features.

    ``features`` holds one vector per observed timestamp, index-aligned
    with the dataset's timestamp labels.
    """

    id: CompanyId
    industry: str
    features: tuple[FeatureVector, ...]
    knowledge: str = ""


def suppliers_in(edges: Iterable[Edge], company_id: CompanyId) -> frozenset[CompanyId]:
    return frozenset(s for s, c in edges if c == company_id)


def customers_in(edges: Iterable[Edge], company_id: CompanyId) -> frozenset[CompanyId]:
    return frozenset(c for s, c in edges if s == company_id)


def partners_in(edges: Iterable[Edge], company_id: CompanyId) -> frozenset[CompanyId]:
    edges = list(edges)
    return suppliers_in(edges, company_id) | customers_in(edges, company_id)


def edge_lifecycle(edges_by_t: Sequence[AbstractSet[Edge]], edge: Edge, t: int) -> Lifecycle:
    """Lifecycle stage of ``edge`` at timestamp ``t`` within a run of snapshots.

    Initiate: absent at t-1 (or t is the first timestamp) and present at t.
    Terminate: present at t and absent at t+1; wins when both conditions
    hold (single-step edges). Maintain otherwise.
    """
    if not 0 <= t < len(edges_by_t):
        raise TimestampOutOfRange(f"t={t} outside 0..{len(edges_by_t) - 1}")
    if edge not in edges_by_t[t]:
        raise EdgeAbsent(f"edge {edge} not present at t={t}")
    if t + 1 < len(edges_by_t) and edge not in edges_by_t[t + 1]:
        return Lifecycle.TERMINATE
    if t == 0 or edge not in edges_by_t[t - 1]:
        return Lifecycle.INITIATE
    return Lifecycle.MAINTAIN


@dataclass(frozen=True)
class TemporalNetwork:
    """Directed supplier->customer edge sets, one frozenset per timestamp."""

    edges_by_t: tuple[frozenset[Edge], ...]

    def at(self, t: int) -> frozenset[Edge]:
        if not 0 <= t < len(self.edges_by_t):
            raise TimestampOutOfRange(f"t={t} outside 0..{len(self.edges_by_t) - 1}")
        return self.edges_by_t[t]

    def suppliers_of(self, company_id: CompanyId, t: int) -> frozenset[CompanyId]:
        return suppliers_in(self.at(t), company_id)

    def customers_of(self, company_id: CompanyId, t: int) -> frozenset[CompanyId]:
        return customers_in(self.at(t), company_id)

    def lifecycle(self, edge: Edge, t: int) -> Lifecycle:
        return edge_lifecycle(self.edges_by_t, edge, t)


@dataclass(frozen=True)
class Dataset:
    """Observed history: firms, their features per timestamp, and the network.

    ``companies`` is keyed by id in sorted order; every firm shares the
    same ``feature_names`` and the same number of timestamps.
    """

    companies: Mapping[CompanyId, CompanyRecord]
    network: TemporalNetwork
    feature_names: tuple[str, ...]
    labels: tuple[str, ...]
    global_knowledge: str = ""

    @property
    def n_timestamps(self) -> int:
        return len(self.labels)

    @property
    def company_ids(self) -> tuple[CompanyId, ...]:
        return tuple(self.companies)

    def timestamps(self) -> tuple[Timestamp, ...]:
        return tuple(Timestamp(i, lab) for i, lab in enumerate(self.labels))

    def company(self, company_id: CompanyId) -> CompanyRecord:
        try:
            return self.companies[company_id]
        except KeyError:
            raise UnknownCompany(company_id) from None

    def features_at(self, t: int) -> dict[CompanyId, FeatureVector]:
        if not 0 <= t < self.n_timestamps:
            raise TimestampOutOfRange(f"t={t} outside 0..{self.n_timestamps - 1}")
        return {cid: rec.features[t] for cid, rec in self.companies.items()}

    def feature_series(self, company_id: CompanyId, feature: str) -> list[float]:
        rec = self.company(company_id)
        if feature not in self.feature_names:
            raise UnknownFeature(feature)
        return [vec[feature] for vec in rec.features]


@dataclass(frozen=True)
class Timeline:
    """A dataset's history plus zero or more simulated steps along one path.

    ``edges_by_t`` and ``features_by_t`` always have equal length; indices
    below ``dataset.n_timestamps`` mirror the observed history.
    """

    dataset: Dataset
    edges_by_t: tuple[frozenset[Edge], ...]
    features_by_t: tuple[Mapping[CompanyId, FeatureVector], ...]
    labels: tuple[str, ...]

    @classmethod
    def from_dataset(cls, dataset: Dataset) -> "Timeline":
        return cls(
            dataset=dataset,
            edges_by_t=dataset.network.edges_by_t,
            features_by_t=tuple(dataset.features_at(t) for t in range(dataset.n_timestamps)),
            labels=dataset.labels,
        )

    @classmethod
    def from_dataset_prefix(cls, dataset: Dataset, n_steps: int) -> "Timeline":
        """First ``n_steps`` observed timestamps only."""
        if not 1 <= n_steps <= dataset.n_timestamps:
            raise TimestampOutOfRange(f"n_steps={n_steps} outside 1..{dataset.n_timestamps}")
        return cls(
            dataset=dataset,
            edges_by_t=dataset.network.edges_by_t[:n_steps],
            features_by_t=tuple(dataset.features_at(t) for t in range(n_steps)),
            labels=dataset.labels[:n_steps],
        )

    @property
    def n_timestamps(self) -> int:
        return len(self.edges_by_t)

    @property
    def last_t(self) -> int:
        return len(self.edges_by_t) - 1

    def edges_at(self, t: int) -> frozenset[Edge]:
        if not 0 <= t < self.n_timestamps:
            raise TimestampOutOfRange(f"t={t} outside 0..{self.n_timestamps - 1}")
        return self.edges_by_t[t]

    def features_at(self, t: int) -> Mapping[CompanyId, FeatureVector]:
        if not 0 <= t < self.n_timestamps:
            raise TimestampOutOfRange(f"t={t} outside 0..{self.n_timestamps - 1}")
        return self.features_by_t[t]

    def feature_series(self, company_id: CompanyId, feature: str) -> list[float]:
        self.dataset.company(company_id)
        return [self.features_by_t[t][company_id][feature] for t in range(self.n_timestamps)]

    def extended(
        self,
        edges: frozenset[Edge],
        features: Mapping[CompanyId, FeatureVector],
        label: str,
    ) -> "Timeline":
        """Append one simulated step."""
        return replace(
            self,
            edges_by_t=self.edges_by_t + (edges,),
            features_by_t=self.features_by_t + (dict(features),),
            labels=self.labels + (label,),
        )

    def lifecycle(self, edge: Edge, t: int) -> Lifecycle:
        return edge_lifecycle(self.edges_by_t, edge, t)


def next_label(labels: Sequence[str]) -> str:
    """Continue a label sequence like Q1..Q8 -> Q9; fall back to t<index>."""
    last = labels[-1]
    if last.startswith("Q") and last[1:].isdigit():
        return f"Q{int(last[1:]) + 1}"
    return f"t{len(labels)}"
