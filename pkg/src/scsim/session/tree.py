"""The branching tree of simulation states within one session.

Every node freezes one timestamp: its edge set, its feature table, and
(for simulated nodes) the turn records that produced it. Nodes never
change after creation; reruns and applied adjustments add siblings
instead. Which node is "active" is session state, not node state.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Mapping, Sequence

from ..errors import UnknownNode
from ..model import CompanyId, Dataset, Edge, FeatureVector, Timeline
from ..protocol.records import AgentTurnRecord


class NodeStatus(str, Enum):
    HISTORICAL = "Historical"
    SIMULATED = "Simulated"


@dataclass(frozen=True)
class SimulationNode:
    node_id: str
    parent: str | None
    t: int
    label: str
    status: NodeStatus
    edges: frozenset[Edge]
    features: Mapping[CompanyId, FeatureVector]
    records: tuple[AgentTurnRecord, ...] = ()
    provenance: Mapping[str, Any] = field(default_factory=dict)

    def to_doc(self) -> dict:
        return {
            "nodeId": self.node_id,
            "parent": self.parent,
            "t": self.t,
            "label": self.label,
            "status": self.status.value,
            "edges": sorted([s, c] for s, c in self.edges),
            "features": {
                cid: {k: v for k, v in sorted(self.features[cid].items())}
                for cid in sorted(self.features)
            },
            "provenance": dict(sorted(self.provenance.items())),
        }

    @classmethod
    def from_doc(cls, doc: Mapping, records: Sequence[AgentTurnRecord] = ()) -> "SimulationNode":
        return cls(
            node_id=doc["nodeId"],
            parent=doc["parent"],
            t=doc["t"],
            label=doc["label"],
            status=NodeStatus(doc["status"]),
            edges=frozenset((s, c) for s, c in doc["edges"]),
            features={cid: dict(f) for cid, f in doc["features"].items()},
            records=tuple(records),
            provenance=dict(doc.get("provenance", {})),
        )


class PathTree:
    """Append-only node collection in creation order, ids n0, n1, ..."""

    def __init__(self) -> None:
        self._nodes: dict[str, SimulationNode] = {}

    def __contains__(self, node_id: str) -> bool:
        return node_id in self._nodes

    def __len__(self) -> int:
        return len(self._nodes)

    @property
    def nodes(self) -> list[SimulationNode]:
        return list(self._nodes.values())

    def get(self, node_id: str) -> SimulationNode:
        if node_id not in self._nodes:
            raise UnknownNode(f"no node {node_id!r}")
        return self._nodes[node_id]

    def next_id(self) -> str:
        return f"n{len(self._nodes)}"

    def add(self, node: SimulationNode) -> SimulationNode:
        if node.node_id in self._nodes:
            raise ValueError(f"node id {node.node_id!r} already used")
        if node.parent is not None:
            self.get(node.parent)
        self._nodes[node.node_id] = node
        return node

    def children_of(self, node_id: str) -> list[SimulationNode]:
        self.get(node_id)
        return [n for n in self._nodes.values() if n.parent == node_id]

    def path_to(self, node_id: str) -> list[SimulationNode]:
        """Root-to-node chain of snapshots."""
        chain = []
        node: SimulationNode | None = self.get(node_id)
        while node is not None:
            chain.append(node)
            node = self._nodes[node.parent] if node.parent is not None else None
        return chain[::-1]

    def timeline_at(self, node_id: str, dataset: Dataset) -> Timeline:
        path = self.path_to(node_id)
        return Timeline(
            dataset=dataset,
            edges_by_t=tuple(n.edges for n in path),
            features_by_t=tuple(n.features for n in path),
            labels=tuple(n.label for n in path),
        )

    @classmethod
    def historical_chain(cls, dataset: Dataset) -> "PathTree":
        """One node per observed timestamp, linked root to tip."""
        tree = cls()
        parent: str | None = None
        for t in range(len(dataset.network.edges_by_t)):
            node = SimulationNode(
                node_id=tree.next_id(),
                parent=parent,
                t=t,
                label=dataset.labels[t],
                status=NodeStatus.HISTORICAL,
                edges=dataset.network.edges_by_t[t],
                features=dataset.features_at(t),
            )
            tree.add(node)
            parent = node.node_id
        return tree
