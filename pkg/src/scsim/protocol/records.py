"""Record types produced by the four stages of a simulation turn.

Everything here is immutable and JSON-serializable via to_dict /
from_dict; exported logs are built from these documents, so field
ordering inside to_dict is deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping

from ..model import CompanyId, FeatureVector
from ..query import Candidate, QueryConstraint


class RequestKind(str, Enum):
    """Role the targeted firm is asked to take in the requester's chain."""

    ADD_AS_SUPPLIER = "add_as_supplier"
    ADD_AS_CUSTOMER = "add_as_customer"
    TERMINATE = "terminate"


class ReplyDirection(str, Enum):
    """How a request looks from the receiving firm's side."""

    REQUESTER_WANTS_TO_SUPPLY = "requester_wants_to_supply"
    REQUESTER_WANTS_TO_BUY = "requester_wants_to_buy"


# AddAsSupplier(target): target would supply the requester, so from the
# target's seat the requester is a would-be customer. AddAsCustomer is
# the mirror image.
KIND_TO_DIRECTION = {
    RequestKind.ADD_AS_SUPPLIER: ReplyDirection.REQUESTER_WANTS_TO_BUY,
    RequestKind.ADD_AS_CUSTOMER: ReplyDirection.REQUESTER_WANTS_TO_SUPPLY,
}

DIRECTION_TO_KIND = {direction: kind for kind, direction in KIND_TO_DIRECTION.items()}


def accepted_edge(requester: CompanyId, kind: RequestKind, target: CompanyId) -> tuple[str, str]:
    """The supplier->customer edge created if this request is accepted."""
    if kind is RequestKind.ADD_AS_SUPPLIER:
        return (target, requester)
    if kind is RequestKind.ADD_AS_CUSTOMER:
        return (requester, target)
    raise ValueError(f"no edge for kind {kind}")


@dataclass(frozen=True)
class PlanRecord:
    description: str
    reason: str
    seek_collaboration: bool
    seek_suppliers: bool

    def __post_init__(self):
        if not self.description.strip():
            raise ValueError("plan description must be non-empty")
        if not self.reason.strip():
            raise ValueError("plan reason must be non-empty")

    def to_dict(self) -> dict:
        return {
            "description": self.description,
            "reason": self.reason,
            "seek_collaboration": self.seek_collaboration,
            "seek_suppliers": self.seek_suppliers,
        }

    @classmethod
    def from_dict(cls, doc: Mapping) -> "PlanRecord":
        return cls(
            description=doc["description"],
            reason=doc["reason"],
            seek_collaboration=bool(doc["seek_collaboration"]),
            seek_suppliers=bool(doc["seek_suppliers"]),
        )


@dataclass(frozen=True)
class RequestRecord:
    plan_index: int
    target: CompanyId
    kind: RequestKind
    chosen: bool
    reason: str = ""
    extra_info: str = ""

    def to_dict(self) -> dict:
        return {
            "plan_index": self.plan_index,
            "target": self.target,
            "kind": self.kind.value,
            "chosen": self.chosen,
            "reason": self.reason,
            "extra_info": self.extra_info,
        }

    @classmethod
    def from_dict(cls, doc: Mapping) -> "RequestRecord":
        return cls(
            plan_index=int(doc["plan_index"]),
            target=doc["target"],
            kind=RequestKind(doc["kind"]),
            chosen=bool(doc["chosen"]),
            reason=doc.get("reason", ""),
            extra_info=doc.get("extra_info", ""),
        )


@dataclass(frozen=True)
class ReplyRecord:
    requester: CompanyId
    direction: ReplyDirection
    accepted: bool
    reason: str = ""
    synthetic: bool = False  # engine- or user-generated, not from the policy

    def to_dict(self) -> dict:
        return {
            "requester": self.requester,
            "direction": self.direction.value,
            "accepted": self.accepted,
            "reason": self.reason,
            "synthetic": self.synthetic,
        }

    @classmethod
    def from_dict(cls, doc: Mapping) -> "ReplyRecord":
        return cls(
            requester=doc["requester"],
            direction=ReplyDirection(doc["direction"]),
            accepted=bool(doc["accepted"]),
            reason=doc.get("reason", ""),
            synthetic=bool(doc.get("synthetic", False)),
        )


@dataclass(frozen=True)
class InboxEntry:
    """One incoming collaboration request as seen by its receiver.

    Carries the requester's current profile so reply policies can judge
    it; prompt rendering uses only the id and the free-text fields.
    """

    requester: CompanyId
    direction: ReplyDirection
    extra_info: str = ""
    note: str = ""  # user note injected by an adjustment, empty otherwise
    requester_industry: str = ""
    requester_features: FeatureVector = field(default_factory=dict)


@dataclass(frozen=True)
class PartnerInfo:
    company_id: CompanyId
    industry: str
    features: Mapping[int, FeatureVector]  # t -> vector over the window


@dataclass(frozen=True)
class AgentView:
    """Snapshot-frozen slice of the world one agent sees during a turn."""

    company_id: CompanyId
    industry: str
    knowledge: str
    global_knowledge: str
    t: int
    t_label: str
    window: tuple[int, ...]  # reference-window timestamp indices, ascending
    window_labels: tuple[str, ...]
    feature_names: tuple[str, ...]
    self_features: Mapping[int, FeatureVector]  # t -> vector over the window
    suppliers: Mapping[CompanyId, PartnerInfo]
    customers: Mapping[CompanyId, PartnerInfo]
    performance_history: tuple[tuple[int, float], ...]  # consumed by rule policies only
    candidate_industries: tuple[str, ...]

    @property
    def current_features(self) -> FeatureVector:
        return self.self_features[self.t]


@dataclass(frozen=True)
class AgentTurnRecord:
    """Everything one agent did in one turn.

    ``plans``, ``constraints`` and ``candidates`` are aligned by index;
    ``outgoing`` requests point back via ``plan_index``. ``replies`` are
    the answers this agent gave to its inbox. ``applied_deltas`` holds
    the edge changes this agent is responsible for in the committed
    snapshot diff.
    """

    company_id: CompanyId
    plans: tuple[PlanRecord, ...] = ()
    constraints: tuple[QueryConstraint, ...] = ()
    candidates: tuple[tuple[Candidate, ...], ...] = ()
    outgoing: tuple[RequestRecord, ...] = ()
    replies: tuple[ReplyRecord, ...] = ()
    added_edges: tuple[tuple[str, str], ...] = ()
    removed_edges: tuple[tuple[str, str], ...] = ()
    failed_stages: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "company_id": self.company_id,
            "plans": [p.to_dict() for p in self.plans],
            "constraints": [
                {
                    "industry_set": list(c.industry_set),
                    "weighted_scores": [[name, weight] for name, weight in c.weighted_scores],
                }
                for c in self.constraints
            ],
            "candidates": [
                [[c.company_id, c.score] for c in group] for group in self.candidates
            ],
            "outgoing": [r.to_dict() for r in self.outgoing],
            "replies": [r.to_dict() for r in self.replies],
            "applied_deltas": {
                "added": [list(e) for e in self.added_edges],
                "removed": [list(e) for e in self.removed_edges],
            },
            "failed_stages": list(self.failed_stages),
        }

    @classmethod
    def from_dict(cls, doc: Mapping) -> "AgentTurnRecord":
        return cls(
            company_id=doc["company_id"],
            plans=tuple(PlanRecord.from_dict(p) for p in doc["plans"]),
            constraints=tuple(
                QueryConstraint(
                    industry_set=tuple(c["industry_set"]),
                    weighted_scores=tuple((n, float(w)) for n, w in c["weighted_scores"]),
                )
                for c in doc["constraints"]
            ),
            candidates=tuple(
                tuple(Candidate(cid, float(score)) for cid, score in group)
                for group in doc["candidates"]
            ),
            outgoing=tuple(RequestRecord.from_dict(r) for r in doc["outgoing"]),
            replies=tuple(ReplyRecord.from_dict(r) for r in doc["replies"]),
            added_edges=tuple(tuple(e) for e in doc["applied_deltas"]["added"]),
            removed_edges=tuple(tuple(e) for e in doc["applied_deltas"]["removed"]),
            failed_stages=tuple(doc.get("failed_stages", ())),
        )
