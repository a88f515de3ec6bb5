"""Agent decision policies.

A policy answers the four stages of a turn from a snapshot-frozen view.
The rule policy is a deterministic stand-in for an LLM used in tests,
evaluation baselines, and anywhere byte-stable runs matter.
"""

from __future__ import annotations

import statistics
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Sequence

from ..query import Candidate, QueryConstraint
from .records import (
    AgentView,
    InboxEntry,
    PlanRecord,
    ReplyRecord,
    RequestKind,
    RequestRecord,
)


class AgentPolicy(ABC):
    @abstractmethod
    def plan(self, view: AgentView) -> list[PlanRecord]:
        raise NotImplementedError

    @abstractmethod
    def constrain(self, view: AgentView, plans: Sequence[PlanRecord]) -> list[QueryConstraint]:
        raise NotImplementedError

    @abstractmethod
    def request(
        self,
        view: AgentView,
        plans: Sequence[PlanRecord],
        constraints: Sequence[QueryConstraint],
        candidates: Sequence[Sequence[Candidate]],
    ) -> list[list[RequestRecord]]:
        raise NotImplementedError

    @abstractmethod
    def reply(self, view: AgentView, inbox: Sequence[InboxEntry]) -> list[ReplyRecord]:
        raise NotImplementedError


def _mean_feature(features) -> float:
    values = list(features.values())
    return sum(values) / len(values) if values else 0.0


@dataclass(frozen=True)
class RulePolicyParams:
    min_suppliers: int = 1
    cutoff: float = 35.0  # partners below this mean feature score get terminated


class RulePolicy(AgentPolicy):
    """Threshold rules, no randomness.

    Plan: seek customers when own performance declined across the
    reference window; seek suppliers when the supplier count is below
    ``min_suppliers``; terminate partners whose mean feature score at
    the current timestamp falls below ``cutoff``.
    Query: uniform weights over every feature, any industry.
    Request: the top-scored candidate of each seek plan.
    Reply: accept when the requester's mean feature score is at least
    the median of current partners' mean scores (0 with no partners).
    """

    def __init__(self, params: RulePolicyParams | None = None):
        self.params = params or RulePolicyParams()

    # -- stage I
    def plan(self, view: AgentView) -> list[PlanRecord]:
        plans = []
        history = view.performance_history
        if len(history) >= 2 and history[-1][1] < history[0][1]:
            plans.append(
                PlanRecord(
                    description="Seek new customers to regain performance",
                    reason=(
                        "Performance fell from "
                        f"{history[0][1]:.6g} to {history[-1][1]:.6g} over the reference window."
                    ),
                    seek_collaboration=True,
                    seek_suppliers=False,
                )
            )
        if len(view.suppliers) < self.params.min_suppliers:
            plans.append(
                PlanRecord(
                    description="Seek additional suppliers",
                    reason=(
                        f"Only {len(view.suppliers)} supplier(s), below the minimum of "
                        f"{self.params.min_suppliers}."
                    ),
                    seek_collaboration=True,
                    seek_suppliers=True,
                )
            )
        weak = self._weak_partners(view)
        if weak:
            plans.append(
                PlanRecord(
                    description="Terminate underperforming partners",
                    reason=(
                        "Partners below the mean feature cutoff of "
                        f"{self.params.cutoff:g}: {', '.join(weak)}."
                    ),
                    seek_collaboration=False,
                    seek_suppliers=False,
                )
            )
        return plans

    def _weak_partners(self, view: AgentView) -> list[str]:
        weak = []
        for cid in sorted(set(view.suppliers) | set(view.customers)):
            info = view.suppliers.get(cid) or view.customers[cid]
            if _mean_feature(info.features[view.t]) < self.params.cutoff:
                weak.append(cid)
        return weak

    # -- stage II
    def constrain(self, view: AgentView, plans: Sequence[PlanRecord]) -> list[QueryConstraint]:
        uniform = tuple((name, 1.0 / len(view.feature_names)) for name in view.feature_names)
        return [
            QueryConstraint(industry_set=(), weighted_scores=uniform if p.seek_collaboration else ())
            for p in plans
        ]

    # -- stage III
    def request(
        self,
        view: AgentView,
        plans: Sequence[PlanRecord],
        constraints: Sequence[QueryConstraint],
        candidates: Sequence[Sequence[Candidate]],
    ) -> list[list[RequestRecord]]:
        out: list[list[RequestRecord]] = []
        for i, plan in enumerate(plans):
            if plan.seek_collaboration:
                group = []
                if candidates[i]:
                    top = candidates[i][0]
                    kind = (
                        RequestKind.ADD_AS_SUPPLIER
                        if plan.seek_suppliers
                        else RequestKind.ADD_AS_CUSTOMER
                    )
                    role = "supplier" if plan.seek_suppliers else "customer"
                    group.append(
                        RequestRecord(
                            plan_index=i,
                            target=top.company_id,
                            kind=kind,
                            chosen=True,
                            reason=f"Top query score {top.score:.4f} for a new {role}.",
                            extra_info=(
                                f"Company {view.company_id} ({view.industry}) proposes a "
                                f"{role} relationship; our mean feature score is "
                                f"{_mean_feature(view.current_features):.2f}."
                            ),
                        )
                    )
                out.append(group)
            else:
                out.append(
                    [
                        RequestRecord(
                            plan_index=i,
                            target=cid,
                            kind=RequestKind.TERMINATE,
                            chosen=True,
                            reason=f"Mean feature score below {self.params.cutoff:g}.",
                        )
                        for cid in self._weak_partners(view)
                    ]
                )
        return out

    # -- stage IV
    def reply(self, view: AgentView, inbox: Sequence[InboxEntry]) -> list[ReplyRecord]:
        partner_scores = []
        for cid in sorted(set(view.suppliers) | set(view.customers)):
            info = view.suppliers.get(cid) or view.customers[cid]
            partner_scores.append(_mean_feature(info.features[view.t]))
        threshold = statistics.median(partner_scores) if partner_scores else 0.0
        replies = []
        for entry in inbox:
            score = _mean_feature(entry.requester_features)
            accepted = score >= threshold
            replies.append(
                ReplyRecord(
                    requester=entry.requester,
                    direction=entry.direction,
                    accepted=accepted,
                    reason=(
                        f"Requester mean feature {score:.2f} "
                        + ("meets" if accepted else "is below")
                        + f" our partner median {threshold:.2f}."
                    ),
                )
            )
        return replies
