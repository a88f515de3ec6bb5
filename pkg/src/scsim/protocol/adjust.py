"""Analyst interventions on a recorded turn.

An adjustment edits what the agents decided at one timestamp without
re-running their decision stages. The recompute replays the original
plans, constraints, and requests, applies the edits, and only asks a
policy to speak again where an exchange was actually touched: a negated
reply is posed again with the analyst's note attached, and a newly
added request gets a fresh reply from its target. Everything else is
reused byte for byte from the original records.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Mapping, Sequence

from ..errors import InvalidReference, PolicyFailure
from ..model import CompanyId, Timeline, partners_in
from .engine import (
    KnowledgeState,
    TurnConfig,
    _AgentWork,
    _normalized_replies,
    _reseed,
    assemble_inbox,
    build_view,
    collect_commit,
    make_perf_cache,
)
from .policy import AgentPolicy
from .records import (
    AgentTurnRecord,
    InboxEntry,
    PlanRecord,
    ReplyDirection,
    ReplyRecord,
    RequestKind,
    RequestRecord,
)

log = logging.getLogger(__name__)


class Action(str, Enum):
    NEGATE = "negate"
    ADD = "add"
    DELETE = "delete"


class TargetKind(str, Enum):
    PLAN = "plan"
    REQUEST = "request"
    REPLY = "reply"


@dataclass(frozen=True)
class TargetRef:
    """Points at one plan, request, or reply inside a turn's records.

    ``company_id`` is the firm whose record holds the item: the planner
    for plans and requests, the responder for replies.
    """

    kind: TargetKind
    company_id: CompanyId
    plan_index: int | None = None
    request_target: CompanyId | None = None
    requester: CompanyId | None = None
    direction: ReplyDirection | None = None

    def to_dict(self) -> dict[str, Any]:
        doc: dict[str, Any] = {"kind": self.kind.value, "companyId": self.company_id}
        if self.plan_index is not None:
            doc["planIndex"] = self.plan_index
        if self.request_target is not None:
            doc["requestTarget"] = self.request_target
        if self.requester is not None:
            doc["requester"] = self.requester
        if self.direction is not None:
            doc["direction"] = self.direction.value
        return doc

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any]) -> "TargetRef":
        return cls(
            kind=TargetKind(doc["kind"]),
            company_id=doc["companyId"],
            plan_index=doc.get("planIndex"),
            request_target=doc.get("requestTarget"),
            requester=doc.get("requester"),
            direction=ReplyDirection(doc["direction"]) if doc.get("direction") else None,
        )


@dataclass(frozen=True)
class Adjustment:
    """One staged edit: negate a reply, add a plan/request, or delete one.

    ``payload`` carries the action's inputs. For NEGATE: an optional
    ``note`` shown to the responder, or ``force`` (with ``accepted``)
    to overrule without asking. For ADD on a request: ``target``,
    ``kind``, optional ``reason``/``extra_info``/``plan_index``; when
    no plan index is given a carrier plan is created. For ADD on a
    plan: ``description``/``reason``/``seek_collaboration``/
    ``seek_suppliers``. DELETE takes no payload.
    """

    action: Action
    target: TargetRef
    payload: Mapping[str, Any] = field(default_factory=dict)
    author: str = ""

    def to_dict(self) -> dict[str, Any]:
        return {
            "action": self.action.value,
            "target": self.target.to_dict(),
            "payload": dict(self.payload),
            "author": self.author,
        }

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any]) -> "Adjustment":
        return cls(
            action=Action(doc["action"]),
            target=TargetRef.from_dict(doc["target"]),
            payload=dict(doc.get("payload", {})),
            author=doc.get("author", ""),
        )


def _record_for(records: Sequence[AgentTurnRecord], company_id: CompanyId) -> AgentTurnRecord:
    for rec in records:
        if rec.company_id == company_id:
            return rec
    raise InvalidReference(f"no turn record for company {company_id!r}")


def _resolve_direction(
    rec: AgentTurnRecord, ref: TargetRef
) -> ReplyDirection:
    hits = {r.direction for r in rec.replies if r.requester == ref.requester}
    if ref.direction is not None:
        if ref.direction not in hits:
            raise InvalidReference(
                f"{rec.company_id!r} has no reply to {ref.requester!r} "
                f"with direction {ref.direction.value!r}"
            )
        return ref.direction
    if not hits:
        raise InvalidReference(f"{rec.company_id!r} has no reply to {ref.requester!r}")
    if len(hits) > 1:
        raise InvalidReference(
            f"{rec.company_id!r} answered {ref.requester!r} in both directions; "
            "the reference must name one"
        )
    return next(iter(hits))


def validate_adjustment(
    adj: Adjustment,
    records: Sequence[AgentTurnRecord],
    timeline: Timeline,
    t: int,
) -> None:
    """Reject references that do not resolve against the recorded turn.

    Raises InvalidReference with a message naming what is missing.
    """
    ref = adj.target
    if timeline.dataset is not None and ref.company_id not in timeline.dataset.companies:
        raise InvalidReference(f"unknown company {ref.company_id!r}")
    rec = _record_for(records, ref.company_id)

    if adj.action is Action.NEGATE:
        if ref.kind is not TargetKind.REPLY:
            raise InvalidReference("negate applies to replies")
        if ref.requester is None:
            raise InvalidReference("negate needs the requester id")
        _resolve_direction(rec, ref)
        return

    if adj.action is Action.DELETE:
        if ref.kind is TargetKind.PLAN:
            if ref.plan_index is None or not 0 <= ref.plan_index < len(rec.plans):
                raise InvalidReference(
                    f"{ref.company_id!r} has no plan index {ref.plan_index!r}"
                )
            return
        if ref.kind is TargetKind.REQUEST:
            if ref.request_target is None:
                raise InvalidReference("delete on a request needs the target id")
            hits = [
                r
                for r in rec.outgoing
                if r.target == ref.request_target
                and (ref.plan_index is None or r.plan_index == ref.plan_index)
            ]
            if not hits:
                raise InvalidReference(
                    f"{ref.company_id!r} sent no request to {ref.request_target!r}"
                )
            return
        raise InvalidReference("delete applies to plans and requests")

    # ADD
    if ref.kind is TargetKind.PLAN:
        for key in ("description", "reason"):
            if not str(adj.payload.get(key, "")).strip():
                raise InvalidReference(f"added plan needs a non-empty {key!r}")
        return
    if ref.kind is not TargetKind.REQUEST:
        raise InvalidReference("add applies to plans and requests")
    target = adj.payload.get("target")
    if target is None or target not in timeline.dataset.companies:
        raise InvalidReference(f"added request targets unknown company {target!r}")
    if target == ref.company_id:
        raise InvalidReference("a firm cannot request itself")
    try:
        kind = RequestKind(adj.payload.get("kind"))
    except ValueError:
        raise InvalidReference(
            f"unknown request kind {adj.payload.get('kind')!r}"
        ) from None
    if kind is RequestKind.TERMINATE:
        if target not in partners_in(timeline.edges_at(t), ref.company_id):
            raise InvalidReference(
                f"{target!r} is not a partner of {ref.company_id!r} at t={t}"
            )
    if adj.payload.get("plan_index") is not None:
        idx = adj.payload["plan_index"]
        if not 0 <= idx < len(rec.plans):
            raise InvalidReference(f"{ref.company_id!r} has no plan index {idx!r}")


def _apply_delete_plan(work: _AgentWork, idx: int) -> None:
    work.plans = work.plans[:idx] + work.plans[idx + 1 :]
    if idx < len(work.constraints):
        work.constraints = work.constraints[:idx] + work.constraints[idx + 1 :]
    if idx < len(work.candidates):
        work.candidates = work.candidates[:idx] + work.candidates[idx + 1 :]
    kept = []
    for req in work.outgoing:
        if req.plan_index == idx:
            continue
        if req.plan_index > idx:
            req = replace(req, plan_index=req.plan_index - 1)
        kept.append(req)
    work.outgoing = tuple(kept)


def _apply_add(work: _AgentWork, adj: Adjustment) -> None:
    ref = adj.target
    if ref.kind is TargetKind.PLAN:
        work.plans = work.plans + (
            PlanRecord(
                description=adj.payload["description"],
                reason=adj.payload["reason"],
                seek_collaboration=bool(adj.payload.get("seek_collaboration", False)),
                seek_suppliers=bool(adj.payload.get("seek_suppliers", False)),
            ),
        )
        return
    kind = RequestKind(adj.payload["kind"])
    idx = adj.payload.get("plan_index")
    if idx is None:
        # carrier plan so the request has a slot to hang off
        work.plans = work.plans + (
            PlanRecord(
                description=adj.payload.get("reason") or "Analyst-directed outreach.",
                reason=adj.payload.get("reason") or "Added during review.",
                seek_collaboration=kind is not RequestKind.TERMINATE,
                seek_suppliers=kind is RequestKind.ADD_AS_SUPPLIER,
            ),
        )
        idx = len(work.plans) - 1
    work.outgoing = work.outgoing + (
        RequestRecord(
            plan_index=idx,
            target=adj.payload["target"],
            kind=kind,
            chosen=True,
            reason=adj.payload.get("reason", "Added during review."),
            extra_info=adj.payload.get("extra_info", ""),
        ),
    )


def recompute_turn(
    timeline: Timeline,
    original: Sequence[AgentTurnRecord],
    adjustments: Sequence[Adjustment],
    policies: Mapping[CompanyId, AgentPolicy],
    config: TurnConfig | None = None,
    seed: int = 0,
    knowledge: KnowledgeState | None = None,
):
    """Replay a recorded turn with the given edits applied.

    Decision stages are not re-run; the original outputs are the
    starting point. Replies are reused wherever neither the request nor
    the reply was touched. Returns the same shape as ``run_turn``.
    """
    config = config or TurnConfig()
    dataset = timeline.dataset
    t = timeline.last_t
    for adj in adjustments:
        validate_adjustment(adj, original, timeline, t)

    perf_at = make_perf_cache(timeline, config.performance_metric)
    for w in range(max(0, t - config.reference_length + 1), t + 1):
        perf_at(w)

    # seed work from the recorded decisions, views rebuilt on demand
    work: dict[CompanyId, _AgentWork] = {}

    def work_for(cid: CompanyId) -> _AgentWork:
        if cid not in work:
            rec = _record_for(original, cid)
            work[cid] = _AgentWork(
                view=build_view(timeline, cid, config, knowledge, perf_at),
                plans=rec.plans,
                constraints=rec.constraints,
                candidates=rec.candidates,
                outgoing=rec.outgoing,
                failed_stages=rec.failed_stages,
            )
        return work[cid]

    for rec in original:
        if rec.plans or rec.outgoing or rec.failed_stages:
            work_for(rec.company_id)

    negated: dict[tuple[CompanyId, CompanyId, ReplyDirection], Adjustment] = {}
    for adj in adjustments:
        ref = adj.target
        if adj.action is Action.NEGATE:
            rec = _record_for(original, ref.company_id)
            direction = _resolve_direction(rec, ref)
            negated[(ref.company_id, ref.requester, direction)] = adj
        elif adj.action is Action.DELETE:
            w = work_for(ref.company_id)
            if ref.kind is TargetKind.PLAN:
                _apply_delete_plan(w, ref.plan_index)
            else:
                w.outgoing = tuple(
                    r
                    for r in w.outgoing
                    if not (
                        r.target == ref.request_target
                        and (ref.plan_index is None or r.plan_index == ref.plan_index)
                    )
                )
        else:
            _apply_add(work_for(ref.company_id), adj)

    outgoing_by_agent = {cid: w.outgoing for cid, w in work.items()}
    features = timeline.features_at(t)
    industries = {cid: dataset.companies[cid].industry for cid in dataset.companies}
    inboxes = assemble_inbox(outgoing_by_agent, features, industries)

    original_outgoing = {rec.company_id: rec.outgoing for rec in original}
    original_inboxes = assemble_inbox(original_outgoing, features, industries)
    reusable: dict[CompanyId, dict[tuple[CompanyId, ReplyDirection], ReplyRecord]] = {}
    for rec in original:
        slots = {
            (entry.requester, entry.direction): entry
            for entry in original_inboxes.get(rec.company_id, ())
        }
        by_key = {}
        for reply in rec.replies:
            key = (reply.requester, reply.direction)
            if key in slots:
                by_key[key] = reply
        reusable[rec.company_id] = by_key

    def answer(target: CompanyId) -> list[ReplyRecord]:
        inbox = inboxes[target]
        kept: list[ReplyRecord] = []
        pending: list[InboxEntry] = []
        forced: list[ReplyRecord] = []
        for entry in inbox:
            key = (target, entry.requester, entry.direction)
            adj = negated.get(key)
            if adj is not None:
                if adj.payload.get("force"):
                    forced.append(
                        ReplyRecord(
                            requester=entry.requester,
                            direction=entry.direction,
                            accepted=bool(adj.payload.get("accepted", True)),
                            reason=str(
                                adj.payload.get("note", "Decision set by the analyst.")
                            ),
                            synthetic=True,
                        )
                    )
                else:
                    note = str(adj.payload.get("note", "")).strip()
                    pending.append(replace(entry, note=note) if note else entry)
                continue
            prior = reusable.get(target, {}).get((entry.requester, entry.direction))
            if prior is not None:
                kept.append(prior)
            else:
                pending.append(entry)

        fresh: list[ReplyRecord] = []
        if pending:
            view = (
                work[target].view
                if target in work
                else build_view(timeline, target, config, knowledge, perf_at)
            )
            if target in policies:
                _reseed(policies[target], seed, t, f"{target}:reply")
                try:
                    fresh = _normalized_replies(pending, policies[target].reply(view, pending))
                except PolicyFailure as e:
                    log.warning("reply recompute failed: %s", e)
                    fresh = _normalized_replies(pending, [])
            else:
                fresh = _normalized_replies(pending, [])

        by_key = {(r.requester, r.direction): r for r in kept + forced + fresh}
        return [by_key[(e.requester, e.direction)] for e in inbox]

    targets = sorted(inboxes)
    if config.max_workers and config.max_workers > 1:
        with ThreadPoolExecutor(max_workers=config.max_workers) as pool:
            replies_by_target = dict(zip(targets, pool.map(answer, targets)))
    else:
        replies_by_target = {target: answer(target) for target in targets}

    return collect_commit(timeline, work, replies_by_target)
