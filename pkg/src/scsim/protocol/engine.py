"""The four-stage turn: plan, query, request, reply, then one commit.

All agents decide against the same start-of-turn snapshot; nothing an
agent does during a turn is visible to the others until the commit. The
commit removes terminated edges and adds accepted ones in a single
step, with termination winning when both touch the same edge.
"""

from __future__ import annotations

import hashlib
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import AbstractSet, Callable, Iterable, Mapping, Sequence

from ..errors import PolicyFailure
from ..metrics import PerformanceMap, performance
from ..model import CompanyId, Edge, Timeline, customers_in, suppliers_in
from ..query import Candidate, QueryConstraint, exclusion_set, query_candidates
from .policy import AgentPolicy
from .records import (
    DIRECTION_TO_KIND,
    AgentTurnRecord,
    AgentView,
    InboxEntry,
    PartnerInfo,
    PlanRecord,
    ReplyDirection,
    ReplyRecord,
    RequestKind,
    RequestRecord,
    accepted_edge,
)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class TurnConfig:
    reference_length: int = 4
    performance_metric: str = "pagerank"
    candidate_k: int = 5
    active_agents: frozenset[CompanyId] | None = None  # None = every firm
    max_workers: int | None = None  # None = run stages serially


@dataclass(frozen=True)
class KnowledgeState:
    """Session-level knowledge overlay on top of the dataset's texts."""

    global_text: str | None = None
    per_company: Mapping[CompanyId, str] = field(default_factory=dict)

    def global_for(self, dataset) -> str:
        return self.global_text if self.global_text is not None else dataset.global_knowledge

    def for_company(self, dataset, company_id: CompanyId) -> str:
        if company_id in self.per_company:
            return self.per_company[company_id]
        return dataset.companies[company_id].knowledge


def agent_seed(seed: int, t: int, company_id: CompanyId) -> int:
    """Stable per-agent seed; identical across runs and platforms."""
    digest = hashlib.sha256(f"{seed}:{t}:{company_id}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def build_view(
    timeline: Timeline,
    company_id: CompanyId,
    config: TurnConfig,
    knowledge: KnowledgeState | None = None,
    perf_at: Callable[[int], PerformanceMap] | None = None,
) -> AgentView:
    """The snapshot-frozen slice of the world one agent decides from."""
    dataset = timeline.dataset
    record = dataset.company(company_id)
    knowledge = knowledge or KnowledgeState()
    t = timeline.last_t
    window = tuple(range(max(0, t - config.reference_length + 1), t + 1))
    edges = timeline.edges_at(t)
    if perf_at is None:
        perf_at = lambda w: performance(
            timeline.edges_at(w), dataset.company_ids, config.performance_metric
        )

    def partner_info(cid: CompanyId) -> PartnerInfo:
        return PartnerInfo(
            company_id=cid,
            industry=dataset.companies[cid].industry,
            features={w: timeline.features_at(w)[cid] for w in window},
        )

    return AgentView(
        company_id=company_id,
        industry=record.industry,
        knowledge=knowledge.for_company(dataset, company_id),
        global_knowledge=knowledge.global_for(dataset),
        t=t,
        t_label=timeline.labels[t],
        window=window,
        window_labels=tuple(timeline.labels[w] for w in window),
        feature_names=dataset.feature_names,
        self_features={w: timeline.features_at(w)[company_id] for w in window},
        suppliers={cid: partner_info(cid) for cid in sorted(suppliers_in(edges, company_id))},
        customers={cid: partner_info(cid) for cid in sorted(customers_in(edges, company_id))},
        performance_history=tuple((w, perf_at(w)[company_id]) for w in window),
        candidate_industries=tuple(sorted({rec.industry for rec in dataset.companies.values()})),
    )


def validate_requests(
    company_id: CompanyId,
    groups: Sequence[Sequence[RequestRecord]],
    plans: Sequence[PlanRecord],
    partners: AbstractSet[CompanyId],
    known_ids: AbstractSet[CompanyId],
) -> list[RequestRecord]:
    """Flatten stage-III output, dropping records that break the rules.

    Dropped (and logged): unknown targets, self-targets, terminations of
    non-partners, and kinds inconsistent with the plan's seek flags.
    """
    out: list[RequestRecord] = []
    for i, group in enumerate(groups):
        plan = plans[i] if i < len(plans) else None
        for req in group:
            if plan is None:
                log.warning("%s: request for nonexistent plan %d dropped", company_id, i)
                continue
            if req.target not in known_ids:
                log.warning("%s: request targets unknown company %s; dropped", company_id, req.target)
                continue
            if req.target == company_id:
                log.warning("%s: request targets itself; dropped", company_id)
                continue
            if plan.seek_collaboration:
                expected = (
                    RequestKind.ADD_AS_SUPPLIER if plan.seek_suppliers else RequestKind.ADD_AS_CUSTOMER
                )
            else:
                expected = RequestKind.TERMINATE
            if req.kind is not expected:
                log.warning(
                    "%s: request kind %s inconsistent with plan %d flags; dropped",
                    company_id,
                    req.kind.value,
                    i,
                )
                continue
            if req.kind is RequestKind.TERMINATE and req.chosen and req.target not in partners:
                log.warning("%s: termination of non-partner %s dropped", company_id, req.target)
                continue
            out.append(req)
    return out


def assemble_inbox(
    outgoing_by_agent: Mapping[CompanyId, Sequence[RequestRecord]],
    features: Mapping[CompanyId, Mapping[str, float]],
    industries: Mapping[CompanyId, str],
) -> dict[CompanyId, list[InboxEntry]]:
    """Group chosen non-termination requests by their target.

    Entries are ordered would-be suppliers first, then would-be buyers,
    each sorted by requester id; duplicate (requester, direction) pairs
    collapse to one entry.
    """
    inboxes: dict[CompanyId, dict] = {}
    for requester in sorted(outgoing_by_agent):
        for req in outgoing_by_agent[requester]:
            if not req.chosen or req.kind is RequestKind.TERMINATE:
                continue
            direction = (
                ReplyDirection.REQUESTER_WANTS_TO_BUY
                if req.kind is RequestKind.ADD_AS_SUPPLIER
                else ReplyDirection.REQUESTER_WANTS_TO_SUPPLY
            )
            entry_key = (requester, direction)
            slot = inboxes.setdefault(req.target, {})
            if entry_key in slot:
                log.info(
                    "duplicate request %s -> %s (%s) collapsed", requester, req.target, direction.value
                )
                continue
            slot[entry_key] = InboxEntry(
                requester=requester,
                direction=direction,
                extra_info=req.extra_info,
                requester_industry=industries.get(requester, ""),
                requester_features=features.get(requester, {}),
            )
    ordered: dict[CompanyId, list[InboxEntry]] = {}
    for target in sorted(inboxes):
        entries = list(inboxes[target].values())
        entries.sort(
            key=lambda e: (e.direction is not ReplyDirection.REQUESTER_WANTS_TO_SUPPLY, e.requester)
        )
        ordered[target] = entries
    return ordered


def commit_deltas(
    edges: AbstractSet[Edge],
    terminated: Iterable[Edge],
    accepted: Iterable[Edge],
) -> frozenset[Edge]:
    """One atomic end-of-turn edge update.

    Terminations are applied first and win over same-turn re-adds;
    accepted edges are deduplicated; self-edges never enter.
    """
    terminated = set(terminated)
    result = set(edges) - terminated
    for edge in accepted:
        if edge in terminated:
            log.info("edge %s both terminated and re-added this turn; termination wins", edge)
            continue
        if edge[0] == edge[1]:
            log.warning("self-edge %s discarded at commit", edge)
            continue
        result.add(edge)
    return frozenset(result)


@dataclass
class _AgentWork:
    """Stages I-III output for one agent, before inboxes exist."""

    view: AgentView
    plans: tuple[PlanRecord, ...] = ()
    constraints: tuple[QueryConstraint, ...] = ()
    candidates: tuple[tuple[Candidate, ...], ...] = ()
    outgoing: tuple[RequestRecord, ...] = ()
    failed_stages: tuple[str, ...] = ()


def _reseed(policy: AgentPolicy, seed: int, t: int, company_id: CompanyId) -> None:
    hook = getattr(policy, "reseed", None)
    if hook is not None:
        hook(agent_seed(seed, t, company_id))


def _run_decision_stages(
    timeline: Timeline,
    company_id: CompanyId,
    policy: AgentPolicy,
    config: TurnConfig,
    knowledge: KnowledgeState | None,
    perf_at: Callable[[int], PerformanceMap],
    seed: int,
) -> _AgentWork:
    view = build_view(timeline, company_id, config, knowledge, perf_at)
    work = _AgentWork(view=view)
    t = timeline.last_t
    edges = timeline.edges_at(t)
    _reseed(policy, seed, t, company_id)
    try:
        plans = tuple(policy.plan(view))
    except PolicyFailure as e:
        log.warning("plan stage failed: %s", e)
        work.failed_stages = ("plan",)
        return work
    work.plans = plans
    if not plans:
        return work

    try:
        constraints = tuple(policy.constrain(view, plans))
    except PolicyFailure as e:
        log.warning("query stage failed: %s", e)
        work.failed_stages = ("query",)
        return work
    if len(constraints) != len(plans):
        log.warning(
            "%s: constraint count %d != plan count %d; agent no-ops",
            company_id,
            len(constraints),
            len(plans),
        )
        work.failed_stages = ("query",)
        return work
    work.constraints = constraints

    exclude = exclusion_set(edges, company_id)
    features = timeline.features_at(t)
    industries = {cid: timeline.dataset.companies[cid].industry for cid in features}
    candidates = []
    for plan, constraint in zip(plans, constraints):
        if plan.seek_collaboration:
            candidates.append(
                tuple(
                    query_candidates(
                        features,
                        industries,
                        timeline.dataset.feature_names,
                        constraint,
                        exclude,
                        config.candidate_k,
                    )
                )
            )
        else:
            candidates.append(())
    work.candidates = tuple(candidates)

    try:
        groups = policy.request(view, plans, constraints, work.candidates)
    except PolicyFailure as e:
        log.warning("request stage failed: %s", e)
        work.failed_stages = ("request",)
        return work
    partners = suppliers_in(edges, company_id) | customers_in(edges, company_id)
    work.outgoing = tuple(
        validate_requests(company_id, groups, plans, partners, set(timeline.dataset.companies))
    )
    return work


def _normalized_replies(inbox: Sequence[InboxEntry], replies: Sequence[ReplyRecord]) -> list[ReplyRecord]:
    """Exactly one reply per inbox entry, in inbox order; extras dropped."""
    by_key = {(r.requester, r.direction): r for r in replies}
    out = []
    for entry in inbox:
        reply = by_key.get((entry.requester, entry.direction))
        if reply is None:
            out.append(
                ReplyRecord(
                    requester=entry.requester,
                    direction=entry.direction,
                    accepted=False,
                    reason="No reply was produced for this request.",
                    synthetic=True,
                )
            )
        else:
            out.append(reply)
    return out


def make_perf_cache(timeline: Timeline, metric: str) -> Callable[[int], PerformanceMap]:
    cache: dict[int, PerformanceMap] = {}

    def perf_at(w: int) -> PerformanceMap:
        if w not in cache:
            cache[w] = performance(timeline.edges_at(w), timeline.dataset.company_ids, metric)
        return cache[w]

    return perf_at


def collect_commit(
    timeline: Timeline,
    work: Mapping[CompanyId, _AgentWork],
    replies_by_target: Mapping[CompanyId, Sequence[ReplyRecord]],
) -> tuple[frozenset[Edge], list[AgentTurnRecord]]:
    """Turn stage outputs into the committed edge set and per-firm records."""
    dataset = timeline.dataset
    edges = timeline.edges_at(timeline.last_t)

    accepted: set[Edge] = set()
    accepted_by_requester: dict[CompanyId, set[Edge]] = {}
    for target, replies in replies_by_target.items():
        for reply in replies:
            if not reply.accepted:
                continue
            edge = accepted_edge(reply.requester, DIRECTION_TO_KIND[reply.direction], target)
            accepted.add(edge)
            accepted_by_requester.setdefault(reply.requester, set()).add(edge)

    terminated: set[Edge] = set()
    terminated_by_agent: dict[CompanyId, set[Edge]] = {}
    for cid, w in work.items():
        for req in w.outgoing:
            if req.kind is RequestKind.TERMINATE and req.chosen:
                # a termination ends the partnership: both directions go
                for edge in ((req.target, cid), (cid, req.target)):
                    if edge in edges:
                        terminated.add(edge)
                        terminated_by_agent.setdefault(cid, set()).add(edge)

    next_edges = commit_deltas(edges, terminated, accepted)

    added_diff = next_edges - edges
    removed_diff = edges - next_edges
    records = []
    for cid in dataset.company_ids:
        w = work.get(cid)
        added = sorted(e for e in accepted_by_requester.get(cid, ()) if e in added_diff)
        removed = sorted(e for e in terminated_by_agent.get(cid, ()) if e in removed_diff)
        records.append(
            AgentTurnRecord(
                company_id=cid,
                plans=w.plans if w else (),
                constraints=w.constraints if w else (),
                candidates=w.candidates if w else (),
                outgoing=w.outgoing if w else (),
                replies=tuple(replies_by_target.get(cid, ())),
                added_edges=tuple(added),
                removed_edges=tuple(removed),
                failed_stages=w.failed_stages if w else (),
            )
        )
    return next_edges, records


def run_turn(
    timeline: Timeline,
    policies: Mapping[CompanyId, AgentPolicy],
    config: TurnConfig | None = None,
    seed: int = 0,
    knowledge: KnowledgeState | None = None,
) -> tuple[frozenset[Edge], list[AgentTurnRecord]]:
    """Advance the network one timestamp.

    Returns the committed edge set for t+1 and one record per firm
    (sorted by id) documenting what it planned, asked, and answered.
    """
    config = config or TurnConfig()
    dataset = timeline.dataset
    t = timeline.last_t
    all_ids = list(dataset.company_ids)
    active = sorted(config.active_agents) if config.active_agents is not None else all_ids
    for cid in active:
        dataset.company(cid)
        if cid not in policies:
            raise KeyError(f"no policy for active agent {cid!r}")

    perf_at = make_perf_cache(timeline, config.performance_metric)
    # warm the window cache serially so threads only read
    for w in range(max(0, t - config.reference_length + 1), t + 1):
        perf_at(w)

    def decide(cid: CompanyId) -> _AgentWork:
        return _run_decision_stages(timeline, cid, policies[cid], config, knowledge, perf_at, seed)

    if config.max_workers and config.max_workers > 1:
        with ThreadPoolExecutor(max_workers=config.max_workers) as pool:
            work = dict(zip(active, pool.map(decide, active)))
    else:
        work = {cid: decide(cid) for cid in active}

    outgoing_by_agent = {cid: w.outgoing for cid, w in work.items()}
    features = timeline.features_at(t)
    industries = {cid: dataset.companies[cid].industry for cid in dataset.companies}
    inboxes = assemble_inbox(outgoing_by_agent, features, industries)

    def answer(target: CompanyId) -> list[ReplyRecord]:
        inbox = inboxes[target]
        if target not in policies:
            # a firm without a policy declines everything
            log.warning("no policy for reply target %s; declining %d", target, len(inbox))
            return _normalized_replies(inbox, [])
        if target in work:
            view = work[target].view
        else:
            view = build_view(timeline, target, config, knowledge, perf_at)
        _reseed(policies[target], seed, t, f"{target}:reply")
        try:
            return _normalized_replies(inbox, policies[target].reply(view, inbox))
        except PolicyFailure as e:
            log.warning("reply stage failed: %s", e)
            if target in work:
                work[target].failed_stages = work[target].failed_stages + ("reply",)
            return _normalized_replies(inbox, [])

    targets = sorted(inboxes)
    if config.max_workers and config.max_workers > 1:
        with ThreadPoolExecutor(max_workers=config.max_workers) as pool:
            replies_by_target = dict(zip(targets, pool.map(answer, targets)))
    else:
        replies_by_target = {target: answer(target) for target in targets}

    return collect_commit(timeline, work, replies_by_target)
