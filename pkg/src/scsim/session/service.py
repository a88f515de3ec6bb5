"""Sessions: configuration, simulation runs, adjustments, and export.

A session pins one dataset to one configuration and grows a branching
tree of simulated steps on top of the observed history. All writes to
one session are serialized behind its lock; reads work on immutable
snapshots. Feature forecasting models are fitted once per session on
the observed history only, so every branch extends features the same
way and run(k) equals k successive run(1) calls.
"""

from __future__ import annotations

import json
import logging
import threading
from dataclasses import dataclass, field, replace
from typing import Any, Mapping

from ..errors import (
    InvalidConfig,
    InvalidReference,
    NodeNotSimulated,
    ParseError,
    UnknownNode,
    UnknownSession,
    UnknownView,
)
from ..explain import Predictor, fit_firm_explainer
from ..horizon import ExtenderModel, extend, fit_extender, model_selection_report
from ..ingest import dataset_from_doc, dataset_to_doc
from ..layout import focus_layout, global_embedding
from ..metrics import METRICS, performance
from ..model import CompanyId, Dataset, Timeline, next_label
from ..protocol.adjust import Adjustment, recompute_turn, validate_adjustment
from ..protocol.engine import KnowledgeState, TurnConfig, run_turn
from ..protocol.llm import HttpTransport, LLMPolicy, ReplayTransport, Transport
from ..protocol.policy import AgentPolicy, RulePolicy
from ..protocol.records import AgentTurnRecord
from ..regression import MODEL_KINDS
from .store import SessionStore
from .tree import NodeStatus, PathTree, SimulationNode

log = logging.getLogger(__name__)

EXPORT_VERSION = "session/v1"
POLICY_KINDS = ("rule", "llm")


@dataclass(frozen=True)
class SessionConfig:
    performance_metric: str = "pagerank"
    explain_model_kind: str = "lasso"
    horizon_model_kind: str = "linear"
    agent_policy_kind: str = "rule"
    llm: Mapping[str, str] | None = None  # url / model / key overrides
    reference_length: int = 4
    simulation_turns: int = 4
    candidate_k: int = 5
    lam: float | None = None
    seed: int = 0
    max_workers: int | None = None

    def validate(self) -> None:
        if self.performance_metric not in METRICS:
            raise InvalidConfig(f"unknown metric {self.performance_metric!r}")
        for kind in (self.explain_model_kind, self.horizon_model_kind):
            if kind not in MODEL_KINDS:
                raise InvalidConfig(f"unknown model kind {kind!r}")
        if self.agent_policy_kind not in POLICY_KINDS:
            raise InvalidConfig(f"unknown policy kind {self.agent_policy_kind!r}")
        if self.reference_length < 1:
            raise InvalidConfig("reference length must be at least 1")
        if self.simulation_turns < 1:
            raise InvalidConfig("simulation turns must be at least 1")
        if self.candidate_k < 1:
            raise InvalidConfig("candidate count must be at least 1")

    def to_doc(self) -> dict:
        return {
            "performanceMetric": self.performance_metric,
            "explainModelKind": self.explain_model_kind,
            "horizonModelKind": self.horizon_model_kind,
            "agentPolicyKind": self.agent_policy_kind,
            "llm": dict(self.llm) if self.llm else None,
            "referenceLength": self.reference_length,
            "simulationTurns": self.simulation_turns,
            "candidateK": self.candidate_k,
            "lam": self.lam,
            "seed": self.seed,
            "maxWorkers": self.max_workers,
        }

    @classmethod
    def from_doc(cls, doc: Mapping[str, Any]) -> "SessionConfig":
        cfg = cls(
            performance_metric=doc.get("performanceMetric", "pagerank"),
            explain_model_kind=doc.get("explainModelKind", "lasso"),
            horizon_model_kind=doc.get("horizonModelKind", "linear"),
            agent_policy_kind=doc.get("agentPolicyKind", "rule"),
            llm=doc.get("llm"),
            reference_length=doc.get("referenceLength", 4),
            simulation_turns=doc.get("simulationTurns", 4),
            candidate_k=doc.get("candidateK", 5),
            lam=doc.get("lam"),
            seed=doc.get("seed", 0),
            max_workers=doc.get("maxWorkers"),
        )
        cfg.validate()
        return cfg


@dataclass
class RunState:
    run_id: str
    status: str = "running"  # running | done | failed
    nodes: list[str] = field(default_factory=list)
    error: str | None = None

    def to_doc(self) -> dict:
        return {
            "runId": self.run_id,
            "status": self.status,
            "nodes": list(self.nodes),
            "error": self.error,
        }


class Session:
    def __init__(self, session_id: str, dataset: Dataset, config: SessionConfig) -> None:
        self.session_id = session_id
        self.dataset = dataset
        self.config = config
        self.tree = PathTree.historical_chain(dataset)
        self.active = self.tree.nodes[-1].node_id
        self.knowledge = KnowledgeState()
        self.staged: dict[str, list[Adjustment]] = {}
        self.journal: list[dict] = []
        self.runs: dict[str, RunState] = {}
        self.lock = threading.RLock()
        self._extenders: dict[tuple[CompanyId, str], ExtenderModel] | None = None
        self._predictors: dict[tuple[str, str], dict[CompanyId, Predictor]] = {}
        self._selection_report_doc: dict | None = None

    # --- journal -----------------------------------------------------

    def journal_event(self, event: str, **payload: Any) -> dict:
        entry = {"seq": len(self.journal), "event": event, **payload}
        self.journal.append(entry)
        return entry

    # --- models ------------------------------------------------------

    def extenders(self) -> dict[tuple[CompanyId, str], ExtenderModel]:
        """Feature forecasters, fitted once on the observed history."""
        if self._extenders is None:
            cfg = self.config
            historical = Timeline.from_dataset(self.dataset)
            w = min(cfg.reference_length, self.dataset.n_timestamps - 1)
            fitted = {}
            for cid in self.dataset.company_ids:
                for feat in self.dataset.feature_names:
                    fitted[(cid, feat)] = fit_extender(
                        historical.feature_series(cid, feat),
                        kind=cfg.horizon_model_kind,
                        w=w,
                        lam=cfg.lam,
                        seed=cfg.seed,
                    )
            self._extenders = fitted
        return self._extenders

    def predictors_for(self, node_id: str) -> dict[CompanyId, Predictor]:
        """Per-firm performance explainers over the path to ``node_id``."""
        key = (node_id, self.config.explain_model_kind)
        if key not in self._predictors:
            timeline = self.tree.timeline_at(node_id, self.dataset)
            fitted = {}
            for cid in self.dataset.company_ids:
                try:
                    fitted[cid] = fit_firm_explainer(
                        timeline,
                        cid,
                        kind=self.config.explain_model_kind,
                        lam=self.config.lam,
                        seed=self.config.seed,
                        metric=self.config.performance_metric,
                    )
                except Exception as e:  # noqa: BLE001 - per-firm fit is best effort
                    log.warning("explainer fit failed for %s: %s", cid, e)
            self._predictors[key] = fitted
        return self._predictors[key]

    def selection_report_doc(self) -> dict:
        if self._selection_report_doc is None:
            report = model_selection_report(
                Timeline.from_dataset(self.dataset),
                w=self.config.reference_length,
                lam=self.config.lam,
                seed=self.config.seed,
            )
            self._selection_report_doc = report.to_doc()
        return self._selection_report_doc


def build_policies(
    config: SessionConfig,
    dataset: Dataset,
    transport: Transport | None = None,
) -> dict[CompanyId, AgentPolicy]:
    """One policy instance shared by all firms, per the configured kind."""
    if config.agent_policy_kind == "rule":
        policy: AgentPolicy = RulePolicy()
    else:
        llm = dict(config.llm or {})
        if transport is None:
            if llm.get("transcript"):
                transport = ReplayTransport(llm["transcript"])
            elif llm.get("url") and llm.get("model"):
                transport = HttpTransport(llm["url"], llm["model"], llm.get("key", ""))
            else:
                transport = HttpTransport.from_env()
        policy = LLMPolicy(transport)
    return {cid: policy for cid in dataset.company_ids}


class SessionService:
    """All sessions and datasets of one process, write-through to disk."""

    def __init__(self, store: SessionStore | None = None) -> None:
        self.store = store or SessionStore()
        self.datasets: dict[str, Dataset] = {}
        self.sessions: dict[str, Session] = {}
        self._lock = threading.Lock()
        self.transport_factory = None  # test hook: config -> Transport

    # --- registry ----------------------------------------------------

    def add_dataset(self, dataset: Dataset) -> str:
        with self._lock:
            dataset_id = f"d{len(self.datasets) + 1}"
            self.datasets[dataset_id] = dataset
        self.store.save_dataset(dataset_id, dataset_to_doc(dataset))
        return dataset_id

    def dataset(self, dataset_id: str) -> Dataset:
        if dataset_id not in self.datasets:
            doc = self.store.load_dataset(dataset_id)
            if doc is None:
                raise UnknownSession(f"no dataset {dataset_id!r}")
            self.datasets[dataset_id] = dataset_from_doc(doc)
        return self.datasets[dataset_id]

    def session(self, session_id: str) -> Session:
        if session_id not in self.sessions:
            raise UnknownSession(f"no session {session_id!r}")
        return self.sessions[session_id]

    # --- operations --------------------------------------------------

    def create_session(self, dataset_id: str, config: SessionConfig) -> str:
        config.validate()
        dataset = self.dataset(dataset_id)
        with self._lock:
            session_id = f"s{len(self.sessions) + 1}"
            session = Session(session_id, dataset, config)
            self.sessions[session_id] = session
        session.journal_event(
            "session_created", datasetId=dataset_id, config=config.to_doc()
        )
        self._persist(session)
        return session_id

    def run_simulation(
        self,
        session_id: str,
        from_node: str | None = None,
        turns: int | None = None,
        run_id: str | None = None,
        transport: Transport | None = None,
    ) -> RunState:
        """Simulate ``turns`` steps under ``from_node`` as a new chain.

        Synchronous; the API layer wraps it in a thread for polling.
        The per-turn seed depends only on the configured seed and the
        turn's timestamp, so identical reruns build identical branches.
        """
        session = self.session(session_id)
        with session.lock:
            config = session.config
            turns = config.simulation_turns if turns is None else turns
            if turns < 1:
                raise InvalidConfig("turns must be at least 1")
            start = session.active if from_node is None else from_node
            base_node = session.tree.get(start)
            run = session.runs.get(run_id) if run_id else None
            if run is None:
                run = RunState(run_id=run_id or f"r{len(session.runs) + 1}")
                session.runs[run.run_id] = run
            session.journal_event(
                "run_started", runId=run.run_id, fromNode=start, turns=turns
            )
            try:
                extenders = session.extenders()
                timeline = session.tree.timeline_at(start, session.dataset)
                if transport is None and self.transport_factory is not None:
                    transport = self.transport_factory(config)
                policies = build_policies(config, session.dataset, transport)
                parent = base_node.node_id
                for _ in range(turns):
                    t = timeline.last_t
                    turn_config = TurnConfig(
                        reference_length=config.reference_length,
                        performance_metric=config.performance_metric,
                        candidate_k=config.candidate_k,
                        max_workers=config.max_workers,
                    )
                    seed = config.seed + t + 1
                    next_edges, records = run_turn(
                        timeline, policies, turn_config, seed=seed,
                        knowledge=session.knowledge,
                    )
                    features = self._extend_features(session, extenders, timeline)
                    label = next_label(timeline.labels)
                    node = SimulationNode(
                        node_id=session.tree.next_id(),
                        parent=parent,
                        t=t + 1,
                        label=label,
                        status=NodeStatus.SIMULATED,
                        edges=next_edges,
                        features=features,
                        records=tuple(records),
                        provenance={"runId": run.run_id, "seed": seed},
                    )
                    session.tree.add(node)
                    run.nodes.append(node.node_id)
                    session.journal_event(
                        "node_committed", nodeId=node.node_id, runId=run.run_id
                    )
                    self.store.save_node(session.session_id, self._node_doc(node))
                    timeline = timeline.extended(next_edges, features, label)
                    parent = node.node_id
                session.active = parent
                run.status = "done"
                session.journal_event("run_finished", runId=run.run_id, active=parent)
            except Exception as e:
                run.status = "failed"
                run.error = str(e)
                session.journal_event("run_failed", runId=run.run_id, error=str(e))
                self._persist(session)
                raise
            self._persist(session)
            return run

    @staticmethod
    def _extend_features(session: Session, extenders, timeline: Timeline):
        out: dict[CompanyId, dict[str, float]] = {}
        for cid in session.dataset.company_ids:
            row = {}
            for feat in session.dataset.feature_names:
                series = timeline.feature_series(cid, feat)
                row[feat] = round(extend(extenders[(cid, feat)], series), 6)
            out[cid] = row
        return out

    def run_state(self, session_id: str, run_id: str) -> RunState:
        session = self.session(session_id)
        if run_id not in session.runs:
            raise UnknownNode(f"no run {run_id!r}")
        return session.runs[run_id]

    # --- adjustments -------------------------------------------------

    def _simulated_node(self, session: Session, node_id: str) -> SimulationNode:
        node = session.tree.get(node_id)
        if node.status is not NodeStatus.SIMULATED:
            raise NodeNotSimulated(f"node {node_id!r} is {node.status.value}")
        return node

    def stage_adjustment(
        self, session_id: str, node_id: str, adjustment: Adjustment
    ) -> list[Adjustment]:
        session = self.session(session_id)
        with session.lock:
            node = self._simulated_node(session, node_id)
            parent_timeline = session.tree.timeline_at(node.parent, session.dataset)
            validate_adjustment(
                adjustment, node.records, parent_timeline, parent_timeline.last_t
            )
            staged = session.staged.setdefault(node_id, [])
            staged.append(adjustment)
            session.journal_event(
                "adjustment_staged", nodeId=node_id, adjustment=adjustment.to_dict()
            )
            self._persist(session)
            return list(staged)

    def staged_adjustments(self, session_id: str, node_id: str) -> list[Adjustment]:
        session = self.session(session_id)
        session.tree.get(node_id)
        return list(session.staged.get(node_id, []))

    def reset_adjustments(self, session_id: str, node_id: str) -> None:
        session = self.session(session_id)
        with session.lock:
            session.tree.get(node_id)
            had = bool(session.staged.pop(node_id, None))
            session.journal_event("adjustments_reset", nodeId=node_id, cleared=had)
            self._persist(session)

    def apply_adjustments(
        self, session_id: str, node_id: str, transport: Transport | None = None
    ) -> str:
        """Recompute the node's turn with its staged edits on a new branch.

        The new node is a sibling of the adjusted one (same parent); the
        original stays untouched and the active pointer moves over.
        """
        session = self.session(session_id)
        with session.lock:
            node = self._simulated_node(session, node_id)
            staged = session.staged.get(node_id, [])
            if not staged:
                raise InvalidReference(f"no staged adjustments on {node_id!r}")
            parent_timeline = session.tree.timeline_at(node.parent, session.dataset)
            if transport is None and self.transport_factory is not None:
                transport = self.transport_factory(session.config)
            policies = build_policies(session.config, session.dataset, transport)
            config = session.config
            turn_config = TurnConfig(
                reference_length=config.reference_length,
                performance_metric=config.performance_metric,
                candidate_k=config.candidate_k,
                max_workers=config.max_workers,
            )
            seed = int(node.provenance.get("seed", config.seed + node.t))
            next_edges, records = recompute_turn(
                parent_timeline,
                node.records,
                staged,
                policies,
                turn_config,
                seed=seed,
                knowledge=session.knowledge,
            )
            new_node = SimulationNode(
                node_id=session.tree.next_id(),
                parent=node.parent,
                t=node.t,
                label=node.label,
                status=NodeStatus.SIMULATED,
                edges=next_edges,
                features=node.features,
                records=tuple(records),
                provenance={
                    "adjustedFrom": node_id,
                    "adjustments": [a.to_dict() for a in staged],
                    "seed": seed,
                },
            )
            session.tree.add(new_node)
            session.active = new_node.node_id
            session.staged.pop(node_id, None)
            session.journal_event(
                "adjustments_applied",
                nodeId=node_id,
                newNode=new_node.node_id,
                adjustments=[a.to_dict() for a in staged],
            )
            self.store.save_node(session.session_id, self._node_doc(new_node))
            self._persist(session)
            return new_node.node_id

    # --- knowledge ---------------------------------------------------

    def knowledge_update(self, session_id: str, scope: str, text: str) -> None:
        session = self.session(session_id)
        with session.lock:
            if scope == "global":
                session.knowledge = replace(session.knowledge, global_text=text)
            else:
                session.dataset.company(scope)
                per = dict(session.knowledge.per_company)
                per[scope] = text
                session.knowledge = replace(session.knowledge, per_company=per)
            session.journal_event("knowledge_updated", scope=scope, text=text)
            self._persist(session)

    # --- views -------------------------------------------------------

    def tree_doc(self, session_id: str) -> dict:
        session = self.session(session_id)
        nodes = []
        for node in session.tree.nodes:
            status = "Active" if node.node_id == session.active else node.status.value
            nodes.append(
                {
                    "nodeId": node.node_id,
                    "parent": node.parent,
                    "t": node.t,
                    "label": node.label,
                    "status": status,
                    "runId": node.provenance.get("runId"),
                    "adjustedFrom": node.provenance.get("adjustedFrom"),
                    "hasStaged": bool(session.staged.get(node.node_id)),
                }
            )
        return {"sessionId": session_id, "active": session.active, "nodes": nodes}

    def fetch_view(
        self, session_id: str, node_id: str, kind: str, params: Mapping[str, Any] | None = None
    ) -> dict:
        session = self.session(session_id)
        node = session.tree.get(node_id)
        params = params or {}
        if kind == "global":
            return self._global_view(session, node)
        if kind == "focus":
            return self._focus_view(session, node, params)
        if kind == "adjustment":
            return self._adjustment_view(session, node, params)
        if kind == "controlpanel":
            return self._controlpanel_view(session, node, params)
        raise UnknownView(f"no view kind {kind!r}")

    def _global_view(self, session: Session, node: SimulationNode) -> dict:
        timeline = session.tree.timeline_at(node.node_id, session.dataset)
        doc = global_embedding(timeline).to_doc()
        metric = session.config.performance_metric
        for t, panel in enumerate(doc["panels"]):
            edges = timeline.edges_at(t)
            perf = performance(edges, session.dataset.company_ids, metric)
            panel["edges"] = sorted([s, c] for s, c in edges)
            panel["performance"] = {cid: perf[cid] for cid in sorted(perf)}
            panel["simulated"] = t >= session.dataset.n_timestamps
        doc["industries"] = {
            cid: session.dataset.companies[cid].industry
            for cid in session.dataset.company_ids
        }
        return doc

    def _focus_view(self, session: Session, node: SimulationNode, params) -> dict:
        focal_ids = params.get("focus") or []
        if isinstance(focal_ids, str):
            focal_ids = [x for x in focal_ids.split(",") if x]
        if not focal_ids:
            raise InvalidConfig("focus view needs at least one focal company")
        timeline = session.tree.timeline_at(node.node_id, session.dataset)
        t_lo = int(params.get("from", 0))
        t_hi = int(params.get("to", timeline.last_t))
        if not 0 <= t_lo <= t_hi <= timeline.last_t:
            raise InvalidConfig(f"bad timestamp range {t_lo}..{t_hi}")
        predictors = session.predictors_for(node.node_id)
        doc = focus_layout(
            timeline,
            list(focal_ids),
            predictors,
            t_range=range(t_lo, t_hi + 1),
            metric=session.config.performance_metric,
        ).to_doc()
        doc["industries"] = {
            cid: session.dataset.companies[cid].industry
            for cid in session.dataset.company_ids
        }
        return doc

    def _adjustment_view(self, session: Session, node: SimulationNode, params) -> dict:
        company_id = params.get("company")
        if not company_id:
            raise InvalidConfig("adjustment view needs a company id")
        session.dataset.company(company_id)
        if node.status is not NodeStatus.SIMULATED:
            raise NodeNotSimulated(f"node {node.node_id!r} is {node.status.value}")
        record = next(r for r in node.records if r.company_id == company_id)
        incoming = []
        for other in node.records:
            for req in other.outgoing:
                if req.target == company_id and req.chosen:
                    reply = next(
                        (
                            rep.to_dict()
                            for rep in record.replies
                            if rep.requester == other.company_id
                        ),
                        None,
                    )
                    incoming.append(
                        {
                            "requester": other.company_id,
                            "request": req.to_dict(),
                            "reply": reply,
                        }
                    )
        outgoing = []
        for i, plan in enumerate(record.plans):
            outgoing.append(
                {
                    "planIndex": i,
                    "plan": plan.to_dict(),
                    "constraint": {
                        "industry_set": list(record.constraints[i].industry_set),
                        "weighted_scores": [
                            [n, w] for n, w in record.constraints[i].weighted_scores
                        ],
                    }
                    if i < len(record.constraints)
                    else None,
                    "candidates": [
                        {"companyId": c.company_id, "score": c.score}
                        for c in (
                            record.candidates[i] if i < len(record.candidates) else ()
                        )
                    ],
                    "requests": [
                        r.to_dict() for r in record.outgoing if r.plan_index == i
                    ],
                }
            )
        return {
            "companyId": company_id,
            "knowledge": session.knowledge.for_company(session.dataset, company_id),
            "outgoing": outgoing,
            "incoming": incoming,
            "replies": [r.to_dict() for r in record.replies],
            "failedStages": list(record.failed_stages),
            "staged": [a.to_dict() for a in session.staged.get(node.node_id, [])],
        }

    def _controlpanel_view(self, session: Session, node: SimulationNode, params) -> dict:
        timeline = session.tree.timeline_at(node.node_id, session.dataset)
        doc = {
            "config": session.config.to_doc(),
            "metrics": sorted(METRICS),
            "modelKinds": sorted(MODEL_KINDS),
            "policyKinds": list(POLICY_KINDS),
            "labels": list(timeline.labels),
            "historyLength": session.dataset.n_timestamps,
            "globalKnowledge": session.knowledge.global_for(session.dataset),
            "selection": session.selection_report_doc(),
        }
        company_id = params.get("company")
        if company_id:
            session.dataset.company(company_id)
            doc["company"] = {
                "companyId": company_id,
                "knowledge": session.knowledge.for_company(session.dataset, company_id),
                "features": {
                    feat: timeline.feature_series(company_id, feat)
                    for feat in session.dataset.feature_names
                },
            }
        return doc

    # --- export / import --------------------------------------------

    def _node_doc(self, node: SimulationNode) -> dict:
        doc = node.to_doc()
        doc["records"] = [r.to_dict() for r in node.records]
        return doc

    def export_log(self, session_id: str) -> str:
        """Self-contained JSONL: meta, dataset, journal, nodes, records.

        Contains no session id and no wall-clock times, so identical
        histories export to identical bytes.
        """
        session = self.session(session_id)
        with session.lock:
            lines = [
                {
                    "type": "meta",
                    "version": EXPORT_VERSION,
                    "config": session.config.to_doc(),
                    "active": session.active,
                    "knowledge": {
                        "global": session.knowledge.global_text,
                        "perCompany": dict(sorted(session.knowledge.per_company.items())),
                    },
                },
                {"type": "dataset", "doc": dataset_to_doc(session.dataset)},
            ]
            lines.extend({"type": "journal", **entry} for entry in session.journal)
            for node in session.tree.nodes:
                lines.append({"type": "node", "doc": node.to_doc()})
                lines.extend(
                    {
                        "type": "record",
                        "nodeId": node.node_id,
                        "companyId": rec.company_id,
                        "record": rec.to_dict(),
                    }
                    for rec in node.records
                )
        return "".join(
            json.dumps(line, sort_keys=True, separators=(",", ":")) + "\n"
            for line in lines
        )

    def import_log(self, text: str) -> str:
        """Rebuild a session from an exported log; returns the new id."""
        meta = None
        dataset_doc = None
        journal: list[dict] = []
        node_docs: list[dict] = []
        records: dict[str, list[AgentTurnRecord]] = {}
        for i, raw in enumerate(text.splitlines()):
            if not raw.strip():
                continue
            try:
                line = json.loads(raw)
            except json.JSONDecodeError as e:
                raise ParseError(f"line {i + 1}: {e}", line=i + 1) from None
            kind = line.get("type")
            if kind == "meta":
                meta = line
            elif kind == "dataset":
                dataset_doc = line["doc"]
            elif kind == "journal":
                journal.append({k: v for k, v in line.items() if k != "type"})
            elif kind == "node":
                node_docs.append(line["doc"])
            elif kind == "record":
                records.setdefault(line["nodeId"], []).append(
                    AgentTurnRecord.from_dict(line["record"])
                )
            else:
                raise ParseError(f"line {i + 1}: unknown line type {kind!r}", line=i + 1)
        if meta is None or dataset_doc is None:
            raise ParseError("log is missing its meta or dataset line", line=0)
        if meta.get("version") != EXPORT_VERSION:
            raise InvalidConfig(f"unsupported log version {meta.get('version')!r}")

        dataset = dataset_from_doc(dataset_doc)
        config = SessionConfig.from_doc(meta["config"])
        dataset_id = self.add_dataset(dataset)
        with self._lock:
            session_id = f"s{len(self.sessions) + 1}"
            session = Session(session_id, dataset, config)
            self.sessions[session_id] = session
        session.journal = journal
        know = meta.get("knowledge", {})
        session.knowledge = KnowledgeState(
            global_text=know.get("global"), per_company=dict(know.get("perCompany", {}))
        )
        for doc in node_docs:
            if doc["nodeId"] in session.tree:
                continue  # historical chain was rebuilt from the dataset
            session.tree.add(
                SimulationNode.from_doc(doc, records.get(doc["nodeId"], []))
            )
        run_ids = {
            n.provenance.get("runId")
            for n in session.tree.nodes
            if n.provenance.get("runId")
        }
        for rid in sorted(run_ids):
            session.runs[rid] = RunState(
                run_id=rid,
                status="done",
                nodes=[
                    n.node_id
                    for n in session.tree.nodes
                    if n.provenance.get("runId") == rid
                ],
            )
        active = meta.get("active")
        session.active = active if active in session.tree else session.tree.nodes[-1].node_id
        self._persist(session)
        log.info("imported session %s (dataset %s)", session_id, dataset_id)
        return session_id

    def _persist(self, session: Session) -> None:
        self.store.save_session(
            session.session_id,
            {
                "config": session.config.to_doc(),
                "active": session.active,
                "journal": session.journal,
            },
        )
