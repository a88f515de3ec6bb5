"""Turn protocol: records, prompts, policies, and the engine."""

from .adjust import Action, Adjustment, TargetKind, TargetRef, recompute_turn
from .engine import (
    KnowledgeState,
    TurnConfig,
    agent_seed,
    assemble_inbox,
    build_view,
    commit_deltas,
    run_turn,
    validate_requests,
)
from .llm import (
    HttpTransport,
    LLMPolicy,
    RecordingTransport,
    ReplayTransport,
    ScriptedTransport,
    Transport,
)
from .policy import AgentPolicy, RulePolicy, RulePolicyParams
from .records import (
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

__all__ = [
    "Action",
    "Adjustment",
    "AgentPolicy",
    "AgentTurnRecord",
    "AgentView",
    "HttpTransport",
    "InboxEntry",
    "KnowledgeState",
    "LLMPolicy",
    "PartnerInfo",
    "PlanRecord",
    "RecordingTransport",
    "ReplayTransport",
    "ReplyDirection",
    "ReplyRecord",
    "RequestKind",
    "RequestRecord",
    "RulePolicy",
    "RulePolicyParams",
    "ScriptedTransport",
    "TargetKind",
    "TargetRef",
    "Transport",
    "TurnConfig",
    "accepted_edge",
    "agent_seed",
    "assemble_inbox",
    "build_view",
    "commit_deltas",
    "recompute_turn",
    "run_turn",
    "validate_requests",
]
