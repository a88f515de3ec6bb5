"""Branching what-if sessions and their HTTP surface."""

from .service import RunState, Session, SessionConfig, SessionService, build_policies
from .store import SessionStore
from .tree import NodeStatus, PathTree, SimulationNode

__all__ = [
    "NodeStatus",
    "PathTree",
    "RunState",
    "Session",
    "SessionConfig",
    "SessionService",
    "SessionStore",
    "SimulationNode",
    "build_policies",
]
