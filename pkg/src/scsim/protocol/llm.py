"""LLM-backed policy: transports, stage schemas, and the repair loop.

Every stage is one completion call. A response must parse as the
stage's JSON shape; a bad response is retried with the validation error
appended, up to MAX_REPAIR times, after which the stage raises
PolicyFailure and the engine lets the agent sit the turn out.

The HTTP transport speaks the chat-completions JSON dialect and is
configured from SCSIM_LLM_URL / SCSIM_LLM_MODEL / SCSIM_LLM_KEY. The
replay transport serves responses from a recorded transcript directory
so runs are reproducible offline.
"""

from __future__ import annotations

import json
import logging
import os
from abc import ABC, abstractmethod
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import httpx

from ..errors import PolicyFailure, SchemaViolation, TransportError
from ..query import Candidate, QueryConstraint
from . import prompts
from .policy import AgentPolicy
from .records import (
    AgentView,
    InboxEntry,
    PlanRecord,
    ReplyRecord,
    RequestKind,
    RequestRecord,
)

log = logging.getLogger(__name__)

MAX_REPAIR = 3

ENV_URL = "SCSIM_LLM_URL"
ENV_MODEL = "SCSIM_LLM_MODEL"
ENV_KEY = "SCSIM_LLM_KEY"

TRANSCRIPT_FILE = "transcript.jsonl"


@dataclass(frozen=True)
class CallKey:
    """Identifies one completion call so transcripts can be replayed."""

    company_id: str
    t: int
    stage: str
    attempt: int = 0

    def replay_key(self) -> tuple[str, int, str]:
        # attempts replay in order within (company, t, stage)
        return (self.company_id, self.t, self.stage)


class Transport(ABC):
    @abstractmethod
    def complete(self, key: CallKey, prompt: str) -> str:
        raise NotImplementedError


class HttpTransport(Transport):
    """Chat-completions over HTTPS."""

    def __init__(
        self,
        base_url: str,
        model: str,
        api_key: str = "",
        temperature: float | None = None,
        timeout: float = 120.0,
    ):
        self.base_url = base_url.rstrip("/")
        self.model = model
        self.api_key = api_key
        self.temperature = temperature
        self.timeout = timeout

    @classmethod
    def from_env(cls, temperature: float | None = None) -> "HttpTransport":
        url = os.environ.get(ENV_URL)
        model = os.environ.get(ENV_MODEL)
        if not url or not model:
            raise TransportError(f"{ENV_URL} and {ENV_MODEL} must be set for the http transport")
        return cls(url, model, os.environ.get(ENV_KEY, ""), temperature=temperature)

    def complete(self, key: CallKey, prompt: str) -> str:
        body: dict = {
            "model": self.model,
            "messages": [{"role": "user", "content": prompt}],
        }
        if self.temperature is not None:
            body["temperature"] = self.temperature
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        try:
            response = httpx.post(
                f"{self.base_url}/chat/completions", json=body, headers=headers, timeout=self.timeout
            )
        except httpx.HTTPError as e:
            raise TransportError(f"llm request failed: {e}") from e
        if response.status_code != 200:
            raise TransportError(f"llm returned HTTP {response.status_code}: {response.text[:200]}")
        try:
            return response.json()["choices"][0]["message"]["content"]
        except (KeyError, IndexError, ValueError) as e:
            raise TransportError(f"malformed completion payload: {e}") from e


class ReplayTransport(Transport):
    """Serves recorded responses from ``<directory>/transcript.jsonl``.

    Responses are consumed in file order within each (company, t, stage)
    group, so repair retries replay exactly as recorded.
    """

    def __init__(self, directory: str | Path):
        path = Path(directory) / TRANSCRIPT_FILE
        if not path.is_file():
            raise TransportError(f"no transcript at {path}")
        self._queues: dict[tuple[str, int, str], list[str]] = {}
        with path.open(encoding="utf-8") as fh:
            for line in fh:
                if not line.strip():
                    continue
                entry = json.loads(line)
                key = (entry["company_id"], int(entry["t"]), entry["stage"])
                self._queues.setdefault(key, []).append(entry["response"])

    def complete(self, key: CallKey, prompt: str) -> str:
        queue = self._queues.get(key.replay_key())
        if not queue:
            raise TransportError(f"transcript exhausted for {key.replay_key()}")
        return queue.pop(0)


class RecordingTransport(Transport):
    """Wraps a transport and appends every exchange to a transcript file."""

    def __init__(self, inner: Transport, directory: str | Path):
        self.inner = inner
        self.path = Path(directory) / TRANSCRIPT_FILE
        self.path.parent.mkdir(parents=True, exist_ok=True)

    def complete(self, key: CallKey, prompt: str) -> str:
        response = self.inner.complete(key, prompt)
        entry = {
            "company_id": key.company_id,
            "t": key.t,
            "stage": key.stage,
            "attempt": key.attempt,
            "response": response,
        }
        with self.path.open("a", encoding="utf-8") as fh:
            fh.write(json.dumps(entry, sort_keys=True) + "\n")
        return response


class ScriptedTransport(Transport):
    """In-memory queues keyed by (company, t, stage); for tests."""

    def __init__(self, script: dict[tuple[str, int, str], list[str]]):
        self._queues = {k: list(v) for k, v in script.items()}
        self.calls: list[CallKey] = []
        self.prompts: list[str] = []

    def complete(self, key: CallKey, prompt: str) -> str:
        self.calls.append(key)
        self.prompts.append(prompt)
        queue = self._queues.get(key.replay_key())
        if not queue:
            raise TransportError(f"no scripted response for {key.replay_key()}")
        return queue.pop(0)


# --- response parsing -------------------------------------------------------

def extract_json(text: str):
    """Pull the first JSON array out of a completion, tolerating fences."""
    stripped = text.strip()
    if stripped.startswith("```"):
        first_newline = stripped.find("\n")
        if first_newline != -1:
            stripped = stripped[first_newline + 1 :]
        if stripped.rstrip().endswith("```"):
            stripped = stripped.rstrip()[:-3]
    start = stripped.find("[")
    if start == -1:
        raise SchemaViolation("no JSON array found in the response")
    decoder = json.JSONDecoder()
    try:
        doc, _ = decoder.raw_decode(stripped[start:])
    except json.JSONDecodeError as e:
        raise SchemaViolation(f"response is not valid JSON: {e}") from e
    return doc


def _require(entry, index: int, field: str, kinds, label: str):
    if field not in entry:
        raise SchemaViolation(f"{label} entry {index} is missing field {field!r}")
    value = entry[field]
    if not isinstance(value, kinds):
        names = kinds.__name__ if isinstance(kinds, type) else "/".join(k.__name__ for k in kinds)
        raise SchemaViolation(f"{label} entry {index} field {field!r} must be {names}")
    return value


def parse_plans(text: str) -> list[PlanRecord]:
    doc = extract_json(text)
    if not isinstance(doc, list):
        raise SchemaViolation("stage output must be a JSON array of plan objects")
    plans = []
    for i, entry in enumerate(doc):
        if not isinstance(entry, dict):
            raise SchemaViolation(f"plan entry {i} must be an object")
        description = _require(entry, i, "plan", str, "plan")
        reason = _require(entry, i, "reason", str, "plan")
        seek = _require(entry, i, "is_seek_collaboration", bool, "plan")
        seek_suppliers = _require(entry, i, "is_seek_suppliers", bool, "plan")
        if not description.strip() or not reason.strip():
            raise SchemaViolation(f"plan entry {i} has an empty plan or reason")
        plans.append(
            PlanRecord(
                description=description,
                reason=reason,
                seek_collaboration=seek,
                seek_suppliers=seek_suppliers,
            )
        )
    return plans


def parse_constraints(text: str, n_plans: int, feature_names: Sequence[str]) -> list[QueryConstraint]:
    doc = extract_json(text)
    if not isinstance(doc, list):
        raise SchemaViolation("stage output must be a JSON array of constraint objects")
    if len(doc) != n_plans:
        raise SchemaViolation(f"expected {n_plans} constraint entries (one per plan), got {len(doc)}")
    known = set(feature_names)
    constraints = []
    for i, entry in enumerate(doc):
        if not isinstance(entry, dict):
            raise SchemaViolation(f"constraint entry {i} must be an object")
        industries = _require(entry, i, "industry_set", list, "constraint")
        if not all(isinstance(ind, str) for ind in industries):
            raise SchemaViolation(f"constraint entry {i} industry_set must contain strings")
        weights = _require(entry, i, "weighted_scores", list, "constraint")
        pairs = []
        for j, item in enumerate(weights):
            if not isinstance(item, dict) or "feature" not in item or "weight" not in item:
                raise SchemaViolation(
                    f"constraint entry {i} weighted_scores[{j}] needs feature and weight"
                )
            name = item["feature"]
            if name not in known:
                raise SchemaViolation(
                    f"constraint entry {i} references unknown feature {name!r}; "
                    f"allowed: {sorted(known)}"
                )
            if not isinstance(item["weight"], (int, float)) or isinstance(item["weight"], bool):
                raise SchemaViolation(f"constraint entry {i} weight for {name!r} must be a number")
            pairs.append((name, float(item["weight"])))
        constraints.append(
            QueryConstraint(industry_set=tuple(industries), weighted_scores=tuple(pairs))
        )
    return constraints


def parse_requests(
    text: str, plans: Sequence[PlanRecord]
) -> list[list[dict]]:
    """Stage III: outer list per plan, inner decision objects (raw)."""
    doc = extract_json(text)
    if not isinstance(doc, list):
        raise SchemaViolation("stage output must be a JSON array (outer dimension = plans)")
    if len(doc) != len(plans):
        raise SchemaViolation(f"expected {len(plans)} decision lists (one per plan), got {len(doc)}")
    out = []
    for i, group in enumerate(doc):
        if not isinstance(group, list):
            raise SchemaViolation(f"decisions for plan {i + 1} must be a JSON array")
        entries = []
        for j, entry in enumerate(group):
            if not isinstance(entry, dict):
                raise SchemaViolation(f"plan {i + 1} decision {j} must be an object")
            cid = _require(entry, j, "company_id", str, f"plan {i + 1} decision")
            chosen = _require(entry, j, "is_chosen", bool, f"plan {i + 1} decision")
            reason = entry.get("reason", "")
            extra = entry.get("extra_info", "")
            if not isinstance(reason, str) or not isinstance(extra, str):
                raise SchemaViolation(f"plan {i + 1} decision {j} reason/extra_info must be strings")
            entries.append(
                {"company_id": cid, "is_chosen": chosen, "reason": reason, "extra_info": extra}
            )
        out.append(entries)
    return out


def parse_replies(text: str, inbox: Sequence[InboxEntry]) -> list[ReplyRecord]:
    doc = extract_json(text)
    if not isinstance(doc, list):
        raise SchemaViolation("stage output must be a JSON array of reply objects")
    decisions: dict[str, tuple[bool, str]] = {}
    for i, entry in enumerate(doc):
        if not isinstance(entry, dict):
            raise SchemaViolation(f"reply entry {i} must be an object")
        cid = _require(entry, i, "company_id", str, "reply")
        accepted = _require(entry, i, "is_accepted", bool, "reply")
        reason = entry.get("reason", "")
        if not isinstance(reason, str):
            raise SchemaViolation(f"reply entry {i} reason must be a string")
        decisions[cid] = (accepted, reason)

    missing = sorted({e.requester for e in inbox} - set(decisions))
    if missing:
        raise SchemaViolation(f"missing replies for requester(s): {', '.join(missing)}")
    extra = sorted(set(decisions) - {e.requester for e in inbox})
    if extra:
        log.info("replies for companies not in the inbox ignored: %s", extra)

    # One reply object answers every inbox entry from that requester;
    # the direction comes from the entry, not the response.
    replies = []
    for entry in inbox:
        accepted, reason = decisions[entry.requester]
        replies.append(
            ReplyRecord(
                requester=entry.requester,
                direction=entry.direction,
                accepted=accepted,
                reason=reason,
            )
        )
    return replies


# --- the policy -------------------------------------------------------------

_REPAIR_SUFFIX = (
    "\n\nYour previous response could not be used: {error}\n"
    "Previous response:\n{response}\n"
    "Respond again, following the required JSON format exactly."
)


class LLMPolicy(AgentPolicy):
    def __init__(self, transport: Transport, max_repair: int = MAX_REPAIR):
        self.transport = transport
        self.max_repair = max_repair

    def _complete(self, view: AgentView, stage: str, prompt: str, parse):
        attempt_prompt = prompt
        for attempt in range(self.max_repair + 1):
            key = CallKey(company_id=view.company_id, t=view.t, stage=stage, attempt=attempt)
            try:
                response = self.transport.complete(key, attempt_prompt)
            except TransportError as e:
                raise PolicyFailure(view.company_id, stage, str(e)) from e
            try:
                return parse(response)
            except SchemaViolation as e:
                log.info("%s stage %s attempt %d rejected: %s", view.company_id, stage, attempt, e)
                attempt_prompt = prompt + _REPAIR_SUFFIX.format(error=e, response=response)
        raise PolicyFailure(
            view.company_id, stage, f"no valid response after {self.max_repair + 1} attempts"
        )

    def plan(self, view: AgentView) -> list[PlanRecord]:
        return self._complete(view, prompts.STAGE_PLAN, prompts.plan_prompt(view), parse_plans)

    def constrain(self, view: AgentView, plans: Sequence[PlanRecord]) -> list[QueryConstraint]:
        if not plans:
            return []
        return self._complete(
            view,
            prompts.STAGE_QUERY,
            prompts.query_prompt(view, plans),
            lambda text: parse_constraints(text, len(plans), view.feature_names),
        )

    def request(
        self,
        view: AgentView,
        plans: Sequence[PlanRecord],
        constraints: Sequence[QueryConstraint],
        candidates: Sequence[Sequence[Candidate]],
    ) -> list[list[RequestRecord]]:
        if not plans:
            return []
        prompt = prompts.request_prompt(view, plans, constraints, candidates)
        raw_groups = self._complete(
            view, prompts.STAGE_REQUEST, prompt, lambda text: parse_requests(text, plans)
        )
        out: list[list[RequestRecord]] = []
        for i, (plan, group) in enumerate(zip(plans, raw_groups)):
            records = []
            for entry in group:
                if plan.seek_collaboration:
                    kind = (
                        RequestKind.ADD_AS_SUPPLIER if plan.seek_suppliers else RequestKind.ADD_AS_CUSTOMER
                    )
                else:
                    kind = RequestKind.TERMINATE
                records.append(
                    RequestRecord(
                        plan_index=i,
                        target=entry["company_id"],
                        kind=kind,
                        chosen=entry["is_chosen"],
                        reason=entry["reason"],
                        extra_info=entry["extra_info"],
                    )
                )
            out.append(records)
        return out

    def reply(self, view: AgentView, inbox: Sequence[InboxEntry]) -> list[ReplyRecord]:
        if not inbox:
            return []
        return self._complete(
            view,
            prompts.STAGE_REPLY,
            prompts.reply_prompt(view, inbox),
            lambda text: parse_replies(text, inbox),
        )
