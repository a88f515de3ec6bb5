"""Prompt templates for the four turn stages.

The wording of the instruction blocks is part of the protocol contract
and is kept verbatim (including its rough grammar); tests pin the JSON
field names the stages require. Rendering uses only what the receiving
model is supposed to see: the company info block, the stage inputs, and
free-text fields. The view's performance history is never rendered.
"""

from __future__ import annotations

import json
from typing import Sequence

from ..query import Candidate, QueryConstraint
from .records import AgentView, InboxEntry, PlanRecord, ReplyDirection

STAGE_PLAN = "plan"
STAGE_QUERY = "query"
STAGE_REQUEST = "request"
STAGE_REPLY = "reply"

_PREAMBLE = (
    "You are now an company manager and you are making decisions on the "
    "management of your supply chain in next timestampe.\n"
)

_PLAN_INSTRUCTIONS = _PREAMBLE + (
    "The user will provide supply chain network and company information within this supply chain.\n"
    "You need to fully analyze the information provided by the user and propose plans.\n"
    "A plan should include you intention, you reason with step-by-step thinking, "
    "and whether you are plan to increase or decrease partners.\n"
    "If true as you plan to increase, you should provide query requirement for company query.\n"
    "You response should fully following the following content in strict JSON format:\n"
    "```json\n"
    "[\n"
    "    {\n"
    '        "plan": "your plan\' brief description",\n'
    '        "reason": "your reason for this Plan",\n'
    '        "is_seek_collaboration": true/false, // whether you plan to increase collaboration or decrease\n'
    '        "is_seek_suppliers": true/false // if true, you are seek more suppliers otherwise you are seek more customers. Only work if is_seek_collaboration=true\n'
    "    },\n"
    "    ...\n"
    "]\n"
    "```\n"
)

_QUERY_INSTRUCTIONS = _PREAMBLE + (
    "The user will provide supply chain network and company information within this supply chain.\n"
    "You should fully analyze the information provided by the user and propose plans. "
    "Then, you should list the constrain of industry and the weighted score of each features. "
    "Those information will be used for querying potential company.\n"
    "You should response with the same number of plans as the user provided.\n"
    "You response should fully following the following content in strict JSON format:\n"
    "```json\n"
    "[\n"
    "    {\n"
    '        "industry_set": ["industry1", ...], // the constrain on company industries, you may return a empty list to ignore this constrain\n'
    '        "weighted_scores": [{"feature": "xxx", "weight": 0.0}, ...] // weighted score of each feature, only output in feature_col_list: %s\n'
    "    },\n"
    "    ...\n"
    "]\n"
    "```\n"
)

_REQUEST_INSTRUCTIONS = _PREAMBLE + (
    "The user will provide supply chain information and plan list with potential candidate "
    "if he want to increase collaboration.\n"
    "You should fully analyze the information provided by the user and propose plan. "
    "Then, you should make detail decisions. Specifically, if the \"is_seek_collaboration\" is false, "
    "you should choose one or some company and cancel collaborations with them with step by step thinking. "
    "If it is true, you should check the candidate and determine one or some company and request "
    "collaborations with them, with step by step thinking.\n"
    "You answer shoule include the list of id that you decided to cancel or request collaboration "
    "for the plan. For a plan that does not want to increase collaborators, you should choose "
    "companies from your existing supply chains to cancel. "
    "The outer dimension is plan and the inner is id.\n"
    "You should strictly follow the format below.\n"
    "```json\n"
    "[\n"
    "    [{\n"
    '        "company_id": "the id of company",\n'
    '        "is_chosen": true/false, // whether you determine to choose this candidate to build collaboration and output even if false\n'
    '        "reason": "the reason why you make such a decision",\n'
    '        "extra_info": "The information that would be sent to the company to facilitate collaboration. Only works when this plan is a seek collaboration plan and is_chosen is true."\n'
    "    },\n"
    "    ...],\n"
    "    ...\n"
    "]\n"
    "```\n"
)

_REPLY_INSTRUCTIONS = _PREAMBLE + (
    "The user will provide supply chain information and collaboration requests from other companies. "
    "You have to decide whether collaborate or not for each request one by one and give "
    "corresponding reasoning with step-by-step thinking.\n"
    "You response and fully follow the following content in strict JSON format:\n"
    "```json\n"
    "[\n"
    "    {\n"
    '        "company_id": "the id of the company requesting",\n'
    '        "is_accepted": true/false, // Do you accept this collaboration\n'
    '        "reason": "the reason"\n'
    "    },\n"
    "    ...\n"
    "]\n"
    "```\n"
)


def _feature_info(features_by_t, window: Sequence[int], labels: Sequence[str], names) -> str:
    doc = {
        name: {labels[i]: features_by_t[t][name] for i, t in enumerate(window)}
        for name in names
    }
    return json.dumps(doc)


def company_info(view: AgentView) -> str:
    """The shared company-information block rendered into every stage."""
    lines = [
        f"You are company {view.company_id}.",
        f"Your industry is {view.industry}.",
        f"The following is global knowledge: {view.global_knowledge}",
        f"The following is your company-specific knowledge: {view.knowledge}.",
        "At {t}, your feature info is: {info}".format(
            t=view.t_label,
            info=_feature_info(view.self_features, view.window, view.window_labels, view.feature_names),
        ),
        "You have the following supply chain connections (supplier, customer):",
        f"supplier: {sorted(view.suppliers)}",
    ]
    for cid in sorted(view.suppliers):
        p = view.suppliers[cid]
        lines.append(
            f"    Supplier {cid} industry is {p.industry}. feature info: "
            + _feature_info(p.features, view.window, view.window_labels, view.feature_names)
        )
    lines.append(f"customer: {sorted(view.customers)}")
    for cid in sorted(view.customers):
        p = view.customers[cid]
        lines.append(
            f"    Customer {cid} industry is {p.industry}. feature info: "
            + _feature_info(p.features, view.window, view.window_labels, view.feature_names)
        )
    return "\n".join(lines)


def plan_prompt(view: AgentView) -> str:
    return (
        _PLAN_INSTRUCTIONS
        + "\nThe following is information about your company and its supply chain partners:\n"
        + company_info(view)
        + "\n"
    )


def _plan_list(plans: Sequence[PlanRecord]) -> str:
    return "\n".join(
        f"Plan {i + 1}: {p.description}. With reason: {p.reason}."
        for i, p in enumerate(plans)
    )


def query_prompt(view: AgentView, plans: Sequence[PlanRecord]) -> str:
    feature_cols = json.dumps(list(view.feature_names))
    return (
        _QUERY_INSTRUCTIONS % feature_cols
        + "\nThe following is information about your company and its supply chain partners:\n"
        + company_info(view)
        + "\n\nThe following is your plan list:\n"
        + _plan_list(plans)
        + "\n"
        + f"\nKnown industries: {json.dumps(sorted(view.candidate_industries))}\n"
    )


def request_prompt(
    view: AgentView,
    plans: Sequence[PlanRecord],
    constraints: Sequence[QueryConstraint],
    candidates: Sequence[Sequence[Candidate]],
) -> str:
    sections = []
    for i, plan in enumerate(plans):
        constraint = constraints[i]
        part = [
            f"Plan {i + 1}: {plan.description}. With reason: {plan.reason}.",
            "Your query constrain is industry in {inds} and feature weighted score is {ws}.".format(
                inds=json.dumps(list(constraint.industry_set)),
                ws=json.dumps(
                    [{"feature": n, "weight": w} for n, w in constraint.weighted_scores]
                ),
            ),
        ]
        if plan.seek_collaboration:
            part.append("The following is your candidate company list:")
            for cand in candidates[i]:
                part.append(f"    Candidate {cand.company_id} with score {cand.score:.4f}.")
        else:
            part.append(
                "Your existing supply chain companies: suppliers "
                f"{sorted(view.suppliers)}, customers {sorted(view.customers)}."
            )
        sections.append("\n".join(part))
    return (
        _REQUEST_INSTRUCTIONS
        + "\nThe following is information about your company and its supply chain partners.\n"
        + company_info(view)
        + "\n\nThe following is your plan list with potential companies:\n"
        + "\n".join(sections)
        + "\n"
    )


def reply_prompt(view: AgentView, inbox: Sequence[InboxEntry]) -> str:
    suppliers = [e.requester for e in inbox if e.direction is ReplyDirection.REQUESTER_WANTS_TO_SUPPLY]
    customers = [e.requester for e in inbox if e.direction is ReplyDirection.REQUESTER_WANTS_TO_BUY]
    lines = [
        f"Request from company {suppliers} to be your supplier.",
        f"Request from company {customers} to be your customer.",
    ]
    for entry in inbox:
        if entry.extra_info:
            lines.append(f"Message from {entry.requester}: {entry.extra_info}")
        if entry.note:
            lines.append(f"Note from the analyst about {entry.requester}: {entry.note}")
    return (
        _REPLY_INSTRUCTIONS
        + "\nThe following is information about your company and its supply chain partners.\n"
        + company_info(view)
        + "\n\nThe following is the collaboration requests you received:\n"
        + "\n".join(lines)
        + "\n"
    )
