"""Serialization round trips for the per-turn record types."""

import json

import pytest

from scsim.protocol.records import (
    DIRECTION_TO_KIND,
    KIND_TO_DIRECTION,
    AgentTurnRecord,
    AgentView,
    InboxEntry,
    PlanRecord,
    ReplyDirection,
    ReplyRecord,
    RequestKind,
    RequestRecord,
    accepted_edge,
)
from scsim.query import Candidate, QueryConstraint


class TestDirections:
    def test_kind_direction_mappings_are_inverse(self):
        assert set(KIND_TO_DIRECTION) == {
            RequestKind.ADD_AS_SUPPLIER,
            RequestKind.ADD_AS_CUSTOMER,
        }
        for kind, direction in KIND_TO_DIRECTION.items():
            assert DIRECTION_TO_KIND[direction] is kind

    def test_add_as_supplier_makes_target_the_supplier(self):
        assert accepted_edge("R", RequestKind.ADD_AS_SUPPLIER, "T") == ("T", "R")
        assert KIND_TO_DIRECTION[RequestKind.ADD_AS_SUPPLIER] is ReplyDirection.REQUESTER_WANTS_TO_BUY

    def test_add_as_customer_makes_target_the_customer(self):
        assert accepted_edge("R", RequestKind.ADD_AS_CUSTOMER, "T") == ("R", "T")
        assert KIND_TO_DIRECTION[RequestKind.ADD_AS_CUSTOMER] is ReplyDirection.REQUESTER_WANTS_TO_SUPPLY

    def test_terminate_has_no_edge(self):
        with pytest.raises(ValueError):
            accepted_edge("R", RequestKind.TERMINATE, "T")


class TestPlanRecord:
    def test_round_trip(self):
        plan = PlanRecord(
            description="find a parts supplier",
            reason="inventory is thin",
            seek_collaboration=True,
            seek_suppliers=True,
        )
        assert PlanRecord.from_dict(plan.to_dict()) == plan

    @pytest.mark.parametrize("field", ["description", "reason"])
    @pytest.mark.parametrize("value", ["", "   "])
    def test_blank_text_rejected(self, field, value):
        kwargs = {
            "description": "d",
            "reason": "r",
            "seek_collaboration": False,
            "seek_suppliers": False,
        }
        kwargs[field] = value
        with pytest.raises(ValueError):
            PlanRecord(**kwargs)


class TestRequestRecord:
    def test_round_trip(self):
        req = RequestRecord(
            plan_index=1,
            target="B",
            kind=RequestKind.TERMINATE,
            chosen=True,
            reason="late deliveries",
            extra_info="effective next quarter",
        )
        doc = req.to_dict()
        assert doc["kind"] == "terminate"
        assert RequestRecord.from_dict(doc) == req

    def test_optional_text_defaults(self):
        doc = {"plan_index": 0, "target": "B", "kind": "add_as_supplier", "chosen": False}
        req = RequestRecord.from_dict(doc)
        assert req.reason == "" and req.extra_info == ""
        assert req.kind is RequestKind.ADD_AS_SUPPLIER


class TestReplyRecord:
    def test_round_trip(self):
        rep = ReplyRecord(
            requester="A",
            direction=ReplyDirection.REQUESTER_WANTS_TO_SUPPLY,
            accepted=True,
            reason="good fit",
            synthetic=True,
        )
        assert ReplyRecord.from_dict(rep.to_dict()) == rep

    def test_synthetic_defaults_false(self):
        doc = {"requester": "A", "direction": "requester_wants_to_buy", "accepted": False}
        rep = ReplyRecord.from_dict(doc)
        assert not rep.synthetic and rep.reason == ""


def full_record() -> AgentTurnRecord:
    return AgentTurnRecord(
        company_id="C7",
        plans=(
            PlanRecord("expand sales", "flat revenue", True, False),
            PlanRecord("cut a partner", "weak scores", False, False),
        ),
        constraints=(
            QueryConstraint(
                industry_set=("Retail", "Logistics"),
                weighted_scores=(("operation", 0.7), ("technology", 0.3)),
            ),
            QueryConstraint(industry_set=(), weighted_scores=()),
        ),
        candidates=((Candidate("A", 1.0), Candidate("B", 0.25)), ()),
        outgoing=(
            RequestRecord(0, "A", RequestKind.ADD_AS_CUSTOMER, True, reason="top score"),
            RequestRecord(1, "D", RequestKind.TERMINATE, True),
        ),
        replies=(
            ReplyRecord("E", ReplyDirection.REQUESTER_WANTS_TO_BUY, True),
            ReplyRecord("F", ReplyDirection.REQUESTER_WANTS_TO_SUPPLY, False, synthetic=True),
        ),
        added_edges=(("C7", "A"),),
        removed_edges=(("D", "C7"), ("C7", "D")),
        failed_stages=("query",),
    )


class TestAgentTurnRecord:
    def test_round_trip_is_exact(self):
        rec = full_record()
        assert AgentTurnRecord.from_dict(rec.to_dict()) == rec

    def test_doc_survives_json(self):
        rec = full_record()
        doc = json.loads(json.dumps(rec.to_dict()))
        assert AgentTurnRecord.from_dict(doc) == rec

    def test_deltas_land_under_applied_deltas(self):
        doc = full_record().to_dict()
        assert doc["applied_deltas"] == {
            "added": [["C7", "A"]],
            "removed": [["D", "C7"], ["C7", "D"]],
        }

    def test_constraints_serialized_inline(self):
        doc = full_record().to_dict()
        assert doc["constraints"][0] == {
            "industry_set": ["Retail", "Logistics"],
            "weighted_scores": [["operation", 0.7], ["technology", 0.3]],
        }
        assert doc["candidates"][0] == [["A", 1.0], ["B", 0.25]]

    def test_missing_failed_stages_tolerated(self):
        doc = full_record().to_dict()
        del doc["failed_stages"]
        assert AgentTurnRecord.from_dict(doc).failed_stages == ()

    def test_empty_record_round_trip(self):
        rec = AgentTurnRecord(company_id="Z")
        doc = rec.to_dict()
        assert doc["plans"] == [] and doc["replies"] == []
        assert AgentTurnRecord.from_dict(doc) == rec


class TestViews:
    def test_current_features_reads_the_turn_slot(self):
        view = AgentView(
            company_id="A",
            industry="Retail",
            knowledge="",
            global_knowledge="",
            t=3,
            t_label="Q4",
            window=(2, 3),
            window_labels=("Q3", "Q4"),
            feature_names=("operation",),
            self_features={2: {"operation": 10.0}, 3: {"operation": 12.0}},
            suppliers={},
            customers={},
            performance_history=((2, 0.1), (3, 0.2)),
            candidate_industries=("Retail",),
        )
        assert view.current_features == {"operation": 12.0}

    def test_inbox_entry_defaults(self):
        entry = InboxEntry(requester="A", direction=ReplyDirection.REQUESTER_WANTS_TO_BUY)
        assert entry.extra_info == "" and entry.note == ""
        assert entry.requester_features == {}
