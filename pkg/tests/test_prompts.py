"""Stage prompt rendering: required JSON field names and view content."""

import json
import re

from scsim.protocol import prompts
from scsim.protocol.records import (
    AgentView,
    InboxEntry,
    PartnerInfo,
    PlanRecord,
    ReplyDirection,
)
from scsim.query import Candidate, QueryConstraint


def make_view() -> AgentView:
    window = (1, 2)
    labels = ("Q2", "Q3")
    return AgentView(
        company_id="C1",
        industry="Mills",
        knowledge="runs two plants",
        global_knowledge="demand is seasonal",
        t=2,
        t_label="Q3",
        window=window,
        window_labels=labels,
        feature_names=("operation", "technology"),
        self_features={1: {"operation": 50.0, "technology": 60.0}, 2: {"operation": 52.0, "technology": 59.0}},
        suppliers={
            "S2": PartnerInfo("S2", "Ore", {1: {"operation": 30.0, "technology": 20.0}, 2: {"operation": 31.0, "technology": 21.0}}),
            "S1": PartnerInfo("S1", "Ore", {1: {"operation": 40.0, "technology": 45.0}, 2: {"operation": 41.0, "technology": 44.0}}),
        },
        customers={
            "B1": PartnerInfo("B1", "Retail", {1: {"operation": 70.0, "technology": 75.0}, 2: {"operation": 71.0, "technology": 74.0}}),
        },
        performance_history=((1, 0.123456789), (2, 0.987654321)),
        candidate_industries=("Retail", "Ore", "Mills"),
    )


def test_stage_names():
    assert prompts.STAGE_PLAN == "plan"
    assert prompts.STAGE_QUERY == "query"
    assert prompts.STAGE_REQUEST == "request"
    assert prompts.STAGE_REPLY == "reply"


class TestCompanyInfo:
    def test_identity_and_knowledge_lines(self):
        info = prompts.company_info(make_view())
        assert "You are company C1." in info
        assert "Your industry is Mills." in info
        assert "global knowledge: demand is seasonal" in info
        assert "company-specific knowledge: runs two plants." in info

    def test_feature_block_is_label_keyed_json(self):
        info = prompts.company_info(make_view())
        m = re.search(r"At Q3, your feature info is: (\{.*\})", info)
        assert m, info
        doc = json.loads(m.group(1))
        assert doc == {
            "operation": {"Q2": 50.0, "Q3": 52.0},
            "technology": {"Q2": 60.0, "Q3": 59.0},
        }

    def test_partners_listed_sorted_with_features(self):
        info = prompts.company_info(make_view())
        assert "supplier: ['S1', 'S2']" in info
        assert "customer: ['B1']" in info
        assert info.index("Supplier S1 ") < info.index("Supplier S2 ")
        assert "Supplier S1 industry is Ore." in info
        m = re.search(r"Customer B1 industry is Retail\. feature info: (\{.*\})", info)
        assert json.loads(m.group(1))["operation"] == {"Q2": 70.0, "Q3": 71.0}

    def test_performance_history_is_never_shown(self):
        info = prompts.company_info(make_view())
        assert "0.123456789" not in info
        assert "0.987654321" not in info


class TestPlanPrompt:
    def test_mentions_required_fields(self):
        text = prompts.plan_prompt(make_view())
        for name in ('"plan"', '"reason"', '"is_seek_collaboration"', '"is_seek_suppliers"'):
            assert name in text
        assert "You are company C1." in text


class TestQueryPrompt:
    def test_field_names_and_feature_columns(self):
        view = make_view()
        plans = [PlanRecord("grow sales", "need buyers", True, False)]
        text = prompts.query_prompt(view, plans)
        assert '"industry_set"' in text and '"weighted_scores"' in text
        assert 'feature_col_list: ["operation", "technology"]' in text
        assert "Plan 1: grow sales. With reason: need buyers." in text
        assert 'Known industries: ["Mills", "Ore", "Retail"]' in text

    def test_one_numbered_line_per_plan(self):
        view = make_view()
        plans = [
            PlanRecord("grow sales", "need buyers", True, False),
            PlanRecord("trim sourcing", "too many suppliers", False, False),
        ]
        text = prompts.query_prompt(view, plans)
        assert "Plan 1: grow sales." in text
        assert "Plan 2: trim sourcing." in text


class TestRequestPrompt:
    def test_seek_plan_lists_candidates_with_scores(self):
        view = make_view()
        plans = [PlanRecord("grow sales", "need buyers", True, False)]
        constraints = [
            QueryConstraint(industry_set=("Retail",), weighted_scores=(("operation", 1.0),))
        ]
        candidates = [[Candidate("B9", 0.875), Candidate("B4", 0.5)]]
        text = prompts.request_prompt(view, plans, constraints, candidates)
        assert '"company_id"' in text and '"is_chosen"' in text and '"extra_info"' in text
        assert 'industry in ["Retail"]' in text
        assert '[{"feature": "operation", "weight": 1.0}]' in text
        assert "Candidate B9 with score 0.8750." in text
        assert "Candidate B4 with score 0.5000." in text

    def test_terminate_plan_shows_existing_chain_instead(self):
        view = make_view()
        plans = [PlanRecord("trim sourcing", "too many suppliers", False, False)]
        constraints = [QueryConstraint(industry_set=(), weighted_scores=())]
        text = prompts.request_prompt(view, plans, constraints, [[]])
        assert "suppliers ['S1', 'S2'], customers ['B1']" in text
        assert "candidate company list" not in text


class TestReplyPrompt:
    def test_inbox_split_by_direction(self):
        view = make_view()
        inbox = [
            InboxEntry("A1", ReplyDirection.REQUESTER_WANTS_TO_SUPPLY),
            InboxEntry("A2", ReplyDirection.REQUESTER_WANTS_TO_BUY, extra_info="bulk order"),
            InboxEntry("A3", ReplyDirection.REQUESTER_WANTS_TO_SUPPLY, note="prefers this one"),
        ]
        text = prompts.reply_prompt(view, inbox)
        assert "Request from company ['A1', 'A3'] to be your supplier." in text
        assert "Request from company ['A2'] to be your customer." in text
        assert "Message from A2: bulk order" in text
        assert "Note from the analyst about A3: prefers this one" in text
        assert '"is_accepted"' in text

    def test_empty_inbox_still_renders(self):
        text = prompts.reply_prompt(make_view(), [])
        assert "Request from company [] to be your supplier." in text
