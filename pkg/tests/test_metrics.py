"""Snapshot performance metrics against closed-form and dense-solver checks."""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import pagerank_dense
from scsim.errors import EmptyNodeSet, UnknownMetric
from scsim.metrics import (
    METRICS,
    collaborator_count,
    collaborator_counts,
    pagerank,
    performance,
    performance_at,
)

IDS = tuple("ABCDEFGH")


def edge_sets(max_nodes=8):
    """Random directed edge sets without self-loops over a fixed id pool."""
    pairs = [(a, b) for a in IDS[:max_nodes] for b in IDS[:max_nodes] if a != b]
    return st.sets(st.sampled_from(pairs), max_size=len(pairs))


class TestPagerank:
    def test_two_node_chain_hand_solved(self):
        # A supplies B, B dangling. Solving the 2x2 linear system by hand
        # with d = 17/20 gives x_A = 20/57 and x_B = 37/57.
        scores = pagerank({("A", "B")}, ["A", "B"])
        assert scores["A"] == pytest.approx(20 / 57, abs=1e-9)
        assert scores["B"] == pytest.approx(37 / 57, abs=1e-9)

    def test_no_edges_is_uniform(self):
        scores = pagerank(set(), IDS)
        assert all(v == pytest.approx(1 / len(IDS)) for v in scores.values())

    def test_cycle_is_uniform(self):
        nodes = IDS[:5]
        cycle = {(nodes[i], nodes[(i + 1) % 5]) for i in range(5)}
        scores = pagerank(cycle, nodes)
        for v in scores.values():
            assert v == pytest.approx(0.2, abs=1e-9)

    @given(edge_sets())
    @settings(max_examples=150, deadline=None)
    def test_matches_direct_linear_solve(self, edges):
        nodes = IDS
        scores = pagerank(edges, nodes)
        expected = pagerank_dense(edges, nodes)
        for cid in nodes:
            assert scores[cid] == pytest.approx(expected[cid], abs=1e-8)

    @given(edge_sets(max_nodes=6))
    @settings(max_examples=80, deadline=None)
    def test_scores_sum_to_one_and_are_positive(self, edges):
        scores = pagerank(edges, IDS[:6])
        assert math.isclose(sum(scores.values()), 1.0, abs_tol=1e-9)
        assert all(v > 0 for v in scores.values())

    def test_self_edges_and_unknown_endpoints_ignored(self):
        base = pagerank({("A", "B")}, ["A", "B"])
        noisy = pagerank({("A", "B"), ("A", "A"), ("Z", "B"), ("A", "Q")}, ["A", "B"])
        assert noisy == pytest.approx(base)

    def test_empty_node_set_rejected(self):
        with pytest.raises(EmptyNodeSet):
            pagerank(set(), [])

    @pytest.mark.parametrize(
        "kwargs",
        [dict(damping=0.0), dict(damping=1.0), dict(tol=0.0), dict(max_iter=0)],
    )
    def test_parameter_validation(self, kwargs):
        with pytest.raises(ValueError):
            pagerank({("A", "B")}, ["A", "B"], **kwargs)


class TestCollaboratorCount:
    def test_counts_both_directions_distinct(self):
        edges = {("A", "B"), ("B", "A"), ("C", "A")}
        assert collaborator_count(edges, "A") == 2
        assert collaborator_count(edges, "B") == 1
        assert collaborator_count(edges, "D") == 0

    @given(edge_sets())
    @settings(max_examples=60, deadline=None)
    def test_equals_neighborhood_size(self, edges):
        counts = collaborator_counts(edges, IDS)
        for cid in IDS:
            neighbors = {s for s, c in edges if c == cid} | {c for s, c in edges if s == cid}
            assert counts[cid] == len(neighbors)

    def test_empty_node_set_rejected(self):
        with pytest.raises(EmptyNodeSet):
            collaborator_counts(set(), [])


class TestRegistry:
    def test_both_builtins_registered(self):
        assert set(METRICS) >= {"pagerank", "collaborator_count"}

    def test_unknown_metric_raises(self):
        with pytest.raises(UnknownMetric):
            performance(set(), ["A"], "eigenvector")

    def test_registry_is_open(self, monkeypatch):
        monkeypatch.setitem(METRICS, "ones", lambda edges, nodes: {c: 1.0 for c in nodes})
        assert performance(set(), ["A", "B"], "ones") == {"A": 1.0, "B": 1.0}

    def test_performance_at_uses_snapshot_edges(self, demo_timeline):
        t = demo_timeline.n_timestamps - 1
        direct = performance(
            demo_timeline.edges_at(t), demo_timeline.dataset.company_ids, "pagerank"
        )
        assert performance_at(demo_timeline, "pagerank", t) == direct
