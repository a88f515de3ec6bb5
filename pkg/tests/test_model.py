"""Domain model invariants: edge queries, lifecycle, datasets, timelines."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import build_dataset
from scsim.errors import EdgeAbsent, TimestampOutOfRange, UnknownCompany, UnknownFeature
from scsim.model import (
    Lifecycle,
    Timeline,
    customers_in,
    edge_lifecycle,
    next_label,
    partners_in,
    suppliers_in,
)

EDGES = {("A", "B"), ("B", "C"), ("D", "B"), ("B", "A")}


def test_suppliers_customers_partners():
    assert suppliers_in(EDGES, "B") == {"A", "D"}
    assert customers_in(EDGES, "B") == {"C", "A"}
    assert partners_in(EDGES, "B") == {"A", "C", "D"}
    assert partners_in(EDGES, "Z") == frozenset()


@given(
    st.sets(
        st.tuples(st.sampled_from("ABCDE"), st.sampled_from("ABCDE")).filter(
            lambda e: e[0] != e[1]
        )
    )
)
@settings(max_examples=60, deadline=None)
def test_partner_relation_is_symmetric(edges):
    for a in "ABCDE":
        for b in "ABCDE":
            assert (a in partners_in(edges, b)) == (b in partners_in(edges, a))


class TestLifecycle:
    # one edge that exists at t=1 and t=2 only
    HISTORY = [frozenset(), frozenset({("A", "B")}), frozenset({("A", "B")}), frozenset()]

    def test_initiate_then_maintain_then_terminate(self):
        assert edge_lifecycle(self.HISTORY, ("A", "B"), 1) is Lifecycle.INITIATE
        assert edge_lifecycle(self.HISTORY, ("A", "B"), 2) is Lifecycle.TERMINATE

    def test_maintain_in_the_middle(self):
        history = [frozenset({("A", "B")})] * 3
        assert edge_lifecycle(history, ("A", "B"), 1) is Lifecycle.MAINTAIN

    def test_first_timestamp_presence_is_initiate(self):
        history = [frozenset({("A", "B")})] * 2
        assert edge_lifecycle(history, ("A", "B"), 0) is Lifecycle.INITIATE

    def test_terminate_wins_for_single_step_edges(self):
        history = [frozenset(), frozenset({("A", "B")}), frozenset()]
        assert edge_lifecycle(history, ("A", "B"), 1) is Lifecycle.TERMINATE

    def test_last_timestamp_never_terminates(self):
        history = [frozenset(), frozenset({("A", "B")})]
        assert edge_lifecycle(history, ("A", "B"), 1) is Lifecycle.INITIATE

    def test_absent_edge_raises(self):
        with pytest.raises(EdgeAbsent):
            edge_lifecycle(self.HISTORY, ("A", "B"), 0)

    def test_bad_timestamp_raises(self):
        with pytest.raises(TimestampOutOfRange):
            edge_lifecycle(self.HISTORY, ("A", "B"), 9)


class TestDataset:
    def test_company_lookup_and_errors(self, pair_dataset):
        assert pair_dataset.company("A").industry == "Retail"
        with pytest.raises(UnknownCompany):
            pair_dataset.company("nope")

    def test_features_at_collects_every_firm(self, pair_dataset):
        snap = pair_dataset.features_at(0)
        assert set(snap) == {"A", "B"}
        with pytest.raises(TimestampOutOfRange):
            pair_dataset.features_at(pair_dataset.n_timestamps)

    def test_feature_series_and_unknown_feature(self, pair_dataset):
        series = pair_dataset.feature_series("A", pair_dataset.feature_names[0])
        assert len(series) == pair_dataset.n_timestamps
        with pytest.raises(UnknownFeature):
            pair_dataset.feature_series("A", "sentiment")

    def test_timestamps_align_with_labels(self, pair_dataset):
        stamps = pair_dataset.timestamps()
        assert [s.index for s in stamps] == list(range(pair_dataset.n_timestamps))
        assert tuple(s.label for s in stamps) == pair_dataset.labels

    def test_network_accessors(self, pair_dataset):
        net = pair_dataset.network
        assert net.suppliers_of("A", 0) == {"B"}
        assert net.customers_of("B", 0) == {"A"}
        with pytest.raises(TimestampOutOfRange):
            net.at(99)


class TestTimeline:
    def test_from_dataset_mirrors_history(self, pair_dataset):
        tl = Timeline.from_dataset(pair_dataset)
        assert tl.n_timestamps == pair_dataset.n_timestamps
        assert tl.last_t == pair_dataset.n_timestamps - 1
        for t in range(tl.n_timestamps):
            assert tl.edges_at(t) == pair_dataset.network.at(t)
            assert tl.features_at(t) == pair_dataset.features_at(t)

    def test_prefix_bounds(self, pair_dataset):
        tl = Timeline.from_dataset_prefix(pair_dataset, 1)
        assert tl.n_timestamps == 1
        for bad in (0, pair_dataset.n_timestamps + 1):
            with pytest.raises(TimestampOutOfRange):
                Timeline.from_dataset_prefix(pair_dataset, bad)

    def test_extended_appends_without_mutating(self, pair_dataset):
        tl = Timeline.from_dataset(pair_dataset)
        new_edges = frozenset({("A", "B")})
        features = dict(tl.features_at(tl.last_t))
        grown = tl.extended(new_edges, features, "Q9")
        assert grown.n_timestamps == tl.n_timestamps + 1
        assert grown.edges_at(grown.last_t) == new_edges
        assert grown.labels[-1] == "Q9"
        assert tl.n_timestamps == pair_dataset.n_timestamps  # original untouched

    def test_feature_series_spans_simulated_steps(self, pair_dataset):
        tl = Timeline.from_dataset(pair_dataset)
        name = pair_dataset.feature_names[0]
        bumped = {
            cid: {**tl.features_at(tl.last_t)[cid], name: 99.0}
            for cid in pair_dataset.company_ids
        }
        grown = tl.extended(frozenset(), bumped, "Q9")
        assert grown.feature_series("A", name)[-1] == 99.0
        with pytest.raises(UnknownCompany):
            grown.feature_series("nope", name)

    def test_lifecycle_spans_simulated_steps(self, pair_dataset):
        tl = Timeline.from_dataset(pair_dataset)
        features = dict(tl.features_at(tl.last_t))
        grown = tl.extended(frozenset(), features, "Q9")
        # (B, A) exists through the history then disappears in the
        # simulated step, so the last observed timestamp is a termination
        assert grown.lifecycle(("B", "A"), tl.last_t) is Lifecycle.TERMINATE


def test_next_label_continues_quarters():
    assert next_label(("Q1", "Q2")) == "Q3"
    assert next_label(("Q9",)) == "Q10"
    assert next_label(("2021", "2022")) == "t2"


def test_build_dataset_helper_is_consistent():
    ds = build_dataset(
        features_by_company={
            "X": [{"f": 1.0}, {"f": 2.0}],
            "Y": [{"f": 3.0}, {"f": 4.0}],
        },
        edges_by_t=[set(), {("X", "Y")}],
    )
    assert ds.company_ids == ("X", "Y")
    assert ds.n_timestamps == 2
    assert ds.network.at(1) == {("X", "Y")}
