"""Projection and orchard-layout geometry for the two visual views."""

import math

import numpy as np
import pytest

from conftest import build_dataset
from scsim.errors import InvalidConfig
from scsim.explain import fit_firm_explainer, influence_ratio, shapley
from scsim.layout import (
    LAYOUT_VERSION,
    embedding_rows,
    focus_layout,
    global_embedding,
    principal_projection,
)
from scsim.metrics import performance
from scsim.model import Timeline


def orchard_fixture():
    """S supplies both focals; F1 sells to C1 from t=1 on; S drops F2 after t=2."""
    features = {
        cid: [{"f": base + 2.0 * t, "g": 90.0 - base - t} for t in range(4)]
        for cid, base in {"S": 30.0, "F1": 50.0, "F2": 60.0, "C1": 40.0}.items()
    }
    edges = [
        {("S", "F1"), ("S", "F2")},
        {("S", "F1"), ("S", "F2"), ("F1", "C1")},
        {("S", "F1"), ("S", "F2"), ("F1", "C1")},
        {("S", "F1"), ("F1", "C1")},
    ]
    industries = {"S": "Ore", "F1": "Mills", "F2": "Mills", "C1": "Retail"}
    return Timeline.from_dataset(build_dataset(features, edges, industries=industries))


class TestEmbeddingRows:
    def test_shape_and_key_order(self, demo_timeline):
        X, keys = embedding_rows(demo_timeline)
        n_firms = len(demo_timeline.dataset.company_ids)
        n_feats = len(demo_timeline.dataset.feature_names)
        assert X.shape == (n_firms * demo_timeline.n_timestamps, 3 * n_feats + 2)
        assert keys[0] == (demo_timeline.dataset.company_ids[0], 0)
        assert keys[n_firms] == (demo_timeline.dataset.company_ids[0], 1)

    def test_hand_checked_row(self):
        tl = orchard_fixture()
        X, keys = embedding_rows(tl)
        i = keys.index(("F1", 1))
        row = X[i]
        f = tl.features_at(1)
        # own features, supplier mean (S), customer mean (C1), log counts
        assert row[0] == f["F1"]["f"] and row[1] == f["F1"]["g"]
        assert row[2] == f["S"]["f"] and row[3] == f["S"]["g"]
        assert row[4] == f["C1"]["f"] and row[5] == f["C1"]["g"]
        assert row[6] == pytest.approx(math.log1p(1))
        assert row[7] == pytest.approx(math.log1p(1))
        j = keys.index(("C1", 0))
        # no partners at t=0: partner means are zero-filled
        assert X[j][2:6].tolist() == [0.0, 0.0, 0.0, 0.0]


class TestPrincipalProjection:
    def test_matches_svd_reference(self):
        rng = np.random.default_rng(0)
        X = rng.normal(size=(10, 7)) * rng.uniform(0.5, 3.0, size=7)
        coords, degenerate = principal_projection(X)
        assert not degenerate

        # independent route: standardize, then SVD right-singular vectors
        Z = (X - X.mean(axis=0)) / X.std(axis=0)
        _, _, vt = np.linalg.svd(Z, full_matrices=False)
        W = vt[:2].T
        for j in range(2):
            i = int(np.argmax(np.abs(W[:, j])))
            if W[i, j] < 0:
                W[:, j] = -W[:, j]
        assert coords == pytest.approx(Z @ W, abs=1e-8)

    def test_deterministic_bit_for_bit(self):
        rng = np.random.default_rng(1)
        X = rng.normal(size=(20, 5))
        a, _ = principal_projection(X)
        b, _ = principal_projection(X.copy())
        assert a.tobytes() == b.tobytes()

    def test_coordinates_are_centered(self):
        rng = np.random.default_rng(2)
        X = rng.normal(size=(30, 6)) + 100.0
        coords, _ = principal_projection(X)
        assert np.abs(coords.mean(axis=0)) == pytest.approx(np.zeros(2), abs=1e-9)

    def test_column_affine_changes_are_invisible(self):
        # standardization absorbs per-column scale and shift
        rng = np.random.default_rng(3)
        X = rng.normal(size=(15, 4))
        scaled = X * np.array([5.0, 0.2, 3.0, 7.0]) + np.array([10, -4, 0, 2.0])
        a, _ = principal_projection(X)
        b, _ = principal_projection(scaled)
        assert a == pytest.approx(b, abs=1e-8)

    def test_rank_one_data_uses_one_axis(self):
        t = np.linspace(0, 1, 12).reshape(-1, 1)
        X = np.hstack([2 * t, -t, 3 * t])
        coords, degenerate = principal_projection(X)
        assert not degenerate
        assert np.abs(coords[:, 1]) == pytest.approx(np.zeros(12), abs=1e-9)
        assert np.std(coords[:, 0]) > 0

    def test_single_effective_column_pads_y_with_zeros(self):
        # constant columns are dropped; one survivor leaves only an x axis
        X = np.column_stack([np.arange(6.0), np.full(6, 3.0), np.full(6, -1.0)])
        coords, degenerate = principal_projection(X)
        assert not degenerate
        assert coords.shape == (6, 2)
        assert coords[:, 1].tolist() == [0.0] * 6
        assert np.std(coords[:, 0]) > 0

    def test_constant_input_is_degenerate(self):
        coords, degenerate = principal_projection(np.full((5, 3), 2.5))
        assert degenerate
        assert coords.tolist() == [[0.0, 0.0]] * 5

    def test_needs_two_rows(self):
        with pytest.raises(InvalidConfig):
            principal_projection(np.zeros((1, 4)))


class TestGlobalEmbedding:
    def test_doc_normalizes_each_panel_to_unit_square(self, demo_timeline):
        doc = global_embedding(demo_timeline).to_doc()
        assert doc["version"] == LAYOUT_VERSION
        assert not doc["degenerate"]
        assert len(doc["panels"]) == demo_timeline.n_timestamps
        for panel in doc["panels"]:
            assert len(panel["points"]) == 35
            xs = [p["x"] for p in panel["points"]]
            ys = [p["y"] for p in panel["points"]]
            assert min(xs) == pytest.approx(0.0) and max(xs) == pytest.approx(1.0)
            assert min(ys) == pytest.approx(0.0) and max(ys) == pytest.approx(1.0)
            ids = [p["companyId"] for p in panel["points"]]
            assert ids == sorted(ids)
        total = sum(len(p["points"]) for p in doc["panels"])
        assert total == 35 * 8

    def test_reproducible(self, demo_timeline):
        assert global_embedding(demo_timeline).to_doc() == global_embedding(
            demo_timeline
        ).to_doc()


@pytest.fixture(scope="module")
def layout_inputs():
    tl = orchard_fixture()
    predictors = {
        cid: fit_firm_explainer(tl, cid, kind="linear") for cid in ("F1", "F2", "S", "C1")
    }
    return tl, predictors


class TestFocusLayout:
    def test_panel_grid(self, layout_inputs):
        tl, predictors = layout_inputs
        layout = focus_layout(tl, ["F1", "F2"], predictors)
        assert [(p.company_id, p.t) for p in layout.panels] == [
            (f, t) for t in range(4) for f in ("F1", "F2")
        ]
        sub = focus_layout(tl, ["F1"], predictors, t_range=[2, 3])
        assert [(p.company_id, p.t) for p in sub.panels] == [("F1", 2), ("F1", 3)]

    def test_vertical_is_per_timestamp_performance_normalization(self, layout_inputs):
        tl, predictors = layout_inputs
        layout = focus_layout(tl, ["F1"], predictors)
        for panel in layout.panels:
            perf = performance(tl.edges_at(panel.t), tl.dataset.company_ids, "pagerank")
            lo, hi = min(perf.values()), max(perf.values())
            expect = lambda cid: (perf[cid] - lo) / (hi - lo)
            assert panel.performance_radius == pytest.approx(expect("F1"))
            for group in panel.supplier_groups + panel.customer_groups:
                for berry in group.berries:
                    assert berry.vertical == pytest.approx(expect(berry.company_id))

    def test_horizontal_offsets_are_side_normalized_attributions(self, layout_inputs):
        tl, predictors = layout_inputs
        layout = focus_layout(tl, ["F1"], predictors, t_range=[2])
        (panel,) = layout.panels
        predictor = predictors["F1"]
        x = predictor.space.row(tl.features_at(2)["F1"], tl.edges_at(2))
        att = shapley(predictor, x)
        offsets = {
            b.company_id: b.horizontal
            for g in panel.supplier_groups + panel.customer_groups
            for b in g.berries
        }
        assert set(offsets) == {"S", "C1"}
        for cid, offset in offsets.items():
            phi = att.of(predictor.space.partner_feature(cid))
            assert -1.0 <= offset <= 1.0
            if offset != 0.0:
                assert math.copysign(1, offset) == math.copysign(1, phi)
        # each side is scaled independently, so a lone nonzero partner sits at +-1
        for g in panel.supplier_groups:
            side_max = max(abs(b.horizontal) for b in g.berries)
            assert side_max in (0.0, pytest.approx(1.0))

    def test_x_position_is_influence_ratio(self, layout_inputs):
        tl, predictors = layout_inputs
        layout = focus_layout(tl, ["F1"], predictors, t_range=[1])
        (panel,) = layout.panels
        predictor = predictors["F1"]
        x = predictor.space.row(tl.features_at(1)["F1"], tl.edges_at(1))
        att = shapley(predictor, x)
        assert panel.x_position == pytest.approx(
            influence_ratio(att, predictor.space, ["S"], ["C1"])
        )
        assert not panel.missing_attribution

    def test_lifecycle_tags_follow_the_timeline(self, layout_inputs):
        tl, predictors = layout_inputs
        layout = focus_layout(tl, ["F2"], predictors)
        by_t = {p.t: p for p in layout.panels}
        # S supplies F2 through t=2 then stops: maintain at 1, terminate at 2
        def supplier_lifecycle(panel):
            (group,) = panel.supplier_groups
            (berry,) = group.berries
            return berry.lifecycle

        assert supplier_lifecycle(by_t[0]) == "initiate"
        assert supplier_lifecycle(by_t[1]) == "maintain"
        assert supplier_lifecycle(by_t[2]) == "terminate"
        assert by_t[3].supplier_groups == ()

    def test_missing_predictor_parks_offsets_and_flags_panel(self, layout_inputs):
        tl, _ = layout_inputs
        layout = focus_layout(tl, ["F1", "C1", "S"], {}, t_range=[1])
        by_focal = {p.company_id: p for p in layout.panels}
        assert by_focal["F1"].missing_attribution
        assert by_focal["F1"].x_position == 0.5  # both sides present
        assert by_focal["C1"].x_position == 0.0  # suppliers only
        assert by_focal["S"].x_position == 1.0  # customers only
        for panel in layout.panels:
            for g in panel.supplier_groups + panel.customer_groups:
                assert all(b.horizontal == 0.0 and b.missing_attribution for b in g.berries)

    def test_shared_supplier_links(self, layout_inputs):
        tl, predictors = layout_inputs
        layout = focus_layout(tl, ["F1", "F2"], predictors)
        links = set(layout.shared_supplier_links)
        # S feeds both focals at t=0..2 but not t=3
        assert links == {(0, "F1", "F2", "S"), (1, "F1", "F2", "S"), (2, "F1", "F2", "S")}

    def test_feature_arcs_scale_to_unit(self, layout_inputs):
        tl, predictors = layout_inputs
        layout = focus_layout(tl, ["F1"], predictors, t_range=[0])
        (panel,) = layout.panels
        for name, value in panel.feature_arcs.items():
            assert value == tl.features_at(0)["F1"][name] / 100.0

    def test_doc_shape(self, layout_inputs):
        tl, predictors = layout_inputs
        doc = focus_layout(tl, ["F1"], predictors, t_range=[1]).to_doc()
        assert doc["version"] == LAYOUT_VERSION
        panel = doc["panels"][0]
        assert set(panel) == {
            "companyId",
            "t",
            "label",
            "focal",
            "supplierGroups",
            "customerGroups",
            "missingAttribution",
        }
        assert set(panel["focal"]) == {"performanceRadius", "featureArcs", "xPosition"}
        group = panel["supplierGroups"][0]
        assert set(group["soil"]) == {"meanPerformance", "focalContribution", "magnitude"}
        assert doc["sharedSupplierLinks"] == []

    def test_soils_attached_to_groups(self, layout_inputs):
        tl, predictors = layout_inputs
        layout = focus_layout(tl, ["F1"], predictors, t_range=[2])
        (panel,) = layout.panels
        (sup_group,) = panel.supplier_groups
        assert sup_group.industry == "Ore"
        perf = performance(tl.edges_at(2), tl.dataset.company_ids, "pagerank")
        assert sup_group.soil_mean_performance == pytest.approx(perf["S"])
        assert 0.0 <= sup_group.soil_magnitude <= 1.0
