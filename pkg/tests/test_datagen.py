"""The synthetic demo dataset: determinism, shape, and value bounds."""

from scsim.datagen import FEATURES, make_demo_dataset
from scsim.ingest import FEATURE_MAX, FEATURE_MIN


def test_same_seed_same_dataset():
    assert make_demo_dataset(seed=3) == make_demo_dataset(seed=3)


def test_different_seed_changes_something():
    assert make_demo_dataset(seed=3) != make_demo_dataset(seed=4)


def test_requested_shape(demo_dataset):
    assert len(demo_dataset.company_ids) == 35
    assert demo_dataset.n_timestamps == 8
    assert demo_dataset.feature_names == FEATURES
    assert len(demo_dataset.labels) == 8


def test_small_custom_shape():
    ds = make_demo_dataset(n_firms=6, n_timestamps=3, seed=1)
    assert len(ds.company_ids) == 6
    assert ds.n_timestamps == 3


def test_features_stay_in_range(demo_dataset):
    for rec in demo_dataset.companies.values():
        for vec in rec.features:
            for value in vec.values():
                assert FEATURE_MIN <= value <= FEATURE_MAX


def test_edges_are_valid_and_non_self(demo_dataset):
    ids = set(demo_dataset.company_ids)
    for t in range(demo_dataset.n_timestamps):
        for s, c in demo_dataset.network.at(t):
            assert s in ids and c in ids and s != c


def test_every_firm_starts_with_a_supplier(demo_dataset):
    first = demo_dataset.network.at(0)
    for cid in demo_dataset.company_ids:
        assert demo_dataset.network.suppliers_of(cid, 0), cid


def test_network_churns_over_time(demo_dataset):
    snapshots = {demo_dataset.network.at(t) for t in range(demo_dataset.n_timestamps)}
    assert len(snapshots) > 1


def test_every_firm_has_industry_and_some_have_knowledge(demo_dataset):
    assert all(rec.industry for rec in demo_dataset.companies.values())
    assert any(rec.knowledge for rec in demo_dataset.companies.values())
