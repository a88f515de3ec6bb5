import pytest

from scsim.datagen import make_demo_dataset
from scsim.model import CompanyRecord, Dataset, TemporalNetwork, Timeline


def build_dataset(
    features_by_company: dict[str, list[dict[str, float]]],
    edges_by_t: list[set[tuple[str, str]]],
    industries: dict[str, str] | None = None,
    feature_names: tuple[str, ...] | None = None,
    knowledge: dict[str, str] | None = None,
    global_knowledge: str = "",
) -> Dataset:
    """Hand-rolled dataset for small fixtures; no validation detours."""
    industries = industries or {}
    knowledge = knowledge or {}
    ids = sorted(features_by_company)
    if feature_names is None:
        feature_names = tuple(sorted(features_by_company[ids[0]][0]))
    n_t = len(features_by_company[ids[0]])
    companies = {
        cid: CompanyRecord(
            id=cid,
            industry=industries.get(cid, "General"),
            features=tuple(dict(f) for f in features_by_company[cid]),
            knowledge=knowledge.get(cid, ""),
        )
        for cid in ids
    }
    return Dataset(
        companies=companies,
        network=TemporalNetwork(tuple(frozenset(e) for e in edges_by_t)),
        feature_names=feature_names,
        labels=tuple(f"Q{i + 1}" for i in range(n_t)),
        global_knowledge=global_knowledge,
    )


def flat_features(values: dict[str, float], n_t: int) -> list[dict[str, float]]:
    return [dict(values) for _ in range(n_t)]


@pytest.fixture(scope="session")
def demo_dataset() -> Dataset:
    return make_demo_dataset()


@pytest.fixture(scope="session")
def demo_timeline(demo_dataset) -> Timeline:
    return Timeline.from_dataset(demo_dataset)


@pytest.fixture()
def pair_dataset() -> Dataset:
    """Two firms, two observed quarters, one supplier edge."""
    return build_dataset(
        {
            "A": [
                {"operation": 60.0, "technology": 55.0},
                {"operation": 62.0, "technology": 54.0},
            ],
            "B": [
                {"operation": 40.0, "technology": 45.0},
                {"operation": 41.0, "technology": 46.0},
            ],
        },
        [{("B", "A")}, {("B", "A")}],
        industries={"A": "Retail", "B": "Logistics"},
    )
