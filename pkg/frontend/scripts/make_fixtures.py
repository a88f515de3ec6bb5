"""Regenerate tests/fixtures/*.json from a live session service.

Run from the repository root after changing any payload shape:

    python3 frontend/scripts/make_fixtures.py

Every fixture is fetched through the HTTP routes (via the in-process
test client), never assembled by hand, so the snapshots stay honest
about what the server actually sends.
"""

import json
import sys
from pathlib import Path

from fastapi.testclient import TestClient

sys.path.insert(0, str(Path(__file__).resolve().parents[2] / "tests"))

from stubs import ladder_dataset  # noqa: E402

from scsim.datagen import make_demo_dataset  # noqa: E402
from scsim.ingest import dataset_to_doc  # noqa: E402
from scsim.session.api import create_app  # noqa: E402
from scsim.session.service import SessionService  # noqa: E402
from scsim.session.store import SessionStore  # noqa: E402

OUT = Path(__file__).resolve().parent.parent / "tests" / "fixtures"


def write(name: str, doc) -> None:
    path = OUT / name
    path.write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n")
    print(f"wrote {path}")


def shared_supplier_pair(dataset):
    """Two firms sharing a supplier at the last observed timestamp."""
    edges = dataset.network.edges_by_t[-1]
    customers_of = {}
    for s, c in edges:
        customers_of.setdefault(s, set()).add(c)
    for s in sorted(customers_of):
        buyers = sorted(customers_of[s])
        if len(buyers) >= 2:
            return buyers[0], buyers[1]
    raise SystemExit("demo dataset has no shared supplier; change the seed")


def main(tmp: Path) -> None:
    client = TestClient(create_app(SessionService(SessionStore(tmp))))

    # 35 firms x 8 quarters; one simulated turn for lifecycle variety
    demo = make_demo_dataset()
    did = client.post("/datasets", json={"doc": dataset_to_doc(demo)}).json()["datasetId"]
    sid = client.post(
        "/sessions", json={"datasetId": did, "config": {"simulationTurns": 1}}
    ).json()["sessionId"]
    client.post(f"/sessions/{sid}/run", json={})

    write("global.json", client.get(f"/sessions/{sid}/nodes/n7/view/global").json())
    a, b = shared_supplier_pair(demo)
    write(
        "focus.json",
        client.get(
            f"/sessions/{sid}/nodes/n8/view/focus",
            params={"focus": f"{a},{b}", "from": 4, "to": 8},
        ).json(),
    )

    # small ladder session exercising branches, staging, and adjustment
    ladder = ladder_dataset()
    did = client.post("/datasets", json={"doc": dataset_to_doc(ladder)}).json()["datasetId"]
    sid = client.post(
        "/sessions", json={"datasetId": did, "config": {"simulationTurns": 1}}
    ).json()["sessionId"]
    client.post(f"/sessions/{sid}/run", json={})  # n3
    client.post(f"/sessions/{sid}/run", json={})  # n4 under n3
    delete_request = {
        "action": "delete",
        "target": {"kind": "request", "companyId": "C", "requestTarget": "B"},
    }
    client.post(f"/sessions/{sid}/nodes/n4/adjustments", json=delete_request)
    write(
        "adjustment.json",
        client.get(
            f"/sessions/{sid}/nodes/n4/view/adjustment", params={"company": "C"}
        ).json(),
    )
    client.post(f"/sessions/{sid}/nodes/n4/adjustments:apply", json={})
    # leave one staged edit visible in the tree
    client.post(
        f"/sessions/{sid}/nodes/n3/adjustments",
        json={
            "action": "delete",
            "target": {"kind": "request", "companyId": "C", "requestTarget": "A"},
        },
    )
    write("tree.json", client.get(f"/sessions/{sid}/tree").json())
    write(
        "controlpanel.json",
        client.get(
            f"/sessions/{sid}/nodes/n3/view/controlpanel", params={"company": "A"}
        ).json(),
    )


if __name__ == "__main__":
    import tempfile

    with tempfile.TemporaryDirectory() as tmp:
        main(Path(tmp))
