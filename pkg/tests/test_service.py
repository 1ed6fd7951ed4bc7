"""The local HTTP service: endpoints, idempotency, revisions, persistence."""

import json

import pytest
from fastapi.testclient import TestClient

from chainsleuth.cli import main as cli_main
from chainsleuth.service import create_app


@pytest.fixture()
def client(case1_bundle, tmp_path):
    app = create_app(str(tmp_path / "data"))
    with TestClient(app) as c:
        c.data_dir = str(tmp_path / "data")
        yield c


def _create(client, case1_bundle, case1, **extra):
    response = client.post("/investigations", json={
        "source": {"fixtures": case1_bundle},
        "token": case1.token.hex,
        **extra,
    })
    assert response.status_code == 200, response.text
    return response.json()


def test_create_and_fetch_investigation(client, case1_bundle, case1):
    created = _create(client, case1_bundle, case1)
    assert created["verdict"] == "sell_rug_pull"
    inv_id = created["id"]
    got = client.get(f"/investigations/{inv_id}").json()
    assert got["token"] == case1.token.hex
    assert got["revision"] == 0
    assert got["pump_and_dump"] is True


def test_create_errors(client, case1, tmp_path):
    # bad source
    r = client.post("/investigations", json={
        "source": {"fixtures": str(tmp_path / "missing")},
        "token": case1.token.hex,
    })
    assert r.status_code == 400
    assert r.json()["code"] == "creation_error"
    # unknown token
    r = client.post("/investigations", json={
        "source": {"fixtures": str(tmp_path / "missing")},
    })
    assert r.status_code == 400
    # live mode without the key names the missing variable
    r = client.post("/investigations", json={
        "source": {"live": "https://api.example.invalid"},
        "token": case1.token.hex,
    })
    assert r.status_code == 400
    assert "CHAINSLEUTH_API_KEY" in r.json()["message"]


def test_unknown_investigation_404(client):
    assert client.get("/investigations/inv-999999").status_code == 404


def test_initial_graph_is_seeded_depth_one(client, case1_bundle, case1):
    created = _create(client, case1_bundle, case1)
    graph = client.get(f"/investigations/{created['id']}/graph").json()
    assert graph["revision"] == 0
    addresses = {n["address"] for n in graph["nodes"]}
    assert case1.actor("scammer").hex in addresses
    assert case1.actor("b1").hex in addresses  # one hop from the seed
    assert case1.actor("b2").hex not in addresses  # two hops: not yet


def test_expand_flow_and_idempotence(client, case1_bundle, case1):
    created = _create(client, case1_bundle, case1)
    inv_id = created["id"]
    b1 = case1.actor("b1").hex

    first = client.post(f"/investigations/{inv_id}/expand",
                        json={"address": b1, "idempotency_key": "k1"}).json()
    assert first["status"] == "expanded"
    assert first["revision"] == 1
    new_addresses = {n["address"] for n in first["delta"]["nodes"]}
    assert case1.actor("b2").hex in new_addresses

    # same idempotency key: identical response, no new revision
    replay = client.post(f"/investigations/{inv_id}/expand",
                         json={"address": b1, "idempotency_key": "k1"}).json()
    assert replay == first

    # same node, new key: explicit no-op with empty delta
    second = client.post(f"/investigations/{inv_id}/expand",
                         json={"address": b1, "idempotency_key": "k2"}).json()
    assert second["status"] == "already_expanded"
    assert second["delta"]["nodes"] == [] and second["delta"]["edges"] == []
    assert second["revision"] == 1


def test_expand_terminal_is_noop_with_reason(client, case1_bundle, case1):
    created = _create(client, case1_bundle, case1)
    inv_id = created["id"]
    r = client.post(f"/investigations/{inv_id}/expand",
                    json={"address": case1.actor("bridge").hex}).json()
    assert r["status"] == "terminal"
    assert r["revision"] == 0


def test_graph_revision_immutable(client, case1_bundle, case1):
    created = _create(client, case1_bundle, case1)
    inv_id = created["id"]
    rev0_before = client.get(f"/investigations/{inv_id}/graph?rev=0").content
    client.post(f"/investigations/{inv_id}/expand",
                json={"address": case1.actor("b1").hex})
    client.post(f"/investigations/{inv_id}/tag",
                json={"address": case1.actor("a2").hex,
                      "category": "exchange", "label": "Somewhere"})
    rev0_after = client.get(f"/investigations/{inv_id}/graph?rev=0").content
    assert rev0_before == rev0_after
    latest = client.get(f"/investigations/{inv_id}/graph").json()
    assert latest["revision"] == 2
    assert client.get(f"/investigations/{inv_id}/graph?rev=9").status_code == 404


def test_tagging_makes_node_terminal(client, case1_bundle, case1):
    created = _create(client, case1_bundle, case1)
    inv_id = created["id"]
    b1 = case1.actor("b1").hex
    tag = client.post(f"/investigations/{inv_id}/tag",
                      json={"address": b1, "category": "exchange",
                            "label": "Investigator note"}).json()
    assert tag["revision"] == 1
    graph = client.get(f"/investigations/{inv_id}/graph").json()
    node = next(n for n in graph["nodes"] if n["address"] == b1)
    assert node["terminal"] is True
    assert node["tag_label"] == "Investigator note"
    # the registry itself is untouched: annotations layer above it
    assert graph["annotations"][b1]["label"] == "Investigator note"
    # expanding the now-terminal node refuses
    r = client.post(f"/investigations/{inv_id}/expand", json={"address": b1}).json()
    assert r["status"] == "terminal"


def test_retag_supersedes_with_audit(client, case1_bundle, case1):
    created = _create(client, case1_bundle, case1)
    inv_id = created["id"]
    b1 = case1.actor("b1").hex
    client.post(f"/investigations/{inv_id}/tag",
                json={"address": b1, "category": "other", "label": "first"})
    client.post(f"/investigations/{inv_id}/tag",
                json={"address": b1, "category": "exchange", "label": "second"})
    audit = client.get(f"/investigations/{inv_id}").json()["audit"]
    assert len(audit) == 2
    assert audit[1]["superseded"] == {"category": "other", "label": "first"}


def test_tag_validation(client, case1_bundle, case1):
    created = _create(client, case1_bundle, case1)
    inv_id = created["id"]
    r = client.post(f"/investigations/{inv_id}/tag",
                    json={"address": case1.actor("b1").hex,
                          "category": "castle", "label": "x"})
    assert r.status_code == 400 and r.json()["code"] == "bad_category"
    r = client.post(f"/investigations/{inv_id}/tag",
                    json={"address": case1.actor("b1").hex,
                          "category": "exchange", "label": ""})
    assert r.status_code == 400 and r.json()["code"] == "bad_label"


def test_state_survives_restart(case1_bundle, case1, tmp_path):
    data_dir = str(tmp_path / "data")
    with TestClient(create_app(data_dir)) as client:
        created = _create(client, case1_bundle, case1)
        inv_id = created["id"]
        client.post(f"/investigations/{inv_id}/expand",
                    json={"address": case1.actor("b1").hex})
        graph_before = client.get(f"/investigations/{inv_id}/graph").content

    # a fresh app over the same data dir resumes identically
    with TestClient(create_app(data_dir)) as reborn:
        graph_after = reborn.get(f"/investigations/{inv_id}/graph").content
        assert graph_after == graph_before
        assert reborn.get(f"/investigations/{inv_id}").json()["revision"] == 1


def test_timeline_verdict_attribution_endpoints(client, case1_bundle, case1):
    created = _create(client, case1_bundle, case1)
    inv_id = created["id"]
    timeline = client.get(f"/investigations/{inv_id}/timeline").json()
    assert timeline["transfer_count"] == 154
    verdict = client.get(f"/investigations/{inv_id}/verdict").json()
    assert verdict["classification"]["verdict"] == "sell_rug_pull"
    assert verdict["economics"]["revenue_eth"] == "10.57"
    attribution = client.get(f"/investigations/{inv_id}/attribution").json()
    assert any("deployer" in entry["roles"] for entry in attribution)


def test_report_bytes_identical_to_cli(client, case1_bundle, case1, tmp_path):
    created = _create(client, case1_bundle, case1)
    service_json = client.get(
        f"/investigations/{created['id']}/report?format=machine").content
    service_md = client.get(
        f"/investigations/{created['id']}/report?format=human").content

    out = tmp_path / "cli-out"
    assert cli_main(["report", "--fixtures", case1_bundle,
                     "--token", case1.token.hex, "--out", str(out)]) == 0
    assert (out / "report.json").read_bytes() == service_json
    assert (out / "report.md").read_bytes() == service_md
