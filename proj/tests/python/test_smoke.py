"""Smoke tests for the _netdiag extension module."""

import json

import pytest

nd = pytest.importorskip("_netdiag")


def test_catalog_constants():
    assert nd.CATALOG_SIZE == 42
    assert len(nd.fault_labels()) == 42
    assert len(nd.fault_families()) == 12
    assert nd.DEFAULT_BUDGET == 20
    assert nd.family_of("bgp_hijacking") == "bgp"
    with pytest.raises(ValueError):
        nd.family_of("nope")


def test_generate_is_deterministic_and_json_clean():
    a = nd.generate("clos_bgp", "small", seed=3)
    b = nd.generate("clos_bgp", "small", seed=3)
    assert a == b
    json.dumps(a)  # plain data, fully serializable
    assert set(a) == {"scenario", "size", "seed", "devices", "links", "manifest"}
    assert len(a["devices"]) == 10


def test_inject_verify_roundtrip():
    topo = nd.generate("campus_ospf_service", "small", seed=4)
    targets = nd.enumerate_targets(topo, "dns_service_down")
    assert targets
    out = nd.inject(topo, "dns_service_down", targets[0], seed=4)
    assert out["truth"]["is_anomaly"] is True
    assert out["truth"]["labels"] == ["dns_service_down"]
    assert nd.verify_injection(out["topology"], out["truth"])["verified"] is True
    # the unapplied mutation is caught
    assert nd.verify_injection(topo, out["truth"])["verified"] is False
    assert nd.verify_benign(topo)["benign"] is True


def test_diagnose_fault_end_to_end():
    topo = nd.generate("isp_static", "small", seed=5)
    targets = nd.enumerate_targets(topo, "host_wrong_gateway")
    inc = nd.make_incident("isp_static", "small", 5, "host_wrong_gateway", targets[0])
    row = nd.diagnose(inc)
    assert row["excluded"] is False
    assert row["outcome"] == "submitted"
    assert row["submission"]["labels"] == ["host_wrong_gateway"]
    assert row["score"]["f1"] == 1.0
    assert row["turns_used"] <= nd.DEFAULT_BUDGET
    assert row["trace"]["events"][0]["kind"] == "scan"


def test_diagnose_benign_is_silent():
    inc = nd.make_incident("clos_bgp", "small", 6)
    row = nd.diagnose(inc)
    assert row["outcome"] == "no_anomaly"
    assert row["submission"]["is_anomaly"] is False
    assert row["turns_used"] == 6


def test_score_shapes():
    s = nd.score({"is_anomaly": True, "labels": ["host_crash"], "devices": ["h1"]},
                 {"is_anomaly": True, "labels": ["host_crash"], "devices": ["h1", "h2"]})
    assert s["label_correct"] is True
    assert s["precision"] == 1.0
    assert s["recall"] == 0.5
    s = nd.score(None, {"is_anomaly": True, "labels": ["host_crash"], "devices": ["h1"]})
    assert s["submitted"] is False and s["f1"] == 0.0


def test_bench_slice():
    res = nd.run_bench(filter="small/web_dos_attack", check=True)
    assert res["incidents"] >= 1
    assert res["label_correct"] == res["incidents"]
    assert res["invariant_failures"] == 0
    assert "summary" in res


def test_grid_listing():
    rows = nd.grid("clos_bgp/small")
    ids = [r["incident_id"] for r in rows]
    assert "clos_bgp/small/benign" in ids
    assert all(i.startswith("clos_bgp/small/") for i in ids)
