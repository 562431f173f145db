import json

from syndetic.engine import decide_n_syndetic
from syndetic.groups import IntegerGroup
from syndetic.reports import DecisionReport, SyndeticWitness
from syndetic.sets import multiples
from syndetic.store import CertificateStore

Z = IntegerGroup()


def test_put_is_idempotent(tmp_path, config):
    store = CertificateStore(str(tmp_path))
    report = decide_n_syndetic(multiples(2), 1, Z, config)
    first = store.put(report)
    second = store.put(report.model_copy(update={"wall_time": 12.5}))
    assert first == second
    assert len(store.entries) == 1
    assert first.verdict == "proved"


def test_get_returns_the_stored_report(tmp_path, config):
    store = CertificateStore(str(tmp_path))
    report = decide_n_syndetic(multiples(2), 2, Z, config)
    entry = store.put(report)
    loaded = store.get(entry.digest)
    assert isinstance(loaded, DecisionReport)
    assert loaded.canonical_json() == report.canonical_json()
    assert store.get("0" * 64) is None


def test_bare_certificates_and_find(tmp_path, config):
    store = CertificateStore(str(tmp_path))
    store.put(decide_n_syndetic(multiples(2), 1, Z, config))
    store.put(decide_n_syndetic(multiples(2), 2, Z, config))
    cert = store.put(SyndeticWitness(n=1, F=[0, 1]))
    assert cert.kind == "syndetic-witness"
    assert [e.verdict for e in store.find(kind="report", verdict="refuted")] == ["refuted"]
    assert len(store.find()) == 3
    assert store.get(cert.digest) == SyndeticWitness(n=1, F=[0, 1])


def test_index_survives_reopening(tmp_path, config):
    CertificateStore(str(tmp_path)).put(decide_n_syndetic(multiples(2), 1, Z, config))
    reopened = CertificateStore(str(tmp_path))
    assert len(reopened.entries) == 1
    with open(tmp_path / "index.json") as f:
        assert len(json.load(f)["entries"]) == 1


def test_corrupt_index_is_ignored(tmp_path):
    (tmp_path / "index.json").write_text("{not json")
    assert CertificateStore(str(tmp_path)).entries == {}
