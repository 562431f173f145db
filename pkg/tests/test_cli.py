import json

import pytest

from syndetic.cli import main, recorded_command

FIG2 = ["check-nsyndetic", "--set", "residue:3:exclude0"]


@pytest.fixture(autouse=True)
def isolated(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv("SYNDETIC_CONFIG", raising=False)


def read(path):
    with open(path, encoding="utf-8") as f:
        return json.load(f)


def test_non_multiples_of_three(tmp_path):
    out = tmp_path / "report.json"
    assert main(FIG2 + ["--n", "2", "--out", str(out)]) == 0
    report = read(out)
    assert report["verdict"] == "proved"
    assert report["certificate"]["F"] == [0, 1, 2]
    assert report["command"] == FIG2 + ["--n", "2"]
    assert main(FIG2 + ["--n", "3", "--out", str(out)]) == 1


def test_undecided_exit_code(tmp_path):
    out = tmp_path / "report.json"
    assert main(["check-nsyndetic", "--set", "interval:1:", "--n", "1", "--window=-100:100", "--out", str(out)]) == 2


def test_usage_errors():
    assert main(["check-nsyndetic", "--bogus"]) == 64
    assert main(["check-nsyndetic"]) == 64
    assert main(["check-nsyndetic", "--set", "even", "--window", "5:1"]) == 64
    assert main(["check-scs", "--group", "f2", "--set", "cylinder:a", "--epsilon", "2"]) == 64


def test_library_errors():
    assert main(["check-symmetric", "--set", "residue:17:0", "--method", "closure"]) == 65
    assert main(["check-nsyndetic", "--group", "heisenberg", "--set", "even"]) == 3


def test_verify_replays_a_report(tmp_path):
    out = tmp_path / "report.json"
    assert main(FIG2 + ["--n", "2", "--out", str(out)]) == 0
    checked = tmp_path / "verify.json"
    assert main(["verify", str(out), "--out", str(checked)]) == 0
    assert read(checked)["evidence"] == {"replay": True, "certificate": True}

    report = read(out)
    report["certificate"]["F"] = [0, 1]
    out.write_text(json.dumps(report))
    assert main(["verify", str(out), "--out", str(checked)]) == 1
    evidence = read(checked)["evidence"]
    assert evidence["mismatch"] == ["certificate"]
    assert evidence["certificate"] is False


def test_scs_certificate_files(tmp_path):
    cert = tmp_path / "cert.json"
    assert main(["build-scs-cert", "--epsilon", "1/4", "--emit-cert", str(cert), "--out", str(tmp_path / "r.json")]) == 0
    assert read(cert)["kind"] == "scs-certificate"
    assert main(["verify", str(cert), "--out", str(tmp_path / "v.json")]) == 0
    assert main(["verify-scs-cert", str(cert), "--out", str(tmp_path / "v.json")]) == 0
    assert main(["verify-scs-cert", str(cert), "--epsilon", "1/100", "--out", str(tmp_path / "v.json")]) == 1


def test_dense_orbit_on_a_finite_group(tmp_path):
    out = str(tmp_path / "r.json")
    assert main(["dense-orbit", "--group", "s3", "--set", "all", "--out", out]) == 0
    assert main(["dense-orbit", "--group", "s3", "--set", "empty", "--out", out]) == 1


def test_store_flag(tmp_path):
    (tmp_path / "syndetic.env").write_text(f"SYNDETIC_CERT_DIR={tmp_path / 'certs'}\n")
    assert main(FIG2 + ["--n", "2", "--out", str(tmp_path / "r.json"), "--store"]) == 0
    assert len(read(tmp_path / "certs" / "index.json")["entries"]) == 1


def test_schemas(tmp_path):
    assert main(["schemas", "--out", str(tmp_path / "schemas")]) == 0
    written = sorted(p.name for p in (tmp_path / "schemas").iterdir())
    assert len(written) == 8
    assert "decision-report.schema.json" in written


def test_reports_are_deterministic(tmp_path):
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    for out in (first, second):
        assert main(["check-thick", "--set", "odd", "--n", "2", "--out", str(out)]) == 0
    a, b = read(first), read(second)
    a.pop("wall_time")
    b.pop("wall_time")
    assert a == b


def test_recorded_command_drops_output_flags():
    argv = ["check-nsyndetic", "--out", "r.json", "--set", "even", "--store", "-v", "--emit-cert=c.json"]
    assert recorded_command(argv) == ["check-nsyndetic", "--set", "even"]
