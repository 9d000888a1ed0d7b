import json

import pytest

from syzlab.cli import ANCHORS, Report, ReportCache, cache_key, run
from syzlab.exceptions import ParameterError


def test_moduli_command_passes(tmp_path):
    code, report = run(["moduli", "--i-range", "1..3", "--cache-dir", str(tmp_path)])
    assert code == 0
    assert report.passed
    assert report.anchor == ANCHORS["moduli"]
    assert "grr ell=10" in report.verdicts
    assert "syz_closed i=3" in report.verdicts


def test_second_run_is_served_from_cache(tmp_path):
    cache = tmp_path / "cache"
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    base = ["moduli", "--i-range", "2..4", "--check", "picid", "--cache-dir", str(cache)]
    assert run(base + ["--output", str(first)])[0] == 0
    assert run(base + ["--output", str(second)])[0] == 0
    assert first.read_bytes() == second.read_bytes()
    assert len(list(cache.glob("*.json"))) == 1


def test_usage_errors_exit_with_two(tmp_path):
    assert run(["moduli", "--i-range", "5..2", "--no-cache"])[0] == 2
    assert run(["moduli", "--i-range", "a..b", "--no-cache"])[0] == 2
    assert run(["frobnicate"])[0] == 2
    assert run(["lattice-certify", "--lemma", "theta.div4", "--no-cache"])[0] == 2


def test_lattice_certificate_command():
    code, report = run(["lattice-certify", "--lemma", "nikulin.H_nef", "--g", "11", "--no-cache"])
    assert code == 0
    (cert,) = report.payload["certificates"]
    assert cert["lemma_id"] == "nikulin.H_nef"


def test_betti_command_runs_identity_checks():
    code, report = run(["betti", "--model", "rnc d=3", "--pmax", "3", "--check", "--no-cache"])
    assert code == 0
    assert report.verdicts == {"naturality": True, "euler_diagonal": True}
    assert [1, 1, 3] in report.payload["table"]["entries"]


def test_stored_report_can_be_rendered_again(tmp_path, capsys):
    out = tmp_path / "report.json"
    run(["moduli", "--i-range", "1", "--check", "psi_equal", "--no-cache", "--output", str(out)])
    capsys.readouterr()
    code, report = run(["report", str(out)])
    assert code == 0
    assert report.command == "moduli"
    assert "checks passed" in capsys.readouterr().out


def test_corrupt_cache_entry_is_evicted(tmp_path):
    cache = ReportCache(tmp_path)
    key = cache_key("moduli", {"i_range": "1"}, 0, 1009)
    path = cache.store(key, "{not json")
    assert cache.lookup(key) is None
    assert not path.exists()


def test_cache_key_depends_on_seed_and_prime():
    params = {"model": "rnc d=3", "pmax": 3}
    base = cache_key("betti", params, 0, 1009)
    assert base == cache_key("betti", dict(reversed(list(params.items()))), 0, 1009)
    assert base != cache_key("betti", params, 1, 1009)
    assert base != cache_key("betti", params, 0, 1013)


def test_report_rejects_unknown_anchor():
    report = Report("moduli", {}, ANCHORS["moduli"], 1009, 0)
    data = json.loads(report.to_json())
    data["anchor"] = "somewhere else"
    with pytest.raises(ParameterError):
        Report.from_json(json.dumps(data))


def test_cache_key_depends_on_limits():
    params = {"model": "rnc d=3", "pmax": 3}
    base = cache_key("betti", params, 0, 1009, {"wedge_cap": 10**6, "dense_fill": 0.3})
    assert base != cache_key("betti", params, 0, 1009, {"wedge_cap": 2, "dense_fill": 0.3})
    assert base != cache_key("betti", params, 0, 1009, {"wedge_cap": 10**6, "dense_fill": 0.5})


def test_smaller_wedge_cap_is_not_served_from_cache(tmp_path, monkeypatch):
    argv = ["betti", "--model", "rnc d=3", "--pmax", "3", "--cache-dir", str(tmp_path)]
    monkeypatch.setenv("SYZLAB_WEDGE_CAP", "1000000")
    assert run(argv)[0] == 0
    monkeypatch.setenv("SYZLAB_WEDGE_CAP", "2")
    code, report = run(argv)
    assert code == 1
    assert report.error.startswith("GradedRangeError")
    assert len(list(tmp_path.glob("*.json"))) == 1
