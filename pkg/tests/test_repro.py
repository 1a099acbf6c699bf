import json

import pytest

from tcircuits import repro


@pytest.mark.parametrize("name", list(repro.TARGETS))
def test_target_matches_golden(name, tmp_path):
    r = repro.run(name, tmp_path)
    assert r.checks and all(r.checks.values()), r.checks
    assert r.golden == "match"
    for a in r.artifacts:
        assert a.exists() and a.stat().st_size > 0


def test_unknown_target():
    with pytest.raises(KeyError, match="oscillator"):
        repro.run("nope")


def test_regen_then_tamper(tmp_path):
    gd = tmp_path / "golden"
    gd.mkdir()
    assert repro.run("oscillator", tmp_path, golden_dir=gd).golden == "missing"
    assert repro.run("oscillator", tmp_path, regen=True, golden_dir=gd).golden == "regenerated"
    assert repro.run("oscillator", tmp_path, golden_dir=gd).golden == "match"
    doc = json.loads((gd / "oscillator.json").read_text())
    doc["summary"]["extra"] = 1
    (gd / "oscillator.json").write_text(json.dumps(doc))
    r = repro.run("oscillator", tmp_path, golden_dir=gd)
    assert r.golden == "differs" and not r.passed
