import json
import math
import os
import subprocess
import sys
from collections import Counter

import pytest

from qflex.cli import (
    EXIT_INPUT,
    EXIT_OK,
    EXIT_REFUTED,
    FIXTURES,
    dumps,
    main,
    parse_complex,
    parse_records_csv,
)


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize(
    "text,value",
    [("1.5+0.5i", 1.5 + 0.5j), ("3", 3), ("-i", -1j), ("i", 1j), ("2-3i", 2 - 3j), ("0.25j", 0.25j), (" -4 ", -4)],
)
def test_parse_complex(text, value):
    assert parse_complex(text) == value


@pytest.mark.parametrize("text", ["abc", "inf", "nan", "1+2k"])
def test_parse_complex_rejects(text):
    with pytest.raises(ValueError):
        parse_complex(text)


def test_flexes_json(capsys):
    code, out, _ = run_cli(capsys, "flexes", "--a", "4", "--b", "4", "--format", "json")
    assert code == EXIT_OK
    rep = json.loads(out)
    assert rep["params"] == {"a": [4.0, 0.0], "b": [4.0, 0.0]}
    assert len(rep["flexes"]) == 24
    assert {f["kind"] for f in rep["flexes"]} == {"ordinary"}
    for f in rep["flexes"]:
        assert len(f["point"]) == 3 and all(len(c) == 2 for c in f["point"])
        assert f["contact_order"] == 3 and f["weight"] == 1


def test_flexes_sqrt5_spot_point(capsys):
    code, out, _ = run_cli(capsys, "flexes", "--a", "0", "--b", repr(math.sqrt(5)))
    rep = json.loads(out)
    assert code == EXIT_OK and len(rep["flexes"]) == 24
    target = (-0.410813j, -1.37547j)
    gaps = []
    for f in rep["flexes"]:
        x, y, z = (complex(*c) for c in f["point"])
        if abs(z) > 1e-9:
            gaps.append(max(abs(x / z - target[0]), abs(y / z - target[1])))
    assert min(gaps) < 1e-3


def test_flexes_weight_sum_b0(capsys):
    code, out, _ = run_cli(capsys, "flexes", "--a", "1.5", "--b", "0")
    assert code == EXIT_OK
    assert sum(f["weight"] for f in json.loads(out)["flexes"]) == 24


def test_degenerate_input_exit_code(capsys):
    code, _, err = run_cli(capsys, "flexes", "--a", "2", "--b", "1")
    assert code == EXIT_INPUT and "a^2-4" in err
    code, _, err = run_cli(capsys, "flexes", "--a", "1", "--b", "0")
    assert code == EXIT_INPUT and "a^2-1" in err
    code, _, err = run_cli(capsys, "verify", "--a", "nope", "--b", "0")
    assert code == EXIT_INPUT
    code, _, err = run_cli(capsys, "verify", "--a", "3")
    assert code == EXIT_INPUT


def _floats(obj):
    if isinstance(obj, float):
        yield obj
    elif isinstance(obj, dict):
        for v in obj.values():
            yield from _floats(v)
    elif isinstance(obj, list):
        for v in obj:
            yield from _floats(v)


def test_json_round_trip(capsys):
    for args in (("verify", "--a", "-5", "--b", "1"), ("flexes", "--a", "1.3+0.2i", "--b", "0.7-i")):
        _, out, _ = run_cli(capsys, *args)
        line = out.rstrip("\n")
        assert dumps(json.loads(line)) == line
        assert not any(v == 0 and math.copysign(1, v) < 0 for v in _floats(json.loads(line)))


def test_csv_and_json_same_records(capsys):
    _, js, _ = run_cli(capsys, "orbits", "--a", "3", "--b", "2.1213203435596424", "--format", "json")
    _, cs, _ = run_cli(capsys, "orbits", "--a", "3", "--b", "2.1213203435596424", "--format", "csv")

    def key(r):
        return json.dumps(r, sort_keys=True)

    assert Counter(map(key, json.loads(js)["flexes"])) == Counter(map(key, parse_records_csv(cs)))


def test_verify_examples(capsys):
    code, out, _ = run_cli(capsys, "verify", "--a", "3", "--b", "3")
    rep = json.loads(out)
    assert code == EXIT_OK and rep["verdict"] == "CONFIRMED"
    assert rep["computed"] == {"ordinary": 0, "hyperflex": 12}
    code, out, _ = run_cli(capsys, "verify", "--a", "-5", "--b", "1")
    rep = json.loads(out)
    assert rep["verdict"] == "CONFIRMED" and rep["signature"] == ["1_8 hyperflex", "1_8 ordinary"]
    code, out, _ = run_cli(capsys, "verify", "--a", "0", "--b", "0")
    rep = json.loads(out)
    assert rep["predicted"]["row"] == "b=0, a in {0,6}"
    assert rep["computed"] == {"ordinary": 0, "hyperflex": 12} and rep["group_order"] == 16


def test_verify_refuted_exit_code(capsys):
    code, out, _ = run_cli(capsys, "verify", "--a", "-6", "--b", "0")
    assert code == EXIT_REFUTED and json.loads(out)["verdict"] == "REFUTED"


def test_text_format(capsys):
    code, out, _ = run_cli(capsys, "verify", "--a", "4", "--b", "4", "--format", "text")
    assert "24 ordinary, 0 hyperflex" in out and "verdict: CONFIRMED" in out


def test_scan_grid(capsys):
    code, out, _ = run_cli(
        capsys, "scan", "--a-range", "2.5", "4.5", "--a-steps", "5", "--b-range", "2.5", "4.5", "--b-steps", "5"
    )
    rows = [json.loads(l) for l in out.splitlines()]
    assert code == EXIT_OK and len(rows) == 25
    assert [tuple(r["params"]["a"] + r["params"]["b"]) for r in rows] == [
        (a, 0.0, b, 0.0) for a in (2.5, 3.0, 3.5, 4.0, 4.5) for b in (2.5, 3.0, 3.5, 4.0, 4.5)
    ]
    assert {r["verdict"] for r in rows} == {"CONFIRMED"}
    # (3, 3) lies on Q = 0; every other grid point is in the generic row
    rows_by_source = Counter(r["predicted"]["row"] for r in rows)
    assert rows_by_source == {"b!=0, PQ!=0": 24, "b!=0, P!=0, Q=0": 1}


def test_scan_skips_degenerate(capsys):
    code, out, _ = run_cli(capsys, "scan", "--a-range", "1", "3", "--a-steps", "3", "--b-range", "1", "1", "--b-steps", "1")
    rows = [json.loads(l) for l in out.splitlines()]
    assert [r["verdict"] for r in rows] == ["SKIPPED", "SKIPPED", "CONFIRMED"]
    assert "a^2-4" in rows[1]["reason"]


def test_scan_single_point_equals_verify(capsys):
    _, scan, _ = run_cli(capsys, "scan", "--a-range", "4", "4", "--b-range", "4", "4")
    _, verify, _ = run_cli(capsys, "verify", "--a", "4", "--b", "4")
    assert scan == verify


def test_scan_parallel_matches_serial(capsys):
    args = ("scan", "--a-range", "-3", "3", "--a-steps", "3", "--b-range", "0.5", "2.5", "--b-steps", "2")
    _, serial, _ = run_cli(capsys, *args)
    _, parallel, _ = run_cli(capsys, *args, "--workers", "3")
    assert serial == parallel


def test_config_file_and_profile(tmp_path, capsys, monkeypatch):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# reference instance\na = 4\nb = 4\nformat = text\n")
    code, out, _ = run_cli(capsys, "verify", "--config", str(cfg))
    assert code == EXIT_OK and "verdict: CONFIRMED" in out
    code, out, _ = run_cli(capsys, "verify", "--config", str(cfg), "--format", "json")
    assert json.loads(out)["verdict"] == "CONFIRMED"
    monkeypatch.setenv("QFLEX_TOLERANCE_PROFILE", "strict")
    code, out, _ = run_cli(capsys, "verify", "--a", "4", "--b", "4")
    assert code == EXIT_OK
    monkeypatch.setenv("QFLEX_TOLERANCE_PROFILE", "bogus")
    code, _, err = run_cli(capsys, "verify", "--a", "4", "--b", "4")
    assert code == EXIT_INPUT and "bogus" in err


def test_tolerance_override_validation(capsys):
    code, _, err = run_cli(capsys, "verify", "--a", "4", "--b", "4", "--cluster-radius", "1e-3")
    assert code == EXIT_INPUT
    code, _, _ = run_cli(capsys, "verify", "--a", "4", "--b", "4", "--point-eps", "1e-5", "--cluster-radius", "1e-6")
    assert code == EXIT_OK


def test_output_file(tmp_path, capsys):
    target = tmp_path / "out.json"
    code, out, _ = run_cli(capsys, "flexes", "--a", "4", "--b", "4", "--output", str(target))
    assert code == EXIT_OK and out == ""
    assert len(json.loads(target.read_text())["flexes"]) == 24


def test_repro(capsys):
    code, out, _ = run_cli(capsys, "repro")
    rows = {r["fixture"]: r for r in map(json.loads, out.splitlines())}
    assert list(rows) == [f.name for f in FIXTURES]
    # counts, signatures and verdicts hold for every fixture
    for r in rows.values():
        assert r["verdict"] == "CONFIRMED"
        assert not [f for f in r["failures"] if not f.startswith("no flex within")]
    assert rows["C(0,b) b=sqrt6"]["signature"] == ["1_8 hyperflex", "1_8 ordinary"]
    assert rows["C(0,b) b=3sqrt(2/5)"]["signature"] == ["1_4 hyperflex", "2_8 ordinary"]
    # exit status reflects every coordinate spot check, including the one
    # whose printed decimals are off (see the acceptance suite)
    failing = [n for n, r in rows.items() if not r["passed"]]
    assert code == (EXIT_OK if not failing else EXIT_REFUTED)


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "qflex", "verify", "--a", "4", "--b", "4", "--format", "text"],
        capture_output=True,
        text=True,
        env={**os.environ, "QFLEX_TOLERANCE_PROFILE": "default"},
    )
    assert proc.returncode == 0 and "CONFIRMED" in proc.stdout
