import json

from robbalab import cli


def test_tables_default(capsys):
    rc = cli.main(["tables"])
    out = capsys.readouterr().out
    assert rc == 0
    assert "tables: PASS" in out
    assert "unreachable here (Euler characteristic)" in out


def test_tables_json_out(tmp_path, capsys):
    path = tmp_path / "rows.jsonl"
    rc = cli.main(["tables", "--json-out", str(path)])
    assert rc == 0
    rows = [json.loads(line) for line in path.read_text().splitlines()]
    by_d1 = {r["d1"]: r for r in rows}
    assert by_d1["x^-1"]["dims"] == [1, 3, 3, 1]
    assert by_d1["x^2"]["dims"] == [0, 0, 0, 0]
    assert by_d1["triv"]["dims"] == [1, 2, 1, 0]


def test_checks_subset(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"suites": ["dictionary", "extensions"]}))
    rc = cli.main(["checks", "--config", str(cfg)])
    out = capsys.readouterr().out
    assert rc == 0
    assert "checks: PASS" in out
    assert "dictionary/psi o phi = id" in out


def test_malformed_character_spec(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"pairs": [["nonsense!!", "triv"]]}))
    rc = cli.main(["tables", "--config", str(cfg)])
    assert rc == 2
    assert "config error" in capsys.readouterr().err


def test_bad_config_rejected(capsys):
    rc = cli.main(["tables", "--p", "4"])
    assert rc == 2


def test_dump_module(tmp_path, capsys):
    path = tmp_path / "module.json"
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"pairs": [["x^-1", "triv"]], "N": 3}))
    rc = cli.main(["dump-module", "--config", str(cfg),
                   "--json-out", str(path)])
    assert rc == 0
    payload = json.loads(path.read_text())
    assert payload["N"] == 3
    assert len(payload["tau"]) == 4


def test_sheaf_fuzz_small(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"samples": 3, "pairing_samples": 1}))
    rc = cli.main(["sheaf-fuzz", "--config", str(cfg)])
    out = capsys.readouterr().out
    assert rc == 0
    assert "sheaf-fuzz: PASS" in out
    assert "u_b instance" in out
