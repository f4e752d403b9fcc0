import json
import subprocess
import sys

import pytest

from cdsymbols.cli import acceptance_grid, main, parse_quotient
from cdsymbols.hecke import QuotientSpec


def run_cli(args, **kw):
    return subprocess.run(
        [sys.executable, "-m", "cdsymbols.cli", *args],
        capture_output=True,
        text=True,
        **kw,
    )


def test_parse_quotient():
    assert parse_quotient("none") == QuotientSpec()
    assert parse_quotient("trivU:5,7") == QuotientSpec(trivial_u=(5, 7))
    assert parse_quotient("trivU:7+t2eis") == QuotientSpec(trivial_u=(7,), t2=True)
    assert parse_quotient("t2eis-global") == QuotientSpec(t2=True, t2_global=True)
    with pytest.raises(ValueError):
        parse_quotient("hida")


def test_verify_json_schema_and_field_order(tmp_path):
    out = tmp_path / "r.json"
    csvp = tmp_path / "r.csv"
    code = main([
        "verify", "--p", "5", "--k", "1", "--M", "1", "--theta", "[0]",
        "--out", str(out), "--csv", str(csvp), "--stable",
    ])
    assert code == 0
    payload = json.loads(out.read_text())
    assert list(payload) == ["params", "case", "dims", "extras", "divisors", "equal", "millis"]
    assert list(payload["params"]) == ["p", "k", "M", "N", "variant", "theta", "quotient", "cd"]
    assert payload["case"] == "a" and payload["equal"] is True
    assert payload["millis"] == 0
    header = csvp.read_text().splitlines()[0]
    assert header.startswith("p,k,M,N,variant,theta,quotient,cd,case,")


def test_verify_assert_mode_exit_codes(tmp_path, capsys):
    # passing claim
    assert main(["verify", "--p", "5", "--k", "1", "--M", "1", "--theta", "[0]", "--assert"]) == 0
    # uncovered scenario never fails assertion
    assert main(["verify", "--p", "5", "--k", "1", "--M", "1", "--theta", "omega^2", "--assert"]) == 0
    # a failing asserted identity exits nonzero (the conductor-M regime)
    assert main(["verify", "--p", "7", "--k", "1", "--M", "5", "--theta", "omega^2*quad@5", "--assert"]) == 1
    capsys.readouterr()


def test_verify_rejects_bad_config():
    r = run_cli(["verify", "--p", "5", "--k", "1", "--M", "11", "--theta", "[0]"])
    assert r.returncode == 2
    assert "phi" in r.stderr
    r2 = run_cli(["verify", "--p", "5", "--k", "1", "--M", "1", "--theta", "nonsense"])
    assert r2.returncode == 2


def test_grid_runs_config_file(tmp_path):
    cfg = tmp_path / "grid.txt"
    cfg.write_text(
        "# demo grid\n"
        "--p 5 --k 1 --M 1 --theta [0]\n"
        "--p 5 --k 1 --M 1 --theta [2]\n"
        "--p 5 --k 1 --M 11 --theta [0]\n"  # invalid scenario: recorded, not fatal
    )
    out = tmp_path / "grid.json"
    code = main(["grid", "--config", str(cfg), "--out", str(out), "--stable"])
    assert code == 0
    payload = json.loads(out.read_text())
    assert payload["summary"]["scenarios"] == 3
    assert payload["summary"]["errors"] == 1
    assert payload["summary"]["claims_passed"] >= 1
    assert any("error" in row for row in payload["reports"])
    # assert mode turns the recorded error into a nonzero exit
    assert main(["grid", "--config", str(cfg), "--stable", "--assert"]) == 1


def test_grid_empty_config(tmp_path):
    cfg = tmp_path / "empty.txt"
    cfg.write_text("# nothing here\n")
    out = tmp_path / "empty.json"
    assert main(["grid", "--config", str(cfg), "--out", str(out), "--stable"]) == 0
    payload = json.loads(out.read_text())
    assert payload["reports"] == [] and payload["summary"]["scenarios"] == 0


def test_grid_deterministic_bytes(tmp_path):
    cfg = tmp_path / "grid.txt"
    cfg.write_text("--p 5 --k 1 --M 1 --theta [0]\n--p 5 --k 2 --M 1 --theta [2]\n")
    out1, out2 = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["grid", "--config", str(cfg), "--out", str(out1), "--stable"]) == 0
    assert main(["grid", "--config", str(cfg), "--out", str(out2), "--stable"]) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_grid_worker_pool_subprocess(tmp_path):
    cfg = tmp_path / "grid.txt"
    cfg.write_text("--p 5 --k 1 --M 1 --theta [0]\n--p 7 --k 1 --M 1 --theta [0]\n")
    out = tmp_path / "par.json"
    r = run_cli(["grid", "--config", str(cfg), "--out", str(out), "--stable", "--workers", "2"])
    assert r.returncode == 0
    payload = json.loads(out.read_text())
    assert payload["summary"]["scenarios"] == 2 and payload["summary"]["errors"] == 0
    # order follows the config file regardless of completion order
    assert [row["params"]["p"] for row in payload["reports"]] == [5, 7]


def test_properties_cli_deterministic(tmp_path):
    out1, out2 = tmp_path / "p1.json", tmp_path / "p2.json"
    args = ["properties", "--seed", "7", "--cases", "3",
            "--suites", "howell_oracle,ring_invariants"]
    assert main(args + ["--out", str(out1)]) == 0
    assert main(args + ["--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    payload = json.loads(out1.read_text())
    assert payload["seed"] == 7 and payload["all_passed"] is True


def test_acceptance_grid_is_wellformed():
    lines = acceptance_grid()
    assert len(lines) >= 40
    assert all(line.startswith("--p") for line in lines)
    # both precisions appear
    assert any("--k 1" in line for line in lines)
    assert any("--k 2" in line for line in lines)


def test_console_entrypoint_help():
    r = run_cli(["--help"])
    assert r.returncode == 0
    assert "verify" in r.stdout and "grid" in r.stdout and "properties" in r.stdout
