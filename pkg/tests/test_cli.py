import csv
import io
import json
import subprocess
import sys

import pytest

from su3cg.cli import CSV_FIELDS, batch_table, run


def _run(capsys, *argv):
    rc = run(list(argv))
    out, err = capsys.readouterr()
    return rc, out, err


def test_full_cg(capsys):
    rc, out, _ = _run(capsys, "cg", "5", "1", "4", "0", "3", "4", "--state", "3", "6", "2", "4",
                      "--bra1", "2", "4", "1", "3", "--bra2", "1", "2", "1", "3")
    assert rc == 0 and out.strip() == "-(7/40)*sqrt(2)"


def test_decompose_count(capsys):
    rc, out, _ = _run(capsys, "decompose", "75", "60", "53", "0", "--count")
    assert rc == 0 and out.strip() == "1485"


def test_su2(capsys):
    assert _run(capsys, "su2", "6j", "0", "0", "0", "0", "0", "0")[1].strip() == "1"
    rc, out, _ = _run(capsys, "su2", "cg", "1/2", "1/2", "1/2", "-1/2", "0", "0")
    assert rc == 0 and out.strip() == "(1/2)*sqrt(2)"


def test_usage_and_domain_errors(capsys):
    assert _run(capsys, "su2", "cg", "1", "2")[0] == 2
    assert _run(capsys, "cg", "1", "0", "1", "0", "5", "5")[0] == 1
    with pytest.raises(SystemExit) as exc:
        run(["cg", "x"])
    assert exc.value.code == 2


def test_csv_and_json_agree(capsys):
    args = ["cg", "2", "1", "1", "1", "2", "1", "--rho", "2", "--all"]
    _, out_csv, _ = _run(capsys, *args, "--format", "csv")
    _, out_json, _ = _run(capsys, *args, "--format", "json")
    rows = list(csv.DictReader(io.StringIO(out_csv)))
    assert list(rows[0]) == CSV_FIELDS
    assert [dict((k, str(v)) for k, v in r.items()) for r in json.loads(out_json)] == rows
    # deterministic
    assert _run(capsys, *args, "--format", "csv")[1] == out_csv


def test_hw_json(capsys):
    rc, out, _ = _run(capsys, "hw", "1", "1", "2", "2", "2", "2", "--rho", "1", "--json")
    data = json.loads(out)
    assert rc == 0 and data["convention"] == "generator" and data["k"] == 1


def test_appb_and_weyl(capsys):
    assert _run(capsys, "appb", "--lambda", "3", "--sigma", "1")[0] == 0
    assert _run(capsys, "appb", "--lambda", "3", "--sigma", "1", "--state", "2", "1", "2")[0] == 0
    rc, out, _ = _run(capsys, "weyl-check", "5", "1", "4", "0", "3", "4", "--state", "3", "6", "2", "4",
                      "--bra1", "2", "4", "1", "3", "--bra2", "1", "2", "1", "3")
    assert rc == 0 and "direct    -(7/40)*sqrt(2)" in out


def test_rme(capsys):
    rc, out, _ = _run(capsys, "rme", "3", "2", "0", "2")
    assert rc == 0 and out.strip() == "sqrt(3)"


def test_oracle_check(capsys):
    rc, out, _ = _run(capsys, "oracle-check", "--max-dim", "10", "--max-label", "1")
    assert rc == 0 and out.strip().endswith("tables agree")


def test_batch_rows():
    rows = list(batch_table((6, 3), (4, 0), ks={1}, bra=(6, 6, 3, 1), tI=5))
    assert len(rows) == 4
    for row, dt in rows:
        assert set(row) == set(CSV_FIELDS) and dt >= 0
        assert row["value_exact"] and not row["value_decimal"].startswith("error")
    # a bra outside the target's reach is reported per row, not raised
    bad = list(batch_table((6, 3), (4, 0), ks={2}, bra=(5, 4, 3, 3), tI=3))
    assert all(r["value_decimal"].startswith("error") for r, _ in bad)


def test_bench_writes_timing_footer(capsys):
    rc, out, err = _run(capsys, "--threads", "1", "bench", "--left", "6", "3", "--right", "4", "0",
                        "--k", "2", "--bra", "5", "4", "3", "3", "--tI", "3", "--csv")
    assert rc == 0
    assert out.splitlines()[0] == ",".join(CSV_FIELDS)
    assert "# k=2:" in err


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "su3cg", "su2", "6j", "0", "0", "0", "0", "0", "0"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.strip() == "1"
