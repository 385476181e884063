"""Smoke tests for the python module and the command line tool.

Runs against the freshly built extension (PYTHONPATH points at the build
tree under ctest) or against an installed `quayside` package.
"""

import os
import pathlib
import subprocess

import pytest

try:
    import quayside as q
except ImportError:
    import _quayside as q  # build-tree layout


DATA = pathlib.Path(os.environ.get("QUAYSIDE_TEST_DATA", "tests/data"))
REF = DATA / "reference"


def test_container_id_validation():
    cid = q.validate_container_id("CSQU3054383")
    assert str(cid) == "CSQU3054383"
    assert cid.owner == "CSQ"
    assert cid.check_digit == 3
    assert q.check_digit("CSQU305438") == 3
    with pytest.raises(ValueError):
        q.validate_container_id("CSQU3054384")
    with pytest.raises(ValueError):
        q.validate_container_id("short")


def test_edifact_tokenize_and_serialize():
    text = "UNB+UNOA:2+A+B+240101:1200+1'UNH+1+X'UNT+2+1'UNZ+1+1'"
    doc = q.tokenize(text)
    assert doc.segment_count == 4
    assert doc.serialize() == text
    with pytest.raises(ValueError):
        q.tokenize("UNB+unterminated")


def test_rehandle_estimation():
    assert q.estimate_rehandles(["A", "B", "C"], ["C", "B", "A"]) == 0
    assert q.estimate_rehandles(["A", "B", "C"], ["A", "B", "C"]) == 2


def test_archive_tiers():
    assert q.tier_for_age_years(2) == q.ArchiveTier.Operational
    assert q.tier_for_age_years(3) == q.ArchiveTier.MidTerm
    assert q.tier_for_age_years(11) == q.ArchiveTier.LongTerm


def test_billing_helpers():
    day = 24 * 3600 * 1000
    assert q.billable_storage_days(0, 49 * 3600 * 1000, 1) == 2
    assert q.billable_storage_days(0, day, 0) == 1
    assert q.line_amount(3, 5000, 15) == 12750


def test_time_round_trip():
    t = q.parse_iso8601("2024-01-01T06:00:00Z")
    assert q.format_iso8601(t) == "2024-01-01T06:00:00Z"


def test_parse_baplie_fixture():
    entries = q.parse_baplie_file(str(REF / "v1_baplie.edi"))
    assert len(entries) == 100
    assert all(len(e["container"]) == 11 for e in entries)
    local = [e for e in entries if e["pod"] == "MAPTM"]
    assert len(local) == 85


def test_run_scenario_deterministic():
    def run():
        return q.run_scenario(
            str(REF / "scenario.qsc"),
            str(REF / "terminal.psv"),
            str(REF / "tariffs.psv"),
            str(REF / "master"),
        )

    first = run()
    second = run()
    assert first.keys() == second.keys()
    for name in first:
        assert first[name] == second[name], f"output differs: {name}"
    summary = dict(
        line.split("=", 1)
        for line in first["summary.txt"].decode().splitlines()
        if "=" in line
    )
    assert summary["discharged"] == "127"
    assert summary["audit_chain_ok"] == "1"


CLI = os.environ.get("QUAYSIDE_CLI", "")


@pytest.mark.skipif(not CLI, reason="QUAYSIDE_CLI not set")
class TestCli:
    def test_validate_edi(self):
        out = subprocess.run(
            [CLI, "validate-edi", str(REF / "v1_baplie.edi")],
            capture_output=True,
            text=True,
            check=True,
        )
        assert "message type: BAPLIE" in out.stdout
        assert "stow entries: 100" in out.stdout

    def test_run_report_archive(self, tmp_path):
        out_dir = tmp_path / "out"
        subprocess.run(
            [
                CLI, "run",
                "--scenario", str(REF / "scenario.qsc"),
                "--layout", str(REF / "terminal.psv"),
                "--tariffs", str(REF / "tariffs.psv"),
                "--master", str(REF / "master"),
                "--out", str(out_dir),
                "--snapshot-at", "2024-01-02T00:00:00Z",
            ],
            check=True,
            capture_output=True,
        )
        assert (out_dir / "kpi.txt").exists()
        assert (out_dir / "snapshot.qsnap").exists()

        # resume from the snapshot: outputs must be byte-identical
        resume_dir = tmp_path / "resumed"
        subprocess.run(
            [CLI, "run", "--resume", str(out_dir / "snapshot.qsnap"),
             "--out", str(resume_dir)],
            check=True,
            capture_output=True,
        )
        for f in out_dir.iterdir():
            if f.name == "snapshot.qsnap":
                continue
            assert (resume_dir / f.name).read_bytes() == f.read_bytes(), f.name

        # KPI report straight from the snapshot
        report = subprocess.run(
            [CLI, "report", "--snapshot", str(out_dir / "snapshot.qsnap"),
             "--period", "2024-01-01T00:00:00Z..2024-01-02T00:00:00Z"],
            capture_output=True,
            text=True,
            check=True,
        )
        assert "quay_moves=" in report.stdout

        # archive partitioning through the CLI
        records = tmp_path / "records.psv"
        records.write_text(
            "id:int|timestamp:time|category:str|payload:str\n"
            "1|2023-01-01T00:00:00Z|move|a\n"
            "2|2015-06-01T00:00:00Z|move|b\n"
            "3|2002-01-01T00:00:00Z|invoice|c\n"
        )
        archive_dir = tmp_path / "archive"
        out = subprocess.run(
            [CLI, "archive", "--records", str(records),
             "--cutoff-now", "2024-01-01T00:00:00Z", "--out", str(archive_dir)],
            capture_output=True,
            text=True,
            check=True,
        )
        assert "operational: 1, midterm: 1, longterm: 1" in out.stdout

    def test_gate_clerk_cannot_run(self):
        result = subprocess.run(
            [
                CLI, "run",
                "--scenario", str(REF / "scenario.qsc"),
                "--layout", str(REF / "terminal.psv"),
                "--tariffs", str(REF / "tariffs.psv"),
                "--master", str(REF / "master"),
                "--out", "/tmp/should_not_exist_qs",
                "--user", "gate",
            ],
            capture_output=True,
            text=True,
        )
        assert result.returncode == 1
        assert "not allowed" in result.stderr
