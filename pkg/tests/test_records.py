import json

import pytest

from star_uvaa.data_model import EpisodeRecord
from star_uvaa.records import (
    METRICS_HEADER,
    CsvTable,
    JsonlWriter,
    MetricsWriter,
    read_metrics,
    summarize,
    write_json,
    write_table,
)


def _record(episode: int, rate: float) -> EpisodeRecord:
    return EpisodeRecord(
        episode=episode,
        mean_rate_bps=rate,
        total_energy_j=500.0,
        mean_reward=-0.25,
        boundary_violations=1,
        collision_violations=0,
        rate_floor_misses_k=0,
        rate_floor_misses_j=2,
        mean_speed=4.5,
    )


# ============================================================================
# Test tables
# ============================================================================


class TestTables:
    """Tests for CSV and JSON-lines writers."""

    def test_full_precision_floats(self, tmp_path):
        """Test that floats are written with round-trip precision."""
        table = CsvTable(tmp_path / "t.csv", ["a", "b", "c"])
        table.append({"a": 1 / 3, "b": 1e6 / 7, "c": 3})

        row = read_metrics(tmp_path / "t.csv")[0]
        assert row["a"] == "0.3333333333333333"
        assert float(row["b"]) == 1e6 / 7
        assert row["c"] == "3"

    def test_text_with_commas_round_trips(self, tmp_path):
        """Test that an error message survives quoting."""
        table = CsvTable(tmp_path / "t.csv", ["status", "error"])
        table.append({"status": "failed", "error": "region.d_min: too large, 2 UAVs"})

        assert read_metrics(tmp_path / "t.csv") == [
            {"status": "failed", "error": "region.d_min: too large, 2 UAVs"}
        ]

    def test_metrics_header_and_rows(self, tmp_path):
        """Test the fixed column order and one row per episode."""
        path = tmp_path / "metrics.csv"
        writer = MetricsWriter(path)
        writer.write(_record(1, 1.5e6))
        writer.write(_record(2, 2.5e6))

        lines = path.read_text().splitlines()
        assert lines[0] == ",".join(METRICS_HEADER)
        rows = read_metrics(path)
        assert [row["episode"] for row in rows] == ["1", "2"]
        assert float(rows[1]["mean_rate_bps"]) == 2.5e6

    def test_missing_columns_left_empty(self, tmp_path):
        """Test that a row without some columns still fits the header."""
        table = CsvTable(tmp_path / "t.csv", ["a", "b"])
        table.append({"a": 1})
        assert (tmp_path / "t.csv").read_text().splitlines() == ["a,b", "1,"]

    def test_write_table(self, tmp_path):
        """Test a whole table written at once, with a failed row missing its metrics."""
        rows = [
            {"axis": "uav_count", "value": 1, "status": "ok", "mean_reward": 0.5, "error": ""},
            {"axis": "uav_count", "value": 3, "status": "failed", "error": "region.d_min"},
        ]

        path = write_table(tmp_path / "sweep" / "sweep.csv", rows, ["value", "status", "mean_reward", "error"])

        assert path.read_text().splitlines() == [
            "value,status,mean_reward,error",
            "1,ok,0.5,",
            "3,failed,,region.d_min",
        ]

    def test_jsonl(self, tmp_path):
        """Test one JSON document per line."""
        writer = JsonlWriter(tmp_path / "out.jsonl")
        writer.write({"slot": 0})
        writer.write({"slot": 1})

        lines = (tmp_path / "out.jsonl").read_text().splitlines()
        assert [json.loads(line)["slot"] for line in lines] == [0, 1]

    def test_write_json_creates_parents(self, tmp_path):
        """Test nested output paths."""
        path = write_json(tmp_path / "a" / "b.json", {"x": 1})
        assert json.loads(path.read_text()) == {"x": 1}


# ============================================================================
# Test summarize
# ============================================================================


class TestSummarize:
    """Tests for the evaluation summary."""

    def test_mean_and_std(self):
        """Test per-column statistics."""
        summary = summarize([_record(1, 1e6), _record(2, 3e6)])

        assert summary["episodes"] == 2
        assert summary["mean_rate_bps"]["mean"] == pytest.approx(2e6)
        assert summary["mean_rate_bps"]["std"] == pytest.approx(1e6)
        assert summary["rate_floor_misses_j"]["mean"] == 2.0

    def test_empty(self):
        """Test that no episodes give only the count."""
        assert summarize([]) == {"episodes": 0}
