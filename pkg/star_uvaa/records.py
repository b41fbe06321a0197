"""Metric tables and JSON-lines dumps written by the command-line runs."""

import json
from pathlib import Path
from typing import Any, Iterable, Union

import numpy as np
import pandas as pd

from .data_model import ChannelRealization, EpisodeRecord, StepOutcome

METRICS_HEADER = [
    "episode",
    "mean_rate_bps",
    "total_energy_j",
    "mean_reward",
    "boundary_violations",
    "collision_violations",
    "rate_floor_misses_k",
    "rate_floor_misses_j",
    "mean_speed",
]

SWEEP_HEADER = [
    "axis",
    "value",
    "seed",
    "status",
    "mean_rate_bps",
    "mean_total_energy_j",
    "mean_reward",
    "error",
]


class CsvTable:
    """Append-only CSV file with a fixed header; rows go out one at a time."""

    def __init__(self, path: Union[str, Path], header: list[str]):
        self.path = Path(path)
        self.header = header
        self.path.parent.mkdir(parents=True, exist_ok=True)
        pd.DataFrame(columns=header).to_csv(self.path, index=False, lineterminator="\n")

    def append(self, row: dict[str, Any]) -> None:
        frame = pd.DataFrame([row]).reindex(columns=self.header)
        frame.to_csv(
            self.path, mode="a", header=False, index=False, na_rep="", lineterminator="\n"
        )


class MetricsWriter(CsvTable):
    def __init__(self, path: Union[str, Path]):
        super().__init__(path, METRICS_HEADER)

    def write(self, record: EpisodeRecord) -> None:
        self.append(record.model_dump())


def write_table(path: Union[str, Path], rows: list[dict[str, Any]], header: list[str]) -> Path:
    """Write a finished table at once; missing cells stay empty."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame(rows).reindex(columns=header)
    frame.to_csv(path, index=False, na_rep="", lineterminator="\n")
    return path


def read_metrics(path: Union[str, Path]) -> list[dict[str, str]]:
    """Rows of a metrics or sweep table, every cell as written."""
    return pd.read_csv(path, dtype=str, keep_default_na=False).to_dict("records")


class JsonlWriter:
    def __init__(self, path: Union[str, Path]):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self.path.write_text("", encoding="utf-8")

    def write(self, record: dict) -> None:
        with open(self.path, "a", encoding="utf-8") as f:
            f.write(json.dumps(record) + "\n")


def trajectory_record(episode: int, slot: int, outcome: StepOutcome) -> dict:
    metrics = outcome.metrics
    return {
        "episode": episode,
        "slot": slot,
        "observation": outcome.observation.tolist(),
        "rewards": outcome.rewards,
        "rate_bps": metrics.rate_bps,
        "gain_k": metrics.gain_k,
        "gain_j": metrics.gain_j,
        "energies_j": metrics.energies_j,
        "out_of_bounds": metrics.flags.out_of_bounds,
        "collision_pairs": metrics.flags.n_collision_pairs,
    }


def channel_record(episode: int, slot: int, chan: ChannelRealization) -> dict:
    return {"episode": episode, "slot": slot, **chan.to_record()}


def write_json(path: Union[str, Path], document: Any) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(document, f, indent=2)
    return path


def summarize(records: Iterable[EpisodeRecord]) -> dict:
    """Mean and population standard deviation of every numeric column."""
    records = list(records)
    summary: dict[str, Any] = {"episodes": len(records)}
    if not records:
        return summary
    for column in METRICS_HEADER[1:]:
        values = np.array([float(getattr(r, column)) for r in records])
        summary[column] = {"mean": float(values.mean()), "std": float(values.std())}
    return summary
