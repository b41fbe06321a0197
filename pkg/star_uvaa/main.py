"""Command-line entry point: train, eval, sweep and oracle subcommands."""

import argparse
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
from loguru import logger

from . import __version__
from .agents import HmcdCoordinator
from .channel import draw_channel
from .checkpoint import load_checkpoint, read_checkpoint, save_checkpoint
from .config import config_hash, load_config, log_level, with_overrides
from .data_model import AnnealSchedule, EpisodeRecord, RunManifest, ScenarioConfig, StarRisState
from .errors import CheckpointError, ConfigError, NumericalError
from .records import (
    SWEEP_HEADER,
    JsonlWriter,
    MetricsWriter,
    channel_record,
    summarize,
    trajectory_record,
    write_json,
    write_table,
)
from .rng import RngStream
from .scenario import init_deployment
from .star_ris import MAX_ORACLE_ELEMENTS, atso_optimize, exhaustive_oracle, joint_metric, oracle_grid

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_CONFIG = 2
CONTROLLERS = ("hmcd", "masac", "sal", "random")
SWEEP_AXES = ("uav_count", "ris_elements")
ORACLE_NEAR = 0.99
ORACLE_FLOOR = 0.90
ORACLE_PASS_FRACTION = 0.80


def configure_logging(level: Optional[str] = None) -> None:
    logger.remove()
    logger.add(sys.stderr, level=level or log_level())


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


def _prepare(config_path: Optional[str], seed: Optional[int]) -> ScenarioConfig:
    cfg = load_config(config_path)
    if seed is not None:
        cfg = with_overrides(cfg, {"seed": seed})
    return cfg


def _write_manifest(
    out_dir: Path, command: str, cfg: ScenarioConfig, started_at: str, files: list[Path]
) -> None:
    manifest = RunManifest(
        command=command,
        seed=cfg.seed,
        config=cfg.model_dump(mode="json"),
        config_hash=config_hash(cfg),
        build=f"star_uvaa {__version__}",
        started_at=started_at,
        finished_at=_now(),
        out_dir=str(out_dir),
        files=sorted(str(f.relative_to(out_dir)) for f in files if f.exists()),
    )
    path = out_dir / "manifest.json"
    path.write_text(manifest.model_dump_json(indent=2), encoding="utf-8")
    logger.success(f"Manifest written to {path}")


def _report_failure(exc: Exception) -> int:
    if isinstance(exc, (ConfigError, CheckpointError)):
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print(f"run failed: {exc}", file=sys.stderr)
    return EXIT_RUNTIME


def _slot_sinks(out_dir: Path, dump_trajectories: bool, dump_channels: bool):
    writers = []
    if dump_trajectories:
        trajectories = JsonlWriter(out_dir / "trajectories.jsonl")
        writers.append(lambda e, s, outcome, chan: trajectories.write(trajectory_record(e, s, outcome)))
    if dump_channels:
        channels = JsonlWriter(out_dir / "channels.jsonl")
        writers.append(lambda e, s, outcome, chan: channels.write(channel_record(e, s, chan)))
    if not writers:
        return None, []

    def sink(episode, slot, outcome, chan):
        for write in writers:
            write(episode, slot, outcome, chan)

    paths = [out_dir / name for name, on in (("trajectories.jsonl", dump_trajectories), ("channels.jsonl", dump_channels)) if on]
    return sink, paths


def _train(
    cfg: ScenarioConfig,
    out_dir: Path,
    controller: str,
    episodes: Optional[int],
    dump_trajectories: bool = False,
    dump_channels: bool = False,
) -> tuple[HmcdCoordinator, list[EpisodeRecord], list[Path]]:
    out_dir.mkdir(parents=True, exist_ok=True)
    coordinator = HmcdCoordinator(cfg, variant=controller)
    metrics_path = out_dir / "metrics.csv"
    writer = MetricsWriter(metrics_path)
    files = [metrics_path]
    every = cfg.train.checkpoint_every
    learns = controller != "random"

    def on_episode(record: EpisodeRecord) -> None:
        writer.write(record)
        if learns and every > 0 and record.episode % every == 0:
            files.append(
                save_checkpoint(
                    out_dir / "checkpoints" / f"episode_{record.episode:05d}.json",
                    coordinator,
                    record.episode,
                )
            )

    sink, dump_paths = _slot_sinks(out_dir, dump_trajectories, dump_channels)
    records = coordinator.train(episodes, on_episode=on_episode, slot_sink=sink)
    files.extend(dump_paths)
    if learns:
        files.append(save_checkpoint(out_dir / "checkpoint.json", coordinator, coordinator.episodes_done))
    return coordinator, records, files


def run_train(
    config_path: Optional[str],
    seed: Optional[int],
    out_dir: str,
    episodes: Optional[int] = None,
    controller: str = "hmcd",
    dump_trajectories: bool = False,
    dump_channels: bool = False,
) -> int:
    """
    Train a controller and write metrics.csv, checkpoints and manifest.json.

    Returns:
        Process exit status
    """
    started = _now()
    out = Path(out_dir)
    try:
        cfg = _prepare(config_path, seed)
        logger.info(f"Training run: controller={controller}, seed={cfg.seed}, out={out}")
        _, records, files = _train(cfg, out, controller, episodes, dump_trajectories, dump_channels)
        summary_path = write_json(out / "summary.json", summarize(records))
        files.append(summary_path)
        _write_manifest(out, "train", cfg, started, files)
    except (ConfigError, CheckpointError, NumericalError, RuntimeError, ValueError) as exc:
        logger.error(f"Training failed: {exc}")
        return _report_failure(exc)
    logger.success(f"Training finished, metrics in {out / 'metrics.csv'}")
    return EXIT_OK


def run_eval(
    checkpoint: Optional[str],
    config_path: Optional[str],
    episodes: int,
    seed: Optional[int],
    out_dir: str,
    controller: str = "hmcd",
    deterministic: bool = False,
    dump_trajectories: bool = False,
    dump_channels: bool = False,
) -> int:
    """Frozen-policy rollouts summarized into summary.json (plus metrics.csv)."""
    started = _now()
    out = Path(out_dir)
    try:
        cfg = _prepare(config_path, seed)
        variant = controller
        if checkpoint is not None:
            variant = read_checkpoint(checkpoint, cfg).get("variant", controller)
        coordinator = HmcdCoordinator(cfg, variant=variant)
        if checkpoint is not None:
            load_checkpoint(checkpoint, coordinator)
        elif variant != "random":
            logger.warning("No checkpoint given, evaluating freshly initialized policies")

        out.mkdir(parents=True, exist_ok=True)
        metrics_path = out / "metrics.csv"
        writer = MetricsWriter(metrics_path)
        sink, dump_paths = _slot_sinks(out, dump_trajectories, dump_channels)
        records = coordinator.evaluate(episodes, deterministic=deterministic, slot_sink=sink)
        for record in records:
            writer.write(record)
        summary = summarize(records)
        summary["variant"] = variant
        summary_path = write_json(out / "summary.json", summary)
        _write_manifest(out, "eval", cfg, started, [metrics_path, summary_path, *dump_paths])
    except (ConfigError, CheckpointError, NumericalError, RuntimeError, ValueError) as exc:
        logger.error(f"Evaluation failed: {exc}")
        return _report_failure(exc)
    logger.success(f"Evaluation summary written to {out / 'summary.json'}")
    return EXIT_OK


def element_grid(n_elements: int) -> tuple[int, int]:
    """rows x cols with rows the largest divisor not above sqrt(n)."""
    if n_elements < 1:
        raise ConfigError(f"ris_elements: element count must be positive, got {n_elements}")
    rows = max(d for d in range(1, int(math.isqrt(n_elements)) + 1) if n_elements % d == 0)
    return rows, n_elements // rows


def sweep_overrides(axis: str, value: int) -> dict:
    if axis == "uav_count":
        return {"region.n_uavs": value}
    if axis == "ris_elements":
        rows, cols = element_grid(value)
        return {"ris.rows": rows, "ris.cols": cols, "ris.n_elements": None}
    raise ConfigError(f"axis: unknown sweep axis {axis!r} (choose from {', '.join(SWEEP_AXES)})")


def _sweep_point(
    job: tuple[ScenarioConfig, str, int, int, str, Optional[int], int, Path]
) -> dict:
    """Train and evaluate one sweep value; failures become a row instead of an exception."""
    base, axis, index, value, controller, episodes, eval_episodes, out_dir = job
    seed = base.seed + index
    row = {"axis": axis, "value": value, "seed": seed, "status": "ok", "error": ""}
    try:
        cfg = with_overrides(base, {**sweep_overrides(axis, value), "seed": seed})
        point_dir = out_dir / f"{axis}_{value}"
        coordinator, _, _ = _train(cfg, point_dir, controller, episodes)
        records = coordinator.evaluate(eval_episodes, deterministic=False)
        evaluation = MetricsWriter(point_dir / "eval_metrics.csv")
        for record in records:
            evaluation.write(record)
        row["mean_rate_bps"] = float(np.mean([r.mean_rate_bps for r in records]))
        row["mean_total_energy_j"] = float(np.mean([r.total_energy_j for r in records]))
        row["mean_reward"] = float(np.mean([r.mean_reward for r in records]))
    except (ConfigError, NumericalError, RuntimeError, ValueError) as exc:
        logger.warning(f"Sweep point {axis}={value} failed: {exc}")
        row["status"] = "failed"
        row["error"] = str(exc)
    return row


def run_sweep(
    axis: str,
    values: Sequence[int],
    config_path: Optional[str],
    seed: Optional[int],
    out_dir: str,
    controller: str = "hmcd",
    episodes: Optional[int] = None,
    eval_episodes: int = 10,
    workers: int = 1,
) -> int:
    """One train+eval per value with seed = base seed + value index; writes sweep.csv."""
    started = _now()
    out = Path(out_dir)
    try:
        if not values:
            raise ConfigError("values: sweep needs at least one value")
        if axis not in SWEEP_AXES:
            raise ConfigError(f"axis: unknown sweep axis {axis!r}")
        cfg = _prepare(config_path, seed)
        out.mkdir(parents=True, exist_ok=True)
        jobs = [
            (cfg, axis, i, int(v), controller, episodes, eval_episodes, out)
            for i, v in enumerate(values)
        ]
        logger.info(f"Sweeping {axis} over {list(values)} with {workers} worker(s)")
        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                rows = list(pool.map(_sweep_point, jobs))
        else:
            rows = [_sweep_point(job) for job in jobs]

        table_path = write_table(out / "sweep.csv", rows, SWEEP_HEADER)
        files = [table_path] + [
            p for p in out.glob(f"{axis}_*/*") if p.is_file()
        ] + [p for p in out.glob(f"{axis}_*/checkpoints/*.json")]
        _write_manifest(out, "sweep", cfg, started, files)
    except (ConfigError, NumericalError, RuntimeError, ValueError) as exc:
        logger.error(f"Sweep failed: {exc}")
        return _report_failure(exc)
    failed = sum(row["status"] != "ok" for row in rows)
    if failed:
        logger.warning(f"{failed} of {len(rows)} sweep points failed")
    logger.success(f"Sweep table written to {table_path}")
    return EXIT_OK


def oracle_ratio(oracle_metric: float, atso_metric: float) -> float:
    if oracle_metric <= 0.0:
        return 1.0
    return atso_metric / oracle_metric


def oracle_trials(cfg: ScenarioConfig, trials: int) -> list[dict]:
    """Greedy annealing against exhaustive search on channels drawn from the simulator."""
    if cfg.n_elements > MAX_ORACLE_ELEMENTS:
        raise ConfigError(
            f"ris: oracle instances need at most {MAX_ORACLE_ELEMENTS} elements, "
            f"got {cfg.n_elements}"
        )
    grid = oracle_grid(cfg.sa.n_amp, cfg.sa.n_phase)
    greedy = AnnealSchedule(t_init=cfg.sa.t_min, cooling=cfg.sa.cooling, t_min=cfg.sa.t_min)
    rows = []
    for trial in range(trials):
        rng = RngStream(cfg.seed + trial)
        swarm, users = init_deployment(cfg, rng)
        chan = draw_channel(swarm, users, cfg, rng)
        _, best = exhaustive_oracle(chan, grid)
        state = atso_optimize(chan, StarRisState.initial(cfg.n_elements), greedy, cfg.sa, rng, grid=grid)
        achieved = joint_metric(chan, state)
        rows.append(
            {
                "trial": trial,
                "instance": {"seed": cfg.seed + trial, **chan.to_record()},
                "oracle_metric": best,
                "atso_metric": achieved,
                "ratio": oracle_ratio(best, achieved),
            }
        )
    return rows


def run_oracle(
    config_path: Optional[str],
    trials: int,
    seed: Optional[int],
    out_dir: str,
    elements: int = 2,
) -> int:
    """Compare greedy annealing with exhaustive search; writes oracle.json."""
    started = _now()
    out = Path(out_dir)
    try:
        cfg = _prepare(config_path, seed)
        if elements > MAX_ORACLE_ELEMENTS:
            raise ConfigError(
                f"ris: oracle instances need at most {MAX_ORACLE_ELEMENTS} elements, got {elements}"
            )
        cfg = with_overrides(cfg, {"ris.rows": 1, "ris.cols": elements, "ris.n_elements": None})
        rows = oracle_trials(cfg, trials)
        ratios = np.array([row["ratio"] for row in rows]) if rows else np.array([])
        near = float(np.mean(ratios >= ORACLE_NEAR)) if rows else 0.0
        report = {
            "n_trials": len(rows),
            "n_elements": cfg.n_elements,
            "fraction_within_1pct": near,
            "min_ratio": float(ratios.min()) if rows else None,
            "pass": bool(rows) and near >= ORACLE_PASS_FRACTION and bool(np.all(ratios >= ORACLE_FLOOR)),
            "trials": rows,
        }
        out.mkdir(parents=True, exist_ok=True)
        report_path = write_json(out / "oracle.json", report)
        _write_manifest(out, "oracle", cfg, started, [report_path])
    except (ConfigError, NumericalError, RuntimeError, ValueError) as exc:
        logger.error(f"Oracle run failed: {exc}")
        return _report_failure(exc)
    logger.success(f"Oracle report written to {report_path} (pass={report['pass']})")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="star_uvaa",
        description="STAR-RIS assisted UAV virtual antenna array simulator",
    )
    parser.add_argument("--log-level", default=None, help="loguru level (default: STAR_UVAA_LOG_LEVEL or INFO)")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", default=None, help="TOML configuration file")
        p.add_argument("--seed", type=int, default=None, help="override the configured seed")
        p.add_argument("--out", required=True, help="output directory")

    def dumps(p: argparse.ArgumentParser) -> None:
        p.add_argument("--dump-trajectories", action="store_true", help="write trajectories.jsonl")
        p.add_argument("--dump-channels", action="store_true", help="write channels.jsonl")

    train = sub.add_parser("train", help="train a controller")
    common(train)
    dumps(train)
    train.add_argument("--episodes", type=int, default=None)
    train.add_argument("--controller", choices=CONTROLLERS, default="hmcd")

    evaluate = sub.add_parser("eval", help="evaluate a checkpoint")
    common(evaluate)
    dumps(evaluate)
    evaluate.add_argument("--checkpoint", default=None)
    evaluate.add_argument("--episodes", type=int, default=10)
    evaluate.add_argument("--controller", choices=CONTROLLERS, default="hmcd")
    evaluate.add_argument("--deterministic", action="store_true", help="act with the policy mean")

    sweep = sub.add_parser("sweep", help="train and evaluate over a parameter axis")
    common(sweep)
    sweep.add_argument("--axis", choices=SWEEP_AXES, required=True)
    sweep.add_argument("--values", type=int, nargs="+", required=True)
    sweep.add_argument("--episodes", type=int, default=None)
    sweep.add_argument("--eval-episodes", type=int, default=10)
    sweep.add_argument("--controller", choices=CONTROLLERS, default="hmcd")
    sweep.add_argument("--workers", type=int, default=1)

    oracle = sub.add_parser("oracle", help="check annealing against exhaustive search")
    common(oracle)
    oracle.add_argument("--trials", type=int, default=100)
    oracle.add_argument("--elements", type=int, default=2)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level)

    if args.command == "train":
        return run_train(
            args.config, args.seed, args.out, args.episodes, args.controller,
            args.dump_trajectories, args.dump_channels,
        )
    if args.command == "eval":
        return run_eval(
            args.checkpoint, args.config, args.episodes, args.seed, args.out,
            args.controller, args.deterministic, args.dump_trajectories, args.dump_channels,
        )
    if args.command == "sweep":
        return run_sweep(
            args.axis, args.values, args.config, args.seed, args.out,
            args.controller, args.episodes, args.eval_episodes, args.workers,
        )
    return run_oracle(args.config, args.trials, args.seed, args.out, args.elements)


if __name__ == "__main__":
    sys.exit(main())
