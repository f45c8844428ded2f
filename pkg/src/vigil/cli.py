"""Command-line entry point.

Subcommands map one-to-one onto the harness operations:

    vigil train    --config run.toml [--seed N] [--out-dir D] [--episodes N]
    vigil test     --checkpoint CKPT [--config run.toml] [--seed N] ...
    vigil sweep    --checkpoint CKPT ...
    vigil compare  --checkpoint CKPT ...
    vigil validate-checkpoint --checkpoint CKPT

Every data-producing run writes the fully resolved config next to its
outputs. Exit codes: 0 on success, 2 for configuration problems, 1 for
runtime failures.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

from . import harness, reports
from .checkpoint import Checkpoint, CheckpointError
from .config import ConfigError, RunConfig, config_from_dict, parse_config, render_config

log = logging.getLogger("vigil")

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_CONFIG = 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vigil",
        description="Active anomaly detection: train, test, and benchmark sensor-selection policies.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser, checkpoint_required: bool):
        p.add_argument("--config", help="TOML run config; defaults apply for missing keys")
        p.add_argument("--seed", type=int, help="override the config seed")
        p.add_argument("--out-dir", help="output directory (default: config out_dir)")
        p.add_argument("--episodes", type=int, help="override the episode count")
        p.add_argument("--quiet", action="store_true", help="suppress progress logging")
        if checkpoint_required is not None:
            p.add_argument(
                "--checkpoint", required=checkpoint_required, help="checkpoint file path"
            )

    add_common(sub.add_parser("train", help="train the actor-critic agent"), False)
    add_common(sub.add_parser("test", help="run detection episodes over the threshold grid"), True)
    add_common(sub.add_parser("sweep", help="aggregate delay/loss over the threshold grid"), True)
    add_common(
        sub.add_parser("compare", help="paired agent vs Chernoff benchmark at fixed pi_low"), True
    )
    vc = sub.add_parser("validate-checkpoint", help="verify a checkpoint round-trips")
    vc.add_argument("--checkpoint", required=True, help="checkpoint file path")
    vc.add_argument("--quiet", action="store_true", help="suppress progress logging")
    return parser


def _resolve_config(args, checkpoint: Checkpoint | None) -> RunConfig:
    """Config precedence: --config file, else checkpoint snapshot, else defaults."""
    if args.config is not None:
        config = parse_config(args.config)
    elif checkpoint is not None:
        config = config_from_dict(checkpoint.config)
    else:
        config = RunConfig()
    if getattr(args, "seed", None) is not None:
        config = replace(config, seed=args.seed)
    if getattr(args, "out_dir", None) is not None:
        config = replace(config, out_dir=args.out_dir)
    if checkpoint is not None and args.config is not None:
        snapshot = config_from_dict(checkpoint.config)
        if snapshot.environment != config.environment:
            raise ConfigError(
                "config environment does not match the checkpoint's; "
                "test runs must keep the trained environment"
            )
    return config


def _prepare_out_dir(config: RunConfig) -> Path:
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "resolved_config.toml").write_text(render_config(config), encoding="utf-8")
    return out


def _cmd_train(args) -> int:
    config = _resolve_config(args, None)
    training = config.training
    if args.episodes is not None:
        training = replace(training, max_episodes=args.episodes)
        config = replace(config, training=training)
    out = _prepare_out_dir(config)
    result = harness.train(
        config.environment, config.learning, training, config.seed, quiet=args.quiet
    )
    ckpt = Checkpoint(
        config=config.to_dict(),
        episodes_trained=result.episodes_trained,
        actor=result.actor,
        critic=result.critic,
        store=result.store,
        rng_state=result.rng_state,
    )
    ckpt.save(out / "checkpoint.json")
    reports.write_validation_csv(out / "validation.csv", result.validation_rows)
    log.info("trained %d episodes; outputs in %s", result.episodes_trained, out)
    return EXIT_OK


def _cmd_test(args) -> int:
    ckpt = Checkpoint.load(args.checkpoint)
    config = _resolve_config(args, ckpt)
    out = _prepare_out_dir(config)
    rows = harness.test(
        ckpt, config.testing, config.seed, episodes=args.episodes, jobs=config.jobs
    )
    reports.write_metrics_csv(out / "metrics.csv", rows)
    log.info("wrote %d episode rows to %s", len(rows), out / "metrics.csv")
    return EXIT_OK


def _cmd_sweep(args) -> int:
    ckpt = Checkpoint.load(args.checkpoint)
    config = _resolve_config(args, ckpt)
    out = _prepare_out_dir(config)
    summaries, _ = harness.sweep(
        ckpt, config.testing, config.seed, episodes=args.episodes, jobs=config.jobs
    )
    reports.write_grid_csv(out / "grid.csv", summaries)
    log.info("wrote %d grid cells to %s", len(summaries), out / "grid.csv")
    return EXIT_OK


def _cmd_compare(args) -> int:
    ckpt = Checkpoint.load(args.checkpoint)
    config = _resolve_config(args, ckpt)
    out = _prepare_out_dir(config)
    rows = harness.compare(
        ckpt,
        config.chernoff,
        config.testing,
        config.seed,
        episodes=args.episodes,
        jobs=config.jobs,
    )
    reports.write_metrics_csv(out / "metrics.csv", rows)
    log.info("wrote %d paired rows to %s", len(rows), out / "metrics.csv")
    return EXIT_OK


def _cmd_validate_checkpoint(args) -> int:
    ckpt = Checkpoint.load(args.checkpoint)
    original = Path(args.checkpoint).read_bytes()
    if ckpt.to_bytes() != original:
        raise CheckpointError("checkpoint does not round-trip byte-identically")
    print(f"checkpoint: {args.checkpoint}")
    print(f"format version: 1, episodes trained: {ckpt.episodes_trained}")
    print(f"actor parameters: {ckpt.actor.parameter_count():,}")
    print(f"critic parameters: {ckpt.critic.parameter_count():,}")
    print(f"stored samples: {ckpt.store.total_samples:,}")
    print("round-trip: byte-identical")
    return EXIT_OK


_COMMANDS = {
    "train": _cmd_train,
    "test": _cmd_test,
    "sweep": _cmd_sweep,
    "compare": _cmd_compare,
    "validate-checkpoint": _cmd_validate_checkpoint,
}


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING if args.quiet else logging.INFO, format="%(message)s"
    )
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (CheckpointError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
