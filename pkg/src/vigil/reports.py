"""CSV output files.

Three schemas: validation traces (block_id, step, hypothesis_index,
posterior), per-episode metrics (policy, pi_up, pi_low, episode,
claim_delay, correct, false_alarms, truncated), and sweep grids (pi_up,
pi_low, mean_delay, mean_loss, n). Floats print with 9 significant
digits; files use plain newlines so byte-level reproducibility holds
across platforms.
"""

from __future__ import annotations

import csv
from pathlib import Path

from .harness import CellSummary, EpisodeMetrics


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return f"{value:.9g}"
    return str(value)


def _write_rows(path: str | Path, header: list[str], rows) -> None:
    with open(path, "w", newline="", encoding="ascii") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def write_validation_csv(path: str | Path, rows: list[tuple]) -> None:
    """rows are (block_id, step, hypothesis_index, posterior)."""
    _write_rows(path, ["block_id", "step", "hypothesis_index", "posterior"], rows)


def write_metrics_csv(path: str | Path, rows: list[EpisodeMetrics]) -> None:
    _write_rows(
        path,
        ["policy", "pi_up", "pi_low", "episode", "claim_delay", "correct", "false_alarms", "truncated"],
        (
            (r.policy, r.pi_up, r.pi_low, r.episode, r.claim_delay, r.correct, r.false_alarms, r.truncated)
            for r in rows
        ),
    )


def write_grid_csv(path: str | Path, summaries: list[CellSummary]) -> None:
    _write_rows(
        path,
        ["pi_up", "pi_low", "mean_delay", "mean_loss", "n"],
        ((s.pi_up, s.pi_low, s.mean_delay, s.mean_loss, s.n) for s in summaries),
    )
