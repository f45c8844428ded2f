"""Training, validation, threshold sweeps, and baseline comparison.

Everything here is deterministic given (config, seed): each episode,
validation block, and sweep cell derives its own RNG from the run seed
and a stable component path, so results never depend on execution order
and sweep cells can run in parallel workers.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from joblib import Parallel, delayed

from . import belief as bel
from . import nets
from .agent import LearningConfig, run_training_episode, select_action
from .chernoff import ChernoffConfig, chernoff_policy
from .detection import DetectionRecord, Policy, run_detection_episode
from .environment import (
    DetectionEnvironment,
    ProcessSet,
    TrueState,
    draw_hypothesis,
    observe,
)
from .seeding import derive_rng

log = logging.getLogger("vigil")

VALIDATION_HIGH = 0.9  # posterior level a validation segment is expected to reach

SWEEP_PI_UP = (0.5, 0.55, 0.6, 0.65, 0.7, 0.75, 0.8, 0.85, 0.9, 0.95, 0.99)
SWEEP_PI_LOW = (0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5, 0.55, 0.6)


@dataclass(frozen=True)
class TrainConfig:
    max_episodes: int = 15000
    validation_interval: int = 1000  # episodes between validation blocks; 0 disables
    validation_hold: int = 200  # steps each validation hypothesis stays true
    validation_set_size: int = 3
    pi_up: float = 0.8

    def __post_init__(self):
        if self.max_episodes < 1:
            raise ValueError("max_episodes must be positive")
        if self.validation_interval < 0:
            raise ValueError("validation_interval cannot be negative")
        if self.validation_hold < 1 or self.validation_set_size < 1:
            raise ValueError("validation_hold and validation_set_size must be positive")
        if not 0.5 < self.pi_up < 1.0:
            raise ValueError("training pi_up must lie in (0.5, 1)")


@dataclass(frozen=True)
class TestConfig:
    warmup_steps: int = 100
    max_sampling_time: int = 2000
    pi_up_grid: tuple[float, ...] = SWEEP_PI_UP
    pi_low_grid: tuple[float, ...] = SWEEP_PI_LOW
    episodes_per_cell: int = 200
    compare_pi_low: float = 0.6

    def __post_init__(self):
        if self.warmup_steps < 0:
            raise ValueError("warmup_steps cannot be negative")
        if self.max_sampling_time < 1:
            raise ValueError("max_sampling_time must be positive")
        if self.episodes_per_cell < 1:
            raise ValueError("episodes_per_cell must be positive")
        for name, grid in (("pi_up_grid", self.pi_up_grid), ("pi_low_grid", self.pi_low_grid)):
            if not grid:
                raise ValueError(f"{name} cannot be empty")
            if any(not 0.0 < v < 1.0 for v in grid):
                raise ValueError(f"every {name} value must lie strictly inside (0, 1)")
        if not 0.0 < self.compare_pi_low < 1.0:
            raise ValueError("compare_pi_low must lie strictly inside (0, 1)")
        if not self.valid_cells():
            raise ValueError("the threshold grids admit no pair with pi_low < pi_up")

    def valid_cells(self) -> list[tuple[float, float]]:
        """(pi_up, pi_low) pairs with pi_low strictly below pi_up, row-major in pi_up."""
        return [(u, l) for u in self.pi_up_grid for l in self.pi_low_grid if l < u]


@dataclass(frozen=True)
class ValidationSegment:
    """One held-true hypothesis inside a validation block."""

    block: int
    position: int
    hypothesis: int
    steps_to_high: int | None  # first in-segment step with posterior > VALIDATION_HIGH


@dataclass
class TrainResult:
    actor: nets.DenseNet
    critic: nets.DenseNet
    store: bel.SampleStore
    estimates: bel.EstimatedDistributions
    episodes_trained: int
    rng_state: dict
    validation_rows: list[tuple] = field(default_factory=list)
    validation_segments: list[ValidationSegment] = field(default_factory=list)
    episode_lengths: list[int] = field(default_factory=list)


@dataclass(frozen=True)
class EpisodeMetrics:
    """One metrics.csv row."""

    policy: str
    pi_up: float
    pi_low: float
    episode: int
    claim_delay: int | None
    correct: bool | None
    false_alarms: int
    truncated: bool

    @classmethod
    def from_record(
        cls, record: DetectionRecord, policy: str, pi_up: float, pi_low: float, episode: int
    ) -> "EpisodeMetrics":
        return cls(
            policy=policy,
            pi_up=pi_up,
            pi_low=pi_low,
            episode=episode,
            claim_delay=record.claim_delay,
            correct=record.correct,
            false_alarms=1 if record.false_alarm else 0,
            truncated=record.no_claim,
        )


@dataclass(frozen=True)
class CellSummary:
    """One grid.csv row: means over the cell's claiming episodes."""

    pi_up: float
    pi_low: float
    mean_delay: float | None
    mean_loss: float | None
    n: int


def actor_eval_policy(actor: nets.DenseNet) -> Policy:
    """Greedy policy of a trained actor; ignores estimates and rng."""

    def policy(belief_vec, estimates, rng):
        return select_action(actor, belief_vec, "eval")

    return policy


def uniform_random_policy() -> Policy:
    """Baseline that picks a sensor uniformly at random."""

    def policy(belief_vec, estimates, rng):
        return int(rng.integers(estimates.p_one.shape[0]))

    return policy


def run_validation_block(
    env: DetectionEnvironment,
    estimates: bel.EstimatedDistributions,
    actor: nets.DenseNet,
    block_id: int,
    hold: int,
    set_size: int,
    rng: np.random.Generator,
) -> tuple[list[tuple], list[ValidationSegment]]:
    """Probe the frozen policy on a random sequence of held-true hypotheses.

    set_size hypotheses are drawn without replacement and made true one
    after another for ``hold`` steps each. The belief starts at the prior
    and carries across the switches; the posterior of every chosen
    hypothesis is recorded at every step. Networks and sample pools are
    read-only here.
    """
    chosen = [int(m) for m in rng.choice(len(env.space), size=set_size, replace=False)]
    belief_vec = env.prior.copy()
    rows: list[tuple] = []
    segments: list[ValidationSegment] = []
    step = 0
    for position, m in enumerate(chosen):
        truth = TrueState(current=env.space[m], change_time=step)
        first_high: int | None = None
        for s in range(1, hold + 1):
            step += 1
            action = select_action(actor, belief_vec, "eval")
            sample = observe(truth, action, env.processes, rng, time=step)
            belief_vec = bel.update_posterior(belief_vec, sample, estimates)
            for probe in chosen:
                rows.append((block_id, step, probe, belief_vec[probe]))
            if first_high is None and belief_vec[m] > VALIDATION_HIGH:
                first_high = s
        segments.append(
            ValidationSegment(block=block_id, position=position, hypothesis=m, steps_to_high=first_high)
        )
    return rows, segments


def train(
    processes: ProcessSet,
    learning: LearningConfig,
    training: TrainConfig,
    seed: int,
    quiet: bool = False,
) -> TrainResult:
    """Run the full training loop with periodic frozen-policy validation.

    Per episode: draw a truth from the prior, interact and learn until
    acceptance, reveal the truth and refit the sensor estimates, then
    decay both learning rates. Every validation_interval episodes the
    current policy is probed on a validation block without touching any
    parameters.
    """
    env = DetectionEnvironment.from_processes(processes)
    init_rng = derive_rng(seed, "init")
    actor = nets.build_actor(
        len(env.space), processes.count, init_rng, learning.actor_lr, learning.lr_decay
    )
    critic = nets.build_critic(len(env.space), init_rng, learning.critic_lr, learning.lr_decay)
    store = bel.SampleStore(processes.count, len(env.space))
    estimates = bel.EstimatedDistributions.from_store(store)
    train_rng = derive_rng(seed, "train")

    result = TrainResult(
        actor=actor,
        critic=critic,
        store=store,
        estimates=estimates,
        episodes_trained=0,
        rng_state={},
    )
    for episode in range(1, training.max_episodes + 1):
        truth_index = draw_hypothesis(env.prior, train_rng)
        truth = TrueState(current=env.space[truth_index], change_time=0)
        record, estimates = run_training_episode(
            env, truth, store, estimates, actor, critic, learning, training.pi_up, train_rng
        )
        result.episode_lengths.append(record.length)
        nets.decay_learning_rates(actor, critic)
        if training.validation_interval and episode % training.validation_interval == 0:
            block_id = episode // training.validation_interval
            block_rng = derive_rng(seed, "validation", str(block_id))
            rows, segments = run_validation_block(
                env,
                estimates,
                actor,
                block_id,
                training.validation_hold,
                training.validation_set_size,
                block_rng,
            )
            result.validation_rows.extend(rows)
            result.validation_segments.extend(segments)
            if not quiet:
                recent = result.episode_lengths[-training.validation_interval :]
                log.info(
                    "episode %d/%d: mean length %.1f, actor lr %.3g",
                    episode,
                    training.max_episodes,
                    float(np.mean(recent)),
                    actor.learning_rate,
                )
    result.estimates = estimates
    result.episodes_trained = training.max_episodes
    result.rng_state = train_rng.bit_generator.state
    return result


def _cell_tag(pi_up: float, pi_low: float) -> str:
    return f"up={pi_up:.6g},low={pi_low:.6g}"


def run_cell(
    env: DetectionEnvironment,
    base_store: bel.SampleStore,
    policy: Policy,
    policy_name: str,
    pi_up: float,
    pi_low: float,
    testing: TestConfig,
    episodes: int,
    seed: int,
) -> list[EpisodeMetrics]:
    """Run one threshold cell: ``episodes`` detection episodes under one policy.

    The cell owns a private copy of the sample pools; estimates refit
    after every episode exactly as in a live deployment. Truth draws are
    keyed only by (seed, cell, episode) so that different policies on the
    same cell face identical truth sequences.
    """
    thresholds = bel.Thresholds(pi_up=pi_up, pi_low=pi_low)
    store = base_store.copy()
    estimates = bel.EstimatedDistributions.from_store(store)
    tag = _cell_tag(pi_up, pi_low)
    out: list[EpisodeMetrics] = []
    for episode in range(1, episodes + 1):
        truth_rng = derive_rng(seed, "cell-truth", tag, str(episode))
        new_truth = draw_hypothesis(env.prior, truth_rng)
        obs_rng = derive_rng(seed, "cell-obs", tag, policy_name, str(episode))
        record = run_detection_episode(
            env,
            estimates,
            policy,
            thresholds,
            testing.warmup_steps,
            testing.max_sampling_time,
            new_truth,
            obs_rng,
        )
        store.extend(record.warmup_samples, 0)
        store.extend(record.postchange_samples, new_truth)
        estimates = bel.EstimatedDistributions.from_store(store)
        out.append(EpisodeMetrics.from_record(record, policy_name, pi_up, pi_low, episode))
    return out


def summarize_cell(rows: list[EpisodeMetrics]) -> CellSummary:
    """Aggregate a cell's episodes into the grid row (claiming episodes only)."""
    claims = [r for r in rows if r.claim_delay is not None]
    n = len(claims)
    if n == 0:
        return CellSummary(rows[0].pi_up, rows[0].pi_low, None, None, 0)
    mean_delay = float(np.mean([r.claim_delay for r in claims]))
    mean_loss = float(np.mean([0.0 if r.correct else 1.0 for r in claims]))
    return CellSummary(rows[0].pi_up, rows[0].pi_low, mean_delay, mean_loss, n)


def _agent_cell(checkpoint, pi_up, pi_low, testing, episodes, seed) -> list[EpisodeMetrics]:
    env = DetectionEnvironment.from_processes(checkpoint.processes)
    policy = actor_eval_policy(checkpoint.actor)
    return run_cell(
        env, checkpoint.store, policy, "agent", pi_up, pi_low, testing, episodes, seed
    )


def test(
    checkpoint,
    testing: TestConfig,
    seed: int,
    episodes: int | None = None,
    jobs: int = 1,
) -> list[EpisodeMetrics]:
    """Detection episodes for the trained agent on every valid grid cell."""
    episodes = episodes or testing.episodes_per_cell
    cells = testing.valid_cells()
    results = _map_cells(
        [(checkpoint, u, l, testing, episodes, seed) for (u, l) in cells], _agent_cell, jobs
    )
    return [row for cell_rows in results for row in cell_rows]


def sweep(
    checkpoint,
    testing: TestConfig,
    seed: int,
    episodes: int | None = None,
    jobs: int = 1,
) -> tuple[list[CellSummary], list[EpisodeMetrics]]:
    """Aggregate agent metrics over the full (pi_up, pi_low) grid."""
    episodes = episodes or testing.episodes_per_cell
    cells = testing.valid_cells()
    results = _map_cells(
        [(checkpoint, u, l, testing, episodes, seed) for (u, l) in cells], _agent_cell, jobs
    )
    summaries = [summarize_cell(rows) for rows in results]
    return summaries, [row for cell_rows in results for row in cell_rows]


def _compare_cell(checkpoint, chern_cfg, pi_up, pi_low, testing, episodes, seed):
    env = DetectionEnvironment.from_processes(checkpoint.processes)
    agent_rows = run_cell(
        env,
        checkpoint.store,
        actor_eval_policy(checkpoint.actor),
        "agent",
        pi_up,
        pi_low,
        testing,
        episodes,
        seed,
    )
    chern_rows = run_cell(
        env,
        checkpoint.store,
        chernoff_policy(chern_cfg),
        "chernoff",
        pi_up,
        pi_low,
        testing,
        episodes,
        seed,
    )
    return agent_rows + chern_rows


def compare(
    checkpoint,
    chern_cfg: ChernoffConfig,
    testing: TestConfig,
    seed: int,
    episodes: int | None = None,
    jobs: int = 1,
) -> list[EpisodeMetrics]:
    """Paired agent/Chernoff episodes at fixed pi_low over the pi_up list.

    Both policies start from the same trained state and face the same
    truth sequence in every cell.
    """
    episodes = episodes or testing.episodes_per_cell
    tasks = [
        (checkpoint, chern_cfg, u, testing.compare_pi_low, testing, episodes, seed)
        for u in testing.pi_up_grid
    ]
    results = _map_cells(tasks, _compare_cell, jobs)
    return [row for cell_rows in results for row in cell_rows]


def _map_cells(tasks: list[tuple], fn, jobs: int) -> list:
    if jobs == 1 or len(tasks) <= 1:
        return [fn(*task) for task in tasks]
    return Parallel(n_jobs=jobs)(delayed(fn)(*task) for task in tasks)


def frozen_episode_length(
    env: DetectionEnvironment,
    estimates: bel.EstimatedDistributions,
    policy: Policy,
    pi_up: float,
    max_len: int,
    new_truth: int,
    rng: np.random.Generator,
) -> int:
    """Samples taken until the training-phase stopping rule fires, no learning."""
    truth = TrueState(current=env.space[new_truth], change_time=0)
    belief_vec = env.prior.copy()
    for t in range(max_len):
        if belief_vec.max() >= pi_up:
            return t
        action = policy(belief_vec, estimates, rng)
        sample = observe(truth, action, env.processes, rng, time=t + 1)
        belief_vec = bel.update_posterior(belief_vec, sample, estimates)
    return max_len
