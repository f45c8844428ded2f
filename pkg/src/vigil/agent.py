"""The actor-critic decision maker.

The agent's state is the current belief vector: the prior before the
first sample, the latest posterior afterwards. Each step it picks one
sensor, observes one bit, and earns the per-step confidence gain over the
episode's starting confidence. When the episode ends (some posterior
entry clears the acceptance bound, or the step cap is hit) the collected
transitions are replayed backwards: the discounted return accumulates,
the critic takes a least-squares step toward it, and the actor ascends
the policy gradient weighted by the temporal-difference error.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import belief as bel
from . import nets
from .environment import DetectionEnvironment, SensorSample, TrueState, observe


@dataclass(frozen=True)
class LearningConfig:
    """Discounts, learning rates, and the episode cap.

    return_discount weighs future rewards in the backward return
    recursion; td_discount is the bootstrap factor in the TD error.
    """

    return_discount: float = 0.9
    td_discount: float = 0.99
    actor_lr: float = 0.0005
    critic_lr: float = 0.01
    lr_decay: float = 0.999
    max_episode_len: int = 1000

    def __post_init__(self):
        if not 0.0 < self.return_discount < 1.0:
            raise ValueError("return_discount must lie in (0, 1)")
        if not 0.0 < self.td_discount < 1.0:
            raise ValueError("td_discount must lie in (0, 1)")
        if self.actor_lr <= 0.0 or self.critic_lr <= 0.0:
            raise ValueError("learning rates must be positive")
        if not 0.0 < self.lr_decay <= 1.0:
            raise ValueError("lr_decay must lie in (0, 1]")
        if self.max_episode_len < 1:
            raise ValueError("max_episode_len must be positive")


@dataclass(frozen=True)
class Transition:
    """One step: state seen, action taken (0-based sensor), reward, next state."""

    state: np.ndarray
    action: int
    reward: float
    next_state: np.ndarray


@dataclass
class EpisodeRecord:
    """A finished training episode and its outcome."""

    transitions: list[Transition]
    samples: list[SensorSample]
    true_hypothesis: int
    accepted_hypothesis: int | None
    truncated: bool

    @property
    def length(self) -> int:
        return len(self.transitions)


def select_action(
    actor: nets.DenseNet,
    state: np.ndarray,
    mode: str,
    rng: np.random.Generator | None = None,
) -> int:
    """Pick a sensor (0-based) from the policy's softmax scores.

    "eval" takes the argmax (ties to the lowest index); "train" samples
    from the scores, which is what keeps exploration alive.
    """
    scores = nets.forward(actor, state)
    if mode == "eval":
        return int(np.argmax(scores))
    if mode == "train":
        if rng is None:
            raise ValueError("train mode requires an rng")
        cdf = np.cumsum(scores)
        u = rng.random() * cdf[-1]
        return int(min(np.searchsorted(cdf, u, side="right"), len(scores) - 1))
    raise ValueError(f"unknown mode {mode!r}")


def reward(confidence_now: float, confidence_start: float, t: int) -> float:
    """Per-step reward: confidence gained since the episode start, over t."""
    if t < 1:
        raise ValueError("step index must be positive")
    return (confidence_now - confidence_start) / t


def discounted_return(rewards: list[float], return_discount: float) -> np.ndarray:
    """R_t = sum_{tau >= t} discount**(tau - t) * r_tau, via the backward recursion."""
    out = np.empty(len(rewards), dtype=np.float64)
    acc = 0.0
    for t in range(len(rewards) - 1, -1, -1):
        acc = rewards[t] + return_discount * acc
        out[t] = acc
    return out


def td_error(ret: float, v_next: float, v_curr: float, td_discount: float) -> float:
    """delta = R + gamma * V(next) - V(current); V(next) is 0 past the terminal state."""
    return ret + td_discount * v_next - v_curr


def update_networks(
    actor: nets.DenseNet,
    critic: nets.DenseNet,
    transitions: list[Transition],
    cfg: LearningConfig,
    terminal: bool,
) -> None:
    """Backward sweep over an episode's transitions.

    Walks from the last transition to the first, accumulating the
    discounted return. Each step computes the TD error against the
    critic as it currently stands, then updates the critic, then the
    actor. The state after the final transition is worth 0 if the episode
    actually terminated; a truncated episode bootstraps from the critic.
    """
    acc = 0.0
    for idx in range(len(transitions) - 1, -1, -1):
        tr = transitions[idx]
        acc = tr.reward + cfg.return_discount * acc
        if idx == len(transitions) - 1 and terminal:
            v_next = 0.0
        else:
            v_next = nets.value(critic, tr.next_state)
        v_curr = nets.value(critic, tr.state)
        delta = td_error(acc, v_next, v_curr, cfg.td_discount)
        nets.critic_step(critic, tr.state, acc + cfg.td_discount * v_next)
        nets.actor_step(actor, tr.state, tr.action, delta)


@dataclass
class BeliefEngine:
    """Belief propagation with the estimates frozen for the episode."""

    estimates: bel.EstimatedDistributions
    prior: np.ndarray
    start_confidence: float = field(init=False)

    def __post_init__(self):
        self.start_confidence = bel.confidence(self.prior)

    def step(self, belief_vec: np.ndarray, sample: SensorSample) -> np.ndarray:
        return bel.update_posterior(belief_vec, sample, self.estimates)


def run_training_episode(
    env: DetectionEnvironment,
    truth: TrueState,
    store: bel.SampleStore,
    estimates: bel.EstimatedDistributions,
    actor: nets.DenseNet,
    critic: nets.DenseNet,
    cfg: LearningConfig,
    pi_up: float,
    rng: np.random.Generator,
) -> tuple[EpisodeRecord, bel.EstimatedDistributions]:
    """One full training episode: interact, learn, reveal, refit.

    The truth is fixed for the whole episode and the estimates are the
    ones fitted from previous episodes. Steps run until some posterior
    entry reaches pi_up or the cap is hit; the backward update sweep then
    trains both networks, the truth is revealed, and the episode's
    samples are folded into the store. Returns the episode record and the
    refit estimates.
    """
    engine = BeliefEngine(estimates, env.prior)
    state = env.prior.copy()
    transitions: list[Transition] = []
    samples: list[SensorSample] = []
    accepted: int | None = None

    for t in range(1, cfg.max_episode_len + 1):
        top = int(np.argmax(state))
        if state[top] >= pi_up:
            accepted = top
            break
        action = select_action(actor, state, "train", rng)
        sample = observe(truth, action, env.processes, rng, time=t)
        samples.append(sample)
        posterior = engine.step(state, sample)
        r = reward(bel.confidence(posterior), engine.start_confidence, t)
        transitions.append(Transition(state=state, action=action, reward=r, next_state=posterior))
        state = posterior
    else:
        # cap hit without accepting; still check the final state
        top = int(np.argmax(state))
        if state[top] >= pi_up:
            accepted = top

    truncated = accepted is None
    update_networks(actor, critic, transitions, cfg, terminal=not truncated)
    record = EpisodeRecord(
        transitions=transitions,
        samples=samples,
        true_hypothesis=truth.current.index,
        accepted_hypothesis=accepted,
        truncated=truncated,
    )
    new_estimates = bel.reveal_and_refit(store, samples, truth.current.index)
    return record, new_estimates
