"""Classical active-testing baseline for sensor selection.

Given the current maximum-likelihood hypothesis, score each sensor by the
smallest Kullback-Leibler divergence between its estimated reading
distribution under that hypothesis and under any alternative, and sample
the sensor with the largest such worst-case separation. A configurable
fraction of steps picks a sensor uniformly at random instead, which keeps
the test alive when every sensor's worst-case separation is zero (for any
hypothesis here there are alternatives that agree with it on any single
sensor, so that happens routinely).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .belief import EstimatedDistributions

_KL_CLAMP = 1e-12


@dataclass(frozen=True)
class ChernoffConfig:
    """explore_prob is the chance of a uniformly random sensor pick."""

    explore_prob: float = 0.1

    def __post_init__(self):
        if not 0.0 <= self.explore_prob <= 1.0:
            raise ValueError("explore_prob must lie in [0, 1]")


def kl_bernoulli(p: float, q: float) -> float:
    """KL(Bernoulli(p) || Bernoulli(q)), with inputs clamped inside (0, 1)."""
    p = min(max(p, _KL_CLAMP), 1.0 - _KL_CLAMP)
    q = min(max(q, _KL_CLAMP), 1.0 - _KL_CLAMP)
    return p * np.log(p / q) + (1.0 - p) * np.log((1.0 - p) / (1.0 - q))


def separation_scores(belief_vec: np.ndarray, estimates: EstimatedDistributions) -> np.ndarray:
    """Worst-case KL separation per sensor against the ML hypothesis.

    score[i] = min over alternatives m of KL(p[i, ml] || p[i, m]).
    """
    ml = int(np.argmax(belief_vec))
    p = np.clip(estimates.p_one, _KL_CLAMP, 1.0 - _KL_CLAMP)
    ref = p[:, ml : ml + 1]
    kl = ref * np.log(ref / p) + (1.0 - ref) * np.log((1.0 - ref) / (1.0 - p))
    kl = np.delete(kl, ml, axis=1)
    return kl.min(axis=1)


def chernoff_select(
    belief_vec: np.ndarray,
    estimates: EstimatedDistributions,
    cfg: ChernoffConfig,
    rng: np.random.Generator,
) -> int:
    """Pick a sensor (0-based): best worst-case separation, or random.

    Ties resolve to the lowest sensor index. The random branch fires with
    probability explore_prob.
    """
    n_sensors = estimates.p_one.shape[0]
    if cfg.explore_prob > 0.0 and rng.random() < cfg.explore_prob:
        return int(rng.integers(n_sensors))
    return int(np.argmax(separation_scores(belief_vec, estimates)))


def chernoff_policy(cfg: ChernoffConfig):
    """Adapt the selection rule to the detection-episode policy signature."""

    def policy(belief_vec, estimates, rng):
        return chernoff_select(belief_vec, estimates, cfg, rng)

    return policy


def run_chernoff_episode(
    env,
    estimates: EstimatedDistributions,
    cfg: ChernoffConfig,
    thresholds,
    warmup_steps: int,
    max_sampling_time: int,
    new_truth: int,
    rng: np.random.Generator,
):
    """One detection episode driven by the Chernoff selection rule.

    Identical loop and stopping structure to the agent's testing episode;
    only the sensor choice differs.
    """
    from .detection import run_detection_episode

    return run_detection_episode(
        env,
        estimates,
        chernoff_policy(cfg),
        thresholds,
        warmup_steps,
        max_sampling_time,
        new_truth,
        rng,
    )
