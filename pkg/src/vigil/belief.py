"""Posterior tracking over hypotheses and density estimation from revealed episodes.

The belief is a probability vector over the ``M`` hypotheses. Each
observation multiplies it entrywise by the estimated likelihood of the
observed bit under every hypothesis and renormalizes; this recursion is
equivalent to the full joint product over the history because samples are
independent given the hypothesis.

Sensor likelihoods are unknown to the observer and are estimated from
past episodes only: once an episode's truth is revealed, its samples join
the per-(sensor, hypothesis) pools and the Bernoulli parameters are refit
by smoothed maximum likelihood. Estimates never change mid-episode.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .environment import HypothesisSpace, ProcessSet, SensorSample

# Belief entries are clamped away from {0, 1} so log-odds stay finite.
BELIEF_CLAMP = 1e-9

# Laplace smoothing constant for the Bernoulli estimates; keeps every
# likelihood strictly positive even for never-observed (sensor, hypothesis)
# pools, where the estimate is the uninformative 0.5.
LAPLACE_A = 1.0


def clamp_belief(probs: np.ndarray) -> np.ndarray:
    """Clip entries to [BELIEF_CLAMP, 1 - BELIEF_CLAMP] and renormalize."""
    clipped = np.clip(probs, BELIEF_CLAMP, 1.0 - BELIEF_CLAMP)
    return clipped / clipped.sum()


class SampleStore:
    """Per-(sensor, hypothesis) sample pools, reduced to sufficient counts.

    Binary samples only need (count, ones) per pool. Counts grow
    monotonically and are touched only between episodes, after the truth
    is revealed.
    """

    def __init__(self, n_sensors: int, n_hypotheses: int):
        self.n_total = np.zeros((n_sensors, n_hypotheses), dtype=np.int64)
        self.n_ones = np.zeros((n_sensors, n_hypotheses), dtype=np.int64)

    @property
    def total_samples(self) -> int:
        return int(self.n_total.sum())

    def add(self, sensor: int, hypothesis: int, value: int) -> None:
        self.n_total[sensor, hypothesis] += 1
        self.n_ones[sensor, hypothesis] += value

    def extend(self, samples: list[SensorSample], hypothesis: int) -> None:
        for s in samples:
            self.add(s.sensor, hypothesis, s.value)

    def copy(self) -> "SampleStore":
        dup = SampleStore.__new__(SampleStore)
        dup.n_total = self.n_total.copy()
        dup.n_ones = self.n_ones.copy()
        return dup


@dataclass(frozen=True)
class EstimatedDistributions:
    """Smoothed Bernoulli estimates p_one[i, m] = P(sensor i reads 1 | H_m).

    Strictly inside (0, 1) by construction; an empty pool estimates 0.5.
    """

    p_one: np.ndarray

    @classmethod
    def from_store(cls, store: SampleStore) -> "EstimatedDistributions":
        p = (store.n_ones + LAPLACE_A) / (store.n_total + 2.0 * LAPLACE_A)
        return cls(p_one=p)

    @classmethod
    def oracle(cls, processes: ProcessSet, space: HypothesisSpace) -> "EstimatedDistributions":
        """The true sensing law: 1 - flip_prob where abnormal, flip_prob where not."""
        rho = processes.flip_prob
        p = np.where(space.membership, 1.0 - rho, rho).astype(np.float64)
        return cls(p_one=p)

    def likelihood(self, sensor: int, value: int) -> np.ndarray:
        """Likelihood of the observed bit under every hypothesis (length M)."""
        row = self.p_one[sensor]
        return row if value == 1 else 1.0 - row


@dataclass(frozen=True)
class Thresholds:
    """Stopping bounds on the posterior.

    pi_up triggers acceptance of the leading hypothesis while
    identifying; pi_low triggers rejection of the all-normal hypothesis
    while monitoring. They act in different phases, so no ordering is
    imposed here; grid configs enforce pi_low < pi_up where a sweep
    demands it.
    """

    pi_up: float
    pi_low: float

    def __post_init__(self):
        if not 0.0 < self.pi_low < 1.0 or not 0.0 < self.pi_up < 1.0:
            raise ValueError("thresholds must lie strictly inside (0, 1)")


def update_posterior(
    belief: np.ndarray, sample: SensorSample, estimates: EstimatedDistributions
) -> np.ndarray:
    """One-step Bayes update of the belief for an observed sensor bit.

    Multiplies by the per-hypothesis likelihood of the bit, renormalizes,
    then clamps entries away from {0, 1} and renormalizes again. The
    clamp only engages once an entry falls below BELIEF_CLAMP.
    """
    lik = estimates.likelihood(sample.sensor, sample.value)
    posterior = belief * lik
    norm = posterior.sum()
    if not norm > 0.0:
        raise AssertionError("zero posterior normalizer; estimates must be smoothed")
    return clamp_belief(posterior / norm)


def hypothesis_confidence(belief: np.ndarray, m: int) -> float:
    """Log-odds ln(pi_m / (1 - pi_m)) of hypothesis m."""
    p = belief[m]
    return float(np.log(p) - np.log1p(-p))


def confidence(belief: np.ndarray) -> float:
    """Belief-weighted mean log-odds: sum_m pi_m * ln(pi_m / (1 - pi_m)).

    Zero for a two-point uniform belief, large and positive once the
    belief concentrates on a single hypothesis.
    """
    return float(np.dot(belief, np.log(belief) - np.log1p(-belief)))


def check_accept(belief: np.ndarray, thresholds: Thresholds) -> int | None:
    """Index of the accepted hypothesis, or None if nothing clears pi_up.

    Ties (possible only when pi_up <= 0.5) resolve to the lowest index.
    """
    m = int(np.argmax(belief))
    return m if belief[m] >= thresholds.pi_up else None


def check_reject_null(belief: np.ndarray, thresholds: Thresholds) -> bool:
    """True when the all-normal hypothesis has dropped to pi_low or below."""
    return bool(belief[0] <= thresholds.pi_low)


def reveal_and_refit(
    store: SampleStore, episode_samples: list[SensorSample], true_hypothesis: int
) -> EstimatedDistributions:
    """Fold a finished episode's samples into the store and refit estimates.

    Called once the episode's truth is revealed; every sample joins the
    pool of its sensor under the true hypothesis.
    """
    store.extend(episode_samples, true_hypothesis)
    return EstimatedDistributions.from_store(store)
