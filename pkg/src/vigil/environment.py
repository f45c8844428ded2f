"""Processes, hypotheses, and the noisy binary sensing model.

``N`` independent processes are each either normal or abnormal. A
hypothesis is one assignment of states to all processes, so there are
``M = 2**N`` of them; hypothesis 0 is "all normal". Each process has a
sensor that reports its state as one bit, flipped with probability
``flip_prob``, and an observer may read exactly one sensor per step.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

MAX_PROCESSES = 20  # 2**20 hypotheses; beyond this the belief vector is unreasonable


@dataclass(frozen=True)
class ProcessSet:
    """The monitored processes and their sensing noise.

    abnormal_probs[i] is the marginal probability that process i+1 is
    abnormal in a fresh episode; flip_prob is the chance a sensor reading
    is inverted. flip_prob must stay below 0.5 or readings carry no
    usable sign.
    """

    count: int
    abnormal_probs: tuple[float, ...]
    flip_prob: float

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("need at least one process")
        if len(self.abnormal_probs) != self.count:
            raise ValueError(
                f"abnormal_probs has {len(self.abnormal_probs)} entries, expected {self.count}"
            )
        if any(not 0.0 < p < 1.0 for p in self.abnormal_probs):
            raise ValueError("every abnormal probability must lie strictly inside (0, 1)")
        if not 0.0 <= self.flip_prob < 0.5:
            raise ValueError("flip_prob must lie in [0, 0.5)")


@dataclass(frozen=True)
class Hypothesis:
    """One assignment of abnormal processes; ``abnormal_set`` holds 1-based ids."""

    index: int
    abnormal_set: frozenset[int]


class HypothesisSpace:
    """All ``2**N`` hypotheses in canonical order.

    Canonical order is ascending cardinality of the abnormal set, then
    lexicographic by member indices. Index 0 is always the empty set. The
    order is part of the on-disk contract: belief vectors, sample counts,
    and network inputs are all indexed by it.
    """

    def __init__(self, hypotheses: list[Hypothesis], n_processes: int):
        self.hypotheses = hypotheses
        self.n_processes = n_processes
        self.size = len(hypotheses)
        self._index_of = {h.abnormal_set: h.index for h in hypotheses}
        # membership[i, m] is True when sensor i+1 watches an abnormal process under H_m
        self.membership = np.zeros((n_processes, self.size), dtype=bool)
        for h in hypotheses:
            for i in h.abnormal_set:
                self.membership[i - 1, h.index] = True

    def __len__(self) -> int:
        return self.size

    def __getitem__(self, m: int) -> Hypothesis:
        return self.hypotheses[m]

    def index_of(self, abnormal_set: frozenset[int]) -> int:
        return self._index_of[abnormal_set]

    def sensor_is_abnormal(self, sensor: int, m: int) -> bool:
        """sensor is 0-based here, as everywhere internal."""
        return bool(self.membership[sensor, m])


@dataclass(frozen=True)
class TrueState:
    """The hidden truth: which hypothesis holds, and since when.

    Hidden from the agent; within an episode segment it never changes
    (processes keep their states until the anomaly set is resolved).
    """

    current: Hypothesis
    change_time: int = 0


@dataclass(frozen=True)
class SensorSample:
    """One observation: sensor index (0-based internally), bit value, step."""

    sensor: int
    value: int
    time: int


@dataclass(frozen=True)
class DetectionEnvironment:
    """Process set plus its hypothesis space and cached prior belief."""

    processes: ProcessSet
    space: HypothesisSpace = field(compare=False)
    prior: np.ndarray = field(compare=False)

    @classmethod
    def from_processes(cls, processes: ProcessSet) -> "DetectionEnvironment":
        space = enumerate_hypotheses(processes.count)
        return cls(processes=processes, space=space, prior=prior_belief(processes, space))


def enumerate_hypotheses(n: int) -> HypothesisSpace:
    """Build the canonical hypothesis space for ``n`` processes.

    Rejects n < 1 and n > MAX_PROCESSES (the 2**n belief vector must stay
    addressable).
    """
    if n < 1:
        raise ValueError("need at least one process")
    if n > MAX_PROCESSES:
        raise ValueError(f"n={n} exceeds the supported maximum of {MAX_PROCESSES} processes")
    hypotheses = []
    index = 0
    for k in range(n + 1):
        for members in combinations(range(1, n + 1), k):
            hypotheses.append(Hypothesis(index=index, abnormal_set=frozenset(members)))
            index += 1
    return HypothesisSpace(hypotheses, n)


def prior_belief(processes: ProcessSet, space: HypothesisSpace) -> np.ndarray:
    """Joint prior over hypotheses from the per-process abnormal probabilities.

    Entry m is the product over processes of P_i (abnormal under H_m) or
    1 - P_i (normal under H_m). Sums to 1 by construction.
    """
    if space.n_processes != processes.count:
        raise ValueError("hypothesis space does not match the process set")
    p = np.asarray(processes.abnormal_probs, dtype=np.float64)
    # (n, M) factor table: P_i where abnormal, 1-P_i where normal
    factors = np.where(space.membership, p[:, None], (1.0 - p)[:, None])
    return factors.prod(axis=0)


def draw_hypothesis(prior: np.ndarray, rng: np.random.Generator) -> int:
    """Sample a hypothesis index from a belief/prior vector."""
    cdf = np.cumsum(prior)
    u = rng.random() * cdf[-1]
    return int(min(np.searchsorted(cdf, u, side="right"), len(prior) - 1))


def observe(
    state: TrueState, sensor: int, processes: ProcessSet, rng: np.random.Generator, time: int = 0
) -> SensorSample:
    """Read one sensor (0-based) under the hidden truth.

    An abnormal process reports 1 with probability 1 - flip_prob, a normal
    one with probability flip_prob.
    """
    if not 0 <= sensor < processes.count:
        raise ValueError(f"sensor index {sensor} out of range [0, {processes.count})")
    abnormal = (sensor + 1) in state.current.abnormal_set
    p_one = 1.0 - processes.flip_prob if abnormal else processes.flip_prob
    value = 1 if rng.random() < p_one else 0
    return SensorSample(sensor=sensor, value=value, time=time)
