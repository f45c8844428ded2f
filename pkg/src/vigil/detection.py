"""Change-point detection episodes with pluggable sensor-selection policies.

A detection episode has three phases. First a warm-up: the all-normal
hypothesis holds for a fixed number of steps while the belief
concentrates on it. Then the truth is redrawn and the agent keeps
monitoring; when the all-normal posterior drops to the lower bound it
reports a change point and resets its belief to the prior. From then on
it identifies: sampling continues until some posterior entry clears the
upper bound, which claims that hypothesis. Episodes that never claim
within the sampling budget are recorded as no-claim outcomes.

A policy is any callable ``(belief, estimates, rng) -> sensor`` (0-based).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import belief as bel
from .environment import DetectionEnvironment, SensorSample, TrueState, observe

Policy = Callable[[np.ndarray, bel.EstimatedDistributions, np.random.Generator], int]


@dataclass
class DetectionRecord:
    """Outcome of one detection episode.

    Step counters are relative to the change (the truth redraw at the end
    of the warm-up); claim_delay is None when the episode never claimed.
    """

    true_hypothesis: int
    change_report_step: int | None
    false_alarm: bool
    accepted_hypothesis: int | None
    claim_delay: int | None
    no_claim: bool
    steps: int
    warmup_samples: list[SensorSample]
    postchange_samples: list[SensorSample]

    @property
    def correct(self) -> bool | None:
        if self.accepted_hypothesis is None:
            return None
        return self.accepted_hypothesis == self.true_hypothesis


def run_detection_episode(
    env: DetectionEnvironment,
    estimates: bel.EstimatedDistributions,
    policy: Policy,
    thresholds: bel.Thresholds,
    warmup_steps: int,
    max_sampling_time: int,
    new_truth: int,
    rng: np.random.Generator,
) -> DetectionRecord:
    """Run one warm-up / monitor / identify episode under a fixed policy.

    The estimates stay frozen for the whole episode; the caller folds the
    returned samples into its store afterwards. ``new_truth`` is the
    hypothesis index that becomes true once the warm-up ends (the caller
    draws it, which lets paired comparisons share truth sequences).
    """
    null_state = TrueState(current=env.space[0], change_time=0)
    belief_vec = env.prior.copy()
    warmup_samples: list[SensorSample] = []
    for t in range(1, warmup_steps + 1):
        action = policy(belief_vec, estimates, rng)
        sample = observe(null_state, action, env.processes, rng, time=t)
        warmup_samples.append(sample)
        belief_vec = bel.update_posterior(belief_vec, sample, estimates)

    truth = TrueState(current=env.space[new_truth], change_time=warmup_steps)
    postchange_samples: list[SensorSample] = []
    change_report_step: int | None = None
    accepted: int | None = None
    claim_delay: int | None = None
    identifying = False

    steps = 0
    for t in range(1, max_sampling_time + 1):
        steps = t
        action = policy(belief_vec, estimates, rng)
        sample = observe(truth, action, env.processes, rng, time=warmup_steps + t)
        postchange_samples.append(sample)
        belief_vec = bel.update_posterior(belief_vec, sample, estimates)
        if not identifying:
            if bel.check_reject_null(belief_vec, thresholds):
                change_report_step = t
                belief_vec = env.prior.copy()
                identifying = True
            # claims only count once they rest on evidence gathered after
            # the change report, so no accept check on the reset belief
            continue
        m = bel.check_accept(belief_vec, thresholds)
        if m is not None:
            accepted = m
            claim_delay = t
            break

    return DetectionRecord(
        true_hypothesis=new_truth,
        change_report_step=change_report_step,
        false_alarm=change_report_step is not None and new_truth == 0,
        accepted_hypothesis=accepted,
        claim_delay=claim_delay,
        no_claim=accepted is None,
        steps=steps,
        warmup_samples=warmup_samples,
        postchange_samples=postchange_samples,
    )
