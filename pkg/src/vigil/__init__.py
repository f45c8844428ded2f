"""Active sequential anomaly detection with learned sensor scheduling.

An agent watches N processes through noisy one-bit sensors, one reading
per step. It tracks a Bayesian posterior over all 2**N normal/abnormal
assignments, learns which sensor to read next with a from-scratch
actor-critic method, and stops once the posterior clears configurable
confidence bounds. A Chernoff-style selection rule is included as the
classical baseline.
"""

from .agent import LearningConfig, select_action
from .belief import (
    EstimatedDistributions,
    SampleStore,
    Thresholds,
    check_accept,
    check_reject_null,
    confidence,
    hypothesis_confidence,
    reveal_and_refit,
    update_posterior,
)
from .checkpoint import Checkpoint
from .chernoff import ChernoffConfig, chernoff_select, kl_bernoulli
from .config import ConfigError, RunConfig, parse_config
from .environment import (
    DetectionEnvironment,
    Hypothesis,
    HypothesisSpace,
    ProcessSet,
    SensorSample,
    TrueState,
    draw_hypothesis,
    enumerate_hypotheses,
    observe,
    prior_belief,
)
from .harness import TestConfig, TrainConfig, compare, sweep, test, train
from .nets import DenseNet, build_actor, build_critic, forward

__version__ = "0.1.0"

__all__ = [
    "Checkpoint",
    "ChernoffConfig",
    "ConfigError",
    "DenseNet",
    "DetectionEnvironment",
    "EstimatedDistributions",
    "Hypothesis",
    "HypothesisSpace",
    "LearningConfig",
    "ProcessSet",
    "RunConfig",
    "SampleStore",
    "SensorSample",
    "TestConfig",
    "Thresholds",
    "TrainConfig",
    "TrueState",
    "build_actor",
    "build_critic",
    "chernoff_select",
    "check_accept",
    "check_reject_null",
    "compare",
    "confidence",
    "draw_hypothesis",
    "enumerate_hypotheses",
    "forward",
    "hypothesis_confidence",
    "kl_bernoulli",
    "observe",
    "parse_config",
    "prior_belief",
    "reveal_and_refit",
    "select_action",
    "sweep",
    "test",
    "train",
    "update_posterior",
]
