"""Run configuration: TOML parsing, validation, and resolved-config output.

A config file is TOML with five optional tables (environment, learning,
training, testing, chernoff) and optional top-level seed / out_dir /
jobs. Every key has a default; unknown keys are errors so typos cannot
silently fall back to defaults. Every run writes the fully resolved
config next to its outputs.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .agent import LearningConfig
from .chernoff import ChernoffConfig
from .environment import ProcessSet
from .harness import TestConfig, TrainConfig


class ConfigError(ValueError):
    """A config file problem: syntax, unknown keys, or out-of-range values."""


@dataclass(frozen=True)
class RunConfig:
    environment: ProcessSet = field(
        default_factory=lambda: ProcessSet(count=3, abnormal_probs=(0.2, 0.3, 0.1), flip_prob=0.2)
    )
    learning: LearningConfig = field(default_factory=LearningConfig)
    training: TrainConfig = field(default_factory=TrainConfig)
    testing: TestConfig = field(default_factory=TestConfig)
    chernoff: ChernoffConfig = field(default_factory=ChernoffConfig)
    seed: int = 0
    out_dir: str = "."
    jobs: int = 1

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "out_dir": self.out_dir,
            "jobs": self.jobs,
            "environment": {
                "processes": self.environment.count,
                "abnormal_probs": list(self.environment.abnormal_probs),
                "flip_prob": self.environment.flip_prob,
            },
            "learning": asdict(self.learning),
            "training": asdict(self.training),
            "testing": {**asdict(self.testing),
                        "pi_up_grid": list(self.testing.pi_up_grid),
                        "pi_low_grid": list(self.testing.pi_low_grid)},
            "chernoff": asdict(self.chernoff),
        }


_SCHEMA = {
    "": {"seed", "out_dir", "jobs"},
    "environment": {"processes", "abnormal_probs", "flip_prob"},
    "learning": {
        "return_discount",
        "td_discount",
        "actor_lr",
        "critic_lr",
        "lr_decay",
        "max_episode_len",
    },
    "training": {
        "max_episodes",
        "validation_interval",
        "validation_hold",
        "validation_set_size",
        "pi_up",
    },
    "testing": {
        "warmup_steps",
        "max_sampling_time",
        "pi_up_grid",
        "pi_low_grid",
        "episodes_per_cell",
        "compare_pi_low",
    },
    "chernoff": {"explore_prob"},
}


def _check_keys(raw: dict) -> None:
    unknown = []
    for key, value in raw.items():
        if key in _SCHEMA and isinstance(value, dict):
            unknown.extend(f"{key}.{sub}" for sub in value if sub not in _SCHEMA[key])
        elif key not in _SCHEMA[""]:
            unknown.append(key)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")


def _build_section(name: str, cls, raw: dict, rename: dict | None = None):
    kwargs = dict(raw.get(name, {}))
    if rename:
        for src, dst in rename.items():
            if src in kwargs:
                kwargs[dst] = kwargs.pop(src)
    try:
        return cls(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"[{name}] {exc}") from exc


def config_from_dict(raw: dict) -> RunConfig:
    """Validate a plain dict (parsed TOML or a checkpoint snapshot)."""
    _check_keys(raw)
    env_kwargs = dict(raw.get("environment", {}))
    if "abnormal_probs" in env_kwargs:
        env_kwargs["abnormal_probs"] = tuple(env_kwargs["abnormal_probs"])
    if "processes" in env_kwargs:
        env_kwargs["count"] = env_kwargs.pop("processes")
    defaults = RunConfig()
    if "count" not in env_kwargs and "abnormal_probs" in env_kwargs:
        env_kwargs["count"] = len(env_kwargs["abnormal_probs"])
    try:
        environment = ProcessSet(
            count=env_kwargs.get("count", defaults.environment.count),
            abnormal_probs=env_kwargs.get("abnormal_probs", defaults.environment.abnormal_probs),
            flip_prob=env_kwargs.get("flip_prob", defaults.environment.flip_prob),
        )
    except ValueError as exc:
        raise ConfigError(f"[environment] {exc}") from exc
    testing_kwargs = dict(raw.get("testing", {}))
    for grid_key in ("pi_up_grid", "pi_low_grid"):
        if grid_key in testing_kwargs:
            testing_kwargs[grid_key] = tuple(testing_kwargs[grid_key])
    raw_testing = dict(raw)
    raw_testing["testing"] = testing_kwargs

    seed = raw.get("seed", defaults.seed)
    jobs = raw.get("jobs", defaults.jobs)
    out_dir = raw.get("out_dir", defaults.out_dir)
    if not isinstance(seed, int) or isinstance(seed, bool):
        raise ConfigError("seed must be an integer")
    if not isinstance(jobs, int) or isinstance(jobs, bool) or jobs < 1:
        raise ConfigError("jobs must be a positive integer")
    if not isinstance(out_dir, str):
        raise ConfigError("out_dir must be a string")

    return RunConfig(
        environment=environment,
        learning=_build_section("learning", LearningConfig, raw),
        training=_build_section("training", TrainConfig, raw),
        testing=_build_section("testing", TestConfig, raw_testing),
        chernoff=_build_section("chernoff", ChernoffConfig, raw),
        seed=seed,
        out_dir=out_dir,
        jobs=jobs,
    )


def parse_config(path: str | Path) -> RunConfig:
    """Load and validate a TOML config file."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        raw = tomllib.loads(path.read_text(encoding="utf-8"))
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"malformed TOML in {path}: {exc}") from exc
    return config_from_dict(raw)


def _toml_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, float)):
        return repr(value)
    if isinstance(value, str):
        return '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_toml_value(v) for v in value) + "]"
    raise TypeError(f"cannot render {type(value)!r} as TOML")


def render_config(config: RunConfig) -> str:
    """The fully resolved config as TOML text (parses back to the same config)."""
    doc = config.to_dict()
    lines = []
    for key in ("seed", "out_dir", "jobs"):
        lines.append(f"{key} = {_toml_value(doc[key])}")
    for section in ("environment", "learning", "training", "testing", "chernoff"):
        lines.append("")
        lines.append(f"[{section}]")
        for key, value in doc[section].items():
            lines.append(f"{key} = {_toml_value(value)}")
    return "\n".join(lines) + "\n"
