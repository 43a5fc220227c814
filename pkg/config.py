# config.py
import hashlib
import json
import os
from dataclasses import dataclass, field, fields, asdict
from pathlib import Path

from dotenv import load_dotenv

load_dotenv()

METHODS = ("centsmoothie", "centsimple", "baseline")

# Grid searched by the original experiments; other values are allowed.
GRID_LAYERS = (1, 2, 3)
GRID_EMBEDDING_SIZES = (10, 20, 30)


@dataclass
class TrainConfig:
    method: str = "centsmoothie"
    embedding_size: int = 20          # K
    num_layers: int = 2               # N
    lam: float = 0.01                 # weight of the negative term
    learning_rate: float = 0.01       # first step size; the line search adapts it per epoch
    epochs: int = 300
    seed: int = field(default_factory=lambda: int(os.getenv("CSH_SEED", "0")))
    neg_resample_every: int = 10
    eps: float = 1e-8
    threshold: float = 0.5            # h, used by classify and predict filters
    log_every: int = 50
    line_search: bool = True          # Armijo rule along the projection arc; off = fixed learning_rate
    step_shrink: float = 0.5          # step size factor per trial
    sufficient_decrease: float = 0.01
    max_step_trials: int = 20

    def grid_notices(self) -> list[str]:
        """Messages for settings outside the published hyperparameter grid."""
        notices = []
        if self.embedding_size not in GRID_EMBEDDING_SIZES:
            notices.append(f"embedding_size={self.embedding_size} is outside the grid {GRID_EMBEDDING_SIZES}")
        if self.num_layers not in GRID_LAYERS:
            notices.append(f"num_layers={self.num_layers} is outside the grid {GRID_LAYERS}")
        return notices

    def validate(self) -> None:
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}; expected one of {METHODS}")
        if self.embedding_size < 1:
            raise ValueError("embedding_size must be >= 1")
        if self.num_layers < 1:
            raise ValueError("num_layers must be >= 1")
        if self.lam < 0:
            raise ValueError("lam must be non-negative")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.epochs < 0:
            raise ValueError("epochs must be non-negative")
        if self.neg_resample_every < 1:
            raise ValueError("neg_resample_every must be >= 1")
        if not 0 < self.threshold < 1:
            raise ValueError("threshold must lie in (0, 1)")
        if not 0 < self.step_shrink < 1:
            raise ValueError("step_shrink must lie in (0, 1)")
        if not 0 < self.sufficient_decrease < 1:
            raise ValueError("sufficient_decrease must lie in (0, 1)")
        if self.max_step_trials < 1:
            raise ValueError("max_step_trials must be >= 1")


@dataclass
class SynthConfig:
    n: int = 10          # feature groups
    a: int = 3           # features per group
    D: int = 500         # drugs
    m: int = 1           # max groups per drug
    sigma: float = 0.01  # Gaussian standard deviation of the feature noise
    seed: int = 0

    def validate(self) -> None:
        if self.n < 2:
            raise ValueError("n must be >= 2 (side effects are pairs of distinct groups)")
        if self.a < 1 or self.D < 2:
            raise ValueError("a must be >= 1 and D >= 2")
        if not 1 <= self.m <= self.n:
            raise ValueError(f"m must satisfy 1 <= m <= n, got m={self.m}, n={self.n}")
        if self.sigma < 0:
            raise ValueError("sigma must be non-negative")


@dataclass
class EvalConfig:
    folds: int = 20
    negatives_per_positive: int = 1
    infrequent_curve: bool = True


@dataclass
class PathsConfig:
    data_dir: str = "data"
    output_dir: str = field(default_factory=lambda: os.getenv("CSH_OUTPUT_DIR", "reports"))
    checkpoint: str = ""


@dataclass
class RunConfig:
    train: TrainConfig = field(default_factory=TrainConfig)
    synth: SynthConfig = field(default_factory=SynthConfig)
    eval: EvalConfig = field(default_factory=EvalConfig)
    paths: PathsConfig = field(default_factory=PathsConfig)
    jobs: int = field(default_factory=lambda: int(os.getenv("CSH_JOBS", "1")))

    def _sections(self):
        return (self.train, self.synth, self.eval, self.paths)

    def resolved_dict(self) -> dict:
        """Flat, key-sorted view of every setting (the thing that gets hashed)."""
        flat = {"jobs": self.jobs}
        for section in self._sections():
            name = type(section).__name__.removesuffix("Config").lower()
            for key, value in asdict(section).items():
                flat[f"{name}.{key}"] = value
        return dict(sorted(flat.items()))

    def config_hash(self) -> str:
        """Hash of the settings that affect results; jobs and paths are left out."""
        relevant = {k: v for k, v in self.resolved_dict().items() if k != "jobs" and not k.startswith("paths.")}
        canonical = json.dumps(relevant, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode()).hexdigest()[:16]

    def apply(self, overrides: dict) -> "RunConfig":
        """Set flat keys (``m``, ``embedding_size``, ``synth.seed`` ...) in place."""
        for key, value in overrides.items():
            if value is None:
                continue
            section, attr = self._locate(key)
            target_type = _field_type(section, attr)
            setattr(section, attr, _coerce(value, target_type, key))
        return self

    def _locate(self, key: str):
        if key == "jobs":
            return self, "jobs"
        if "." in key:
            prefix, attr = key.split(".", 1)
            for section in self._sections():
                if type(section).__name__.removesuffix("Config").lower() == prefix and _has_field(section, attr):
                    return section, attr
            raise KeyError(key)
        matches = [s for s in self._sections() if _has_field(s, key)]
        if not matches:
            raise KeyError(key)
        # ``seed`` exists in both train and synth; bare keys address the first section.
        return matches[0], key


def _has_field(obj, name: str) -> bool:
    return any(f.name == name for f in fields(obj))


def _field_type(obj, name: str) -> type:
    value = getattr(obj, name)
    return type(value)


def _coerce(value, target_type: type, key: str):
    if isinstance(value, target_type) and not (target_type is int and isinstance(value, bool)):
        return value
    text = str(value).strip()
    try:
        if target_type is bool:
            lowered = text.lower()
            if lowered in ("1", "true", "yes", "on"):
                return True
            if lowered in ("0", "false", "no", "off"):
                return False
            raise ValueError(text)
        return target_type(text)
    except ValueError:
        raise ValueError(f"config key {key!r}: cannot parse {text!r} as {target_type.__name__}") from None


def parse_config_file(path: str | Path) -> list[tuple[int, str, str]]:
    """Read ``key = value`` lines as (line number, key, value). ``#`` starts a comment line."""
    entries: list[tuple[int, str, str]] = []
    with open(path, encoding="utf-8") as f:
        for line_no, raw in enumerate(f, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{line_no}: expected 'key = value', got {line!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            if not key:
                raise ValueError(f"{path}:{line_no}: empty key")
            entries.append((line_no, key, value))
    return entries


def load_run_config(config_path: str | None = None, overrides: dict | None = None) -> RunConfig:
    """defaults < environment < config file < flags."""
    config = RunConfig()
    if config_path:
        for line_no, key, value in parse_config_file(config_path):
            try:
                config.apply({key: value})
            except KeyError:
                raise ValueError(f"{config_path}:{line_no}: unknown config key {key!r}") from None
    if overrides:
        config.apply(overrides)
    config.train.validate()
    return config


CONFIG = RunConfig()
