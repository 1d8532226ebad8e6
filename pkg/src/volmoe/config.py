"""Experiment configuration: paper-faithful defaults, strict JSON loading.

Unknown keys and out-of-range values abort before any computation, with
the offending field named. All randomness is funneled through the two
seeds declared here; ``shuffle_seed = null`` resolves to master_seed + 1.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ConfigError
from .lstm import TrainConfig
from .moe import GateConfig, GateWeights
from .simdata import DatasetConfig

EXPERT_POOLS = ("volatile", "all")


@dataclass(frozen=True)
class LstmBlock:
    window: int = 10
    hidden: int = 50
    lr: float = 0.001
    batch: int = 16
    epochs: int = 50
    patience: int = 5
    val_fraction: float = 0.1
    clip_norm: float = 5.0

    def validate(self) -> None:
        if self.window < 1:
            raise ConfigError("lstm.window", f"must be >= 1, got {self.window}")
        if self.hidden < 1:
            raise ConfigError("lstm.hidden", f"must be >= 1, got {self.hidden}")
        self.train_config().validate()

    def train_config(self) -> TrainConfig:
        return TrainConfig(
            epochs=self.epochs,
            batch_size=self.batch,
            lr=self.lr,
            early_stop_patience=self.patience,
            val_fraction=self.val_fraction,
            clip_norm=self.clip_norm,
        )


@dataclass(frozen=True)
class GateBlock:
    weights_volatile: tuple[float, float] = (0.7, 0.3)
    weights_stable: tuple[float, float] = (0.3, 0.7)
    rnn_expert_pool: str = "volatile"

    def validate(self) -> None:
        for name, pair in (
            ("gate.weights_volatile", self.weights_volatile),
            ("gate.weights_stable", self.weights_stable),
        ):
            try:
                GateWeights(*pair)
            except Exception as exc:
                raise ConfigError(name, str(exc)) from exc
        if self.rnn_expert_pool not in EXPERT_POOLS:
            raise ConfigError(
                "gate.rnn_expert_pool",
                f"must be one of {EXPERT_POOLS}, got {self.rnn_expert_pool!r}",
            )

    def gate_config(self, threshold: float) -> GateConfig:
        return GateConfig(
            weights_volatile=GateWeights(*self.weights_volatile),
            weights_stable=GateWeights(*self.weights_stable),
            threshold=threshold,
        )


@dataclass(frozen=True)
class WalkforwardBlock:
    init_train: int = 80
    val_len: int = 20
    step: int = 20

    def validate(self) -> None:
        if self.init_train < 1:
            raise ConfigError("walkforward.init_train", f"must be >= 1, got {self.init_train}")
        if self.val_len < 1:
            raise ConfigError("walkforward.val_len", f"must be >= 1, got {self.val_len}")
        if self.step < 1:
            raise ConfigError("walkforward.step", f"must be >= 1, got {self.step}")


@dataclass(frozen=True)
class SeedsBlock:
    master_seed: int = 42
    shuffle_seed: int | None = None  # None resolves to master_seed + 1

    def validate(self) -> None:
        if not isinstance(self.master_seed, int):
            raise ConfigError("seeds.master_seed", "must be an integer")
        if self.shuffle_seed is not None and not isinstance(self.shuffle_seed, int):
            raise ConfigError("seeds.shuffle_seed", "must be an integer or null")

    @property
    def resolved_shuffle_seed(self) -> int:
        return self.master_seed + 1 if self.shuffle_seed is None else self.shuffle_seed


@dataclass(frozen=True)
class OutputBlock:
    dir: str = "out"

    def validate(self) -> None:
        if not self.dir:
            raise ConfigError("output.dir", "must be a non-empty path")


@dataclass(frozen=True)
class ExperimentConfig:
    dataset: DatasetConfig = field(default_factory=DatasetConfig)
    lstm: LstmBlock = field(default_factory=LstmBlock)
    gate: GateBlock = field(default_factory=GateBlock)
    walkforward: WalkforwardBlock = field(default_factory=WalkforwardBlock)
    seeds: SeedsBlock = field(default_factory=SeedsBlock)
    output: OutputBlock = field(default_factory=OutputBlock)

    def validate(self) -> None:
        self.dataset.validate()
        self.lstm.validate()
        self.gate.validate()
        self.walkforward.validate()
        self.seeds.validate()
        self.output.validate()
        if self.walkforward.init_train + self.walkforward.val_len > self.dataset.days:
            raise ConfigError(
                "walkforward.init_train",
                f"first fold [{self.walkforward.init_train} train + "
                f"{self.walkforward.val_len} valid] exceeds {self.dataset.days} days",
            )
        if self.walkforward.init_train < self.lstm.window + 1:
            raise ConfigError(
                "walkforward.init_train",
                f"training window must cover window+1 = {self.lstm.window + 1} days",
            )

    def to_dict(self) -> dict:
        return {
            "dataset": {
                "n_companies": self.dataset.n_companies,
                "days": self.dataset.days,
                "mu": self.dataset.mu,
                "sigma_min": self.dataset.sigma_min,
                "sigma_max": self.dataset.sigma_max,
                "sigma_threshold": self.dataset.sigma_threshold,
                "p0": self.dataset.p0,
            },
            "lstm": {
                "window": self.lstm.window,
                "hidden": self.lstm.hidden,
                "lr": self.lstm.lr,
                "batch": self.lstm.batch,
                "epochs": self.lstm.epochs,
                "patience": self.lstm.patience,
                "val_fraction": self.lstm.val_fraction,
                "clip_norm": self.lstm.clip_norm,
            },
            "gate": {
                "weights_volatile": list(self.gate.weights_volatile),
                "weights_stable": list(self.gate.weights_stable),
                "rnn_expert_pool": self.gate.rnn_expert_pool,
            },
            "walkforward": {
                "init_train": self.walkforward.init_train,
                "val_len": self.walkforward.val_len,
                "step": self.walkforward.step,
            },
            "seeds": {
                "master_seed": self.seeds.master_seed,
                "shuffle_seed": self.seeds.shuffle_seed,
            },
            "output": {"dir": self.output.dir},
        }

    def config_hash(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True)
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()

    def with_seed(self, master_seed: int) -> "ExperimentConfig":
        """Override the master seed, keeping shuffle_seed derivation."""
        return replace(self, seeds=replace(self.seeds, master_seed=master_seed))

    def with_gate_override(self, w_rnn: float, w_lm: float) -> "ExperimentConfig":
        """Force both classes to one weight pair (the CLI --gate-override)."""
        pair = (w_rnn, w_lm)
        return replace(
            self,
            gate=replace(self.gate, weights_volatile=pair, weights_stable=pair),
        )


_SCHEMA = {
    "dataset": {
        "n_companies": int,
        "days": int,
        "mu": float,
        "sigma_min": float,
        "sigma_max": float,
        "sigma_threshold": float,
        "p0": float,
    },
    "lstm": {
        "window": int,
        "hidden": int,
        "lr": float,
        "batch": int,
        "epochs": int,
        "patience": int,
        "val_fraction": float,
        "clip_norm": float,
    },
    "gate": {
        "weights_volatile": "weights",
        "weights_stable": "weights",
        "rnn_expert_pool": str,
    },
    "walkforward": {"init_train": int, "val_len": int, "step": int},
    "seeds": {"master_seed": int, "shuffle_seed": "optional_int"},
    "output": {"dir": str},
}

_BLOCK_TYPES = {
    "dataset": DatasetConfig,
    "lstm": LstmBlock,
    "gate": GateBlock,
    "walkforward": WalkforwardBlock,
    "seeds": SeedsBlock,
    "output": OutputBlock,
}


def _coerce(path: str, kind, value):
    if kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(path, f"expected an integer, got {value!r}")
        return value
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(path, f"expected a number, got {value!r}")
        if not np.isfinite(value):
            raise ConfigError(path, f"must be finite, got {value!r}")
        return float(value)
    if kind is str:
        if not isinstance(value, str):
            raise ConfigError(path, f"expected a string, got {value!r}")
        return value
    if kind == "optional_int":
        if value is None:
            return None
        return _coerce(path, int, value)
    if kind == "weights":
        if (
            not isinstance(value, (list, tuple))
            or len(value) != 2
            or any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in value)
        ):
            raise ConfigError(path, f"expected a [w_rnn, w_lm] pair, got {value!r}")
        return (float(value[0]), float(value[1]))
    raise AssertionError(f"unhandled schema kind {kind!r}")


def from_dict(raw: dict) -> ExperimentConfig:
    """Build and validate a config from parsed JSON; rejects unknown keys."""
    if not isinstance(raw, dict):
        raise ConfigError("<root>", "top level must be an object")
    for key in raw:
        if key not in _SCHEMA:
            raise ConfigError(key, "unknown configuration block")
    blocks = {}
    for block_name, fields in _SCHEMA.items():
        payload = raw.get(block_name, {})
        if not isinstance(payload, dict):
            raise ConfigError(block_name, "block must be an object")
        for key in payload:
            if key not in fields:
                raise ConfigError(f"{block_name}.{key}", "unknown key")
        kwargs = {}
        for key, kind in fields.items():
            if key in payload:
                kwargs[key] = _coerce(f"{block_name}.{key}", kind, payload[key])
        blocks[block_name] = _BLOCK_TYPES[block_name](**kwargs)
    cfg = ExperimentConfig(**blocks)
    cfg.validate()
    return cfg


def load_config(path) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError("<file>", f"invalid JSON in {path}: {exc}") from exc
    return from_dict(raw)


def default_config() -> ExperimentConfig:
    """The paper-faithful configuration."""
    cfg = ExperimentConfig()
    cfg.validate()
    return cfg


def extended_config() -> ExperimentConfig:
    """A 200-day variant whose walk-forward schedule has six folds."""
    cfg = ExperimentConfig(dataset=DatasetConfig(days=200))
    cfg.validate()
    return cfg
