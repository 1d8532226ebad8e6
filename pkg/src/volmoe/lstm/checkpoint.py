"""Versioned parameter checkpoints.

NPZ keeps the float64 weights bit-exact, so a reloaded model reproduces
predictions exactly. The flat vector is stored in the declared block order
(gate weights, gate biases, output weights, output bias) together with the
dimensions and a hash of the training configuration.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict

import numpy as np

from ..errors import CheckpointError
from .params import LstmParams, n_params
from .training import TrainConfig

FORMAT_NAME = "volmoe.lstm-checkpoint"
FORMAT_VERSION = 1


def config_hash(cfg: TrainConfig | None) -> str:
    if cfg is None:
        return ""
    blob = json.dumps(asdict(cfg), sort_keys=True)
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def save_checkpoint(params: LstmParams, path, train_config: TrainConfig | None = None) -> None:
    np.savez(
        path,
        format=FORMAT_NAME,
        version=FORMAT_VERSION,
        hidden_size=params.hidden_size,
        input_size=params.input_size,
        flat=params.flat,
        config_hash=config_hash(train_config),
    )


def load_checkpoint(path) -> tuple[LstmParams, dict]:
    """Load a checkpoint; returns the params and a metadata dict."""
    with np.load(path, allow_pickle=False) as data:
        try:
            fmt = str(data["format"])
            version = int(data["version"])
            hidden = int(data["hidden_size"])
            input_size = int(data["input_size"])
            flat = np.array(data["flat"], dtype=np.float64)
            cfg_hash = str(data["config_hash"])
        except KeyError as exc:
            raise CheckpointError(f"missing checkpoint field {exc}") from exc
    if fmt != FORMAT_NAME:
        raise CheckpointError(f"unsupported checkpoint format {fmt!r}")
    if version != FORMAT_VERSION:
        raise CheckpointError(
            f"checkpoint version {version} not supported (expected {FORMAT_VERSION})"
        )
    if flat.shape != (n_params(hidden, input_size),):
        raise CheckpointError(
            f"weight vector shape {flat.shape} inconsistent with dimensions "
            f"({hidden}, {input_size})"
        )
    params = LstmParams(hidden_size=hidden, input_size=input_size, flat=flat)
    return params, {"config_hash": cfg_hash, "version": version}
