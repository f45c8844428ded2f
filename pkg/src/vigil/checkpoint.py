"""Versioned, byte-stable checkpoint files.

A checkpoint is a single JSON document with canonical key order and all
arrays embedded as base64-encoded little-endian buffers (float64 for
parameters, int64 for sample counts). Saving the same state twice, or
loading and resaving, produces byte-identical files on any platform.
"""

from __future__ import annotations

import base64
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .belief import SampleStore
from .environment import ProcessSet
from .nets import DenseNet, LayerSpec

FORMAT_VERSION = 1
_KIND = "vigil-checkpoint"


class CheckpointError(ValueError):
    """Raised for unreadable, mismatched, or corrupt checkpoint files."""


def _encode(arr: np.ndarray, dtype: str) -> str:
    return base64.b64encode(np.ascontiguousarray(arr).astype(dtype).tobytes()).decode("ascii")


def _decode(data: str, dtype: str, shape: tuple[int, ...]) -> np.ndarray:
    return np.frombuffer(base64.b64decode(data), dtype=dtype).reshape(shape).copy()


def _net_to_dict(net: DenseNet) -> dict:
    return {
        "layers": [
            {"in": s.input_dim, "out": s.output_dim, "activation": s.activation}
            for s in net.layers
        ],
        "learning_rate": net.learning_rate,
        "lr_decay": net.lr_decay,
        "weights": [_encode(w, "<f8") for w in net.weights],
        "biases": [_encode(b, "<f8") for b in net.biases],
    }


def _net_from_dict(data: dict) -> DenseNet:
    layers = [LayerSpec(d["in"], d["out"], d["activation"]) for d in data["layers"]]
    net = DenseNet(layers, data["learning_rate"], data["lr_decay"])
    net.weights = [
        _decode(enc, "<f8", (s.output_dim, s.input_dim))
        for enc, s in zip(data["weights"], layers)
    ]
    net.biases = [_decode(enc, "<f8", (s.output_dim,)) for enc, s in zip(data["biases"], layers)]
    return net


@dataclass
class Checkpoint:
    """Trained state plus the resolved config that produced it."""

    config: dict
    episodes_trained: int
    actor: DenseNet
    critic: DenseNet
    store: SampleStore
    rng_state: dict

    @property
    def processes(self) -> ProcessSet:
        env = self.config["environment"]
        return ProcessSet(
            count=env["processes"],
            abnormal_probs=tuple(env["abnormal_probs"]),
            flip_prob=env["flip_prob"],
        )

    def to_bytes(self) -> bytes:
        n_sensors, n_hypotheses = self.store.n_total.shape
        doc = {
            "kind": _KIND,
            "format_version": FORMAT_VERSION,
            "config": self.config,
            "episodes_trained": self.episodes_trained,
            "actor": _net_to_dict(self.actor),
            "critic": _net_to_dict(self.critic),
            "store": {
                "n_sensors": n_sensors,
                "n_hypotheses": n_hypotheses,
                "n_total": _encode(self.store.n_total, "<i8"),
                "n_ones": _encode(self.store.n_ones, "<i8"),
            },
            "rng_state": self.rng_state,
        }
        return json.dumps(doc, sort_keys=True, separators=(",", ":")).encode("ascii")

    def save(self, path: str | Path) -> None:
        Path(path).write_bytes(self.to_bytes())

    @classmethod
    def load(cls, path: str | Path) -> "Checkpoint":
        path = Path(path)
        if not path.exists():
            raise CheckpointError(f"checkpoint file not found: {path}")
        try:
            doc = json.loads(path.read_bytes())
        except (ValueError, UnicodeDecodeError) as exc:
            raise CheckpointError(f"cannot parse checkpoint {path}: {exc}") from exc
        if not isinstance(doc, dict) or doc.get("kind") != _KIND:
            raise CheckpointError(f"{path} is not a vigil checkpoint")
        if doc.get("format_version") != FORMAT_VERSION:
            raise CheckpointError(
                f"checkpoint format version {doc.get('format_version')} is not supported "
                f"(this build reads version {FORMAT_VERSION})"
            )
        store_doc = doc["store"]
        shape = (store_doc["n_sensors"], store_doc["n_hypotheses"])
        store = SampleStore(*shape)
        store.n_total = _decode(store_doc["n_total"], "<i8", shape)
        store.n_ones = _decode(store_doc["n_ones"], "<i8", shape)
        return cls(
            config=doc["config"],
            episodes_trained=doc["episodes_trained"],
            actor=_net_from_dict(doc["actor"]),
            critic=_net_from_dict(doc["critic"]),
            store=store,
            rng_state=doc["rng_state"],
        )
