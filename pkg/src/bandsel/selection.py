"""Band-weight averaging, top-k ranking, and result serialization."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from bandsel.errors import ConfigError, DimensionError


@dataclass
class BandWeights:
    """Per-sample sigmoid band weights [S, b] and their per-band mean [b]."""

    per_sample: np.ndarray
    averaged: np.ndarray

    @classmethod
    def from_per_sample(cls, per_sample):
        per_sample = np.asarray(per_sample, dtype=np.float64)
        return cls(per_sample=per_sample, averaged=average_band_weights(per_sample))


def average_band_weights(per_sample):
    """Mean weight per band over all samples: [S, b] -> [b]."""
    per_sample = np.asarray(per_sample, dtype=np.float64)
    if per_sample.ndim != 2 or per_sample.shape[0] < 1:
        raise DimensionError(f"expected non-empty [S, b] weights, got shape {tuple(per_sample.shape)}")
    return per_sample.mean(axis=0)


@dataclass
class SelectionResult:
    """Ranked bands with the evidence behind the ranking.

    ``ranking`` is a permutation of all band indices sorted by descending
    averaged weight (ties go to the lower band index); ``top_k`` is its
    length-k prefix. ``loss_trace`` holds one training loss per epoch and
    ``weights_history`` optionally one averaged-weight row per epoch,
    snapshotted as the epoch begins (so the first row reflects the
    initialization, heatmap-style).
    """

    ranking: list[int]
    top_k: list[int]
    averaged_weights: np.ndarray
    loss_trace: list[float] = field(default_factory=list)
    config: dict = field(default_factory=dict)
    weights_history: np.ndarray | None = None

    def to_json(self):
        """Serialize the result (without weights history) to a JSON string."""
        payload = {
            "ranking": [int(i) for i in self.ranking],
            "top_k": [int(i) for i in self.top_k],
            "averaged_weights": [float(w) for w in self.averaged_weights],
            "loss_trace": [float(v) for v in self.loss_trace],
            "config": self.config,
        }
        return json.dumps(payload, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text):
        payload = json.loads(text)
        return cls(
            ranking=list(payload["ranking"]),
            top_k=list(payload["top_k"]),
            averaged_weights=np.asarray(payload["averaged_weights"], dtype=np.float64),
            loss_trace=list(payload["loss_trace"]),
            config=dict(payload.get("config", {})),
        )

    def save_json(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_json())
            fh.write("\n")

    @classmethod
    def load_json(cls, path):
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_json(fh.read())

    def weights_history_csv(self):
        """Epoch-by-band CSV of averaged weights (header: epoch,band_0,...)."""
        if self.weights_history is None:
            raise ConfigError("selection result carries no weights history")
        hist = np.asarray(self.weights_history, dtype=np.float64)
        bands = hist.shape[1]
        lines = ["epoch," + ",".join(f"band_{j}" for j in range(bands))]
        for epoch, row in enumerate(hist, start=1):
            lines.append(f"{epoch}," + ",".join(repr(float(v)) for v in row))
        return "\n".join(lines) + "\n"

    def save_weights_history_csv(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.weights_history_csv())

    def loss_trace_csv(self):
        lines = ["epoch,loss"]
        for epoch, value in enumerate(self.loss_trace, start=1):
            lines.append(f"{epoch},{float(value)!r}")
        return "\n".join(lines) + "\n"

    def save_loss_trace_csv(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.loss_trace_csv())


def select_top_k(averaged, k, *, loss_trace=None, config=None, weights_history=None):
    """Rank bands by descending averaged weight and keep the first k.

    Ties break toward the smaller band index. The full ranking (a
    permutation of 0..b-1) is retained alongside the k-prefix.
    """
    averaged = np.asarray(averaged, dtype=np.float64)
    if averaged.ndim != 1:
        raise DimensionError(f"averaged weights must be 1-D, got shape {tuple(averaged.shape)}")
    bands = averaged.shape[0]
    if not 1 <= k <= bands:
        raise ConfigError(f"k must be in [1, {bands}], got {k}")
    ranking = np.argsort(-averaged, kind="stable")
    return SelectionResult(
        ranking=[int(i) for i in ranking],
        top_k=[int(i) for i in ranking[:k]],
        averaged_weights=averaged,
        loss_trace=list(loss_trace) if loss_trace is not None else [],
        config=dict(config) if config is not None else {},
        weights_history=weights_history,
    )
