"""Mini-batch Adam training of a band selector and final band ranking.

One epoch is a full pass over the shuffled sample set. Each step computes
band weights for the batch, re-weights the batch, reconstructs, and updates
both branches by one Adam step on the regularized reconstruction loss.
After the last epoch the band weights are averaged over the complete sample
set (not the last batch) and the bands are ranked by that average.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from bandsel.errors import ConfigError, DimensionError, NumericError
from bandsel.models import build_selector
from bandsel.nn import AdamState, adam_step
from bandsel.selection import select_top_k

DEFAULT_BATCH = {"fc": 64, "conv": 32}


@dataclass
class TrainConfig:
    """Hyperparameters of one training run.

    Defaults follow the reference setting: L1 coefficient 1e-2, learning
    rate 2e-3, 100 epochs. ``batch_size=None`` resolves per variant
    (64 spectral, 32 spectral-spatial).
    """

    l1_coeff: float = 1e-2
    learning_rate: float = 2e-3
    max_epochs: int = 100
    batch_size: int | None = None
    seed: int = 0

    def __post_init__(self):
        if self.l1_coeff < 0:
            raise ConfigError(f"l1 coefficient must be >= 0, got {self.l1_coeff}")
        if self.learning_rate <= 0:
            raise ConfigError(f"learning rate must be positive, got {self.learning_rate}")
        if self.max_epochs < 1:
            raise ConfigError(f"epoch count must be >= 1, got {self.max_epochs}")
        if self.batch_size is not None and self.batch_size < 1:
            raise ConfigError(f"batch size must be >= 1, got {self.batch_size}")

    def snapshot(self, **extra):
        base = {
            "l1_coeff": self.l1_coeff,
            "learning_rate": self.learning_rate,
            "max_epochs": self.max_epochs,
            "batch_size": self.batch_size,
            "seed": self.seed,
        }
        base.update(extra)
        return base


def _full_averaged_weights(model, samples, chunk=1024):
    """Mean band weight over every sample, evaluated in chunks."""
    total = np.zeros(model.bands)
    for start in range(0, samples.shape[0], chunk):
        part = samples[start : start + chunk]
        total += model.band_weights(part).sum(axis=0)
    return total / samples.shape[0]


def train(sample_set, variant, cfg, *, k=None, record_weights=True, model_kwargs=None):
    """Run the full selection procedure on a sample set.

    Returns (model, SelectionResult). ``k`` defaults to the band count so
    ``top_k`` equals the full ranking unless a subset size is requested.
    """
    samples = np.asarray(getattr(sample_set, "samples", sample_set), dtype=np.float64)
    if samples.shape[0] < 1:
        raise DimensionError("sample set is empty")
    bands = samples.shape[-1]
    if k is None:
        k = bands
    if not 1 <= k <= bands:
        raise ConfigError(f"k must be in [1, {bands}], got {k}")
    batch_size = cfg.batch_size if cfg.batch_size is not None else DEFAULT_BATCH.get(variant, 64)

    rng = np.random.default_rng(cfg.seed)
    model = build_selector(variant, bands, rng=rng, **(model_kwargs or {}))
    state = AdamState(model.parameters())
    names = model.parameter_names()

    n = samples.shape[0]
    loss_trace = []
    weights_history = [] if record_weights else None
    for epoch in range(1, cfg.max_epochs + 1):
        if record_weights:
            # Snapshot as the epoch begins; the first row shows the
            # near-uniform initialization, the usual heatmap convention.
            weights_history.append(_full_averaged_weights(model, samples))
        order = rng.permutation(n)
        epoch_loss = 0.0
        for start in range(0, n, batch_size):
            batch = samples[order[start : start + batch_size]]
            loss, _, _ = model.backprop(batch, cfg.l1_coeff)
            if not np.isfinite(loss):
                raise NumericError(f"non-finite training loss at epoch {epoch}")
            try:
                adam_step(model.parameters(), model.gradients(), state, cfg.learning_rate, names=names)
            except NumericError as exc:
                raise NumericError(f"{exc} at epoch {epoch}") from exc
            epoch_loss += loss * batch.shape[0]
        loss_trace.append(epoch_loss / n)

    # Final weights always come from one full pass over every sample.
    averaged = _full_averaged_weights(model, samples)
    history = np.stack(weights_history) if record_weights else None

    config = cfg.snapshot(
        variant=variant,
        bands=bands,
        k=k,
        batch_size=batch_size,
        kind=getattr(sample_set, "kind", "array"),
        window=getattr(sample_set, "window", None),
        stride=getattr(sample_set, "stride", None),
    )
    result = select_top_k(averaged, k, loss_trace=loss_trace, config=config, weights_history=history)
    return model, result
