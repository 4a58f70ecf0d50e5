"""Band-selector networks: attention branch, band re-weighting, reconstruction branch.

Both variants share one computation graph. The attention branch maps a sample
to a per-band weight vector through a sigmoid gate, the input is multiplied
band-wise by those weights, and the reconstruction branch maps the re-weighted
sample back to the original spectrum. Training minimizes mean squared
reconstruction error plus an L1 penalty on the weights, so bands that the
reconstruction cannot do without keep large weights while redundant bands are
driven toward zero.

The spectral variant consumes flat spectra [S, bands]; the spectral-spatial
variant consumes square patches [S, a, a, bands] and broadcasts each sample's
weight vector across the patch.
"""

from __future__ import annotations

import numpy as np

from bandsel.errors import ConfigError, DimensionError
from bandsel.nn import Conv2DLayer, DenseLayer, Flatten, GlobalAveragePool, LayerStack


def reweight(batch, weights):
    """Band-wise product of a sample batch with per-sample band weights.

    ``batch`` is [S, b] or [S, a, a, b]; ``weights`` is [S, b] and broadcasts
    across the spatial extent in the patch case.
    """
    batch = np.asarray(batch, dtype=np.float64)
    weights = np.asarray(weights, dtype=np.float64)
    if weights.ndim != 2 or batch.shape[0] != weights.shape[0] or batch.shape[-1] != weights.shape[1]:
        raise DimensionError(
            f"weights {tuple(weights.shape)} do not match batch {tuple(batch.shape)}"
        )
    if batch.ndim == 2:
        return batch * weights
    if batch.ndim == 4:
        return batch * weights[:, None, None, :]
    raise DimensionError(f"batch must be [S, b] or [S, a, a, b], got {tuple(batch.shape)}")


def reconstruction_loss(x, x_hat, weights, l1_coeff):
    """Batch-mean squared-error plus L1 penalty on the band weights.

    Returns (1 / 2S) * sum_i ||x_i - x_hat_i||^2 + l1_coeff * (1 / S) * sum_i ||w_i||_1
    over a batch of S samples.
    """
    if l1_coeff < 0:
        raise ConfigError(f"l1 coefficient must be non-negative, got {l1_coeff}")
    x = np.asarray(x, dtype=np.float64)
    x_hat = np.asarray(x_hat, dtype=np.float64)
    if x.shape != x_hat.shape:
        raise DimensionError(f"reconstruction shape {x_hat.shape} does not match input {x.shape}")
    n = x.shape[0]
    mse = 0.5 * np.sum((x - x_hat) ** 2) / n
    l1 = np.sum(np.abs(weights)) / n
    return mse + l1_coeff * l1


class _BandSelector:
    """Shared forward/backward plumbing for both selector variants."""

    kind = ""

    def __init__(self, bands, bam, rec):
        self.bands = int(bands)
        self.bam = bam
        self.rec = rec
        last = bam.layers[-1]
        if getattr(last, "activation", None) != "sigmoid" or getattr(last, "out_dim", None) != self.bands:
            raise ConfigError("attention branch must end in a sigmoid layer of width = band count")

    def band_weights(self, batch):
        """Per-sample band weights in (0, 1): one sigmoid-gated vector per sample."""
        return self.bam.forward(batch)

    def reconstruct(self, reweighted):
        """Map a re-weighted batch back to spectra shaped like the original input."""
        return self.rec.forward(reweighted)

    def forward(self, batch):
        """Full pass; returns (per-sample weights [S, b], reconstruction like batch)."""
        batch = self._check_batch(batch)
        weights = self.band_weights(batch)
        x_hat = self.reconstruct(reweight(batch, weights))
        return weights, x_hat

    def backprop(self, batch, l1_coeff):
        """Forward plus backward pass of the full training objective.

        Assigns gradients on every layer and returns
        (loss, per-sample weights, gradient with respect to the batch).
        """
        batch = self._check_batch(batch)
        weights, x_hat = self.forward(batch)
        n = batch.shape[0]
        resid = x_hat - batch
        loss = (0.5 * np.sum(resid ** 2) + l1_coeff * np.sum(np.abs(weights))) / n
        d_xhat = resid / n
        d_z = self.rec.backward(d_xhat)
        # z = x * w: route the product-rule gradients to both factors.
        if batch.ndim == 4:
            d_weights = np.sum(d_z * batch, axis=(1, 2))
            d_x_direct = d_z * weights[:, None, None, :]
        else:
            d_weights = d_z * batch
            d_x_direct = d_z * weights
        d_weights = d_weights + l1_coeff * np.sign(weights) / n
        d_x_bam = self.bam.backward(d_weights)
        # The batch is also the regression target, so its gradient carries
        # the -residual term alongside the two network paths.
        return loss, weights, d_x_direct + d_x_bam - d_xhat

    def loss(self, batch, l1_coeff):
        weights, x_hat = self.forward(batch)
        return reconstruction_loss(batch, x_hat, weights, l1_coeff)

    def parameters(self):
        return self.bam.parameters() + self.rec.parameters()

    def gradients(self):
        return self.bam.gradients() + self.rec.gradients()

    def parameter_names(self):
        return self.bam.parameter_names("bam.") + self.rec.parameter_names("rec.")

    def _check_batch(self, batch):
        batch = np.asarray(batch, dtype=np.float64)
        if batch.shape[-1] != self.bands:
            raise DimensionError(
                f"batch has {batch.shape[-1]} bands but model expects {self.bands}"
            )
        return batch


class BandSelectorFC(_BandSelector):
    """Spectral selector: dense attention and reconstruction stacks over pixel vectors.

    Default widths follow the reference configuration (attention 64-128,
    reconstruction 64-128-256); both are configurable per data set.
    """

    kind = "fc"

    def __init__(self, bands, bam_hidden=(64, 128), rec_hidden=(64, 128, 256), *, rng=None):
        rng = np.random.default_rng() if rng is None else rng
        bam_dims = [bands, *bam_hidden, bands]
        bam = LayerStack([
            DenseLayer(bam_dims[i], bam_dims[i + 1],
                       "sigmoid" if i == len(bam_dims) - 2 else "relu", rng=rng)
            for i in range(len(bam_dims) - 1)
        ])
        rec_dims = [bands, *rec_hidden, bands]
        rec = LayerStack([
            DenseLayer(rec_dims[i], rec_dims[i + 1],
                       "sigmoid" if i == len(rec_dims) - 2 else "relu", rng=rng)
            for i in range(len(rec_dims) - 1)
        ])
        super().__init__(bands, bam, rec)

    def _check_batch(self, batch):
        batch = super()._check_batch(batch)
        if batch.ndim != 2:
            raise DimensionError(f"spectral selector expects [S, {self.bands}], got {tuple(batch.shape)}")
        return batch


class BandSelectorConv(_BandSelector):
    """Spectral-spatial selector over patches [S, a, a, bands].

    Attention: 3x3 conv, global average pool, two dense layers ending in a
    sigmoid of width = band count. Reconstruction: conv encoder, transposed
    conv decoder, 1x1 sigmoid head; stride 1 everywhere so patch shape is
    preserved end to end.
    """

    kind = "conv"

    def __init__(self, bands, bam_conv_channels=64, bam_hidden=128,
                 rec_channels=(128, 64, 64, 128), *, rng=None):
        rng = np.random.default_rng() if rng is None else rng
        bam = LayerStack([
            Conv2DLayer(bands, bam_conv_channels, 3, activation="relu", rng=rng),
            GlobalAveragePool(),
            Flatten(),
            DenseLayer(bam_conv_channels, bam_hidden, "relu", rng=rng),
            DenseLayer(bam_hidden, bands, "sigmoid", rng=rng),
        ])
        c1, c2, c3, c4 = rec_channels
        rec = LayerStack([
            Conv2DLayer(bands, c1, 3, activation="relu", rng=rng),
            Conv2DLayer(c1, c2, 3, activation="relu", rng=rng),
            Conv2DLayer(c2, c3, 3, activation="relu", transposed=True, rng=rng),
            Conv2DLayer(c3, c4, 3, activation="relu", transposed=True, rng=rng),
            Conv2DLayer(c4, bands, 1, activation="sigmoid", rng=rng),
        ])
        super().__init__(bands, bam, rec)

    def _check_batch(self, batch):
        batch = super()._check_batch(batch)
        if batch.ndim != 4 or batch.shape[1] != batch.shape[2]:
            raise DimensionError(
                f"patch selector expects [S, a, a, {self.bands}], got {tuple(batch.shape)}"
            )
        return batch


def build_selector(variant, bands, *, rng=None, **kwargs):
    """Construct a selector by variant name ('fc' or 'conv')."""
    if variant == "fc":
        return BandSelectorFC(bands, rng=rng, **kwargs)
    if variant == "conv":
        return BandSelectorConv(bands, rng=rng, **kwargs)
    raise ConfigError(f"unknown variant {variant!r}; expected 'fc' or 'conv'")
