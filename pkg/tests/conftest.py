"""Shared helpers for building synthetic datasets in tests."""

from __future__ import annotations

import numpy as np

from relaylearn import Dataset, LinkSample

_DEFAULTS = dict(
    link_id=0,
    distance_m=10.0,
    freq_ghz=28.0,
    tx_power_dbm=30.0,
    rx_power_dbm=-70.0,
    rms_delay_ns=50.0,
    num_paths=5,
    aoa_spread_deg=30.0,
    aod_spread_deg=30.0,
    path_loss_db=100.0,
    label=1,
)


def link(**overrides) -> LinkSample:
    """A LinkSample with sensible defaults, overridable per field."""
    fields = dict(_DEFAULTS)
    fields.update(overrides)
    return LinkSample(**fields)


def make_dataset(X, y, feature_names=("distance_m", "rx_power_dbm")) -> Dataset:
    """Wrap a feature matrix and label vector in a Dataset, storing column j
    of X in feature_names[j] of each sample."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y).astype(int)
    names = tuple(feature_names)
    assert X.shape == (len(y), len(names))
    samples = []
    for i, (row, lbl) in enumerate(zip(X, y)):
        overrides = {name: float(v) for name, v in zip(names, row)}
        samples.append(link(link_id=i, label=int(lbl), **overrides))
    return Dataset(tuple(samples), names)


def max_rel_grad_error(layers, X, y, h=1e-5):
    """Worst relative error between analytic gradients and central finite
    differences of the mean clamped-BCE loss, over every parameter."""
    from relaylearn import mlp

    def loss_fn():
        return float(np.mean(mlp.bce_loss(mlp.forward(layers, X), y)))

    grads = mlp.backward(layers, X, y)
    worst = 0.0
    for li, layer in enumerate(layers):
        for arr, grad in ((layer.weights, grads[li][0]), (layer.biases, grads[li][1])):
            flat = arr.reshape(-1)
            gflat = np.asarray(grad).reshape(-1)
            for k in range(flat.size):
                orig = flat[k]
                flat[k] = orig + h
                lp = loss_fn()
                flat[k] = orig - h
                lm = loss_fn()
                flat[k] = orig
                fd = (lp - lm) / (2.0 * h)
                rel = abs(fd - gflat[k]) / max(abs(fd) + abs(gflat[k]), 1e-6)
                worst = max(worst, rel)
    return worst


def sample_safe_batch(layers, rng, n, margin=1e-3, max_tries=500):
    """Draw a batch whose hidden pre-activations all sit at least ``margin``
    away from the relu kink (and whose output stays unsaturated), so finite
    differences with h << margin never cross a non-smooth point."""
    d = layers[0].weights.shape[1]
    for _ in range(max_tries):
        X = rng.normal(size=(n, d))
        a = X
        ok = True
        for layer in layers:
            z = a @ layer.weights.T + layer.biases
            if layer.activation.value == "relu" and np.min(np.abs(z)) < margin:
                ok = False
                break
            if layer.activation.value == "sigmoid" and np.max(np.abs(z)) > 25.0:
                ok = False
                break
            a = np.maximum(z, 0.0) if layer.activation.value == "relu" else z
        if ok:
            return X
    raise AssertionError("could not sample a kink-free batch")
