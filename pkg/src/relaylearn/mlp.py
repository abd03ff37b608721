"""From-scratch feed-forward binary classifier: forward pass, backprop,
Adam optimization, early stopping, and the six architecture presets."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from enum import Enum
from typing import ClassVar, Sequence

import numpy as np

from .dataset import (
    Dataset,
    Normalizer,
    as_samples,
    extract_features,
    fit_normalizer,
    labels_array,
)
from .rng import splitmix64

EPS_CLAMP = 1e-12

# Distinct stream for per-epoch batch shuffling so it never aliases the
# weight-initialization stream.
_SHUFFLE_SALT = 0x42D5_51AB_0F1C_7E93


class Activation(Enum):
    RELU = "relu"
    SIGMOID = "sigmoid"
    STEP = "step"  # inference-only: not differentiable, rejected by training


TRAINABLE_ACTIVATIONS = (Activation.RELU, Activation.SIGMOID)


def sigmoid(z):
    """Numerically stable logistic function."""
    z = np.asarray(z, dtype=np.float64)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def relu(z):
    return np.maximum(np.asarray(z, dtype=np.float64), 0.0)


def step_activation(x):
    """Hard threshold: 0 for x < 0, 1 for x >= 0."""
    return np.where(np.asarray(x, dtype=np.float64) < 0.0, 0, 1)


def _apply_activation(act: Activation, z: np.ndarray) -> np.ndarray:
    if act is Activation.RELU:
        return relu(z)
    if act is Activation.SIGMOID:
        return sigmoid(z)
    return step_activation(z).astype(np.float64)


def _activation_grad(act: Activation, z: np.ndarray, a: np.ndarray) -> np.ndarray:
    if act is Activation.RELU:
        return (z > 0.0).astype(np.float64)
    if act is Activation.SIGMOID:
        return a * (1.0 - a)
    raise ValueError("step activation is not differentiable")


@dataclass
class Layer:
    """Dense layer: weights (fan_out, fan_in), biases (fan_out,), activation."""

    weights: np.ndarray
    biases: np.ndarray
    activation: Activation


@dataclass(frozen=True)
class MLPArchitecture:
    input_dim: int
    hidden_sizes: tuple[int, ...]
    output_dim: int = 1

    def __post_init__(self) -> None:
        object.__setattr__(self, "hidden_sizes", tuple(int(h) for h in self.hidden_sizes))
        sizes = (self.input_dim, *self.hidden_sizes, self.output_dim)
        if any(s < 1 for s in sizes):
            raise ValueError(f"all layer sizes must be >= 1, got {sizes}")

    def to_dict(self) -> dict:
        return {
            "input_dim": self.input_dim,
            "hidden_sizes": list(self.hidden_sizes),
            "output_dim": self.output_dim,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MLPArchitecture":
        return cls(d["input_dim"], tuple(d["hidden_sizes"]), d.get("output_dim", 1))


# Hidden-layer presets m1..m6, smallest to deepest.
PRESETS: dict[str, tuple[int, ...]] = {
    "m1": (10,),
    "m2": (50, 10),
    "m3": (10, 50, 10),
    "m4": (10, 50, 50, 10),
    "m5": (10, 50, 100, 50, 10),
    "m6": (10, 50, 100, 100, 50, 10),
}

DEFAULT_LEARNING_RATE = 0.05
# m1 is deliberately trained with a tiny step size; it is the weak baseline.
PRESET_LEARNING_RATES: dict[str, float] = {"m1": 1e-5}


def preset_architecture(name: str, input_dim: int) -> MLPArchitecture:
    if name not in PRESETS:
        raise ValueError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    return MLPArchitecture(input_dim, PRESETS[name])


def preset_learning_rate(name: str) -> float:
    return PRESET_LEARNING_RATES.get(name, DEFAULT_LEARNING_RATE)


@dataclass(frozen=True)
class TrainConfig:
    # batch_size 200 keeps the aggressive 0.05 step size stable on the deep
    # presets; smaller batches make them collapse to the base rate.
    learning_rate: float = DEFAULT_LEARNING_RATE
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    max_epochs: int = 300
    batch_size: int = 200
    tol: float = 1e-4
    n_iter_no_change: int = 10
    seed: int = 0

    def __post_init__(self) -> None:
        if not self.learning_rate > 0.0:
            raise ValueError(f"learning_rate must be > 0, got {self.learning_rate}")
        if not (0.0 <= self.beta1 < 1.0 and 0.0 <= self.beta2 < 1.0):
            raise ValueError("beta1 and beta2 must lie in [0, 1)")
        if not self.tol >= 0.0:
            raise ValueError(f"tol must be >= 0, got {self.tol}")
        if self.max_epochs < 1 or self.batch_size < 1 or self.n_iter_no_change < 1:
            raise ValueError("max_epochs, batch_size, n_iter_no_change must be >= 1")

    def to_dict(self) -> dict:
        return {
            "learning_rate": self.learning_rate,
            "beta1": self.beta1,
            "beta2": self.beta2,
            "eps": self.eps,
            "max_epochs": self.max_epochs,
            "batch_size": self.batch_size,
            "tol": self.tol,
            "n_iter_no_change": self.n_iter_no_change,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TrainConfig":
        return cls(**d)


def init_layers(arch: MLPArchitecture, seed: int) -> list[Layer]:
    """Glorot-uniform weights in +-sqrt(6 / (fan_in + fan_out)), zero biases.

    Hidden layers get relu, the output layer sigmoid.
    """
    rng = np.random.default_rng(seed)
    sizes = (arch.input_dim, *arch.hidden_sizes, arch.output_dim)
    layers = []
    for i in range(len(sizes) - 1):
        fan_in, fan_out = sizes[i], sizes[i + 1]
        limit = math.sqrt(6.0 / (fan_in + fan_out))
        weights = rng.uniform(-limit, limit, size=(fan_out, fan_in))
        act = Activation.SIGMOID if i == len(sizes) - 2 else Activation.RELU
        layers.append(Layer(weights, np.zeros(fan_out), act))
    return layers


def _forward_batch(layers: Sequence[Layer], X: np.ndarray) -> np.ndarray:
    a = np.asarray(X, dtype=np.float64)
    if a.ndim != 2 or a.shape[1] != layers[0].weights.shape[1]:
        raise ValueError(
            f"expected (n, {layers[0].weights.shape[1]}) inputs, got shape {a.shape}"
        )
    for layer in layers:
        a = _apply_activation(layer.activation, a @ layer.weights.T + layer.biases)
    return a[:, 0]


def forward(layers: Sequence[Layer], x) -> float | np.ndarray:
    """Network output probability for one feature vector (or a batch).

    Inputs are assumed already normalized. Returns a float for a 1-D input,
    an array of probabilities for a 2-D batch.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 1:
        return float(_forward_batch(layers, x[None, :])[0])
    return _forward_batch(layers, x)


def bce_loss(p, y):
    """Binary cross entropy -[y ln p + (1-y) ln(1-p)] with p clamped to
    [1e-12, 1 - 1e-12]. Elementwise; scalar inputs give a float."""
    p = np.clip(np.asarray(p, dtype=np.float64), EPS_CLAMP, 1.0 - EPS_CLAMP)
    y = np.asarray(y, dtype=np.float64)
    out = -(y * np.log(p) + (1.0 - y) * np.log1p(-p))
    return float(out) if out.ndim == 0 else out


def _loss_and_grads(
    layers: Sequence[Layer], X: np.ndarray, y: np.ndarray
) -> tuple[float, list[tuple[np.ndarray, np.ndarray]]]:
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    if X.ndim != 2 or X.shape[0] != y.shape[0] or X.shape[0] == 0:
        raise ValueError("batch must be a nonempty (n, d) matrix with matching labels")
    if layers[-1].activation is not Activation.SIGMOID:
        raise ValueError("output layer must use sigmoid for cross-entropy gradients")

    acts = [X]
    zs = []
    for layer in layers:
        z = acts[-1] @ layer.weights.T + layer.biases
        zs.append(z)
        acts.append(_apply_activation(layer.activation, z))
    p = acts[-1][:, 0]
    loss = float(np.mean(bce_loss(p, y)))

    n = X.shape[0]
    # Sigmoid output + mean BCE collapse to dL/dz_out = (p - y) / n.
    delta = ((p - y) / n)[:, None]
    grads: list[tuple[np.ndarray, np.ndarray]] = [None] * len(layers)  # type: ignore[list-item]
    for idx in range(len(layers) - 1, -1, -1):
        grads[idx] = (delta.T @ acts[idx], delta.sum(axis=0))
        if idx:
            delta = (delta @ layers[idx].weights) * _activation_grad(
                layers[idx - 1].activation, zs[idx - 1], acts[idx]
            )
    return loss, grads


def backward(
    layers: Sequence[Layer], X: np.ndarray, y: np.ndarray
) -> list[tuple[np.ndarray, np.ndarray]]:
    """Exact analytic gradients of the mean batch BCE loss.

    Returns one (dW, db) pair per layer, in layer order.
    """
    return _loss_and_grads(layers, X, y)[1]


class Adam:
    """Adam optimizer over a list of parameter arrays, updated in place.

    Keeps first/second moment accumulators per array; the update is
    theta -= lr * m_hat / (sqrt(v_hat) + eps) with bias-corrected moments.
    """

    def __init__(
        self,
        learning_rate: float = DEFAULT_LEARNING_RATE,
        beta1: float = 0.9,
        beta2: float = 0.999,
        eps: float = 1e-8,
    ):
        if not learning_rate > 0.0:
            raise ValueError("learning_rate must be > 0")
        self.learning_rate = learning_rate
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self._m: list[np.ndarray] | None = None
        self._v: list[np.ndarray] | None = None

    def step(self, params: Sequence[np.ndarray], grads: Sequence[np.ndarray]) -> None:
        if self._m is None:
            self._m = [np.zeros_like(p) for p in params]
            self._v = [np.zeros_like(p) for p in params]
        self.t += 1
        bc1 = 1.0 - self.beta1**self.t
        bc2 = 1.0 - self.beta2**self.t
        for p, g, m, v in zip(params, grads, self._m, self._v):
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * np.square(g)
            p -= self.learning_rate * (m / bc1) / (np.sqrt(v / bc2) + self.eps)


@dataclass
class TrainedMLP:
    """An immutable trained network plus everything needed to reproduce it."""

    architecture: MLPArchitecture
    layers: list[Layer]
    normalizer: Normalizer
    config: TrainConfig
    loss_history: list[float]
    epochs_run: int
    val_loss_history: list[float] | None = None

    score_kind: ClassVar[str] = "probability"
    decision_cutoff: ClassVar[float] = 0.5

    @property
    def feature_names(self) -> tuple[str, ...]:
        return self.normalizer.feature_names

    def predict_proba(self, data) -> np.ndarray:
        """P(strong link) for each sample; normalization applied internally."""
        X = extract_features(as_samples(data), self.feature_names)
        return _forward_batch(self.layers, self.normalizer.transform(X))

    # Uniform scoring interface shared with the baseline models.
    predict_score = predict_proba

    def predict(self, data, cutoff: float = 0.5) -> np.ndarray:
        """Class 1 iff predicted probability >= cutoff (ties go to class 1)."""
        return (self.predict_proba(data) >= cutoff).astype(np.int64)

    def to_dict(self) -> dict:
        return {
            "architecture": self.architecture.to_dict(),
            "layers": [
                {
                    "weights": layer.weights.tolist(),
                    "biases": layer.biases.tolist(),
                    "activation": layer.activation.value,
                }
                for layer in self.layers
            ],
            "normalizer": self.normalizer.to_dict(),
            "train_config": self.config.to_dict(),
            "loss_history": list(self.loss_history),
            "val_loss_history": None if self.val_loss_history is None else list(self.val_loss_history),
            "epochs_run": self.epochs_run,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TrainedMLP":
        layers = [
            Layer(
                np.asarray(entry["weights"], dtype=np.float64),
                np.asarray(entry["biases"], dtype=np.float64),
                Activation(entry["activation"]),
            )
            for entry in d["layers"]
        ]
        return cls(
            architecture=MLPArchitecture.from_dict(d["architecture"]),
            layers=layers,
            normalizer=Normalizer.from_dict(d["normalizer"]),
            config=TrainConfig.from_dict(d["train_config"]),
            loss_history=list(d["loss_history"]),
            epochs_run=d["epochs_run"],
            val_loss_history=d.get("val_loss_history"),
        )


def train(
    arch: MLPArchitecture,
    cfg: TrainConfig,
    train_ds: Dataset,
    validation_ds: Dataset | None = None,
) -> TrainedMLP:
    """Mini-batch Adam on mean BCE with early stopping.

    The per-epoch loss is the sample-weighted mean of the minibatch losses
    seen during that epoch. Training stops once the monitored loss (validation
    if given, else training) has failed to improve on its best value by at
    least cfg.tol for cfg.n_iter_no_change consecutive epochs, or at
    cfg.max_epochs. Fully deterministic in (arch, cfg, data).
    """
    if len(train_ds.samples) == 0:
        raise ValueError("training dataset is empty")
    X_raw = extract_features(train_ds.samples, train_ds.feature_names)
    y = labels_array(train_ds).astype(np.float64)
    if arch.input_dim != X_raw.shape[1]:
        raise ValueError(
            f"architecture expects {arch.input_dim} features, dataset has {X_raw.shape[1]}"
        )
    if np.unique(y).size < 2:
        warnings.warn(
            "training data contains a single class; the fit will be degenerate",
            RuntimeWarning,
            stacklevel=2,
        )
    nz = fit_normalizer(train_ds)
    X = nz.transform(X_raw)

    val = None
    if validation_ds is not None:
        Xv = nz.transform(extract_features(validation_ds.samples, train_ds.feature_names))
        yv = labels_array(validation_ds).astype(np.float64)
        val = (Xv, yv)

    layers = init_layers(arch, cfg.seed)
    if any(layer.activation not in TRAINABLE_ACTIVATIONS for layer in layers):
        raise ValueError("step activation cannot be trained")
    params = [arr for layer in layers for arr in (layer.weights, layer.biases)]
    opt = Adam(cfg.learning_rate, cfg.beta1, cfg.beta2, cfg.eps)
    shuffle_rng = np.random.default_rng(splitmix64(cfg.seed ^ _SHUFFLE_SALT))

    n = X.shape[0]
    loss_history: list[float] = []
    val_history: list[float] = []
    best = math.inf
    stalled = 0
    for _epoch in range(cfg.max_epochs):
        perm = shuffle_rng.permutation(n)
        loss_sum = 0.0
        for start in range(0, n, cfg.batch_size):
            idx = perm[start : start + cfg.batch_size]
            batch_loss, grads = _loss_and_grads(layers, X[idx], y[idx])
            opt.step(params, [g for pair in grads for g in pair])
            loss_sum += batch_loss * idx.size
        epoch_loss = loss_sum / n
        loss_history.append(epoch_loss)
        if val is not None:
            monitored = float(np.mean(bce_loss(_forward_batch(layers, val[0]), val[1])))
            val_history.append(monitored)
        else:
            monitored = epoch_loss
        if best - monitored >= cfg.tol:
            stalled = 0
        else:
            stalled += 1
        if monitored < best:
            best = monitored
        if stalled >= cfg.n_iter_no_change:
            break

    return TrainedMLP(
        architecture=arch,
        layers=layers,
        normalizer=nz,
        config=cfg,
        loss_history=loss_history,
        epochs_run=len(loss_history),
        val_loss_history=val_history if val is not None else None,
    )
