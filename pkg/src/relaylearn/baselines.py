"""Comparison classifiers behind the same train/predict contract as the MLP:
logistic regression, a majority-class dummy, and a primal linear SVM with an
optional explicit degree-4 polynomial feature map."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations_with_replacement
from typing import ClassVar

import numpy as np

from .dataset import (
    Dataset,
    Normalizer,
    as_samples,
    extract_features,
    fit_normalizer,
    labels_array,
)
from .mlp import bce_loss, sigmoid

FEATURE_MAPS = ("identity", "poly4")


def _features(model, data) -> np.ndarray:
    X = extract_features(as_samples(data), model.feature_names)
    return model.normalizer.transform(X)


# ---------------------------------------------------------------------------
# Logistic regression
# ---------------------------------------------------------------------------


def logreg_loss(w: np.ndarray, b: float, X: np.ndarray, y: np.ndarray) -> float:
    return float(np.mean(bce_loss(sigmoid(X @ w + b), y)))


def logreg_gradient(
    w: np.ndarray, b: float, X: np.ndarray, y: np.ndarray
) -> tuple[np.ndarray, float]:
    resid = (sigmoid(X @ w + b) - y) / X.shape[0]
    return X.T @ resid, float(resid.sum())


def logreg_fit_arrays(
    X: np.ndarray,
    y: np.ndarray,
    learning_rate: float = 0.1,
    max_epochs: int = 1000,
    tol: float = 1e-7,
) -> tuple[np.ndarray, float, list[float]]:
    """Full-batch gradient descent on mean BCE from zero-initialized weights.

    Zero initialization plus full batches make the fit deterministic with no
    random state. Stops when the per-epoch loss improvement drops below tol.
    X may have zero columns, in which case only the bias is fit.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    if X.shape[0] == 0:
        raise ValueError("empty training data")
    w = np.zeros(X.shape[1])
    b = 0.0
    history: list[float] = []
    prev = math.inf
    for _ in range(max_epochs):
        loss = logreg_loss(w, b, X, y)
        history.append(loss)
        dw, db = logreg_gradient(w, b, X, y)
        w -= learning_rate * dw
        b -= learning_rate * db
        if prev - loss < tol:
            break
        prev = loss
    return w, b, history


@dataclass
class LogisticModel:
    weights: np.ndarray
    bias: float
    normalizer: Normalizer
    loss_history: list[float]
    epochs_run: int

    score_kind: ClassVar[str] = "probability"
    decision_cutoff: ClassVar[float] = 0.5

    @property
    def feature_names(self) -> tuple[str, ...]:
        return self.normalizer.feature_names

    def predict_score(self, data) -> np.ndarray:
        return sigmoid(_features(self, data) @ self.weights + self.bias)

    predict_proba = predict_score

    def predict(self, data) -> np.ndarray:
        return (self.predict_score(data) >= self.decision_cutoff).astype(np.int64)

    def to_dict(self) -> dict:
        return {
            "weights": self.weights.tolist(),
            "bias": self.bias,
            "normalizer": self.normalizer.to_dict(),
            "loss_history": list(self.loss_history),
            "epochs_run": self.epochs_run,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "LogisticModel":
        return cls(
            weights=np.asarray(d["weights"], dtype=np.float64),
            bias=float(d["bias"]),
            normalizer=Normalizer.from_dict(d["normalizer"]),
            loss_history=list(d["loss_history"]),
            epochs_run=d["epochs_run"],
        )


def logreg_train(
    train_ds: Dataset,
    *,
    learning_rate: float = 0.1,
    max_epochs: int = 1000,
    tol: float = 1e-7,
    seed: int = 0,
) -> LogisticModel:
    """Fit logistic regression on the (normalized) training features.

    ``seed`` is accepted for interface symmetry; the fit itself is
    deterministic (zero init, full-batch descent) and does not use it.
    """
    del seed
    if len(train_ds.samples) == 0:
        raise ValueError("training dataset is empty")
    nz = fit_normalizer(train_ds)
    X = nz.transform(extract_features(train_ds.samples, train_ds.feature_names))
    y = labels_array(train_ds).astype(np.float64)
    w, b, history = logreg_fit_arrays(X, y, learning_rate, max_epochs, tol)
    return LogisticModel(w, b, nz, history, len(history))


# ---------------------------------------------------------------------------
# Dummy classifier
# ---------------------------------------------------------------------------


@dataclass
class DummyModel:
    """Most-frequent-class baseline.

    The constant score is the training frequency of class 1, so the shared
    0.5 probability cutoff reproduces the majority rule (ties go to class 1),
    and the implied confidence in the predicted class is the majority-class
    training frequency.
    """

    majority_class: int
    class1_frequency: float
    feature_names: tuple[str, ...] = field(default_factory=tuple)

    score_kind: ClassVar[str] = "probability"
    decision_cutoff: ClassVar[float] = 0.5

    def predict_score(self, data) -> np.ndarray:
        return np.full(len(as_samples(data)), self.class1_frequency, dtype=np.float64)

    predict_proba = predict_score

    def predict(self, data) -> np.ndarray:
        n = len(as_samples(data))
        return np.full(n, self.majority_class, dtype=np.int64)

    def to_dict(self) -> dict:
        return {
            "majority_class": self.majority_class,
            "class1_frequency": self.class1_frequency,
            "feature_names": list(self.feature_names),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DummyModel":
        return cls(
            majority_class=int(d["majority_class"]),
            class1_frequency=float(d["class1_frequency"]),
            feature_names=tuple(d.get("feature_names", ())),
        )


def dummy_train(train_ds: Dataset) -> DummyModel:
    if len(train_ds.samples) == 0:
        raise ValueError("training dataset is empty")
    y = labels_array(train_ds)
    freq1 = float(np.mean(y))
    majority = 1 if freq1 >= 0.5 else 0
    return DummyModel(majority, freq1, tuple(train_ds.feature_names))


# ---------------------------------------------------------------------------
# Linear SVM (primal, subgradient descent)
# ---------------------------------------------------------------------------


def hinge_loss(score, y):
    """max(0, 1 - y*score) with labels y in {-1, +1}."""
    return np.maximum(0.0, 1.0 - np.asarray(y, dtype=np.float64) * np.asarray(score, dtype=np.float64))


def poly_expand(X: np.ndarray, degree: int = 4) -> np.ndarray:
    """All monomials of X's columns with total degree 1..degree.

    Column order is deterministic: degrees ascending, and within one degree
    the combinations_with_replacement order of the input columns.
    """
    X = np.asarray(X, dtype=np.float64)
    d = X.shape[1]
    cols = []
    for deg in range(1, degree + 1):
        for combo in combinations_with_replacement(range(d), deg):
            cols.append(np.prod(X[:, combo], axis=1))
    return np.column_stack(cols)


def _map_features(X: np.ndarray, feature_map: str) -> np.ndarray:
    if feature_map == "identity":
        return X
    if feature_map == "poly4":
        return poly_expand(X, 4)
    raise ValueError(f"unknown feature map {feature_map!r}; choose from {FEATURE_MAPS}")


def svm_objective(w: np.ndarray, b: float, X: np.ndarray, y: np.ndarray, C: float) -> float:
    """(1/2)||w||^2 + C * mean hinge loss, labels in {-1, +1}."""
    margins = y * (X @ w + b)
    return float(0.5 * w @ w + C * np.mean(np.maximum(0.0, 1.0 - margins)))


def svm_gradient(
    w: np.ndarray, b: float, X: np.ndarray, y: np.ndarray, C: float
) -> tuple[np.ndarray, float]:
    """Subgradient of svm_objective; the hinge point itself contributes 0."""
    margins = y * (X @ w + b)
    coeff = np.where(margins < 1.0, -y, 0.0) / X.shape[0]
    return w + C * (X.T @ coeff), C * float(coeff.sum())


@dataclass
class SVMModel:
    weights: np.ndarray
    bias: float
    C: float
    feature_map: str
    normalizer: Normalizer
    loss_history: list[float]
    epochs_run: int

    score_kind: ClassVar[str] = "margin"
    decision_cutoff: ClassVar[float] = 0.0

    @property
    def feature_names(self) -> tuple[str, ...]:
        return self.normalizer.feature_names

    def predict_score(self, data) -> np.ndarray:
        """Signed margin w . phi(x) + b; positive means class 1."""
        Xm = _map_features(_features(self, data), self.feature_map)
        return Xm @ self.weights + self.bias

    def predict(self, data) -> np.ndarray:
        # Margin exactly 0 goes to class 1.
        return (self.predict_score(data) >= self.decision_cutoff).astype(np.int64)

    def to_dict(self) -> dict:
        return {
            "weights": self.weights.tolist(),
            "bias": self.bias,
            "C": self.C,
            "feature_map": self.feature_map,
            "normalizer": self.normalizer.to_dict(),
            "loss_history": list(self.loss_history),
            "epochs_run": self.epochs_run,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SVMModel":
        return cls(
            weights=np.asarray(d["weights"], dtype=np.float64),
            bias=float(d["bias"]),
            C=float(d["C"]),
            feature_map=d["feature_map"],
            normalizer=Normalizer.from_dict(d["normalizer"]),
            loss_history=list(d["loss_history"]),
            epochs_run=d["epochs_run"],
        )


def svm_train(
    train_ds: Dataset,
    *,
    C: float = 1.0,
    learning_rate: float = 0.01,
    max_epochs: int = 500,
    seed: int = 0,
    feature_map: str = "identity",
) -> SVMModel:
    """Primal linear SVM by deterministic full-batch subgradient descent.

    Labels are remapped internally to {-1, +1}. With feature_map="poly4" the
    (normalized) features are expanded to all monomials of degree <= 4 before
    the linear fit. ``seed`` is accepted for interface symmetry; the fit is
    deterministic and does not use it.
    """
    del seed
    if len(train_ds.samples) == 0:
        raise ValueError("training dataset is empty")
    if C <= 0.0:
        raise ValueError(f"C must be > 0, got {C}")
    nz = fit_normalizer(train_ds)
    X = nz.transform(extract_features(train_ds.samples, train_ds.feature_names))
    Xm = _map_features(X, feature_map)
    y = 2.0 * labels_array(train_ds).astype(np.float64) - 1.0

    w = np.zeros(Xm.shape[1])
    b = 0.0
    history: list[float] = []
    for _ in range(max_epochs):
        history.append(svm_objective(w, b, Xm, y, C))
        dw, db = svm_gradient(w, b, Xm, y, C)
        w -= learning_rate * dw
        b -= learning_rate * db
    return SVMModel(w, b, C, feature_map, nz, history, len(history))
