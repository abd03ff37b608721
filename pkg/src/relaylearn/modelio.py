"""One JSON envelope for every trained model kind.

The document carries a "kind" discriminator, an optional "name", optional
"split" metadata (seed, train fraction, dataset fingerprint) and the model's
own fields. Round-tripping preserves predictions bit-exactly because weights
are serialized through JSON's shortest-repr floats.
"""

from __future__ import annotations

import json

from .baselines import DummyModel, LogisticModel, SVMModel
from .dataset import SchemaError
from .mlp import TrainedMLP
from .relay import OracleModel

MODEL_KINDS = {
    "mlp": TrainedMLP,
    "logreg": LogisticModel,
    "dummy": DummyModel,
    "svm": SVMModel,
    "oracle": OracleModel,
}

_KIND_BY_TYPE = {cls: kind for kind, cls in MODEL_KINDS.items()}


def model_kind(model) -> str:
    try:
        return _KIND_BY_TYPE[type(model)]
    except KeyError:
        raise SchemaError(f"unknown model type {type(model).__name__}") from None


def model_to_dict(model, name: str | None = None, split: dict | None = None) -> dict:
    doc = {"kind": model_kind(model)}
    if name is not None:
        doc["name"] = name
    if split is not None:
        doc["split"] = dict(split)
    doc.update(model.to_dict())
    return doc


def model_from_dict(doc: dict):
    kind = doc.get("kind")
    if kind not in MODEL_KINDS:
        raise SchemaError(f"unknown model kind {kind!r}; expected one of {sorted(MODEL_KINDS)}")
    return MODEL_KINDS[kind].from_dict(doc)


def save_model(model, path, name: str | None = None, split: dict | None = None) -> None:
    doc = model_to_dict(model, name=name, split=split)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(json.dumps(doc, indent=2, sort_keys=True))
        fh.write("\n")


def load_model(path):
    """Load a model JSON; returns (model, full document)."""
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{path}: not valid model JSON: {exc}") from None
    return model_from_dict(doc), doc
