"""Relay selection and threshold-triggered handover simulation driven by a
trained strong/weak-link classifier."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import ClassVar, Iterable

import numpy as np

from .channelsim import LinkSample
from .dataset import LabelRule, SchemaError, as_samples
from .mlp import sigmoid


@dataclass(frozen=True)
class CandidateSet:
    """One selection instance: the links a terminal can attach to."""

    instance_id: int
    links: tuple[LinkSample, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "links", tuple(self.links))
        if not self.links:
            raise ValueError("candidate set must be nonempty")


@dataclass(frozen=True)
class RelayDecision:
    instance_id: int
    chosen_index: int
    chosen_class: int
    probabilities: tuple[float, ...]


@dataclass(frozen=True)
class TraceStep:
    time_index: int
    chosen_index: int
    chosen_pl_db: float
    in_outage: bool


@dataclass(frozen=True)
class HandoverTrace:
    steps: tuple[TraceStep, ...]
    switch_count: int
    outage_fraction: float


@dataclass(frozen=True)
class OracleModel:
    """Reference predictor scoring links by their true path loss.

    The score sigmoid((threshold - PL) / scale) is strictly decreasing in PL,
    so argmax-score selection coincides with argmin-true-path-loss selection,
    and the 0.5 cutoff reproduces the labeling rule (with PL exactly at the
    threshold mapping to class 1 by the cutoff's tie convention).
    """

    threshold_db: float = 120.0
    scale_db: float = 10.0

    score_kind: ClassVar[str] = "probability"
    decision_cutoff: ClassVar[float] = 0.5
    feature_names: ClassVar[tuple[str, ...]] = ("path_loss_db",)

    def predict_score(self, data) -> np.ndarray:
        pl = np.asarray([s.path_loss_db for s in as_samples(data)], dtype=np.float64)
        return sigmoid((self.threshold_db - pl) / self.scale_db)

    predict_proba = predict_score

    def predict(self, data) -> np.ndarray:
        return (self.predict_score(data) >= self.decision_cutoff).astype(np.int64)

    def to_dict(self) -> dict:
        return {"threshold_db": self.threshold_db, "scale_db": self.scale_db}

    @classmethod
    def from_dict(cls, d: dict) -> "OracleModel":
        return cls(threshold_db=float(d["threshold_db"]), scale_db=float(d["scale_db"]))


def group_candidates(data, n_candidates: int) -> list[CandidateSet]:
    """Group consecutive runs of n_candidates samples into selection
    instances: instance id = sample index // n_candidates."""
    samples = as_samples(data)
    if n_candidates < 1:
        raise ValueError(f"n_candidates must be >= 1, got {n_candidates}")
    if len(samples) == 0 or len(samples) % n_candidates:
        raise SchemaError(
            f"{len(samples)} samples do not divide into candidate sets of {n_candidates}"
        )
    return [
        CandidateSet(i, samples[i * n_candidates : (i + 1) * n_candidates])
        for i in range(len(samples) // n_candidates)
    ]


def select_oracle(cs: CandidateSet) -> int:
    """Index of the link with minimum true path loss; ties go to the lowest index."""
    return int(np.argmin([link.path_loss_db for link in cs.links]))


def select_predicted(model, cs: CandidateSet) -> RelayDecision:
    """Pick the link the model scores highest; ties go to the lowest index.

    chosen_class is the model's predicted class for the chosen link; it is 0
    when even the best candidate looks weak, so downstream accounting sees
    the outage while the terminal still attaches to something.
    """
    scores = np.asarray(model.predict_score(cs.links), dtype=np.float64)
    idx = int(np.argmax(scores))
    chosen_class = int(scores[idx] >= model.decision_cutoff)
    return RelayDecision(cs.instance_id, idx, chosen_class, tuple(float(s) for s in scores))


def _odds_db(p: float) -> float:
    p = min(max(p, 1e-12), 1.0 - 1e-12)
    return 10.0 * math.log10(p / (1.0 - p))


def handover_sim(
    model,
    trajectory: Iterable[CandidateSet],
    rule: LabelRule | None = None,
    hysteresis_db: float = 0.0,
) -> HandoverTrace:
    """Simulate stay-while-strong handover along a trajectory of candidate sets.

    At each step the terminal keeps its current link if the model predicts it
    strong; otherwise it switches to the highest-scoring candidate. Candidate
    indices align across steps (the same links re-measured over time), so all
    sets must have equal size. A step is in outage when the chosen link's true
    path loss is at or above the labeling threshold.

    With hysteresis_db > 0 a switch additionally requires the challenger to
    beat the incumbent by hysteresis_db decibels of odds:
    10*log10(odds(challenger)) >= 10*log10(odds(incumbent)) + hysteresis_db.
    This mapping is only defined for probability-scoring models.
    """
    if rule is None:
        rule = LabelRule()
    traj = list(trajectory)
    if not traj:
        raise ValueError("trajectory is empty")
    size = len(traj[0].links)
    if any(len(cs.links) != size for cs in traj):
        raise SchemaError("all candidate sets along a trajectory must have equal size")
    if hysteresis_db > 0.0 and model.score_kind != "probability":
        raise ValueError("hysteresis is only defined for probability-scoring models")

    steps = []
    current: int | None = None
    for t, cs in enumerate(traj):
        scores = np.asarray(model.predict_score(cs.links), dtype=np.float64)
        if current is None:
            current = int(np.argmax(scores))
        elif scores[current] < model.decision_cutoff:
            challenger = int(np.argmax(scores))
            if hysteresis_db > 0.0:
                if _odds_db(scores[challenger]) >= _odds_db(scores[current]) + hysteresis_db:
                    current = challenger
            else:
                current = challenger
        pl = cs.links[current].path_loss_db
        steps.append(TraceStep(t, current, pl, pl >= rule.threshold_db))

    switch_count = sum(1 for a, b in zip(steps, steps[1:]) if a.chosen_index != b.chosen_index)
    outage_fraction = sum(s.in_outage for s in steps) / len(steps)
    return HandoverTrace(tuple(steps), switch_count, outage_fraction)


def selection_accuracy(model, instances: Iterable[CandidateSet]) -> float:
    """Fraction of instances where the model picks the true minimum-loss link."""
    inst = list(instances)
    if not inst:
        raise ValueError("no selection instances")
    hits = sum(select_predicted(model, cs).chosen_index == select_oracle(cs) for cs in inst)
    return hits / len(inst)


TRACE_CSV_COLUMNS = ("time_index", "chosen_index", "chosen_pl_db", "in_outage")


def write_trace_csv(trace: HandoverTrace, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TRACE_CSV_COLUMNS)
        for s in trace.steps:
            writer.writerow(
                [s.time_index, s.chosen_index, format(s.chosen_pl_db, ".12g"), int(s.in_outage)]
            )
