"""Confusion-matrix statistics, ROC/AUC, precision-recall curves, and
model comparison reports."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    def to_dict(self) -> dict:
        return {"tp": self.tp, "fp": self.fp, "tn": self.tn, "fn": self.fn}


def confusion(preds, labels) -> ConfusionMatrix:
    """Count outcomes with class 1 as the positive class."""
    preds = np.asarray(preds, dtype=np.int64)
    labels = np.asarray(labels, dtype=np.int64)
    if preds.shape != labels.shape or preds.size == 0:
        raise ValueError(f"need equal nonempty prediction/label vectors, got {preds.shape} vs {labels.shape}")
    for arr, name in ((preds, "predictions"), (labels, "labels")):
        if not np.isin(arr, (0, 1)).all():
            raise ValueError(f"{name} must be 0/1 classes")
    tp = int(np.sum((preds == 1) & (labels == 1)))
    fp = int(np.sum((preds == 1) & (labels == 0)))
    tn = int(np.sum((preds == 0) & (labels == 0)))
    fn = int(np.sum((preds == 0) & (labels == 1)))
    return ConfusionMatrix(tp, fp, tn, fn)


# 0/0 ratios report 0 by convention (e.g. no positive predictions at all).


def precision(cm: ConfusionMatrix) -> float:
    denom = cm.tp + cm.fp
    return cm.tp / denom if denom else 0.0


def recall(cm: ConfusionMatrix) -> float:
    denom = cm.tp + cm.fn
    return cm.tp / denom if denom else 0.0


def f1(cm: ConfusionMatrix) -> float:
    p, r = precision(cm), recall(cm)
    return 2.0 * p * r / (p + r) if p + r else 0.0


def accuracy(cm: ConfusionMatrix) -> float:
    return (cm.tp + cm.tn) / cm.total if cm.total else 0.0


def _sweep(scores, labels):
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    if scores.shape != labels.shape or scores.ndim != 1 or scores.size == 0:
        raise ValueError("scores and labels must be equal-length nonempty vectors")
    order = np.argsort(-scores, kind="mergesort")
    sorted_scores = scores[order]
    sorted_labels = labels[order]
    tps = np.cumsum(sorted_labels)
    fps = np.cumsum(1 - sorted_labels)
    # Last index of every tied-score group: ties collapse into one threshold.
    boundaries = np.nonzero(np.diff(sorted_scores))[0]
    boundaries = np.concatenate([boundaries, [scores.size - 1]])
    return tps[boundaries], fps[boundaries]


def roc_curve(scores, labels) -> list[tuple[float, float]]:
    """(FPR, TPR) points over descending score thresholds, starting at (0, 0).

    Tied scores are grouped into a single threshold step, which makes the
    trapezoid AUC equal the pairwise ranking statistic exactly. Requires both
    classes to be present.
    """
    labels = np.asarray(labels, dtype=np.int64)
    n_pos = int(labels.sum())
    n_neg = labels.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("ROC needs at least one positive and one negative label")
    tps, fps = _sweep(scores, labels)
    points = [(0.0, 0.0)]
    points.extend((fp / n_neg, tp / n_pos) for tp, fp in zip(tps, fps))
    return points


def auc(points: Sequence[tuple[float, float]]) -> float:
    """Trapezoid-rule area under a curve with non-decreasing x coordinates."""
    area = 0.0
    for (x0, y0), (x1, y1) in zip(points, points[1:]):
        area += (x1 - x0) * (y0 + y1) / 2.0
    return area


def pr_curve(scores, labels) -> list[tuple[float, float]]:
    """(recall, precision) points over descending score thresholds.

    Starts at the conventional (0, 1) anchor and stops at the first threshold
    reaching full recall, so recall is non-decreasing and the last point has
    recall 1. Requires at least one positive label.
    """
    labels = np.asarray(labels, dtype=np.int64)
    n_pos = int(labels.sum())
    if n_pos == 0:
        raise ValueError("precision-recall needs at least one positive label")
    tps, fps = _sweep(scores, labels)
    points = [(0.0, 1.0)]
    for tp, fp in zip(tps, fps):
        points.append((tp / n_pos, tp / (tp + fp)))
        if tp == n_pos:
            break
    return points


@dataclass(frozen=True)
class EvalReport:
    """One model's evaluation: confusion counts, scalar metrics, and the
    ROC / precision-recall curve points."""

    model_name: str
    cm: ConfusionMatrix
    precision: float
    recall: float
    f1: float
    accuracy: float
    roc_auc: float
    roc_points: tuple[tuple[float, float], ...]
    pr_points: tuple[tuple[float, float], ...]

    def to_dict(self) -> dict:
        return {
            "model_name": self.model_name,
            "confusion": self.cm.to_dict(),
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "accuracy": self.accuracy,
            "roc_auc": self.roc_auc,
            "roc_points": [list(p) for p in self.roc_points],
            "pr_points": [list(p) for p in self.pr_points],
        }


def report(model_name: str, scores, preds, labels) -> EvalReport:
    cm = confusion(preds, labels)
    roc_points = roc_curve(scores, labels)
    return EvalReport(
        model_name=model_name,
        cm=cm,
        precision=precision(cm),
        recall=recall(cm),
        f1=f1(cm),
        accuracy=accuracy(cm),
        roc_auc=auc(roc_points),
        roc_points=tuple(roc_points),
        pr_points=tuple(pr_curve(scores, labels)),
    )


def compare(reports: Sequence[EvalReport]) -> list[EvalReport]:
    """Rank by accuracy descending, ties by ROC-AUC descending, then by name."""
    return sorted(reports, key=lambda r: (-r.accuracy, -r.roc_auc, r.model_name))


REPORT_CSV_COLUMNS = ("model", "precision", "recall", "f1", "accuracy", "roc_auc")


def write_reports_csv(reports: Sequence[EvalReport], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(REPORT_CSV_COLUMNS)
        for r in reports:
            writer.writerow(
                [
                    r.model_name,
                    _fmt(r.precision),
                    _fmt(r.recall),
                    _fmt(r.f1),
                    _fmt(r.accuracy),
                    _fmt(r.roc_auc),
                ]
            )


def write_curve_csv(points: Sequence[tuple[float, float]], path, x_name: str, y_name: str) -> None:
    """Two-column curve CSV for external plotting."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([x_name, y_name])
        for x, y in points:
            writer.writerow([_fmt(x), _fmt(y)])


def _fmt(value: float) -> str:
    return format(float(value), ".12g")


def write_curves_svg(
    named_series: Sequence[tuple[str, Sequence[tuple[float, float]]]],
    path,
    xlabel: str,
    ylabel: str,
    title: str,
) -> None:
    """Render simple labeled line plots to a static SVG file."""
    import matplotlib
    from matplotlib.figure import Figure

    with matplotlib.rc_context({"svg.hashsalt": "relaylearn"}):
        fig = Figure(figsize=(6.0, 4.5))
        ax = fig.add_subplot(111)
        for name, points in named_series:
            xs = [p[0] for p in points]
            ys = [p[1] for p in points]
            ax.plot(xs, ys, label=name)
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        ax.set_title(title)
        ax.legend(loc="best")
        fig.savefig(path, format="svg", metadata={"Date": None})
