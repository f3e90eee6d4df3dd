"""Pixel-level comparison of a predicted mask against ground truth."""

from dataclasses import dataclass

import numpy as np

from .errors import EmptyInputError, InconsistentInputError

__all__ = [
    "ConfusionCounts",
    "Metrics",
    "OVERLAY_COLORS",
    "as_mask",
    "confusion",
    "evaluate",
    "f1_score",
    "metrics",
    "overlay",
]

# TN is drawn black; TP/FN/FP follow the usual green/blue/red comparison scheme.
OVERLAY_COLORS = {
    "tp": (0, 255, 0),
    "fn": (0, 0, 255),
    "fp": (255, 0, 0),
    "tn": (0, 0, 0),
}


def as_mask(mask, name="mask"):
    m = np.asarray(mask)
    if m.ndim != 2:
        raise InconsistentInputError(f"{name} must be 2D, got shape {m.shape}")
    return m.astype(bool, copy=False)


def _pair(pred, gt):
    pred = as_mask(pred, "prediction")
    gt = as_mask(gt, "ground truth")
    if pred.shape != gt.shape:
        raise InconsistentInputError(
            f"prediction shape {pred.shape} does not match ground truth {gt.shape}"
        )
    return pred, gt


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    fn: int
    tn: int

    @property
    def total(self):
        return self.tp + self.fp + self.fn + self.tn


@dataclass(frozen=True)
class Metrics:
    precision: float
    recall: float
    accuracy: float
    f1: float


def confusion(pred, gt):
    """Tally TP, FP, FN and TN pixels of ``pred`` against ``gt``."""
    pred, gt = _pair(pred, gt)
    tp = int(np.count_nonzero(pred & gt))
    fp = int(np.count_nonzero(pred & ~gt))
    fn = int(np.count_nonzero(~pred & gt))
    return ConfusionCounts(tp=tp, fp=fp, fn=fn, tn=pred.size - tp - fp - fn)


def f1_score(precision, recall):
    """Harmonic mean of precision and recall, 0 when both are 0."""
    if precision + recall == 0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def metrics(c):
    """Precision, recall, accuracy and F1 from confusion counts.

    Precision and recall are reported as 0 when their denominator is 0
    (nothing predicted, or nothing to find).
    """
    if c.total <= 0:
        raise EmptyInputError("confusion counts are all zero")
    precision = c.tp / (c.tp + c.fp) if c.tp + c.fp else 0.0
    recall = c.tp / (c.tp + c.fn) if c.tp + c.fn else 0.0
    accuracy = (c.tp + c.tn) / c.total
    return Metrics(precision, recall, accuracy, f1_score(precision, recall))


def evaluate(pred, gt):
    """Shorthand for ``metrics(confusion(pred, gt))``, also returning the counts."""
    c = confusion(pred, gt)
    return c, metrics(c)


def overlay(pred, gt):
    """Color-coded comparison image, shape ``(H, W, 3)`` uint8.

    TP pixels are green, FN blue, FP red and TN black.
    """
    pred, gt = _pair(pred, gt)
    rgb = np.zeros(pred.shape + (3,), dtype=np.uint8)
    rgb[pred & gt] = OVERLAY_COLORS["tp"]
    rgb[~pred & gt] = OVERLAY_COLORS["fn"]
    rgb[pred & ~gt] = OVERLAY_COLORS["fp"]
    return rgb
