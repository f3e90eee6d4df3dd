"""Particle segmentation from starlet detail planes.

Fine detail planes (``w_1``, ``w_2`` by default) are treated as noise and
dropped.  The remaining planes ``w_{j_min}..w_L`` are summed into a score
map, which is thresholded into a binary mask.  Two score maps are available:

``"band"`` (default)
    ``sum_{j=j_min..L} w_j``, i.e. the band-pass image ``c_{j_min-1} - c_L``.
``"band_minus_input"``
    ``sum_{j=j_min..L} w_j - c_0``, the detail sum with the input image
    subtracted (see :func:`detail_sum_map`).

The depth ``L`` controls the largest structure retained.  :func:`sweep_levels`
scores a range of depths against a reference mask and
:func:`select_optimal_level` picks the depth with the best F1.
"""

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import (
    EmptyInputError,
    InconsistentInputError,
    InsufficientLevelsError,
    InvalidLevelError,
)
from .evaluation import ConfusionCounts, Metrics, as_mask, confusion, f1_score, metrics
from .starlet import as_image, max_level, starlet_decompose

__all__ = [
    "SCORE_MODES",
    "SweepEntry",
    "SweepResult",
    "ThresholdPolicy",
    "band_sum_map",
    "binarize",
    "detail_sum_map",
    "otsu_bin_threshold",
    "score_map",
    "segment",
    "select_optimal_level",
    "sweep_levels",
]

SCORE_MODES = ("band", "band_minus_input")
OTSU_BINS = 256


@dataclass(frozen=True)
class ThresholdPolicy:
    """How a score map is turned into a mask.

    ``kind`` is ``"otsu"``, ``"positive"`` (score > 0) or ``"fixed"``
    (score > ``value``).
    """

    kind: str = "otsu"
    value: float = None

    def __post_init__(self):
        if self.kind not in ("otsu", "positive", "fixed"):
            raise ValueError(f"unknown threshold policy {self.kind!r}")
        if self.kind == "fixed":
            if self.value is None or not np.isfinite(self.value):
                raise ValueError("fixed threshold needs a finite value")
        elif self.value is not None:
            raise ValueError(f"{self.kind} policy takes no value")

    @classmethod
    def fixed(cls, t):
        return cls("fixed", float(t))

    @classmethod
    def parse(cls, text):
        """Parse ``"otsu"``, ``"positive"``, ``"fixed:<t>"`` or a bare number."""
        text = text.strip().lower()
        if text in ("otsu", "positive"):
            return cls(text)
        if text.startswith("fixed:"):
            text = text[len("fixed:"):]
        try:
            return cls.fixed(float(text))
        except ValueError:
            raise ValueError(
                f"threshold must be otsu, positive, fixed:<number> or a number; got {text!r}"
            ) from None

    def __str__(self):
        return f"fixed:{self.value!r}" if self.kind == "fixed" else self.kind


def _policy(policy):
    if isinstance(policy, ThresholdPolicy):
        return policy
    if isinstance(policy, str):
        return ThresholdPolicy.parse(policy)
    return ThresholdPolicy.fixed(policy)


def _check_jmin(d, j_min):
    if j_min < 1:
        raise InvalidLevelError(f"j_min must be >= 1, got {j_min}")
    if d.levels < j_min:
        raise InsufficientLevelsError(
            f"score map sums levels {j_min}..L but the decomposition has only L={d.levels}"
        )


def band_sum_map(d, j_min=3):
    """Sum of detail planes ``w_{j_min} + ... + w_L``."""
    _check_jmin(d, j_min)
    s = d.details[j_min - 1].copy()
    for w in d.details[j_min:]:
        s += w
    return s


def detail_sum_map(d, img, j_min=3):
    """Detail sum minus the input image: ``sum_{j=j_min..L} w_j - img``.

    By telescoping this equals ``(c_{j_min-1} - c_L) - c_0``.

    Raises
    ------
    InsufficientLevelsError
        If the decomposition is shallower than ``j_min``.
    InconsistentInputError
        If ``img`` does not have the decomposition's shape.
    """
    img = as_image(img)
    if img.shape != d.shape:
        raise InconsistentInputError(
            f"image shape {img.shape} does not match decomposition {d.shape}"
        )
    return band_sum_map(d, j_min) - img


def score_map(d, img, j_min=3, score="band"):
    if score == "band":
        if img is not None and as_image(img).shape != d.shape:
            raise InconsistentInputError(
                f"image shape {np.shape(img)} does not match decomposition {d.shape}"
            )
        return band_sum_map(d, j_min)
    if score == "band_minus_input":
        return detail_sum_map(d, img, j_min)
    raise ValueError(f"score must be one of {SCORE_MODES}, got {score!r}")


def otsu_bin_threshold(scores, nbins=OTSU_BINS):
    """Otsu threshold on a min-max normalized, ``nbins``-bin histogram.

    Returns ``(bins, k)`` where ``bins`` holds each pixel's histogram bin and
    ``k`` is the last bin of the background class, so the foreground is
    ``bins > k``.  Between-class variances are compared exactly; ties go to
    the lowest ``k``.  A constant map returns ``k = nbins - 1`` (everything
    background).
    """
    s = np.asarray(scores, dtype=np.float64)
    lo, hi = s.min(), s.max()
    if not hi > lo:
        return np.zeros(s.shape, dtype=np.intp), nbins - 1
    norm = (s - lo) / (hi - lo)
    bins = np.minimum((norm * nbins).astype(np.intp), nbins - 1)
    hist = np.bincount(bins.ravel(), minlength=nbins)

    n = int(s.size)
    total = int(np.dot(np.arange(nbins), hist))
    n0 = s0 = 0
    best_k, best = nbins - 1, Fraction(-1)
    for k in range(nbins - 1):
        n0 += int(hist[k])
        s0 += k * int(hist[k])
        n1 = n - n0
        if n0 == 0 or n1 == 0:
            continue
        # n0*n1*(mu0 - mu1)^2 with integer numerator and denominator
        var = Fraction((s0 * n1 - (total - s0) * n0) ** 2, n0 * n1)
        if var > best:
            best_k, best = k, var
    return bins, best_k


def binarize(scores, policy="otsu"):
    """Threshold a score map into a boolean mask (foreground strictly above)."""
    s = np.asarray(scores, dtype=np.float64)
    policy = _policy(policy)
    if policy.kind == "otsu":
        bins, k = otsu_bin_threshold(s)
        return bins > k
    if policy.kind == "positive":
        return s > 0.0
    return s > policy.value


def segment(img, levels, policy="otsu", j_min=3, score="band"):
    """Decompose ``img`` to depth ``levels``, build the score map and threshold it."""
    if levels < j_min:
        raise InsufficientLevelsError(
            f"levels={levels} is below j_min={j_min}; the score map needs L >= {j_min}"
        )
    d = starlet_decompose(img, levels)
    return binarize(score_map(d, img, j_min, score), policy)


@dataclass(frozen=True)
class SweepEntry:
    level: int
    counts: ConfusionCounts
    metrics: Metrics


class SweepResult(list):
    """List of :class:`SweepEntry` in ascending level order.

    ``requested`` is the ``(lo, hi)`` range asked for; ``capped_at`` is the
    deepest level actually evaluated when the image size forced a cap, else
    ``None``.
    """

    def __init__(self, entries, requested, capped_at=None):
        super().__init__(entries)
        self.requested = requested
        self.capped_at = capped_at


def sweep_levels(img, gt, lo=3, hi=10, policy="otsu", j_min=3, score="band"):
    """Segment at every depth in ``lo..hi`` and score each mask against ``gt``.

    Depths beyond what the image size supports are dropped and the cap is
    recorded on the result.  The transform is computed once at the deepest
    depth; shallower levels reuse its leading planes, which is identical to
    decomposing each depth separately.
    """
    img = as_image(img)
    gt = as_mask(gt, "ground truth")
    if gt.shape != img.shape:
        raise InconsistentInputError(f"ground truth shape {gt.shape} does not match image {img.shape}")
    if lo > hi:
        raise InvalidLevelError(f"empty level range {lo}..{hi}")
    if lo < j_min:
        raise InsufficientLevelsError(f"sweep starts at L={lo}, below j_min={j_min}")
    deepest = max_level(img.shape)
    top = min(hi, deepest)
    if top < lo:
        raise InvalidLevelError(
            f"a {img.shape[1]}x{img.shape[0]} image supports at most L={deepest}, "
            f"below the requested start L={lo}"
        )
    policy = _policy(policy)
    d = starlet_decompose(img, top)
    entries = []
    for level in range(lo, top + 1):
        sub = type(d)(details=d.details[:level], residual=d.smoothed(level))
        mask = binarize(score_map(sub, img, j_min, score), policy)
        c = confusion(mask, gt)
        entries.append(SweepEntry(level, c, metrics(c)))
    return SweepResult(entries, requested=(lo, hi), capped_at=top if top < hi else None)


def select_optimal_level(sweep):
    """Depth with the highest F1 (``2PR/(P+R)``); ties go to the smaller depth."""
    if not sweep:
        raise EmptyInputError("cannot select a level from an empty sweep")
    best = None
    for e in sorted(sweep, key=lambda e: e.level):
        f1 = f1_score(e.metrics.precision, e.metrics.recall)
        if best is None or f1 > best[0]:
            best = (f1, e.level)
    return best[1]
