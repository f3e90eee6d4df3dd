"""Starlet-based segmentation of bright, isotropic particles in grayscale images."""

from .errors import *  # noqa: F401,F403
from .evaluation import ConfusionCounts, Metrics, confusion, evaluate, metrics, overlay
from .fileio import (
    ReportRow,
    read_image,
    read_mask,
    read_rgb,
    report_rows,
    write_image,
    write_mask,
    write_metrics_csv,
    write_overlay,
)
from .segmentation import (
    SweepEntry,
    ThresholdPolicy,
    band_sum_map,
    binarize,
    detail_sum_map,
    score_map,
    segment,
    select_optimal_level,
    sweep_levels,
)
from .starlet import (
    Decomposition,
    b3_kernel_1d,
    dilated_kernel_2d,
    max_level,
    mirror_pad,
    reconstruct,
    smooth,
    starlet_decompose,
)
from .synth import LabeledSample, SynthParams, generate

__version__ = "0.1.0"
