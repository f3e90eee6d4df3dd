"""Isotropic undecimated (starlet) wavelet transform.

The transform is computed with the a trous algorithm: at level ``j`` the
B3-spline smoothing filter is dilated by inserting ``2**(j-1) - 1`` zeros
between its taps, so every plane keeps the full image resolution.  Each
smoothing pass mirrors the image by half the dilated support, convolves and
crops back.  Detail planes are differences of consecutive smoothings,

    w_j = c_{j-1} - c_j,

so the input is recovered exactly as ``c_L + sum(w_j)``.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    InconsistentDecompositionError,
    InvalidImageError,
    InvalidLevelError,
    LevelTooLargeError,
    PadExceedsImageError,
)

__all__ = [
    "Decomposition",
    "as_image",
    "b3_kernel_1d",
    "dilated_kernel_1d",
    "dilated_kernel_2d",
    "identity_kernel",
    "kernel_margin",
    "max_level",
    "mirror_pad",
    "reconstruct",
    "smooth",
    "starlet_decompose",
]


def as_image(img, name="image"):
    """Return ``img`` as a C-contiguous 2D float64 array, checking validity."""
    arr = np.asarray(img, dtype=np.float64)
    if arr.ndim != 2:
        raise InvalidImageError(f"{name} must be 2D, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise InvalidImageError(f"{name} has zero size: {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidImageError(f"{name} contains NaN or Inf")
    return np.ascontiguousarray(arr)


def _check_level(j):
    if isinstance(j, bool) or int(j) != j or j < 1:
        raise InvalidLevelError(f"level must be an integer >= 1, got {j!r}")
    return int(j)


def b3_kernel_1d():
    """Sampled cubic B-spline filter ``[1, 4, 6, 4, 1] / 16``.

    All taps are dyadic rationals, so they are exact in binary floating point
    and sum to exactly 1.
    """
    return np.array([1.0, 4.0, 6.0, 4.0, 1.0]) / 16.0


def kernel_margin(j):
    """Half-width of the level-``j`` dilated kernel, ``2 * 2**(j-1)``."""
    return 2 ** _check_level(j)


def dilated_kernel_1d(j):
    """B3 taps with ``2**(j-1) - 1`` zeros between neighbours (length ``4*2**(j-1)+1``)."""
    j = _check_level(j)
    step = 2 ** (j - 1)
    base = b3_kernel_1d()
    taps = np.zeros(4 * step + 1)
    taps[::step] = base
    return taps / taps.sum()


def dilated_kernel_2d(j):
    """Level-``j`` 2D smoothing kernel.

    Parameters
    ----------
    j : int
        Dilation level, ``j >= 1``.  Level 1 is the contiguous 5x5 B3 kernel.

    Returns
    -------
    numpy.ndarray
        Square array of side ``4 * 2**(j-1) + 1``: the outer product of the
        dilated 1D taps with themselves, divided by its total weight.

    Raises
    ------
    InvalidLevelError
        If ``j < 1``.
    """
    v = dilated_kernel_1d(j)
    k = np.outer(v, v)
    return k / k.sum()


def identity_kernel(j=1):
    """Discrete delta with the same footprint as ``dilated_kernel_2d(j)``.

    The level-``j`` wavelet filter is ``identity_kernel(j) - dilated_kernel_2d(j)``.
    """
    side = 2 * kernel_margin(j) + 1
    d = np.zeros((side, side))
    d[side // 2, side // 2] = 1.0
    return d


def mirror_pad(img, margin):
    """Pad by whole-sample symmetric reflection (the edge sample is not repeated).

    For a row ``[1, 2, 3]`` and ``margin=2`` the result is
    ``[3, 2, 1, 2, 3, 2, 1]``.
    """
    img = as_image(img)
    if isinstance(margin, bool) or int(margin) != margin or margin < 0:
        raise ValueError(f"margin must be a non-negative integer, got {margin!r}")
    margin = int(margin)
    if margin == 0:
        return img.copy()
    if margin > min(img.shape) - 1:
        raise PadExceedsImageError(
            f"mirror margin {margin} needs an image of at least "
            f"{margin + 1}x{margin + 1} pixels, got {img.shape[1]}x{img.shape[0]}"
        )
    return np.pad(img, margin, mode="reflect")


def _convolve_axis(padded, taps, step, axis, margin):
    # taps are symmetric, so correlation and convolution coincide
    n = padded.shape[axis] - 2 * margin
    out = None
    for k, weight in enumerate(taps):
        if weight == 0.0:
            continue
        start = margin + (k - len(taps) // 2) * step
        sl = [slice(None)] * padded.ndim
        sl[axis] = slice(start, start + n)
        term = weight * padded[tuple(sl)]
        out = term if out is None else out + term
    return out


def smooth(img, j):
    """One a trous smoothing step, ``c_j = c_{j-1} * h_j``.

    The image is mirrored by ``2**j`` pixels, filtered with the separable
    dilated B3 kernel (rows then columns), and cropped back to its original
    size.  Output values stay within ``[img.min(), img.max()]``.

    Raises
    ------
    PadExceedsImageError
        If the image is too small for the level-``j`` margin.
    """
    j = _check_level(j)
    img = as_image(img)
    if min(img.shape) < 2:
        raise PadExceedsImageError(f"smoothing needs at least 2x2 pixels, got {img.shape}")
    margin = kernel_margin(j)
    padded = mirror_pad(img, margin)
    taps = b3_kernel_1d()
    step = 2 ** (j - 1)
    rows = _convolve_axis(padded, taps, step, axis=0, margin=margin)
    # rows is cropped along axis 0 already; axis 1 still carries the margin
    return np.ascontiguousarray(_convolve_axis(rows, taps, step, axis=1, margin=margin))


def max_level(shape):
    """Deepest level ``L`` for which an image of ``shape`` can be decomposed.

    Level ``L`` mirrors by ``2**L`` pixels, which must not exceed
    ``min(shape) - 1``.  Returns 0 when no level fits.
    """
    limit = min(shape) - 1
    level = 0
    while 2 ** (level + 1) <= limit:
        level += 1
    return level


@dataclass
class Decomposition:
    """Starlet coefficients: detail planes ``w_1..w_L`` and residual ``c_L``."""

    details: list
    residual: np.ndarray
    levels: int = field(init=False)

    def __post_init__(self):
        self.levels = len(self.details)

    @property
    def shape(self):
        return self.residual.shape

    def smoothed(self, j):
        """Recover the smoothed plane ``c_j`` (``0 <= j <= L``) from the coefficients."""
        if not 0 <= j <= self.levels:
            raise InvalidLevelError(f"smoothed plane index must be in 0..{self.levels}, got {j}")
        c = self.residual.copy()
        for w in self.details[j:][::-1]:
            c += w
        return c


def starlet_decompose(img, levels):
    """Compute the ``levels``-deep starlet transform of ``img``.

    Parameters
    ----------
    img : array_like
        2D grayscale image.
    levels : int
        Number of detail planes ``L >= 1``.

    Returns
    -------
    Decomposition

    Raises
    ------
    InvalidLevelError
        If ``levels < 1``.
    LevelTooLargeError
        If the image is too small to mirror at level ``levels``.  The deepest
        admissible level is available as ``err.max_level``.
    """
    levels = _check_level(levels)
    c = as_image(img)
    deepest = max_level(c.shape)
    if levels > deepest:
        raise LevelTooLargeError(
            f"{levels} levels need a mirror margin of {2 ** levels} pixels; "
            f"a {c.shape[1]}x{c.shape[0]} image supports at most {deepest}",
            max_level=deepest,
        )
    details = []
    for j in range(1, levels + 1):
        c_next = smooth(c, j)
        details.append(c - c_next)
        c = c_next
    return Decomposition(details=details, residual=c)


def reconstruct(d):
    """Invert the transform: ``c_L + sum_j w_j``."""
    residual = np.asarray(d.residual, dtype=np.float64)
    if residual.ndim != 2:
        raise InconsistentDecompositionError(f"residual must be 2D, got shape {residual.shape}")
    out = residual.copy()
    for j, w in enumerate(d.details, start=1):
        w = np.asarray(w, dtype=np.float64)
        if w.shape != residual.shape:
            raise InconsistentDecompositionError(
                f"detail plane {j} has shape {w.shape}, residual has {residual.shape}"
            )
        out += w
    return out
