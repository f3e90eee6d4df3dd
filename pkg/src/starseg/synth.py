"""Seeded SEM-like test images with exact ground truth.

Images are bright isotropic Gaussian blobs on a flat background with a
low-frequency "rough surface" modulation and white Gaussian noise:

    image = clip(background + roughness + sum(blobs) + noise, 0, 1)

The truth mask marks every pixel within distance ``r`` of a blob center of
radius ``r``.

Random streams
--------------
``numpy.random.SeedSequence(seed).spawn(3)`` yields three independent
PCG64 generators, used for (in order) the roughness waves, the blob
geometry and the noise field.  Because each concern has its own stream,
changing ``noise_sigma`` or ``roughness_amplitude`` never moves a blob.

* roughness: for each of 8 waves, draw wavelength, orientation, phase
  (``uniform`` each, in that order).
* blobs: for each blob, draw the radius (``uniform(r_min, r_max)``), then
  integer center column and row (``integers``); on overlap rejection only
  the center is redrawn.
* noise: one ``standard_normal((height, width))`` call.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import PlacementFailedError

__all__ = ["LabeledSample", "SynthParams", "generate", "roughness_field"]

ROUGHNESS_WAVES = 8
MAX_PLACEMENT_TRIES = 1000


@dataclass(frozen=True)
class SynthParams:
    width: int = 256
    height: int = 256
    blob_count: int = 20
    radius_range: tuple = (3.0, 8.0)
    blob_peak: float = 0.6
    background_level: float = 0.2
    roughness_amplitude: float = 0.1
    noise_sigma: float = 0.05
    allow_overlap: bool = False
    seed: int = 0

    def validate(self):
        r_min, r_max = self.radius_range
        if self.width < 1 or self.height < 1:
            raise ValueError(f"image size must be positive, got {self.width}x{self.height}")
        if self.blob_count < 0:
            raise ValueError("blob_count must be >= 0")
        if not 0 < r_min <= r_max:
            raise ValueError(f"radius_range must satisfy 0 < r_min <= r_max, got {self.radius_range}")
        # integer centers need ceil(r) clearance on both sides
        if self.blob_count and not 2 * np.ceil(r_max) < min(self.width, self.height):
            raise ValueError(
                f"r_max={r_max} does not fit in a {self.width}x{self.height} image"
            )
        if not 0 < self.blob_peak <= 1:
            raise ValueError("blob_peak must be in (0, 1]")
        if not 0 <= self.background_level < 1:
            raise ValueError("background_level must be in [0, 1)")
        if self.background_level + self.blob_peak > 1:
            raise ValueError("background_level + blob_peak must not exceed 1")
        if self.roughness_amplitude < 0 or self.noise_sigma < 0:
            raise ValueError("roughness_amplitude and noise_sigma must be >= 0")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


@dataclass
class LabeledSample:
    image: np.ndarray
    truth: np.ndarray
    centers: list = field(default_factory=list)
    """``(row, col, radius)`` of each blob, in placement order."""


def roughness_field(rng, height, width, amplitude):
    """Sum of cosine plane waves with wavelengths in ``[size/4, size]``.

    The field is rescaled so its largest absolute value equals ``amplitude``.
    """
    size = max(width, height)
    yy, xx = np.mgrid[0:height, 0:width].astype(np.float64)
    f = np.zeros((height, width))
    for _ in range(ROUGHNESS_WAVES):
        wavelength = rng.uniform(size / 4, size)
        theta = rng.uniform(0.0, np.pi)
        phase = rng.uniform(0.0, 2 * np.pi)
        f += np.cos(2 * np.pi * (xx * np.cos(theta) + yy * np.sin(theta)) / wavelength + phase)
    peak = np.abs(f).max()
    if amplitude == 0 or peak == 0:
        return np.zeros_like(f)
    return f * (amplitude / peak)


def _place_blobs(rng, p):
    r_min, r_max = p.radius_range
    blobs = []
    for i in range(p.blob_count):
        r = float(rng.uniform(r_min, r_max)) if r_max > r_min else float(r_min)
        margin = int(np.ceil(r))
        for _ in range(MAX_PLACEMENT_TRIES):
            col = int(rng.integers(margin, p.width - margin))
            row = int(rng.integers(margin, p.height - margin))
            if p.allow_overlap or all(
                np.hypot(row - r2, col - c2) > r + rad2 for r2, c2, rad2 in blobs
            ):
                break
        else:
            raise PlacementFailedError(
                f"could not place blob {i + 1} of {p.blob_count} without overlap "
                f"after {MAX_PLACEMENT_TRIES} tries"
            )
        blobs.append((row, col, r))
    return blobs


def generate(params=None, **overrides):
    """Generate an image and its truth mask.

    Parameters
    ----------
    params : SynthParams, optional
        Defaults to ``SynthParams()``; keyword overrides are applied on top.

    Returns
    -------
    LabeledSample
        ``image`` is float64 in ``[0, 1]``, ``truth`` is boolean.

    Raises
    ------
    PlacementFailedError
        If non-overlapping placement fails for some blob.
    """
    p = params or SynthParams()
    if overrides:
        p = SynthParams(**{**p.__dict__, **overrides})
    p.validate()

    rough_rng, blob_rng, noise_rng = (
        np.random.Generator(np.random.PCG64(s)) for s in np.random.SeedSequence(p.seed).spawn(3)
    )
    rough = roughness_field(rough_rng, p.height, p.width, p.roughness_amplitude)
    blobs = _place_blobs(blob_rng, p)
    noise = noise_rng.standard_normal((p.height, p.width))

    yy, xx = np.mgrid[0:p.height, 0:p.width]
    signal = np.zeros((p.height, p.width))
    truth = np.zeros((p.height, p.width), dtype=bool)
    for row, col, r in blobs:
        d2 = (yy - row) ** 2 + (xx - col) ** 2
        sigma = r / 2
        signal += p.blob_peak * np.exp(-d2 / (2 * sigma * sigma))
        truth |= d2 <= r * r

    image = np.clip(p.background_level + rough + signal + p.noise_sigma * noise, 0.0, 1.0)
    return LabeledSample(image=image, truth=truth, centers=blobs)
