"""
The B3-spline filter bank
=========================

Every smoothing step of the starlet transform uses the same sampled cubic
B-spline, ``[1, 4, 6, 4, 1] / 16``.  Deeper levels spread the taps apart
with zeros ("holes") instead of shrinking the image.
"""

from fractions import Fraction

import numpy as np

from starseg.starlet import b3_kernel_1d, dilated_kernel_1d, dilated_kernel_2d, identity_kernel

# The 1D taps are dyadic rationals, so they are exact in floating point.
h = b3_kernel_1d()
print("1D taps:", h, "sum =", h.sum())

# The 2D kernel is the outer product of the taps with themselves.
print("\nlevel-1 kernel as fractions:")
for row in dilated_kernel_2d(1).tolist():
    print("  ", "  ".join(f"{str(Fraction(x)):>6}" for x in row))

# At level j there are 2**(j-1) - 1 zeros between neighbouring taps.
for j in (1, 2, 3):
    v = dilated_kernel_1d(j)
    print(f"\nlevel {j}: {len(v)} taps, nonzero at {np.flatnonzero(v).tolist()}")

# The wavelet filter is a delta minus the smoothing kernel; it has zero mean,
# so detail planes of a flat image vanish.
g = identity_kernel(1) - dilated_kernel_2d(1)
print("\nwavelet filter centre:", g[2, 2], " sum:", g.sum())
