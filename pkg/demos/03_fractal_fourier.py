"""
Fractal Fourier transform
=========================

The transform integrates f(theta) exp(-i J(theta) v) against the mass.  A
smooth bump is transformed, compared with an FFT on the mass line, and
transformed back.
"""

import math

import numpy as np

from fractal_langevin import (
    build_koch,
    build_staircase,
    conjugacy_apply,
    fractal_fourier,
    fractal_fourier_inverse,
)

table = build_staircase(build_koch(10), 0.0)
T = table.total_mass
center, width = T / 2, T / 20


def bump(J):
    return np.exp(-0.5 * ((J - center) / width) ** 2)


f = conjugacy_apply(bump, table)

# At v = 0 the transform is the F-integral of f.
print("f~(0) =", fractal_fourier(f, [0.0], table)[0].real,
      " expected", width * math.sqrt(2 * math.pi))

# On the frequencies 2 pi k / T the transform agrees with a plain FFT of the
# bump sampled on the mass line.
M = 256
fft = np.fft.fft(bump(np.arange(M) * T / M)) * T / M
k = np.arange(8)
ours = fractal_fourier(f, 2 * np.pi * k / T, table)
print("max |fractal - FFT| over 8 frequencies:", np.abs(ours - fft[k]).max())

# Round trip: sample the transform densely enough and invert.
v_max = 7 / width
n = int(math.ceil(2 * v_max * T / math.pi)) | 1
v = np.linspace(-v_max, v_max, n)
back = fractal_fourier_inverse(fractal_fourier(f, v, table), v, table)
err = np.linalg.norm(back.real - bump(table.J)) / np.linalg.norm(bump(table.J))
print(f"{n} frequencies, relative L2 round-trip error {err:.2e}")
