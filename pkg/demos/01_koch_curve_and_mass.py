"""
Koch curve, its dimension and its mass
======================================

Build the von Koch curve from its four similarity maps, check the
similarity dimension, and measure the alpha-dimensional mass of the whole
curve and of its pieces.
"""

import math

import numpy as np

from fractal_langevin import build_koch, evaluate, mass
from fractal_langevin.io import write_polyline_csv

# Depth n means 4**n segments of length 3**-n.
curve = build_koch(8)
print(f"{curve.n_vertices} vertices, alpha = {curve.alpha:.12f}")
print(f"ln4/ln3          = {math.log(4) / math.log(3):.12f}")

# The curve is a function of a parameter u in [0, 1].  The bump apex sits
# at u = 1/2 and the end of the first third at u = 1/4.
print("w(1/4) =", evaluate(curve, 0.25))
print("w(1/2) =", evaluate(curve, 0.5), "  expected (1/2, sqrt(3)/6) =", (0.5, math.sqrt(3) / 6))

# Mass sums |chord|**alpha over the prefractal and divides by Gamma(alpha+1).
# Every chord has length 3**-n, so the sum is exact at any depth.
total = mass(curve, 0.0, 1.0)
print(f"mass of the whole curve = {total.value:.12f}")
print(f"1/Gamma(alpha + 1)      = {1 / math.gamma(curve.alpha + 1):.12f}")

# Each of the four sub-copies carries a quarter of the mass, and shrinking
# the curve by 3 divides the mass by 3**alpha = 4.
for a, b in [(0, 0.25), (0.25, 0.5), (0.5, 0.75), (0.75, 1)]:
    print(f"  mass on [{a}, {b}] = {mass(curve, a, b).value:.12f}")

# Off the vertex grid the prefractal sum still moves with depth; the Cauchy
# gap compares against the sum one level coarser.
for depth in (4, 6, 8, 10):
    est = mass(build_koch(depth), 0.1, 0.3)
    print(f"depth {depth:2d}: mass on [0.1, 0.3] = {est.value:.8f}, gap {est.cauchy_gap:.1e}")

# Write the polyline for an external plotter.
write_polyline_csv(build_koch(5), "koch_depth5.csv")
u, pts = build_koch(5).polyline
print("wrote koch_depth5.csv with", len(u), "rows; bounding box",
      np.round(pts.min(axis=0), 4), np.round(pts.max(axis=0), 4))
