"""
Staircase function and calculus on the curve
=============================================

The staircase J(u) = S(u) is the mass from the origin point to w(u).  It is
the coordinate that turns derivatives and integrals along the fractal into
ordinary one-dimensional calculus.
"""

import math

import numpy as np
from scipy import integrate

from fractal_langevin import (
    build_koch,
    build_staircase,
    conjugacy_apply,
    falpha_derivative,
    falpha_integral,
    inverse_staircase,
    staircase_eval,
)

table = build_staircase(build_koch(10), origin=0.0)
T = table.total_mass
print(f"total mass T = {T:.12f}")

# The staircase is monotone, flat nowhere on the Koch curve, and symmetric.
print("J(1/2) / T =", staircase_eval(table, 0.5) / T)
u = np.array([0.1, 0.37, 0.8])
print("u           :", u)
print("S^-1(S(u))  :", inverse_staircase(table, staircase_eval(table, u)))

# A function of the mass coordinate lifted to the curve: f(w(u)) = g(J(u)).
f = conjugacy_apply(np.sin, table)

# The F-derivative of f is g'(J), here cos(J).
for ui in u:
    d = falpha_derivative(f, ui, table)
    print(f"D_F f at u={ui}: {d:.8f}   cos(J) = {math.cos(staircase_eval(table, ui)):.8f}")

# The F-integral over the whole curve equals the ordinary integral of g.
lhs = falpha_integral(f, 0.0, 1.0, table)
rhs, _ = integrate.quad(np.sin, 0.0, T)
print(f"F-integral of sin(J) = {lhs:.10f}, quad = {rhs:.10f}")

# Powers of the staircase integrate to T**(m+1)/(m+1).
for m in range(4):
    val = falpha_integral(lambda uu, m=m: staircase_eval(table, uu) ** m, 0.0, 1.0, table)
    print(f"m={m}: {val:.10f} vs {T ** (m + 1) / (m + 1):.10f}")
