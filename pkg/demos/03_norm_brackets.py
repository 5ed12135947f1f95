"""
Norm brackets and the Hofstadter edge
=====================================

The norm of h = u + u* + v + v* in the rotation algebra A_theta is the top of
the almost Mathieu spectrum.  Finite sections give certified lower bounds,
the power trick gives certified upper bounds, and rational theta has an exact
answer through clock and shift matrices.
"""
from fractions import Fraction

import numpy as np

from rieffel_fields import almost_mathieu, exact_rational_norm, norm_bracket, rotation_cocycle

h = almost_mathieu()

##############################################################################
# At theta = 1/2 the norm is 2 sqrt 2.  The bracket tightens as N grows.
print("exact:", exact_rational_norm(h, Fraction(1, 2)).lower, 2 * np.sqrt(2))
for N in (8, 16, 32):
    b = norm_bracket(h, rotation_cocycle(0.5), N=N)
    print(f"N={N:3d}  [{b.lower:.6f}, {b.upper:.6f}]  {b.lower_method} / {b.upper_method}")

##############################################################################
# The upper edge of the butterfly over rationals p/q with q <= 7.
for theta in sorted({Fraction(p, q) for q in range(1, 8) for p in range(q + 1)}):
    print(f"theta={str(theta):>4s}  ||h|| = {exact_rational_norm(h, theta, grid=128).lower:.6f}")
