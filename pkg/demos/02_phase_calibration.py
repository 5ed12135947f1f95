"""
Calibrating the phase constant
==============================

The deformed product is defined by an oscillatory integral over R^2 x R^2.
Damping the integral and extrapolating the damping to zero gives an oracle for
the product of two characters, and fitting the oracle phases recovers the
constant in front of the lattice form.
"""
import math

from rieffel_fields import calibrate_phase_constant
from rieffel_fields.quadrature import classical_limit_sweep

##############################################################################
# Two pairs are enough for a quick look.  The full default set takes about
# forty seconds.
res = calibrate_phase_constant(pairs=[((1, 0), (0, 1)), ((2, 1), (1, 3))])
print(f"fitted kappa  {res.kappa:.8f}")
print(f"2 pi^2        {2 * math.pi ** 2:.8f}")
print(f"relative gap  {res.relative_deviation:.1e}")
for rec in res.pairs:
    print(rec["k"], rec["l"], "phase", round(rec["phase"], 9), "amplitude", round(rec["amplitude"], 6))

##############################################################################
# Scaling the form up sends the deformation back to the classical product:
# the phase of u # v shrinks like 1/s.
for row in classical_limit_sweep([1, 4, 16]):
    print(row)
