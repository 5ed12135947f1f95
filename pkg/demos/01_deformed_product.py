"""
The deformed product on the two-torus
=====================================

Characters e_k of T^2 multiply by adding frequencies.  Deforming along a
translation action twists that product by a phase, and the algebra laws
survive the twist.
"""
import numpy as np

from rieffel_fields import (CharacterAction, SkewForm, TrigPoly, act, build_cocycle,
                            deformed_mul, derivative, involution)

##############################################################################
# A Darboux form on R^2 and a translation action on T^2.  The cocycle holds
# the lattice form Q that produces the phase exp(i k^T Q l).
J = SkewForm.standard(1)
A = CharacterAction.identity(2, scale=0.15)
C = build_cocycle(J, A)
print("lattice form Q:\n", C.lattice_form)
print("effective rotation number:", C.effective_theta())

##############################################################################
# The generators u = e_(1,0) and v = e_(0,1) no longer commute.
u, v = TrigPoly.character((1, 0)), TrigPoly.character((0, 1))
uv, vu = deformed_mul(u, v, C), deformed_mul(v, u, C)
print("u # v =", uv)
print("v # u =", vu)
print("ratio:", uv[(1, 1)] / vu[(1, 1)], "commutation phase:", C.commutation_phase((1, 0), (0, 1)))

##############################################################################
# Associativity, the star property and the Leibniz rule hold to roundoff.
rng = np.random.default_rng(0)
f, g, h = (TrigPoly.random(rng) for _ in range(3))
fg = deformed_mul(f, g, C)
print("associativity:", deformed_mul(fg, h, C).max_abs_diff(deformed_mul(f, deformed_mul(g, h, C), C)))
print("involution:   ", involution(fg).max_abs_diff(deformed_mul(involution(g), involution(f), C)))
X = rng.normal(size=2)
print("automorphism: ", act(fg, A, X).max_abs_diff(deformed_mul(act(f, A, X), act(g, A, X), C)))
e = (1, 0)
leibniz = deformed_mul(derivative(f, A, e), g, C) + deformed_mul(f, derivative(g, A, e), C)
print("derivation:   ", derivative(fg, A, e).max_abs_diff(leibniz))
