"""
Smoothing by the integrated action
==================================

Averaging the translation action against a smooth weight Phi multiplies each
Fourier coefficient by hat(Phi) at its frequency.  Derivatives of the result
move onto the weight.
"""
import numpy as np

from rieffel_fields import CharacterAction, TrigPoly, bump, derivative, integrated_action

rng = np.random.default_rng(3)
A = CharacterAction.identity(2, scale=0.4)
phi = bump(2, radius=0.6, points=301)
f = TrigPoly.random(rng, degree=4, n_terms=10)
g = integrated_action(f, A, phi)

##############################################################################
# High frequencies are damped, and the l1 norm never grows beyond ||Phi||_1.
for k, c in sorted(f, key=lambda kc: sum(map(abs, kc[0]))):
    print(k, f"{abs(c):.4f} -> {abs(g[k]):.4f}")
print("l1:", f.l1_norm(), "->", g.l1_norm(), " ||Phi||_1 =", phi.l1_norm())

##############################################################################
# d_j Theta_Phi(f) = -Theta_{d_j Phi}(f).
for j in range(2):
    e = tuple(int(i == j) for i in range(2))
    print("axis", j, "residual", derivative(g, A, e).max_abs_diff(-integrated_action(f, A, phi.derivative(j))))
