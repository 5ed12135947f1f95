"""
The semiclassical limit
=======================

Scaling the deformation by hbar gives a family of algebras that reduces to
continuous functions at hbar = 0.  The norm of the almost Mathieu element
climbs to its classical sup norm, 4, as hbar shrinks.
"""
from rieffel_fields import SkewForm, almost_mathieu, build_hbar_family, quantized_norm_profile, semiclassical_action

hbars = [0.0] + [2.0 ** -j for j in range(0, 9, 2)]
spec = build_hbar_family(almost_mathieu(), SkewForm.standard(1), semiclassical_action(), hbars)
prof = quantized_norm_profile(spec, spec.elements["f"], N=24, power_doublings=5)

##############################################################################
# Each fiber reports a bracket.  The hbar = 0 fiber is the classical one.
for t in spec.ids:
    b = prof[t]
    theta = spec.fibers[t].cocycle.effective_theta()
    print(f"{t:14s} theta={theta:.5f}  [{b.lower:.4f}, {b.upper:.4f}]  |mid-4|={abs(b.midpoint - 4):.4f}")
