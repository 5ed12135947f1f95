"""
The orbit disk of T x SU(2)
===========================

Polynomials on T x SU(2) restrict to the orbits of a torus action.  The orbit
space is a disk: interior points carry two-dimensional tori with a deformed
product, the boundary circle carries one-dimensional orbits where the
deformation is invisible.
"""
import numpy as np

from rieffel_fields import SU2Poly, build_tsu2_disk, continuity_report, quantized_norm_profile, sup_axiom_check

f = SU2Poly.eta() + SU2Poly.eta().star() + SU2Poly.w() + SU2Poly.w().star()

##############################################################################
# Build the disk field and look at a few fibers.
spec = build_tsu2_disk(f, 6, 4)
F = spec.elements["f"]
prof = quantized_norm_profile(spec, F, N=16, power_doublings=5)
for t in spec.ids[:: max(1, len(spec.ids) // 8)]:
    r = float(np.hypot(*spec.sample(t).coords))
    kind = "classical" if spec.fibers[t].classical else "deformed"
    print(f"{t:22s} r={r:.3f} {kind:9s} [{prof[t].lower:.4f}, {prof[t].upper:.4f}]")
print("sup axiom:", sup_axiom_check(spec, F, prof).passed)

##############################################################################
# Refining the radial grid shrinks the norm jumps across neighbours.
cache = {}
levels = []
for n in (6, 12, 24):
    s = build_tsu2_disk(f, n, 4)
    levels.append((s, quantized_norm_profile(s, s.elements["f"], N=16, power_doublings=5, cache=cache)))
print("max jumps:", [round(x, 4) for x in continuity_report(levels[0][1], levels[0][0], levels[1:])["max_jumps"]])
