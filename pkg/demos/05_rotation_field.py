"""
A continuous field of rotation algebras
=======================================

Sampling theta on finer grids of [0, 1] gives fields of rotation algebras.
The largest norm jump between neighbouring samples shrinks under refinement,
which is numerical evidence that the norm of h varies continuously in theta.
"""
from rieffel_fields import almost_mathieu, build_rotation_family, continuity_report, quantized_norm_profile

h = almost_mathieu()
cache = {}
levels = []
for n in (9, 17, 33):
    spec = build_rotation_family(h, n)
    levels.append((spec, quantized_norm_profile(spec, spec.elements["f"], N=20, power_doublings=5, cache=cache)))

report = continuity_report(levels[0][1], levels[0][0], levels[1:])
print("max jumps per level:", [round(x, 4) for x in report["max_jumps"]])
print("strictly decreasing:", report["continuity_evidence"])

##############################################################################
# The coarsest profile itself.
spec, prof = levels[0]
for t in spec.ids:
    print(f"{t:12s} [{prof[t].lower:.4f}, {prof[t].upper:.4f}]")
