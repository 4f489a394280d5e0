"""
Fuzzy slope surface
===================

Evaluate the per-joint fuzzy tuner over its input universe and draw a
few slices of the lambda surface.
"""

from pathlib import Path

import numpy as np

from afsmc import fuzzy, plotting

out = Path("demo_out")
out.mkdir(exist_ok=True)

cfg = fuzzy.default_fuzzy_configs()[0]
E, Ed = cfg.e_partition.half_width, cfg.edot_partition.half_width
print("e centres   :", cfg.e_partition.centers)
print("edot centres:", cfg.edot_partition.centers)
print("singletons  :", cfg.singletons.as_array())

###############################################################################
# Membership degrees always sum to one; at most two sets fire per input.

for x in (-2 * E, -0.3 * E, 0.0, 0.25 * E, E):
    print(f"mu({x:+.3f}) =", np.round(fuzzy.membership_degrees(cfg.e_partition, x), 3))

###############################################################################
# Slices of lambda(e, edot) at fixed edot.

e = np.linspace(-1.5 * E, 1.5 * E, 301)
series = {f"edot = {v:+.2f}": [fuzzy.infer_lambda(cfg, x, v) for x in e] for v in (-Ed, 0.0, Ed)}
path = plotting.line_chart(out / "fuzzy_slices.svg", e, series, "Joint 1 slope", "e [rad]", "lambda [1/s]")
print("wrote", path)

###############################################################################
# The surface corners reproduce the rule table exactly.

for ed_label, ed in (("NL", -Ed), ("PL", Ed)):
    for e_label, x in (("NL", -E), ("PL", E)):
        print(f"(edot {ed_label}, e {e_label}) ->", cfg.table.lookup(ed_label, e_label), fuzzy.infer_lambda(cfg, x, ed))
