"""
Lyapunov monitor
================

Check numerically that V = 1/2 s^T A_sym s decreases wherever the gain
condition holds, and see what the printed-sign control law does.
"""

from pathlib import Path

import numpy as np

from afsmc import dynamics, plotting, scenario, sim

out = Path("demo_out")
out.mkdir(exist_ok=True)

for name in ("constant_setpoint", "disturbed_afsmc"):
    cfg = scenario.load_scenario(name)
    trace = sim.run(cfg)
    rep = sim.lyapunov_monitor(trace, cfg)
    print(f"{name}: beta1 = {rep.beta1:.2f}, beta2 = {rep.beta2:.1f}, "
          f"V decreasing at {rep.decreasing}/{rep.qualifying} qualifying samples")

###############################################################################
# V on a log scale for the setpoint run.

cfg = scenario.load_scenario("constant_setpoint")
trace = sim.run(cfg)
logv = np.log10(np.maximum(trace.V, 1e-300))
print("wrote", plotting.line_chart(out / "lyapunov.svg", trace.t, {"log10 V": logv}, "Lyapunov function", "t [s]", "log10 V"))

###############################################################################
# With the minus sign on the lambda edot term the equivalent control no
# longer cancels the error dynamics and the run leaves the admissible region.

strict = scenario.load_scenario("constant_setpoint", ["controller.strict_paper=true"])
try:
    sim.run(strict)
except (sim.Diverged, dynamics.SingularInertia) as exc:
    print("strict_paper run aborted:", exc)
    print("samples recorded before abort:", len(exc.trace))
