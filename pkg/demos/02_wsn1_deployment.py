# One HTTL run on the WSN1 preset: 20 APs (10 strong, 10 weak), one FC.
from pathlib import Path

from twotier import HttlConfig, grid, httl_run, load_preset
from twotier.optimizer import collinearity_gaps
from twotier.render import emit_deployment_svg

s, _ = load_preset("wsn1")
trace = httl_run(s, HttlConfig(seed=1, integrator=grid(256)))

for rec in trace.iterations[:5] + trace.iterations[-2:]:
    print(f"iter {rec.iteration:3d}  D={rec.distortion:.5f}  sensor={rec.sensor_power:.5f}  "
          f"AP={rec.ap_power:.5f}")
print("stopped:", trace.stop_reason.value, "after", trace.n_iters, "iterations")

# at a fixed point every AP sits between its cell centroid and its FC
print("max distance off the centroid-FC segment:",
      collinearity_gaps(s, trace.final, trace.moments).max())

# strong APs end up with bigger cells
v = trace.moments.v
print("mean cell mass strong/weak:", v[:10].mean(), v[10:].mean())

out = emit_deployment_svg(s, trace.final, trace.moments, Path("wsn1_seed1.svg"))
print("wrote", out)
