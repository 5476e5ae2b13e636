# Two APs and one FC on a unit segment. AP 2 is a hundred times more
# expensive on both tiers, so the best it can do is stay out of the way.
import numpy as np

from twotier import HttlConfig, httl_run
from twotier.oracle import brute_force_1d, grid_check, strip_scenario

s = strip_scenario(a=[1.0, 100.0], b=[[1.0], [100.0]], beta=1.0)

# exhaustive search over a 0.01 position grid, exact cell integrals
best = brute_force_1d(s, step=0.01)
print("brute force:", best.evaluations, "candidates")
print("  AP positions", best.best.p[:, 0], " FC position", best.best.q[0, 0])
print("  cell volumes", best.volumes)
print("  distortion  ", best.distortion, " vs 1/12 =", 1 / 12)

# same deployment, re-evaluated by the 2-D quadrature used everywhere else
d2, v2 = grid_check(s, best)
print("2-D check:    ", d2, v2)

# Lloyd descent from ten random starts lands on the same optimum
finals = [httl_run(s, HttlConfig(seed=k)).final_distortion for k in range(1, 11)]
print("HTTL finals:  ", np.round(finals, 6))
