# HTTL against the weight-blind nearest-FC Lloyd baseline as beta grows.
# Coarse grid and five seeds keep this under a minute.
import numpy as np

from twotier import HttlConfig, grid, httl_run, load_preset
from twotier.baselines import LABEL, nearest_fc_lloyd

g = grid(128)
seeds = range(1, 6)
print(f"{'beta':>5} {'HTTL':>9} {LABEL:>22} {'gap':>8}")
for beta in (0.05, 0.15, 0.25, 0.35, 0.45):
    s = load_preset("wsn1", beta)[0]
    h = np.mean([httl_run(s, HttlConfig(seed=k, integrator=g)).final_distortion for k in seeds])
    b = np.mean([nearest_fc_lloyd(s, HttlConfig(seed=k, integrator=g)).final_distortion
                 for k in seeds])
    print(f"{beta:5.2f} {h:9.4f} {b:22.4f} {b - h:8.4f}")
