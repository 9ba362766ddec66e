"""
Multiplicative noise
====================

Each coordinate of y is scaled by an independent N(1, sigma^2) factor.
"""

# %%
import numpy as np

from affine_rag import RagOptions, rag_register
from affine_rag.bench import evaluate
from affine_rag.synth import ScenarioConfig, make_scenario

for sigma in (0.0, 0.01, 0.05, 0.1):
    gt = make_scenario(ScenarioConfig(n=60, sigma=sigma, seed=1))
    res = rag_register(gt.x, gt.y, RagOptions(trials=256, master_seed=1))
    rec = evaluate(gt, res, sigma, 1.0)
    print("sigma %.2f  d_sigma %.3f  delta_L %.4f  delta_H %.3f"
          % (sigma, rec.d_sigma, rec.delta_L, rec.delta_H))

# %%
# delta_L tracks d_sigma, the relative size of the noise itself: the map
# is recovered about as well as the data allow.
