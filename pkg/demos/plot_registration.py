"""
Registering two unlabeled point clouds
======================================

Two clouds that differ by an unknown affine map and an unknown relabeling
of their points. Nothing about the correspondence is given.
"""

# %%
# Make a ground-truth pair: 40 random points, a map with condition number 3,
# a random relabeling, no noise.
import numpy as np

from affine_rag import RagOptions, rag_register
from affine_rag.synth import ScenarioConfig, make_scenario

gt = make_scenario(ScenarioConfig(d=3, n=40, cond=3.0, seed=4))
print(gt.x.shape, gt.y.shape)

# %%
# Register. Every trial is a Frank-Wolfe run from a random doubly stochastic
# start; the best trial wins.
res = rag_register(gt.x, gt.y, RagOptions(trials=256, master_seed=0))
print("best objective %.10f (3 is perfect)" % res.best_objective)
print("matching right:", np.array_equal(res.matching, gt.matching))

# %%
# The recovered map and translation reproduce y from x.
err = np.abs(res.transform(gt.x) - gt.y[:, res.matching]).max()
print("max residual", err)
print(np.round(res.linear_map - gt.linear_map, 8))

# %%
# The trial objectives show why restarts matter: only a few reach 3.
obj = np.asarray(res.trial_objectives)
print("trials at optimum: %d / %d" % ((obj > 3 - 1e-8).sum(), obj.size))
