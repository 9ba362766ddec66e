"""
Missing points
==============

x keeps only a fraction lambda of the points of y. The smaller projector is
padded with zeros and the first m entries of the winning permutation are
the matching.
"""

# %%
import numpy as np

from affine_rag import RagOptions, rag_register
from affine_rag.bench import evaluate
from affine_rag.synth import ScenarioConfig, make_scenario

gt = make_scenario(ScenarioConfig(n=60, lambda_=0.9, seed=2))
print("x has %d points, y has %d" % (gt.x.shape[1], gt.y.shape[1]))

res = rag_register(gt.x, gt.y, RagOptions(trials=512, master_seed=0))
rec = evaluate(gt, res, 0.0, 0.9)
print("d_lambda %.3f  delta_L %.4f  matched right %.0f%%"
      % (rec.d_lambda, rec.delta_L, 100 * np.mean(res.matching == gt.matching)))

# %%
# The subset's projector is not a block of the full one, so even without
# noise the estimate is approximate. Errors grow as lambda shrinks.
for lam in (1.0, 0.95, 0.8, 0.6):
    gt = make_scenario(ScenarioConfig(n=60, lambda_=lam, seed=2))
    res = rag_register(gt.x, gt.y, RagOptions(trials=256, master_seed=0))
    print("lambda %.2f  delta_L %.4f" % (lam, evaluate(gt, res, 0.0, lam).delta_L))
