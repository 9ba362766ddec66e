"""
Best match versus weighted sum
==============================

Both consensus rules read the same trials, so the comparison is paired.
Scaled down here: 40 points, 4 scenarios per cell.
"""

# %%
import tempfile

from affine_rag import Mode
from affine_rag.bench import run_mode_study, write_mode_study_outputs

study = run_mode_study(n=40, sigmas=[0.0, 0.1, 0.2], trial_counts=[32, 128, 512], batch=4)
for mode in (Mode.BEST, Mode.WEIGHTED):
    print(mode.value)
    print(study.to_csv(mode))

# %%
# A sharper weight constant makes near-miss trials count for less.
sharp = run_mode_study(n=40, sigmas=[0.0, 0.1, 0.2], trial_counts=[32, 128, 512], batch=4,
                       c_override=10.0)
print(sharp.to_csv(Mode.WEIGHTED))

# %%
out = tempfile.mkdtemp()
for path in write_mode_study_outputs(study, out):
    print(path)
