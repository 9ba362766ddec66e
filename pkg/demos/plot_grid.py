"""
Error grid over noise and missing points
========================================

One CSV line per (sigma, lambda) cell plus one bar figure per error.
"""

# %%
import sys
import tempfile

from affine_rag.bench import GridSpec, run_grid, write_grid_outputs

grid = GridSpec(sigmas=[0.0, 0.05, 0.1], lambdas=[1.0, 0.9, 0.8], batch=2, n=50, trials=128)
records = run_grid(grid, out=sys.stdout)

# %%
# Same seed, same bytes, whatever the thread count.
out = tempfile.mkdtemp()
for path in write_grid_outputs(records, out):
    print(path)

# %%
# The same grid on a cloud read from disk:
#
#     affine-rag --trials 1024 grid --specimen teapot.txt
